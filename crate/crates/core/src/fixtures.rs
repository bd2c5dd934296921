//! Bundled measurement tables (Caltech-101 classification and PCB defect
//! detection, with and without pre-training).

pub const CALTECH101: &str = include_str!("../../../fixtures/caltech101.csv");
pub const PCB_SCRATCH: &str = include_str!("../../../fixtures/pcb_scratch.csv");
pub const PCB_PRETRAINED: &str = include_str!("../../../fixtures/pcb_pretrained.csv");
