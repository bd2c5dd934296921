//! Toolkit for describing CNN architectures as layer graphs, rewriting them
//! toward smaller parameter budgets, and comparing measured models on the
//! accuracy/memory plane.
//!
//! - [`graph`]: the layer-DAG IR, shape inference and the JSON model format.
//! - [`zoo`]: reference builders (Xception, its optimized variant, MobileNetV2).
//! - [`transform`]: kernel replacement, fire-module insertion and audits.
//! - [`analyzer`]: parameter counts, MAC estimates and memory estimates.
//! - [`pareto`]: quadrant labelling and Pareto fronts over measurement CSVs.
//! - [`cli`]: the `cndkit` command-line front end.

pub mod analyzer;
pub mod cli;
pub mod fixtures;
pub mod graph;
pub mod pareto;
pub mod scalar;
pub mod transform;
pub mod zoo;

/// Measurement row in double precision, the default for CSV analysis.
pub type Measurement = pareto::ModelMeasurement<f64>;
/// Single-precision measurement row.
pub type MeasurementF32 = pareto::ModelMeasurement<f32>;
pub type QuadrantConfigF64 = pareto::QuadrantConfig<f64>;
pub type QuadrantConfigF32 = pareto::QuadrantConfig<f32>;
