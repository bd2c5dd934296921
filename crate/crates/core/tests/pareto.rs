mod common;

use cndkit::fixtures;
use cndkit::pareto::{
    classify_quadrant, export_plot_data, load_measurements, memory_frontier, pareto_front, pareto_front_indices,
    MemoryFrontier, ParetoError, QuadrantConfig, QuadrantLabel,
};
use cndkit::{Measurement, MeasurementF32};
use common::{brute_force_front, random_measurements, rng};

fn labels(csv: &str) -> Vec<(String, QuadrantLabel)> {
    let records: Vec<Measurement> = load_measurements(csv).unwrap();
    let config = QuadrantConfig::default();
    let frontier = config.memory_frontier_for(&records).unwrap();
    records
        .iter()
        .map(|r| (r.model.clone(), classify_quadrant(r, &config, frontier)))
        .collect()
}

#[test]
fn caltech_quadrants() {
    use QuadrantLabel::*;
    let want = [
        ("Optimized", HighAccLowMem),
        ("Xception", HighAccHighMem),
        ("EfficientNetV2B1", LowAccLowMem),
        ("MobileNetV2", LowAccLowMem),
    ];
    let got = labels(fixtures::CALTECH101);
    for (name, label) in want {
        assert!(got.contains(&(name.to_string(), label)), "{name}: {got:?}");
    }
}

#[test]
fn pcb_scratch_quadrants() {
    use QuadrantLabel::*;
    let want = [
        ("Optimized", HighAccLowMem),
        ("Xception", HighAccHighMem),
        ("EfficientNetV2B1", LowAccHighMem),
        ("MobileNetV2", LowAccLowMem),
    ];
    let got = labels(fixtures::PCB_SCRATCH);
    for (name, label) in want {
        assert!(got.contains(&(name.to_string(), label)), "{name}: {got:?}");
    }
}

#[test]
fn midpoint_frontiers() {
    let caltech: Vec<Measurement> = load_measurements(fixtures::CALTECH101).unwrap();
    let pcb: Vec<Measurement> = load_measurements(fixtures::PCB_SCRATCH).unwrap();
    assert!((memory_frontier(&caltech).unwrap() - 848.8).abs() < 1e-9);
    assert!((memory_frontier(&pcb).unwrap() - 871.5).abs() < 1e-9);
    // Single precision agrees at the displayed precision.
    let caltech32: Vec<MeasurementF32> = load_measurements(fixtures::CALTECH101).unwrap();
    assert!((memory_frontier(&caltech32).unwrap() - 848.8).abs() < 1e-3);
}

#[test]
fn fixture_fronts_match_brute_force() {
    for csv in [fixtures::CALTECH101, fixtures::PCB_SCRATCH, fixtures::PCB_PRETRAINED] {
        let records: Vec<Measurement> = load_measurements(csv).unwrap();
        let mut got = pareto_front_indices(&records);
        got.sort_unstable();
        assert_eq!(got, brute_force_front(&records));
    }
    let caltech: Vec<Measurement> = load_measurements(fixtures::CALTECH101).unwrap();
    let names: Vec<String> = pareto_front(&caltech).into_iter().map(|r| r.model).collect();
    assert_eq!(names, ["EfficientNetV2B1", "MobileNetV2", "Optimized"]);
}

#[test]
fn random_fronts_match_brute_force() {
    let mut r = rng(31);
    for _ in 0..2000 {
        let records = random_measurements(&mut r, 100);
        let mut got = pareto_front_indices(&records);
        got.sort_unstable();
        assert_eq!(got, brute_force_front(&records));
    }
}

#[test]
fn front_is_sorted_by_memory_then_accuracy() {
    let mut r = rng(32);
    for _ in 0..200 {
        let records = random_measurements(&mut r, 50);
        let front = pareto_front(&records);
        for w in front.windows(2) {
            assert!(
                w[0].avg_mem_mb < w[1].avg_mem_mb
                    || (w[0].avg_mem_mb == w[1].avg_mem_mb && w[0].test_acc >= w[1].test_acc)
            );
        }
    }
}

#[test]
fn frontier_boundaries_are_inclusive() {
    let records: Vec<Measurement> = load_measurements(fixtures::CALTECH101).unwrap();
    let optimized = records.iter().find(|r| r.model == "Optimized").unwrap();
    let config = QuadrantConfig::new(optimized.test_acc, MemoryFrontier::Explicit(optimized.avg_mem_mb)).unwrap();
    assert_eq!(
        classify_quadrant(optimized, &config, optimized.avg_mem_mb),
        QuadrantLabel::HighAccLowMem
    );
}

#[test]
fn high_accuracy_frontier_makes_everything_low_accuracy() {
    let records: Vec<Measurement> = load_measurements(fixtures::CALTECH101).unwrap();
    let config = QuadrantConfig::new(95.0, MemoryFrontier::Midpoint).unwrap();
    let frontier = config.memory_frontier_for(&records).unwrap();
    assert!(records.iter().all(|r| matches!(
        classify_quadrant(r, &config, frontier),
        QuadrantLabel::LowAccLowMem | QuadrantLabel::LowAccHighMem
    )));
}

#[test]
fn malformed_rows_are_located() {
    let header = fixtures::CALTECH101.lines().next().unwrap();
    let bad_acc = format!("{header}\nX,caltech101,50,abc,800,,,\n");
    match load_measurements::<f64>(&bad_acc) {
        Err(ParetoError::Parse { row, column, .. }) => {
            assert_eq!(row, 2, "file line of the offending record");
            assert_eq!(column, "test_acc");
        }
        other => panic!("expected parse error, got {other:?}"),
    }
    let out_of_range = format!("{header}\nX,caltech101,50,101,800,,,\n");
    assert!(matches!(
        load_measurements::<f64>(&out_of_range),
        Err(ParetoError::Range { .. })
    ));
    assert!(QuadrantConfig::new(0.0, MemoryFrontier::Midpoint).is_err());
    assert!(QuadrantConfig::new(100.0, MemoryFrontier::<f64>::Midpoint).is_err());
}

#[test]
fn plot_export_lists_every_record() {
    let records: Vec<Measurement> = load_measurements(fixtures::CALTECH101).unwrap();
    let text = export_plot_data(&records, &QuadrantConfig::default()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# accuracy_frontier=70,memory_frontier=848.8"));
    assert_eq!(lines.next(), Some("model,test_acc,avg_mem_mb,quadrant,on_front"));
    assert_eq!(lines.count(), records.len());

    let empty = export_plot_data::<f64>(&[], &QuadrantConfig::default()).unwrap();
    assert_eq!(empty.lines().count(), 2);
}
