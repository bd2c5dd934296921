use serde::Serialize;

use crate::analyzer::count_params;
use crate::graph::tag;
use crate::graph::{GraphError, ModelGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffRow {
    pub module: String,
    pub kernels_a: Vec<usize>,
    pub kernels_b: Vec<usize>,
    pub filters_a: Vec<usize>,
    pub filters_b: Vec<usize>,
    pub params_a: u64,
    pub params_b: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    pub name_a: String,
    pub name_b: String,
    pub rows: Vec<DiffRow>,
    pub total_a: u64,
    pub total_b: u64,
    /// `(total_a - total_b) / total_a * 100`.
    pub reduction_pct: f64,
}

#[derive(Default)]
struct Side {
    kernels: Vec<usize>,
    filters: Vec<usize>,
    params: u64,
}

fn group_of(tag: Option<&str>) -> String {
    match tag {
        Some(t) => tag::module_key(t).unwrap_or(t).to_string(),
        None => "(untagged)".to_string(),
    }
}

/// Main-path convolutions only; shortcut projections show up in params.
fn collect(graph: &ModelGraph) -> Result<Vec<(String, Side)>, GraphError> {
    let report = count_params(graph)?;
    let mut groups: Vec<(String, Side)> = Vec::new();
    for entry in &report.per_layer {
        let node = graph.node(&entry.id).expect("report ids exist");
        let key = group_of(node.tag.as_deref());
        let pos = match groups.iter().position(|(k, _)| *k == key) {
            Some(p) => p,
            None => {
                groups.push((key, Side::default()));
                groups.len() - 1
            }
        };
        let side = &mut groups[pos].1;
        side.params += entry.total();
        let shortcut = node.tag.as_deref().and_then(tag::role) == Some(tag::Role::Shortcut);
        if let (Some(k), false) = (node.kind.kernel(), shortcut) {
            side.kernels.push(k.size());
            side.filters.push(node.kind.filters().expect("convs have filters"));
        }
    }
    Ok(groups)
}

pub fn diff_report(a: &ModelGraph, b: &ModelGraph) -> Result<DiffReport, GraphError> {
    let ga = collect(a)?;
    let mut gb = collect(b)?;
    let mut rows = Vec::new();
    for (key, sa) in ga {
        let sb = match gb.iter().position(|(k, _)| *k == key) {
            Some(p) => gb.remove(p).1,
            None => Side::default(),
        };
        rows.push(row(key, sa, sb));
    }
    for (key, sb) in gb {
        rows.push(row(key, Side::default(), sb));
    }
    let total_a: u64 = rows.iter().map(|r| r.params_a).sum();
    let total_b: u64 = rows.iter().map(|r| r.params_b).sum();
    let reduction_pct = if total_a == 0 {
        0.0
    } else {
        (total_a as f64 - total_b as f64) / total_a as f64 * 100.0
    };
    Ok(DiffReport {
        name_a: a.name.clone(),
        name_b: b.name.clone(),
        rows,
        total_a,
        total_b,
        reduction_pct,
    })
}

fn row(module: String, a: Side, b: Side) -> DiffRow {
    DiffRow {
        module,
        kernels_a: a.kernels,
        kernels_b: b.kernels,
        filters_a: a.filters,
        filters_b: b.filters,
        params_a: a.params,
        params_b: b.params,
    }
}

fn join(v: &[usize]) -> String {
    if v.is_empty() {
        return ABSENT_CELL.to_string();
    }
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

const ABSENT_CELL: &str = "-";

impl DiffReport {
    pub fn render(&self) -> String {
        let header = [
            "module".to_string(),
            format!("kernels[{}]", self.name_a),
            format!("kernels[{}]", self.name_b),
            format!("filters[{}]", self.name_a),
            format!("filters[{}]", self.name_b),
            format!("params[{}]", self.name_a),
            format!("params[{}]", self.name_b),
            "delta".to_string(),
        ];
        let mut table: Vec<[String; 8]> = vec![header];
        for r in &self.rows {
            table.push([
                r.module.clone(),
                join(&r.kernels_a),
                join(&r.kernels_b),
                join(&r.filters_a),
                join(&r.filters_b),
                r.params_a.to_string(),
                r.params_b.to_string(),
                (r.params_b as i64 - r.params_a as i64).to_string(),
            ]);
        }
        table.push([
            "total".to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            self.total_a.to_string(),
            self.total_b.to_string(),
            (self.total_b as i64 - self.total_a as i64).to_string(),
        ]);
        let mut widths = [0usize; 8];
        for line in &table {
            for (w, cell) in widths.iter_mut().zip(line) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for line in &table {
            let cells: Vec<String> = line
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| if i >= 5 { format!("{c:>w$}") } else { format!("{c:<w$}") })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out.push_str(&format!("reduction: {:.2}%\n", self.reduction_pct));
        out
    }
}

/// Rendered module-by-module comparison of two graphs.
pub fn diff(original: &ModelGraph, transformed: &ModelGraph) -> Result<String, GraphError> {
    Ok(diff_report(original, transformed)?.render())
}
