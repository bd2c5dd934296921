use std::collections::BTreeMap;

use crate::graph::tag::{self, Role};
use crate::graph::ModelGraph;

/// Checks every tagged squeeze/expand triple against the squeeze
/// constraint. Returns one message per offending module; empty means the
/// graph is clean (vacuously so when it has no fire modules).
pub fn validate_fire_constraints(graph: &ModelGraph) -> Vec<String> {
    let mut modules: BTreeMap<&str, [Option<usize>; 3]> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();
    for node in graph.nodes() {
        let Some(t) = node.tag.as_deref() else { continue };
        let slot = match tag::role(t) {
            Some(Role::Squeeze) => 0,
            Some(Role::Expand1) => 1,
            Some(Role::Expand3) => 2,
            _ => continue,
        };
        let Some(filters) = node.kind.filters().filter(|_| node.kind.is_conv()) else {
            continue;
        };
        let key = tag::module_key(t).expect("role tags carry a module key");
        let entry = modules.entry(key).or_insert_with(|| {
            order.push(key);
            [None; 3]
        });
        entry[slot] = Some(filters);
    }
    order
        .into_iter()
        .filter_map(|key| match modules[key] {
            [Some(s), Some(e1), Some(e3)] if s < e1 + e3 => None,
            [Some(s), Some(e1), Some(e3)] => Some(format!(
                "module '{key}': squeeze {s} is not < expand1 {e1} + expand3 {e3} = {}",
                e1 + e3
            )),
            [s, e1, e3] => Some(format!(
                "module '{key}': incomplete fire module (squeeze {s:?}, expand1 {e1:?}, expand3 {e3:?})"
            )),
        })
        .collect()
}
