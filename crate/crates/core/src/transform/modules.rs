use crate::graph::tag::{self, Role};
use crate::graph::{GraphError, ModelGraph};

/// Nodes of one tagged module, split into main path and shortcut branch,
/// each in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleView {
    pub key: String,
    pub main: Vec<String>,
    pub shortcut: Vec<String>,
}

/// All modules in order of first appearance along the topological order.
pub fn module_views(graph: &ModelGraph) -> Result<Vec<ModuleView>, GraphError> {
    let mut views: Vec<ModuleView> = Vec::new();
    for id in graph.topo_sort()? {
        let node = graph.node(&id).expect("topo order names existing nodes");
        let Some(t) = node.tag.as_deref() else { continue };
        let Some(key) = tag::module_key(t) else { continue };
        let pos = match views.iter().position(|v| v.key == key) {
            Some(p) => p,
            None => {
                views.push(ModuleView {
                    key: key.to_string(),
                    main: Vec::new(),
                    shortcut: Vec::new(),
                });
                views.len() - 1
            }
        };
        if tag::role(t) == Some(Role::Shortcut) {
            views[pos].shortcut.push(id);
        } else {
            views[pos].main.push(id);
        }
    }
    Ok(views)
}
