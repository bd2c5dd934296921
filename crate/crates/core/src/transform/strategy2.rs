use std::collections::{BTreeMap, HashSet};

use super::modules::{module_views, ModuleView};
use super::validate::validate_fire_constraints;
use super::{NodeChange, PassReport, TransformError, ABSENT};
use crate::analyzer::count_params;
use crate::graph::tag::{self, Role};
use crate::graph::{Kernel, LayerKind, LayerNode, ModelGraph, Padding, Stride};
use crate::zoo::{make_fire_module, FireModuleSpec};

pub const STRATEGY2: &str = "strategy2_insert_fire";

/// Replaces the convolution stack of each targeted module with a fire
/// module, then reconciles residual connections: projection convs are
/// resized to the new width, and identity shortcuts whose shapes no longer
/// match get a 1x1 projection inserted.
///
/// Specs are checked before anything is touched; on error the input graph
/// is returned to the caller unchanged.
pub fn strategy2_insert_fire(
    graph: &ModelGraph,
    specs: &BTreeMap<String, FireModuleSpec>,
) -> Result<(ModelGraph, PassReport), TransformError> {
    for (key, spec) in specs {
        spec.check(key)?;
    }
    let views = module_views(graph)?;
    for key in specs.keys() {
        if !views.iter().any(|v| &v.key == key) {
            return Err(TransformError::UnknownModuleTag(key.clone()));
        }
    }
    let params_before = count_params(graph)?.total;

    let mut current = graph.clone();
    let mut nodes_changed = Vec::new();
    for view in views.iter().filter(|v| specs.contains_key(&v.key)) {
        current = replace_body(&current, view, specs[&view.key], &mut nodes_changed)?;
    }
    let current = reconcile_residuals(current, &mut nodes_changed)?;
    current.validate()?;

    let params_after = count_params(&current)?.total;
    let violations = validate_fire_constraints(&current);
    Ok((
        current,
        PassReport {
            pass_name: STRATEGY2.to_string(),
            nodes_changed,
            params_before,
            params_after,
            violations,
        },
    ))
}

/// Main-path span from the first to the last convolution, extended over a
/// directly following BatchNorm and then Activation.
fn conv_span(graph: &ModelGraph, view: &ModuleView) -> Result<Vec<String>, TransformError> {
    let is_conv = |id: &String| graph.node(id).is_some_and(|n| n.kind.is_conv());
    let unsupported = |reason: &str| TransformError::UnsupportedModule {
        module: view.key.clone(),
        reason: reason.to_string(),
    };
    let first = view
        .main
        .iter()
        .position(is_conv)
        .ok_or_else(|| unsupported("no convolution on the main path"))?;
    let mut last = view.main.iter().rposition(is_conv).expect("first exists");
    for follows in [
        |k: &LayerKind| *k == LayerKind::BatchNorm,
        |k: &LayerKind| matches!(k, LayerKind::Activation(_)),
    ] {
        if let Some(next) = view.main.get(last + 1) {
            let node = graph.node(next).expect("view ids exist");
            if follows(&node.kind) && node.inputs == [view.main[last].clone()] {
                last += 1;
            }
        }
    }
    let span: Vec<String> = view.main[first..=last].to_vec();

    // The span must be a simple chain entered once and left once.
    let members: HashSet<&str> = span.iter().map(String::as_str).collect();
    for (i, id) in span.iter().enumerate() {
        let node = graph.node(id).expect("view ids exist");
        if i > 0 && node.inputs != [span[i - 1].clone()] {
            return Err(unsupported("convolution stack is not a single chain"));
        }
        if i + 1 < span.len() {
            let outside = graph
                .consumers(id)
                .into_iter()
                .any(|c| !members.contains(c));
            if outside {
                return Err(unsupported("intermediate node has consumers outside the stack"));
            }
        }
    }
    Ok(span)
}

fn replace_body(
    graph: &ModelGraph,
    view: &ModuleView,
    spec: FireModuleSpec,
    changes: &mut Vec<NodeChange>,
) -> Result<ModelGraph, TransformError> {
    let span = conv_span(graph, view)?;
    let head = graph.node(&span[0]).expect("span ids exist");
    let entry = head.inputs[0].clone();
    let stride = match head.kind {
        LayerKind::Conv2D { stride, .. } | LayerKind::SeparableConv2D { stride, .. } => stride,
        _ => Stride::One,
    };
    // Any in-stack downsampling moves to the 3x3 expand.
    let stride_out = span
        .iter()
        .filter_map(|id| match graph.node(id)?.kind {
            LayerKind::Conv2D { stride, .. } | LayerKind::SeparableConv2D { stride, .. } => Some(stride),
            _ => None,
        })
        .find(|s| *s == Stride::Two)
        .unwrap_or(stride);
    let fire = make_fire_module(&view.key, &entry, spec, stride_out)?;
    let exit_old = span.last().expect("span is non-empty").clone();
    let exit_new = fire.last().expect("fire module is non-empty").id.clone();

    for id in &span {
        let node = graph.node(id).expect("span ids exist");
        if node.kind.is_conv() {
            changes.push(NodeChange {
                id: id.clone(),
                before: node.kind.to_string(),
                after: ABSENT.to_string(),
            });
        }
    }
    for node in fire.iter().filter(|n| n.kind.is_conv()) {
        changes.push(NodeChange {
            id: node.id.clone(),
            before: ABSENT.to_string(),
            after: node.kind.to_string(),
        });
    }

    let members: HashSet<&str> = span.iter().map(String::as_str).collect();
    let mut nodes = Vec::with_capacity(graph.len() + fire.len());
    let mut fire = Some(fire);
    for node in graph.nodes() {
        if members.contains(node.id.as_str()) {
            if node.id == span[0] {
                nodes.extend(fire.take().expect("inserted once"));
            }
            continue;
        }
        let mut node = node.clone();
        for input in &mut node.inputs {
            if *input == exit_old {
                *input = exit_new.clone();
            }
        }
        nodes.push(node);
    }
    Ok(graph.with_nodes(nodes)?)
}

/// Walks Add nodes in topological order and repairs channel mismatches
/// introduced by width changes upstream.
fn reconcile_residuals(
    mut graph: ModelGraph,
    changes: &mut Vec<NodeChange>,
) -> Result<ModelGraph, TransformError> {
    let adds: Vec<String> = graph
        .topo_sort()?
        .into_iter()
        .filter(|id| graph.node(id).is_some_and(|n| n.kind == LayerKind::Add))
        .collect();
    for add_id in adds {
        let shapes = partial_shapes(&graph, &add_id)?;
        let add = graph.node(&add_id).expect("add exists").clone();
        let (a, b) = (&add.inputs[0], &add.inputs[1]);
        if shapes[a] == shapes[b] {
            continue;
        }
        let broken = || TransformError::ResidualShapeBroken(add_id.clone());
        let is_projection = |id: &str| {
            graph
                .node(id)
                .and_then(|n| n.tag.as_deref())
                .and_then(tag::role)
                == Some(Role::Shortcut)
        };
        let add_module = add.tag.as_deref().and_then(tag::module_key);
        let in_module = |id: &str| {
            add_module.is_some()
                && graph.node(id).and_then(|n| n.tag.as_deref()).and_then(tag::module_key) == add_module
        };
        // Identify the shortcut side: an explicit projection, or else the
        // input that comes from outside the Add's module.
        let (main, shortcut) = if is_projection(b) {
            (a, b)
        } else if is_projection(a) {
            (b, a)
        } else if in_module(a) && !in_module(b) {
            (a, b)
        } else if in_module(b) && !in_module(a) {
            (b, a)
        } else {
            return Err(broken());
        };
        let target = shapes[main];
        let source = shapes[shortcut];

        if is_projection(shortcut) {
            let conv_id = projection_conv(&graph, shortcut).ok_or_else(broken)?;
            let node = graph.node_mut(&conv_id).expect("found above");
            let before = node.kind.to_string();
            if let LayerKind::Conv2D { filters, .. } = &mut node.kind {
                *filters = target.channels;
            }
            changes.push(NodeChange {
                id: conv_id,
                before,
                after: node.kind.to_string(),
            });
        } else {
            let stride = if (source.height, source.width) == (target.height, target.width) {
                Stride::One
            } else if (source.height.div_ceil(2), source.width.div_ceil(2))
                == (target.height, target.width)
            {
                Stride::Two
            } else {
                return Err(broken());
            };
            let key = add_module.ok_or_else(broken)?.to_string();
            let block = tag::block_name(&key);
            let t = tag::role_tag(&key, Role::Shortcut);
            let conv = LayerNode::new(
                format!("{block}_shortcut_conv"),
                LayerKind::Conv2D {
                    filters: target.channels,
                    kernel: Kernel::K1,
                    stride,
                    padding: Padding::Same,
                    has_bias: false,
                },
                &[shortcut],
            )
            .with_tag(t.clone());
            let bn = LayerNode::new(format!("{block}_shortcut_bn"), LayerKind::BatchNorm, &[&conv.id])
                .with_tag(t);
            changes.push(NodeChange {
                id: conv.id.clone(),
                before: ABSENT.to_string(),
                after: conv.kind.to_string(),
            });
            let bn_id = bn.id.clone();
            let shortcut = shortcut.clone();
            let mut inserted = Some([conv, bn]);
            let mut nodes = Vec::with_capacity(graph.len() + 2);
            for node in graph.nodes() {
                if node.id == add_id {
                    nodes.extend(inserted.take().expect("single Add"));
                    let mut add = node.clone();
                    for input in &mut add.inputs {
                        if *input == shortcut {
                            *input = bn_id.clone();
                        }
                    }
                    nodes.push(add);
                } else {
                    nodes.push(node.clone());
                }
            }
            graph = graph.with_nodes(nodes)?;
        }

        let shapes = partial_shapes(&graph, &add_id)?;
        let add = graph.node(&add_id).expect("add exists");
        if shapes[&add.inputs[0]] != shapes[&add.inputs[1]] {
            return Err(broken());
        }
    }
    Ok(graph)
}

/// Follows a shortcut branch back to its Conv2D.
fn projection_conv(graph: &ModelGraph, from: &str) -> Option<String> {
    let mut id = from.to_string();
    loop {
        let node = graph.node(&id)?;
        if tag::role(node.tag.as_deref()?) != Some(Role::Shortcut) {
            return None;
        }
        if matches!(node.kind, LayerKind::Conv2D { .. }) {
            return Some(id);
        }
        id = node.inputs.first()?.clone();
    }
}

/// Shapes of every node upstream of `stop` (inclusive of its inputs), so an
/// Add can be inspected even while a later Add is still mismatched.
fn partial_shapes(
    graph: &ModelGraph,
    stop: &str,
) -> Result<crate::graph::ShapeMap, TransformError> {
    let mut shapes = crate::graph::ShapeMap::new();
    for id in graph.topo_sort()? {
        if id == stop {
            break;
        }
        let node = graph.node(&id).expect("topo ids exist");
        let inputs: Vec<_> = node.inputs.iter().map(|i| shapes[i]).collect();
        let shape = crate::graph::output_shape(&id, &node.kind, &inputs, graph.input_shape)?;
        shapes.insert(id, shape);
    }
    Ok(shapes)
}
