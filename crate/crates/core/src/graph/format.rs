//! Versioned JSON model format.
//!
//! ```text
//! {"schema_version":1, "name":str, "input_shape":[H,W,C], "num_classes":int,
//!  "metadata":{...}, "nodes":[{"id":str, "kind":str, "attrs":{...},
//!  "inputs":[str], "tag":str|null}]}
//! ```
//!
//! Keys are emitted in the order above and attrs in a fixed per-kind order,
//! so the same graph always serializes to the same bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::layer::{ActivationFn, Kernel, LayerKind, LayerNode, Padding, Stride, TensorShape};
use super::model::ModelGraph;
use super::GraphError;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("parse error in field '{field}': {message}")]
    Field { field: String, message: String },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersionUnsupported(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl FormatError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Field {
            field: field.into(),
            message: message.into(),
        }
    }

    fn syntax(e: serde_json::Error) -> Self {
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    schema_version: u64,
    name: String,
    input_shape: [usize; 3],
    num_classes: usize,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
    nodes: Vec<NodeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    id: String,
    kind: String,
    #[serde(default)]
    attrs: Map<String, Value>,
    #[serde(default)]
    inputs: Vec<String>,
    tag: Option<String>,
}

/// Serializes a graph after validating it.
pub fn serialize(graph: &ModelGraph) -> Result<String, FormatError> {
    graph.validate()?;
    let shape = graph.input_shape;
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        name: graph.name.clone(),
        input_shape: [shape.height, shape.width, shape.channels],
        num_classes: graph.num_classes,
        metadata: graph.metadata.clone(),
        nodes: graph
            .nodes()
            .iter()
            .map(|n| NodeRecord {
                id: n.id.clone(),
                kind: n.kind.name().to_string(),
                attrs: attrs_of(&n.kind),
                inputs: n.inputs.clone(),
                tag: n.tag.clone(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document is always serializable");
    text.push('\n');
    Ok(text)
}

/// Parses and validates a model document.
pub fn deserialize(text: &str) -> Result<ModelGraph, FormatError> {
    let raw: Value = serde_json::from_str(text).map_err(FormatError::syntax)?;
    match raw.get("schema_version") {
        Some(v) => match v.as_u64() {
            Some(SCHEMA_VERSION) => {}
            Some(other) => return Err(FormatError::SchemaVersionUnsupported(other)),
            None => return Err(FormatError::field("schema_version", "expected an integer")),
        },
        None => return Err(FormatError::field("schema_version", "missing")),
    }
    let doc: Document = serde_json::from_str(text).map_err(FormatError::syntax)?;
    let [h, w, c] = doc.input_shape;
    let input_shape = TensorShape::new(h, w, c)
        .ok_or_else(|| FormatError::field("input_shape", "dimensions must be >= 1"))?;
    if doc.num_classes == 0 {
        return Err(FormatError::field("num_classes", "must be >= 1"));
    }
    let nodes = doc
        .nodes
        .into_iter()
        .enumerate()
        .map(|(i, rec)| {
            let kind = parse_kind(&rec.kind, &rec.attrs, &format!("nodes[{i}]"))?;
            Ok(LayerNode {
                id: rec.id,
                kind,
                inputs: rec.inputs,
                tag: rec.tag,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let mut graph = ModelGraph::from_nodes(doc.name, input_shape, doc.num_classes, nodes)?;
    graph.metadata = doc.metadata;
    graph.validate()?;
    Ok(graph)
}

fn attrs_of(kind: &LayerKind) -> Map<String, Value> {
    let mut m = Map::new();
    match *kind {
        LayerKind::Conv2D {
            filters,
            kernel,
            stride,
            padding,
            has_bias,
        } => {
            m.insert("filters".into(), filters.into());
            m.insert("kernel".into(), kernel.size().into());
            m.insert("stride".into(), stride.get().into());
            m.insert("padding".into(), padding.as_str().into());
            m.insert("has_bias".into(), has_bias.into());
        }
        LayerKind::SeparableConv2D {
            filters,
            kernel,
            stride,
            padding,
            depthwise_only,
        } => {
            m.insert("filters".into(), filters.into());
            m.insert("kernel".into(), kernel.size().into());
            m.insert("stride".into(), stride.get().into());
            m.insert("padding".into(), padding.as_str().into());
            m.insert("depthwise_only".into(), depthwise_only.into());
        }
        LayerKind::MaxPool {
            pool_size,
            stride,
            padding,
        } => {
            m.insert("pool_size".into(), pool_size.into());
            m.insert("stride".into(), stride.into());
            m.insert("padding".into(), padding.as_str().into());
        }
        LayerKind::Activation(f) => {
            m.insert("function".into(), f.as_str().into());
        }
        LayerKind::Dense { units, has_bias } => {
            m.insert("units".into(), units.into());
            m.insert("has_bias".into(), has_bias.into());
        }
        LayerKind::Input | LayerKind::GlobalAvgPool | LayerKind::BatchNorm | LayerKind::Add => {}
    }
    m
}

struct Attrs<'a> {
    map: &'a Map<String, Value>,
    path: &'a str,
}

impl Attrs<'_> {
    fn err(&self, key: &str, msg: impl Into<String>) -> FormatError {
        FormatError::field(format!("{}.attrs.{key}", self.path), msg)
    }

    fn only(&self, allowed: &[&str]) -> Result<(), FormatError> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(self.err(k, "unknown attribute")),
            None => Ok(()),
        }
    }

    fn uint(&self, key: &str) -> Result<u64, FormatError> {
        self.map
            .get(key)
            .ok_or_else(|| self.err(key, "missing"))?
            .as_u64()
            .ok_or_else(|| self.err(key, "expected a non-negative integer"))
    }

    fn positive(&self, key: &str) -> Result<usize, FormatError> {
        match self.uint(key)? {
            0 => Err(self.err(key, "must be >= 1")),
            v => Ok(v as usize),
        }
    }

    fn flag(&self, key: &str, default: Option<bool>) -> Result<bool, FormatError> {
        match self.map.get(key) {
            None => default.ok_or_else(|| self.err(key, "missing")),
            Some(v) => v.as_bool().ok_or_else(|| self.err(key, "expected a boolean")),
        }
    }

    fn text(&self, key: &str) -> Result<&str, FormatError> {
        self.map
            .get(key)
            .ok_or_else(|| self.err(key, "missing"))?
            .as_str()
            .ok_or_else(|| self.err(key, "expected a string"))
    }

    fn kernel(&self) -> Result<Kernel, FormatError> {
        let v = self.uint("kernel")?;
        Kernel::from_size(v).ok_or_else(|| self.err("kernel", format!("unsupported size {v}")))
    }

    fn stride(&self) -> Result<Stride, FormatError> {
        let v = self.uint("stride")?;
        Stride::from_value(v).ok_or_else(|| self.err("stride", format!("unsupported stride {v}")))
    }

    fn padding(&self) -> Result<Padding, FormatError> {
        let v = self.text("padding")?;
        Padding::parse(v).ok_or_else(|| self.err("padding", format!("unknown padding '{v}'")))
    }
}

fn parse_kind(kind: &str, map: &Map<String, Value>, path: &str) -> Result<LayerKind, FormatError> {
    let a = Attrs { map, path };
    let parsed = match kind {
        "Input" | "GlobalAvgPool" | "BatchNorm" | "Add" => {
            a.only(&[])?;
            match kind {
                "Input" => LayerKind::Input,
                "GlobalAvgPool" => LayerKind::GlobalAvgPool,
                "BatchNorm" => LayerKind::BatchNorm,
                _ => LayerKind::Add,
            }
        }
        "Conv2D" => {
            a.only(&["filters", "kernel", "stride", "padding", "has_bias"])?;
            LayerKind::Conv2D {
                filters: a.positive("filters")?,
                kernel: a.kernel()?,
                stride: a.stride()?,
                padding: a.padding()?,
                has_bias: a.flag("has_bias", None)?,
            }
        }
        "SeparableConv2D" => {
            a.only(&["filters", "kernel", "stride", "padding", "depthwise_only"])?;
            LayerKind::SeparableConv2D {
                filters: a.positive("filters")?,
                kernel: a.kernel()?,
                stride: a.stride()?,
                padding: a.padding()?,
                depthwise_only: a.flag("depthwise_only", Some(false))?,
            }
        }
        "MaxPool" => {
            a.only(&["pool_size", "stride", "padding"])?;
            LayerKind::MaxPool {
                pool_size: a.positive("pool_size")?,
                stride: a.positive("stride")?,
                padding: a.padding()?,
            }
        }
        "Activation" => {
            a.only(&["function"])?;
            let f = a.text("function")?;
            LayerKind::Activation(
                ActivationFn::parse(f)
                    .ok_or_else(|| a.err("function", format!("unknown activation '{f}'")))?,
            )
        }
        "Dense" => {
            a.only(&["units", "has_bias"])?;
            LayerKind::Dense {
                units: a.positive("units")?,
                has_bias: a.flag("has_bias", None)?,
            }
        }
        other => {
            return Err(FormatError::field(
                format!("{path}.kind"),
                format!("unknown layer kind '{other}'"),
            ))
        }
    };
    Ok(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "schema_version": 1,
  "name": "small",
  "input_shape": [8, 8, 3],
  "num_classes": 2,
  "metadata": {},
  "nodes": [
    {"id": "in", "kind": "Input", "attrs": {}, "inputs": [], "tag": null},
    {"id": "c", "kind": "Conv2D", "attrs": {"filters": 4, "kernel": 3, "stride": 1, "padding": "same", "has_bias": false}, "inputs": ["in"], "tag": "stem"}
  ]
}"#;

    #[test]
    fn parses_and_round_trips_bytes() {
        let g = deserialize(SMALL).unwrap();
        assert_eq!(g.len(), 2);
        let text = serialize(&g).unwrap();
        let again = deserialize(&text).unwrap();
        assert_eq!(g, again);
        assert_eq!(text, serialize(&again).unwrap());
    }

    #[test]
    fn top_level_key_order() {
        let text = serialize(&deserialize(SMALL).unwrap()).unwrap();
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("schema_version") < pos("name"));
        assert!(pos("name") < pos("input_shape"));
        assert!(pos("input_shape") < pos("num_classes"));
        assert!(pos("num_classes") < pos("metadata"));
        assert!(pos("metadata") < pos("nodes"));
    }

    #[test]
    fn unknown_kind_is_a_parse_error() {
        let text = SMALL.replace("\"Conv2D\"", "\"LSTM\"");
        match deserialize(&text) {
            Err(FormatError::Field { field, .. }) => assert_eq!(field, "nodes[1].kind"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_attr_rejected() {
        let text = SMALL.replace("\"has_bias\": false", "\"has_bias\": false, \"dilation\": 2");
        match deserialize(&text) {
            Err(FormatError::Field { field, .. }) => assert_eq!(field, "nodes[1].attrs.dilation"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unsupported_kernel_rejected() {
        let text = SMALL.replace("\"kernel\": 3", "\"kernel\": 5");
        assert!(matches!(deserialize(&text), Err(FormatError::Field { .. })));
    }

    #[test]
    fn schema_version_checked() {
        let text = SMALL.replace("\"schema_version\": 1", "\"schema_version\": 999");
        assert!(matches!(
            deserialize(&text),
            Err(FormatError::SchemaVersionUnsupported(999))
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match deserialize("{\n  \"schema_version\": 1,\n  oops\n}") {
            Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
