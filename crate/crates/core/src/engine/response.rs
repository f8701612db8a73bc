use std::sync::Arc;

use datamin_reduce::ScalarValue;
use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};

/// A resolved value: a scalar leaf, an object, or a list of either.
#[derive(Debug, Clone, PartialEq)]
pub enum ResponseNode {
    Leaf(ScalarValue),
    Object(ResponseObject),
    List(Vec<ResponseNode>),
}

/// Fields in selection order. `type_name` tells the pipeline which schema
/// type the object belongs to; it is not serialized.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseObject {
    pub type_name: Arc<str>,
    pub fields: Vec<(Arc<str>, ResponseNode)>,
}

impl ResponseObject {
    pub fn get(&self, field: &str) -> Option<&ResponseNode> {
        self.fields.iter().find(|(k, _)| &**k == field).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseDocument {
    pub data: ResponseObject,
    /// Field-level problems that did not abort the request.
    pub errors: Vec<String>,
}

impl ResponseDocument {
    /// `{"data": ...}` plus an `errors` array when any were recorded.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("response serialization is infallible")
    }

    /// Leaves in document order, paired with `Type.field`.
    pub fn leaves(&self) -> Vec<(String, &ScalarValue)> {
        fn walk<'a>(obj: &'a ResponseObject, out: &mut Vec<(String, &'a ScalarValue)>) {
            for (name, node) in &obj.fields {
                walk_node(&obj.type_name, name, node, out);
            }
        }
        fn walk_node<'a>(
            ty: &str,
            name: &str,
            node: &'a ResponseNode,
            out: &mut Vec<(String, &'a ScalarValue)>,
        ) {
            match node {
                ResponseNode::Leaf(v) => out.push((format!("{ty}.{name}"), v)),
                ResponseNode::Object(o) => walk(o, out),
                ResponseNode::List(items) => {
                    for item in items {
                        walk_node(ty, name, item, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.data, &mut out);
        out
    }

    /// Same tree with every leaf replaced by `()`: equal iff the shapes match.
    pub fn shape(&self) -> Shape {
        fn node(n: &ResponseNode) -> Shape {
            match n {
                ResponseNode::Leaf(_) => Shape::Leaf,
                ResponseNode::Object(o) => object(o),
                ResponseNode::List(items) => Shape::List(items.iter().map(node).collect()),
            }
        }
        fn object(o: &ResponseObject) -> Shape {
            Shape::Object(o.fields.iter().map(|(k, v)| (k.to_string(), node(v))).collect())
        }
        object(&self.data)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Leaf,
    Object(Vec<(String, Shape)>),
    List(Vec<Shape>),
}

struct Scalar<'a>(&'a ScalarValue);

impl Serialize for Scalar<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            ScalarValue::Null => s.serialize_unit(),
            ScalarValue::Bool(b) => s.serialize_bool(*b),
            ScalarValue::Int(i) => s.serialize_i64(*i),
            ScalarValue::Float(f) if f.is_finite() => s.serialize_f64(*f),
            ScalarValue::Float(_) => s.serialize_unit(),
            ScalarValue::Text(t) => s.serialize_str(t),
            ScalarValue::Date(d) => s.serialize_str(&d.to_rfc3339()),
        }
    }
}

impl Serialize for ResponseNode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ResponseNode::Leaf(v) => Scalar(v).serialize(s),
            ResponseNode::Object(o) => o.serialize(s),
            ResponseNode::List(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
        }
    }
}

impl Serialize for ResponseObject {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.fields.len()))?;
        for (k, v) in &self.fields {
            map.serialize_entry(&**k, v)?;
        }
        map.end()
    }
}

impl Serialize for ResponseDocument {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Message<'a>(&'a str);
        impl Serialize for Message<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("message", self.0)?;
                m.end()
            }
        }
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("data", &self.data)?;
        if !self.errors.is_empty() {
            let msgs: Vec<_> = self.errors.iter().map(|e| Message(e)).collect();
            map.serialize_entry("errors", &msgs)?;
        }
        map.end()
    }
}
