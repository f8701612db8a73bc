//! Deterministic in-memory record store.
//!
//! Tables hold records in insertion order. Relations are directed link
//! lists from a record to records of another table, keyed by the field that
//! exposes them, which covers 1:1, 1:n and n:m shapes. Root bindings map a
//! query-root field to the table it lists.
//!
//! The load format is JSON lines, one document per line:
//!
//! ```text
//! {"kind":"table","name":"User"}
//! {"kind":"record","table":"User","fields":{"id":"u0","name":"Ada","birthDate":{"$date":"1990-01-01T00:00:00Z"}}}
//! {"kind":"relation","from":"User","field":"cycles","to":"Cycle"}
//! {"kind":"link","from":"User","field":"cycles","source":"u0","target":"c0"}
//! {"kind":"root","field":"users","table":"User"}
//! ```
//!
//! Records are addressed by their `id` field in links.

use std::collections::HashMap;

use datamin_reduce::{ScalarValue, Timestamp};
use indexmap::IndexMap;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::schema::{FieldType, Schema};

pub type Record = IndexMap<String, ScalarValue>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoreError {
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown relation `{0}.{1}`")]
    UnknownRelation(String, String),
    #[error("record index {index} out of range for `{table}`")]
    BadIndex { table: String, index: usize },
    #[error("line {line}: {message}")]
    Load { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
struct Relation {
    target: String,
    links: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DataSource {
    tables: IndexMap<String, Vec<Record>>,
    relations: IndexMap<(String, String), Relation>,
    roots: IndexMap<String, String>,
}

impl DataSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_table(&mut self, name: impl Into<String>) {
        self.tables.entry(name.into()).or_default();
    }

    /// Appends a record and returns its index.
    pub fn insert(&mut self, table: &str, record: Record) -> Result<usize, StoreError> {
        let rows = self
            .tables
            .get_mut(table)
            .ok_or_else(|| StoreError::UnknownTable(table.into()))?;
        rows.push(record);
        let n = rows.len();
        for ((from, _), rel) in self.relations.iter_mut() {
            if from == table {
                rel.links.resize(n, Vec::new());
            }
        }
        Ok(n - 1)
    }

    pub fn add_relation(&mut self, from: &str, field: &str, to: &str) -> Result<(), StoreError> {
        let n = self.table(from)?.len();
        self.table(to)?;
        self.relations
            .entry((from.into(), field.into()))
            .or_insert_with(|| Relation {
                target: to.into(),
                links: vec![Vec::new(); n],
            });
        Ok(())
    }

    pub fn link(&mut self, from: &str, field: &str, source: usize, target: usize) -> Result<(), StoreError> {
        let from_len = self.table(from)?.len();
        let rel = self
            .relations
            .get(&(from.to_string(), field.to_string()))
            .ok_or_else(|| StoreError::UnknownRelation(from.into(), field.into()))?;
        let target_len = self.table(&rel.target)?.len();
        if source >= from_len {
            return Err(StoreError::BadIndex {
                table: from.into(),
                index: source,
            });
        }
        if target >= target_len {
            return Err(StoreError::BadIndex {
                table: rel.target.clone(),
                index: target,
            });
        }
        let rel = self
            .relations
            .get_mut(&(from.to_string(), field.to_string()))
            .expect("checked");
        rel.links[source].push(target);
        Ok(())
    }

    pub fn bind_root(&mut self, field: &str, table: &str) -> Result<(), StoreError> {
        self.table(table)?;
        self.roots.insert(field.into(), table.into());
        Ok(())
    }

    pub fn table(&self, name: &str) -> Result<&[Record], StoreError> {
        self.tables
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| StoreError::UnknownTable(name.into()))
    }

    pub fn table_mut(&mut self, name: &str) -> Result<&mut [Record], StoreError> {
        self.tables
            .get_mut(name)
            .map(Vec::as_mut_slice)
            .ok_or_else(|| StoreError::UnknownTable(name.into()))
    }

    pub fn table_names(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn root_table(&self, field: &str) -> Option<&str> {
        self.roots.get(field).map(String::as_str)
    }

    /// Target table and linked record indices for `from[source].field`.
    pub fn related(&self, from: &str, field: &str, source: usize) -> Option<(&str, &[usize])> {
        self.relations
            .iter()
            .find(|((t, f), _)| t == from && f == field)
            .map(|(_, rel)| {
                (
                    rel.target.as_str(),
                    rel.links.get(source).map_or(&[][..], Vec::as_slice),
                )
            })
    }

    /// Checks that every object-typed field reachable from the query root
    /// has a relation (or root binding) to follow. Returns the problems found.
    pub fn check_bindings(&self, schema: &Schema) -> Vec<String> {
        let mut problems = Vec::new();
        let mut seen: HashMap<(String, String), ()> = HashMap::new();
        let mut stack: Vec<(String, String)> = Vec::new();
        for (name, field) in &schema.query_type().fields {
            match (schema.field_type(&field.ty), self.root_table(name)) {
                (Some(FieldType::Object), Some(table)) => stack.push((field.ty.name.clone(), table.into())),
                (Some(FieldType::Object), None) => {
                    problems.push(format!("root field `{name}` is not bound to a table"))
                }
                _ => problems.push(format!(
                    "root field `{name}` must be an object or list of objects"
                )),
            }
        }
        while let Some((ty, table)) = stack.pop() {
            if seen.insert((ty.clone(), table.clone()), ()).is_some() {
                continue;
            }
            for (name, field) in &schema.types[&ty].fields {
                if schema.field_type(&field.ty) != Some(FieldType::Object) {
                    continue;
                }
                match self.relations.get(&(table.clone(), name.clone())) {
                    Some(rel) => stack.push((field.ty.name.clone(), rel.target.clone())),
                    None => problems.push(format!("`{ty}.{name}` has no relation from table `{table}`")),
                }
            }
        }
        problems
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |v: Value| {
            out.push_str(&v.to_string());
            out.push('\n');
        };
        for name in self.tables.keys() {
            push(json!({"kind": "table", "name": name}));
        }
        for (name, rows) in &self.tables {
            for r in rows {
                let fields: Map<String, Value> =
                    r.iter().map(|(k, v)| (k.clone(), scalar_to_json(v))).collect();
                push(json!({"kind": "record", "table": name, "fields": fields}));
            }
        }
        for ((from, field), rel) in &self.relations {
            push(json!({"kind": "relation", "from": from, "field": field, "to": rel.target}));
        }
        for ((from, field), rel) in &self.relations {
            let src = &self.tables[from];
            let dst = &self.tables[&rel.target];
            for (i, targets) in rel.links.iter().enumerate() {
                for &t in targets {
                    push(json!({
                        "kind": "link", "from": from, "field": field,
                        "source": record_id(&src[i]), "target": record_id(&dst[t]),
                    }));
                }
            }
        }
        for (field, table) in &self.roots {
            push(json!({"kind": "root", "field": field, "table": table}));
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, StoreError> {
        let mut ds = DataSource::new();
        let mut ids: HashMap<(String, String), usize> = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let fail = |message: String| StoreError::Load {
                line: lineno,
                message,
            };
            let at = |e: StoreError| fail(e.to_string());
            if line.trim().is_empty() {
                continue;
            }
            let doc: Value = serde_json::from_str(line).map_err(|e| fail(e.to_string()))?;
            let s = |key: &str| {
                doc.get(key)
                    .and_then(Value::as_str)
                    .ok_or_else(|| fail(format!("missing string `{key}`")))
            };
            match s("kind")? {
                "table" => ds.add_table(s("name")?),
                "record" => {
                    let table = s("table")?;
                    let fields = doc
                        .get("fields")
                        .and_then(Value::as_object)
                        .ok_or_else(|| fail("missing object `fields`".into()))?;
                    let mut record = Record::new();
                    for (k, v) in fields {
                        record.insert(k.clone(), scalar_from_json(v).map_err(fail)?);
                    }
                    let id = match record.get("id") {
                        Some(ScalarValue::Text(id)) => id.clone(),
                        _ => return Err(fail("record needs a string `id`".into())),
                    };
                    let index = ds.insert(table, record).map_err(at)?;
                    if ids.insert((table.into(), id.clone()), index).is_some() {
                        return Err(fail(format!("duplicate id {id:?} in `{table}`")));
                    }
                }
                "relation" => ds.add_relation(s("from")?, s("field")?, s("to")?).map_err(at)?,
                "link" => {
                    let (from, field) = (s("from")?, s("field")?);
                    let target_table = ds
                        .relations
                        .get(&(from.to_string(), field.to_string()))
                        .map(|r| r.target.clone())
                        .ok_or_else(|| fail(format!("unknown relation `{from}.{field}`")))?;
                    let lookup = |table: &str, id: &str| {
                        ids.get(&(table.to_string(), id.to_string()))
                            .copied()
                            .ok_or_else(|| fail(format!("no record {id:?} in `{table}`")))
                    };
                    let source = lookup(from, s("source")?)?;
                    let target = lookup(&target_table, s("target")?)?;
                    ds.link(from, field, source, target).map_err(at)?;
                }
                "root" => ds.bind_root(s("field")?, s("table")?).map_err(at)?,
                other => return Err(fail(format!("unknown kind {other:?}"))),
            }
        }
        Ok(ds)
    }
}

fn record_id(r: &Record) -> Value {
    r.get("id").map_or(Value::Null, scalar_to_json)
}

fn scalar_to_json(v: &ScalarValue) -> Value {
    match v {
        ScalarValue::Null => Value::Null,
        ScalarValue::Bool(b) => json!(b),
        ScalarValue::Int(i) => json!(i),
        ScalarValue::Float(f) => json!(f),
        ScalarValue::Text(s) => json!(s),
        ScalarValue::Date(d) => json!({"$date": d.to_rfc3339()}),
    }
}

fn scalar_from_json(v: &Value) -> Result<ScalarValue, String> {
    Ok(match v {
        Value::Null => ScalarValue::Null,
        Value::Bool(b) => ScalarValue::Bool(*b),
        Value::Number(n) => match n.as_i64() {
            Some(i) if !n.is_f64() => ScalarValue::Int(i),
            _ => ScalarValue::Float(n.as_f64().ok_or("number out of range")?),
        },
        Value::String(s) => ScalarValue::Text(s.clone()),
        Value::Object(o) => match o.get("$date").and_then(Value::as_str) {
            Some(d) if o.len() == 1 => ScalarValue::Date(d.parse::<Timestamp>().map_err(|e| e.to_string())?),
            _ => return Err("objects must be {\"$date\": \"...\"}".into()),
        },
        Value::Array(_) => return Err("arrays are not scalar values".into()),
    })
}
