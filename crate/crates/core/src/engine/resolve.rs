use std::sync::Arc;

use datamin_reduce::ScalarValue;

use super::response::{ResponseDocument, ResponseNode, ResponseObject};
use super::ExecutionError;
use crate::query::{Query, Selection};
use crate::schema::{FieldType, Schema};
use crate::store::DataSource;

/// Fetches the raw, unreduced response. Lists keep the store's insertion
/// order and are cut to `first`.
pub fn resolve(
    query: &Query,
    schema: &Schema,
    source: &DataSource,
) -> Result<ResponseDocument, ExecutionError> {
    let mut errors = Vec::new();
    let root: Arc<str> = query.root_type.as_str().into();
    let mut fields = Vec::with_capacity(query.selections.len());
    for sel in &query.selections {
        let def = schema
            .field(&query.root_type, &sel.name)
            .ok_or_else(|| ExecutionError::new(&query.root_type, &sel.name, "field not in schema"))?;
        let table = source.root_table(&sel.name).ok_or_else(|| {
            ExecutionError::new(&query.root_type, &sel.name, "root field is not bound to a table")
        })?;
        let rows = source
            .table(table)
            .map_err(|e| ExecutionError::new(&query.root_type, &sel.name, e.to_string()))?;
        let indices: Vec<usize> = (0..rows.len()).collect();
        let r = Resolver { schema, source };
        let node = r.objects(
            def.ty.list,
            def.ty.non_null,
            &def.ty.name,
            table,
            &indices,
            sel,
            &mut errors,
        )?;
        fields.push((Arc::from(sel.name.as_str()), node));
    }
    Ok(ResponseDocument {
        data: ResponseObject {
            type_name: root,
            fields,
        },
        errors,
    })
}

struct Resolver<'a> {
    schema: &'a Schema,
    source: &'a DataSource,
}

struct Sub<'s> {
    name: Arc<str>,
    sel: &'s Selection,
    ty: &'s crate::schema::TypeRef,
    object: bool,
}

impl Resolver<'_> {
    #[allow(clippy::too_many_arguments)]
    fn objects(
        &self,
        list: bool,
        non_null: bool,
        type_name: &str,
        table: &str,
        indices: &[usize],
        sel: &Selection,
        errors: &mut Vec<String>,
    ) -> Result<ResponseNode, ExecutionError> {
        if list {
            let n = sel.first.map_or(indices.len(), |f| f.min(indices.len()));
            let ty: Arc<str> = type_name.into();
            let subs = self.subs(type_name, sel)?;
            let items = indices[..n]
                .iter()
                .map(|&i| {
                    self.object(&ty, table, i, &subs, errors)
                        .map(ResponseNode::Object)
                })
                .collect::<Result<_, _>>()?;
            Ok(ResponseNode::List(items))
        } else if let Some(&i) = indices.first() {
            let subs = self.subs(type_name, sel)?;
            Ok(ResponseNode::Object(self.object(
                &type_name.into(),
                table,
                i,
                &subs,
                errors,
            )?))
        } else {
            if non_null {
                errors.push(format!("{}: no related record for non-null field", sel.name));
            }
            Ok(ResponseNode::Leaf(ScalarValue::Null))
        }
    }

    fn subs<'s>(&'s self, type_name: &str, sel: &'s Selection) -> Result<Vec<Sub<'s>>, ExecutionError> {
        sel.children
            .iter()
            .map(|c| {
                let def = self
                    .schema
                    .field(type_name, &c.name)
                    .ok_or_else(|| ExecutionError::new(type_name, &c.name, "field not in schema"))?;
                Ok(Sub {
                    name: c.name.as_str().into(),
                    sel: c,
                    ty: &def.ty,
                    object: self.schema.field_type(&def.ty) == Some(FieldType::Object),
                })
            })
            .collect()
    }

    fn object(
        &self,
        ty: &Arc<str>,
        table: &str,
        index: usize,
        subs: &[Sub<'_>],
        errors: &mut Vec<String>,
    ) -> Result<ResponseObject, ExecutionError> {
        let record = self
            .source
            .table(table)
            .ok()
            .and_then(|rows| rows.get(index))
            .ok_or_else(|| ExecutionError::new(ty, "", format!("dangling reference into `{table}`")))?;
        let mut fields = Vec::with_capacity(subs.len());
        for sub in subs {
            let node = if sub.object {
                let (target, links) = self
                    .source
                    .related(table, sub.sel.name.as_str(), index)
                    .ok_or_else(|| ExecutionError::new(ty, &sub.name, "no relation in the data source"))?;
                self.objects(
                    sub.ty.list,
                    sub.ty.non_null,
                    &sub.ty.name,
                    target,
                    links,
                    sub.sel,
                    errors,
                )?
            } else {
                ResponseNode::Leaf(record.get(&*sub.name).cloned().unwrap_or(ScalarValue::Null))
            };
            fields.push((sub.name.clone(), node));
        }
        Ok(ResponseObject {
            type_name: ty.clone(),
            fields,
        })
    }
}
