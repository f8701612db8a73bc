use std::collections::HashMap;
use std::sync::Arc;

use datamin_reduce::{generalize, hash_value, noise, RandomSource, ScalarValue};

use super::response::{ResponseDocument, ResponseNode, ResponseObject};
use super::ExecutionError;
use crate::directive::DirectiveKind;
use crate::policy::{DirectiveParams, Policy, Role, Verdict};
use crate::schema::Schema;

#[derive(Debug, Clone)]
struct FieldPlan {
    steps: Vec<Verdict>,
    non_null: bool,
}

/// Verdicts for every annotated field under one role, in declaration order.
#[derive(Debug, Clone, Default)]
pub struct RolePlan {
    types: HashMap<String, HashMap<String, FieldPlan>>,
}

impl RolePlan {
    pub fn compile(schema: &Schema, policy: &Policy, role: &Role) -> Self {
        let mut types: HashMap<String, HashMap<String, FieldPlan>> = HashMap::new();
        for (obj, field) in schema.annotated_fields() {
            let steps = field
                .directive_names()
                .filter_map(DirectiveKind::from_name)
                .map(|kind| policy.resolve_verdict(role, &obj.name, &field.name, kind).clone())
                .collect();
            types.entry(obj.name.clone()).or_default().insert(
                field.name.clone(),
                FieldPlan {
                    steps,
                    non_null: field.ty.non_null,
                },
            );
        }
        RolePlan { types }
    }
}

/// Runs one value through a field's verdicts.
pub fn run_steps(
    value: ScalarValue,
    steps: &[Verdict],
    rng: &mut RandomSource,
) -> Result<ScalarValue, datamin_reduce::ReduceError> {
    let mut v = value;
    for step in steps {
        v = match step {
            Verdict::Pass => v,
            Verdict::Suppress => return Ok(datamin_reduce::suppress(&v)),
            Verdict::Apply(DirectiveParams::Generalize(p)) => generalize(&v, p)?,
            Verdict::Apply(DirectiveParams::Noise(p)) => noise(&v, p, rng)?,
            Verdict::Apply(DirectiveParams::Hash(p)) => hash_value(&v, p)?,
            Verdict::Apply(DirectiveParams::Noop) => v,
        };
    }
    Ok(v)
}

/// Transforms every annotated leaf of `raw` under `role`. Leaves are visited
/// depth-first in document order, which fixes how noise draws map to leaves.
pub fn apply_pipeline(
    raw: ResponseDocument,
    schema: &Schema,
    policy: &Policy,
    role: &Role,
    rng: &mut RandomSource,
) -> Result<ResponseDocument, ExecutionError> {
    apply_plan(raw, &RolePlan::compile(schema, policy, role), rng)
}

pub fn apply_plan(
    mut doc: ResponseDocument,
    plan: &RolePlan,
    rng: &mut RandomSource,
) -> Result<ResponseDocument, ExecutionError> {
    let mut walker = Walker {
        plan,
        rng,
        errors: &mut doc.errors,
    };
    walker.object(&mut doc.data)?;
    Ok(doc)
}

struct Walker<'a> {
    plan: &'a RolePlan,
    rng: &'a mut RandomSource,
    errors: &'a mut Vec<String>,
}

type Layout<'p> = (Arc<str>, Vec<Arc<str>>, Vec<Option<&'p FieldPlan>>);

impl<'p> Walker<'p> {
    fn plans(&self, obj: &ResponseObject) -> Vec<Option<&'p FieldPlan>> {
        let plan: &'p RolePlan = self.plan;
        let fields = plan.types.get(&*obj.type_name);
        obj.fields
            .iter()
            .map(|(name, _)| fields.and_then(|f| f.get(&**name)))
            .collect()
    }

    fn object(&mut self, obj: &mut ResponseObject) -> Result<(), ExecutionError> {
        let plans = self.plans(obj);
        self.object_with(obj, &plans)
    }

    fn object_with(
        &mut self,
        obj: &mut ResponseObject,
        plans: &[Option<&FieldPlan>],
    ) -> Result<(), ExecutionError> {
        for ((name, node), field) in obj.fields.iter_mut().zip(plans) {
            self.node(&obj.type_name, name, *field, node)?;
        }
        Ok(())
    }

    fn node(
        &mut self,
        ty: &str,
        name: &str,
        field: Option<&FieldPlan>,
        node: &mut ResponseNode,
    ) -> Result<(), ExecutionError> {
        match node {
            ResponseNode::Object(o) => self.object(o),
            ResponseNode::List(items) => {
                // Objects of one list share a selection, so their plans are
                // looked up once.
                let mut layout: Option<Layout<'p>> = None;
                for item in items {
                    match item {
                        ResponseNode::Object(o) => {
                            let reuse = layout
                                .as_ref()
                                .is_some_and(|(t, names, _)| same_layout(o, t, names));
                            if !reuse {
                                let names = o.fields.iter().map(|(k, _)| k.clone()).collect();
                                layout = Some((o.type_name.clone(), names, self.plans(o)));
                            }
                            let plans = &layout.as_ref().expect("layout just set").2;
                            self.object_with(o, plans)?;
                        }
                        other => self.node(ty, name, field, other)?,
                    }
                }
                Ok(())
            }
            ResponseNode::Leaf(v) => {
                let Some(field) = field else {
                    return Ok(());
                };
                let was_null = v.is_null();
                let out = run_steps(std::mem::replace(v, ScalarValue::Null), &field.steps, self.rng)
                    .map_err(|e| ExecutionError::new(ty, name, e.to_string()))?;
                if field.non_null && out.is_null() && !was_null {
                    let msg = format!("{ty}.{name}: value withheld from non-null field");
                    if !self.errors.contains(&msg) {
                        self.errors.push(msg);
                    }
                }
                *v = out;
                Ok(())
            }
        }
    }
}

fn same_layout(obj: &ResponseObject, ty: &Arc<str>, names: &[Arc<str>]) -> bool {
    (Arc::ptr_eq(&obj.type_name, ty) || obj.type_name == *ty)
        && obj.fields.len() == names.len()
        && obj
            .fields
            .iter()
            .zip(names)
            .all(|((k, _), n)| Arc::ptr_eq(k, n) || k == n)
}
