//! Query execution: parse, resolve against the store, then run every
//! annotated leaf through its directive pipeline under the requester's role.

mod pipeline;
mod resolve;
mod response;

use std::collections::HashMap;

use datamin_reduce::RandomSource;
use thiserror::Error;

use crate::policy::{Policy, Role};
use crate::query::{parse_query, QueryError};
use crate::schema::Schema;
use crate::store::DataSource;

pub use pipeline::{apply_pipeline, apply_plan, run_steps, RolePlan};
pub use resolve::resolve;
pub use response::{ResponseDocument, ResponseNode, ResponseObject, Shape};

/// A failure while producing the response of a valid query. After schema
/// and policy validation these indicate a bug or an inconsistent store.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{type_name}.{field}: {message}")]
pub struct ExecutionError {
    pub type_name: String,
    pub field: String,
    pub message: String,
}

impl ExecutionError {
    pub(crate) fn new(type_name: &str, field: &str, message: impl Into<String>) -> Self {
        ExecutionError {
            type_name: type_name.into(),
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("query error: {0}")]
    Query(#[from] QueryError),
    #[error("execution error: {0}")]
    Execution(#[from] ExecutionError),
}

/// `parse_query`, `resolve` and `apply_pipeline` in sequence.
pub fn execute(
    query_text: &str,
    schema: &Schema,
    source: &DataSource,
    policy: &Policy,
    role: &Role,
    rng: &mut RandomSource,
) -> Result<ResponseDocument, EngineError> {
    let query = parse_query(query_text, schema)?;
    let raw = resolve(&query, schema, source)?;
    Ok(apply_pipeline(raw, schema, policy, role, rng)?)
}

/// Schema, policy and store bundled with a precompiled plan per policy
/// role. Immutable, so it can be shared across request handlers.
#[derive(Debug)]
pub struct Engine {
    schema: Schema,
    policy: Policy,
    source: DataSource,
    plans: HashMap<Role, RolePlan>,
    unlisted: RolePlan,
}

impl Engine {
    pub fn new(schema: Schema, policy: Policy, source: DataSource) -> Self {
        let plans = policy
            .roles()
            .map(|r| (r.clone(), RolePlan::compile(&schema, &policy, r)))
            .collect();
        // Any role the policy does not list resolves every lookup to the
        // default verdict, so one plan covers all of them.
        let unlisted = RolePlan::compile(
            &schema,
            &Policy::with_default(policy.default_verdict().clone()),
            &placeholder(),
        );
        Engine {
            schema,
            policy,
            source,
            plans,
            unlisted,
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn source(&self) -> &DataSource {
        &self.source
    }

    pub fn plan(&self, role: &Role) -> &RolePlan {
        self.plans.get(role).unwrap_or(&self.unlisted)
    }

    pub fn execute(
        &self,
        query_text: &str,
        role: &Role,
        rng: &mut RandomSource,
    ) -> Result<ResponseDocument, EngineError> {
        let query = parse_query(query_text, &self.schema)?;
        let raw = resolve(&query, &self.schema, &self.source)?;
        Ok(apply_plan(raw, self.plan(role), rng)?)
    }
}

fn placeholder() -> Role {
    Role::new("unlisted").expect("valid role name")
}
