//! Schema, policy, query execution and the directive pipeline of a
//! role-aware, data-minimizing GraphQL-style gateway.
//!
//! ```
//! use datamin_core::{execute, load_policy, parse_schema, DataSource, Role};
//! use datamin_reduce::RandomSource;
//!
//! let schema = parse_schema(
//!     "directive @noise on FIELD_DEFINITION
//!      type Query { symptoms: [Symptom!]! }
//!      type Symptom { pain: Float @noise }",
//! )
//! .unwrap();
//! let policy = load_policy(
//!     "[role researcher]\nSymptom.pain noise apply distribution=uniform low=1 high=1",
//! )
//! .unwrap();
//! let mut store = DataSource::new();
//! store.add_table("Symptom");
//! store.insert("Symptom", [("pain".to_string(), 7.0.into())].into_iter().collect()).unwrap();
//! store.bind_root("symptoms", "Symptom").unwrap();
//!
//! let role = Role::new("researcher").unwrap();
//! let doc = execute("{ symptoms { pain } }", &schema, &store, &policy, &role, &mut RandomSource::from_seed(0)).unwrap();
//! assert_eq!(doc.to_json(), r#"{"data":{"symptoms":[{"pain":8.0}]}}"#);
//! ```

pub mod dataset;
pub mod directive;
pub mod engine;
mod error;
mod lexer;
pub mod policy;
pub mod query;
pub mod schema;
pub mod store;

pub use dataset::generate_dataset;
pub use directive::DirectiveKind;
pub use engine::{
    apply_pipeline, execute, resolve, Engine, EngineError, ExecutionError, ResponseDocument, ResponseNode,
    ResponseObject,
};
pub use error::SyntaxError;
pub use lexer::Pos;
pub use policy::{
    bearer_token, extract_role, load_policy, mint_token, AuthConfig, AuthError, DirectiveParams, Policy,
    PolicyError, Role, Verdict,
};
pub use query::{parse_query, Query, QueryError, Selection};
pub use schema::{parse_schema, print_schema, validate_directive_placement, Diagnostic, Schema, SchemaError};
pub use store::{DataSource, Record, StoreError};
