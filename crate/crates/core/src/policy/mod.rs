//! Role-dependent directive parameters and requester authentication.
//!
//! A [`Policy`] maps `(role, Type.field, directive)` to a [`Verdict`]. Lookups
//! that match no entry fall back to the policy's default verdict, which is
//! `suppress` unless the file says otherwise.

mod auth;
mod parse;

use std::collections::HashMap;
use std::fmt;

use datamin_reduce::{GeneralizationParams, HashParams, NoiseParams};
use thiserror::Error;

use crate::directive::DirectiveKind;
use crate::schema::{FieldType, ScalarType, Schema};

pub use auth::{bearer_token, extract_role, mint_token, AuthConfig, AuthError, MIN_SECRET_LEN};
pub use parse::{load_policy, load_policy_with};

/// An authenticated requester class. Case-sensitive, no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role(String);

impl Role {
    pub fn new(name: impl Into<String>) -> Result<Self, String> {
        let name = name.into();
        if name.is_empty() {
            Err("role name is empty".into())
        } else if name.chars().any(char::is_whitespace) {
            Err(format!("role name {name:?} contains whitespace"))
        } else {
            Ok(Role(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Validated parameters for one directive application.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectiveParams {
    Generalize(GeneralizationParams),
    Noise(NoiseParams),
    Hash(HashParams),
    Noop,
}

impl DirectiveParams {
    pub fn kind(&self) -> DirectiveKind {
        match self {
            DirectiveParams::Generalize(_) => DirectiveKind::Generalize,
            DirectiveParams::Noise(_) => DirectiveKind::Noise,
            DirectiveParams::Hash(_) => DirectiveKind::Hash,
            DirectiveParams::Noop => DirectiveKind::Noop,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Deliver the value unmodified.
    Pass,
    /// Replace the value with null and stop the field's pipeline.
    Suppress,
    Apply(DirectiveParams),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct EntryKey {
    type_name: String,
    field: String,
    directive: DirectiveKind,
}

#[derive(Debug, Clone)]
struct Entry {
    verdict: Verdict,
    line: usize,
}

#[derive(Debug, Clone)]
pub struct Policy {
    roles: HashMap<Role, HashMap<EntryKey, Entry>>,
    default_verdict: Verdict,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            roles: HashMap::new(),
            default_verdict: Verdict::Suppress,
        }
    }
}

impl Policy {
    /// An entry-free policy that answers every lookup with `verdict`.
    pub fn with_default(verdict: Verdict) -> Self {
        Policy {
            roles: HashMap::new(),
            default_verdict: verdict,
        }
    }

    pub fn default_verdict(&self) -> &Verdict {
        &self.default_verdict
    }

    pub fn roles(&self) -> impl Iterator<Item = &Role> {
        self.roles.keys()
    }

    pub fn entry_count(&self) -> usize {
        self.roles.values().map(HashMap::len).sum()
    }

    /// Exact-match lookup with fall-through to the default verdict.
    pub fn resolve_verdict(
        &self,
        role: &Role,
        type_name: &str,
        field: &str,
        directive: DirectiveKind,
    ) -> &Verdict {
        let key = EntryKey {
            type_name: type_name.to_owned(),
            field: field.to_owned(),
            directive,
        };
        self.roles
            .get(role)
            .and_then(|entries| entries.get(&key))
            .map_or(&self.default_verdict, |e| &e.verdict)
    }

    /// Cross-checks every entry against the schema: the field must exist,
    /// carry the directive, and the parameters must fit the field's type.
    pub fn validate_against(&self, schema: &Schema) -> Vec<PolicyDiagnostic> {
        let mut out = Vec::new();
        let mut entries: Vec<_> = self
            .roles
            .iter()
            .flat_map(|(role, es)| es.iter().map(move |(k, e)| (role, k, e)))
            .collect();
        entries.sort_by_key(|(_, _, e)| e.line);
        for (role, key, entry) in entries {
            let qualified = format!("{}.{}", key.type_name, key.field);
            let mut report = |message: String| {
                out.push(PolicyDiagnostic {
                    line: entry.line,
                    message: format!("[{role}] {qualified} {}: {message}", key.directive),
                })
            };
            let Some(field) = schema.field(&key.type_name, &key.field) else {
                report("no such field in the schema".into());
                continue;
            };
            if !field.directive_names().any(|d| d == key.directive.name()) {
                report(format!("field does not carry @{}", key.directive));
                continue;
            }
            let Some(FieldType::Scalar(scalar)) = schema.field_type(&field.ty) else {
                continue;
            };
            if let Verdict::Apply(params) = &entry.verdict {
                if let Err(msg) = params_fit(params, scalar) {
                    report(msg);
                }
            }
        }
        out
    }
}

fn params_fit(params: &DirectiveParams, scalar: ScalarType) -> Result<(), String> {
    use GeneralizationParams as G;
    match (params, scalar) {
        (DirectiveParams::Generalize(G::Numeric { step }), ScalarType::Int) if step.fract() != 0.0 => {
            Err(format!("Int fields need an integral step, got {step}"))
        }
        (DirectiveParams::Generalize(G::Numeric { .. }), ScalarType::Int | ScalarType::Float)
        | (DirectiveParams::Generalize(G::Date { .. }), ScalarType::Date)
        | (DirectiveParams::Generalize(G::Text { .. }), ScalarType::String) => Ok(()),
        (DirectiveParams::Generalize(g), s) => Err(format!(
            "`{}` parameters do not apply to {} fields",
            match g {
                G::Numeric { .. } => "step",
                G::Date { .. } => "unit",
                G::Text { .. } => "visible",
            },
            s.name()
        )),
        _ => Ok(()),
    }
}

/// A policy/schema mismatch, with the policy-file line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyDiagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for PolicyDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyErrorKind {
    Syntax,
    UnknownDirective,
    InvalidParams,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct PolicyError {
    pub kind: PolicyErrorKind,
    pub line: usize,
    pub message: String,
}
