//! The reduction directives the gateway knows how to execute.

use std::fmt;

use crate::schema::{FieldType, ScalarType, TypeRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DirectiveKind {
    Suppress,
    Generalize,
    Noise,
    Hash,
    /// Traverses the pipeline without changing the value; used to measure
    /// directive overhead.
    Noop,
}

impl DirectiveKind {
    pub const ALL: [DirectiveKind; 5] = [
        DirectiveKind::Suppress,
        DirectiveKind::Generalize,
        DirectiveKind::Noise,
        DirectiveKind::Hash,
        DirectiveKind::Noop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DirectiveKind::Suppress => "suppress",
            DirectiveKind::Generalize => "generalize",
            DirectiveKind::Noise => "noise",
            DirectiveKind::Hash => "hash",
            DirectiveKind::Noop => "noop",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether a field of type `ty` (with its object/scalar kind already
    /// resolved) may carry this directive. `Err` explains why not.
    pub fn check_placement(self, ty: &TypeRef, kind: FieldType) -> Result<(), String> {
        let scalar_leaf = match kind {
            FieldType::Scalar(s) if !ty.list => Some(s),
            _ => None,
        };
        let ok = |allowed: &[ScalarType]| match scalar_leaf {
            Some(s) if allowed.contains(&s) => Ok(()),
            _ => Err(format!(
                "@{} applies to {} fields, not `{ty}`",
                self.name(),
                allowed.iter().map(|s| s.name()).collect::<Vec<_>>().join("/")
            )),
        };
        match self {
            DirectiveKind::Suppress if ty.non_null => Err(format!(
                "@suppress on non-null field `{ty}`: null cannot inhabit a non-null type"
            )),
            DirectiveKind::Suppress | DirectiveKind::Noop => Ok(()),
            DirectiveKind::Generalize => ok(&[
                ScalarType::Int,
                ScalarType::Float,
                ScalarType::String,
                ScalarType::Date,
            ]),
            DirectiveKind::Noise => ok(&[ScalarType::Int, ScalarType::Float, ScalarType::Date]),
            DirectiveKind::Hash => ok(&[ScalarType::String, ScalarType::Id]),
        }
    }
}

impl fmt::Display for DirectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
