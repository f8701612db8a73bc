//! The supported SDL subset: object types with scalar, object and list
//! fields, and argument-free field directives.
//!
//! ```graphql
//! directive @noise on FIELD_DEFINITION
//!
//! type Symptom {
//!     pain: Float @noise
//! }
//! ```
//!
//! Directive parameters never appear in the schema; they are role-dependent
//! and live in the policy file.

mod parser;
mod printer;
mod validate;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::lexer::Pos;

pub use parser::parse_schema;
pub use printer::print_schema;
pub use validate::{validate_directive_placement, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarType {
    Int,
    Float,
    String,
    Id,
    Boolean,
    Date,
}

impl ScalarType {
    pub const ALL: [ScalarType; 6] = [
        ScalarType::Int,
        ScalarType::Float,
        ScalarType::String,
        ScalarType::Id,
        ScalarType::Boolean,
        ScalarType::Date,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScalarType::Int => "Int",
            ScalarType::Float => "Float",
            ScalarType::String => "String",
            ScalarType::Id => "ID",
            ScalarType::Boolean => "Boolean",
            ScalarType::Date => "Date",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// What a field's named type resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldType {
    Scalar(ScalarType),
    Object,
}

/// `Name`, `Name!`, `[Name]`, `[Name!]!` and so on. Nested lists are not
/// supported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    pub name: String,
    pub list: bool,
    /// Only meaningful when `list` is set.
    pub item_non_null: bool,
    pub non_null: bool,
}

impl TypeRef {
    pub fn named(name: impl Into<String>) -> Self {
        TypeRef {
            name: name.into(),
            list: false,
            item_non_null: false,
            non_null: false,
        }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.list {
            write!(f, "[{}{}]", self.name, if self.item_non_null { "!" } else { "" })?;
        } else {
            f.write_str(&self.name)?;
        }
        if self.non_null {
            f.write_str("!")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectiveUse {
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDef {
    pub name: String,
    pub ty: TypeRef,
    /// In source order; this is the pipeline order.
    pub directives: Vec<DirectiveUse>,
    pub pos: Pos,
}

impl FieldDef {
    pub fn directive_names(&self) -> impl Iterator<Item = &str> {
        self.directives.iter().map(|d| d.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectType {
    pub name: String,
    pub fields: IndexMap<String, FieldDef>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectiveDecl {
    pub name: String,
    pub locations: Vec<String>,
    pub pos: Pos,
}

impl DirectiveDecl {
    pub fn on_field_definition(&self) -> bool {
        self.locations.iter().any(|l| l == "FIELD_DEFINITION")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub types: IndexMap<String, ObjectType>,
    pub directives: IndexMap<String, DirectiveDecl>,
    /// Custom scalars declared with `scalar X`; only `Date` is accepted.
    pub declared_scalars: Vec<String>,
    pub query_root: String,
}

impl Schema {
    pub fn object(&self, name: &str) -> Option<&ObjectType> {
        self.types.get(name)
    }

    pub fn query_type(&self) -> &ObjectType {
        &self.types[&self.query_root]
    }

    pub fn field(&self, type_name: &str, field: &str) -> Option<&FieldDef> {
        self.types.get(type_name)?.fields.get(field)
    }

    /// Resolves a type reference's named type. `None` for unknown names,
    /// which a parsed schema never contains.
    pub fn field_type(&self, ty: &TypeRef) -> Option<FieldType> {
        if let Some(s) = ScalarType::from_name(&ty.name) {
            Some(FieldType::Scalar(s))
        } else if self.types.contains_key(&ty.name) {
            Some(FieldType::Object)
        } else {
            None
        }
    }

    /// Every `(type, field)` that carries at least one directive.
    pub fn annotated_fields(&self) -> impl Iterator<Item = (&ObjectType, &FieldDef)> {
        self.types
            .values()
            .flat_map(|t| t.fields.values().map(move |f| (t, f)))
            .filter(|(_, f)| !f.directives.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaErrorKind {
    Syntax,
    Empty,
    DuplicateType,
    DuplicateField,
    DuplicateDirective,
    UndeclaredDirective,
    DirectiveLocation,
    UnknownType,
    MissingQueryRoot,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct SchemaError {
    pub kind: SchemaErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl SchemaError {
    pub(crate) fn new(kind: SchemaErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        SchemaError {
            kind,
            pos,
            message: message.into(),
        }
    }
}

impl From<crate::error::SyntaxError> for SchemaError {
    fn from(e: crate::error::SyntaxError) -> Self {
        SchemaError::new(SchemaErrorKind::Syntax, e.pos, e.message)
    }
}
