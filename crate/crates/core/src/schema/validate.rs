use std::fmt;

use super::Schema;
use crate::directive::DirectiveKind;
use crate::lexer::Pos;

/// A placement problem found by [`validate_directive_placement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub type_name: String,
    pub field: String,
    pub directive: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}.{}: {}",
            self.pos.line, self.pos.column, self.type_name, self.field, self.message
        )
    }
}

/// Checks every directive attachment for type compatibility. An empty result
/// means every pipeline can execute.
pub fn validate_directive_placement(schema: &Schema) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (ty, field) in schema.annotated_fields() {
        let kind = schema
            .field_type(&field.ty)
            .expect("parsed schemas only reference known types");
        for d in &field.directives {
            let problem = match DirectiveKind::from_name(&d.name) {
                None => Some(format!("no transform is registered for `@{}`", d.name)),
                Some(k) => k.check_placement(&field.ty, kind).err(),
            };
            if let Some(message) = problem {
                out.push(Diagnostic {
                    pos: d.pos,
                    type_name: ty.name.clone(),
                    field: field.name.clone(),
                    directive: d.name.clone(),
                    message,
                });
            }
        }
    }
    out
}
