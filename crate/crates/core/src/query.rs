//! Query documents: a single anonymous or named `query` operation made of
//! nested field selections, with an optional `first: Int` argument on list
//! fields. Aliases, fragments, variables and directives are rejected.

use thiserror::Error;

use crate::lexer::{Pos, Token, Tokens};
use crate::schema::{FieldType, ObjectType, Schema};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub name: String,
    /// Truncation for list fields.
    pub first: Option<usize>,
    /// Empty for scalar fields, non-empty for object fields.
    pub children: Vec<Selection>,
    pub pos: Pos,
}

/// A query validated against a schema; every selection exists on its type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub root_type: String,
    pub selections: Vec<Selection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryErrorKind {
    Syntax,
    UnknownField,
    Argument,
    Selection,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct QueryError {
    pub kind: QueryErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl QueryError {
    fn new(kind: QueryErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        QueryError {
            kind,
            pos,
            message: message.into(),
        }
    }
}

impl From<crate::error::SyntaxError> for QueryError {
    fn from(e: crate::error::SyntaxError) -> Self {
        QueryError::new(QueryErrorKind::Syntax, e.pos, e.message)
    }
}

use QueryErrorKind as Kind;

pub fn parse_query(text: &str, schema: &Schema) -> Result<Query, QueryError> {
    let mut toks = Tokens::new(text)?;
    match toks.peek().clone() {
        Token::Name(kw) if kw == "query" => {
            toks.next();
            if let Token::Name(_) = toks.peek() {
                toks.next();
            }
            if toks.is_punct('(') {
                return Err(QueryError::new(
                    Kind::Unsupported,
                    toks.pos(),
                    "unsupported: variables",
                ));
            }
            if toks.is_punct('@') {
                return Err(QueryError::new(
                    Kind::Unsupported,
                    toks.pos(),
                    "unsupported: directives",
                ));
            }
        }
        Token::Name(kw) if matches!(kw.as_str(), "mutation" | "subscription" | "fragment") => {
            return Err(QueryError::new(
                Kind::Unsupported,
                toks.pos(),
                format!("unsupported: {kw}"),
            ));
        }
        Token::Eof => return Err(QueryError::new(Kind::Syntax, toks.pos(), "empty query")),
        _ => {}
    }
    let root = schema.query_type();
    let open = toks.expect_punct('{')?;
    let selections = parse_selection_set(&mut toks, schema, root, open)?;
    if !toks.at_eof() {
        let (tok, pos) = toks.next();
        let (kind, msg) = match tok {
            Token::Punct('{') | Token::Name(_) => {
                (Kind::Unsupported, "unsupported: multiple operations".into())
            }
            other => (Kind::Syntax, format!("unexpected {other} after the operation")),
        };
        return Err(QueryError::new(kind, pos, msg));
    }
    Ok(Query {
        root_type: root.name.clone(),
        selections,
    })
}

// Called after the opening brace has been consumed.
fn parse_selection_set(
    toks: &mut Tokens,
    schema: &Schema,
    ty: &ObjectType,
    open: Pos,
) -> Result<Vec<Selection>, QueryError> {
    let mut out: Vec<Selection> = Vec::new();
    loop {
        match toks.peek() {
            Token::Punct('}') => {
                toks.next();
                break;
            }
            Token::Eof => return Err(QueryError::new(Kind::Syntax, open, "unclosed selection set")),
            Token::Spread => {
                return Err(QueryError::new(
                    Kind::Unsupported,
                    toks.pos(),
                    "unsupported: fragments",
                ))
            }
            _ => {}
        }
        let (name, pos) = toks.expect_name()?;
        if toks.is_punct(':') {
            return Err(QueryError::new(Kind::Unsupported, pos, "unsupported: aliases"));
        }
        let field = ty.fields.get(&name).ok_or_else(|| {
            QueryError::new(
                Kind::UnknownField,
                pos,
                format!("type `{}` has no field `{name}`", ty.name),
            )
        })?;
        if out.iter().any(|s| s.name == name) {
            return Err(QueryError::new(
                Kind::Selection,
                pos,
                format!("field `{name}` selected twice"),
            ));
        }

        let mut first = None;
        if toks.eat_punct('(') {
            while !toks.eat_punct(')') {
                let (arg, apos) = toks.expect_name()?;
                toks.expect_punct(':')?;
                let (value, vpos) = toks.next();
                if arg != "first" {
                    return Err(QueryError::new(
                        Kind::Argument,
                        apos,
                        format!("unknown argument `{arg}` on `{name}`"),
                    ));
                }
                if !field.ty.list {
                    return Err(QueryError::new(
                        Kind::Argument,
                        apos,
                        format!("`first` only applies to list fields, `{name}` is `{}`", field.ty),
                    ));
                }
                if first.is_some() {
                    return Err(QueryError::new(
                        Kind::Argument,
                        apos,
                        "argument `first` given twice",
                    ));
                }
                first = Some(match value {
                    Token::Int(n) if n >= 0 => n as usize,
                    Token::Int(n) => {
                        return Err(QueryError::new(
                            Kind::Argument,
                            vpos,
                            format!("`first` must be non-negative, got {n}"),
                        ))
                    }
                    Token::Punct('$') => {
                        return Err(QueryError::new(Kind::Unsupported, vpos, "unsupported: variables"))
                    }
                    other => {
                        return Err(QueryError::new(
                            Kind::Argument,
                            vpos,
                            format!("`first` expects Int, got {other}"),
                        ))
                    }
                });
            }
        }
        if toks.is_punct('@') {
            return Err(QueryError::new(
                Kind::Unsupported,
                toks.pos(),
                "unsupported: query directives",
            ));
        }

        let children = match schema.field_type(&field.ty) {
            Some(FieldType::Object) => {
                let child_ty = &schema.types[&field.ty.name];
                if !toks.is_punct('{') {
                    return Err(QueryError::new(
                        Kind::Selection,
                        pos,
                        format!("object field `{name}` needs a selection set"),
                    ));
                }
                let open = toks.expect_punct('{')?;
                let children = parse_selection_set(toks, schema, child_ty, open)?;
                if children.is_empty() {
                    return Err(QueryError::new(Kind::Selection, open, "empty selection set"));
                }
                children
            }
            _ => {
                if toks.is_punct('{') {
                    return Err(QueryError::new(
                        Kind::Selection,
                        toks.pos(),
                        format!("scalar field `{name}` cannot have a selection set"),
                    ));
                }
                Vec::new()
            }
        };
        out.push(Selection {
            name,
            first,
            children,
            pos,
        });
    }
    if out.is_empty() {
        return Err(QueryError::new(Kind::Selection, open, "empty selection set"));
    }
    Ok(out)
}
