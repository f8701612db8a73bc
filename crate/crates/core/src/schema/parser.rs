use indexmap::IndexMap;

use super::{
    DirectiveDecl, DirectiveUse, FieldDef, ObjectType, ScalarType, Schema, SchemaError,
    SchemaErrorKind as Kind, TypeRef,
};
use crate::lexer::{Pos, Token, Tokens};

const UNSUPPORTED_DEFINITIONS: &[&str] = &[
    "interface",
    "union",
    "enum",
    "input",
    "extend",
    "fragment",
    "mutation",
    "subscription",
    "query",
];

/// Parses SDL text into a [`Schema`], resolving every type and directive
/// reference.
pub fn parse_schema(sdl: &str) -> Result<Schema, SchemaError> {
    let mut toks = Tokens::new(sdl)?;
    if toks.at_eof() {
        return Err(SchemaError::new(Kind::Empty, toks.pos(), "empty schema"));
    }

    let mut types: IndexMap<String, ObjectType> = IndexMap::new();
    let mut directives: IndexMap<String, DirectiveDecl> = IndexMap::new();
    let mut declared_scalars = Vec::new();
    let mut query_root: Option<(String, Pos)> = None;

    while !toks.at_eof() {
        skip_description(&mut toks);
        let (tok, pos) = toks.next();
        let Token::Name(keyword) = tok else {
            let msg = if tok == Token::Punct('{') {
                "unsupported: executable operations cannot appear in a schema".to_string()
            } else {
                format!("expected a definition, found {tok}")
            };
            let kind = if tok == Token::Punct('{') {
                Kind::Unsupported
            } else {
                Kind::Syntax
            };
            return Err(SchemaError::new(kind, pos, msg));
        };
        match keyword.as_str() {
            "type" => {
                let ty = parse_object(&mut toks, pos)?;
                if types.contains_key(&ty.name) {
                    return Err(SchemaError::new(
                        Kind::DuplicateType,
                        pos,
                        format!("duplicate type `{}`", ty.name),
                    ));
                }
                types.insert(ty.name.clone(), ty);
            }
            "directive" => {
                let decl = parse_directive_decl(&mut toks, pos)?;
                if directives.contains_key(&decl.name) {
                    return Err(SchemaError::new(
                        Kind::DuplicateDirective,
                        pos,
                        format!("duplicate directive `@{}`", decl.name),
                    ));
                }
                directives.insert(decl.name.clone(), decl);
            }
            "scalar" => {
                let (name, npos) = toks.expect_name()?;
                if toks.is_punct('@') {
                    return Err(unsupported(toks.pos(), "directives on scalar definitions"));
                }
                if name != ScalarType::Date.name() {
                    return Err(unsupported(
                        npos,
                        format!("custom scalar `{name}` (only `Date` is supported)"),
                    ));
                }
                if declared_scalars.contains(&name) {
                    return Err(SchemaError::new(
                        Kind::DuplicateType,
                        npos,
                        format!("duplicate scalar `{name}`"),
                    ));
                }
                declared_scalars.push(name);
            }
            "schema" => {
                if query_root.is_some() {
                    return Err(SchemaError::new(Kind::Syntax, pos, "duplicate schema definition"));
                }
                query_root = Some((parse_schema_block(&mut toks)?, pos));
            }
            kw if UNSUPPORTED_DEFINITIONS.contains(&kw) => {
                return Err(unsupported(pos, format!("`{kw}` definitions")));
            }
            other => {
                return Err(SchemaError::new(
                    Kind::Syntax,
                    pos,
                    format!("expected a definition, found `{other}`"),
                ))
            }
        }
    }

    let (query_root, root_pos) = query_root.unwrap_or_else(|| ("Query".to_string(), Pos::new(1, 1)));
    let schema = Schema {
        types,
        directives,
        declared_scalars,
        query_root,
    };
    resolve(&schema, root_pos)?;
    Ok(schema)
}

fn unsupported(pos: Pos, what: impl std::fmt::Display) -> SchemaError {
    SchemaError::new(Kind::Unsupported, pos, format!("unsupported: {what}"))
}

fn skip_description(toks: &mut Tokens) {
    if matches!(toks.peek(), Token::Str(_)) {
        toks.next();
    }
}

fn parse_object(toks: &mut Tokens, pos: Pos) -> Result<ObjectType, SchemaError> {
    let (name, _) = toks.expect_name()?;
    if ScalarType::from_name(&name).is_some() {
        return Err(SchemaError::new(
            Kind::DuplicateType,
            pos,
            format!("type `{name}` shadows a built-in scalar"),
        ));
    }
    match toks.peek() {
        Token::Name(n) if n == "implements" => return Err(unsupported(toks.pos(), "interfaces")),
        Token::Punct('@') => return Err(unsupported(toks.pos(), "directives on object types")),
        _ => {}
    }
    toks.expect_punct('{')?;
    let mut fields = IndexMap::new();
    while !toks.eat_punct('}') {
        if toks.at_eof() {
            return Err(SchemaError::new(
                Kind::Syntax,
                toks.pos(),
                format!("unclosed type `{name}`"),
            ));
        }
        skip_description(toks);
        let field = parse_field(toks)?;
        if fields.contains_key(&field.name) {
            return Err(SchemaError::new(
                Kind::DuplicateField,
                field.pos,
                format!("duplicate field `{name}.{}`", field.name),
            ));
        }
        fields.insert(field.name.clone(), field);
    }
    if fields.is_empty() {
        return Err(SchemaError::new(
            Kind::Syntax,
            pos,
            format!("type `{name}` has no fields"),
        ));
    }
    Ok(ObjectType { name, fields, pos })
}

fn parse_field(toks: &mut Tokens) -> Result<FieldDef, SchemaError> {
    let (name, pos) = toks.expect_name()?;
    if toks.is_punct('(') {
        return Err(unsupported(toks.pos(), "field arguments in SDL"));
    }
    toks.expect_punct(':')?;
    let ty = parse_type_ref(toks)?;
    let mut directives = Vec::new();
    while toks.is_punct('@') {
        let at = toks.expect_punct('@')?;
        let (dname, _) = toks.expect_name()?;
        if toks.is_punct('(') {
            return Err(unsupported(
                toks.pos(),
                "directive arguments in SDL (parameters belong in the policy file)",
            ));
        }
        directives.push(DirectiveUse { name: dname, pos: at });
    }
    Ok(FieldDef {
        name,
        ty,
        directives,
        pos,
    })
}

fn parse_type_ref(toks: &mut Tokens) -> Result<TypeRef, SchemaError> {
    if toks.eat_punct('[') {
        if toks.is_punct('[') {
            return Err(unsupported(toks.pos(), "nested list types"));
        }
        let (name, _) = toks.expect_name()?;
        let item_non_null = toks.eat_punct('!');
        toks.expect_punct(']')?;
        let non_null = toks.eat_punct('!');
        Ok(TypeRef {
            name,
            list: true,
            item_non_null,
            non_null,
        })
    } else {
        let (name, _) = toks.expect_name()?;
        let non_null = toks.eat_punct('!');
        Ok(TypeRef {
            name,
            list: false,
            item_non_null: false,
            non_null,
        })
    }
}

fn parse_directive_decl(toks: &mut Tokens, pos: Pos) -> Result<DirectiveDecl, SchemaError> {
    toks.expect_punct('@')?;
    let (name, _) = toks.expect_name()?;
    if toks.is_punct('(') {
        return Err(unsupported(toks.pos(), "directive arguments"));
    }
    if matches!(toks.peek(), Token::Name(n) if n == "repeatable") {
        return Err(unsupported(toks.pos(), "repeatable directives"));
    }
    toks.expect_keyword("on")?;
    toks.eat_punct('|');
    let mut locations = vec![toks.expect_name()?.0];
    while toks.eat_punct('|') {
        locations.push(toks.expect_name()?.0);
    }
    Ok(DirectiveDecl { name, locations, pos })
}

fn parse_schema_block(toks: &mut Tokens) -> Result<String, SchemaError> {
    toks.expect_punct('{')?;
    let mut query = None;
    while !toks.eat_punct('}') {
        let (op, pos) = toks.expect_name()?;
        toks.expect_punct(':')?;
        let (ty, _) = toks.expect_name()?;
        match op.as_str() {
            "query" if query.is_none() => query = Some(ty),
            "query" => return Err(SchemaError::new(Kind::Syntax, pos, "duplicate query root")),
            "mutation" | "subscription" => return Err(unsupported(pos, format!("{op} roots"))),
            _ => {
                return Err(SchemaError::new(
                    Kind::Syntax,
                    pos,
                    format!("unknown operation type `{op}`"),
                ))
            }
        }
    }
    query.ok_or_else(|| {
        SchemaError::new(
            Kind::MissingQueryRoot,
            toks.pos(),
            "schema block has no query root",
        )
    })
}

/// Checks every type and directive reference now that all definitions are known.
fn resolve(schema: &Schema, root_pos: Pos) -> Result<(), SchemaError> {
    if !schema.types.contains_key(&schema.query_root) {
        return Err(SchemaError::new(
            Kind::MissingQueryRoot,
            root_pos,
            format!("query root type `{}` is not defined", schema.query_root),
        ));
    }
    for ty in schema.types.values() {
        for field in ty.fields.values() {
            if schema.field_type(&field.ty).is_none() {
                return Err(SchemaError::new(
                    Kind::UnknownType,
                    field.pos,
                    format!(
                        "`{}.{}` has unknown type `{}`",
                        ty.name, field.name, field.ty.name
                    ),
                ));
            }
            for d in &field.directives {
                let decl = schema.directives.get(&d.name).ok_or_else(|| {
                    SchemaError::new(
                        Kind::UndeclaredDirective,
                        d.pos,
                        format!("directive `@{}` is used but never declared", d.name),
                    )
                })?;
                if !decl.on_field_definition() {
                    return Err(SchemaError::new(
                        Kind::DirectiveLocation,
                        d.pos,
                        format!("directive `@{}` is not declared `on FIELD_DEFINITION`", d.name),
                    ));
                }
            }
        }
    }
    Ok(())
}
