use std::fmt::Write;

use super::Schema;

/// Canonical SDL rendering. Parsing the output yields a schema equal to the
/// input.
pub fn print_schema(schema: &Schema) -> String {
    let mut out = String::new();
    if schema.query_root != "Query" {
        writeln!(out, "schema {{\n  query: {}\n}}\n", schema.query_root).unwrap();
    }
    for s in &schema.declared_scalars {
        writeln!(out, "scalar {s}").unwrap();
    }
    if !schema.declared_scalars.is_empty() {
        out.push('\n');
    }
    for d in schema.directives.values() {
        writeln!(out, "directive @{} on {}", d.name, d.locations.join(" | ")).unwrap();
    }
    if !schema.directives.is_empty() {
        out.push('\n');
    }
    for (i, ty) in schema.types.values().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "type {} {{", ty.name).unwrap();
        for f in ty.fields.values() {
            write!(out, "  {}: {}", f.name, f.ty).unwrap();
            for d in &f.directives {
                write!(out, " @{}", d.name).unwrap();
            }
            out.push('\n');
        }
        out.push_str("}\n");
    }
    out
}
