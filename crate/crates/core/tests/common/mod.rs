//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use datamin_core::dataset::{PERIOD_POLICY, PERIOD_SCHEMA};
use datamin_core::engine::{ResponseDocument, ResponseNode, ResponseObject};
use datamin_core::schema::FieldType;
use datamin_core::{
    generate_dataset, load_policy, parse_schema, DataSource, DirectiveKind, DirectiveParams, Policy, Role,
    Schema, Verdict,
};
use datamin_reduce::{
    generalize_date, generalize_number, generalize_string, hash_value, noise_date, noise_number, suppress,
    RandomSource, ScalarValue,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub fn period() -> (Schema, Policy) {
    (
        parse_schema(PERIOD_SCHEMA).unwrap(),
        load_policy(PERIOD_POLICY).unwrap(),
    )
}

pub fn role(name: &str) -> Role {
    Role::new(name).unwrap()
}

pub const SENTINEL: &str = "ZQXSENTINEL";

/// The generated store with every name and city replaced by a unique
/// marker string that must never show up under a suppressing role.
pub fn sentinel_dataset(n_users: usize, seed: u64) -> DataSource {
    let mut ds = generate_dataset(n_users, seed);
    for (i, user) in ds.table_mut("User").unwrap().iter_mut().enumerate() {
        user.insert("name".into(), format!("{SENTINEL}name{i}").into());
    }
    for (i, p) in ds.table_mut("Profile").unwrap().iter_mut().enumerate() {
        p.insert("city".into(), format!("{SENTINEL}city{i}").into());
    }
    ds
}

/// A random valid query over `schema`, nesting at most `depth` object levels.
pub fn random_query(rng: &mut ChaCha8Rng, schema: &Schema, depth: usize) -> String {
    let root = schema.query_type();
    let names: Vec<&String> = root.fields.keys().collect();
    let mut out = String::from("{");
    let count = rng.random_range(1..=2);
    let mut picked: Vec<&String> = Vec::new();
    while picked.len() < count {
        let n = names[rng.random_range(0..names.len())];
        if !picked.contains(&n) {
            picked.push(n);
        }
    }
    for name in picked {
        let def = &root.fields[name];
        out.push(' ');
        out.push_str(name);
        if rng.random_bool(0.5) {
            out.push_str(&format!("(first: {})", rng.random_range(0..25)));
        }
        selection_set(rng, schema, &def.ty.name, depth, &mut out);
    }
    out.push_str(" }");
    out
}

fn selection_set(rng: &mut ChaCha8Rng, schema: &Schema, ty: &str, depth: usize, out: &mut String) {
    let obj = &schema.types[ty];
    let mut chosen = Vec::new();
    for (name, def) in &obj.fields {
        let is_object = schema.field_type(&def.ty) == Some(FieldType::Object);
        if is_object && depth <= 1 {
            continue;
        }
        if rng.random_bool(if is_object { 0.35 } else { 0.6 }) {
            chosen.push((name, def, is_object));
        }
    }
    if chosen.is_empty() {
        let (name, def) = obj
            .fields
            .iter()
            .find(|(_, d)| schema.field_type(&d.ty) != Some(FieldType::Object))
            .unwrap();
        chosen.push((name, def, false));
    }
    out.push_str(" {");
    for (name, def, is_object) in chosen {
        out.push(' ');
        out.push_str(name);
        if is_object {
            if def.ty.list && rng.random_bool(0.3) {
                out.push_str(&format!("(first: {})", rng.random_range(0..5)));
            }
            selection_set(rng, schema, &def.ty.name, depth - 1, out);
        }
    }
    out.push_str(" }");
}

/// Brute-force pipeline: walks the raw document in order and, per leaf,
/// applies the field's directives through direct reduction calls.
pub fn oracle_pipeline(
    raw: &ResponseDocument,
    schema: &Schema,
    policy: &Policy,
    role: &Role,
    rng: &mut RandomSource,
) -> ResponseDocument {
    fn object(o: &ResponseObject, cx: &mut Cx<'_>) -> ResponseObject {
        ResponseObject {
            type_name: o.type_name.clone(),
            fields: o
                .fields
                .iter()
                .map(|(name, n)| (name.clone(), node(&o.type_name, name, n, cx)))
                .collect(),
        }
    }
    fn node(ty: &str, field: &str, n: &ResponseNode, cx: &mut Cx<'_>) -> ResponseNode {
        match n {
            ResponseNode::Object(o) => ResponseNode::Object(object(o, cx)),
            ResponseNode::List(items) => {
                ResponseNode::List(items.iter().map(|i| node(ty, field, i, cx)).collect())
            }
            ResponseNode::Leaf(v) => ResponseNode::Leaf(leaf(ty, field, v, cx)),
        }
    }
    fn leaf(ty: &str, field: &str, v: &ScalarValue, cx: &mut Cx<'_>) -> ScalarValue {
        let def = cx.schema.field(ty, field).unwrap();
        let mut v = v.clone();
        for d in &def.directives {
            let kind = DirectiveKind::from_name(&d.name).unwrap();
            v = match cx.policy.resolve_verdict(cx.role, ty, field, kind) {
                Verdict::Pass => v,
                Verdict::Suppress => return suppress(&v),
                Verdict::Apply(_) if v.is_null() => v,
                Verdict::Apply(DirectiveParams::Generalize(p)) => match v {
                    ScalarValue::Int(_) | ScalarValue::Float(_) => generalize_number(&v, p).unwrap(),
                    ScalarValue::Text(_) => generalize_string(&v, p).unwrap(),
                    ScalarValue::Date(_) => generalize_date(&v, p).unwrap(),
                    other => panic!("generalize on {other:?}"),
                },
                Verdict::Apply(DirectiveParams::Noise(p)) => match v {
                    ScalarValue::Int(_) | ScalarValue::Float(_) => noise_number(&v, p, cx.rng).unwrap(),
                    ScalarValue::Date(_) => noise_date(&v, p, cx.rng).unwrap(),
                    other => panic!("noise on {other:?}"),
                },
                Verdict::Apply(DirectiveParams::Hash(p)) => hash_value(&v, p).unwrap(),
                Verdict::Apply(DirectiveParams::Noop) => v,
            };
        }
        v
    }
    struct Cx<'a> {
        schema: &'a Schema,
        policy: &'a Policy,
        role: &'a Role,
        rng: &'a mut RandomSource,
    }
    let mut cx = Cx {
        schema,
        policy,
        role,
        rng,
    };
    ResponseDocument {
        data: object(&raw.data, &mut cx),
        errors: raw.errors.clone(),
    }
}

pub const JWT_SECRET: &[u8] = b"correct-horse-battery-staple-0123456789";
const OTHER_SECRET: &[u8] = b"a-completely-different-secret-key-abcdefgh";

/// Tokens covering valid, expired, tampered, wrong-secret, missing-claim
/// and foreign-algorithm cases, all minted with the reference library.
pub fn jwt_corpus(n: usize, seed: u64, now: i64) -> Vec<(String, &'static str)> {
    use base64::engine::general_purpose::URL_SAFE_NO_PAD;
    use base64::Engine as _;
    use jsonwebtoken::{encode, Algorithm, EncodingKey, Header};

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let roles = ["admin", "researcher", "analyst", "anonymous", "x"];
    let key = EncodingKey::from_secret(JWT_SECRET);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let role = roles[rng.random_range(0..roles.len())];
        let live = now + rng.random_range(60..86_400);
        let dead = now - rng.random_range(60..86_400);
        let sign = |claims: &serde_json::Value, alg: Algorithm, secret: &[u8]| {
            encode(&Header::new(alg), claims, &EncodingKey::from_secret(secret)).unwrap()
        };
        let tok = match i % 10 {
            0 | 1 => (
                encode(
                    &Header::new(Algorithm::HS256),
                    &json!({"role": role, "exp": live}),
                    &key,
                )
                .unwrap(),
                "valid",
            ),
            2 => (
                sign(&json!({"role": role, "exp": dead}), Algorithm::HS256, JWT_SECRET),
                "expired",
            ),
            3 => {
                let t = sign(&json!({"role": role, "exp": live}), Algorithm::HS256, JWT_SECRET);
                let (head, sig) = t.rsplit_once('.').unwrap();
                let mut raw = URL_SAFE_NO_PAD.decode(sig).unwrap();
                let at = rng.random_range(0..raw.len());
                raw[at] ^= 1 << rng.random_range(0..8);
                (
                    format!("{head}.{}", URL_SAFE_NO_PAD.encode(raw)),
                    "tampered signature",
                )
            }
            4 => {
                let t = sign(&json!({"role": role, "exp": live}), Algorithm::HS256, JWT_SECRET);
                let parts: Vec<&str> = t.split('.').collect();
                let forged = URL_SAFE_NO_PAD.encode(json!({"role": "admin", "exp": live + 1}).to_string());
                (format!("{}.{forged}.{}", parts[0], parts[2]), "tampered payload")
            }
            5 => (
                sign(
                    &json!({"role": role, "exp": live}),
                    Algorithm::HS256,
                    OTHER_SECRET,
                ),
                "wrong secret",
            ),
            6 => (
                sign(&json!({"exp": live}), Algorithm::HS256, JWT_SECRET),
                "missing role",
            ),
            7 => (
                sign(&json!({"role": role}), Algorithm::HS256, JWT_SECRET),
                "missing exp",
            ),
            8 => (
                sign(&json!({"role": role, "exp": live}), Algorithm::HS384, JWT_SECRET),
                "HS384",
            ),
            _ => {
                let header = URL_SAFE_NO_PAD.encode(br#"{"alg":"none","typ":"JWT"}"#);
                let payload = URL_SAFE_NO_PAD.encode(json!({"role": role, "exp": live}).to_string());
                (format!("{header}.{payload}."), "alg none")
            }
        };
        out.push(tok);
    }
    out
}

/// The reference verdict: `Some(role)` iff `jsonwebtoken` accepts the token.
pub fn reference_role(token: &str) -> Option<String> {
    use jsonwebtoken::{decode, Algorithm, DecodingKey, Validation};

    #[derive(serde::Deserialize)]
    struct Claims {
        role: String,
    }
    let mut v = Validation::new(Algorithm::HS256);
    v.leeway = 0;
    v.validate_exp = true;
    v.set_required_spec_claims(&["exp"]);
    decode::<Claims>(token, &DecodingKey::from_secret(JWT_SECRET), &v)
        .ok()
        .map(|d| d.claims.role)
}
