mod common;

use common::{oracle_pipeline, period, random_query, role, sentinel_dataset, SENTINEL};
use datamin_core::engine::{apply_pipeline, resolve, ResponseNode};
use datamin_core::{
    execute, generate_dataset, load_policy, parse_query, parse_schema, DataSource, EngineError, Record,
};
use datamin_reduce::{
    generalize_number, noise_number, GeneralizationParams, NoiseParams, RandomSource, ScalarValue, Uniform,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LISTING_1: &str = "
directive @noise on FIELD_DEFINITION

type Symptom {
    pain: Float @noise
}

type Query {
    symptoms: [Symptom]
}
";

fn record(pairs: &[(&str, ScalarValue)]) -> Record {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn single(table: &str, root: &str, rows: Vec<Record>) -> DataSource {
    let mut ds = DataSource::new();
    ds.add_table(table);
    for r in rows {
        ds.insert(table, r).unwrap();
    }
    ds.bind_root(root, table).unwrap();
    ds
}

fn leaf_values(json: &str, pick: &str) -> Vec<serde_json::Value> {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v["data"]["symptoms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s[pick].clone())
        .collect()
}

#[test]
fn listing_one_noise_changes_values_not_shape() {
    let schema = parse_schema(LISTING_1).unwrap();
    let names: Vec<&str> = schema
        .field("Symptom", "pain")
        .unwrap()
        .directive_names()
        .collect();
    assert_eq!(names, ["noise"]);

    let rows = (0..50)
        .map(|i| record(&[("pain", ScalarValue::Float(i as f64 / 5.0))]))
        .collect();
    let ds = single("Symptom", "symptoms", rows);
    let policy =
        load_policy("[role researcher]\nSymptom.pain noise apply distribution=laplace location=0 scale=1")
            .unwrap();
    let admin = load_policy("default = pass").unwrap();
    let r = role("researcher");
    let q = "{ symptoms { pain } }";

    let raw = execute(q, &schema, &ds, &admin, &r, &mut RandomSource::from_seed(1)).unwrap();
    let noised = execute(q, &schema, &ds, &policy, &r, &mut RandomSource::from_seed(1)).unwrap();
    assert_eq!(raw.shape(), noised.shape());
    let (a, b) = (
        leaf_values(&raw.to_json(), "pain"),
        leaf_values(&noised.to_json(), "pain"),
    );
    assert_eq!(a.len(), 50);
    assert_eq!(b.len(), 50);
    assert!(a.iter().zip(&b).filter(|(x, y)| x != y).count() >= 45);
    assert!(b.iter().all(serde_json::Value::is_f64));
}

#[test]
fn spec_examples_through_the_pipeline() {
    let schema = parse_schema(
        "directive @noise on FIELD_DEFINITION
         directive @generalize on FIELD_DEFINITION
         directive @suppress on FIELD_DEFINITION
         type Query { people: [P!]! }
         type P { pain: Float @noise  name: String @suppress  age: Int @generalize @noise }",
    )
    .unwrap();
    let ds = single(
        "P",
        "people",
        vec![record(&[
            ("pain", ScalarValue::Float(7.3)),
            ("name", "Johanna".into()),
            ("age", ScalarValue::Int(27)),
        ])],
    );
    let policy = load_policy(
        "[role r]
         P.pain noise apply distribution=normal mean=0 std_dev=0
         P.age generalize apply step=10
         P.age noise apply distribution=uniform low=0 high=0",
    )
    .unwrap();
    let doc = execute(
        "{ people { pain name age } }",
        &schema,
        &ds,
        &policy,
        &role("r"),
        &mut RandomSource::from_seed(0),
    )
    .unwrap();
    assert_eq!(
        doc.to_json(),
        r#"{"data":{"people":[{"pain":7.3,"name":null,"age":20}]}}"#
    );
}

#[test]
fn declaration_order_is_honoured() {
    let src = |order: &str| {
        parse_schema(&format!(
            "directive @noise on FIELD_DEFINITION
             directive @generalize on FIELD_DEFINITION
             type Query {{ xs: [X!]! }}
             type X {{ v: Int {order} }}"
        ))
        .unwrap()
    };
    let ds = single("X", "xs", vec![record(&[("v", ScalarValue::Int(8))])]);
    let policy = load_policy(
        "[role r]
         X.v generalize apply step=10
         X.v noise apply distribution=uniform low=3 high=3",
    )
    .unwrap();
    let run = |order| {
        execute(
            "{ xs { v } }",
            &src(order),
            &ds,
            &policy,
            &role("r"),
            &mut RandomSource::from_seed(0),
        )
        .unwrap()
        .to_json()
    };
    let step = GeneralizationParams::step(10.0);
    let three = NoiseParams::new(Uniform::new(3.0, 3.0).unwrap());
    let mut rng = RandomSource::from_seed(0);
    let gen_then_noise = noise_number(
        &generalize_number(&ScalarValue::Int(8), &step).unwrap(),
        &three,
        &mut rng,
    )
    .unwrap();
    let noise_then_gen = generalize_number(
        &noise_number(&ScalarValue::Int(8), &three, &mut rng).unwrap(),
        &step,
    )
    .unwrap();
    assert_ne!(gen_then_noise, noise_then_gen);
    assert_eq!(run("@generalize @noise"), r#"{"data":{"xs":[{"v":3}]}}"#);
    assert_eq!(run("@noise @generalize"), r#"{"data":{"xs":[{"v":10}]}}"#);
    assert_eq!(gen_then_noise, ScalarValue::Int(3));
    assert_eq!(noise_then_gen, ScalarValue::Int(10));
}

#[test]
fn matches_brute_force_oracle() {
    let (schema, policy) = period();
    let ds = generate_dataset(20, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let roles = ["admin", "researcher", "analyst", "nobody"];
    for i in 0..200u64 {
        let q = random_query(&mut rng, &schema, 3);
        let r = role(roles[i as usize % roles.len()]);
        let engine = execute(&q, &schema, &ds, &policy, &r, &mut RandomSource::from_seed(i)).unwrap();
        let raw = resolve(&parse_query(&q, &schema).unwrap(), &schema, &ds).unwrap();
        let oracle = oracle_pipeline(&raw, &schema, &policy, &r, &mut RandomSource::from_seed(i));
        let (a, b) = (
            serde_json::to_string(&engine.data).unwrap(),
            serde_json::to_string(&oracle.data).unwrap(),
        );
        assert!(a == b, "{q} as {r}");
        assert_eq!(engine.shape(), raw.shape(), "{q}");
    }
}

#[test]
fn suppressing_roles_never_see_sentinels() {
    let (schema, policy) = period();
    let ds = sentinel_dataset(15, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut admin_saw = false;
    for i in 0..300u64 {
        let q = random_query(&mut rng, &schema, 3);
        for r in ["researcher", "analyst", "unlisted"] {
            let doc = execute(
                &q,
                &schema,
                &ds,
                &policy,
                &role(r),
                &mut RandomSource::from_seed(i),
            )
            .unwrap();
            assert!(!doc.to_json().contains(SENTINEL), "{q} as {r}");
        }
        let admin = execute(
            &q,
            &schema,
            &ds,
            &policy,
            &role("admin"),
            &mut RandomSource::from_seed(i),
        )
        .unwrap();
        admin_saw |= admin.to_json().contains(SENTINEL);
    }
    assert!(admin_saw, "sentinels never selected; the check above is vacuous");
}

#[test]
fn unlisted_role_gets_null_for_every_annotated_leaf() {
    let (schema, policy) = period();
    let ds = generate_dataset(5, 1);
    let q = "{ users { id name email birthDate profile { age city heightCm } cycles { startDate lengthDays symptoms { id pain mood recordedAt } } } }";
    let doc = execute(
        q,
        &schema,
        &ds,
        &policy,
        &role("intruder"),
        &mut RandomSource::from_seed(0),
    )
    .unwrap();
    let mut annotated = 0;
    for (field, v) in doc.leaves() {
        let (ty, name) = field.split_once('.').unwrap();
        if schema.field(ty, name).unwrap().directives.is_empty() {
            assert!(!v.is_null(), "{field}");
        } else {
            annotated += 1;
            assert!(v.is_null(), "{field}: {v:?}");
        }
    }
    assert!(annotated > 20);
    assert!(
        doc.errors.iter().any(|e| e.contains("Symptom.id")),
        "{:?}",
        doc.errors
    );
}

#[test]
fn pass_everywhere_is_identical_to_resolve() {
    let (schema, policy) = period();
    let ds = generate_dataset(10, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..50 {
        let q = random_query(&mut rng, &schema, 3);
        let raw = resolve(&parse_query(&q, &schema).unwrap(), &schema, &ds).unwrap();
        let admin = execute(
            &q,
            &schema,
            &ds,
            &policy,
            &role("admin"),
            &mut RandomSource::from_seed(i),
        )
        .unwrap();
        assert_eq!(admin.to_json(), raw.to_json());
    }
}

#[test]
fn pass_verdict_equals_unannotated_schema() {
    let annotated = parse_schema(
        "directive @noise on FIELD_DEFINITION
         type Query { xs: [X!]! } type X { v: Float @noise w: Int }",
    )
    .unwrap();
    let plain = parse_schema("type Query { xs: [X!]! } type X { v: Float w: Int }").unwrap();
    let rows = (0..20)
        .map(|i| {
            record(&[
                ("v", ScalarValue::Float(i as f64 * 1.5)),
                ("w", ScalarValue::Int(i)),
            ])
        })
        .collect();
    let ds = single("X", "xs", rows);
    let policy = load_policy("[role r]\nX.v noise pass").unwrap();
    let r = role("r");
    let a = execute(
        "{ xs { v w } }",
        &annotated,
        &ds,
        &policy,
        &r,
        &mut RandomSource::from_seed(0),
    )
    .unwrap();
    let b = execute(
        "{ xs { v w } }",
        &plain,
        &ds,
        &policy,
        &r,
        &mut RandomSource::from_seed(0),
    )
    .unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn deterministic_per_seed() {
    let (schema, policy) = period();
    let ds = generate_dataset(10, 4);
    let q = "{ symptoms { pain recordedAt } cycles { startDate lengthDays } }";
    let r = role("researcher");
    let run = |seed| {
        execute(q, &schema, &ds, &policy, &r, &mut RandomSource::from_seed(seed))
            .unwrap()
            .to_json()
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7), run(8));
}

#[test]
fn resolve_truncates_and_joins() {
    let (schema, _) = period();
    let ds = generate_dataset(8, 6);
    let q = parse_query(
        "{ symptoms(first: 2) { id } users { id cycles { id } } }",
        &schema,
    )
    .unwrap();
    let doc = resolve(&q, &schema, &ds).unwrap();
    let json: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
    assert_eq!(
        json["data"]["symptoms"],
        serde_json::json!([{"id": "s0"}, {"id": "s1"}])
    );

    // Independent join: users own the cycles whose `user` link points back.
    let cycles = ds.table("Cycle").unwrap();
    for (u, user) in json["data"]["users"].as_array().unwrap().iter().enumerate() {
        let expected: Vec<serde_json::Value> = (0..cycles.len())
            .filter(|&c| ds.related("Cycle", "user", c).unwrap().1 == [u])
            .map(|c| serde_json::json!({"id": format!("c{c}")}))
            .collect();
        assert_eq!(user["cycles"], serde_json::Value::Array(expected));
    }

    let mut empty = ds.clone();
    empty.add_table("Nothing");
    empty.bind_root("symptoms", "Nothing").unwrap();
    let doc = resolve(
        &parse_query("{ symptoms { id } }", &schema).unwrap(),
        &schema,
        &empty,
    )
    .unwrap();
    assert_eq!(doc.to_json(), r#"{"data":{"symptoms":[]}}"#);
}

#[test]
fn errors_are_distinguishable() {
    let (schema, policy) = period();
    let ds = generate_dataset(2, 0);
    let err = execute(
        "{ nosuch }",
        &schema,
        &ds,
        &policy,
        &role("admin"),
        &mut RandomSource::from_seed(0),
    )
    .unwrap_err();
    assert!(matches!(err, EngineError::Query(_)));

    // A hash verdict on a numeric leaf can only come from bypassing validation.
    let bad = parse_schema(
        "directive @hash on FIELD_DEFINITION type Query { xs: [X!]! } type X { v: String @hash }",
    )
    .unwrap();
    let ds = single("X", "xs", vec![record(&[("v", ScalarValue::Int(3))])]);
    let policy = load_policy("[role r]\nX.v hash apply").unwrap();
    let err = execute(
        "{ xs { v } }",
        &bad,
        &ds,
        &policy,
        &role("r"),
        &mut RandomSource::from_seed(0),
    )
    .unwrap_err();
    assert!(matches!(err, EngineError::Execution(_)), "{err}");
}

#[test]
fn apply_pipeline_keeps_lists_and_nulls() {
    let (schema, policy) = period();
    let mut ds = generate_dataset(3, 0);
    ds.table_mut("Symptom").unwrap()[0].insert("pain".into(), ScalarValue::Null);
    let q = parse_query("{ symptoms { pain cycles { lengthDays } } }", &schema).unwrap();
    let raw = resolve(&q, &schema, &ds).unwrap();
    let out = apply_pipeline(
        raw.clone(),
        &schema,
        &policy,
        &role("researcher"),
        &mut RandomSource::from_seed(0),
    )
    .unwrap();
    assert_eq!(out.shape(), raw.shape());
    let ResponseNode::List(items) = &out.data.fields[0].1 else {
        panic!()
    };
    let ResponseNode::Object(first) = &items[0] else {
        panic!()
    };
    assert_eq!(first.get("pain"), Some(&ResponseNode::Leaf(ScalarValue::Null)));
}
