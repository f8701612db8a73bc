use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use datamin_core::dataset::{PERIOD_POLICY, PERIOD_SCHEMA};
use datamin_core::{
    execute, generate_dataset, load_policy, mint_token, parse_schema, AuthConfig, DataSource, Role,
};
use datamin_reduce::RandomSource;
use datamin_service::{load_engine, start, DataSpec, RunningService, ServiceConfig};
use serde_json::{json, Value};
use tempfile::TempDir;

const SECRET: &str = "service-test-secret-0123456789abcdefghij";
const SEED: u64 = 42;

struct Fixture {
    _dir: TempDir,
    schema: PathBuf,
    policy: PathBuf,
}

fn files(schema: &str, policy: &str) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let (s, p) = (dir.path().join("schema.graphql"), dir.path().join("roles.policy"));
    std::fs::write(&s, schema).unwrap();
    std::fs::write(&p, policy).unwrap();
    Fixture {
        _dir: dir,
        schema: s,
        policy: p,
    }
}

fn auth() -> AuthConfig {
    AuthConfig::new(SECRET.as_bytes()).unwrap()
}

fn token(role: &str) -> String {
    let exp = SystemTime::now().duration_since(UNIX_EPOCH).unwrap().as_secs() + 3600;
    mint_token(&json!({ "role": role, "exp": exp }), &auth())
}

async fn boot(fx: &Fixture, data: DataSpec, fixed_rng: bool, auth: AuthConfig) -> RunningService {
    start(ServiceConfig {
        listen: "127.0.0.1:0".parse().unwrap(),
        schema_path: fx.schema.clone(),
        policy_path: fx.policy.clone(),
        data,
        auth,
        seed: SEED,
        fixed_rng,
    })
    .await
    .unwrap()
}

async fn period(fixed_rng: bool) -> (Fixture, RunningService) {
    let fx = files(PERIOD_SCHEMA, PERIOD_POLICY);
    let svc = boot(&fx, DataSpec::Generated { users: 10, seed: 3 }, fixed_rng, auth()).await;
    (fx, svc)
}

async fn post(svc: &RunningService, bearer: Option<&str>, body: &str) -> (u16, String) {
    let mut req = reqwest::Client::new()
        .post(format!("http://{}/graphql", svc.addr))
        .header("content-type", "application/json")
        .body(body.to_owned());
    if let Some(t) = bearer {
        req = req.bearer_auth(t);
    }
    let resp = req.send().await.unwrap();
    (resp.status().as_u16(), resp.text().await.unwrap())
}

fn query(q: &str) -> String {
    json!({ "query": q }).to_string()
}

#[tokio::test]
async fn health() {
    let (_fx, svc) = period(false).await;
    for _ in 0..3 {
        let resp = reqwest::get(format!("http://{}/healthz", svc.addr))
            .await
            .unwrap();
        assert_eq!(resp.status(), 200);
        assert_eq!(resp.text().await.unwrap(), "ok");
    }
}

#[tokio::test]
async fn researcher_response_matches_engine_with_pinned_seed() {
    let (_fx, svc) = period(true).await;
    let q = "{ symptoms(first: 20) { id pain mood recordedAt } profiles { age heightCm } }";
    let (status, body) = post(&svc, Some(&token("researcher")), &query(q)).await;
    assert_eq!(status, 200, "{body}");

    let schema = parse_schema(PERIOD_SCHEMA).unwrap();
    let policy = load_policy(PERIOD_POLICY).unwrap();
    let ds = generate_dataset(10, 3);
    let role = Role::new("researcher").unwrap();
    let expected = execute(
        q,
        &schema,
        &ds,
        &policy,
        &role,
        &mut RandomSource::from_seed(SEED),
    )
    .unwrap();
    assert_eq!(body, expected.to_json());

    let raw = execute(
        q,
        &schema,
        &ds,
        &load_policy("default = pass").unwrap(),
        &role,
        &mut RandomSource::from_seed(0),
    )
    .unwrap();
    let (a, b): (Value, Value) = (
        serde_json::from_str(&body).unwrap(),
        serde_json::from_str(&raw.to_json()).unwrap(),
    );
    let pains = |v: &Value| -> Vec<Value> {
        v["data"]["symptoms"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s["pain"].clone())
            .collect()
    };
    assert_eq!(pains(&a).len(), 20);
    assert_ne!(pains(&a), pains(&b));
}

#[tokio::test]
async fn status_codes() {
    let (_fx, svc) = period(false).await;
    let ok = query("{ users { id } }");
    let admin = token("admin");
    assert_eq!(post(&svc, None, &ok).await.0, 401);
    assert_eq!(post(&svc, Some("not.a.token"), &ok).await.0, 401);
    let wrong = mint_token(&json!({"role": "admin", "exp": 1}), &auth());
    assert_eq!(post(&svc, Some(&wrong), &ok).await.0, 401);
    assert_eq!(post(&svc, Some(&admin), "{}").await.0, 400);
    assert_eq!(post(&svc, Some(&admin), "[1]").await.0, 400);
    assert_eq!(post(&svc, Some(&admin), "{\"query\": 3}").await.0, 400);
    assert_eq!(post(&svc, Some(&admin), "not json").await.0, 400);
    let (status, body) = post(&svc, Some(&admin), &query("{ nosuchfield }")).await;
    assert_eq!(status, 400);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert!(v["errors"][0]["message"]
        .as_str()
        .unwrap()
        .contains("nosuchfield"));
    assert_eq!(post(&svc, Some(&admin), &ok).await.0, 200);
}

#[tokio::test]
async fn anonymous_role_only_without_a_token() {
    let fx = files(PERIOD_SCHEMA, PERIOD_POLICY);
    let a = auth().with_anonymous_role(Role::new("anonymous").unwrap());
    let svc = boot(&fx, DataSpec::Generated { users: 3, seed: 1 }, false, a).await;
    let (status, body) = post(&svc, None, &query("{ users { id name } }")).await;
    assert_eq!(status, 200);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert!(v["data"]["users"]
        .as_array()
        .unwrap()
        .iter()
        .all(|u| u["name"].is_null()));
    assert_eq!(
        post(&svc, Some("garbage"), &query("{ users { id } }")).await.0,
        401
    );
}

#[tokio::test]
async fn concurrent_requests_differ_only_in_noised_leaves() {
    let (_fx, svc) = period(false).await;
    let svc = Arc::new(svc);
    let q = query("{ symptoms { id pain mood recordedAt } cycles { id startDate lengthDays } }");
    let t = token("researcher");
    let mut handles = Vec::new();
    for _ in 0..8 {
        let (svc, q, t) = (svc.clone(), q.clone(), t.clone());
        handles.push(tokio::spawn(async move { post(&svc, Some(&t), &q).await }));
    }
    let mut bodies = Vec::new();
    for h in handles {
        let (status, body) = h.await.unwrap();
        assert_eq!(status, 200);
        bodies.push(serde_json::from_str::<Value>(&body).unwrap());
    }
    let noised = ["pain", "startDate", "lengthDays"];
    let strip = |v: &Value| -> Value {
        let mut v = v.clone();
        for list in ["symptoms", "cycles"] {
            for item in v["data"][list].as_array_mut().unwrap() {
                for f in noised {
                    if let Some(x) = item.get_mut(f) {
                        *x = Value::Null;
                    }
                }
            }
        }
        v
    };
    for b in &bodies[1..] {
        assert_eq!(strip(b), strip(&bodies[0]));
    }
    assert!(bodies.iter().any(|b| b != &bodies[0]));
}

#[derive(Clone, Default)]
struct Capture(Arc<Mutex<Vec<u8>>>);

impl Write for Capture {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

#[tokio::test]
async fn secret_and_suppressed_values_never_leak() {
    let capture = Capture::default();
    let writer = capture.clone();
    let subscriber = tracing_subscriber::fmt()
        .with_max_level(tracing::Level::TRACE)
        .with_writer(move || writer.clone())
        .finish();
    let _guard = tracing::subscriber::set_default(subscriber);

    let mut ds: DataSource = generate_dataset(6, 2);
    for (i, u) in ds.table_mut("User").unwrap().iter_mut().enumerate() {
        u.insert("name".into(), format!("LEAKCANARY{i}").into());
    }
    let fx = files(PERIOD_SCHEMA, PERIOD_POLICY);
    let data = fx._dir.path().join("data.jsonl");
    std::fs::write(&data, ds.to_jsonl()).unwrap();
    let svc = boot(&fx, DataSpec::File(data), false, auth()).await;

    let mut seen = Vec::new();
    for role in ["researcher", "analyst", "stranger"] {
        let q = query("{ users { id name email profile { city } } }");
        seen.push(post(&svc, Some(&token(role)), &q).await);
    }
    seen.push(post(&svc, None, &query("{ users { name } }")).await);
    seen.push(post(&svc, Some(&token("admin")), "{").await);
    let forged = mint_token(&json!({"role": "admin", "exp": 1}), &auth());
    seen.push(post(&svc, Some(&forged), &query("{ users { name } }")).await);

    let logs = String::from_utf8(capture.0.lock().unwrap().clone()).unwrap();
    for (status, body) in &seen {
        assert!(!body.contains("LEAKCANARY"), "{status}: {body}");
        assert!(!body.contains(SECRET));
    }
    assert!(!logs.contains("LEAKCANARY"));
    assert!(!logs.contains(SECRET));
    assert!(!logs.contains("eyJ"), "a token reached the logs");
    assert!(!format!("{:?}", auth()).contains(SECRET));

    let (_, admin) = post(&svc, Some(&token("admin")), &query("{ users { name } }")).await;
    assert!(admin.contains("LEAKCANARY"), "canaries never reached the store");
}

#[test]
fn startup_reports_every_problem_with_positions() {
    let fx = files(
        "directive @hash on FIELD_DEFINITION\ndirective @suppress on FIELD_DEFINITION\ntype Query { xs: [X!]! }\ntype X {\n  pain: Float @hash\n  id: ID! @suppress\n}\n",
        "[role r]\nX.nope hash apply\n",
    );
    let err = load_engine(&fx.schema, &fx.policy, &DataSpec::Generated { users: 1, seed: 0 }).unwrap_err();
    let s = fx.schema.display().to_string();
    let p = fx.policy.display().to_string();
    assert!(
        err.diagnostics.iter().any(|d| d.starts_with(&format!("{s}:5:"))),
        "{err}"
    );
    assert!(
        err.diagnostics.iter().any(|d| d.starts_with(&format!("{s}:6:"))),
        "{err}"
    );
    assert!(
        err.diagnostics.iter().any(|d| d.starts_with(&format!("{p}:2:"))),
        "{err}"
    );
    assert!(err.diagnostics.iter().any(|d| d.contains("not bound")), "{err}");

    let bad_syntax = files("type Query {", "");
    let err = load_engine(
        &bad_syntax.schema,
        &bad_syntax.policy,
        &DataSpec::Generated { users: 1, seed: 0 },
    )
    .unwrap_err();
    assert!(
        err.diagnostics[0].starts_with(&format!("{}:1:", bad_syntax.schema.display())),
        "{err}"
    );
}
