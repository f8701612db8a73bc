//! Load harness for the gateway: baseline, no-op, generalization, noise and
//! hashing variants over the same symptom records, reported as mean latency
//! and throughput.

mod report;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use report::{emit_report, parse_csv, BenchReport, Cell, Format, CSV_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Baseline,
    Noop,
    Generalize,
    Noise,
    Hash,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Baseline,
        Variant::Noop,
        Variant::Generalize,
        Variant::Noise,
        Variant::Hash,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::Noop => "noop",
            Variant::Generalize => "generalize",
            Variant::Noise => "noise",
            Variant::Hash => "hash",
        }
    }

    /// The query each measured request sends: `object_count` symptoms through
    /// this variant's root field of the bench schema.
    pub fn query(self, object_count: usize) -> String {
        format!(
            "{{ {}(first: {object_count}) {{ id pain mood recordedAt }} }}",
            self.name()
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            format!("unknown variant {s:?}; expected one of baseline, noop, generalize, noise, hash")
        })
    }
}

/// Below this many samples mean and deviation are not reported.
pub const MIN_MEASURED: usize = 30;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Base URL of the service, e.g. `http://127.0.0.1:8080`.
    pub target: String,
    pub variant: Variant,
    pub object_count: usize,
    pub warmup_requests: usize,
    pub measured_requests: usize,
    pub concurrency: usize,
    pub token: String,
}

impl BenchConfig {
    pub fn new(
        target: impl Into<String>,
        variant: Variant,
        object_count: usize,
        token: impl Into<String>,
    ) -> Self {
        BenchConfig {
            target: target.into(),
            variant,
            object_count,
            warmup_requests: 50,
            measured_requests: 200,
            concurrency: 1,
            token: token.into(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.measured_requests < MIN_MEASURED {
            return Err(BenchError::Config(format!(
                "measured_requests must be at least {MIN_MEASURED}, got {}",
                self.measured_requests
            )));
        }
        if self.concurrency == 0 {
            return Err(BenchError::Config("concurrency must be at least 1".into()));
        }
        if self.object_count == 0 {
            return Err(BenchError::Config("object_count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("request failed with status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response: {0}")]
    Response(String),
    #[error("http error: {0}")]
    Http(#[from] reqwest::Error),
}

/// Raw per-request latencies of one measured run.
#[derive(Debug, Clone)]
pub struct Samples {
    pub latencies: Vec<Duration>,
    pub wall: Duration,
}

pub fn client() -> reqwest::Client {
    reqwest::Client::builder()
        .pool_max_idle_per_host(64)
        .build()
        .expect("client configuration is static")
}

/// Waits until `GET /healthz` answers 200, up to `timeout`.
pub async fn await_ready(
    client: &reqwest::Client,
    target: &str,
    timeout: Duration,
) -> Result<(), BenchError> {
    let deadline = Instant::now() + timeout;
    loop {
        match client.get(format!("{target}/healthz")).send().await {
            Ok(r) if r.status().is_success() => return Ok(()),
            Ok(r) if Instant::now() >= deadline => {
                return Err(BenchError::Unreachable(format!(
                    "/healthz answered {}",
                    r.status()
                )))
            }
            Err(e) if Instant::now() >= deadline => return Err(BenchError::Unreachable(e.to_string())),
            _ => tokio::time::sleep(Duration::from_millis(50)).await,
        }
    }
}

async fn request(client: &reqwest::Client, url: &str, token: &str, body: &str) -> Result<String, BenchError> {
    let resp = client
        .post(url)
        .bearer_auth(token)
        .header("content-type", "application/json")
        .body(body.to_owned())
        .send()
        .await?;
    let status = resp.status().as_u16();
    let text = resp.text().await?;
    if status != 200 {
        return Err(BenchError::Status { status, body: text });
    }
    Ok(text)
}

fn check_count(body: &str, variant: Variant, expected: usize) -> Result<(), BenchError> {
    let v: serde_json::Value =
        serde_json::from_str(body).map_err(|e| BenchError::Response(format!("body is not JSON: {e}")))?;
    let got = v["data"][variant.name()].as_array().map(Vec::len);
    if got != Some(expected) {
        return Err(BenchError::Response(format!(
            "{variant} returned {got:?} objects, expected {expected}; is the dataset large enough?"
        )));
    }
    Ok(())
}

/// Warmup followed by `measured_requests` timed requests spread over
/// `concurrency` workers. Any non-200 aborts the run.
pub async fn measure(client: &reqwest::Client, config: &BenchConfig) -> Result<Samples, BenchError> {
    config.validate()?;
    sample(client, config).await
}

async fn sample(client: &reqwest::Client, config: &BenchConfig) -> Result<Samples, BenchError> {
    let url = format!("{}/graphql", config.target);
    let body = serde_json::json!({ "query": config.variant.query(config.object_count) }).to_string();

    let first = request(client, &url, &config.token, &body).await?;
    check_count(&first, config.variant, config.object_count)?;
    for _ in 1..config.warmup_requests {
        request(client, &url, &config.token, &body).await?;
    }

    let next = Arc::new(AtomicUsize::new(0));
    let started = Instant::now();
    let mut workers = Vec::with_capacity(config.concurrency);
    for _ in 0..config.concurrency {
        let (client, url, body, token, next) = (
            client.clone(),
            url.clone(),
            body.clone(),
            config.token.clone(),
            next.clone(),
        );
        let total = config.measured_requests;
        workers.push(tokio::spawn(async move {
            let mut out = Vec::new();
            while next.fetch_add(1, Ordering::Relaxed) < total {
                let t = Instant::now();
                request(&client, &url, &token, &body).await?;
                out.push(t.elapsed());
            }
            Ok::<_, BenchError>(out)
        }));
    }
    let mut latencies = Vec::with_capacity(config.measured_requests);
    for w in workers {
        latencies.extend(w.await.map_err(|e| BenchError::Response(e.to_string()))??);
    }
    Ok(Samples {
        latencies,
        wall: started.elapsed(),
    })
}

/// Checks the target is up, then measures one (variant, object count) cell.
pub async fn run_bench(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let client = client();
    await_ready(&client, &config.target, Duration::from_secs(5)).await?;
    let samples = measure(&client, config).await?;
    Ok(BenchReport {
        cells: vec![Cell::from_samples(config.variant, config.object_count, &samples)],
    })
}

/// Measures several variants in `rounds` interleaved passes, so slow drift
/// of the host affects every variant alike. Each pass contributes
/// `base.measured_requests` samples per variant, and the total per variant
/// must reach [`MIN_MEASURED`]. Warmup runs once.
pub async fn run_interleaved(
    base: &BenchConfig,
    variants: &[Variant],
    rounds: usize,
) -> Result<BenchReport, BenchError> {
    let rounds = rounds.max(1);
    BenchConfig {
        measured_requests: base.measured_requests * rounds,
        ..base.clone()
    }
    .validate()?;
    let client = client();
    await_ready(&client, &base.target, Duration::from_secs(5)).await?;
    let mut merged: Vec<Samples> = variants
        .iter()
        .map(|_| Samples {
            latencies: Vec::new(),
            wall: Duration::ZERO,
        })
        .collect();
    for round in 0..rounds {
        for (i, &variant) in variants.iter().enumerate() {
            let config = BenchConfig {
                variant,
                warmup_requests: if round == 0 { base.warmup_requests } else { 1 },
                ..base.clone()
            };
            let s = sample(&client, &config).await?;
            merged[i].latencies.extend(s.latencies);
            merged[i].wall += s.wall;
        }
    }
    Ok(BenchReport {
        cells: variants
            .iter()
            .zip(&merged)
            .map(|(&v, s)| Cell::from_samples(v, base.object_count, s))
            .collect(),
    })
}
