use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use datamin_bench::{emit_report, run_bench, run_interleaved, BenchConfig, BenchReport, Format, Variant};
use datamin_core::{generate_dataset, mint_token, AuthConfig};

#[derive(Debug, Parser)]
#[command(version, about = "Benchmark harness and dataset generator for the gateway")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure latency and throughput of one or all variants.
    Bench {
        #[arg(long, default_value = "http://127.0.0.1:8080")]
        target: String,
        /// baseline, noop, generalize, noise, hash, or `all` (interleaved).
        #[arg(long, default_value = "all")]
        variant: String,
        /// Objects per response; repeat for several counts.
        #[arg(long = "objects", default_values_t = [1000])]
        objects: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        requests: usize,
        #[arg(long, default_value_t = 1)]
        concurrency: usize,
        #[arg(long, default_value_t = 50)]
        warmup: usize,
        /// Interleaved passes when benchmarking all variants.
        #[arg(long, default_value_t = 5)]
        rounds: usize,
        #[arg(long, default_value = "table")]
        format: Format,
        /// File holding the bearer token (see `token`).
        #[arg(long)]
        token_file: PathBuf,
    },
    /// Write a seeded dataset in the store's JSONL load format.
    Gen {
        #[arg(long)]
        users: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mint an HS256 token with the secret from DATAMIN_JWT_SECRET.
    Token {
        #[arg(long)]
        role: String,
        #[arg(long, default_value_t = 3600)]
        ttl: u64,
        #[arg(
            long = "jwt-secret",
            env = "DATAMIN_JWT_SECRET",
            hide_env_values = true,
            hide = true
        )]
        secret: String,
    },
}

#[tokio::main]
async fn main() -> ExitCode {
    match run(Cli::parse().command).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

async fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Gen { users, seed, out } => {
            if users == 0 {
                return Err("--users must be at least 1".into());
            }
            let ds = generate_dataset(users, seed);
            std::fs::write(&out, ds.to_jsonl()).map_err(|e| format!("{}: {e}", out.display()))?;
            let counts: Vec<String> = ds
                .table_names()
                .map(|t| format!("{t}={}", ds.table(t).map_or(0, <[_]>::len)))
                .collect();
            eprintln!("wrote {} ({})", out.display(), counts.join(" "));
            Ok(())
        }
        Command::Token { role, ttl, secret } => {
            let auth = AuthConfig::new(secret.into_bytes())?;
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_err(|e| e.to_string())?;
            let claims = serde_json::json!({ "role": role, "exp": now.as_secs() + ttl });
            println!("{}", mint_token(&claims, &auth));
            Ok(())
        }
        Command::Bench {
            target,
            variant,
            objects,
            requests,
            concurrency,
            warmup,
            rounds,
            format,
            token_file,
        } => {
            let token = std::fs::read_to_string(&token_file)
                .map_err(|e| format!("{}: {e}", token_file.display()))?
                .trim()
                .to_owned();
            let target = target.trim_end_matches('/').to_owned();
            let mut report = BenchReport::default();
            for &n in &objects {
                let mut config = BenchConfig::new(target.clone(), Variant::Baseline, n, token.clone());
                config.measured_requests = requests;
                config.concurrency = concurrency;
                config.warmup_requests = warmup;
                let part = if variant == "all" {
                    config.measured_requests = requests.div_ceil(rounds.max(1));
                    run_interleaved(&config, &Variant::ALL, rounds).await
                } else {
                    config.variant = variant.parse()?;
                    run_bench(&config).await
                }
                .map_err(|e| e.to_string())?;
                report.cells.extend(part.cells);
            }
            print!("{}", emit_report(&report, format));
            if let (Some(a), Some(b)) = (
                report.cell(Variant::Baseline, 1000),
                report.cell(Variant::Baseline, 10_000),
            ) {
                eprintln!(
                    "baseline latency ratio 10000/1000 objects: {:.2}",
                    b.mean_latency_s / a.mean_latency_s
                );
            }
            Ok(())
        }
    }
}
