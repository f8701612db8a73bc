use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use datamin_core::{AuthConfig, Role};
use datamin_service::{start, DataSpec, ServiceConfig};
use tracing_subscriber::EnvFilter;

/// Role-aware GraphQL-style gateway that reduces response fields per policy.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// SDL schema with reduction directives.
    #[arg(long)]
    schema: PathBuf,
    /// Role policy file.
    #[arg(long)]
    policy: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Base seed for per-request noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Size of the generated period-tracking dataset.
    #[arg(long, default_value_t = 100)]
    dataset_users: usize,
    /// Seed of the generated dataset.
    #[arg(long, default_value_t = 1)]
    dataset_seed: u64,
    /// Load the store from a JSONL file instead of generating it.
    #[arg(long, conflicts_with = "dataset_users")]
    data: Option<PathBuf>,
    /// Reuse `--seed` for every request so noise is reproducible.
    #[arg(long)]
    fixed_rng: bool,
    /// HS256 secret, at least 32 bytes.
    #[arg(
        long = "jwt-secret",
        env = "DATAMIN_JWT_SECRET",
        hide_env_values = true,
        hide = true
    )]
    secret: String,
    /// JWT claim holding the role.
    #[arg(long, default_value = "role")]
    role_claim: String,
    /// Role granted to requests without an Authorization header.
    #[arg(long)]
    anonymous_role: Option<String>,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let args = Args::parse();

    let mut auth = match AuthConfig::new(args.secret.into_bytes()) {
        Ok(a) => a.with_role_claim(args.role_claim),
        Err(e) => {
            eprintln!("DATAMIN_JWT_SECRET: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Some(name) = args.anonymous_role {
        match Role::new(name) {
            Ok(r) => auth = auth.with_anonymous_role(r),
            Err(e) => {
                eprintln!("--anonymous-role: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    let data = match args.data {
        Some(path) => DataSpec::File(path),
        None => DataSpec::Generated {
            users: args.dataset_users,
            seed: args.dataset_seed,
        },
    };
    let config = ServiceConfig {
        listen: args.listen,
        schema_path: args.schema,
        policy_path: args.policy,
        data,
        auth,
        seed: args.seed,
        fixed_rng: args.fixed_rng,
    };
    let fixed_rng = config.fixed_rng;
    let running = match start(config).await {
        Ok(r) => r,
        Err(e) => {
            for d in &e.diagnostics {
                eprintln!("{d}");
            }
            eprintln!("aborting: {} problem(s)", e.diagnostics.len());
            return ExitCode::FAILURE;
        }
    };
    tracing::info!(addr = %running.addr, fixed_rng, "listening");
    match running.task.await {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("server error: {e}");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("server task failed: {e}");
            ExitCode::FAILURE
        }
    }
}
