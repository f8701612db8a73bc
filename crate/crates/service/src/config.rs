use std::fmt;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use datamin_core::policy::load_policy;
use datamin_core::schema::validate_directive_placement;
use datamin_core::{generate_dataset, parse_schema, AuthConfig, DataSource, Engine};

/// Where the in-memory store comes from.
#[derive(Debug, Clone)]
pub enum DataSpec {
    Generated { users: usize, seed: u64 },
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub schema_path: PathBuf,
    pub policy_path: PathBuf,
    pub data: DataSpec,
    pub auth: AuthConfig,
    /// Base of the per-request noise seeds.
    pub seed: u64,
    /// Every request reuses `seed` unchanged, so responses are reproducible.
    pub fixed_rng: bool,
}

/// Everything that stopped the service from starting, one
/// `file:line:column: message` entry per problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartupError {
    pub diagnostics: Vec<String>,
}

impl fmt::Display for StartupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.diagnostics.join("\n"))
    }
}

impl std::error::Error for StartupError {}

fn read(path: &Path) -> Result<String, StartupError> {
    std::fs::read_to_string(path).map_err(|e| StartupError {
        diagnostics: vec![format!("{}: cannot read: {e}", path.display())],
    })
}

/// Parses and cross-validates schema, policy and data. Any diagnostic aborts.
pub fn load_engine(schema_path: &Path, policy_path: &Path, data: &DataSpec) -> Result<Engine, StartupError> {
    let (sp, pp) = (schema_path.display(), policy_path.display());
    let fail = |diagnostics: Vec<String>| Err(StartupError { diagnostics });

    let schema = match parse_schema(&read(schema_path)?) {
        Ok(s) => s,
        Err(e) => return fail(vec![format!("{sp}:{e}")]),
    };
    let mut problems: Vec<String> = validate_directive_placement(&schema)
        .iter()
        .map(|d| format!("{sp}:{d}"))
        .collect();

    let policy = match load_policy(&read(policy_path)?) {
        Ok(p) => p,
        Err(e) => {
            problems.push(format!("{pp}:{}:1: {}", e.line, e.message));
            return fail(problems);
        }
    };
    problems.extend(
        policy
            .validate_against(&schema)
            .iter()
            .map(|d| format!("{pp}:{}:1: {}", d.line, d.message)),
    );

    let (source, origin) = match data {
        DataSpec::Generated { users, seed } => {
            if *users == 0 {
                problems.push("--dataset-users must be at least 1".into());
                return fail(problems);
            }
            (generate_dataset(*users, *seed), "generated dataset".to_string())
        }
        DataSpec::File(path) => match DataSource::from_jsonl(&read(path)?) {
            Ok(s) => (s, path.display().to_string()),
            Err(e) => {
                problems.push(format!("{}: {e}", path.display()));
                return fail(problems);
            }
        },
    };
    problems.extend(
        source
            .check_bindings(&schema)
            .into_iter()
            .map(|p| format!("{origin}: {p}")),
    );

    if problems.is_empty() {
        Ok(Engine::new(schema, policy, source))
    } else {
        fail(problems)
    }
}
