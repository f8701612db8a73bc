//! Policy file reader.
//!
//! ```text
//! # '#' starts a comment when it begins a token
//! default = suppress            # or `pass`; must precede the first section
//!
//! [role researcher]             # `[researcher]` is accepted too
//! Symptom.pain   noise      apply  distribution=laplace location=0 scale=1
//! Profile.age    generalize apply  step=10
//! User.birthDate generalize apply  unit=year
//! User.name      generalize apply  visible=2 mask=*
//! User.email     hash       apply  bits=256
//! User.id        suppress   pass
//! Cycle.startDate noise     apply  distribution=normal std_dev=2 unit=day
//! ```
//!
//! Each entry is `Type.field directive verdict [key=value ...]` where the
//! verdict is `pass`, `suppress` or `apply`. Only `apply` takes parameters,
//! and `@suppress` has no `apply` form.

use std::collections::HashMap;

use datamin_reduce::{
    DistributionRegistry, GeneralizationParams, HashBits, HashParams, NoiseParams, NoiseUnit, ParamMap,
    TimeUnit,
};

use super::{DirectiveParams, Entry, EntryKey, Policy, PolicyError, PolicyErrorKind as Kind, Role, Verdict};
use crate::directive::DirectiveKind;

pub fn load_policy(text: &str) -> Result<Policy, PolicyError> {
    load_policy_with(text, &DistributionRegistry::with_builtins())
}

/// Like [`load_policy`], resolving noise distributions through `registry`.
pub fn load_policy_with(text: &str, registry: &DistributionRegistry) -> Result<Policy, PolicyError> {
    let mut policy = Policy::default();
    let mut default_seen = false;
    let mut current: Option<Role> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |kind, message: String| PolicyError { kind, line, message };
        let tokens = tokens(raw);
        let Some(first) = tokens.first() else {
            continue;
        };

        if first.starts_with('[') {
            let header = tokens.join(" ");
            let inner = header
                .strip_prefix('[')
                .and_then(|h| h.strip_suffix(']'))
                .ok_or_else(|| err(Kind::Syntax, format!("malformed section header {header:?}")))?;
            let name = match inner.split_whitespace().collect::<Vec<_>>()[..] {
                ["role", name] | [name] => name,
                _ => return Err(err(Kind::Syntax, format!("malformed section header {header:?}"))),
            };
            let role = Role::new(name).map_err(|m| err(Kind::Syntax, m))?;
            policy.roles.entry(role.clone()).or_default();
            current = Some(role);
            continue;
        }

        if first.as_str() == "default" || first.starts_with("default=") {
            let joined = tokens.concat();
            let value = joined
                .strip_prefix("default=")
                .ok_or_else(|| err(Kind::Syntax, "expected `default = pass|suppress`".into()))?;
            if current.is_some() {
                return Err(err(
                    Kind::Syntax,
                    "`default` must precede the role sections".into(),
                ));
            }
            if default_seen {
                return Err(err(Kind::Duplicate, "`default` given twice".into()));
            }
            default_seen = true;
            policy.default_verdict = match value {
                "pass" => Verdict::Pass,
                "suppress" => Verdict::Suppress,
                other => {
                    return Err(err(
                        Kind::Syntax,
                        format!("default verdict must be `pass` or `suppress`, got {other:?}"),
                    ))
                }
            };
            continue;
        }

        let Some(role) = current.clone() else {
            return Err(err(Kind::Syntax, "entry outside a role section".into()));
        };
        let [field, directive, verdict, params @ ..] = &tokens[..] else {
            return Err(err(
                Kind::Syntax,
                "expected `Type.field directive pass|suppress|apply [key=value ...]`".into(),
            ));
        };
        let (type_name, field_name) = field
            .split_once('.')
            .filter(|(t, f)| is_name(t) && is_name(f))
            .ok_or_else(|| err(Kind::Syntax, format!("expected `Type.field`, got {field:?}")))?;
        let kind = DirectiveKind::from_name(directive)
            .ok_or_else(|| err(Kind::UnknownDirective, format!("unknown directive {directive:?}")))?;
        let label = format!("[{role}] {field} {directive}");

        let params = parse_params(params).map_err(|m| err(Kind::Syntax, format!("{label}: {m}")))?;
        let verdict = match verdict.as_str() {
            "pass" | "suppress" if !params.is_empty() => {
                return Err(err(
                    Kind::Syntax,
                    format!("{label}: `{verdict}` takes no parameters"),
                ))
            }
            "pass" => Verdict::Pass,
            "suppress" => Verdict::Suppress,
            "apply" => Verdict::Apply(
                build_params(kind, params, registry)
                    .map_err(|m| err(Kind::InvalidParams, format!("{label}: {m}")))?,
            ),
            other => {
                return Err(err(
                    Kind::Syntax,
                    format!("{label}: verdict must be pass, suppress or apply, got {other:?}"),
                ))
            }
        };

        let key = EntryKey {
            type_name: type_name.to_owned(),
            field: field_name.to_owned(),
            directive: kind,
        };
        let entries = policy.roles.entry(role).or_default();
        if let Some(prev) = entries.get(&key) {
            return Err(err(
                Kind::Duplicate,
                format!("{label}: already set on line {}", prev.line),
            ));
        }
        entries.insert(key, Entry { verdict, line });
    }
    Ok(policy)
}

fn tokens(raw: &str) -> Vec<String> {
    raw.split_whitespace()
        .take_while(|t| !t.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c == '_' || c.is_ascii_alphabetic())
        && chars.all(|c| c == '_' || c.is_ascii_alphanumeric())
}

fn parse_params(tokens: &[String]) -> Result<Vec<(String, String)>, String> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for t in tokens {
        let (k, v) = t
            .split_once('=')
            .filter(|(k, v)| !k.is_empty() && !v.is_empty())
            .ok_or_else(|| format!("expected key=value, got {t:?}"))?;
        if seen.insert(k.to_owned(), ()).is_some() {
            return Err(format!("parameter `{k}` given twice"));
        }
        out.push((k.to_owned(), v.to_owned()));
    }
    Ok(out)
}

fn number(key: &str, v: &str) -> Result<f64, String> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("`{key}` must be a finite number, got {v:?}"))
}

fn build_params(
    kind: DirectiveKind,
    params: Vec<(String, String)>,
    registry: &DistributionRegistry,
) -> Result<DirectiveParams, String> {
    let mut map: HashMap<String, String> = params.into_iter().collect();
    let mut take = |k: &str| map.remove(k);
    let result = match kind {
        DirectiveKind::Suppress => {
            return Err("@suppress only takes `pass` or `suppress`".into());
        }
        DirectiveKind::Noop => DirectiveParams::Noop,
        DirectiveKind::Hash => {
            let output_bits = match take("bits") {
                None => HashBits::default(),
                Some(v) => v
                    .parse::<u32>()
                    .map_err(|_| format!("`bits` must be an integer, got {v:?}"))
                    .and_then(|b| HashBits::from_bits(b).map_err(|e| e.to_string()))?,
            };
            DirectiveParams::Hash(HashParams { output_bits })
        }
        DirectiveKind::Generalize => {
            let step = take("step");
            let unit = take("unit");
            let visible = take("visible");
            let mut mask = take("mask");
            let g = match (step, unit, visible) {
                (Some(s), None, None) => GeneralizationParams::Numeric {
                    step: number("step", &s)?,
                },
                (None, Some(u), None) => GeneralizationParams::Date {
                    unit: u.parse::<TimeUnit>().map_err(|e| e.to_string())?,
                },
                (None, None, Some(v)) => {
                    let visible_count = v
                        .parse::<usize>()
                        .map_err(|_| format!("`visible` must be a non-negative integer, got {v:?}"))?;
                    let mask_char = match mask.take() {
                        None => '*',
                        Some(m) => {
                            let mut cs = m.chars();
                            match (cs.next(), cs.next()) {
                                (Some(c), None) => c,
                                _ => return Err(format!("`mask` must be one character, got {m:?}")),
                            }
                        }
                    };
                    GeneralizationParams::Text {
                        visible_count,
                        mask_char,
                    }
                }
                _ => return Err("generalize takes exactly one of `step`, `unit` or `visible`".into()),
            };
            if mask.is_some() {
                return Err("`mask` only applies together with `visible`".into());
            }
            g.validate().map_err(|e| e.to_string())?;
            DirectiveParams::Generalize(g)
        }
        DirectiveKind::Noise => {
            let dist = take("distribution").ok_or("noise requires `distribution`")?;
            let date_unit = match take("unit") {
                None => NoiseUnit::default(),
                Some(u) => u.parse::<NoiseUnit>().map_err(|e| e.to_string())?,
            };
            let numeric: ParamMap = map
                .drain()
                .map(|(k, v)| number(&k, &v).map(|x| (k, x)))
                .collect::<Result<_, _>>()?;
            let distribution = registry.build(&dist, &numeric).map_err(|e| e.to_string())?;
            return Ok(DirectiveParams::Noise(NoiseParams {
                distribution,
                date_unit,
            }));
        }
    };
    match map.keys().next() {
        Some(k) => Err(format!("unexpected parameter `{k}`")),
        None => Ok(result),
    }
}
