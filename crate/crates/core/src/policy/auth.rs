//! HS256 bearer tokens carrying a single role claim.

use std::fmt;

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine as _;
use hmac::{Hmac, Mac};
use serde_json::Value;
use sha2::Sha256;
use thiserror::Error;

use super::Role;

type HmacSha256 = Hmac<Sha256>;

pub const MIN_SECRET_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuthError {
    #[error("missing bearer token")]
    Missing,
    #[error("malformed authorization: {0}")]
    Malformed(String),
    #[error("unsupported token algorithm {0:?}")]
    Algorithm(String),
    #[error("invalid token signature")]
    Signature,
    #[error("token expired")]
    Expired,
    #[error("token lacks a string `{0}` claim")]
    MissingClaim(String),
    #[error("invalid role: {0}")]
    Role(String),
}

#[derive(Clone)]
pub struct AuthConfig {
    secret: Vec<u8>,
    pub role_claim: String,
    /// Granted to requests that carry no token at all.
    pub anonymous_role: Option<Role>,
}

impl fmt::Debug for AuthConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AuthConfig")
            .field("secret", &"<redacted>")
            .field("role_claim", &self.role_claim)
            .field("anonymous_role", &self.anonymous_role)
            .finish()
    }
}

impl AuthConfig {
    pub fn new(secret: impl Into<Vec<u8>>) -> Result<Self, String> {
        let secret = secret.into();
        if secret.len() < MIN_SECRET_LEN {
            return Err(format!(
                "HMAC secret must be at least {MIN_SECRET_LEN} bytes, got {}",
                secret.len()
            ));
        }
        Ok(AuthConfig {
            secret,
            role_claim: "role".into(),
            anonymous_role: None,
        })
    }

    pub fn with_role_claim(mut self, claim: impl Into<String>) -> Self {
        self.role_claim = claim.into();
        self
    }

    pub fn with_anonymous_role(mut self, role: Role) -> Self {
        self.anonymous_role = Some(role);
        self
    }

    fn mac(&self) -> HmacSha256 {
        HmacSha256::new_from_slice(&self.secret).expect("HMAC accepts any key length")
    }
}

/// Pulls the token out of an `Authorization` header value. `Ok(None)` when
/// the header is absent.
pub fn bearer_token(header: Option<&str>) -> Result<Option<&str>, AuthError> {
    let Some(h) = header else {
        return Ok(None);
    };
    let (scheme, token) = h
        .trim()
        .split_once(' ')
        .ok_or_else(|| AuthError::Malformed("expected `Bearer <token>`".into()))?;
    if !scheme.eq_ignore_ascii_case("bearer") {
        return Err(AuthError::Malformed(format!("unsupported scheme {scheme:?}")));
    }
    let token = token.trim();
    if token.is_empty() {
        return Err(AuthError::Malformed("empty bearer token".into()));
    }
    Ok(Some(token))
}

fn decode_json(segment: &str, what: &str) -> Result<Value, AuthError> {
    let bytes = URL_SAFE_NO_PAD
        .decode(segment)
        .map_err(|_| AuthError::Malformed(format!("{what} is not base64url")))?;
    serde_json::from_slice(&bytes).map_err(|_| AuthError::Malformed(format!("{what} is not JSON")))
}

/// Verifies an HS256 token and returns its role claim.
///
/// `now` is Unix seconds; a token is expired once `exp < now`. An absent
/// token yields the anonymous role when one is configured.
pub fn extract_role(token: Option<&str>, auth: &AuthConfig, now: i64) -> Result<Role, AuthError> {
    let Some(token) = token else {
        return auth.anonymous_role.clone().ok_or(AuthError::Missing);
    };
    let mut parts = token.split('.');
    let (Some(header), Some(payload), Some(signature), None) =
        (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err(AuthError::Malformed(
            "expected three dot-separated segments".into(),
        ));
    };

    let header = decode_json(header, "header")?;
    match header.get("alg").and_then(Value::as_str) {
        Some("HS256") => {}
        Some(other) => return Err(AuthError::Algorithm(other.into())),
        None => return Err(AuthError::Malformed("header has no `alg`".into())),
    }

    let signature = URL_SAFE_NO_PAD
        .decode(signature)
        .map_err(|_| AuthError::Malformed("signature is not base64url".into()))?;
    let signed_len = token.len() - token.rsplit('.').next().map_or(0, str::len) - 1;
    let mut mac = auth.mac();
    mac.update(&token.as_bytes()[..signed_len]);
    mac.verify_slice(&signature).map_err(|_| AuthError::Signature)?;

    let claims = decode_json(payload, "payload")?;
    if !claims.is_object() {
        return Err(AuthError::Malformed("payload is not an object".into()));
    }
    let exp = claims
        .get("exp")
        .ok_or_else(|| AuthError::MissingClaim("exp".into()))?
        .as_u64()
        .ok_or_else(|| AuthError::Malformed("`exp` is not a non-negative integer".into()))?;
    if (exp as i128) < now as i128 {
        return Err(AuthError::Expired);
    }
    let role = claims
        .get(&auth.role_claim)
        .and_then(Value::as_str)
        .ok_or_else(|| AuthError::MissingClaim(auth.role_claim.clone()))?;
    Role::new(role).map_err(AuthError::Role)
}

/// Signs `claims` as an HS256 token with the configured secret.
pub fn mint_token(claims: &Value, auth: &AuthConfig) -> String {
    let header = URL_SAFE_NO_PAD.encode(br#"{"alg":"HS256","typ":"JWT"}"#);
    let payload = URL_SAFE_NO_PAD.encode(claims.to_string());
    let signing_input = format!("{header}.{payload}");
    let mut mac = auth.mac();
    mac.update(signing_input.as_bytes());
    let sig = URL_SAFE_NO_PAD.encode(mac.finalize().into_bytes());
    format!("{signing_input}.{sig}")
}
