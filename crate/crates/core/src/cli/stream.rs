//! `key delta` stream files and `edge u v` graph files.

use crate::randomness::key_from_str;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}:{line}: {message}")]
pub struct InputError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamRecord {
    pub key: u64,
    /// Key as written in the file.
    pub label: String,
    pub delta: f64,
}

/// Decimal keys are used as-is; anything else is hashed to 64 bits.
pub fn key_id(token: &str) -> u64 {
    token.parse::<u64>().unwrap_or_else(|_| key_from_str(token))
}

fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

pub fn parse_stream(path: &str, text: &str) -> Result<Vec<StreamRecord>, InputError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let err = |message: String| InputError {
            path: path.to_string(),
            line: n + 1,
            message,
        };
        let mut words = line.split_whitespace();
        let (Some(key), Some(delta), None) = (words.next(), words.next(), words.next()) else {
            return Err(err(format!("expected `key delta`, got `{line}`")));
        };
        let delta: f64 = delta
            .parse()
            .map_err(|_| err(format!("delta `{delta}` is not a number")))?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(err(format!("delta must be positive and finite, got {delta}")));
        }
        out.push(StreamRecord {
            key: key_id(key),
            label: key.to_string(),
            delta,
        });
    }
    Ok(out)
}

/// Edges as lists of vertex ids (arity 2 to 4) plus the vertex labels.
pub fn parse_graph(path: &str, text: &str) -> Result<Vec<(Vec<u64>, Vec<String>)>, InputError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let err = |message: String| InputError {
            path: path.to_string(),
            line: n + 1,
            message,
        };
        let mut words = line.split_whitespace();
        if words.next() != Some("edge") {
            return Err(err(format!("expected `edge u v`, got `{line}`")));
        }
        let labels: Vec<String> = words.map(str::to_string).collect();
        if labels.len() < 2 {
            return Err(err("an edge needs at least two vertices".into()));
        }
        out.push((labels.iter().map(|l| key_id(l)).collect(), labels));
    }
    Ok(out)
}
