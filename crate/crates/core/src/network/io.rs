use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ensure_valid, EdgeSpec, SocialNetwork};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    n: usize,
    epsilon: f64,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    i: usize,
    j: usize,
    p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
}

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        line: None,
        field: field.into(),
        message: message.into(),
    }
}

/// Fills in whichever of alpha/beta/gamma is missing.
fn resolve(idx: usize, r: &EdgeRecord) -> Result<(f64, f64, f64)> {
    let field = |name: &str| format!("edges[{idx}].{name}");
    let (a, b, g) = match (r.alpha, r.beta, r.gamma) {
        (None, None, None) => (0.0, 1.0, 0.0),
        (Some(a), Some(b), Some(g)) => {
            if (a + b + g - 1.0).abs() > CONSISTENCY_TOL {
                return Err(parse_err(field("gamma"), format!("alpha + beta + gamma = {} is not 1", a + b + g)));
            }
            (a, b, g)
        }
        (Some(a), Some(b), None) => (a, b, 1.0 - a - b),
        (Some(a), None, Some(g)) => (a, 1.0 - a - g, g),
        (None, Some(b), Some(g)) => (1.0 - b - g, b, g),
        // one given: the other two split as "no influence" / "no disagreement"
        (Some(a), None, None) => (a, 1.0 - a, 0.0),
        (None, Some(b), None) => (0.0, b, 1.0 - b),
        (None, None, Some(g)) => (0.0, 1.0 - g, g),
    };
    for (name, v) in [("alpha", a), ("beta", b), ("gamma", g)] {
        if !(-CONSISTENCY_TOL..=1.0 + CONSISTENCY_TOL).contains(&v) {
            return Err(parse_err(field(name), format!("{v} is not a probability")));
        }
    }
    Ok((a, b, g))
}

/// Parses the JSON network format. With `strict`, the modelling assumptions
/// are also enforced.
pub fn from_json_str<S: Scalar>(text: &str, strict: bool) -> Result<SocialNetwork<S>> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: Some(e.line()),
        field: String::new(),
        message: e.to_string(),
    })?;
    if file.n < 2 {
        return Err(parse_err("n", "n must be \u{2265} 2"));
    }
    let mut seen = vec![false; file.n * file.n];
    let mut edges = Vec::with_capacity(file.edges.len());
    for (idx, r) in file.edges.iter().enumerate() {
        for (name, v) in [("i", r.i), ("j", r.j)] {
            if v >= file.n {
                return Err(parse_err(format!("edges[{idx}].{name}"), format!("agent {v} out of range for n = {}", file.n)));
            }
        }
        if std::mem::replace(&mut seen[r.i * file.n + r.j], true) {
            return Err(parse_err(format!("edges[{idx}]"), format!("duplicate pair ({}, {})", r.i, r.j)));
        }
        let (a, b, g) = resolve(idx, r)?;
        let (a, b, g) = if r.p == 0.0 { (0.0, 0.0, 0.0) } else { (a, b, g) };
        edges.push(EdgeSpec {
            i: r.i,
            j: r.j,
            p: S::lit(r.p),
            alpha: S::lit(a),
            beta: S::lit(b),
            gamma: S::lit(g),
        });
    }
    let net = SocialNetwork::from_edges(file.n, S::lit(file.epsilon), &edges)?;
    if strict {
        ensure_valid(&net)?;
    }
    Ok(net)
}

pub fn to_json_string<S: Scalar>(net: &SocialNetwork<S>) -> String {
    let file = NetworkFile {
        n: net.n(),
        epsilon: net.epsilon().as_f64(),
        edges: net
            .edges()
            .into_iter()
            .map(|e| EdgeRecord {
                i: e.i,
                j: e.j,
                p: e.p.as_f64(),
                alpha: Some(e.alpha.as_f64()),
                beta: Some(e.beta.as_f64()),
                gamma: Some(e.gamma.as_f64()),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("network serializes");
    s.push('\n');
    s
}

pub fn load<S: Scalar>(path: impl AsRef<Path>, strict: bool) -> Result<SocialNetwork<S>> {
    from_json_str(&fs::read_to_string(path)?, strict)
}

pub fn save<S: Scalar>(net: &SocialNetwork<S>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json_string(net))?;
    Ok(())
}
