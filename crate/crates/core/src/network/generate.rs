use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ensure_valid, AgentId, EdgeSpec, SocialNetwork};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which of the two bridged-triangle configurations to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example2Case {
    /// Agent 2 pushes its belief onto agent 3 across the bridge.
    A,
    /// Agent 1 pushes onto agent 0 inside the left triangle.
    B,
}

impl Example2Case {
    /// Self-weight that reproduces the printed distributions of both cases to
    /// within 0.005 (see the acceptance calibration run).
    pub const CALIBRATED_EPSILON: f64 = 0.1;
    pub const ALPHA: f64 = 0.5;

    pub fn forceful(self) -> ForcefulSpec {
        match self {
            Self::A => ForcefulSpec {
                forceful: 2,
                influenced: 3,
                alpha: Self::ALPHA,
            },
            Self::B => ForcefulSpec {
                forceful: 1,
                influenced: 0,
                alpha: Self::ALPHA,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Dyad,
    Complete { n: usize },
    Ring { n: usize },
    Path { n: usize },
    /// Two `n1`-cliques joined through a path of `n2` extra nodes.
    Barbell { n1: usize, n2: usize },
    /// Cliques of the given sizes, consecutive ones joined by a single edge.
    BridgedClusters { sizes: Vec<usize> },
    Example2 { case: Example2Case },
    RandomRegular { n: usize, degree: usize, seed: u64 },
}

/// `forceful` influences `influenced`: `alpha` lands on the ordered pair
/// `(influenced, forceful)` and `beta` shrinks by the same amount.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcefulSpec {
    pub forceful: AgentId,
    pub influenced: AgentId,
    pub alpha: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// `None` picks 1/2, or the calibrated value for the Example 2 fixture.
    pub epsilon: Option<f64>,
    pub forceful: Vec<ForcefulSpec>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParams(msg.into())
}

fn clique(offset: usize, k: usize, edges: &mut Vec<(usize, usize)>) {
    for a in 0..k {
        for b in (a + 1)..k {
            edges.push((offset + a, offset + b));
        }
    }
}

/// Node count and undirected edge list `(u, v)` with `u < v`.
pub fn topology(kind: &GeneratorKind) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut edges = Vec::new();
    let n = match *kind {
        GeneratorKind::Dyad => {
            edges.push((0, 1));
            2
        }
        GeneratorKind::Complete { n } => {
            if n < 2 {
                return Err(bad("complete graph needs n >= 2"));
            }
            clique(0, n, &mut edges);
            n
        }
        GeneratorKind::Ring { n } => {
            if n < 3 {
                return Err(bad("ring needs n >= 3"));
            }
            edges.extend((0..n - 1).map(|k| (k, k + 1)));
            edges.push((0, n - 1));
            n
        }
        GeneratorKind::Path { n } => {
            if n < 2 {
                return Err(bad("path needs n >= 2"));
            }
            edges.extend((0..n - 1).map(|k| (k, k + 1)));
            n
        }
        GeneratorKind::Barbell { n1, n2 } => {
            if n1 < 2 {
                return Err(bad("barbell needs n1 >= 2"));
            }
            clique(0, n1, &mut edges);
            clique(n1 + n2, n1, &mut edges);
            // chain: last node of the left bell, the n2 path nodes, first node of the right bell
            let chain: Vec<usize> = (n1 - 1..=n1 + n2).collect();
            edges.extend(chain.windows(2).map(|w| (w[0], w[1])));
            2 * n1 + n2
        }
        GeneratorKind::BridgedClusters { ref sizes } => {
            if sizes.is_empty() || sizes.iter().any(|&s| s < 2) {
                return Err(bad("bridged clusters need at least one cluster, each of size >= 2"));
            }
            let mut offset = 0;
            for (c, &s) in sizes.iter().enumerate() {
                clique(offset, s, &mut edges);
                if c > 0 {
                    edges.push((offset - 1, offset));
                }
                offset += s;
            }
            offset
        }
        GeneratorKind::Example2 { .. } => return topology(&GeneratorKind::BridgedClusters { sizes: vec![3, 3] }),
        GeneratorKind::RandomRegular { n, degree, seed } => {
            edges = random_regular(n, degree, seed)?;
            n
        }
    };
    edges.sort_unstable();
    Ok((n, edges))
}

/// Configuration model with rejection of loops, multi-edges and
/// disconnected outcomes.
fn random_regular(n: usize, degree: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if degree == 0 || degree >= n || (n * degree) % 2 == 1 {
        return Err(bad(format!("no connected {degree}-regular graph on {n} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    'attempt: for _ in 0..10_000 {
        stubs.shuffle(&mut rng);
        let mut seen = vec![false; n * n];
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || seen[u * n + v] {
                continue 'attempt;
            }
            seen[u * n + v] = true;
            edges.push((u, v));
        }
        if crate::graph::is_connected(n, &edges) {
            return Ok(edges);
        }
    }
    Err(bad("random regular sampling did not produce a simple connected graph"))
}

/// Builds the topology with `p_ij = 1/deg(i)` and pure averaging, then
/// installs the forceful links.
pub fn generate<S: Scalar>(kind: &GeneratorKind, params: &GeneratorParams) -> Result<SocialNetwork<S>> {
    let (n, undirected) = topology(kind)?;
    let mut forceful = params.forceful.clone();
    let default_eps = match kind {
        GeneratorKind::Example2 { case } => {
            forceful.insert(0, case.forceful());
            Example2Case::CALIBRATED_EPSILON
        }
        _ => 0.5,
    };
    let eps = params.epsilon.unwrap_or(default_eps);
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::BadEpsilon(eps));
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &undirected {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut edges = Vec::with_capacity(2 * undirected.len());
    for (i, nbrs) in adj.iter().enumerate() {
        let p = S::one() / S::from_count(nbrs.len());
        edges.extend(nbrs.iter().map(|&j| EdgeSpec::averaging(i, j, p)));
    }
    for f in &forceful {
        if !(f.alpha > 0.0 && f.alpha <= 1.0) {
            return Err(bad(format!("forceful alpha {} outside (0, 1]", f.alpha)));
        }
        let e = edges
            .iter_mut()
            .find(|e| e.i == f.influenced && e.j == f.forceful)
            .ok_or_else(|| bad(format!("no link between {} and {}", f.influenced, f.forceful)))?;
        e.alpha = S::lit(f.alpha);
        e.beta = S::one() - e.alpha;
    }
    let net = SocialNetwork::from_edges(n, S::lit(eps), &edges)?;
    ensure_valid(&net)?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{meeting_digraph, validate};

    #[test]
    fn barbell_without_path_is_two_joined_triangles() {
        let (n, edges) = topology(&GeneratorKind::Barbell { n1: 3, n2: 0 }).unwrap();
        assert_eq!(n, 6);
        assert_eq!(edges.len(), 7);
        assert!(edges.contains(&(2, 3)));
    }

    #[test]
    fn barbell_edge_count() {
        for k in 2..8 {
            let (_, edges) = topology(&GeneratorKind::Barbell { n1: k, n2: 0 }).unwrap();
            assert_eq!(edges.len(), k * (k - 1) + 1);
        }
    }

    #[test]
    fn complete_four_has_uniform_rows() {
        let net: SocialNetwork<f64> = generate(&GeneratorKind::Complete { n: 4 }, &GeneratorParams::default()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.0 } else { 1.0 / 3.0 };
                assert_eq!(net.p(i, j), want);
            }
        }
    }

    #[test]
    fn example2_fixture_is_valid_with_bridge_link() {
        let net: SocialNetwork<f64> = generate(&GeneratorKind::Example2 { case: Example2Case::A }, &GeneratorParams::default()).unwrap();
        assert!(validate(&net).is_valid());
        assert_eq!(net.alpha()[(3, 2)], 0.5);
        assert_eq!(net.beta()[(3, 2)], 0.5);
        assert_eq!(meeting_digraph(&net).unwrap().diameter, 3);
    }

    #[test]
    fn forceful_link_must_exist() {
        let params = GeneratorParams {
            epsilon: None,
            forceful: vec![ForcefulSpec { forceful: 0, influenced: 2, alpha: 0.5 }],
        };
        assert!(matches!(
            generate::<f64>(&GeneratorKind::Path { n: 3 }, &params),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn bad_sizes_are_rejected() {
        assert!(topology(&GeneratorKind::Barbell { n1: 1, n2: 2 }).is_err());
        assert!(topology(&GeneratorKind::BridgedClusters { sizes: vec![3, 1] }).is_err());
        assert!(topology(&GeneratorKind::RandomRegular { n: 5, degree: 3, seed: 0 }).is_err());
    }

    #[test]
    fn random_regular_is_regular_and_seeded() {
        let kind = GeneratorKind::RandomRegular { n: 20, degree: 6, seed: 7 };
        let (n, edges) = topology(&kind).unwrap();
        let mut deg = vec![0; n];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        assert!(deg.iter().all(|&d| d == 6));
        assert_eq!(edges, topology(&kind).unwrap().1);
    }
}
