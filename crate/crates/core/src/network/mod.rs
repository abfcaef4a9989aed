//! The social network model: agents, meeting probabilities, and the
//! per-meeting averaging / influence / disagreement probabilities.

mod generate;
mod io;

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub use generate::{generate, topology, Example2Case, ForcefulSpec, GeneratorKind, GeneratorParams};
pub use io::{from_json_str, load, save, to_json_string};

/// Index of an agent in `[0, n)`.
pub type AgentId = usize;

/// One supported ordered pair `(i, j)`: agent `i`, once recognized, meets `j`
/// with probability `p`; the meeting then averages (`beta`), lets `j`
/// influence `i` (`alpha`), or changes nothing (`gamma`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeSpec<S> {
    pub i: AgentId,
    pub j: AgentId,
    pub p: S,
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
}

impl<S: Scalar> EdgeSpec<S> {
    /// Pure averaging link.
    pub fn averaging(i: AgentId, j: AgentId, p: S) -> Self {
        Self {
            i,
            j,
            p,
            alpha: S::zero(),
            beta: S::one(),
            gamma: S::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SocialNetwork<S> {
    n: usize,
    epsilon: S,
    meeting: Matrix<S>,
    alpha: Matrix<S>,
    beta: Matrix<S>,
    gamma: Matrix<S>,
}

/// Directed pair along which `source` pushes its belief onto `target`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForcefulLink<S> {
    pub source: AgentId,
    pub target: AgentId,
    /// `p_ij * alpha_ij` with `i = target`, `j = source`.
    pub strength: S,
}

impl<S: Scalar> SocialNetwork<S> {
    /// Builds a network from its supported pairs. Nothing is validated here;
    /// see [`validate`].
    pub fn from_edges(n: usize, epsilon: S, edges: &[EdgeSpec<S>]) -> Result<Self> {
        let mut net = Self {
            n,
            epsilon,
            meeting: Matrix::zeros(n, n),
            alpha: Matrix::zeros(n, n),
            beta: Matrix::zeros(n, n),
            gamma: Matrix::zeros(n, n),
        };
        for e in edges {
            for idx in [e.i, e.j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            net.meeting[(e.i, e.j)] = e.p;
            net.alpha[(e.i, e.j)] = e.alpha;
            net.beta[(e.i, e.j)] = e.beta;
            net.gamma[(e.i, e.j)] = e.gamma;
        }
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> S {
        self.epsilon
    }

    pub fn meeting(&self) -> &Matrix<S> {
        &self.meeting
    }

    pub fn alpha(&self) -> &Matrix<S> {
        &self.alpha
    }

    pub fn beta(&self) -> &Matrix<S> {
        &self.beta
    }

    pub fn gamma(&self) -> &Matrix<S> {
        &self.gamma
    }

    pub fn p(&self, i: AgentId, j: AgentId) -> S {
        self.meeting[(i, j)]
    }

    /// Ordered pairs with positive meeting probability.
    pub fn links(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.meeting
            .iter()
            .filter(|&(_, _, p)| p > S::zero())
            .map(|(i, j, _)| (i, j))
    }

    pub fn edges(&self) -> Vec<EdgeSpec<S>> {
        self.links()
            .map(|(i, j)| EdgeSpec {
                i,
                j,
                p: self.meeting[(i, j)],
                alpha: self.alpha[(i, j)],
                beta: self.beta[(i, j)],
                gamma: self.gamma[(i, j)],
            })
            .collect()
    }

    pub fn forceful_links(&self) -> Vec<ForcefulLink<S>> {
        self.links()
            .filter(|&(i, j)| self.alpha[(i, j)] > S::zero())
            .map(|(i, j)| ForcefulLink {
                source: j,
                target: i,
                strength: self.meeting[(i, j)] * self.alpha[(i, j)],
            })
            .collect()
    }

    pub fn has_forceful_agents(&self) -> bool {
        self.links().any(|(i, j)| self.alpha[(i, j)] > S::zero())
    }

    /// `sum_{i,j} p_ij alpha_ij`.
    pub fn total_influence(&self) -> S {
        self.links()
            .map(|(i, j)| self.meeting[(i, j)] * self.alpha[(i, j)])
            .sum()
    }

    /// Same network with agents relabeled: agent `k` becomes `perm[k]`.
    pub fn permuted(&self, perm: &[AgentId]) -> Self {
        assert_eq!(perm.len(), self.n);
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|e| EdgeSpec {
                i: perm[e.i],
                j: perm[e.j],
                ..e
            })
            .collect();
        Self::from_edges(self.n, self.epsilon, &edges).expect("permutation stays in range")
    }
}

/// A violated modelling assumption, with the offending indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TooFewAgents { n: usize },
    BadEpsilon { epsilon: f64 },
    SelfMeeting { agent: AgentId, p: f64 },
    NegativeMeeting { i: AgentId, j: AgentId, p: f64 },
    RowSum { agent: AgentId, sum: f64 },
    NegativeInteraction { i: AgentId, j: AgentId },
    InteractionSum { i: AgentId, j: AgentId, sum: f64 },
    NoInformationExchange { i: AgentId, j: AgentId },
    NotStronglyConnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewAgents { n } => write!(f, "n must be >= 2, got {n}"),
            Self::BadEpsilon { epsilon } => write!(f, "epsilon {epsilon} outside (0, 1/2]"),
            Self::SelfMeeting { agent, p } => write!(f, "self-meeting at agent {agent} (p = {p})"),
            Self::NegativeMeeting { i, j, p } => write!(f, "negative meeting probability p[{i}][{j}] = {p}"),
            Self::RowSum { agent, sum } => write!(f, "meeting row of agent {agent} sums to {sum}"),
            Self::NegativeInteraction { i, j } => write!(f, "negative interaction probability on ({i}, {j})"),
            Self::InteractionSum { i, j, sum } => write!(f, "alpha + beta + gamma on ({i}, {j}) sums to {sum}"),
            Self::NoInformationExchange { i, j } => write!(f, "beta + alpha = 0 on link ({i}, {j})"),
            Self::NotStronglyConnected => write!(f, "not strongly connected"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

fn row_tolerance<S: Scalar>() -> S {
    S::lit(1e-12).max(S::epsilon() * S::lit(16.0))
}

/// Checks meeting probabilities, interaction probabilities and strong
/// connectivity. Never fails; every violation is reported.
pub fn validate<S: Scalar>(net: &SocialNetwork<S>) -> ValidationReport {
    let mut violations = Vec::new();
    let n = net.n;
    if n < 2 {
        violations.push(Violation::TooFewAgents { n });
    }
    let eps = net.epsilon;
    if !(eps > S::zero() && eps <= S::half()) {
        violations.push(Violation::BadEpsilon { epsilon: eps.as_f64() });
    }
    let tol = row_tolerance::<S>();
    for i in 0..n {
        let pii = net.meeting[(i, i)];
        if pii != S::zero() {
            violations.push(Violation::SelfMeeting { agent: i, p: pii.as_f64() });
        }
        for j in 0..n {
            let p = net.meeting[(i, j)];
            if p < S::zero() || p.is_nan() {
                violations.push(Violation::NegativeMeeting { i, j, p: p.as_f64() });
            }
        }
        let sum: S = net.meeting.row(i).iter().copied().sum();
        if (sum - S::one()).abs() > tol || sum.is_nan() {
            violations.push(Violation::RowSum { agent: i, sum: sum.as_f64() });
        }
    }
    for (i, j) in net.links() {
        let (a, b, g) = (net.alpha[(i, j)], net.beta[(i, j)], net.gamma[(i, j)]);
        if a < S::zero() || b < S::zero() || g < S::zero() {
            violations.push(Violation::NegativeInteraction { i, j });
        }
        let sum = a + b + g;
        if (sum - S::one()).abs() > tol {
            violations.push(Violation::InteractionSum { i, j, sum: sum.as_f64() });
        }
        if !(a + b > S::zero()) {
            violations.push(Violation::NoInformationExchange { i, j });
        }
    }
    if n >= 2 && !strongly_connected(net) {
        violations.push(Violation::NotStronglyConnected);
    }
    ValidationReport { violations }
}

/// Runs [`validate`] and turns a non-empty report into an error.
pub fn ensure_valid<S: Scalar>(net: &SocialNetwork<S>) -> Result<()> {
    let report = validate(net);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::Validation(report))
    }
}

fn adjacency<S: Scalar>(net: &SocialNetwork<S>) -> Vec<Vec<AgentId>> {
    let mut adj = vec![Vec::new(); net.n];
    for (i, j) in net.links() {
        adj[i].push(j);
    }
    adj
}

fn bfs(adj: &[Vec<AgentId>], src: AgentId) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn strongly_connected<S: Scalar>(net: &SocialNetwork<S>) -> bool {
    let adj = adjacency(net);
    let mut rev = vec![Vec::new(); net.n];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            rev[v].push(u);
        }
    }
    bfs(&adj, 0).iter().all(Option::is_some) && bfs(&rev, 0).iter().all(Option::is_some)
}

/// The directed meeting graph `{(i, j) | p_ij > 0}` with unweighted
/// shortest-path lengths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeetingDigraph {
    pub n: usize,
    pub links: Vec<(AgentId, AgentId)>,
    pub distances: Vec<Vec<usize>>,
    pub diameter: usize,
}

pub fn meeting_digraph<S: Scalar>(net: &SocialNetwork<S>) -> Result<MeetingDigraph> {
    let adj = adjacency(net);
    let mut distances = Vec::with_capacity(net.n);
    for src in 0..net.n {
        let row: Option<Vec<usize>> = bfs(&adj, src).into_iter().collect();
        distances.push(row.ok_or(Error::NotStronglyConnected)?);
    }
    let diameter = distances.iter().flatten().copied().max().unwrap_or(0);
    Ok(MeetingDigraph {
        n: net.n,
        links: net.links().collect(),
        distances,
        diameter,
    })
}
