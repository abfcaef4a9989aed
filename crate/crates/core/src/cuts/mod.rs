//! Information bottlenecks: weighted undirected graphs built from `T`,
//! relative and normalized cuts, subgraph restriction and the cut-based
//! commute-time bounds.

mod cluster;
mod exact;
mod flow;
mod spectral;

use std::cmp::Ordering;

use serde::Serialize;

use crate::bound::BoundValue;
use crate::error::{Error, Result};
use crate::graph;
use crate::linalg::Matrix;
use crate::markov::commute_time_electrical;
use crate::scalar::Scalar;

pub use cluster::{cluster_bound, ClusterStep, ClusterTrace, MonotonicityCheck};
pub use exact::{min_relative_cut_enumerated, EXACT_LIMIT};

/// Symmetric nonnegative weights, self-loops allowed.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct WeightedGraph<S> {
    w: Matrix<S>,
}

impl<S: Scalar> WeightedGraph<S> {
    /// Takes `w` as is after checking symmetry to within `tol`.
    pub fn from_matrix(w: Matrix<S>, tol: S) -> Result<Self> {
        assert!(w.is_square());
        let asym = w.asymmetry();
        if asym > tol {
            return Err(Error::NotSymmetric(asym.as_f64()));
        }
        if w.iter().any(|(_, _, x)| x < S::zero()) {
            return Err(Error::BadParams("negative edge weight".into()));
        }
        Ok(Self { w })
    }

    /// Graph of the social network matrix; nodes have unit volume.
    pub fn from_social(t: &Matrix<S>) -> Result<Self> {
        Self::from_matrix(t.clone(), S::lit(1e-12).max(S::epsilon() * S::lit(16.0)))
    }

    /// Weight 1 on every listed edge, no self-loops: the simple random walk.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut w = Matrix::zeros(n, n);
        for &(u, v) in edges {
            w[(u, v)] = S::one();
            w[(v, u)] = S::one();
        }
        Self { w }
    }

    /// Listed edge weights, with self-loops filling every volume up to 1.
    pub fn stochastic(n: usize, edges: &[(usize, usize, S)]) -> Result<Self> {
        let mut w = Matrix::zeros(n, n);
        for &(u, v, x) in edges {
            w[(u, v)] += x;
            w[(v, u)] += x;
        }
        for i in 0..n {
            let off: S = (0..n).filter(|&k| k != i).map(|k| w[(i, k)]).sum();
            if off > S::one() + S::lit(1e-12) {
                return Err(Error::BadParams(format!("node {i} has off-diagonal weight {} > 1", off)));
            }
            w[(i, i)] = (S::one() - off).max(S::zero());
        }
        Ok(Self { w })
    }

    pub fn n(&self) -> usize {
        self.w.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.w
    }

    pub fn weight(&self, i: usize, j: usize) -> S {
        self.w[(i, j)]
    }

    /// `w = sum_{i,j} w_ij`, self-loops included.
    pub fn total(&self) -> S {
        self.w.iter().map(|(_, _, x)| x).sum()
    }

    pub fn volume(&self, i: usize) -> S {
        self.w.row(i).iter().copied().sum()
    }

    pub fn volumes(&self) -> Vec<S> {
        (0..self.n()).map(|i| self.volume(i)).collect()
    }

    /// Undirected edges `(i, j)`, `i < j`, with positive weight.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.w
            .iter()
            .filter(|&(i, j, x)| i < j && x > S::zero())
            .map(|(i, j, _)| (i, j))
            .collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        graph::adjacency(self.n(), &self.edges())
    }

    pub fn is_connected(&self) -> bool {
        graph::is_connected(self.n(), &self.edges())
    }

    pub fn cut_value(&self, in_s: &[bool]) -> S {
        let n = self.n();
        let mut cut = S::zero();
        for i in (0..n).filter(|&i| in_s[i]) {
            for j in (0..n).filter(|&j| !in_s[j]) {
                cut += self.w[(i, j)];
            }
        }
        cut
    }

    pub fn volume_of(&self, in_s: &[bool]) -> S {
        (0..self.n()).filter(|&i| in_s[i]).map(|i| self.volume(i)).sum()
    }

    /// `Q(S, S^c) / (pi(S) pi(S^c))` for the walk with `pi_i = vol_i / w`,
    /// i.e. `w cut(S) / (vol(S) vol(S^c))`.
    pub fn normalized_cut(&self, in_s: &[bool]) -> S {
        let total = self.total();
        let vs = self.volume_of(in_s);
        total * self.cut_value(in_s) / (vs * (total - vs))
    }

    /// Whether every node has the same volume, so the walk's stationary
    /// distribution is uniform.
    pub fn has_uniform_stationary(&self, tol: S) -> bool {
        let v = self.volumes();
        let lo = v.iter().copied().fold(S::infinity(), S::min);
        let hi = v.iter().copied().fold(S::neg_infinity(), S::max);
        hi - lo <= tol * hi.max(S::one())
    }

    /// Row-normalized transition matrix of the walk.
    pub fn transition_matrix(&self) -> Matrix<S> {
        let vol = self.volumes();
        Matrix::from_fn(self.n(), self.n(), |i, j| self.w[(i, j)] / vol[i])
    }

    pub fn commute_time(&self, a: usize, b: usize) -> Result<S> {
        commute_time_electrical(&self.w, a, b)
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        let n = self.n();
        for idx in [a, b] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        if a == b {
            return Err(Error::SameAgent(a));
        }
        Ok(())
    }
}

/// Parameters of the hub-and-cycle family: a complete hub, and `clusters`
/// complete clusters on a cycle, each tied to the hub with total weight `h`
/// and to its cycle neighbours with weight `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HubCycleParams {
    pub clusters: usize,
    pub cluster_size: usize,
    pub hub_size: usize,
    pub hub_weight: f64,
    pub cluster_weight: f64,
    pub h: f64,
    pub r: f64,
}

impl<S: Scalar> WeightedGraph<S> {
    /// Hub nodes come first (`0..hub_size`), then the clusters in cycle
    /// order. Cluster node `t` of cluster `c` ties to hub node
    /// `(c * cluster_size + t) % hub_size` with weight `h / cluster_size`;
    /// the last node of cluster `c` ties to the first node of cluster `c+1`.
    pub fn hub_and_cycle(p: &HubCycleParams) -> Result<Self> {
        if p.clusters < 3 || p.cluster_size < 1 || p.hub_size < 2 {
            return Err(Error::BadParams("hub-and-cycle needs >= 3 clusters and a hub of >= 2".into()));
        }
        let base = p.hub_size;
        let n = base + p.clusters * p.cluster_size;
        let mut edges = Vec::new();
        for a in 0..base {
            for b in (a + 1)..base {
                edges.push((a, b, S::lit(p.hub_weight)));
            }
        }
        let node = |c: usize, t: usize| base + c * p.cluster_size + t;
        for c in 0..p.clusters {
            for s in 0..p.cluster_size {
                for t in (s + 1)..p.cluster_size {
                    edges.push((node(c, s), node(c, t), S::lit(p.cluster_weight)));
                }
                let hub = (c * p.cluster_size + s) % base;
                edges.push((node(c, s), hub, S::lit(p.h / p.cluster_size as f64)));
            }
            let next = (c + 1) % p.clusters;
            edges.push((node(c, p.cluster_size - 1), node(next, 0), S::lit(p.r)));
        }
        Self::stochastic(n, &edges)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutMode {
    Exact,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutResult<S> {
    /// Sorted node labels of the reported side.
    pub side: Vec<usize>,
    /// `sum_{i in S, j not in S} w_ij`.
    pub raw: S,
    /// `w raw / (vol(S) vol(S^c))`.
    pub normalized: S,
    pub mode: CutMode,
}

impl<S: Scalar> CutResult<S> {
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.side {
            m[v] = true;
        }
        m
    }

    pub fn contains(&self, v: usize) -> bool {
        self.side.binary_search(&v).is_ok()
    }

    pub fn is_exact(&self) -> bool {
        self.mode == CutMode::Exact
    }

    fn build(g: &WeightedGraph<S>, in_s: &[bool], mode: CutMode) -> Self {
        Self {
            side: (0..g.n()).filter(|&i| in_s[i]).collect(),
            raw: g.cut_value(in_s),
            normalized: g.normalized_cut(in_s),
            mode,
        }
    }
}

/// Deterministic order on candidate cuts: value, then size of the side,
/// then lexicographic node labels.
pub(crate) fn cut_order<S: Scalar>(va: S, sa: &[usize], vb: S, sb: &[usize]) -> Ordering {
    va.partial_cmp(&vb)
        .unwrap_or(Ordering::Equal)
        .then(sa.len().cmp(&sb.len()))
        .then_with(|| sa.cmp(sb))
}

/// Canonical side of an unconstrained cut: the smaller one, or the
/// lexicographically first when both have equal size.
pub(crate) fn canonical_side(in_s: &[bool]) -> Vec<bool> {
    let n = in_s.len();
    let k = in_s.iter().filter(|&&x| x).count();
    let flip = match (2 * k).cmp(&n) {
        Ordering::Greater => true,
        Ordering::Less => false,
        // the side holding the smallest label wins a size tie
        Ordering::Equal => !in_s[0],
    };
    if flip {
        in_s.iter().map(|&x| !x).collect()
    } else {
        in_s.to_vec()
    }
}

/// Minimum relative cut `c_ab` by max-flow; the side is the set reachable
/// from `a` in the final residual network.
pub fn min_relative_cut<S: Scalar>(g: &WeightedGraph<S>, a: usize, b: usize) -> Result<CutResult<S>> {
    g.check_pair(a, b)?;
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let side = flow::max_flow_min_cut(g, a, b);
    Ok(CutResult::build(g, &side, CutMode::Exact))
}

/// `(n / c_ab, n^2 / c_ab)`; requires a uniform stationary distribution.
pub fn commute_bounds_relative<S: Scalar>(g: &WeightedGraph<S>, a: usize, b: usize) -> Result<(S, S)> {
    if !g.has_uniform_stationary(S::tolerance(1e-9)) {
        return Err(Error::NotUniform);
    }
    let c = min_relative_cut(g, a, b)?.raw;
    let n = S::from_count(g.n());
    Ok((n / c, n * n / c))
}

/// Minimum normalized cut: exhaustive for `n <= EXACT_LIMIT` in exact mode,
/// spectral sweep plus one refinement pass otherwise.
pub fn min_normalized_cut<S: Scalar>(g: &WeightedGraph<S>, mode: CutMode) -> Result<CutResult<S>> {
    if g.n() < 2 {
        return Err(Error::BadParams("a cut needs at least two nodes".into()));
    }
    let side = match mode {
        CutMode::Exact => exact::min_normalized(g, None)?,
        CutMode::Heuristic => spectral::sweep(g, None)?,
    };
    Ok(CutResult::build(g, &side, mode))
}

/// Minimum normalized cut over sides with `a` in and `b` out.
pub fn min_normalized_relative_cut<S: Scalar>(g: &WeightedGraph<S>, a: usize, b: usize, mode: CutMode) -> Result<CutResult<S>> {
    g.check_pair(a, b)?;
    let side = match mode {
        CutMode::Exact => exact::min_normalized(g, Some((a, b)))?,
        CutMode::Heuristic => spectral::sweep(g, Some((a, b)))?,
    };
    Ok(CutResult::build(g, &side, mode))
}

/// `3 n log n / rho_ab` on a graph with uniform stationary distribution.
pub fn commute_bound_normalized<S: Scalar>(g: &WeightedGraph<S>, rho_ab: &CutResult<S>) -> BoundValue<S> {
    let n = S::from_count(g.n());
    BoundValue::with_certification(S::lit(3.0) * n * n.ln() / rho_ab.normalized, rho_ab.is_exact())
}

/// Global commute bound `4 (1 + log n) / (rho min_k pi_k)`.
pub fn commute_bound_global<S: Scalar>(g: &WeightedGraph<S>, rho: &CutResult<S>) -> BoundValue<S> {
    let n = S::from_count(g.n());
    let total = g.total();
    let min_pi = g.volumes().into_iter().fold(S::infinity(), S::min) / total;
    BoundValue::with_certification(S::lit(4.0) * (S::one() + n.ln()) / (rho.normalized * min_pi), rho.is_exact())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct SubgraphRestriction<S> {
    /// Original labels; local node `k` is `nodes[k]`.
    pub nodes: Vec<usize>,
    pub graph: WeightedGraph<S>,
}

impl<S: Scalar> SubgraphRestriction<S> {
    pub fn local(&self, v: usize) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    pub fn lift(&self, local: &[usize]) -> Vec<usize> {
        local.iter().map(|&k| self.nodes[k]).collect()
    }
}

/// Subgraph on `s` with outside weight folded into self-loops, which keeps
/// every node's volume.
pub fn restrict<S: Scalar>(g: &WeightedGraph<S>, s: &[usize]) -> Result<SubgraphRestriction<S>> {
    let mut nodes = s.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.len() < 2 {
        return Err(Error::BadParams("restriction needs at least two nodes".into()));
    }
    if let Some(&v) = nodes.iter().find(|&&v| v >= g.n()) {
        return Err(Error::IndexOutOfRange { index: v, n: g.n() });
    }
    let mut inside = vec![false; g.n()];
    nodes.iter().for_each(|&v| inside[v] = true);
    let k = nodes.len();
    let w = Matrix::from_fn(k, k, |r, c| {
        let (i, j) = (nodes[r], nodes[c]);
        if r == c {
            let outside: S = (0..g.n()).filter(|&x| !inside[x]).map(|x| g.w[(i, x)]).sum();
            g.w[(i, i)] + outside
        } else {
            g.w[(i, j)]
        }
    });
    let graph = WeightedGraph { w };
    if !graph.is_connected() {
        return Err(Error::SubgraphDisconnected(nodes));
    }
    Ok(SubgraphRestriction { nodes, graph })
}

/// Commute comparison `m_ab + m_ba <= (w / w(S)) (m̄_ab + m̄_ba)` between
/// a graph and its restriction to `S`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictedCommuteCheck<S> {
    pub commute: S,
    pub restricted_commute: S,
    /// `w / w(S)`.
    pub scale: S,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgraphBound<S> {
    pub bound: BoundValue<S>,
    /// Minimizing cut on the restriction, reported in original labels.
    pub rho_ab: CutResult<S>,
    pub check: RestrictedCommuteCheck<S>,
}

/// `3 n log|S| / rho_ab(S)`, with `rho_ab(S)` the minimum normalized
/// relative cut on the restriction to `S`.
pub fn commute_bound_subgraph<S: Scalar>(g: &WeightedGraph<S>, a: usize, b: usize, s: &[usize], mode: CutMode) -> Result<SubgraphBound<S>> {
    g.check_pair(a, b)?;
    let sub = restrict(g, s)?;
    let (la, lb) = match (sub.local(a), sub.local(b)) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::BadParams("a and b must lie in S".into())),
    };
    let local = min_normalized_relative_cut(&sub.graph, la, lb, mode)?;
    let size = S::from_count(sub.nodes.len());
    let n = S::from_count(g.n());
    let bound = BoundValue::with_certification(S::lit(3.0) * n * size.ln() / local.normalized, local.is_exact());
    let commute = g.commute_time(a, b)?;
    let restricted_commute = sub.graph.commute_time(la, lb)?;
    let scale = g.total() / sub.graph.total();
    let tol = S::tolerance(1e-9) * commute.max(S::one());
    let check = RestrictedCommuteCheck {
        commute,
        restricted_commute,
        scale,
        holds: commute <= scale * restricted_commute + tol,
    };
    let rho_ab = CutResult {
        side: sub.lift(&local.side),
        ..local
    };
    Ok(SubgraphBound { bound, rho_ab, check })
}
