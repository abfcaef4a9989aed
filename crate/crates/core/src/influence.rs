//! Excess influence `pi_bar - e/n`, computed by several exact routes, the
//! misinformation bounds, and the closed forms for forceful links sitting on
//! bridges of the social network graph.

use serde::Serialize;

use crate::bound::BoundValue;
use crate::cuts::{
    commute_bound_global, commute_bound_normalized, commute_bounds_relative, min_normalized_cut,
    min_normalized_relative_cut, min_relative_cut, CutMode, CutResult, WeightedGraph,
};
use crate::error::{Error, Result};
use crate::graph;
use crate::kernel::{decompose, eta_constants, InteractionDecomposition};
use crate::linalg::{norm2, norm_inf, Matrix};
use crate::markov::{
    fundamental_matrix, mean_first_passage, second_eigenvalue, stationary, FundamentalMatrix, PassageTimes,
    StationaryDistribution,
};
use crate::network::{ensure_valid, AgentId, SocialNetwork};
use crate::scalar::Scalar;

/// Everything the exact routes share: the decomposition, the consensus
/// distribution, and the fundamental matrix and passage times of `T`.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct ChainAnalysis<S> {
    pub decomposition: InteractionDecomposition<S>,
    pub consensus: StationaryDistribution<S>,
    pub social_fundamental: FundamentalMatrix<S>,
    pub social_passage: PassageTimes<S>,
}

pub fn analyze_chain<S: Scalar>(net: &SocialNetwork<S>) -> Result<ChainAnalysis<S>> {
    ensure_valid(net)?;
    let decomposition = decompose(net);
    let consensus = stationary(&decomposition.w_tilde)?;
    let uniform = vec![S::one() / S::from_count(net.n()); net.n()];
    let social_fundamental = fundamental_matrix(&decomposition.t, &uniform)?;
    let social_passage = mean_first_passage(&social_fundamental.y, &uniform);
    Ok(ChainAnalysis {
        decomposition,
        consensus,
        social_fundamental,
        social_passage,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcessInfluence<S> {
    /// `pi_bar_i - 1/n`.
    pub excess: Vec<S>,
    /// `E[x_bar] - mean(x(0))` for the supplied initial beliefs.
    pub gap: Option<S>,
}

impl<S: Scalar> ExcessInfluence<S> {
    fn new(excess: Vec<S>) -> Self {
        Self { excess, gap: None }
    }

    pub fn with_gap(mut self, x0: &[S]) -> Self {
        assert_eq!(x0.len(), self.excess.len());
        self.gap = Some(self.excess.iter().zip(x0).map(|(&e, &x)| e * x).sum());
        self
    }

    pub fn norm_inf(&self) -> S {
        norm_inf(&self.excess)
    }

    pub fn norm2(&self) -> S {
        norm2(&self.excess)
    }

    pub fn sum(&self) -> S {
        self.excess.iter().copied().sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> S {
        self.excess
            .iter()
            .zip(&other.excess)
            .fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn consensus_weights(&self) -> Vec<S> {
        let u = S::one() / S::from_count(self.excess.len());
        self.excess.iter().map(|&e| e + u).collect()
    }
}

fn minus_uniform<S: Scalar>(pi: &[S]) -> Vec<S> {
    let u = S::one() / S::from_count(pi.len());
    pi.iter().map(|&p| p - u).collect()
}

/// Direct route: stationary distribution of the mean interaction matrix.
pub fn excess_influence_exact<S: Scalar>(net: &SocialNetwork<S>) -> Result<ExcessInfluence<S>> {
    ensure_valid(net)?;
    let pi = stationary(&decompose(net).w_tilde)?.pi;
    Ok(ExcessInfluence::new(minus_uniform(&pi)))
}

/// Passage-time identity over ordered forceful pairs:
/// `sum p_ij alpha_ij ((1-2eps) pi_i + pi_j)(m_ik - m_jk) / (2n^2)`.
/// It needs `pi_bar` itself, so it is a cross-check of the direct route
/// rather than an independent estimator.
pub fn excess_influence_mfpt<S: Scalar>(net: &SocialNetwork<S>) -> Result<ExcessInfluence<S>> {
    let chain = analyze_chain(net)?;
    Ok(mfpt_route(net, &chain))
}

pub(crate) fn mfpt_route<S: Scalar>(net: &SocialNetwork<S>, chain: &ChainAnalysis<S>) -> ExcessInfluence<S> {
    let n = net.n();
    let nn = S::from_count(n);
    let eps = net.epsilon();
    let pi = &chain.consensus.pi;
    let m = &chain.social_passage.m;
    let one_m2e = S::one() - S::two() * eps;
    let mut excess = vec![S::zero(); n];
    for f in net.forceful_links() {
        let (i, j) = (f.target, f.source);
        let w = f.strength * (one_m2e * pi[i] + pi[j]) / (S::two() * nn * nn);
        for (k, e) in excess.iter_mut().enumerate() {
            *e += w * (m[(i, k)] - m[(j, k)]);
        }
    }
    ExcessInfluence::new(excess)
}

/// One undirected edge carrying influence in one or both directions.
#[derive(Clone, Copy, Debug)]
struct ForcefulEdge<S> {
    i: AgentId,
    j: AgentId,
    /// `p_ij alpha_ij / n` and `p_ji alpha_ji / n`.
    a: S,
    b: S,
}

fn forceful_edges<S: Scalar>(net: &SocialNetwork<S>) -> Vec<ForcefulEdge<S>> {
    let n = net.n();
    let nn = S::from_count(n);
    let s = |i: usize, j: usize| net.p(i, j) * net.alpha()[(i, j)];
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (sij, sji) = (s(i, j), s(j, i));
            if sij > S::zero() || sji > S::zero() {
                out.push(ForcefulEdge {
                    i,
                    j,
                    a: sij / nn,
                    b: sji / nn,
                });
            }
        }
    }
    out
}

/// Pieces of the rank-one split `D = sum_e X_e v_e'` with `v_e = e_j - e_i`,
/// evaluated through passage times of `T` (uniform stationary distribution).
struct RankOne<'a, S> {
    edges: Vec<ForcefulEdge<S>>,
    m: &'a Matrix<S>,
    eps: S,
    n: usize,
}

impl<S: Scalar> RankOne<'_, S> {
    /// The two nonzero entries of `X_e`, at `i` and `j`.
    fn x(&self, e: &ForcefulEdge<S>) -> (S, S) {
        let h = S::half();
        let q = h - self.eps;
        (e.a * q - e.b * h, e.a * h - e.b * q)
    }

    /// `v_f' Y y` for `y` supported on `{i, j}`: `(1/n) sum_r y_r (m_kr - m_lr)`.
    fn vy(&self, f: &ForcefulEdge<S>, (at, yi, yj): (usize, S, S), other: usize) -> S {
        let (k, l) = (f.i, f.j);
        let m = self.m;
        (yi * (m[(k, at)] - m[(l, at)]) + yj * (m[(k, other)] - m[(l, other)])) / S::from_count(self.n)
    }

    fn g(&self, f: &ForcefulEdge<S>, e: &ForcefulEdge<S>) -> S {
        let (xi, xj) = self.x(e);
        self.vy(f, (e.i, xi, xj), e.j)
    }

    /// `pi' X_e = (a - b)(1 - eps) / n`.
    fn c0(&self, e: &ForcefulEdge<S>) -> S {
        (e.a - e.b) * (S::one() - self.eps) / S::from_count(self.n)
    }

    /// `v_f' Y e_k`.
    fn row(&self, f: &ForcefulEdge<S>, k: usize) -> S {
        (self.m[(f.i, k)] - self.m[(f.j, k)]) / S::from_count(self.n)
    }
}

fn rank_one<'a, S: Scalar>(net: &SocialNetwork<S>, passage: &'a PassageTimes<S>) -> RankOne<'a, S> {
    RankOne {
        edges: forceful_edges(net),
        m: &passage.m,
        eps: net.epsilon(),
        n: net.n(),
    }
}

fn social_passage<S: Scalar>(net: &SocialNetwork<S>) -> Result<PassageTimes<S>> {
    ensure_valid(net)?;
    let t = decompose(net).t;
    let uniform = vec![S::one() / S::from_count(net.n()); net.n()];
    let fm = fundamental_matrix(&t, &uniform)?;
    Ok(mean_first_passage(&fm.y, &uniform))
}

/// Closed form for vertex-disjoint forceful edges that does not need
/// `pi_bar`. The per-edge denominators `1 - zeta_ij / n^2` are the diagonal
/// of a small coupled system over the forceful edges; the off-diagonal
/// couplings are kept, which makes the result exact for any number of edges.
pub fn excess_influence_disjoint<S: Scalar>(net: &SocialNetwork<S>) -> Result<ExcessInfluence<S>> {
    let passage = social_passage(net)?;
    let r1 = rank_one(net, &passage);
    for (x, e) in r1.edges.iter().enumerate() {
        for f in &r1.edges[x + 1..] {
            if e.i == f.i || e.i == f.j || e.j == f.i || e.j == f.j {
                return Err(Error::OverlappingForcefulEdges {
                    first: (e.i, e.j),
                    second: (f.i, f.j),
                });
            }
        }
    }
    let k = r1.edges.len();
    let n = net.n();
    if k == 0 {
        return Ok(ExcessInfluence::new(vec![S::zero(); n]));
    }
    // c' (I - G) = c0' with G[f][e] = v_f' Y X_e, i.e. (I - G)' c = c0
    let a = Matrix::from_fn(k, k, |e, f| {
        let id = if e == f { S::one() } else { S::zero() };
        id - r1.g(&r1.edges[f], &r1.edges[e])
    });
    let c0: Vec<S> = r1.edges.iter().map(|e| r1.c0(e)).collect();
    let c = a.solve(&c0).map_err(|_| Error::SingularIminusDY)?;
    let excess = (0..n)
        .map(|node| r1.edges.iter().zip(&c).map(|(f, &cf)| cf * r1.row(f, node)).sum())
        .collect();
    Ok(ExcessInfluence::new(excess))
}

/// Per-edge sum `c0_e / (1 - zeta_e / n^2) * v_e' Y` without the couplings
/// between edges. Exact for a single forceful edge; kept to show the size of
/// the coupling terms when there are several.
pub fn disjoint_uncoupled_form<S: Scalar>(net: &SocialNetwork<S>) -> Result<ExcessInfluence<S>> {
    let passage = social_passage(net)?;
    let r1 = rank_one(net, &passage);
    let n = net.n();
    let mut excess = vec![S::zero(); n];
    for e in &r1.edges {
        let w = r1.c0(e) / (S::one() - r1.g(e, e));
        for (node, x) in excess.iter_mut().enumerate() {
            *x += w * r1.row(e, node);
        }
    }
    Ok(ExcessInfluence::new(excess))
}

/// `zeta_ij` for the edge `{i, j}`, so that `G_ee = zeta_ij / n^2`.
pub fn zeta<S: Scalar>(net: &SocialNetwork<S>, passage: &PassageTimes<S>, i: AgentId, j: AgentId) -> S {
    let (pa_ij, pa_ji) = (net.p(i, j) * net.alpha()[(i, j)], net.p(j, i) * net.alpha()[(j, i)]);
    let h = S::half();
    let q = h - net.epsilon();
    let m = &passage.m;
    (h * pa_ij - q * pa_ji) * m[(i, j)] - (q * pa_ij - h * pa_ji) * m[(j, i)]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bridge {
    pub i: AgentId,
    pub j: AgentId,
    /// Component of `i` once the edge is removed, `N(i, j)`.
    pub side_i: Vec<AgentId>,
    pub size_ij: usize,
    pub size_ji: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForcefulEssentialEdge<S> {
    pub influenced: AgentId,
    pub forceful: AgentId,
    /// `p_ij alpha_ij / (p_ij (1 - gamma_ij) + p_ji (1 - gamma_ji))`.
    pub theta: S,
    /// `1 - (theta/n)(|N(i,j)| - (1 - 2 eps)|N(j,i)|)`.
    pub denominator: S,
    /// `|N(i,j)|` on the forceful side, `-|N(j,i)|` on the influenced side.
    pub psi: Vec<i64>,
    pub excess: Vec<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssentialEdgeReport<S> {
    pub bridges: Vec<Bridge>,
    pub forceful: Option<ForcefulEssentialEdge<S>>,
}

fn t_adjacency<S: Scalar>(t: &Matrix<S>) -> Vec<Vec<usize>> {
    let n = t.rows();
    let edges: Vec<(usize, usize)> = t
        .iter()
        .filter(|&(i, j, x)| i < j && x > S::zero())
        .map(|(i, j, _)| (i, j))
        .collect();
    graph::adjacency(n, &edges)
}

fn bridge_of(adj: &[Vec<usize>], i: usize, j: usize) -> Option<Bridge> {
    if !adj[i].contains(&j) {
        return None;
    }
    let seen = graph::reachable(adj, i, Some((i, j)));
    if seen[j] {
        return None;
    }
    let side_i: Vec<usize> = (0..adj.len()).filter(|&k| seen[k]).collect();
    let size_ij = side_i.len();
    Some(Bridge {
        i,
        j,
        side_i,
        size_ij,
        size_ji: adj.len() - size_ij,
    })
}

fn single_forceful_pair<S: Scalar>(net: &SocialNetwork<S>) -> Result<(AgentId, AgentId)> {
    let links = net.forceful_links();
    match links.as_slice() {
        [f] => Ok((f.target, f.source)),
        _ => Err(Error::NotApplicable(format!(
            "needs exactly one forceful ordered pair, found {}",
            links.len()
        ))),
    }
}

fn essential_closed_form<S: Scalar>(net: &SocialNetwork<S>, br: &Bridge) -> ForcefulEssentialEdge<S> {
    let (i, j) = (br.i, br.j);
    let n = net.n();
    let nn = S::from_count(n);
    let (p, g) = (net.meeting(), net.gamma());
    let theta = p[(i, j)] * net.alpha()[(i, j)] / (p[(i, j)] * (S::one() - g[(i, j)]) + p[(j, i)] * (S::one() - g[(j, i)]));
    let eps = net.epsilon();
    let denominator = S::one()
        - theta / nn * (S::from_count(br.size_ij) - (S::one() - S::two() * eps) * S::from_count(br.size_ji));
    let on_i_side: Vec<bool> = {
        let mut v = vec![false; n];
        br.side_i.iter().for_each(|&k| v[k] = true);
        v
    };
    let psi: Vec<i64> = (0..n)
        .map(|k| if on_i_side[k] { -(br.size_ji as i64) } else { br.size_ij as i64 })
        .collect();
    let scale = S::two() * theta * (S::one() - eps) / (nn * nn * denominator);
    let excess = psi.iter().map(|&s| scale * S::lit(s as f64)).collect();
    ForcefulEssentialEdge {
        influenced: i,
        forceful: j,
        theta,
        denominator,
        psi,
        excess,
    }
}

/// Bridges of the social network graph, and the closed form when the only
/// forceful link sits on one of them.
pub fn essential_edges<S: Scalar>(net: &SocialNetwork<S>) -> Result<EssentialEdgeReport<S>> {
    ensure_valid(net)?;
    let t = decompose(net).t;
    let adj = t_adjacency(&t);
    let bridges: Vec<Bridge> = graph::bridges(&adj)
        .into_iter()
        .map(|(u, v)| bridge_of(&adj, u, v).expect("bridge removal disconnects"))
        .collect();
    let forceful = single_forceful_pair(net)
        .ok()
        .and_then(|(i, j)| bridge_of(&adj, i, j))
        .map(|br| essential_closed_form(net, &br));
    Ok(EssentialEdgeReport { bridges, forceful })
}

/// `(m_ij, m_ji) = (|N(i,j)| / T_ij, |N(j,i)| / T_ij)` for a bridge `{i, j}`.
pub fn essential_edge_passage<S: Scalar>(net: &SocialNetwork<S>, i: AgentId, j: AgentId) -> Result<(S, S)> {
    ensure_valid(net)?;
    let n = net.n();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    let t = decompose(net).t;
    let adj = t_adjacency(&t);
    let br = bridge_of(&adj, i, j).ok_or(Error::NotEssential(i, j))?;
    let tij = t[(i, j)];
    Ok((S::from_count(br.size_ij) / tij, S::from_count(br.size_ji) / tij))
}

/// Closed form for a single forceful ordered pair on a bridge; constant on
/// each side of the bridge.
pub fn essential_edge_excess<S: Scalar>(net: &SocialNetwork<S>) -> Result<ExcessInfluence<S>> {
    ensure_valid(net)?;
    let (i, j) = single_forceful_pair(net)?;
    let t = decompose(net).t;
    let adj = t_adjacency(&t);
    let br = bridge_of(&adj, i, j)
        .ok_or_else(|| Error::NotApplicable(format!("forceful edge {{{i}, {j}}} is not a bridge")))?;
    Ok(ExcessInfluence::new(essential_closed_form(net, &br).excess))
}

/// `1/(1 - delta) * sum p alpha / (2n)`; vacuous when `delta` is undefined.
pub fn bound_delta<S: Scalar>(net: &SocialNetwork<S>) -> Result<BoundValue<S>> {
    ensure_valid(net)?;
    let total = net.total_influence();
    match eta_constants(net) {
        Ok(c) => Ok(BoundValue::certified(total / ((S::one() - c.delta) * S::two() * S::from_count(net.n())))),
        Err(Error::DegenerateDelta { .. }) => Ok(BoundValue::vacuous()),
        Err(e) => Err(e),
    }
}

/// Bound on `|E[x_bar] - mean(x(0))|`: the delta bound times the spread
/// `max x(0) - min x(0)`.
pub fn bound_gap<S: Scalar>(net: &SocialNetwork<S>, x0: &[S]) -> Result<BoundValue<S>> {
    let base = bound_delta(net)?;
    let hi = x0.iter().copied().fold(S::neg_infinity(), S::max);
    let lo = x0.iter().copied().fold(S::infinity(), S::min);
    Ok(scale_bound(base, hi - lo))
}

/// The delta bound times `||x(0)||_inf`. Only valid when the entries of
/// `x(0)` share a sign; the forceful dyad with `x(0) = (-1, 1)` breaks it.
pub fn bound_gap_sup_norm<S: Scalar>(net: &SocialNetwork<S>, x0: &[S]) -> Result<BoundValue<S>> {
    Ok(scale_bound(bound_delta(net)?, norm_inf(x0)))
}

fn scale_bound<S: Scalar>(b: BoundValue<S>, k: S) -> BoundValue<S> {
    BoundValue {
        value: b.value.map(|v| v * k),
        ..b
    }
}

/// `1/(1 - lambda_2(T)) * sum p alpha / n` on the 2-norm.
pub fn bound_l2<S: Scalar>(net: &SocialNetwork<S>) -> Result<BoundValue<S>> {
    ensure_valid(net)?;
    let t = decompose(net).t;
    let spec = second_eigenvalue(&t, S::tolerance(1e-9))?;
    if spec.gap <= S::zero() {
        return Ok(BoundValue::vacuous());
    }
    Ok(BoundValue::certified(net.total_influence() / (spec.gap * S::from_count(net.n()))))
}

/// `sum 2 p alpha / n * (1 + log n) / rho` on the inf-norm; certified only
/// when `rho` comes from exact enumeration.
pub fn bound_conductance<S: Scalar>(net: &SocialNetwork<S>, rho: &CutResult<S>) -> BoundValue<S> {
    let n = S::from_count(net.n());
    let v = S::two() * net.total_influence() / n * (S::one() + n.ln()) / rho.normalized;
    BoundValue::with_certification(v, rho.is_exact())
}

/// Commute-time bounds for the endpoints of one forceful edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCommuteBounds<S> {
    pub influenced: AgentId,
    pub forceful: AgentId,
    /// `m_ab + m_ba` from passage times.
    pub commute: S,
    /// `w R_eff(a, b)`.
    pub commute_electrical: S,
    pub relative_cut: S,
    /// `n / c_ab` and `n^2 / c_ab`.
    pub relative_lower: S,
    pub relative_upper: S,
    pub rho_ab: CutResult<S>,
    /// `3 n log n / rho_ab`.
    pub normalized_bound: BoundValue<S>,
    /// `4 (1 + log n) / (rho min pi)`.
    pub global_bound: BoundValue<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapBounds<S> {
    pub actual: S,
    pub bound: BoundValue<S>,
    pub sup_norm_form: BoundValue<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport<S> {
    pub total_influence: S,
    pub delta_bound: BoundValue<S>,
    pub l2_bound: BoundValue<S>,
    pub conductance_bound: BoundValue<S>,
    pub rho: CutResult<S>,
    pub actual_inf: S,
    pub actual_l2: S,
    pub gap: Option<GapBounds<S>>,
    pub pairs: Vec<PairCommuteBounds<S>>,
}

impl<S: Scalar> BoundsReport<S> {
    /// Names of the bounds that fail to cover the actual value.
    pub fn violations(&self, tol: S) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut check = |ok: bool, name| {
            if !ok {
                out.push(name);
            }
        };
        check(self.delta_bound.covers(self.actual_inf, tol), "delta");
        check(self.l2_bound.covers(self.actual_l2, tol), "l2");
        check(self.conductance_bound.covers(self.actual_inf, tol), "conductance");
        if let Some(g) = &self.gap {
            check(g.bound.covers(g.actual.abs(), tol), "gap");
        }
        for p in &self.pairs {
            let rel = tol * p.commute.max(S::one());
            check(p.relative_lower <= p.commute + rel && p.commute <= p.relative_upper + rel, "relative_cut");
            check(p.normalized_bound.covers(p.commute, rel), "normalized_relative_cut");
            check(p.global_bound.covers(p.commute, rel), "global_commute");
        }
        out
    }
}

pub fn bounds_report<S: Scalar>(net: &SocialNetwork<S>, x0: Option<&[S]>, mode: CutMode) -> Result<BoundsReport<S>> {
    let chain = analyze_chain(net)?;
    let excess = ExcessInfluence::new(minus_uniform(&chain.consensus.pi));
    let g = WeightedGraph::from_social(&chain.decomposition.t)?;
    let rho = min_normalized_cut(&g, mode)?;
    let gap = match x0 {
        Some(x) => Some(GapBounds {
            actual: excess.clone().with_gap(x).gap.expect("gap set"),
            bound: bound_gap(net, x)?,
            sup_norm_form: bound_gap_sup_norm(net, x)?,
        }),
        None => None,
    };
    let mut pairs = Vec::new();
    for f in net.forceful_links() {
        let (a, b) = (f.target, f.source);
        let (relative_lower, relative_upper) = commute_bounds_relative(&g, a, b)?;
        let rho_ab = min_normalized_relative_cut(&g, a, b, mode)?;
        pairs.push(PairCommuteBounds {
            influenced: a,
            forceful: b,
            commute: chain.social_passage.commute(a, b),
            commute_electrical: g.commute_time(a, b)?,
            relative_cut: min_relative_cut(&g, a, b)?.raw,
            relative_lower,
            relative_upper,
            normalized_bound: commute_bound_normalized(&g, &rho_ab),
            global_bound: commute_bound_global(&g, &rho),
            rho_ab,
        });
    }
    Ok(BoundsReport {
        total_influence: net.total_influence(),
        delta_bound: bound_delta(net)?,
        l2_bound: bound_l2(net)?,
        conductance_bound: bound_conductance(net, &rho),
        rho,
        actual_inf: excess.norm_inf(),
        actual_l2: excess.norm2(),
        gap,
        pairs,
    })
}
