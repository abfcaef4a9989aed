use std::collections::BTreeSet;

use serde::Serialize;

use super::{min_normalized_cut, restrict, CutMode, WeightedGraph};
use crate::bound::BoundValue;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterStep<S> {
    /// `S_k`, original labels.
    pub subset: Vec<usize>,
    /// Minimum normalized cut value of the restriction to `S_k`.
    pub rho: S,
    /// `S*_k`, the reported side of that cut.
    pub cut_side: Vec<usize>,
    /// `3 n log|S_k| / rho_k`.
    pub bound: S,
    pub separates: bool,
    pub mode: CutMode,
}

/// Check of strict growth of `rho` between consecutive iterations whose cuts
/// share no edge inside the enclosing subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityCheck {
    pub k: usize,
    pub disjoint: bool,
    pub rho_increased: bool,
    /// `!disjoint || rho_increased`.
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterTrace<S> {
    pub a: usize,
    pub b: usize,
    pub steps: Vec<ClusterStep<S>>,
    pub final_bound: BoundValue<S>,
    pub monotonicity: Vec<MonotonicityCheck>,
}

impl<S: Scalar> ClusterTrace<S> {
    pub fn initial_bound(&self) -> S {
        self.steps[0].bound
    }
}

/// Edges of the graph inside `within` that cross the cut of `side`.
fn boundary<S: Scalar>(g: &WeightedGraph<S>, within: &[usize], side: &[usize]) -> BTreeSet<(usize, usize)> {
    let side: BTreeSet<usize> = side.iter().copied().collect();
    let mut out = BTreeSet::new();
    for &i in within {
        for &j in within {
            if i < j && g.weight(i, j) > S::zero() && side.contains(&i) != side.contains(&j) {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Recursive clustering: cut the current subset at its minimum normalized
/// cut, keep the side holding both `a` and `b`, and stop once the cut
/// separates them.
pub fn cluster_bound<S: Scalar>(g: &WeightedGraph<S>, a: usize, b: usize, mode: CutMode) -> Result<ClusterTrace<S>> {
    g.check_pair(a, b)?;
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = S::from_count(g.n());
    let mut subset: Vec<usize> = (0..g.n()).collect();
    let mut steps = Vec::new();
    loop {
        let sub = restrict(g, &subset)?;
        let cut = min_normalized_cut(&sub.graph, mode)?;
        let side = sub.lift(&cut.side);
        let in_side = |v: usize| side.binary_search(&v).is_ok();
        let separates = in_side(a) != in_side(b);
        let size = S::from_count(subset.len());
        steps.push(ClusterStep {
            subset: subset.clone(),
            rho: cut.normalized,
            cut_side: side.clone(),
            bound: S::lit(3.0) * n * size.ln() / cut.normalized,
            separates,
            mode,
        });
        if separates {
            break;
        }
        subset = if in_side(a) {
            side
        } else {
            subset.into_iter().filter(|&v| !in_side(v)).collect()
        };
    }
    let last = steps.last().expect("at least one iteration");
    let final_bound = BoundValue::with_certification(last.bound, mode == CutMode::Exact);

    let mut monotonicity = Vec::new();
    for k in 0..steps.len().saturating_sub(1) {
        let outer = &steps[k].subset;
        let next = &steps[k + 1].subset;
        // the cut after S_{k+1}: S_{k+2} if the trace continues, else S*_{k+1}
        let after = steps.get(k + 2).map_or(&steps[k + 1].cut_side, |s| &s.subset);
        let disjoint = boundary(g, outer, next).is_disjoint(&boundary(g, outer, after));
        let rho_increased = steps[k + 1].rho > steps[k].rho;
        monotonicity.push(MonotonicityCheck {
            k,
            disjoint,
            rho_increased,
            holds: !disjoint || rho_increased,
        });
    }
    Ok(ClusterTrace {
        a,
        b,
        steps,
        final_bound,
        monotonicity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::HubCycleParams;
    use crate::kernel::decompose;
    use crate::network::{generate, GeneratorKind, GeneratorParams};

    fn barbell(n1: usize, n2: usize) -> WeightedGraph<f64> {
        let net = generate::<f64>(&GeneratorKind::Barbell { n1, n2 }, &GeneratorParams::default()).unwrap();
        WeightedGraph::from_social(&decompose(&net).t).unwrap()
    }

    #[test]
    fn in_bell_pair_descends_into_bell() {
        let g = barbell(4, 2);
        let tr = cluster_bound(&g, 0, 1, CutMode::Exact).unwrap();
        assert!(tr.steps.len() >= 2);
        let last = tr.steps.last().unwrap();
        assert!(last.subset.iter().all(|&v| v < 4));
        assert!(tr.final_bound.value.unwrap() < tr.initial_bound());
        assert!(tr.monotonicity.iter().all(|c| c.holds));
        for w in tr.steps.windows(2) {
            assert!(w[1].subset.len() < w[0].subset.len());
        }
    }

    #[test]
    fn separated_pair_stops_immediately() {
        let g = barbell(4, 0);
        let tr = cluster_bound(&g, 0, 7, CutMode::Exact).unwrap();
        assert_eq!(tr.steps.len(), 1);
        let n = 8.0_f64;
        assert!((tr.final_bound.value.unwrap() - 3.0 * n * n.ln() / tr.steps[0].rho).abs() < 1e-9);
    }

    #[test]
    fn hub_and_cycle_is_not_monotone() {
        let p = HubCycleParams {
            clusters: 4,
            cluster_size: 2,
            hub_size: 8,
            hub_weight: 0.1,
            cluster_weight: 0.5,
            h: 0.08,
            r: 0.06,
        };
        let g = WeightedGraph::<f64>::hub_and_cycle(&p).unwrap();
        let tr = cluster_bound(&g, 8, 12, CutMode::Exact).unwrap();
        assert_eq!(tr.steps.len(), 2);
        assert!(tr.steps[1].rho < tr.steps[0].rho);
        assert!((tr.steps[0].rho - p.h).abs() < 1e-12);
        assert!((tr.steps[1].rho - p.r).abs() < 1e-12);
    }
}
