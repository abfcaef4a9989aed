use rayon::prelude::*;

use super::{canonical_side, cut_order, CutMode, CutResult, WeightedGraph};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest graph handled by exhaustive enumeration (2^21 cuts).
pub const EXACT_LIMIT: usize = 22;

#[derive(Clone, Copy)]
enum Objective {
    Normalized,
    Raw,
}

struct Best<S> {
    value: S,
    side: Vec<usize>,
    mask: Vec<bool>,
}

fn value_of<S: Scalar>(obj: Objective, total: S, cut: S, vs: S) -> S {
    match obj {
        Objective::Normalized => total * cut / (vs * (total - vs)),
        Objective::Raw => cut,
    }
}

/// Exhaustive search. `pair = Some((a, b))` fixes `a` inside and `b`
/// outside; otherwise node 0 is fixed inside and the canonical side is
/// reported.
fn search<S: Scalar>(g: &WeightedGraph<S>, pair: Option<(usize, usize)>, obj: Objective) -> Result<Vec<bool>> {
    let n = g.n();
    if n > EXACT_LIMIT {
        return Err(Error::TooLargeForExact { n, limit: EXACT_LIMIT });
    }
    let (fixed_in, fixed_out) = match pair {
        Some((a, b)) => (a, Some(b)),
        None => (0, None),
    };
    let free: Vec<usize> = (0..n).filter(|&v| v != fixed_in && Some(v) != fixed_out).collect();
    let m = free.len();
    let high = m.min(6);
    let low = m - high;
    let vol = g.volumes();
    let deg: Vec<S> = (0..n).map(|v| vol[v] - g.w[(v, v)]).collect();
    let total = g.total();
    let slack = S::epsilon() * S::lit(1e4);

    let exact_candidate = |mask: &[bool]| -> (S, Vec<usize>, Vec<bool>) {
        let rep = match pair {
            Some(_) => mask.to_vec(),
            None => canonical_side(mask),
        };
        let cut = g.cut_value(&rep);
        let vs = g.volume_of(&rep);
        let side = (0..n).filter(|&i| rep[i]).collect();
        (value_of(obj, total, cut, vs), side, rep)
    };

    let chunks: Vec<Option<Best<S>>> = (0..1usize << high)
        .into_par_iter()
        .map(|chunk| {
            let mut in_s = vec![false; n];
            in_s[fixed_in] = true;
            for h in 0..high {
                if chunk >> h & 1 == 1 {
                    in_s[free[low + h]] = true;
                }
            }
            let mut cut = g.cut_value(&in_s);
            let mut vs = g.volume_of(&in_s);
            let mut count = in_s.iter().filter(|&&x| x).count();
            let mut best: Option<Best<S>> = None;
            for i in 0..1usize << low {
                if i > 0 {
                    let v = free[i.trailing_zeros() as usize];
                    let in_w: S = (0..n).filter(|&u| u != v && in_s[u]).map(|u| g.w[(u, v)]).sum();
                    let delta = deg[v] - S::two() * in_w;
                    if in_s[v] {
                        cut -= delta;
                        vs -= vol[v];
                        count -= 1;
                    } else {
                        cut += delta;
                        vs += vol[v];
                        count += 1;
                    }
                    in_s[v] = !in_s[v];
                }
                if count == n {
                    continue;
                }
                let approx = value_of(obj, total, cut, vs);
                let promising = match &best {
                    None => true,
                    Some(b) => approx <= b.value + slack * b.value.abs().max(S::one()),
                };
                if promising {
                    let (value, side, mask) = exact_candidate(&in_s);
                    let better = match &best {
                        None => true,
                        Some(b) => cut_order(value, &side, b.value, &b.side).is_lt(),
                    };
                    if better {
                        best = Some(Best { value, side, mask });
                    }
                }
            }
            best
        })
        .collect();
    let best = chunks
        .into_iter()
        .flatten()
        .reduce(|x, y| if cut_order(y.value, &y.side, x.value, &x.side).is_lt() { y } else { x })
        .ok_or_else(|| Error::BadParams("no admissible cut".into()))?;
    Ok(best.mask)
}

pub(super) fn min_normalized<S: Scalar>(g: &WeightedGraph<S>, pair: Option<(usize, usize)>) -> Result<Vec<bool>> {
    search(g, pair, Objective::Normalized)
}

/// Brute-force minimum relative cut `c_ab`; the oracle for max-flow.
pub fn min_relative_cut_enumerated<S: Scalar>(g: &WeightedGraph<S>, a: usize, b: usize) -> Result<CutResult<S>> {
    g.check_pair(a, b)?;
    let mask = search(g, Some((a, b)), Objective::Raw)?;
    Ok(CutResult::build(g, &mask, CutMode::Exact))
}
