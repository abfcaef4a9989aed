use super::{canonical_side, cut_order, WeightedGraph};
use crate::error::Result;
use crate::linalg::{norm2, symmetric_eigen, Matrix};
use crate::scalar::Scalar;

const DENSE_EIGEN_LIMIT: usize = 200;

/// Second eigenvector of `D^{-1/2} W D^{-1/2}`.
fn fiedler<S: Scalar>(g: &WeightedGraph<S>) -> Result<Vec<S>> {
    let n = g.n();
    let sq: Vec<S> = g.volumes().into_iter().map(|v| v.sqrt()).collect();
    let m = Matrix::from_fn(n, n, |i, j| g.w[(i, j)] / (sq[i] * sq[j]));
    if n <= DENSE_EIGEN_LIMIT {
        let eig = symmetric_eigen(&m, S::tolerance(1e-9))?;
        return Ok((0..n).map(|i| eig.vectors[(i, 1)]).collect());
    }
    // power iteration on (M + I)/2 with the top eigenvector sqrt(d) deflated
    let top_norm = norm2(&sq);
    let top: Vec<S> = sq.iter().map(|&x| x / top_norm).collect();
    let mut x: Vec<S> = (0..n).map(|i| S::from_count(i) - S::from_count(n) / S::two()).collect();
    for _ in 0..20_000 {
        let dot: S = x.iter().zip(&top).map(|(&a, &b)| a * b).sum();
        x.iter_mut().zip(&top).for_each(|(a, &b)| *a -= dot * b);
        let nx = norm2(&x);
        x.iter_mut().for_each(|a| *a /= nx);
        let mx = m.mul_vec(&x);
        let next: Vec<S> = mx.iter().zip(&x).map(|(&a, &b)| (a + b) * S::half()).collect();
        let change = next.iter().zip(&x).map(|(&a, &b)| (a / norm2(&next) - b).abs()).fold(S::zero(), S::max);
        x = next;
        if change < S::tolerance(1e-12) {
            break;
        }
    }
    let nx = norm2(&x);
    Ok(x.into_iter().map(|a| a / nx).collect())
}

/// Spectral sweep over prefixes of the embedding order, then one pass of
/// single-node moves. Returns a cut side; relative cuts keep `a` in and `b`
/// out.
pub(super) fn sweep<S: Scalar>(g: &WeightedGraph<S>, pair: Option<(usize, usize)>) -> Result<Vec<bool>> {
    let n = g.n();
    let vol = g.volumes();
    let u = fiedler(g)?;
    let f: Vec<S> = (0..n).map(|i| u[i] / vol[i].sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| f[x].partial_cmp(&f[y]).unwrap_or(std::cmp::Ordering::Equal).then(x.cmp(&y)));
    if let Some((a, b)) = pair {
        let pa = order.iter().position(|&v| v == a).unwrap();
        let pb = order.iter().position(|&v| v == b).unwrap();
        if pa > pb {
            order.reverse();
        }
    }
    let admissible = |mask: &[bool]| {
        let k = mask.iter().filter(|&&x| x).count();
        k > 0 && k < n && pair.is_none_or(|(a, b)| mask[a] && !mask[b])
    };
    let rep = |mask: &[bool]| if pair.is_some() { mask.to_vec() } else { canonical_side(mask) };
    let score = |mask: &[bool]| -> (S, Vec<usize>) {
        let r = rep(mask);
        (g.normalized_cut(&r), (0..n).filter(|&i| r[i]).collect())
    };

    let mut mask = vec![false; n];
    let mut best: Option<(S, Vec<usize>, Vec<bool>)> = None;
    for &v in &order[..n - 1] {
        mask[v] = true;
        if !admissible(&mask) {
            continue;
        }
        let (val, side) = score(&mask);
        if best.as_ref().is_none_or(|(bv, bs, _)| cut_order(val, &side, *bv, bs).is_lt()) {
            best = Some((val, side, mask.clone()));
        }
    }
    let (mut val, _, mut mask) = best.expect("some prefix separates the pair");
    for v in 0..n {
        if pair.is_some_and(|(a, b)| v == a || v == b) {
            continue;
        }
        mask[v] = !mask[v];
        if admissible(&mask) {
            let cand = g.normalized_cut(&mask);
            if cand < val * (S::one() - S::lit(1e-12)) {
                val = cand;
                continue;
            }
        }
        mask[v] = !mask[v];
    }
    Ok(rep(&mask))
}
