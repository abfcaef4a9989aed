//! Finite Markov chain machinery: stationary distributions, the fundamental
//! matrix, passage times, spectra, stationary perturbation and the
//! electrical route to commute times.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph;
use crate::linalg::{norm_inf, symmetric_eigen, Lu, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryDistribution<S> {
    pub pi: Vec<S>,
    /// `||pi' Z - pi'||_inf`.
    pub residual: S,
}

fn residual<S: Scalar>(z: &Matrix<S>, pi: &[S]) -> S {
    let left = z.vec_mul(pi);
    left.iter().zip(pi).fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs()))
}

type Bits = Vec<u64>;

fn bool_square(m: &[Bits], words: usize) -> Vec<Bits> {
    m.iter()
        .map(|row| {
            let mut out = vec![0u64; words];
            for (w, &chunk) in row.iter().enumerate() {
                let mut bits = chunk;
                while bits != 0 {
                    let k = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    for (o, &x) in out.iter_mut().zip(&m[k]) {
                        *o |= x;
                    }
                }
            }
            out
        })
        .collect()
}

/// Smallest power of two `k` with `Z^k > 0` entrywise. Squares the boolean
/// pattern until it is full or passes the Wielandt bound `(n-1)^2 + 1`.
pub fn primitivity_exponent<S: Scalar>(z: &Matrix<S>) -> Result<usize> {
    let n = z.rows();
    let words = n.div_ceil(64);
    let full: Bits = (0..words)
        .map(|w| {
            let rem = n - w * 64;
            if rem >= 64 { u64::MAX } else { (1u64 << rem) - 1 }
        })
        .collect();
    let mut pat: Vec<Bits> = (0..n)
        .map(|i| {
            let mut row = vec![0u64; words];
            for j in 0..n {
                if z[(i, j)] > S::zero() {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    let bound = (n - 1) * (n - 1) + 1;
    let mut k = 1;
    loop {
        if pat.iter().all(|r| *r == full) {
            return Ok(k);
        }
        if k >= bound {
            return Err(Error::NotPrimitive { exponent: k });
        }
        pat = bool_square(&pat, words);
        k *= 2;
    }
}

/// Left fixed point of a primitive row-stochastic `Z`, by a direct solve of
/// `(Z' - I) pi = 0` with one equation replaced by `sum pi = 1`.
pub fn stationary<S: Scalar>(z: &Matrix<S>) -> Result<StationaryDistribution<S>> {
    assert!(z.is_square());
    primitivity_exponent(z)?;
    let n = z.rows();
    let mut a = Matrix::from_fn(n, n, |i, j| z[(j, i)] - if i == j { S::one() } else { S::zero() });
    for j in 0..n {
        a[(n - 1, j)] = S::one();
    }
    let mut rhs = vec![S::zero(); n];
    rhs[n - 1] = S::one();
    let mut pi = Lu::factor(&a)?.solve(&rhs);
    let total: S = pi.iter().copied().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    let residual = residual(z, &pi);
    Ok(StationaryDistribution { pi, residual })
}

/// Power iteration from the uniform vector; the secondary oracle.
pub fn stationary_power<S: Scalar>(z: &Matrix<S>, tol: S, max_iter: usize) -> Result<StationaryDistribution<S>> {
    let n = z.rows();
    let mut pi = vec![S::one() / S::from_count(n); n];
    for _ in 0..max_iter {
        let next = z.vec_mul(&pi);
        let change = next.iter().zip(&pi).fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        pi = next;
        if change <= tol {
            let residual = residual(z, &pi);
            return Ok(StationaryDistribution { pi, residual });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct FundamentalMatrix<S> {
    pub y: Matrix<S>,
    pub z: Matrix<S>,
    pub pi: Vec<S>,
}

/// `Y = (I - Z + e pi')^{-1} - e pi'`.
pub fn fundamental_matrix<S: Scalar>(z: &Matrix<S>, pi: &[S]) -> Result<FundamentalMatrix<S>> {
    let n = z.rows();
    let a = Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { S::one() } else { S::zero() };
        id - z[(i, j)] + pi[j]
    });
    let inv = a.inverse()?;
    let y = Matrix::from_fn(n, n, |i, j| inv[(i, j)] - pi[j]);
    Ok(FundamentalMatrix {
        y,
        z: z.clone(),
        pi: pi.to_vec(),
    })
}

/// Truncated `sum_k (Z^k - e pi')`, stopping once `||Z^K - e pi'||_inf <= tol`.
pub fn fundamental_matrix_series<S: Scalar>(z: &Matrix<S>, pi: &[S], tol: S, max_terms: usize) -> Result<Matrix<S>> {
    let n = z.rows();
    let limit = Matrix::from_fn(n, n, |_, j| pi[j]);
    let mut power = Matrix::identity(n);
    let mut acc = Matrix::zeros(n, n);
    for _ in 0..max_terms {
        let term = &power - &limit;
        if term.norm_inf() <= tol {
            return Ok(acc);
        }
        acc = &acc + &term;
        power = power.matmul(z);
    }
    Err(Error::NoConvergence { iterations: max_terms })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct PassageTimes<S> {
    /// `m[(i, j)]`: expected steps from `i` to first reach `j`; zero on the diagonal.
    pub m: Matrix<S>,
    /// Mean return times `1 / pi_i`.
    pub return_times: Vec<S>,
}

impl<S: Scalar> PassageTimes<S> {
    pub fn commute(&self, a: usize, b: usize) -> S {
        self.m[(a, b)] + self.m[(b, a)]
    }
}

/// `m_ij = (Y_jj - Y_ij) / pi_j`.
pub fn mean_first_passage<S: Scalar>(y: &Matrix<S>, pi: &[S]) -> PassageTimes<S> {
    let n = y.rows();
    let m = Matrix::from_fn(n, n, |i, j| if i == j { S::zero() } else { (y[(j, j)] - y[(i, j)]) / pi[j] });
    PassageTimes {
        m,
        return_times: pi.iter().map(|&p| S::one() / p).collect(),
    }
}

/// Hitting times by making each target absorbing and solving
/// `(I - Z_{-j}) m = 1`.
pub fn mean_first_passage_absorbing<S: Scalar>(z: &Matrix<S>) -> Result<Matrix<S>> {
    let n = z.rows();
    let mut out = Matrix::zeros(n, n);
    for j in 0..n {
        let idx: Vec<usize> = (0..n).filter(|&k| k != j).collect();
        let a = Matrix::from_fn(n - 1, n - 1, |r, c| {
            let id = if r == c { S::one() } else { S::zero() };
            id - z[(idx[r], idx[c])]
        });
        let m = a.solve(&vec![S::one(); n - 1])?;
        for (r, &i) in idx.iter().enumerate() {
            out[(i, j)] = m[r];
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralInfo<S> {
    /// Sorted descending.
    pub eigenvalues: Vec<S>,
    pub lambda2: S,
    pub gap: S,
}

pub fn second_eigenvalue<S: Scalar>(t: &Matrix<S>, tol: S) -> Result<SpectralInfo<S>> {
    let eig = symmetric_eigen(t, tol)?;
    let lambda2 = eig.values.get(1).copied().unwrap_or(S::zero());
    Ok(SpectralInfo {
        gap: S::one() - lambda2,
        lambda2,
        eigenvalues: eig.values,
    })
}

/// Stationary distribution of `T + D` from the perturbation identity
/// `rho' = pi' D Y (I - D Y)^{-1}`, with `pi` stationary for `T` and `Y` its
/// fundamental matrix. Residual is measured against `T + D`.
pub fn perturbed_stationary<S: Scalar>(t: &Matrix<S>, d: &Matrix<S>) -> Result<StationaryDistribution<S>> {
    let base = stationary(t)?;
    let fm = fundamental_matrix(t, &base.pi)?;
    let n = t.rows();
    let dy = d.matmul(&fm.y);
    // (I - DY)' rho = (DY)' pi
    let a = Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { S::one() } else { S::zero() };
        id - dy[(j, i)]
    });
    let rhs = dy.vec_mul(&base.pi);
    let rho = match Lu::factor(&a) {
        Ok(lu) => lu.solve(&rhs),
        Err(Error::SingularSystem) => return Err(Error::SingularIminusDY),
        Err(e) => return Err(e),
    };
    let mut pi: Vec<S> = base.pi.iter().zip(&rho).map(|(&p, &r)| p + r).collect();
    let total: S = pi.iter().copied().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    let z = t + d;
    let residual = residual(&z, &pi);
    Ok(StationaryDistribution { pi, residual })
}

/// Commute time `w R_eff(a, b)` of the random walk on symmetric weights `w`
/// (self-loops included in `w` but not in the resistance network).
pub fn commute_time_electrical<S: Scalar>(w: &Matrix<S>, a: usize, b: usize) -> Result<S> {
    let n = w.rows();
    for idx in [a, b] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    if a == b {
        return Err(Error::SameAgent(a));
    }
    let edges: Vec<(usize, usize)> = w
        .iter()
        .filter(|&(i, j, x)| i < j && x > S::zero())
        .map(|(i, j, _)| (i, j))
        .collect();
    if !graph::is_connected(n, &edges) {
        return Err(Error::DisconnectedGraph);
    }
    let total: S = w.iter().map(|(_, _, x)| x).sum();
    // Laplacian with node b grounded
    let idx: Vec<usize> = (0..n).filter(|&k| k != b).collect();
    let lap = Matrix::from_fn(n - 1, n - 1, |r, c| {
        let (i, j) = (idx[r], idx[c]);
        if i == j {
            (0..n).filter(|&k| k != i).map(|k| w[(i, k)]).sum()
        } else {
            -w[(i, j)]
        }
    });
    let mut current = vec![S::zero(); n - 1];
    let ra = idx.iter().position(|&k| k == a).expect("a differs from b");
    current[ra] = S::one();
    let phi = lap.solve(&current)?;
    Ok(total * phi[ra])
}

/// Largest deviation of `sum_j pi_j m_ij` across starting states; zero for a
/// consistent passage-time matrix.
pub fn kemeny_spread<S: Scalar>(pt: &PassageTimes<S>, pi: &[S]) -> S {
    let n = pi.len();
    let k: Vec<S> = (0..n).map(|i| (0..n).map(|j| pi[j] * pt.m[(i, j)]).sum()).collect();
    let lo = k.iter().copied().fold(S::infinity(), S::min);
    let hi = k.iter().copied().fold(S::neg_infinity(), S::max);
    hi - lo
}

/// `||v||_inf` of `pi - e/n`.
pub fn distance_from_uniform<S: Scalar>(pi: &[S]) -> S {
    let u = S::one() / S::from_count(pi.len());
    norm_inf(&pi.iter().map(|&p| p - u).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::decompose;
    use crate::network::{generate, EdgeSpec, GeneratorKind, GeneratorParams, SocialNetwork};

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    fn net(kind: GeneratorKind) -> SocialNetwork<f64> {
        generate(&kind, &GeneratorParams::default()).unwrap()
    }

    fn forceful_dyad() -> SocialNetwork<f64> {
        let mut e = EdgeSpec::averaging(0, 1, 1.0);
        e.alpha = 1.0;
        e.beta = 0.0;
        SocialNetwork::from_edges(2, 0.5, &[e, EdgeSpec::averaging(1, 0, 1.0)]).unwrap()
    }

    #[test]
    fn stationary_examples() {
        let s = stationary(&m(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap();
        assert_eq!(s.pi, vec![0.5, 0.5]);
        let s = stationary(&m(&[&[0.5, 0.5], &[0.25, 0.75]])).unwrap();
        assert!((s.pi[0] - 1.0 / 3.0).abs() < 1e-15 && (s.pi[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!(s.residual < 1e-15);
        let t = decompose(&net(GeneratorKind::Barbell { n1: 4, n2: 3 })).t;
        let s = stationary(&t).unwrap();
        assert!(s.pi.iter().all(|p| (p - 1.0 / 11.0).abs() < 1e-12));
    }

    #[test]
    fn power_iteration_agrees() {
        let z = decompose(&forceful_dyad()).w_tilde;
        let a = stationary(&z).unwrap();
        let b = stationary_power(&z, 1e-15, 10_000).unwrap();
        assert!(a.pi.iter().zip(&b.pi).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn periodic_chain_is_not_primitive() {
        let z = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(stationary(&z), Err(Error::NotPrimitive { .. })));
        let cyc = m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        assert!(primitivity_exponent(&cyc).is_err());
    }

    #[test]
    fn dyad_fundamental_matrix_and_passage() {
        let t = m(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let fm = fundamental_matrix(&t, &[0.5, 0.5]).unwrap();
        assert!(fm.y.max_abs_diff(&m(&[&[0.5, -0.5], &[-0.5, 0.5]])) < 1e-15);
        let pt = mean_first_passage(&fm.y, &fm.pi);
        assert!((pt.m[(0, 1)] - 2.0).abs() < 1e-14);
        assert_eq!(pt.m[(0, 0)], 0.0);
        assert_eq!(pt.return_times, vec![2.0, 2.0]);
    }

    #[test]
    fn ring_fundamental_matches_series() {
        let t = decompose(&net(GeneratorKind::Ring { n: 3 })).t;
        let pi = stationary(&t).unwrap().pi;
        let fm = fundamental_matrix(&t, &pi).unwrap();
        let series = fundamental_matrix_series(&t, &pi, 1e-13, 10_000).unwrap();
        assert!(fm.y.max_abs_diff(&series) < 1e-8);
        assert!(fm.y.row_sums().iter().all(|s| s.abs() < 1e-10));
    }

    #[test]
    fn passage_times_match_absorbing_oracle_and_kemeny() {
        let t = decompose(&net(GeneratorKind::BridgedClusters { sizes: vec![3, 4] })).t;
        let pi = stationary(&t).unwrap().pi;
        let fm = fundamental_matrix(&t, &pi).unwrap();
        let pt = mean_first_passage(&fm.y, &pi);
        let oracle = mean_first_passage_absorbing(&t).unwrap();
        assert!(pt.m.max_abs_diff(&oracle) < 1e-8);
        assert!(kemeny_spread(&pt, &pi) < 1e-8);
        // across the bridge is slower than any within-cluster passage
        let cross = pt.m[(0, 6)];
        for (i, j) in [(0, 1), (1, 2), (3, 4), (5, 6)] {
            assert!(cross > pt.m[(i, j)]);
        }
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    assert!(pt.m[(i, k)] <= pt.m[(i, j)] + pt.m[(j, k)] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn spectra() {
        let s = second_eigenvalue(&m(&[&[0.5, 0.5], &[0.5, 0.5]]), 1e-12).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14 && s.lambda2.abs() < 1e-14);
        let t = decompose(&net(GeneratorKind::Complete { n: 4 })).t;
        let s = second_eigenvalue(&t, 1e-12).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-10);
        assert!(s.lambda2 < 1.0);
        let base = net(GeneratorKind::Barbell { n1: 3, n2: 1 });
        let p = base.permuted(&[6, 2, 0, 4, 1, 5, 3]);
        let a = second_eigenvalue(&decompose(&base).t, 1e-12).unwrap();
        let b = second_eigenvalue(&decompose(&p).t, 1e-12).unwrap();
        assert!(a.eigenvalues.iter().zip(&b.eigenvalues).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn perturbation_identity() {
        let dec = decompose(&net(GeneratorKind::Ring { n: 5 }));
        let s = perturbed_stationary(&dec.t, &dec.d).unwrap();
        assert!(s.pi.iter().all(|p| (p - 0.2).abs() < 1e-14));
        let dec = decompose(&forceful_dyad());
        let s = perturbed_stationary(&dec.t, &dec.d).unwrap();
        assert!((s.pi[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn electrical_commute_times() {
        let t = m(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!((commute_time_electrical(&t, 0, 1).unwrap() - 4.0).abs() < 1e-14);
        let t = decompose(&net(GeneratorKind::Ring { n: 4 })).t;
        let adj = commute_time_electrical(&t, 0, 1).unwrap();
        let opp = commute_time_electrical(&t, 0, 2).unwrap();
        assert!(opp > adj);
        let pt = mean_first_passage_absorbing(&t).unwrap();
        assert!((opp - pt[(0, 2)] - pt[(2, 0)]).abs() < 1e-8);
    }

    #[test]
    fn parallel_paths_shorten_commute() {
        // a=0, b=3; one path 0-1-3, and a second path 0-2-3
        let w = |with_second: bool| {
            let mut w = Matrix::zeros(4, 4);
            let mut link = |i: usize, j: usize| {
                w[(i, j)] = 0.25;
                w[(j, i)] = 0.25;
            };
            link(0, 1);
            link(1, 3);
            if with_second {
                link(0, 2);
                link(2, 3);
            }
            for i in 0..4 {
                let off: f64 = (0..4).filter(|&k| k != i).map(|k| w[(i, k)]).sum();
                w[(i, i)] = 1.0 - off;
            }
            w
        };
        let single = commute_time_electrical(&w(false), 0, 3);
        assert!(matches!(single, Err(Error::DisconnectedGraph)));
        let both = commute_time_electrical(&w(true), 0, 3).unwrap();
        // the same single path on three nodes
        let mut p = Matrix::zeros(3, 3);
        for (i, j) in [(0, 1), (1, 2)] {
            p[(i, j)] = 0.25;
            p[(j, i)] = 0.25;
        }
        for i in 0..3 {
            let off: f64 = (0..3).filter(|&k| k != i).map(|k| p[(i, k)]).sum();
            p[(i, i)] = 1.0 - off;
        }
        // normalize per unit total weight: compare resistances
        let r_both = both / 4.0;
        let r_single = commute_time_electrical(&p, 0, 2).unwrap() / 3.0;
        assert!(r_both < r_single);
    }
}
