//! Single-meeting update matrices, the mean interaction matrix and its split
//! into a symmetric social part `T` and a zero-row-sum influence part `D`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::{meeting_digraph, AgentId, SocialNetwork};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UpdateKind {
    Average(AgentId, AgentId),
    /// `Influence(i, j)`: `j` pulls `i` towards its belief.
    Influence(AgentId, AgentId),
    Identity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpdateMatrix<S> {
    pub kind: UpdateKind,
    pub matrix: Matrix<S>,
}

fn check_pair(i: AgentId, j: AgentId, n: usize) -> Result<()> {
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    if i == j {
        return Err(Error::SameAgent(i));
    }
    Ok(())
}

/// `I - (e_i - e_j)(e_i - e_j)'/2`.
pub fn averaging_matrix<S: Scalar>(i: AgentId, j: AgentId, n: usize) -> Result<UpdateMatrix<S>> {
    check_pair(i, j, n)?;
    let mut m = Matrix::identity(n);
    let h = S::half();
    m[(i, i)] = h;
    m[(j, j)] = h;
    m[(i, j)] = h;
    m[(j, i)] = h;
    Ok(UpdateMatrix {
        kind: UpdateKind::Average(i, j),
        matrix: m,
    })
}

/// `I - (1 - eps) e_i (e_i - e_j)'`.
pub fn influence_update_matrix<S: Scalar>(i: AgentId, j: AgentId, n: usize, epsilon: S) -> Result<UpdateMatrix<S>> {
    check_pair(i, j, n)?;
    if !(epsilon > S::zero() && epsilon <= S::half()) {
        return Err(Error::BadEpsilon(epsilon.as_f64()));
    }
    let mut m = Matrix::identity(n);
    m[(i, i)] = epsilon;
    m[(i, j)] = S::one() - epsilon;
    Ok(UpdateMatrix {
        kind: UpdateKind::Influence(i, j),
        matrix: m,
    })
}

/// Expected update matrix from the entry-wise closed form.
pub fn mean_interaction_matrix<S: Scalar>(net: &SocialNetwork<S>) -> Matrix<S> {
    let n = net.n();
    let nn = S::from_count(n);
    let eps = net.epsilon();
    let (p, a, b, g) = (net.meeting(), net.alpha(), net.beta(), net.gamma());
    let h = S::half();
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        let mut leave = S::zero();
        let mut stay = S::zero();
        for j in 0..n {
            if j == i {
                continue;
            }
            let (pij, pji) = (p[(i, j)], p[(j, i)]);
            leave += pij + pji;
            stay += pij * (b[(i, j)] * h + a[(i, j)] * eps + g[(i, j)]);
            stay += pji * (b[(j, i)] * h + a[(j, i)] + g[(j, i)]);
            w[(i, j)] = (pij * (b[(i, j)] * h + a[(i, j)] * (S::one() - eps)) + pji * b[(j, i)] * h) / nn;
        }
        w[(i, i)] = S::one() - leave / nn + stay / nn;
    }
    w
}

/// `(1/n) sum_{i,j} p_ij [beta A_ij + alpha J_ij + gamma I]`, summed event by
/// event. Slow; kept as an independent check of the closed form.
pub fn mean_interaction_by_events<S: Scalar>(net: &SocialNetwork<S>) -> Matrix<S> {
    let n = net.n();
    let mut acc = Matrix::zeros(n, n);
    let eye = Matrix::identity(n);
    for (i, j) in net.links() {
        let wgt = net.p(i, j) / S::from_count(n);
        let avg = averaging_matrix(i, j, n).expect("link endpoints differ").matrix;
        let inf = influence_update_matrix(i, j, n, net.epsilon()).expect("valid pair").matrix;
        let term = &(&avg.scale(net.beta()[(i, j)]) + &inf.scale(net.alpha()[(i, j)])) + &eye.scale(net.gamma()[(i, j)]);
        acc = &acc + &term.scale(wgt);
    }
    // slots where nobody is picked for a supported pair act as the identity
    let used: S = net.links().map(|(i, j)| net.p(i, j)).sum::<S>() / S::from_count(n);
    &acc + &eye.scale(S::one() - used)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "S: Scalar + Serialize"))]
pub struct InteractionDecomposition<S> {
    pub w_tilde: Matrix<S>,
    pub t: Matrix<S>,
    pub d: Matrix<S>,
}

/// Social network matrix `T` from its entry formulas.
pub fn social_matrix<S: Scalar>(net: &SocialNetwork<S>) -> Matrix<S> {
    let n = net.n();
    let nn = S::from_count(n);
    let (p, g) = (net.meeting(), net.gamma());
    let h = S::half();
    let mut t = Matrix::zeros(n, n);
    for i in 0..n {
        let mut leave = S::zero();
        let mut stay = S::zero();
        for j in 0..n {
            if j == i {
                continue;
            }
            let (pij, pji) = (p[(i, j)], p[(j, i)]);
            let (gij, gji) = (g[(i, j)], g[(j, i)]);
            leave += pij + pji;
            stay += pij * ((S::one() - gij) * h + gij) + pji * ((S::one() - gji) * h + gji);
            t[(i, j)] = (pij * (S::one() - gij) * h + pji * (S::one() - gji) * h) / nn;
        }
        t[(i, i)] = S::one() - leave / nn + stay / nn;
    }
    t
}

pub fn decompose<S: Scalar>(net: &SocialNetwork<S>) -> InteractionDecomposition<S> {
    let w_tilde = mean_interaction_matrix(net);
    let t = social_matrix(net);
    let d = &w_tilde - &t;
    InteractionDecomposition { w_tilde, t, d }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaConstants<S> {
    pub eta: S,
    pub chi: S,
    pub diameter: usize,
    /// `(1 - n chi^d)^{1/d}`.
    pub delta: S,
}

pub fn eta_constants<S: Scalar>(net: &SocialNetwork<S>) -> Result<EtaConstants<S>> {
    let dg = meeting_digraph(net)?;
    let dec = decompose(net);
    let n = net.n();
    let mut eta = (0..n).map(|i| dec.w_tilde[(i, i)]).fold(S::infinity(), S::min);
    let mut chi = S::infinity();
    for &(i, j) in &dg.links {
        eta = eta.min(dec.w_tilde[(i, j)]);
        chi = chi.min(dec.t[(i, j)]);
    }
    let d = dg.diameter;
    let inv_d = S::one() / S::from_count(d);
    let x = S::from_count(n) * chi.powi(d as i32);
    let slack = S::lit(1e-12).max(S::epsilon() * S::lit(16.0));
    let delta = if x <= S::one() {
        (S::one() - x).powf(inv_d)
    } else if x - S::one() <= slack {
        S::zero()
    } else {
        return Err(Error::DegenerateDelta { value: x.as_f64() });
    };
    Ok(EtaConstants { eta, chi, diameter: d, delta })
}
