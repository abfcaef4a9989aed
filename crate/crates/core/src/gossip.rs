//! Event-driven Monte Carlo of the asynchronous pairwise update process.
//!
//! Time is counted in meeting slots. Each slot picks an initiator uniformly,
//! a partner from the initiator's row of the meeting matrix, then one of
//! average / influence / disagree. Updates touch two entries and never build
//! the update matrix.
//!
//! Every trial draws from its own ChaCha8 stream: the key is the master seed
//! and the stream id is `(h << 40) | trial`, where `h` is the unit initial
//! condition (0 for plain runs). Results therefore do not depend on how
//! rayon schedules the trials.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{ensure_valid, AgentId, SocialNetwork};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Average,
    /// The partner pulls the initiator; the partner keeps its belief.
    Influence,
    Disagree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeetingEvent {
    pub slot: u64,
    pub initiator: AgentId,
    pub partner: AgentId,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeliefState<S> {
    pub x: Vec<S>,
    /// Events applied so far.
    pub k: u64,
    /// `max x - min x`.
    pub spread: S,
}

fn spread_of<S: Scalar>(x: &[S]) -> S {
    let (lo, hi) = x
        .iter()
        .fold((S::infinity(), S::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

impl<S: Scalar> BeliefState<S> {
    pub fn new(x0: &[S]) -> Self {
        Self {
            x: x0.to_vec(),
            k: 0,
            spread: spread_of(x0),
        }
    }

    pub fn mean(&self) -> S {
        self.x.iter().copied().sum::<S>() / S::from_count(self.x.len())
    }

    pub fn sum(&self) -> S {
        self.x.iter().copied().sum()
    }

    /// Applies one event. Results are clamped to the interval spanned by the
    /// two old beliefs, so rounding can never widen the spread.
    pub fn apply(&mut self, ev: &MeetingEvent, epsilon: S) {
        let (i, j) = (ev.initiator, ev.partner);
        let (xi, xj) = (self.x[i], self.x[j]);
        let (lo, hi) = (xi.min(xj), xi.max(xj));
        let mut changed = false;
        match ev.outcome {
            Outcome::Average => {
                let mid = ((xi + xj) / S::two()).max(lo).min(hi);
                changed = mid != xi || mid != xj;
                self.x[i] = mid;
                self.x[j] = mid;
            }
            Outcome::Influence => {
                let v = (epsilon * xi + (S::one() - epsilon) * xj).max(lo).min(hi);
                changed = v != xi;
                self.x[i] = v;
            }
            Outcome::Disagree => {}
        }
        self.k += 1;
        if changed {
            self.spread = spread_of(&self.x);
        }
    }
}

/// Precomputed samplers for one network.
#[derive(Clone, Debug)]
pub struct GossipSampler<S> {
    n: usize,
    epsilon: S,
    partners: Vec<Vec<AgentId>>,
    rows: Vec<WeightedIndex<f64>>,
    /// `(beta, beta + alpha)` per partner slot.
    thresholds: Vec<Vec<(f64, f64)>>,
}

impl<S: Scalar> GossipSampler<S> {
    pub fn new(net: &SocialNetwork<S>) -> Result<Self> {
        ensure_valid(net)?;
        let n = net.n();
        let mut partners = vec![Vec::new(); n];
        let mut weights = vec![Vec::new(); n];
        let mut thresholds = vec![Vec::new(); n];
        for (i, j) in net.links() {
            let b = net.beta()[(i, j)].as_f64();
            partners[i].push(j);
            weights[i].push(net.p(i, j).as_f64());
            thresholds[i].push((b, b + net.alpha()[(i, j)].as_f64()));
        }
        let rows = weights
            .iter()
            .map(|w| WeightedIndex::new(w).map_err(|e| Error::NotApplicable(format!("meeting row: {e}"))))
            .collect::<Result<_>>()?;
        Ok(Self {
            n,
            epsilon: net.epsilon(),
            partners,
            rows,
            thresholds,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> S {
        self.epsilon
    }

    pub fn sample_event<R: Rng + ?Sized>(&self, slot: u64, rng: &mut R) -> MeetingEvent {
        let i = rng.gen_range(0..self.n);
        let slot_j = self.rows[i].sample(rng);
        let (b, ba) = self.thresholds[i][slot_j];
        let u: f64 = rng.gen();
        let outcome = if u < b {
            Outcome::Average
        } else if u < ba {
            Outcome::Influence
        } else {
            Outcome::Disagree
        };
        MeetingEvent {
            slot,
            initiator: i,
            partner: self.partners[i][slot_j],
            outcome,
        }
    }

    /// Samples and applies one event.
    pub fn step<R: Rng + ?Sized>(&self, state: &mut BeliefState<S>, rng: &mut R) -> MeetingEvent {
        let ev = self.sample_event(state.k, rng);
        state.apply(&ev, self.epsilon);
        ev
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub seed: u64,
    /// Consensus is declared once the spread is at most this.
    pub tolerance: f64,
    pub max_events: u64,
    pub trials: usize,
    /// Keep every `decimation`-th spread value in traces.
    pub decimation: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: 1e-10,
            max_events: 10_000_000,
            trials: 1000,
            decimation: 100,
        }
    }
}

impl SimulationConfig {
    fn check(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::BadParams(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.trials == 0 {
            return Err(Error::BadParams("trials must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn trial_rng(seed: u64, h: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((h as u64) << 40) | trial as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxEvents,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult<S> {
    /// Mean of the final beliefs.
    pub consensus: S,
    pub events: u64,
    /// `(event, spread)` every `decimation` events, plus the last one.
    pub spread_trace: Vec<(u64, S)>,
    pub terminated: Termination,
    /// Spread never grew along the path.
    pub monotone: bool,
    /// Largest per-event change of `sum x`.
    pub max_sum_drift: S,
    pub final_state: BeliefState<S>,
}

fn run_with<S: Scalar, R: Rng + ?Sized>(
    sampler: &GossipSampler<S>,
    x0: &[S],
    cfg: &SimulationConfig,
    rng: &mut R,
    trace: bool,
) -> RunResult<S> {
    let tol = S::lit(cfg.tolerance);
    let mut state = BeliefState::new(x0);
    let mut spread_trace = Vec::new();
    let mut monotone = true;
    let mut drift = S::zero();
    let dec = cfg.decimation.max(1);
    if trace {
        spread_trace.push((0, state.spread));
    }
    while state.spread > tol && state.k < cfg.max_events {
        let before = state.spread;
        let ev = sampler.sample_event(state.k, rng);
        let old = state.x[ev.initiator] + state.x[ev.partner];
        state.apply(&ev, sampler.epsilon);
        drift = drift.max((state.x[ev.initiator] + state.x[ev.partner] - old).abs());
        monotone &= state.spread <= before;
        if trace && state.k.is_multiple_of(dec) {
            spread_trace.push((state.k, state.spread));
        }
    }
    if trace && spread_trace.last().map(|&(k, _)| k) != Some(state.k) {
        spread_trace.push((state.k, state.spread));
    }
    RunResult {
        consensus: state.mean(),
        events: state.k,
        spread_trace,
        terminated: if state.spread <= tol {
            Termination::Converged
        } else {
            Termination::MaxEvents
        },
        monotone,
        max_sum_drift: drift,
        final_state: state,
    }
}

/// One trajectory from `x0`, on stream 0 of the master seed.
pub fn run_to_consensus<S: Scalar>(net: &SocialNetwork<S>, x0: &[S], cfg: &SimulationConfig) -> Result<RunResult<S>> {
    cfg.check()?;
    check_len(net, x0)?;
    let sampler = GossipSampler::new(net)?;
    Ok(run_with(&sampler, x0, cfg, &mut trial_rng(cfg.seed, 0, 0), true))
}

fn check_len<S: Scalar>(net: &SocialNetwork<S>, x0: &[S]) -> Result<()> {
    if x0.len() != net.n() {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            found: x0.len(),
        });
    }
    Ok(())
}

/// Mean and standard error of the consensus value over `cfg.trials` runs
/// from `x0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsensusMean<S> {
    pub mean: S,
    pub std_error: S,
    pub trials: usize,
    pub converged: usize,
    pub all_monotone: bool,
}

pub fn mean_consensus<S: Scalar>(net: &SocialNetwork<S>, x0: &[S], cfg: &SimulationConfig) -> Result<ConsensusMean<S>> {
    cfg.check()?;
    check_len(net, x0)?;
    let sampler = GossipSampler::new(net)?;
    let runs: Vec<(S, bool, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let r = run_with(&sampler, x0, cfg, &mut trial_rng(cfg.seed, 0, t), false);
            (r.consensus, r.terminated == Termination::Converged, r.monotone)
        })
        .collect();
    let xs: Vec<S> = runs.iter().map(|r| r.0).collect();
    let (mean, std_error) = mean_se(&xs);
    Ok(ConsensusMean {
        mean,
        std_error,
        trials: cfg.trials,
        converged: runs.iter().filter(|r| r.1).count(),
        all_monotone: runs.iter().all(|r| r.2),
    })
}

fn mean_se<S: Scalar>(xs: &[S]) -> (S, S) {
    let n = S::from_count(xs.len());
    let mean = xs.iter().copied().sum::<S>() / n;
    if xs.len() < 2 {
        return (mean, S::zero());
    }
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>() / (n - S::one());
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsensusEstimate<S> {
    pub pi_hat: Vec<S>,
    pub std_error: Vec<S>,
    pub trials: usize,
    /// Runs that stopped at `max_events` instead of converging.
    pub unconverged: usize,
    pub all_monotone: bool,
}

impl<S: Scalar> ConsensusEstimate<S> {
    /// Each component within `max(k * SE, floor)` of `pi`.
    pub fn agrees_with(&self, pi: &[S], k: S, floor: S) -> bool {
        self.pi_hat
            .iter()
            .zip(&self.std_error)
            .zip(pi)
            .all(|((&p, &se), &t)| (p - t).abs() <= (k * se).max(floor))
    }

    pub fn max_deviation(&self, pi: &[S]) -> S {
        self.pi_hat.iter().zip(pi).fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

/// `pi_hat_h` is the mean consensus from `x(0) = e_h`.
pub fn estimate_consensus_weights<S: Scalar>(net: &SocialNetwork<S>, cfg: &SimulationConfig) -> Result<ConsensusEstimate<S>> {
    cfg.check()?;
    let sampler = GossipSampler::new(net)?;
    let n = net.n();
    let runs: Vec<(S, bool, bool)> = (0..n * cfg.trials)
        .into_par_iter()
        .map(|slot| {
            let (h, t) = (slot / cfg.trials, slot % cfg.trials);
            let mut x0 = vec![S::zero(); n];
            x0[h] = S::one();
            let r = run_with(&sampler, &x0, cfg, &mut trial_rng(cfg.seed, h, t), false);
            (r.consensus, r.terminated == Termination::Converged, r.monotone)
        })
        .collect();
    let mut pi_hat = Vec::with_capacity(n);
    let mut std_error = Vec::with_capacity(n);
    for chunk in runs.chunks(cfg.trials) {
        let xs: Vec<S> = chunk.iter().map(|r| r.0).collect();
        let (m, se) = mean_se(&xs);
        pi_hat.push(m);
        std_error.push(se);
    }
    Ok(ConsensusEstimate {
        pi_hat,
        std_error,
        trials: cfg.trials,
        unconverged: runs.iter().filter(|r| !r.1).count(),
        all_monotone: runs.iter().all(|r| r.2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile<S> {
    /// Events per window, `n^2`.
    pub window: u64,
    /// Mean spread over trials at each window boundary, starting at 0.
    pub mean_spread: Vec<S>,
    /// `mean_spread[w + 1] / mean_spread[w]` while the denominator is positive.
    pub ratios: Vec<S>,
    pub all_monotone: bool,
}

impl<S: Scalar> DecayProfile<S> {
    pub fn max_ratio(&self) -> Option<S> {
        self.ratios.iter().copied().reduce(S::max)
    }
}

/// Spread at every `n^2` events, averaged over trials, for
/// `cfg.max_events / n^2` windows (at least one).
pub fn spread_decay_profile<S: Scalar>(net: &SocialNetwork<S>, x0: &[S], cfg: &SimulationConfig) -> Result<DecayProfile<S>> {
    cfg.check()?;
    check_len(net, x0)?;
    let sampler = GossipSampler::new(net)?;
    let n = net.n() as u64;
    let window = n * n;
    let windows = (cfg.max_events / window).max(1) as usize;
    let paths: Vec<(Vec<S>, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, 0, t);
            let mut state = BeliefState::new(x0);
            let mut at = vec![state.spread];
            let mut monotone = true;
            for _ in 0..windows {
                for _ in 0..window {
                    let before = state.spread;
                    sampler.step(&mut state, &mut rng);
                    monotone &= state.spread <= before;
                }
                at.push(state.spread);
            }
            (at, monotone)
        })
        .collect();
    let trials = S::from_count(cfg.trials);
    let mean_spread: Vec<S> = (0..=windows)
        .map(|w| paths.iter().map(|p| p.0[w]).sum::<S>() / trials)
        .collect();
    let ratios = mean_spread
        .windows(2)
        .take_while(|w| w[0] > S::zero())
        .map(|w| w[1] / w[0])
        .collect();
    Ok(DecayProfile {
        window,
        mean_spread,
        ratios,
        all_monotone: paths.iter().all(|p| p.1),
    })
}
