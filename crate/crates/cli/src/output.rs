//! CSV tables for plotting. One table per subcommand.

use std::io;

use misinfo::bound::{BoundValue, Certification};
use misinfo::cuts::{ClusterTrace, CutMode};
use misinfo::gossip::{ConsensusEstimate, DecayProfile};
use misinfo::influence::BoundsReport;
use misinfo::network::ValidationReport;
use misinfo::Result;

use crate::report::AnalysisReport;

type Writer = csv::Writer<io::StdoutLock<'static>>;

fn writer() -> Writer {
    csv::Writer::from_writer(io::stdout().lock())
}

fn finish(mut w: Writer) -> Result<()> {
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> misinfo::Error {
    misinfo::Error::Io(io::Error::other(e))
}

fn cert(c: Certification) -> &'static str {
    match c {
        Certification::Certified => "certified",
        Certification::Heuristic => "heuristic",
        Certification::Vacuous => "vacuous",
    }
}

fn mode(m: CutMode) -> &'static str {
    match m {
        CutMode::Exact => "exact",
        CutMode::Heuristic => "heuristic",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn row<I, T>(w: &mut Writer, cells: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(cells).map_err(csv_err)
}

pub fn violations_csv(rep: &ValidationReport) -> Result<()> {
    let mut w = writer();
    row(&mut w, ["kind", "detail"])?;
    for v in &rep.violations {
        let kind = serde_json::to_value(v).ok().and_then(|j| j["kind"].as_str().map(String::from)).unwrap_or_default();
        row(&mut w, [kind, v.to_string()])?;
    }
    finish(w)
}

/// Bound against the quantity it controls.
pub fn bounds_csv(b: &BoundsReport<f64>, tol: f64) -> Result<()> {
    let mut w = writer();
    row(&mut w, ["bound", "pair", "value", "actual", "certification", "holds"])?;
    let put = |w: &mut Writer, name: &str, pair: String, v: &BoundValue<f64>, actual: f64| {
        let holds = v.covers(actual, tol * actual.abs().max(1.0));
        row(w, [name.to_string(), pair, opt(v.value), actual.to_string(), cert(v.certification).into(), holds.to_string()])
    };
    put(&mut w, "delta", String::new(), &b.delta_bound, b.actual_inf)?;
    put(&mut w, "l2", String::new(), &b.l2_bound, b.actual_l2)?;
    put(&mut w, "conductance", String::new(), &b.conductance_bound, b.actual_inf)?;
    if let Some(g) = &b.gap {
        put(&mut w, "gap", String::new(), &g.bound, g.actual.abs())?;
        put(&mut w, "gap_sup_norm_form", String::new(), &g.sup_norm_form, g.actual.abs())?;
    }
    for p in &b.pairs {
        let pair = format!("{}-{}", p.influenced, p.forceful);
        put(&mut w, "relative_cut_upper", pair.clone(), &BoundValue::certified(p.relative_upper), p.commute)?;
        put(&mut w, "normalized_relative_cut", pair.clone(), &p.normalized_bound, p.commute)?;
        put(&mut w, "global_commute", pair, &p.global_bound, p.commute)?;
    }
    finish(w)
}

/// Per-agent consensus weights and excess influence.
pub fn analysis_csv(r: &AnalysisReport) -> Result<()> {
    let mut w = writer();
    let sim = r.simulation.as_ref();
    row(
        &mut w,
        ["agent", "pi_direct", "pi_perturbation", "excess", "excess_passage_times", "excess_disjoint", "excess_essential_edge", "pi_simulated", "pi_simulated_se"],
    )?;
    let pick = |v: &Option<Vec<f64>>, k: usize| opt(v.as_ref().map(|x| x[k]));
    let ex = &r.excess_influence;
    for k in 0..r.network.n {
        row(
            &mut w,
            [
                k.to_string(),
                r.consensus.direct[k].to_string(),
                r.consensus.perturbation[k].to_string(),
                ex.direct[k].to_string(),
                pick(&ex.passage_times.excess, k),
                pick(&ex.disjoint_edges.excess, k),
                pick(&ex.essential_edge.excess, k),
                opt(sim.map(|s| s.estimate.pi_hat[k])),
                opt(sim.map(|s| s.estimate.std_error[k])),
            ],
        )?;
    }
    finish(w)
}

pub fn cluster_csv(tr: &ClusterTrace<f64>) -> Result<()> {
    let mut w = writer();
    row(&mut w, ["step", "size", "rho", "bound", "separates", "mode", "subset"])?;
    for (k, s) in tr.steps.iter().enumerate() {
        let subset: Vec<String> = s.subset.iter().map(ToString::to_string).collect();
        row(
            &mut w,
            [
                k.to_string(),
                s.subset.len().to_string(),
                s.rho.to_string(),
                s.bound.to_string(),
                s.separates.to_string(),
                mode(s.mode).into(),
                subset.join(" "),
            ],
        )?;
    }
    finish(w)
}

pub fn trace_csv(trace: &[(u64, f64)]) -> Result<()> {
    let mut w = writer();
    row(&mut w, ["event", "spread"])?;
    for (k, s) in trace {
        row(&mut w, [k.to_string(), s.to_string()])?;
    }
    finish(w)
}

pub fn decay_csv(p: &DecayProfile<f64>) -> Result<()> {
    let mut w = writer();
    row(&mut w, ["window", "events", "mean_spread", "ratio"])?;
    for (k, s) in p.mean_spread.iter().enumerate() {
        let ratio = if k == 0 { None } else { p.ratios.get(k - 1).copied() };
        row(&mut w, [k.to_string(), (k as u64 * p.window).to_string(), s.to_string(), opt(ratio)])?;
    }
    finish(w)
}

pub fn estimate_csv(est: &ConsensusEstimate<f64>, pi: &[f64]) -> Result<()> {
    let mut w = writer();
    row(&mut w, ["agent", "pi_hat", "std_error", "pi_analytic"])?;
    for (k, ((p, se), a)) in est.pi_hat.iter().zip(&est.std_error).zip(pi).enumerate() {
        row(&mut w, [k.to_string(), p.to_string(), se.to_string(), a.to_string()])?;
    }
    finish(w)
}
