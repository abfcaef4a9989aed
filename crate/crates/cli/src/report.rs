//! Report types shared by the subcommands. `AnalysisReport` is the document
//! described by `schema/analysis-report.schema.json`.

use misinfo::bound::{BoundValue, Certification};
use misinfo::cuts::{cluster_bound, CutMode, WeightedGraph, EXACT_LIMIT};
use misinfo::gossip::{estimate_consensus_weights, ConsensusEstimate, SimulationConfig};
use misinfo::influence::{
    bounds_report, disjoint_uncoupled_form, essential_edge_excess, essential_edges, excess_influence_disjoint,
    excess_influence_mfpt, BoundsReport, EssentialEdgeReport, ExcessInfluence,
};
use misinfo::kernel::decompose;
use misinfo::markov::{perturbed_stationary, stationary};
use misinfo::network::{meeting_digraph, ForcefulLink};
use misinfo::{Error, Network, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub seed: u64,
    pub tolerance: f64,
    pub require_exact: bool,
}

impl Settings {
    pub fn cut_mode(&self, n: usize) -> Result<CutMode> {
        if n <= EXACT_LIMIT {
            Ok(CutMode::Exact)
        } else if self.require_exact {
            Err(Error::TooLargeForExact { n, limit: EXACT_LIMIT })
        } else {
            Ok(CutMode::Heuristic)
        }
    }
}

#[derive(Serialize)]
pub struct NetworkSummary {
    pub n: usize,
    pub epsilon: f64,
    pub links: usize,
    pub diameter: usize,
    pub total_influence: f64,
    pub forceful_links: Vec<ForcefulLink<f64>>,
}

impl NetworkSummary {
    pub fn of(net: &Network) -> Result<Self> {
        Ok(Self {
            n: net.n(),
            epsilon: net.epsilon(),
            links: net.links().count(),
            diameter: meeting_digraph(net)?.diameter,
            total_influence: net.total_influence(),
            forceful_links: net.forceful_links(),
        })
    }
}

#[derive(Serialize)]
pub struct Consensus {
    /// Stationary distribution of the mean interaction matrix.
    pub direct: Vec<f64>,
    /// Same from the perturbation identity on `T + D`.
    pub perturbation: Vec<f64>,
    pub max_discrepancy: f64,
    pub residual: f64,
}

/// One route to the excess influence and its distance from the direct one.
#[derive(Serialize)]
pub struct Route {
    pub excess: Option<Vec<f64>>,
    pub max_discrepancy: Option<f64>,
    /// Why the route does not apply to this network.
    pub skipped: Option<String>,
}

impl Route {
    fn from(res: Result<ExcessInfluence<f64>>, direct: &ExcessInfluence<f64>) -> Result<Self> {
        match res {
            Ok(e) => Ok(Self {
                max_discrepancy: Some(e.max_abs_diff(direct)),
                excess: Some(e.excess),
                skipped: None,
            }),
            Err(e @ (Error::OverlappingForcefulEdges { .. } | Error::NotApplicable(_))) => Ok(Self {
                excess: None,
                max_discrepancy: None,
                skipped: Some(e.to_string()),
            }),
            Err(e) => Err(e),
        }
    }
}

#[derive(Serialize)]
pub struct ExcessRoutes {
    pub direct: Vec<f64>,
    pub norm_inf: f64,
    pub norm2: f64,
    pub passage_times: Route,
    pub disjoint_edges: Route,
    pub disjoint_uncoupled: Route,
    pub essential_edge: Route,
    /// `E[x_bar] - mean(x0)` when `--x0` is given.
    pub gap: Option<f64>,
}

#[derive(Serialize)]
pub struct SimulationSummary {
    pub trials: usize,
    pub estimate: ConsensusEstimate<f64>,
    pub max_deviation: f64,
    /// Every component within `max(3 SE, 0.02)` of the direct solve.
    pub agrees: bool,
}

#[derive(Serialize)]
pub struct CertificationEntry {
    pub bound: String,
    pub certification: Certification,
}

#[derive(Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub tolerance: f64,
    pub cut_mode: CutMode,
    pub exact_cut_limit: usize,
    pub certifications: Vec<CertificationEntry>,
    pub tool_version: &'static str,
}

#[derive(Serialize)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub network: NetworkSummary,
    pub consensus: Consensus,
    pub excess_influence: ExcessRoutes,
    pub bounds: BoundsReport<f64>,
    pub essential_edges: EssentialEdgeReport<f64>,
    pub cluster: Option<misinfo::cuts::ClusterTrace<f64>>,
    pub simulation: Option<SimulationSummary>,
    pub provenance: Provenance,
}

pub fn certifications(b: &BoundsReport<f64>, extra: Option<(&str, Certification)>) -> Vec<CertificationEntry> {
    let entry = |name: String, v: &BoundValue<f64>| CertificationEntry {
        bound: name,
        certification: v.certification,
    };
    let mut out = vec![
        entry("delta".into(), &b.delta_bound),
        entry("l2".into(), &b.l2_bound),
        entry("conductance".into(), &b.conductance_bound),
    ];
    if let Some(g) = &b.gap {
        out.push(entry("gap".into(), &g.bound));
    }
    for p in &b.pairs {
        let tag = format!("({}, {})", p.influenced, p.forceful);
        out.push(entry(format!("normalized_relative_cut {tag}"), &p.normalized_bound));
        out.push(entry(format!("global_commute {tag}"), &p.global_bound));
    }
    if let Some((name, c)) = extra {
        out.push(CertificationEntry {
            bound: name.into(),
            certification: c,
        });
    }
    out
}

pub struct AnalyzeRequest<'a> {
    pub x0: Option<&'a [f64]>,
    pub simulate: Option<usize>,
    pub cluster: Option<(usize, usize)>,
    pub max_events: u64,
}

pub fn analyze(net: &Network, req: &AnalyzeRequest, s: &Settings) -> Result<AnalysisReport> {
    if let Some(x) = req.x0 {
        check_len(net, x)?;
    }
    let mode = s.cut_mode(net.n())?;
    let dec = decompose(net);
    let direct = stationary(&dec.w_tilde)?;
    let pert = perturbed_stationary(&dec.t, &dec.d)?;
    let consensus = Consensus {
        max_discrepancy: direct
            .pi
            .iter()
            .zip(&pert.pi)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())),
        residual: direct.residual,
        direct: direct.pi.clone(),
        perturbation: pert.pi,
    };
    let u = 1.0 / net.n() as f64;
    let base = ExcessInfluence {
        excess: direct.pi.iter().map(|p| p - u).collect(),
        gap: None,
    };
    let base = match req.x0 {
        Some(x) => base.with_gap(x),
        None => base,
    };
    let excess_influence = ExcessRoutes {
        norm_inf: base.norm_inf(),
        norm2: base.norm2(),
        passage_times: Route::from(excess_influence_mfpt(net), &base)?,
        disjoint_edges: Route::from(excess_influence_disjoint(net), &base)?,
        disjoint_uncoupled: Route::from(disjoint_uncoupled_form(net), &base)?,
        essential_edge: Route::from(essential_edge_excess(net), &base)?,
        gap: base.gap,
        direct: base.excess.clone(),
    };
    let bounds = bounds_report(net, req.x0, mode)?;
    let cluster = match req.cluster {
        Some((a, b)) => {
            let g = WeightedGraph::from_social(&dec.t)?;
            Some(cluster_bound(&g, a, b, mode)?)
        }
        None => None,
    };
    let simulation = match req.simulate {
        Some(trials) => {
            let cfg = SimulationConfig {
                seed: s.seed,
                tolerance: s.tolerance,
                max_events: req.max_events,
                trials,
                ..Default::default()
            };
            let estimate = estimate_consensus_weights(net, &cfg)?;
            Some(SimulationSummary {
                trials,
                max_deviation: estimate.max_deviation(&direct.pi),
                agrees: estimate.agrees_with(&direct.pi, 3.0, 0.02),
                estimate,
            })
        }
        None => None,
    };
    let cluster_cert = cluster.as_ref().map(|c| ("cluster", c.final_bound.certification));
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        network: NetworkSummary::of(net)?,
        consensus,
        excess_influence,
        essential_edges: essential_edges(net)?,
        provenance: Provenance {
            seed: s.seed,
            tolerance: s.tolerance,
            cut_mode: mode,
            exact_cut_limit: EXACT_LIMIT,
            certifications: certifications(&bounds, cluster_cert),
            tool_version: env!("CARGO_PKG_VERSION"),
        },
        bounds,
        cluster,
        simulation,
    })
}

pub fn check_len(net: &Network, x0: &[f64]) -> Result<()> {
    if x0.len() != net.n() {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            found: x0.len(),
        });
    }
    Ok(())
}
