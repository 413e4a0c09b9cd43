//! Report documents and the two emitters.
//!
//! The JSON emitter goes through `serde_json::Value`, whose object maps are
//! ordered, so keys come out sorted and a given report body is byte-stable.
//! Reports carry no timestamps; identical (scenario, seed) runs are
//! byte-identical.

use crate::scenario::ScenarioDoc;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub engine_version: String,
    pub mode: String,
    pub seed: u64,
    pub scenario: ScenarioDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<Vec<QueryReport>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boosts: Option<Vec<BoostReport>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<PairReport>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_sweep: Option<FrameSweepReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistics: Option<StatisticsReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryReport {
    pub label: String,
    pub t: f64,
    pub x: f64,
    /// Named region; present exactly in two-observation scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    /// Labels of the observations whose reduction reaches this query.
    pub applied: Vec<String>,
    pub weight: f64,
    pub effective_ket: KetReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KetReport {
    pub labels: Vec<String>,
    /// Complex amplitudes as [re, im] pairs, unnormalized.
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoostReport {
    pub velocity: f64,
    pub queries: Vec<BoostedQueryReport>,
    /// Whether every query classified the same as in the base frame.
    pub matches_base: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoostedQueryReport {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    pub applied: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub epoch: [u8; 2],
    pub verdict: String,
    pub frame_invariant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameSweepReport {
    pub velocities: Vec<f64>,
    pub all_invariant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleReport {
    pub preparation: String,
    pub parity_basis: String,
    /// Detector preparation amplitudes actually used, as [re, im] pairs.
    pub detector_preparation: KetReport,
    pub steps: Vec<CycleStepReport>,
    pub comparisons: Vec<ComparisonReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<ObservationReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleStepReport {
    pub event: String,
    pub detector: u8,
    pub epoch: [u8; 2],
    pub comparison: String,
    pub singlet_fidelity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub epoch: [u8; 2],
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservationReport {
    pub event: String,
    pub epoch: [u8; 2],
    pub outcomes: [u8; 2],
    pub xor: u8,
    pub post_singlet_fidelity: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatisticsReport {
    pub exact: ExactStatistics,
    pub monte_carlo: MonteCarloStatistics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactStatistics {
    /// B's marginal [P(up), P(down)] per strategy.
    pub marginal_b_observing_z: [f64; 2],
    pub marginal_b_observing_x: [f64; 2],
    pub marginal_b_silent: [f64; 2],
    pub max_marginal_difference: f64,
    pub conditional_b_given_up: [f64; 2],
    pub conditional_b_given_down: [f64; 2],
    pub tv_distance_conditional_vs_marginal: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloStatistics {
    pub trials_per_arm: usize,
    pub b_down_observing: f64,
    pub b_down_silent: f64,
    pub difference: f64,
    pub standard_error: f64,
    pub chi_square: f64,
    pub within_three_sigma: bool,
    pub joint_up_down_frequency: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// Stable JSON body: keys sorted, two-space indent, trailing newline.
pub fn emit_json(report: &Report) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut body = serde_json::to_string_pretty(&value).expect("value serializes");
    body.push('\n');
    body
}

/// Fixed-layout human-readable summary.
pub fn emit_text(report: &Report) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "qcone {} - mode {} (seed {})",
        report.engine_version, report.mode, report.seed
    );
    if let Some(d) = &report.scenario.description {
        let _ = writeln!(out, "{d}");
    }

    if let Some(queries) = &report.queries {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:>8}  {:<16} {:>8}  applied",
            "query", "t", "x", "region", "weight"
        );
        for q in queries {
            let _ = writeln!(
                out,
                "{:<12} {:>8.3} {:>8.3}  {:<16} {:>8.4}  {}",
                q.label,
                q.t,
                q.x,
                q.region.as_deref().unwrap_or("-"),
                q.weight,
                if q.applied.is_empty() {
                    "-".to_string()
                } else {
                    q.applied.join(", ")
                }
            );
        }
    }
    if let Some(boosts) = &report.boosts {
        let _ = writeln!(out);
        for b in boosts {
            let _ = writeln!(
                out,
                "boost v = {:+.2}: {}",
                b.velocity,
                if b.matches_base {
                    "classification matches the base frame"
                } else {
                    "CLASSIFICATION CHANGED"
                }
            );
        }
    }
    if let Some(pairs) = &report.pairs {
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<10} {:<18} frame-invariant", "epoch", "verdict");
        for p in pairs {
            let _ = writeln!(
                out,
                "({}, {})     {:<18} {}",
                p.epoch[0], p.epoch[1], p.verdict, p.frame_invariant
            );
        }
        if let Some(sweep) = &report.frame_sweep {
            let _ = writeln!(
                out,
                "frame sweep over {} boost(s): {}",
                sweep.velocities.len(),
                if sweep.all_invariant { "pass" } else { "FAIL" }
            );
        }
    }
    if let Some(cycle) = &report.cycle {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "preparation: {} ({}-parity cycle)",
            cycle.preparation, cycle.parity_basis
        );
        for s in &cycle.steps {
            let _ = writeln!(
                out,
                "interaction {:<4} detector {}  epoch ({}, {})  comparison {:<11} singlet fidelity {:.4}",
                s.event, s.detector, s.epoch[0], s.epoch[1], s.comparison, s.singlet_fidelity
            );
        }
        for c in &cycle.comparisons {
            let _ = writeln!(
                out,
                "comparison at epoch ({}, {}): {}",
                c.epoch[0], c.epoch[1], c.verdict
            );
        }
        if let Some(o) = &cycle.observation {
            let _ = writeln!(
                out,
                "observation at {} epoch ({}, {}): outcomes ({}, {}), xor {}, post singlet fidelity {:.4} - {}",
                o.event, o.epoch[0], o.epoch[1], o.outcomes[0], o.outcomes[1], o.xor,
                o.post_singlet_fidelity, o.verdict
            );
        }
    }
    if let Some(stats) = &report.statistics {
        let e = &stats.exact;
        let m = &stats.monte_carlo;
        let _ = writeln!(out);
        let _ = writeln!(out, "exact engine:");
        let _ = writeln!(
            out,
            "  B marginal, A observes Z: [{:.6}, {:.6}]",
            e.marginal_b_observing_z[0], e.marginal_b_observing_z[1]
        );
        let _ = writeln!(
            out,
            "  B marginal, A observes X: [{:.6}, {:.6}]",
            e.marginal_b_observing_x[0], e.marginal_b_observing_x[1]
        );
        let _ = writeln!(
            out,
            "  B marginal, A silent:     [{:.6}, {:.6}]",
            e.marginal_b_silent[0], e.marginal_b_silent[1]
        );
        let _ = writeln!(out, "  max marginal difference:  {:.3e}", e.max_marginal_difference);
        let _ = writeln!(
            out,
            "  B given A=up: [{:.6}, {:.6}]  (TV distance from marginal {:.3})",
            e.conditional_b_given_up[0],
            e.conditional_b_given_up[1],
            e.tv_distance_conditional_vs_marginal
        );
        let _ = writeln!(out, "monte carlo ({} trials per arm):", m.trials_per_arm);
        let _ = writeln!(
            out,
            "  P(B=down): observing {:.4}, silent {:.4}, diff {:.4} (SE {:.4}, chi2 {:.3})",
            m.b_down_observing, m.b_down_silent, m.difference, m.standard_error, m.chi_square
        );
        let _ = writeln!(
            out,
            "  joint (up, down) frequency: {:.4}",
            m.joint_up_down_frequency
        );
        let _ = writeln!(
            out,
            "  verdict: {}",
            if m.passed { "pass (within 3 sigma, exact difference at zero)" } else { "FAIL" }
        );
    }
    out
}
