//! Report model and emitters.
//!
//! A report is a typed record (metadata echo, command-specific rows,
//! built-in check results) with three renderings: an aligned table for
//! humans, CSV, and JSON. CSV and JSON renderings are deterministic
//! functions of the report, so re-running a command with the same
//! configuration reproduces them byte for byte; parsing a JSON report and
//! re-serializing it is also byte-identical.
//!
//! CSV layout: `# key=value` metadata lines, a mandatory header row, data
//! rows (comma-separated, `.` decimal separator, LF endings), then one
//! `# check:<name>=pass|fail` line per built-in check. Optional columns
//! (the Monte Carlo overlay) are always present in the header and left
//! empty when the command ran analytically.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Configuration echo included in every report; angles are radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate_axis_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate_axis_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Echoed whenever any sampling happened; re-running with this seed
    /// reproduces the report byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new(command: &str) -> Self {
        Meta {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            model: None,
            source: None,
            theta_a: None,
            theta_b: None,
            angles: None,
            arm: None,
            plate_axis_a: None,
            plate_axis_b: None,
            grid_points: None,
            trials: None,
            seed: None,
        }
    }
}

/// One built-in consistency check; any failed check makes the process exit
/// with code 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, passed: bool) -> Self {
        Check {
            name: name.to_string(),
            passed,
        }
    }
}

/// Analytic joint for one setting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRow {
    pub p_pp: f64,
    pub p_pa: f64,
    pub p_ap: f64,
    pub p_aa: f64,
    pub pass_a: f64,
    pub pass_b: f64,
    pub correlation_e: f64,
}

/// One tally cell with its estimate and analytic reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub cell: String,
    pub count: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic: f64,
}

/// One grid point of a coincidence scan, with an optional Monte Carlo
/// overlay of the pass-pass cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta_b: f64,
    pub p_pp: f64,
    pub p_pa: f64,
    pub p_ap: f64,
    pub p_aa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq_pp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_low: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_high: Option<f64>,
}

/// CHSH correlations and combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshRow {
    pub e_ab: f64,
    pub e_ab_prime: f64,
    pub e_a_prime_b: f64,
    pub e_a_prime_b_prime: f64,
    pub s: f64,
    pub classical_bound: f64,
    pub quantum_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical_s: Option<f64>,
}

/// Orientation rule for one pair state: the searched rule next to the
/// quoted one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRow {
    pub state: String,
    pub found_slope: i8,
    pub found_offset: f64,
    pub found_rule: String,
    pub reference_slope: i8,
    pub reference_offset: f64,
    pub reference_rule: String,
    pub agrees: bool,
}

/// One grid point of the beam-intensity scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamRow {
    pub theta: f64,
    pub pass_probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_low: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_high: Option<f64>,
}

/// One circular-detector pairing of the coincidence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub detector_a: String,
    pub detector_b: String,
    pub p_pp: f64,
    pub p_pa: f64,
    pub p_ap: f64,
    pub p_aa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_pp: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_pa: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_aa: Option<u64>,
}

/// Per-state deviation between the correlated rule and the standard
/// description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub state: String,
    pub max_cell_deviation: f64,
}

/// The divergence demonstration at parallel polaroids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub p_pp_standard: f64,
    pub p_pp_local_circular: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub threshold_999: f64,
    pub zero_cell_counts: u64,
}

/// Rows of the model-comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRows {
    pub equivalence: Vec<EquivalenceRow>,
    pub divergence: DivergenceRow,
}

/// Command-specific payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Rows {
    Joint(JointRow),
    Cells(Vec<CellRow>),
    Scan(Vec<ScanRow>),
    Chsh(ChshRow),
    Rules(Vec<RuleRow>),
    Beam(Vec<BeamRow>),
    Pairings(Vec<PairingRow>),
    Compare(CompareRows),
}

/// A complete command result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub rows: Rows,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization is infallible");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        self.write_meta_csv(&mut out);
        match &self.rows {
            Rows::Joint(r) => {
                out.push_str("p_pp,p_pa,p_ap,p_aa,pass_a,pass_b,correlation_e\n");
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    sig12(r.p_pp),
                    sig12(r.p_pa),
                    sig12(r.p_ap),
                    sig12(r.p_aa),
                    sig12(r.pass_a),
                    sig12(r.pass_b),
                    sig12(r.correlation_e)
                );
            }
            Rows::Cells(rows) => {
                out.push_str("cell,count,frequency,ci_low,ci_high,analytic\n");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        r.cell,
                        r.count,
                        sig12(r.frequency),
                        sig12(r.ci_low),
                        sig12(r.ci_high),
                        sig12(r.analytic)
                    );
                }
            }
            Rows::Scan(rows) => {
                out.push_str("theta_b,p_pp,p_pa,p_ap,p_aa,freq_pp,ci_low,ci_high\n");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        sig12(r.theta_b),
                        sig12(r.p_pp),
                        sig12(r.p_pa),
                        sig12(r.p_ap),
                        sig12(r.p_aa),
                        opt_sig12(r.freq_pp),
                        opt_sig12(r.ci_low),
                        opt_sig12(r.ci_high)
                    );
                }
            }
            Rows::Chsh(r) => {
                out.push_str(
                    "e_ab,e_ab_prime,e_a_prime_b,e_a_prime_b_prime,s,classical_bound,quantum_max,empirical_s\n",
                );
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    sig12(r.e_ab),
                    sig12(r.e_ab_prime),
                    sig12(r.e_a_prime_b),
                    sig12(r.e_a_prime_b_prime),
                    sig12(r.s),
                    sig12(r.classical_bound),
                    sig12(r.quantum_max),
                    opt_sig12(r.empirical_s)
                );
            }
            Rows::Rules(rows) => {
                out.push_str(
                    "state,found_slope,found_offset,found_rule,reference_slope,reference_offset,reference_rule,agrees\n",
                );
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        r.state,
                        r.found_slope,
                        sig12(r.found_offset),
                        quote(&r.found_rule),
                        r.reference_slope,
                        sig12(r.reference_offset),
                        quote(&r.reference_rule),
                        r.agrees
                    );
                }
            }
            Rows::Beam(rows) => {
                out.push_str("theta,pass_probability,frequency,ci_low,ci_high\n");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        sig12(r.theta),
                        sig12(r.pass_probability),
                        opt_sig12(r.frequency),
                        opt_sig12(r.ci_low),
                        opt_sig12(r.ci_high)
                    );
                }
            }
            Rows::Pairings(rows) => {
                out.push_str("detector_a,detector_b,p_pp,p_pa,p_ap,p_aa,n_pp,n_pa,n_ap,n_aa\n");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{}",
                        r.detector_a,
                        r.detector_b,
                        sig12(r.p_pp),
                        sig12(r.p_pa),
                        sig12(r.p_ap),
                        sig12(r.p_aa),
                        opt_u64(r.n_pp),
                        opt_u64(r.n_pa),
                        opt_u64(r.n_ap),
                        opt_u64(r.n_aa)
                    );
                }
            }
            Rows::Compare(rows) => {
                out.push_str(
                    "row_kind,state,max_cell_deviation,p_pp_standard,p_pp_local_circular,chi_square,dof,threshold_999,zero_cell_counts\n",
                );
                for r in &rows.equivalence {
                    let _ = writeln!(
                        out,
                        "equivalence,{},{},,,,,,",
                        r.state,
                        sig12(r.max_cell_deviation)
                    );
                }
                let d = &rows.divergence;
                let _ = writeln!(
                    out,
                    "divergence,,,{},{},{},{},{},{}",
                    sig12(d.p_pp_standard),
                    sig12(d.p_pp_local_circular),
                    sig12(d.chi_square),
                    d.dof,
                    sig12(d.threshold_999),
                    d.zero_cell_counts
                );
            }
        }
        for check in &self.checks {
            let _ = writeln!(
                out,
                "# check:{}={}",
                check.name,
                if check.passed { "pass" } else { "fail" }
            );
        }
        out
    }

    fn write_meta_csv(&self, out: &mut String) {
        let m = &self.meta;
        let _ = writeln!(out, "# command={}", m.command);
        let _ = writeln!(out, "# version={}", m.version);
        if let Some(v) = &m.model {
            let _ = writeln!(out, "# model={v}");
        }
        if let Some(v) = &m.source {
            let _ = writeln!(out, "# source={v}");
        }
        if let Some(v) = m.theta_a {
            let _ = writeln!(out, "# theta_a={}", sig12(v));
        }
        if let Some(v) = m.theta_b {
            let _ = writeln!(out, "# theta_b={}", sig12(v));
        }
        if let Some(v) = &m.angles {
            let joined: Vec<String> = v.iter().map(|a| sig12(*a)).collect();
            let _ = writeln!(out, "# angles={}", joined.join(";"));
        }
        if let Some(v) = &m.arm {
            let _ = writeln!(out, "# arm={v}");
        }
        if let Some(v) = m.plate_axis_a {
            let _ = writeln!(out, "# plate_axis_a={}", sig12(v));
        }
        if let Some(v) = m.plate_axis_b {
            let _ = writeln!(out, "# plate_axis_b={}", sig12(v));
        }
        if let Some(v) = m.grid_points {
            let _ = writeln!(out, "# grid_points={v}");
        }
        if let Some(v) = m.trials {
            let _ = writeln!(out, "# trials={v}");
        }
        if let Some(v) = m.seed {
            let _ = writeln!(out, "# seed={v}");
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let m = &self.meta;
        let _ = writeln!(out, "command : {}  (v{})", m.command, m.version);
        if let (Some(model), Some(source)) = (&m.model, &m.source) {
            let _ = writeln!(out, "model   : {model}   source: {source}");
        }
        if let Some(t) = m.theta_a {
            let _ = writeln!(out, "theta_a : {}", sig12(t));
        }
        if let Some(t) = m.theta_b {
            let _ = writeln!(out, "theta_b : {}", sig12(t));
        }
        if let Some(angles) = &m.angles {
            let joined: Vec<String> = angles.iter().map(|a| format!("{a:.6}")).collect();
            let _ = writeln!(out, "angles  : {}", joined.join(", "));
        }
        if let Some(n) = m.trials {
            let _ = writeln!(
                out,
                "trials  : {n}   seed: {}",
                m.seed.map_or_else(|| "-".into(), |s| s.to_string())
            );
        }
        out.push('\n');
        match &self.rows {
            Rows::Joint(r) => {
                let _ = writeln!(out, "{:<10} {:>16}", "cell", "probability");
                for (name, p) in [
                    ("pass-pass", r.p_pp),
                    ("pass-abs", r.p_pa),
                    ("abs-pass", r.p_ap),
                    ("abs-abs", r.p_aa),
                ] {
                    let _ = writeln!(out, "{name:<10} {p:>16.12}");
                }
                let _ = writeln!(out, "\npass_a = {:.12}  pass_b = {:.12}", r.pass_a, r.pass_b);
                let _ = writeln!(out, "E (pass=+1, absorb=-1) = {:.12}", r.correlation_e);
            }
            Rows::Cells(rows) => {
                let _ = writeln!(
                    out,
                    "{:<6} {:>10} {:>12} {:>12} {:>12} {:>12}",
                    "cell", "count", "frequency", "ci_low", "ci_high", "analytic"
                );
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{:<6} {:>10} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                        r.cell, r.count, r.frequency, r.ci_low, r.ci_high, r.analytic
                    );
                }
            }
            Rows::Scan(rows) => {
                let _ = writeln!(
                    out,
                    "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
                    "theta_b", "p_pp", "p_pa", "p_ap", "p_aa", "freq_pp"
                );
                for r in rows {
                    let freq = r
                        .freq_pp
                        .map_or_else(|| format!("{:>12}", "-"), |f| format!("{f:>12.6}"));
                    let _ = writeln!(
                        out,
                        "{:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {freq}",
                        r.theta_b, r.p_pp, r.p_pa, r.p_ap, r.p_aa
                    );
                }
            }
            Rows::Chsh(r) => {
                let _ = writeln!(out, "E(a ,b ) = {:+.12}", r.e_ab);
                let _ = writeln!(out, "E(a ,b') = {:+.12}", r.e_ab_prime);
                let _ = writeln!(out, "E(a',b ) = {:+.12}", r.e_a_prime_b);
                let _ = writeln!(out, "E(a',b') = {:+.12}", r.e_a_prime_b_prime);
                let _ = writeln!(out, "\nS = {:+.12}", r.s);
                if let Some(s) = r.empirical_s {
                    let _ = writeln!(out, "S (sampled) = {s:+.12}");
                }
                let _ = writeln!(
                    out,
                    "classical bound |S| <= {}, quantum maximum {:.12}",
                    r.classical_bound, r.quantum_max
                );
            }
            Rows::Rules(rows) => {
                let _ = writeln!(out, "{:<6} {:<44} {:<44} agrees", "state", "found", "reference");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{:<6} {:<44} {:<44} {}",
                        r.state, r.found_rule, r.reference_rule, r.agrees
                    );
                }
            }
            Rows::Beam(rows) => {
                let _ = writeln!(
                    out,
                    "{:>12} {:>18} {:>12}",
                    "theta", "pass_probability", "frequency"
                );
                for r in rows {
                    let freq = r
                        .frequency
                        .map_or_else(|| format!("{:>12}", "-"), |f| format!("{f:>12.6}"));
                    let _ = writeln!(out, "{:>12.6} {:>18.12} {freq}", r.theta, r.pass_probability);
                }
            }
            Rows::Pairings(rows) => {
                let _ = writeln!(
                    out,
                    "{:<10} {:<10} {:>14} {:>14} {:>14} {:>14} {:>9}",
                    "detector_a", "detector_b", "p_pp", "p_pa", "p_ap", "p_aa", "n_pp"
                );
                for r in rows {
                    let n = r
                        .n_pp
                        .map_or_else(|| format!("{:>9}", "-"), |n| format!("{n:>9}"));
                    let _ = writeln!(
                        out,
                        "{:<10} {:<10} {:>14.10} {:>14.10} {:>14.10} {:>14.10} {n}",
                        r.detector_a, r.detector_b, r.p_pp, r.p_pa, r.p_ap, r.p_aa
                    );
                }
            }
            Rows::Compare(rows) => {
                let _ = writeln!(out, "equivalence (correlated-rule vs standard-qm):");
                for r in &rows.equivalence {
                    let _ = writeln!(
                        out,
                        "  {:<6} max cell deviation {:.3e}",
                        r.state, r.max_cell_deviation
                    );
                }
                let d = &rows.divergence;
                let _ = writeln!(out, "\ndivergence (local-circular vs standard-qm, parallel polaroids):");
                let _ = writeln!(
                    out,
                    "  p_pp {:.6} vs {:.6}; chi-square {:.1} (dof {}, 99.9% threshold {:.3}); zero-cell counts {}",
                    d.p_pp_local_circular,
                    d.p_pp_standard,
                    d.chi_square,
                    d.dof,
                    d.threshold_999,
                    d.zero_cell_counts
                );
            }
        }
        out.push('\n');
        for check in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {}",
                if check.passed { "PASS" } else { "FAIL" },
                check.name
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}

/// 12 significant digits in scientific notation; the fixed numeric cell
/// format of CSV output.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt_sig12(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

fn opt_u64(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn quote(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}
