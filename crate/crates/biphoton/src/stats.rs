//! Seeded Monte Carlo harness and estimators: tallies, Wilson intervals,
//! pair correlations, CHSH, no-signaling deviation, and Pearson
//! goodness-of-fit.
//!
//! Reproducibility contract: trial `i` of a run draws from the ChaCha
//! substream `(seed, i)` (the stream counter is set to the trial index), so
//! a tally is a pure function of `(inputs, seed, n)` no matter how trials
//! are sharded across threads. Tallies merge by plain counter addition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::Add;

use crate::models::{
    analytic_joint, JointDistribution, ModelKind, Outcome, SourceSpec, StationSetting,
    TrialSampler,
};
use crate::Error;

/// Seed of a reproducible run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

/// RNG for one trial: the base stream keyed by `seed`, stream counter set
/// to the trial index.
pub fn rng_for_trial(seed: RngSeed, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(trial);
    rng
}

/// Derives an independent seed for a labeled sub-run (e.g. the four
/// settings of a CHSH estimate), via a splitmix64 round.
pub fn derive_seed(seed: RngSeed, label: u64) -> RngSeed {
    let mut z = seed.0 ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    RngSeed(z ^ (z >> 31))
}

/// Empirical counterpart of a [`JointDistribution`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub n_pp: u64,
    pub n_pa: u64,
    pub n_ap: u64,
    pub n_aa: u64,
}

impl Tally {
    pub fn record(&mut self, a: Outcome, b: Outcome) {
        match (a, b) {
            (Outcome::Pass, Outcome::Pass) => self.n_pp += 1,
            (Outcome::Pass, Outcome::Absorb) => self.n_pa += 1,
            (Outcome::Absorb, Outcome::Pass) => self.n_ap += 1,
            (Outcome::Absorb, Outcome::Absorb) => self.n_aa += 1,
        }
    }

    pub fn count(&self, a: Outcome, b: Outcome) -> u64 {
        match (a, b) {
            (Outcome::Pass, Outcome::Pass) => self.n_pp,
            (Outcome::Pass, Outcome::Absorb) => self.n_pa,
            (Outcome::Absorb, Outcome::Pass) => self.n_ap,
            (Outcome::Absorb, Outcome::Absorb) => self.n_aa,
        }
    }

    /// Counts in the fixed order `(pp, pa, ap, aa)`.
    pub fn counts(&self) -> [u64; 4] {
        [self.n_pp, self.n_pa, self.n_ap, self.n_aa]
    }

    pub fn n_total(&self) -> u64 {
        self.n_pp + self.n_pa + self.n_ap + self.n_aa
    }

    pub fn frequency(&self, a: Outcome, b: Outcome) -> f64 {
        self.count(a, b) as f64 / self.n_total() as f64
    }

    /// Empirical joint distribution.
    pub fn frequencies(&self) -> JointDistribution {
        let n = self.n_total() as f64;
        JointDistribution::new(
            self.n_pp as f64 / n,
            self.n_pa as f64 / n,
            self.n_ap as f64 / n,
            self.n_aa as f64 / n,
        )
    }
}

impl Add for Tally {
    type Output = Tally;

    fn add(self, rhs: Tally) -> Tally {
        Tally {
            n_pp: self.n_pp + rhs.n_pp,
            n_pa: self.n_pa + rhs.n_pa,
            n_ap: self.n_ap + rhs.n_ap,
            n_aa: self.n_aa + rhs.n_aa,
        }
    }
}

/// Runs `n` trials of the given experiment and tallies the outcomes.
///
/// Trials execute in parallel; determinism is guaranteed by the per-trial
/// substream derivation and the commutative tally merge.
pub fn run_trials(
    model: ModelKind,
    source: SourceSpec,
    set_a: &StationSetting,
    set_b: &StationSetting,
    n: u64,
    seed: RngSeed,
) -> Result<Tally, Error> {
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    let sampler = TrialSampler::new(model, source, set_a, set_b)?;
    let base = ChaCha8Rng::seed_from_u64(seed.0);
    let tally = (0..n)
        .into_par_iter()
        .fold(Tally::default, |mut acc, i| {
            let mut rng = base.clone();
            rng.set_stream(i);
            let t = sampler.sample(&mut rng);
            acc.record(t.outcome_a, t.outcome_b);
            acc
        })
        .reduce(Tally::default, |a, b| a + b);
    Ok(tally)
}

/// Point estimate of a cell probability with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// 97.5th percentile of the standard normal (two-sided 95%).
const Z_95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `successes` out of `n`. The boundary
/// cases pin to exactly 0 and 1.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    assert!(n >= 1, "Wilson interval needs at least one observation");
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let low = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if successes == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low, high)
}

/// Estimate of one tally cell with its 95% Wilson interval.
pub fn estimate_cell(tally: &Tally, a: Outcome, b: Outcome) -> Estimate {
    let n = tally.n_total();
    assert!(n >= 1, "cannot estimate from an empty tally");
    let k = tally.count(a, b);
    let (ci_low, ci_high) = wilson_interval(k, n);
    Estimate {
        frequency: k as f64 / n as f64,
        ci_low,
        ci_high,
    }
}

/// Pair correlation with outcomes coded pass = +1, absorb = -1:
/// `E = p_pp + p_aa - p_pa - p_ap`.
pub fn correlation_e(j: &JointDistribution) -> f64 {
    j.p_pp + j.p_aa - j.p_pa - j.p_ap
}

/// The four analyzer settings of a CHSH estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Default for ChshSettings {
    /// The standard maximal-violation geometry `(0, pi/4, pi/8, 3pi/8)`.
    fn default() -> Self {
        use std::f64::consts::PI;
        ChshSettings {
            a: 0.0,
            a_prime: PI / 4.0,
            b: PI / 8.0,
            b_prime: 3.0 * PI / 8.0,
        }
    }
}

/// The four correlations and their CHSH combination
/// `S = E(a,b) - E(a,b') + E(a',b) + E(a',b')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e_ab: f64,
    pub e_ab_prime: f64,
    pub e_a_prime_b: f64,
    pub e_a_prime_b_prime: f64,
    pub s: f64,
}

impl ChshResult {
    fn from_correlations(e_ab: f64, e_ab_prime: f64, e_a_prime_b: f64, e_a_prime_b_prime: f64) -> Self {
        ChshResult {
            e_ab,
            e_ab_prime,
            e_a_prime_b,
            e_a_prime_b_prime,
            s: e_ab - e_ab_prime + e_a_prime_b + e_a_prime_b_prime,
        }
    }

    /// `|S| <= 2`, the bound obeyed by factorized local models.
    pub fn within_classical_bound(&self) -> bool {
        self.s.abs() <= 2.0 + 1e-12
    }
}

/// Analytic CHSH value of a model at the four polaroid settings.
pub fn chsh(
    model: ModelKind,
    source: SourceSpec,
    settings: ChshSettings,
) -> Result<ChshResult, Error> {
    let e = |ta: f64, tb: f64| -> Result<f64, Error> {
        Ok(correlation_e(&analytic_joint(
            model,
            source,
            &StationSetting::polaroid(ta),
            &StationSetting::polaroid(tb),
        )?))
    };
    Ok(ChshResult::from_correlations(
        e(settings.a, settings.b)?,
        e(settings.a, settings.b_prime)?,
        e(settings.a_prime, settings.b)?,
        e(settings.a_prime, settings.b_prime)?,
    ))
}

/// Empirical CHSH value from `n` trials per setting pair. Setting pair `k`
/// uses the derived seed `derive_seed(seed, k)`.
pub fn chsh_sampled(
    model: ModelKind,
    source: SourceSpec,
    settings: ChshSettings,
    n: u64,
    seed: RngSeed,
) -> Result<ChshResult, Error> {
    let pairs = [
        (settings.a, settings.b),
        (settings.a, settings.b_prime),
        (settings.a_prime, settings.b),
        (settings.a_prime, settings.b_prime),
    ];
    let mut e = [0.0f64; 4];
    for (k, (ta, tb)) in pairs.iter().enumerate() {
        let tally = run_trials(
            model,
            source,
            &StationSetting::polaroid(*ta),
            &StationSetting::polaroid(*tb),
            n,
            derive_seed(seed, k as u64),
        )?;
        e[k] = correlation_e(&tally.frequencies());
    }
    Ok(ChshResult::from_correlations(e[0], e[1], e[2], e[3]))
}

/// Largest deviation of station B's pass marginal across A settings,
/// relative to the first setting (analytic). Zero for every non-signaling
/// model.
pub fn no_signaling_deviation(
    model: ModelKind,
    source: SourceSpec,
    a_settings: &[StationSetting],
    set_b: &StationSetting,
) -> Result<f64, Error> {
    if a_settings.len() < 2 {
        return Err(Error::NotEnoughSettings);
    }
    let reference = analytic_joint(model, source, &a_settings[0], set_b)?.pass_b();
    let mut max_dev: f64 = 0.0;
    for set_a in &a_settings[1..] {
        let marginal = analytic_joint(model, source, set_a, set_b)?.pass_b();
        max_dev = max_dev.max((marginal - reference).abs());
    }
    Ok(max_dev)
}

/// Pearson goodness-of-fit of a tally against an analytic joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    /// Pearson statistic over the cells with non-zero expected probability.
    pub statistic: f64,
    /// Non-zero cells minus one.
    pub dof: usize,
    /// Cells with zero expected probability that nevertheless collected
    /// counts: direct evidence against the model, reported separately
    /// because the statistic cannot absorb a division by zero.
    pub zero_cell_violations: Vec<(String, u64)>,
}

impl GofReport {
    /// True when the sample is consistent with the model at the 99.9%
    /// level: the statistic is below the quantile and no zero-probability
    /// cell collected counts.
    pub fn consistent_at_999(&self) -> bool {
        self.zero_cell_violations.is_empty() && self.statistic <= chi2_quantile_999(self.dof)
    }
}

const CELL_NAMES: [&str; 4] = ["pp", "pa", "ap", "aa"];

/// 99.9% quantiles of the chi-square distribution for 1..=3 degrees of
/// freedom (a four-cell table never needs more).
const CHI2_Q999: [f64; 3] = [
    10.827_566_170_662_733,
    13.815_510_557_964_274,
    16.266_236_196_238_13,
];

pub fn chi2_quantile_999(dof: usize) -> f64 {
    assert!((1..=3).contains(&dof), "dof {dof} out of range for a 2x2 table");
    CHI2_Q999[dof - 1]
}

/// Pearson statistic of `tally` against the expected `joint`.
///
/// Cells with zero expected probability are excluded from the statistic;
/// any counts they collected are returned as model violations. Errors when
/// a non-zero cell has expected count below 5 (the chi-square approximation
/// would be unreliable).
pub fn chi_square_gof(tally: &Tally, joint: &JointDistribution) -> Result<GofReport, Error> {
    let n = tally.n_total() as f64;
    let mut statistic = 0.0;
    let mut nonzero_cells = 0usize;
    let mut zero_cell_violations = Vec::new();

    for (idx, (count, p)) in tally.counts().iter().zip(joint.cells()).enumerate() {
        if p <= 0.0 {
            if *count > 0 {
                zero_cell_violations.push((CELL_NAMES[idx].to_string(), *count));
            }
            continue;
        }
        let expected = n * p;
        if expected < 5.0 {
            return Err(Error::LowExpectedCount {
                cell: CELL_NAMES[idx],
                expected,
            });
        }
        nonzero_cells += 1;
        let d = *count as f64 - expected;
        statistic += d * d / expected;
    }

    Ok(GofReport {
        statistic,
        dof: nonzero_cells.saturating_sub(1).max(1),
        zero_cell_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{BellKind, ANALYTIC_TOL};
    use std::f64::consts::{FRAC_PI_4, PI};

    const PHI_PLUS: SourceSpec = SourceSpec::Bell(BellKind::PhiPlus);

    #[test]
    fn parallel_phi_plus_has_exactly_empty_off_cells() {
        let set = StationSetting::polaroid(0.0);
        let tally = run_trials(
            ModelKind::StandardQm,
            PHI_PLUS,
            &set,
            &set,
            100_000,
            RngSeed(7),
        )
        .unwrap();
        assert_eq!(tally.n_pa, 0);
        assert_eq!(tally.n_ap, 0);
        let p = tally.n_pp as f64 / tally.n_total() as f64;
        let sigma = (0.5 * 0.5 / 100_000.0f64).sqrt();
        assert!((p - 0.5).abs() < 4.0 * sigma);
    }

    #[test]
    fn local_circular_parallel_quarter_within_four_sigma() {
        let set = StationSetting::polaroid(0.0);
        let tally = run_trials(
            ModelKind::LocalCircular,
            SourceSpec::CircularPair,
            &set,
            &set,
            100_000,
            RngSeed(7),
        )
        .unwrap();
        let sigma = (0.25 * 0.75 / 100_000.0f64).sqrt();
        assert!((tally.frequency(Outcome::Pass, Outcome::Pass) - 0.25).abs() < 4.0 * sigma);
    }

    #[test]
    fn same_seed_same_tally() {
        let set_a = StationSetting::polaroid(0.1);
        let set_b = StationSetting::polaroid(0.9);
        let run = || {
            run_trials(
                ModelKind::StandardQm,
                PHI_PLUS,
                &set_a,
                &set_b,
                20_000,
                RngSeed(123),
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn zero_trials_is_an_error() {
        let set = StationSetting::polaroid(0.0);
        assert!(matches!(
            run_trials(ModelKind::StandardQm, PHI_PLUS, &set, &set, 0, RngSeed(1)),
            Err(Error::ZeroTrials)
        ));
    }

    #[test]
    fn sharded_runs_merge_to_the_whole() {
        // a shard over trials [lo, hi) with the same substream derivation
        let set_a = StationSetting::polaroid(0.3);
        let set_b = StationSetting::polaroid(1.2);
        let sampler =
            TrialSampler::new(ModelKind::LocalCircular, SourceSpec::CircularPair, &set_a, &set_b)
                .unwrap();
        let shard = |lo: u64, hi: u64| {
            let mut t = Tally::default();
            for i in lo..hi {
                let mut rng = rng_for_trial(RngSeed(42), i);
                let trial = sampler.sample(&mut rng);
                t.record(trial.outcome_a, trial.outcome_b);
            }
            t
        };
        let n = 10_000;
        let merged = shard(0, 1234) + shard(1234, 7000) + shard(7000, n);
        let whole = run_trials(
            ModelKind::LocalCircular,
            SourceSpec::CircularPair,
            &set_a,
            &set_b,
            n,
            RngSeed(42),
        )
        .unwrap();
        assert_eq!(merged, whole);
    }

    #[test]
    fn wilson_interval_frozen_values() {
        // frozen from the closed-form Wilson score computation
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831_530_365_995_6).abs() < 1e-12);
        assert!((hi - 0.596_168_469_634_004_4).abs() < 1e-12);
        assert!(lo > 0.39 && hi < 0.61);

        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);

        let (lo, hi) = wilson_interval(1000, 1000);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0 && lo > 0.99);
    }

    #[test]
    fn estimate_cell_boundaries() {
        let tally = Tally {
            n_pp: 0,
            n_pa: 0,
            n_ap: 0,
            n_aa: 1000,
        };
        let e = estimate_cell(&tally, Outcome::Pass, Outcome::Pass);
        assert_eq!(e.frequency, 0.0);
        assert_eq!(e.ci_low, 0.0);
        let e = estimate_cell(&tally, Outcome::Absorb, Outcome::Absorb);
        assert_eq!(e.frequency, 1.0);
        assert_eq!(e.ci_high, 1.0);
        let mid = Tally {
            n_pp: 50,
            n_pa: 0,
            n_ap: 0,
            n_aa: 50,
        };
        let e = estimate_cell(&mid, Outcome::Pass, Outcome::Pass);
        assert!(e.ci_low <= e.frequency && e.frequency <= e.ci_high);
        assert!((e.frequency - 0.5).abs() < 1e-12);
    }

    /// Deterministic calibration check: across many derived seeds, the 95%
    /// Wilson interval covers the analytic cell value well above the 93%
    /// floor.
    #[test]
    fn wilson_coverage_calibration() {
        let set_a = StationSetting::polaroid(0.0);
        let set_b = StationSetting::polaroid(FRAC_PI_4);
        let p_true = 0.25;
        let runs = 1500u64;
        let mut covered = 0u64;
        for r in 0..runs {
            let tally = run_trials(
                ModelKind::StandardQm,
                PHI_PLUS,
                &set_a,
                &set_b,
                1000,
                derive_seed(RngSeed(11), r),
            )
            .unwrap();
            let e = estimate_cell(&tally, Outcome::Pass, Outcome::Pass);
            if e.ci_low <= p_true && p_true <= e.ci_high {
                covered += 1;
            }
        }
        let coverage = covered as f64 / runs as f64;
        assert!(coverage >= 0.93, "coverage {coverage}");
    }

    #[test]
    fn correlation_examples() {
        let set0 = StationSetting::polaroid(0.0);
        let j = analytic_joint(ModelKind::StandardQm, PHI_PLUS, &set0, &set0).unwrap();
        assert!((correlation_e(&j) - 1.0).abs() < ANALYTIC_TOL);

        let j45 = analytic_joint(
            ModelKind::StandardQm,
            PHI_PLUS,
            &set0,
            &StationSetting::polaroid(FRAC_PI_4),
        )
        .unwrap();
        assert!(correlation_e(&j45).abs() < ANALYTIC_TOL);

        let uniform = JointDistribution::new(0.25, 0.25, 0.25, 0.25);
        assert_eq!(correlation_e(&uniform), 0.0);
    }

    #[test]
    fn chsh_standard_qm_reaches_quantum_maximum() {
        let r = chsh(ModelKind::StandardQm, PHI_PLUS, ChshSettings::default()).unwrap();
        assert!((r.s - 2.0 * std::f64::consts::SQRT_2).abs() < ANALYTIC_TOL, "s={}", r.s);
        assert!(!r.within_classical_bound());
    }

    #[test]
    fn chsh_correlated_rule_matches_standard_qm() {
        let r = chsh(
            ModelKind::CorrelatedRule,
            SourceSpec::CircularPair,
            ChshSettings::default(),
        )
        .unwrap();
        assert!((r.s - 2.0 * std::f64::consts::SQRT_2).abs() < ANALYTIC_TOL);
    }

    #[test]
    fn chsh_local_circular_is_flat_zero() {
        let r = chsh(
            ModelKind::LocalCircular,
            SourceSpec::CircularPair,
            ChshSettings::default(),
        )
        .unwrap();
        assert!(r.s.abs() < ANALYTIC_TOL);
        assert!(r.within_classical_bound());
    }

    #[test]
    fn chsh_invariants_on_sampled_estimates() {
        let r = chsh_sampled(
            ModelKind::StandardQm,
            PHI_PLUS,
            ChshSettings::default(),
            20_000,
            RngSeed(9),
        )
        .unwrap();
        for e in [r.e_ab, r.e_ab_prime, r.e_a_prime_b, r.e_a_prime_b_prime] {
            assert!(e.abs() <= 1.0);
        }
        assert!(r.s.abs() <= 4.0);
        assert!((r.s - 2.0 * std::f64::consts::SQRT_2).abs() < 0.1);
    }

    #[test]
    fn no_signaling_holds_for_all_models() {
        let a_settings: Vec<StationSetting> = [0.0, PI / 3.0, PI / 2.0]
            .iter()
            .map(|&t| StationSetting::polaroid(t))
            .collect();
        let set_b = StationSetting::polaroid(0.4);
        for (model, source) in [
            (ModelKind::StandardQm, PHI_PLUS),
            (ModelKind::CorrelatedRule, SourceSpec::CircularPair),
            (ModelKind::LocalCircular, SourceSpec::CircularPair),
        ] {
            let dev = no_signaling_deviation(model, source, &a_settings, &set_b).unwrap();
            assert!(dev < ANALYTIC_TOL, "{model:?} dev={dev}");
        }
    }

    #[test]
    fn no_signaling_needs_two_settings() {
        let one = vec![StationSetting::polaroid(0.0)];
        assert!(matches!(
            no_signaling_deviation(
                ModelKind::StandardQm,
                PHI_PLUS,
                &one,
                &StationSetting::polaroid(0.0)
            ),
            Err(Error::NotEnoughSettings)
        ));
    }

    #[test]
    fn chi_square_zero_for_exactly_proportional_tally() {
        let j = JointDistribution::new(0.5, 0.25, 0.125, 0.125);
        let tally = Tally {
            n_pp: 4000,
            n_pa: 2000,
            n_ap: 1000,
            n_aa: 1000,
        };
        let report = chi_square_gof(&tally, &j).unwrap();
        assert!(report.statistic.abs() < 1e-9);
        assert_eq!(report.dof, 3);
        assert!(report.zero_cell_violations.is_empty());
        assert!(report.consistent_at_999());
    }

    #[test]
    fn chi_square_accepts_own_model_sample() {
        let set_a = StationSetting::polaroid(0.0);
        let set_b = StationSetting::polaroid(0.6);
        let j = analytic_joint(ModelKind::StandardQm, PHI_PLUS, &set_a, &set_b).unwrap();
        let tally = run_trials(
            ModelKind::StandardQm,
            PHI_PLUS,
            &set_a,
            &set_b,
            100_000,
            RngSeed(31),
        )
        .unwrap();
        let report = chi_square_gof(&tally, &j).unwrap();
        assert!(report.consistent_at_999(), "statistic {}", report.statistic);
    }

    #[test]
    fn chi_square_separates_the_models() {
        // local-circular data against the standard phi+ prediction at
        // parallel settings: effect size |1/4 - 1/2| dominates
        let set = StationSetting::polaroid(0.0);
        let claimed = analytic_joint(ModelKind::StandardQm, PHI_PLUS, &set, &set).unwrap();
        let tally = run_trials(
            ModelKind::LocalCircular,
            SourceSpec::CircularPair,
            &set,
            &set,
            100_000,
            RngSeed(31),
        )
        .unwrap();
        let report = chi_square_gof(&tally, &claimed).unwrap();
        assert!(report.statistic > chi2_quantile_999(report.dof));
        // the zero cells of the claimed joint also collected counts
        assert_eq!(report.zero_cell_violations.len(), 2);
        assert!(!report.consistent_at_999());
    }

    #[test]
    fn chi_square_low_expected_count_is_an_error() {
        let j = JointDistribution::new(0.999, 0.001, 0.0, 0.0);
        let tally = Tally {
            n_pp: 999,
            n_pa: 1,
            n_ap: 0,
            n_aa: 0,
        };
        assert!(matches!(
            chi_square_gof(&tally, &j),
            Err(Error::LowExpectedCount { .. })
        ));
    }

    #[test]
    fn local_circular_never_violates_classical_bound_on_sweep() {
        let grid: Vec<f64> = (0..12).map(|k| k as f64 * PI / 12.0).collect();
        let mut max_s: f64 = 0.0;
        for &a in &grid {
            for &ap in &grid {
                for &b in &grid {
                    for &bp in &grid {
                        let r = chsh(
                            ModelKind::LocalCircular,
                            SourceSpec::CircularPair,
                            ChshSettings {
                                a,
                                a_prime: ap,
                                b,
                                b_prime: bp,
                            },
                        )
                        .unwrap();
                        max_s = max_s.max(r.s.abs());
                    }
                }
            }
        }
        assert!(max_s <= 2.0 + ANALYTIC_TOL, "max |S| = {max_s}");
    }

    #[test]
    fn derived_seeds_differ() {
        let s = RngSeed(7);
        let a = derive_seed(s, 0);
        let b = derive_seed(s, 1);
        assert_ne!(a, b);
        assert_ne!(a, s);
    }

    /// Every cell frequency sits within 4 binomial standard errors of its
    /// analytic value, for the whole model/source matrix at the pinned seed.
    #[test]
    fn empirical_frequencies_track_analytic_joints() {
        let n = 100_000u64;
        let seed = RngSeed(314_159);
        let combos = [
            (ModelKind::StandardQm, PHI_PLUS),
            (ModelKind::StandardQm, SourceSpec::Bell(BellKind::PsiMinus)),
            (ModelKind::CorrelatedRule, SourceSpec::CircularPair),
            (ModelKind::CorrelatedRule, SourceSpec::Bell(BellKind::PhiMinus)),
            (ModelKind::LocalCircular, SourceSpec::CircularPair),
        ];
        let settings = [(0.0, FRAC_PI_4), (0.3, 1.2)];
        for (model, source) in combos {
            for (ta, tb) in settings {
                let set_a = StationSetting::polaroid(ta);
                let set_b = StationSetting::polaroid(tb);
                let joint = analytic_joint(model, source, &set_a, &set_b).unwrap();
                let tally = run_trials(model, source, &set_a, &set_b, n, seed).unwrap();
                for (a, b) in [
                    (Outcome::Pass, Outcome::Pass),
                    (Outcome::Pass, Outcome::Absorb),
                    (Outcome::Absorb, Outcome::Pass),
                    (Outcome::Absorb, Outcome::Absorb),
                ] {
                    let p = joint.probability(a, b);
                    let freq = tally.frequency(a, b);
                    if p <= 0.0 || p >= 1.0 {
                        assert_eq!(freq, p, "{model:?} ({ta},{tb}) cell ({a:?},{b:?})");
                    } else {
                        let sigma = (p * (1.0 - p) / n as f64).sqrt();
                        assert!(
                            (freq - p).abs() <= 4.0 * sigma,
                            "{model:?} ({ta},{tb}) cell ({a:?},{b:?}): {freq} vs {p}"
                        );
                    }
                }
            }
        }
    }
}
