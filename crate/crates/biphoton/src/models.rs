//! The three rival descriptions of a polarization-correlated photon pair,
//! as interchangeable engines producing analytic joint distributions and
//! sampled trials.
//!
//! * [`ModelKind::StandardQm`] — the pair is described by a Bell state
//!   vector; the first analyzed photon collapses the pair and the second is
//!   measured on the collapsed state (sequential Born rule).
//! * [`ModelKind::CorrelatedRule`] — each photon carries a definite
//!   polarization at emission and the pair is "correlated": the first
//!   outcome is an even coin, and the twin's conditional pass probability
//!   follows a fixed rule table in the relative orientation of the two
//!   polaroids. The table extends the pass-pass rule to all four outcome
//!   cells; the extension is the unique one reproducing the Bell-state
//!   joint and is validated against it in the test suite.
//! * [`ModelKind::LocalCircular`] — every pair is emitted with a shared
//!   definite handedness (both right or both left, an even coin), each
//!   photon evolves through its own station chain by single-photon rules,
//!   and the two outcomes are independent given the handedness.
//!
//! All engines are pure functions of their inputs (plus an explicit RNG
//! substream for sampling), so trials can run concurrently and merge
//! deterministically.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

use crate::elements::{apply_to_arm, Arm, ElementChain, ElementOperator, OperatorTag};
use crate::state::{BellKind, Handedness, PolarizationState, TwoPhotonState};
use crate::Error;

/// Probabilities closer than this to 0 or 1 are treated as deterministic by
/// the trial sampler: the branch is short-circuited and consumes no
/// randomness. Keeps zero-probability cells at exactly zero counts in the
/// presence of floating-point dust.
pub const DETERMINISTIC_SNAP: f64 = 1e-12;

/// Which description generates outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    StandardQm,
    CorrelatedRule,
    LocalCircular,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::StandardQm,
        ModelKind::CorrelatedRule,
        ModelKind::LocalCircular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::StandardQm => "standard-qm",
            ModelKind::CorrelatedRule => "correlated-rule",
            ModelKind::LocalCircular => "local-circular",
        }
    }
}

/// What the source emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceSpec {
    /// A pair described by (or correlated according to) a Bell state.
    Bell(BellKind),
    /// Each pair both right- or both left-circular, an even coin per pair.
    /// Only meaningful for the correlated-rule and local-circular models.
    CircularPair,
}

impl SourceSpec {
    pub fn name(self) -> &'static str {
        match self {
            SourceSpec::Bell(BellKind::PhiPlus) => "phi-plus",
            SourceSpec::Bell(BellKind::PhiMinus) => "phi-minus",
            SourceSpec::Bell(BellKind::PsiPlus) => "psi-plus",
            SourceSpec::Bell(BellKind::PsiMinus) => "psi-minus",
            SourceSpec::CircularPair => "circular-pair",
        }
    }
}

/// Checks that `model` can consume `source`.
///
/// The standard description needs a state vector (Bell source); the
/// local-circular description needs definite handedness (circular source);
/// the correlated rule accepts both, reading the circular source as the
/// parallel-correlated pairing.
pub fn validate_model_source(model: ModelKind, source: SourceSpec) -> Result<(), Error> {
    match (model, source) {
        (ModelKind::StandardQm, SourceSpec::CircularPair)
        | (ModelKind::LocalCircular, SourceSpec::Bell(_)) => Err(Error::ModelSourceMismatch {
            model,
            source_spec: source,
        }),
        _ => Ok(()),
    }
}

/// A measurement station: an element chain ending in an analyzer
/// (projector-tagged element). The detector behind it clicks iff the photon
/// passes the whole chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StationSetting {
    chain: ElementChain,
    composed: ElementOperator,
}

impl StationSetting {
    pub fn new(chain: ElementChain) -> Result<Self, Error> {
        match chain.elements().last() {
            None => Err(Error::EmptyChain),
            Some(last) if last.tag() != OperatorTag::Projector => {
                Err(Error::SettingMustEndWithAnalyzer)
            }
            Some(_) => {
                let composed = chain.compose()?;
                Ok(Self { chain, composed })
            }
        }
    }

    /// A single polaroid at `theta`.
    pub fn polaroid(theta: f64) -> Self {
        Self::new(ElementChain::single(ElementOperator::polaroid(theta)))
            .expect("single polaroid is a valid setting")
    }

    /// Quarter-wave plate at `plate_axis` followed by a polaroid offset by
    /// +-pi/4: a detector that fires with certainty on photons of
    /// handedness `h` arriving on `arm`, and never on the opposite
    /// handedness.
    pub fn circular_analyzer(h: Handedness, arm: Arm, plate_axis: f64) -> Self {
        use crate::state::PropagationAxis;
        let sign = match (h, arm.propagation_axis()) {
            (Handedness::Right, PropagationAxis::PlusZ)
            | (Handedness::Left, PropagationAxis::MinusZ) => 1.0,
            _ => -1.0,
        };
        Self::new(ElementChain::new(vec![
            ElementOperator::quarter_wave(plate_axis),
            ElementOperator::polaroid(plate_axis + sign * FRAC_PI_4),
        ]))
        .expect("plate + polaroid is a valid setting")
    }

    pub fn chain(&self) -> &ElementChain {
        &self.chain
    }

    /// The composed chain operator (last element leftmost).
    pub fn operator(&self) -> &ElementOperator {
        &self.composed
    }

    /// `Some(axis)` iff the chain is exactly one plain polaroid.
    pub fn plain_polaroid_axis(&self) -> Option<f64> {
        if self.chain.len() != 1 {
            return None;
        }
        self.chain.elements()[0].polaroid_axis()
    }
}

/// Detector outcome at one station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Absorb,
}

impl Outcome {
    pub fn is_pass(self) -> bool {
        matches!(self, Outcome::Pass)
    }

    /// `+1` for pass, `-1` for absorb (the coding used by correlation
    /// estimators).
    pub fn sign(self) -> f64 {
        if self.is_pass() {
            1.0
        } else {
            -1.0
        }
    }

    pub const BOTH: [Outcome; 2] = [Outcome::Pass, Outcome::Absorb];
}

/// Joint probabilities over (pass/absorb at A) x (pass/absorb at B).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub p_pp: f64,
    pub p_pa: f64,
    pub p_ap: f64,
    pub p_aa: f64,
}

impl JointDistribution {
    /// Builds a joint, clamping floating-point dust at the boundaries.
    /// Panics (debug) if the cells are grossly outside a distribution.
    pub fn new(p_pp: f64, p_pa: f64, p_ap: f64, p_aa: f64) -> Self {
        let clamp = |p: f64| {
            debug_assert!((-1e-9..=1.0 + 1e-9).contains(&p), "cell out of range: {p}");
            p.clamp(0.0, 1.0)
        };
        let j = Self {
            p_pp: clamp(p_pp),
            p_pa: clamp(p_pa),
            p_ap: clamp(p_ap),
            p_aa: clamp(p_aa),
        };
        debug_assert!((j.sum() - 1.0).abs() < 1e-9, "cells sum to {}", j.sum());
        j
    }

    pub fn probability(&self, a: Outcome, b: Outcome) -> f64 {
        match (a, b) {
            (Outcome::Pass, Outcome::Pass) => self.p_pp,
            (Outcome::Pass, Outcome::Absorb) => self.p_pa,
            (Outcome::Absorb, Outcome::Pass) => self.p_ap,
            (Outcome::Absorb, Outcome::Absorb) => self.p_aa,
        }
    }

    /// Cells in the fixed order `(pp, pa, ap, aa)`.
    pub fn cells(&self) -> [f64; 4] {
        [self.p_pp, self.p_pa, self.p_ap, self.p_aa]
    }

    pub fn sum(&self) -> f64 {
        self.p_pp + self.p_pa + self.p_ap + self.p_aa
    }

    /// Marginal pass probability at station A.
    pub fn pass_a(&self) -> f64 {
        self.p_pp + self.p_pa
    }

    /// Marginal pass probability at station B.
    pub fn pass_b(&self) -> f64 {
        self.p_pp + self.p_ap
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        self.cells()
            .iter()
            .zip(other.cells())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One simulated pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// The pair's definite handedness, when the model/source carries one
    /// (local-circular always; correlated-rule with the circular source).
    pub hidden: Option<Handedness>,
    pub outcome_a: Outcome,
    pub outcome_b: Outcome,
}

/// Exact joint distribution of `model` fed by `source` and analyzed by the
/// two station settings.
///
/// Errors on invalid model/source pairings, and for the correlated rule on
/// settings other than plain polaroids (the rule table is defined in the
/// polaroids' relative orientation).
pub fn analytic_joint(
    model: ModelKind,
    source: SourceSpec,
    set_a: &StationSetting,
    set_b: &StationSetting,
) -> Result<JointDistribution, Error> {
    validate_model_source(model, source)?;
    match model {
        ModelKind::StandardQm => {
            let SourceSpec::Bell(kind) = source else {
                unreachable!("validated above")
            };
            Ok(standard_qm_joint(
                &TwoPhotonState::bell(kind),
                set_a,
                set_b,
                Arm::First,
            ))
        }
        ModelKind::CorrelatedRule => {
            let theta_a = set_a
                .plain_polaroid_axis()
                .ok_or(Error::PolaroidSettingRequired)?;
            let theta_b = set_b
                .plain_polaroid_axis()
                .ok_or(Error::PolaroidSettingRequired)?;
            let kind = match source {
                SourceSpec::Bell(kind) => kind,
                SourceSpec::CircularPair => BellKind::PhiPlus,
            };
            Ok(correlated_rule_joint(kind, theta_a, theta_b))
        }
        ModelKind::LocalCircular => Ok(local_circular_joint(set_a, set_b)),
    }
}

/// Sequential Born-rule joint for a pair state: the station on
/// `measure_first` is applied first, the pair collapses, and the other
/// station is applied to the collapsed state.
///
/// The result is independent of `measure_first` (the two stations act on
/// different tensor factors); the parameter exists so that order
/// independence is checkable rather than assumed.
pub fn standard_qm_joint(
    state: &TwoPhotonState,
    set_a: &StationSetting,
    set_b: &StationSetting,
    measure_first: Arm,
) -> JointDistribution {
    let (first_set, second_set, first_arm, second_arm) = match measure_first {
        Arm::First => (set_a, set_b, Arm::First, Arm::Second),
        Arm::Second => (set_b, set_a, Arm::Second, Arm::First),
    };

    let mut cells = [[0.0f64; 2]; 2]; // [first outcome][second outcome]
    for (i, first_outcome) in Outcome::BOTH.iter().enumerate() {
        let kraus = match first_outcome {
            Outcome::Pass => *first_set.operator().matrix(),
            Outcome::Absorb => first_set.operator().absorb_kraus(),
        };
        let (collapsed, w1) = crate::elements::apply_matrix_to_arm(state, first_arm, &kraus);
        let Some(collapsed) = collapsed else {
            continue; // zero-probability branch: both cells stay 0
        };
        for (j, second_outcome) in Outcome::BOTH.iter().enumerate() {
            let kraus2 = match second_outcome {
                Outcome::Pass => *second_set.operator().matrix(),
                Outcome::Absorb => second_set.operator().absorb_kraus(),
            };
            let (_, w2) = crate::elements::apply_matrix_to_arm(&collapsed, second_arm, &kraus2);
            cells[i][j] = w1 * w2;
        }
    }

    // map (first, second) back to (A, B)
    let [[pp, pa], [ap, aa]] = cells;
    match measure_first {
        Arm::First => JointDistribution::new(pp, pa, ap, aa),
        Arm::Second => JointDistribution::new(pp, ap, pa, aa),
    }
}

/// Relative-orientation variable of the correlated-rule table: the twin of
/// a passed photon passes with probability `cos^2` of this angle, the twin
/// of an absorbed photon with `sin^2`.
fn pairing_angle(kind: BellKind, theta_a: f64, theta_b: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    match kind {
        BellKind::PhiPlus => theta_b - theta_a,
        BellKind::PhiMinus => theta_b + theta_a,
        BellKind::PsiPlus => theta_a + theta_b - FRAC_PI_2,
        BellKind::PsiMinus => theta_b - theta_a - FRAC_PI_2,
    }
}

/// Correlated-rule joint for polaroids at `theta_a`, `theta_b`.
///
/// The first photon passes with probability 1/2 (a definitely-polarized
/// photon meets a polaroid of unknown relative orientation); the twin's
/// conditional probability follows the frozen rule table.
pub fn correlated_rule_joint(kind: BellKind, theta_a: f64, theta_b: f64) -> JointDistribution {
    let u = pairing_angle(kind, theta_a, theta_b);
    let pass_given_pass = u.cos().powi(2);
    let pass_given_absorb = u.sin().powi(2);
    JointDistribution::new(
        0.5 * pass_given_pass,
        0.5 * (1.0 - pass_given_pass),
        0.5 * pass_given_absorb,
        0.5 * (1.0 - pass_given_absorb),
    )
}

/// Conditional pass probabilities of the correlated-rule table,
/// `[given A pass, given A absorb]`.
pub fn correlated_rule_conditionals(kind: BellKind, theta_a: f64, theta_b: f64) -> [f64; 2] {
    let u = pairing_angle(kind, theta_a, theta_b);
    [u.cos().powi(2), u.sin().powi(2)]
}

/// Joint of the local-circular model conditioned on the pair's handedness:
/// an exact product of the two single-photon chain pass probabilities.
pub fn local_circular_joint_given(
    hidden: Handedness,
    set_a: &StationSetting,
    set_b: &StationSetting,
) -> JointDistribution {
    let (pa, pb) = local_circular_arm_probabilities(hidden, set_a, set_b);
    JointDistribution::new(pa * pb, pa * (1.0 - pb), (1.0 - pa) * pb, (1.0 - pa) * (1.0 - pb))
}

fn local_circular_arm_probabilities(
    hidden: Handedness,
    set_a: &StationSetting,
    set_b: &StationSetting,
) -> (f64, f64) {
    let sa = PolarizationState::circular(hidden, Arm::First.propagation_axis());
    let sb = PolarizationState::circular(hidden, Arm::Second.propagation_axis());
    (
        set_a.operator().pass_probability(&sa).clamp(0.0, 1.0),
        set_b.operator().pass_probability(&sb).clamp(0.0, 1.0),
    )
}

/// Local-circular joint: even average over the shared handedness of the
/// per-handedness product joints.
pub fn local_circular_joint(set_a: &StationSetting, set_b: &StationSetting) -> JointDistribution {
    let r = local_circular_joint_given(Handedness::Right, set_a, set_b);
    let l = local_circular_joint_given(Handedness::Left, set_a, set_b);
    JointDistribution::new(
        0.5 * (r.p_pp + l.p_pp),
        0.5 * (r.p_pa + l.p_pa),
        0.5 * (r.p_ap + l.p_ap),
        0.5 * (r.p_aa + l.p_aa),
    )
}

/// Single-arm pass probability of a chain on the beam emitted by
/// `(model, source)`, with no measurement on the other arm.
pub fn arm_pass_probability(
    model: ModelKind,
    source: SourceSpec,
    arm: Arm,
    chain: &ElementChain,
) -> Result<f64, Error> {
    validate_model_source(model, source)?;
    let op = chain.compose()?;
    match (model, source) {
        (ModelKind::StandardQm, SourceSpec::Bell(kind)) => {
            let (_, w) = apply_to_arm(&TwoPhotonState::bell(kind), arm, &op);
            Ok(w.clamp(0.0, 1.0))
        }
        (ModelKind::LocalCircular | ModelKind::CorrelatedRule, SourceSpec::CircularPair) => {
            let p: f64 = Handedness::BOTH
                .iter()
                .map(|&h| {
                    let s = PolarizationState::circular(h, arm.propagation_axis());
                    0.5 * op.pass_probability(&s)
                })
                .sum();
            Ok(p.clamp(0.0, 1.0))
        }
        // the correlated rule's definite per-photon value is circular; with a
        // Bell pairing it prescribes conditional rules only, not a beam state
        (ModelKind::CorrelatedRule, SourceSpec::Bell(_)) => Err(Error::PolaroidSettingRequired),
        _ => unreachable!("validated above"),
    }
}

/// The collapsed state of the second photon after the first is analyzed by
/// `set_a` with the given outcome, together with that outcome's
/// probability (standard description, Bell source).
pub fn conditional_state(
    kind: BellKind,
    set_a: &StationSetting,
    outcome: Outcome,
) -> Result<(PolarizationState, f64), Error> {
    let state = TwoPhotonState::bell(kind);
    let kraus = match outcome {
        Outcome::Pass => *set_a.operator().matrix(),
        Outcome::Absorb => set_a.operator().absorb_kraus(),
    };
    let (collapsed, weight) = crate::elements::apply_matrix_to_arm(&state, Arm::First, &kraus);
    let Some(collapsed) = collapsed else {
        return Err(Error::ImpossibleOutcome);
    };
    if weight < DETERMINISTIC_SNAP {
        return Err(Error::ImpossibleOutcome);
    }

    // a pure conditional state for the twin exists iff the collapsed pair
    // state is a product state
    let [xx, xy, yx, yy] = collapsed.amplitudes();
    let cross = xx * yy - xy * yx;
    if cross.norm() > 1e-9 {
        return Err(Error::ConditionalStateNotPure);
    }
    let row0 = xx.norm_sqr() + xy.norm_sqr();
    let row1 = yx.norm_sqr() + yy.norm_sqr();
    let (bx, by) = if row0 >= row1 { (xx, xy) } else { (yx, yy) };
    let second = PolarizationState::new(bx, by)?;
    Ok((second, weight))
}

/// Precomputed per-trial sampler for one (model, source, settings) tuple.
///
/// Draw order within a trial: hidden handedness (when the pair carries
/// one), then the A outcome, then the B outcome. Branches whose probability
/// is within [`DETERMINISTIC_SNAP`] of 0 or 1 are short-circuited and
/// consume no randomness, which affects stream alignment but never the
/// distribution.
#[derive(Debug, Clone)]
pub struct TrialSampler {
    inner: SamplerInner,
}

#[derive(Debug, Clone)]
enum SamplerInner {
    /// Standard description: collapse then conditional.
    Collapse {
        p_pass_a: f64,
        p_pass_b_given: [f64; 2],
    },
    /// Correlated rule: even coin at A, rule table for B; the hidden
    /// handedness is drawn (and recorded) for the circular source.
    RuleTable {
        draw_hidden: bool,
        p_pass_b_given: [f64; 2],
    },
    /// Local circular: hidden handedness, then independent outcomes.
    FactorizedHidden { arm_probs: [(f64, f64); 2] },
}

impl TrialSampler {
    pub fn new(
        model: ModelKind,
        source: SourceSpec,
        set_a: &StationSetting,
        set_b: &StationSetting,
    ) -> Result<Self, Error> {
        validate_model_source(model, source)?;
        let inner = match model {
            ModelKind::StandardQm => {
                let SourceSpec::Bell(kind) = source else {
                    unreachable!("validated above")
                };
                let state = TwoPhotonState::bell(kind);
                let mut p_pass_b_given = [0.0f64; 2];
                let mut p_pass_a = 0.0;
                for (i, outcome_a) in Outcome::BOTH.iter().enumerate() {
                    let kraus = match outcome_a {
                        Outcome::Pass => *set_a.operator().matrix(),
                        Outcome::Absorb => set_a.operator().absorb_kraus(),
                    };
                    let (collapsed, w) =
                        crate::elements::apply_matrix_to_arm(&state, Arm::First, &kraus);
                    if outcome_a.is_pass() {
                        p_pass_a = w.clamp(0.0, 1.0);
                    }
                    if let Some(collapsed) = collapsed {
                        let (_, wb) = apply_to_arm(&collapsed, Arm::Second, set_b.operator());
                        p_pass_b_given[i] = wb.clamp(0.0, 1.0);
                    }
                }
                SamplerInner::Collapse {
                    p_pass_a,
                    p_pass_b_given,
                }
            }
            ModelKind::CorrelatedRule => {
                let theta_a = set_a
                    .plain_polaroid_axis()
                    .ok_or(Error::PolaroidSettingRequired)?;
                let theta_b = set_b
                    .plain_polaroid_axis()
                    .ok_or(Error::PolaroidSettingRequired)?;
                let (kind, draw_hidden) = match source {
                    SourceSpec::Bell(kind) => (kind, false),
                    SourceSpec::CircularPair => (BellKind::PhiPlus, true),
                };
                SamplerInner::RuleTable {
                    draw_hidden,
                    p_pass_b_given: correlated_rule_conditionals(kind, theta_a, theta_b),
                }
            }
            ModelKind::LocalCircular => {
                let arm_probs = [
                    local_circular_arm_probabilities(Handedness::Right, set_a, set_b),
                    local_circular_arm_probabilities(Handedness::Left, set_a, set_b),
                ];
                SamplerInner::FactorizedHidden { arm_probs }
            }
        };
        Ok(Self { inner })
    }

    /// Draws one pair. Deterministic given the RNG state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialRecord {
        match &self.inner {
            SamplerInner::Collapse {
                p_pass_a,
                p_pass_b_given,
            } => {
                let outcome_a = draw_outcome(*p_pass_a, rng);
                let idx = if outcome_a.is_pass() { 0 } else { 1 };
                let outcome_b = draw_outcome(p_pass_b_given[idx], rng);
                TrialRecord {
                    hidden: None,
                    outcome_a,
                    outcome_b,
                }
            }
            SamplerInner::RuleTable {
                draw_hidden,
                p_pass_b_given,
            } => {
                let hidden = draw_hidden.then(|| draw_handedness(rng));
                let outcome_a = draw_outcome(0.5, rng);
                let idx = if outcome_a.is_pass() { 0 } else { 1 };
                let outcome_b = draw_outcome(p_pass_b_given[idx], rng);
                TrialRecord {
                    hidden,
                    outcome_a,
                    outcome_b,
                }
            }
            SamplerInner::FactorizedHidden { arm_probs } => {
                let hidden = draw_handedness(rng);
                let (pa, pb) = match hidden {
                    Handedness::Right => arm_probs[0],
                    Handedness::Left => arm_probs[1],
                };
                TrialRecord {
                    hidden: Some(hidden),
                    outcome_a: draw_outcome(pa, rng),
                    outcome_b: draw_outcome(pb, rng),
                }
            }
        }
    }
}

fn draw_outcome<R: Rng + ?Sized>(p_pass: f64, rng: &mut R) -> Outcome {
    // deterministic branches consume no randomness
    if p_pass < DETERMINISTIC_SNAP {
        return Outcome::Absorb;
    }
    if p_pass > 1.0 - DETERMINISTIC_SNAP {
        return Outcome::Pass;
    }
    if rng.gen::<f64>() < p_pass {
        Outcome::Pass
    } else {
        Outcome::Absorb
    }
}

fn draw_handedness<R: Rng + ?Sized>(rng: &mut R) -> Handedness {
    if rng.gen::<f64>() < 0.5 {
        Handedness::Right
    } else {
        Handedness::Left
    }
}

/// Samples a single pair; see [`TrialSampler`] for the substream contract.
pub fn sample_trial<R: Rng + ?Sized>(
    model: ModelKind,
    source: SourceSpec,
    set_a: &StationSetting,
    set_b: &StationSetting,
    rng: &mut R,
) -> Result<TrialRecord, Error> {
    Ok(TrialSampler::new(model, source, set_a, set_b)?.sample(rng))
}
