//! Jones operators for optical elements, chains of elements, and their
//! action on one arm of a photon pair.
//!
//! A polaroid is the rank-1 projector onto its transmission axis; the
//! blocked outcome absorbs the photon, so it carries no post-state. A
//! waveplate is the unitary retarder `diag(1, exp(-i*delta))` in its own
//! axis frame, rotated to the lab frame. With this phase convention a
//! quarter-wave plate maps a right-circular photon (relative to its own
//! propagation direction, +z arm) to linear polarization at +pi/4 from the
//! plate axis, and a left-circular photon to -pi/4.

use nalgebra::{Matrix2, Vector4};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::state::{PolarizationState, TwoPhotonState};
use crate::Error;

/// Outcome weights below this are the zero branch: the collapse returns no
/// post-state instead of renormalizing floating-point dust into a
/// direction. Far below any probability the samplers can act on.
pub const ZERO_WEIGHT: f64 = 1e-30;

/// Structural tag carried by an operator; the numeric invariant it implies
/// is checked by [`ElementOperator::is_unitary`] / [`is_projector`](ElementOperator::is_projector).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    Unitary,
    Projector,
    /// Mixed products (e.g. polaroid after waveplate) are neither.
    General,
}

/// Which photon of the pair an element acts on: `First` is the +z photon
/// (analyzed by station A), `Second` its -z twin (station B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    First,
    Second,
}

impl Arm {
    /// Propagation direction of the photon on this arm.
    pub fn propagation_axis(self) -> crate::state::PropagationAxis {
        match self {
            Arm::First => crate::state::PropagationAxis::PlusZ,
            Arm::Second => crate::state::PropagationAxis::MinusZ,
        }
    }
}

/// A 2x2 complex Jones operator acting on one photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementOperator {
    m: Matrix2<Complex64>,
    tag: OperatorTag,
}

fn rotation(angle: f64) -> Matrix2<Complex64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    )
}

impl ElementOperator {
    /// The identity element (unitary).
    pub fn identity() -> Self {
        Self {
            m: Matrix2::identity(),
            tag: OperatorTag::Unitary,
        }
    }

    /// Ideal polaroid with transmission axis at `theta` radians from the lab
    /// x axis: the projector `|theta><theta|`.
    ///
    /// Panics if `theta` is not finite.
    pub fn polaroid(theta: f64) -> Self {
        assert!(theta.is_finite(), "polaroid axis must be finite");
        let (s, c) = theta.sin_cos();
        let m = Matrix2::new(
            Complex64::new(c * c, 0.0),
            Complex64::new(c * s, 0.0),
            Complex64::new(c * s, 0.0),
            Complex64::new(s * s, 0.0),
        );
        Self {
            m,
            tag: OperatorTag::Projector,
        }
    }

    /// Retarder with phase `retardance` between its axes, fast axis at
    /// `axis` radians in the lab frame: `R(axis) diag(1, e^{-i retardance}) R(-axis)`.
    ///
    /// Panics if either argument is not finite.
    pub fn waveplate(retardance: f64, axis: f64) -> Self {
        assert!(
            retardance.is_finite() && axis.is_finite(),
            "waveplate parameters must be finite"
        );
        let phase = Complex64::from_polar(1.0, -retardance);
        let plate_frame = Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            phase,
        );
        let r = rotation(axis);
        Self {
            m: r * plate_frame * rotation(-axis),
            tag: OperatorTag::Unitary,
        }
    }

    /// Quarter-wave plate (`retardance = pi/2`) with fast axis at `axis`.
    pub fn quarter_wave(axis: f64) -> Self {
        Self::waveplate(FRAC_PI_2, axis)
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.m
    }

    pub fn tag(&self) -> OperatorTag {
        self.tag
    }

    /// Numeric check of `m^H m = I` within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.m.adjoint() * self.m - Matrix2::identity();
        d.iter().all(|c| c.norm() < tol)
    }

    /// Numeric check of `m^2 = m` and `m^H = m` within `tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        let idem = self.m * self.m - self.m;
        let herm = self.m.adjoint() - self.m;
        idem.iter().all(|c| c.norm() < tol) && herm.iter().all(|c| c.norm() < tol)
    }

    /// Recovers the transmission axis if this operator is a plain polaroid
    /// (a real rank-1 projector); the angle is reported in `[0, pi)`.
    pub fn polaroid_axis(&self) -> Option<f64> {
        if self.tag != OperatorTag::Projector || !self.is_projector(1e-12) {
            return None;
        }
        let real = self.m.iter().all(|c| c.im.abs() < 1e-12);
        let trace = (self.m[(0, 0)] + self.m[(1, 1)]).re;
        if !real || (trace - 1.0).abs() > 1e-12 {
            return None;
        }
        let two_theta = (2.0 * self.m[(0, 1)].re).atan2(self.m[(0, 0)].re - self.m[(1, 1)].re);
        let mut theta = two_theta / 2.0;
        if theta < 0.0 {
            theta += std::f64::consts::PI;
        }
        Some(theta)
    }

    /// The operator applying `self` first and `next` after (`next * self`).
    pub fn then(&self, next: &ElementOperator) -> ElementOperator {
        let tag = match (self.tag, next.tag) {
            (OperatorTag::Unitary, OperatorTag::Unitary) => OperatorTag::Unitary,
            _ => OperatorTag::General,
        };
        ElementOperator {
            m: next.m * self.m,
            tag,
        }
    }

    /// Transmitted amplitude norm squared: the probability that a photon in
    /// state `s` passes this element (chain).
    pub fn pass_probability(&self, s: &PolarizationState) -> f64 {
        (self.m * s.vector()).norm_squared()
    }

    /// Applies the operator as a pass/absorb analyzer: returns the
    /// renormalized transmitted state (or `None` when the transmitted
    /// amplitude vanishes, see [`ZERO_WEIGHT`]) together with the pass
    /// probability.
    pub fn transmit(&self, s: &PolarizationState) -> (Option<PolarizationState>, f64) {
        let out = self.m * s.vector();
        let weight = out.norm_squared();
        if weight < ZERO_WEIGHT {
            return (None, weight);
        }
        let normalized = out / Complex64::new(weight.sqrt(), 0.0);
        (
            Some(PolarizationState::from_vector_unchecked(normalized)),
            weight,
        )
    }

    /// Kraus operator of the complementary (absorb) outcome:
    /// the Hermitian square root of `I - m^H m`.
    ///
    /// For a chain with a single projector this is exactly the projector on
    /// the blocked axis (the idempotent case short-circuits the square
    /// root, which would otherwise turn eigenvalue dust `eps` into matrix
    /// entries of order `sqrt(eps)`); for all-unitary chains it vanishes.
    pub(crate) fn absorb_kraus(&self) -> Matrix2<Complex64> {
        let e = self.m.adjoint() * self.m;
        let h = Matrix2::identity() - e;
        let idempotent_defect = h * h - h;
        if idempotent_defect.iter().all(|c| c.norm() < 1e-12) {
            return h;
        }
        hermitian_sqrt(&h)
    }
}

/// Principal square root of a 2x2 Hermitian positive-semidefinite matrix,
/// via `sqrt(H) = (H + sqrt(det H) I) / sqrt(tr H + 2 sqrt(det H))`.
fn hermitian_sqrt(h: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let trace = (h[(0, 0)] + h[(1, 1)]).re;
    let det = (h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]).re;
    let s = det.max(0.0).sqrt();
    let denom_sq = trace + 2.0 * s;
    if denom_sq <= 1e-30 {
        return Matrix2::zeros();
    }
    let denom = Complex64::new(denom_sq.sqrt(), 0.0);
    (h + Matrix2::identity() * Complex64::new(s, 0.0)) / denom
}

/// An ordered sequence of elements traversed first-to-last by the photon.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementChain {
    elements: Vec<ElementOperator>,
}

impl ElementChain {
    pub fn new(elements: Vec<ElementOperator>) -> Self {
        Self { elements }
    }

    /// Chain holding a single element.
    pub fn single(op: ElementOperator) -> Self {
        Self { elements: vec![op] }
    }

    pub fn push(&mut self, op: ElementOperator) {
        self.elements.push(op);
    }

    pub fn elements(&self) -> &[ElementOperator] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Matrix product in application order (the last element ends up
    /// leftmost). Fails on an empty chain.
    pub fn compose(&self) -> Result<ElementOperator, Error> {
        let (first, rest) = self.elements.split_first().ok_or(Error::EmptyChain)?;
        Ok(rest.iter().fold(*first, |acc, op| acc.then(op)))
    }
}

impl From<ElementOperator> for ElementChain {
    fn from(op: ElementOperator) -> Self {
        ElementChain::single(op)
    }
}

/// Applies `op` to one arm of a pair state (`op (x) I` on the first arm,
/// `I (x) op` on the second) and renormalizes.
///
/// Returns the post-measurement state together with the outcome weight (the
/// squared norm of the unnormalized result). A vanishing weight yields
/// `(None, 0.0)` instead of dividing by zero.
pub fn apply_to_arm(
    state: &TwoPhotonState,
    arm: Arm,
    op: &ElementOperator,
) -> (Option<TwoPhotonState>, f64) {
    apply_matrix_to_arm(state, arm, op.matrix())
}

/// Raw-matrix variant of [`apply_to_arm`], for Kraus operators that are not
/// optical elements themselves.
pub(crate) fn apply_matrix_to_arm(
    state: &TwoPhotonState,
    arm: Arm,
    m: &Matrix2<Complex64>,
) -> (Option<TwoPhotonState>, f64) {
    let v = state.vector();
    let mut out = Vector4::zeros();
    match arm {
        Arm::First => {
            // index layout: 2*i + j with i the first-arm component
            for j in 0..2 {
                out[j] = m[(0, 0)] * v[j] + m[(0, 1)] * v[2 + j];
                out[2 + j] = m[(1, 0)] * v[j] + m[(1, 1)] * v[2 + j];
            }
        }
        Arm::Second => {
            for i in 0..2 {
                out[2 * i] = m[(0, 0)] * v[2 * i] + m[(0, 1)] * v[2 * i + 1];
                out[2 * i + 1] = m[(1, 0)] * v[2 * i] + m[(1, 1)] * v[2 * i + 1];
            }
        }
    }
    let weight = out.norm_squared();
    if weight < ZERO_WEIGHT {
        return (None, weight);
    }
    let normalized = out / Complex64::new(weight.sqrt(), 0.0);
    (
        Some(TwoPhotonState::from_vector_unchecked(normalized)),
        weight,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{BellKind, Handedness, PropagationAxis, ANALYTIC_TOL};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn polaroid_zero_keeps_x_component() {
        let p = ElementOperator::polaroid(0.0);
        let s = PolarizationState::new(Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)).unwrap();
        let (out, w) = p.transmit(&s);
        assert!((w - 0.36).abs() < ANALYTIC_TOL);
        let out = out.unwrap();
        assert!(out.amp_y().norm() < ANALYTIC_TOL);
        assert!((out.amp_x().norm() - 1.0).abs() < ANALYTIC_TOL);
    }

    #[test]
    fn polaroid_obeys_malus_law() {
        let x = PolarizationState::linear(0.0).unwrap();
        for k in 0..48 {
            let theta = k as f64 * PI / 24.0;
            let w = ElementOperator::polaroid(theta).pass_probability(&x);
            assert!((w - theta.cos().powi(2)).abs() < ANALYTIC_TOL);
        }
    }

    #[test]
    fn polaroid_is_idempotent_projector() {
        let p = ElementOperator::polaroid(0.9);
        assert!(p.is_projector(1e-12));
        let twice = p.then(&p);
        let diff = twice.matrix() - p.matrix();
        assert!(diff.iter().all(|c| c.norm() < ANALYTIC_TOL));
    }

    #[test]
    fn polaroid_axis_roundtrip() {
        for k in 0..36 {
            let theta = k as f64 * PI / 36.0;
            let axis = ElementOperator::polaroid(theta).polaroid_axis().unwrap();
            let delta = (axis - theta).abs() % PI;
            assert!(delta < 1e-9 || (PI - delta).abs() < 1e-9, "theta={theta} axis={axis}");
        }
        assert!(ElementOperator::quarter_wave(0.0).polaroid_axis().is_none());
        // a circular projector is a projector but not a polaroid
        let r = PolarizationState::circular(Handedness::Right, PropagationAxis::PlusZ);
        let v = r.vector();
        let m = Matrix2::new(
            v.x * v.x.conj(),
            v.x * v.y.conj(),
            v.y * v.x.conj(),
            v.y * v.y.conj(),
        );
        let circ_proj = ElementOperator {
            m,
            tag: OperatorTag::Projector,
        };
        assert!(circ_proj.is_projector(1e-12));
        assert!(circ_proj.polaroid_axis().is_none());
    }

    #[test]
    fn quarter_wave_maps_circular_to_diagonal_linear() {
        let qwp = ElementOperator::quarter_wave(0.0);
        assert!(qwp.is_unitary(1e-12));

        let r = PolarizationState::circular(Handedness::Right, PropagationAxis::PlusZ);
        let (out, w) = qwp.transmit(&r);
        assert!((w - 1.0).abs() < ANALYTIC_TOL);
        let plus45 = PolarizationState::linear(FRAC_PI_4).unwrap();
        assert!((out.unwrap().overlap(&plus45) - 1.0).abs() < ANALYTIC_TOL);

        let l = PolarizationState::circular(Handedness::Left, PropagationAxis::PlusZ);
        let minus45 = PolarizationState::linear(-FRAC_PI_4).unwrap();
        assert!((qwp.transmit(&l).0.unwrap().overlap(&minus45) - 1.0).abs() < ANALYTIC_TOL);
    }

    #[test]
    fn quarter_wave_respects_own_propagation_handedness() {
        // the -z photon's right-circular state exits at -pi/4 from the axis
        let qwp = ElementOperator::quarter_wave(0.0);
        let r2 = PolarizationState::circular(Handedness::Right, PropagationAxis::MinusZ);
        let minus45 = PolarizationState::linear(-FRAC_PI_4).unwrap();
        assert!((qwp.transmit(&r2).0.unwrap().overlap(&minus45) - 1.0).abs() < ANALYTIC_TOL);
    }

    #[test]
    fn tilted_quarter_wave_shifts_with_axis() {
        let axis = 0.85;
        let qwp = ElementOperator::quarter_wave(axis);
        let r = PolarizationState::circular(Handedness::Right, PropagationAxis::PlusZ);
        let expected = PolarizationState::linear(axis + FRAC_PI_4).unwrap();
        assert!((qwp.transmit(&r).0.unwrap().overlap(&expected) - 1.0).abs() < ANALYTIC_TOL);
    }

    #[test]
    fn compose_identity_and_detector_chains() {
        let id = ElementChain::single(ElementOperator::identity())
            .compose()
            .unwrap();
        assert!((id.matrix() - Matrix2::<Complex64>::identity())
            .iter()
            .all(|c| c.norm() < ANALYTIC_TOL));

        // QWP followed by polaroid at +pi/4 passes every right-circular +z photon
        let detector = ElementChain::new(vec![
            ElementOperator::quarter_wave(0.0),
            ElementOperator::polaroid(FRAC_PI_4),
        ])
        .compose()
        .unwrap();
        let r = PolarizationState::circular(Handedness::Right, PropagationAxis::PlusZ);
        assert!((detector.pass_probability(&r) - 1.0).abs() < ANALYTIC_TOL);

        let crossed = ElementChain::new(vec![
            ElementOperator::quarter_wave(0.0),
            ElementOperator::polaroid(-FRAC_PI_4),
        ])
        .compose()
        .unwrap();
        assert!(crossed.pass_probability(&r) < ANALYTIC_TOL);
    }

    #[test]
    fn compose_rejects_empty_chain() {
        assert!(matches!(
            ElementChain::new(vec![]).compose(),
            Err(Error::EmptyChain)
        ));
    }

    #[test]
    fn apply_to_arm_collapses_phi_plus_to_parallel_product() {
        let phi = TwoPhotonState::bell(BellKind::PhiPlus);
        let a = 0.6;
        let (state, weight) = apply_to_arm(&phi, Arm::First, &ElementOperator::polaroid(a));
        assert!((weight - 0.5).abs() < ANALYTIC_TOL);
        let la = PolarizationState::linear(a).unwrap();
        let expected = TwoPhotonState::product(&la, &la);
        assert!(state.unwrap().max_component_distance(&expected) < ANALYTIC_TOL);
    }

    #[test]
    fn apply_to_arm_identity_is_neutral() {
        let psi = TwoPhotonState::bell(BellKind::PsiMinus);
        let (state, weight) = apply_to_arm(&psi, Arm::Second, &ElementOperator::identity());
        assert!((weight - 1.0).abs() < ANALYTIC_TOL);
        assert!(state.unwrap().max_component_distance(&psi) < ANALYTIC_TOL);
    }

    #[test]
    fn apply_to_arm_psi_plus_cross_collapse() {
        let psi = TwoPhotonState::bell(BellKind::PsiPlus);
        let (state, weight) = apply_to_arm(&psi, Arm::First, &ElementOperator::polaroid(0.0));
        assert!((weight - 0.5).abs() < ANALYTIC_TOL);
        let expected = TwoPhotonState::product(
            &PolarizationState::linear(0.0).unwrap(),
            &PolarizationState::linear(FRAC_PI_2).unwrap(),
        );
        assert!(state.unwrap().max_component_distance(&expected) < ANALYTIC_TOL);
    }

    #[test]
    fn zero_weight_collapse_is_flagged() {
        let x = PolarizationState::linear(0.0).unwrap();
        let xx = TwoPhotonState::product(&x, &x);
        let (state, weight) = apply_to_arm(&xx, Arm::First, &ElementOperator::polaroid(FRAC_PI_2));
        assert!(state.is_none());
        assert!(weight < ZERO_WEIGHT);
    }

    #[test]
    fn absorb_kraus_of_polaroid_is_orthogonal_projector() {
        let n = ElementOperator::polaroid(0.3).absorb_kraus();
        let orth = ElementOperator::polaroid(0.3 + FRAC_PI_2);
        assert!((n - orth.matrix()).iter().all(|c| c.norm() < ANALYTIC_TOL));
    }

    #[test]
    fn single_polaroid_weight_matches_projection_probability() {
        let s = PolarizationState::new(Complex64::new(0.3, 0.5), Complex64::new(-0.4, 0.1)).unwrap();
        for k in 0..24 {
            let theta = k as f64 * PI / 12.0;
            let w = ElementOperator::polaroid(theta).pass_probability(&s);
            assert!((w - s.projection_probability(theta)).abs() < ANALYTIC_TOL);
            assert!((0.0..=1.0 + 1e-12).contains(&w));
        }
    }

    proptest! {
        #[test]
        fn waveplates_are_unitary(delta in 0.0f64..(2.0 * PI), axis in -PI..PI) {
            prop_assert!(ElementOperator::waveplate(delta, axis).is_unitary(1e-12));
        }

        #[test]
        fn unitary_composition_stays_unitary(
            d1 in 0.0f64..(2.0 * PI), a1 in -PI..PI,
            d2 in 0.0f64..(2.0 * PI), a2 in -PI..PI,
        ) {
            let chain = ElementChain::new(vec![
                ElementOperator::waveplate(d1, a1),
                ElementOperator::waveplate(d2, a2),
            ]);
            let composed = chain.compose().unwrap();
            prop_assert_eq!(composed.tag(), OperatorTag::Unitary);
            prop_assert!(composed.is_unitary(1e-12));
        }

        #[test]
        fn arm_operations_commute_across_arms(
            t1 in -PI..PI, d2 in 0.0f64..(2.0*PI), a2 in -PI..PI,
        ) {
            let op1 = ElementOperator::polaroid(t1);
            let op2 = ElementOperator::waveplate(d2, a2);
            let psi = TwoPhotonState::bell(BellKind::PsiMinus);

            let first_then_second = apply_to_arm(&psi, Arm::First, &op1)
                .0
                .map(|s| apply_to_arm(&s, Arm::Second, &op2));
            let second_then_first = apply_to_arm(&psi, Arm::Second, &op2)
                .0
                .map(|s| apply_to_arm(&s, Arm::First, &op1));
            match (first_then_second, second_then_first) {
                (Some((Some(a), _)), Some((Some(b), _))) => {
                    prop_assert!(a.max_component_distance(&b) < 1e-12);
                }
                _ => prop_assert!(false, "unexpected zero-weight branch"),
            }
        }
    }
}
