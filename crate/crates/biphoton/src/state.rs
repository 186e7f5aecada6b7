//! Polarization state vectors for single photons and photon pairs.
//!
//! Single-photon states are complex Jones vectors over the fixed linear
//! basis `{|x>, |y>}`; pair states live in the product basis
//! `{|xx>, |xy>, |yx>, |yy>}` with the first index belonging to the photon
//! travelling along +z and the second to its twin travelling along -z.
//!
//! Handedness convention: circular basis states are defined relative to each
//! photon's *own* propagation direction, so the sign of the imaginary
//! component flips between the two arms. This is the unique choice (up to a
//! global phase) under which the circular-basis pair `(|R,R> + |L,L>)/sqrt(2)`
//! expands to the linear-basis pair `(|x,x> + |y,y>)/sqrt(2)`.
//!
//! Global phase is never canonicalized; compare states up to phase with
//! [`PolarizationState::overlap`] / [`TwoPhotonState::overlap`] when the
//! phase is immaterial.

use nalgebra::{Vector2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::Error;

/// Tolerance for analytic identities (constructor-level exactness).
pub const ANALYTIC_TOL: f64 = 1e-12;
/// Tolerance for accumulated numeric pipelines.
pub const PIPELINE_TOL: f64 = 1e-9;

/// Circular-polarization handedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    /// The opposite handedness.
    pub fn flipped(self) -> Self {
        match self {
            Handedness::Right => Handedness::Left,
            Handedness::Left => Handedness::Right,
        }
    }

    /// Both values, in a fixed order (used for hidden-variable averages).
    pub const BOTH: [Handedness; 2] = [Handedness::Right, Handedness::Left];
}

/// Direction of flight of a photon; the two photons of a pair take opposite
/// values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagationAxis {
    PlusZ,
    MinusZ,
}

/// The four maximally entangled two-photon polarization states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// Conventional symbol, for report output.
    pub fn symbol(self) -> &'static str {
        match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        }
    }
}

/// Unit Jones vector of one photon in the `{|x>, |y>}` linear basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState {
    v: Vector2<Complex64>,
}

impl PolarizationState {
    /// Builds a state from raw amplitudes, normalizing the result.
    ///
    /// Fails if the amplitudes are not finite or the vector is (numerically)
    /// zero.
    pub fn new(amp_x: Complex64, amp_y: Complex64) -> Result<Self, Error> {
        for c in [amp_x, amp_y] {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFiniteAmplitude);
            }
        }
        let norm = (amp_x.norm_sqr() + amp_y.norm_sqr()).sqrt();
        if norm < 1e-15 {
            return Err(Error::ZeroStateVector);
        }
        Ok(Self {
            v: Vector2::new(amp_x / norm, amp_y / norm),
        })
    }

    /// Linear polarization at angle `theta` (radians, from the lab x axis):
    /// amplitudes `(cos theta, sin theta)`.
    pub fn linear(theta: f64) -> Result<Self, Error> {
        if !theta.is_finite() {
            return Err(Error::NonFiniteAngle(theta));
        }
        Ok(Self {
            v: Vector2::new(
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(theta.sin(), 0.0),
            ),
        })
    }

    /// Circular polarization of the given handedness for a photon flying
    /// along `axis`.
    ///
    /// For +z, Right is `(1, i)/sqrt(2)` and Left is `(1, -i)/sqrt(2)`; for
    /// -z the sign of `i` flips, since handedness is defined relative to the
    /// photon's own propagation direction (see module docs).
    pub fn circular(h: Handedness, axis: PropagationAxis) -> Self {
        let sign = match (h, axis) {
            (Handedness::Right, PropagationAxis::PlusZ) => 1.0,
            (Handedness::Left, PropagationAxis::PlusZ) => -1.0,
            (Handedness::Right, PropagationAxis::MinusZ) => -1.0,
            (Handedness::Left, PropagationAxis::MinusZ) => 1.0,
        };
        Self {
            v: Vector2::new(
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(0.0, sign * FRAC_1_SQRT_2),
            ),
        }
    }

    pub fn amp_x(&self) -> Complex64 {
        self.v.x
    }

    pub fn amp_y(&self) -> Complex64 {
        self.v.y
    }

    pub(crate) fn vector(&self) -> &Vector2<Complex64> {
        &self.v
    }

    pub(crate) fn from_vector_unchecked(v: Vector2<Complex64>) -> Self {
        Self { v }
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.v.dotc(&other.v)
    }

    /// `|<self|other>|`; equals 1 iff the states agree up to a global phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.v.norm_squared()
    }

    /// Probability that this photon passes a polaroid whose axis points
    /// along `direction` (radians): `|<direction|self>|^2`.
    pub fn projection_probability(&self, direction: f64) -> f64 {
        debug_assert!(direction.is_finite());
        let axis = Vector2::new(
            Complex64::new(direction.cos(), 0.0),
            Complex64::new(direction.sin(), 0.0),
        );
        axis.dotc(&self.v).norm_sqr()
    }
}

/// Unit state vector of a photon pair in the `{|xx>, |xy>, |yx>, |yy>}`
/// product basis (first factor: the +z photon).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonState {
    v: Vector4<Complex64>,
}

impl TwoPhotonState {
    /// Builds a pair state from raw amplitudes `(xx, xy, yx, yy)`,
    /// normalizing the result.
    pub fn new(amps: [Complex64; 4]) -> Result<Self, Error> {
        for c in amps {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFiniteAmplitude);
            }
        }
        let v = Vector4::from_row_slice(&amps);
        let norm = v.norm();
        if norm < 1e-15 {
            return Err(Error::ZeroStateVector);
        }
        Ok(Self { v: v / Complex64::new(norm, 0.0) })
    }

    /// One of the four Bell states:
    ///
    /// ```text
    /// phi+- = (|xx> +- |yy>)/sqrt(2)      psi+- = (|xy> +- |yx>)/sqrt(2)
    /// ```
    pub fn bell(kind: BellKind) -> Self {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let v = match kind {
            BellKind::PhiPlus => Vector4::new(r, z, z, r),
            BellKind::PhiMinus => Vector4::new(r, z, z, -r),
            BellKind::PsiPlus => Vector4::new(z, r, r, z),
            BellKind::PsiMinus => Vector4::new(z, r, -r, z),
        };
        Self { v }
    }

    /// Product state `s1 (x) s2` of two single-photon states.
    pub fn product(s1: &PolarizationState, s2: &PolarizationState) -> Self {
        let a = s1.vector();
        let b = s2.vector();
        Self {
            v: Vector4::new(a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y),
        }
    }

    pub fn amp_xx(&self) -> Complex64 {
        self.v[0]
    }

    pub fn amp_xy(&self) -> Complex64 {
        self.v[1]
    }

    pub fn amp_yx(&self) -> Complex64 {
        self.v[2]
    }

    pub fn amp_yy(&self) -> Complex64 {
        self.v[3]
    }

    /// Amplitudes in basis order `(xx, xy, yx, yy)`.
    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.v[0], self.v[1], self.v[2], self.v[3]]
    }

    pub(crate) fn vector(&self) -> &Vector4<Complex64> {
        &self.v
    }

    pub(crate) fn from_vector_unchecked(v: Vector4<Complex64>) -> Self {
        Self { v }
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.v.dotc(&other.v)
    }

    /// `|<self|other>|`; equals 1 iff the states agree up to a global phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.v.norm_squared()
    }

    /// Largest componentwise distance to `other` (no phase alignment).
    pub fn max_component_distance(&self, other: &Self) -> f64 {
        (0..4)
            .map(|i| (self.v[i] - other.v[i]).norm())
            .fold(0.0, f64::max)
    }
}
