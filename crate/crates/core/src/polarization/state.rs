//! Single-photon polarization states on the Poincaré sphere.
//!
//! Amplitudes are stored in the circular basis. The linear states are tied to
//! it by `|H⟩ = (|R⟩+|L⟩)/√2`, `|V⟩ = −i(|R⟩−|L⟩)/√2`, `|D⟩ = (|H⟩+|V⟩)/√2`
//! and `|A⟩ = (|H⟩−|V⟩)/√2`. With these phases `(|LR⟩+|RL⟩)/√2` equals
//! `(|HH⟩+|VV⟩)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::linalg::{CMat2, C64, ONE, ZERO};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Pure polarization state `amp_r|R⟩ + amp_l|L⟩`. The global phase is kept
/// as constructed, since it matters once states are combined into two-photon
/// superpositions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolState {
    amp_r: C64,
    amp_l: C64,
}

impl PolState {
    /// Normalizes the amplitudes.
    pub fn new(amp_r: C64, amp_l: C64) -> Result<Self> {
        let n2 = amp_r.norm_sqr() + amp_l.norm_sqr();
        if !n2.is_finite() || n2 < 1e-300 {
            return Err(Error::NotNormalized(n2));
        }
        let n = n2.sqrt();
        Ok(Self::from_parts(amp_r / n, amp_l / n))
    }

    /// Requires the amplitudes to be normalized already.
    pub fn from_normalized(amp_r: C64, amp_l: C64) -> Result<Self> {
        let n2 = amp_r.norm_sqr() + amp_l.norm_sqr();
        if !((n2 - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self::from_parts(amp_r, amp_l))
    }

    fn from_parts(amp_r: C64, amp_l: C64) -> Self {
        PolState { amp_r, amp_l }
    }

    #[cfg(test)]
    pub(crate) fn raw_unchecked(amp_r: C64, amp_l: C64) -> Self {
        PolState { amp_r, amp_l }
    }

    pub fn amp_r(&self) -> C64 {
        self.amp_r
    }

    pub fn amp_l(&self) -> C64 {
        self.amp_l
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.amp_r, self.amp_l]
    }

    /// `cos(θ/2)|R⟩ + e^{iφ} sin(θ/2)|L⟩`.
    pub fn from_angles(a: PoincareAngle) -> Self {
        let half = a.theta().to_radians() / 2.0;
        let r = C64::new(half.cos(), 0.0);
        let l = C64::from_polar(half.sin(), a.phi().to_radians());
        Self::from_parts(r, l)
    }

    /// Polar and azimuthal angles of the state, in degrees.
    pub fn angles(&self) -> PoincareAngle {
        let theta = 2.0 * self.amp_l.norm().atan2(self.amp_r.norm());
        let phi = if self.amp_l.norm() < 1e-15 || self.amp_r.norm() < 1e-15 {
            0.0
        } else {
            (self.amp_l / self.amp_r).arg()
        };
        PoincareAngle::new(theta.to_degrees(), phi.to_degrees())
    }

    /// The antipodal state on the Poincaré sphere.
    pub fn orthogonal(&self) -> Self {
        Self::from_parts(-self.amp_l.conj(), self.amp_r.conj())
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PolState) -> C64 {
        self.amp_r.conj() * other.amp_r + self.amp_l.conj() * other.amp_l
    }

    /// `|⟨self|other⟩|²`
    pub fn overlap(&self, other: &PolState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> CMat2 {
        CMat2::outer(self.amplitudes(), self.amplitudes())
    }

    /// Same ray up to `tol`, ignoring the global phase.
    pub fn approx_eq(&self, other: &PolState, tol: f64) -> bool {
        let z = other.inner(self);
        if z.norm() < 0.5 {
            return false;
        }
        let u = z / z.norm();
        (self.amp_r - other.amp_r * u).norm() <= tol && (self.amp_l - other.amp_l * u).norm() <= tol
    }
}

/// Position on the Poincaré sphere: `theta` is the polar angle measured from
/// R through H (the RL–HV great circle), `phi` the azimuth toward D. Both are
/// stored in degrees and wrapped into `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareAngle {
    theta: f64,
    phi: f64,
}

fn wrap_deg(x: f64) -> f64 {
    let w = x.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

impl PoincareAngle {
    pub fn new(theta_deg: f64, phi_deg: f64) -> Self {
        PoincareAngle {
            theta: wrap_deg(theta_deg),
            phi: wrap_deg(phi_deg),
        }
    }

    /// A point on the RL–HV great circle.
    pub fn polar(theta_deg: f64) -> Self {
        Self::new(theta_deg, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// The six polarization states used in the analyzers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pol {
    R,
    L,
    H,
    V,
    D,
    A,
}

/// The three mutually unbiased analyzer bases; each is the eigenbasis of one
/// Pauli operator (R/L of σz, H/V of σx, D/A of σy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Circular,
    Rectilinear,
    Diagonal,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Circular, Basis::Rectilinear, Basis::Diagonal];

    pub fn label(&self) -> &'static str {
        match self {
            Basis::Circular => "R/L",
            Basis::Rectilinear => "H/V",
            Basis::Diagonal => "D/A",
        }
    }

    pub fn pauli(&self) -> CMat2 {
        match self {
            Basis::Circular => CMat2::sigma_z(),
            Basis::Rectilinear => CMat2::sigma_x(),
            Basis::Diagonal => CMat2::sigma_y(),
        }
    }

    /// (+1 eigenstate, −1 eigenstate)
    pub fn states(&self) -> (Pol, Pol) {
        match self {
            Basis::Circular => (Pol::R, Pol::L),
            Basis::Rectilinear => (Pol::H, Pol::V),
            Basis::Diagonal => (Pol::D, Pol::A),
        }
    }
}

impl Pol {
    pub const ALL: [Pol; 6] = [Pol::R, Pol::L, Pol::H, Pol::V, Pol::D, Pol::A];

    pub fn state(&self) -> PolState {
        let h = FRAC_1_SQRT_2;
        let (r, l) = match self {
            Pol::R => (ONE, ZERO),
            Pol::L => (ZERO, ONE),
            Pol::H => (C64::new(h, 0.0), C64::new(h, 0.0)),
            Pol::V => (C64::new(0.0, -h), C64::new(0.0, h)),
            Pol::D => (C64::new(0.5, -0.5), C64::new(0.5, 0.5)),
            Pol::A => (C64::new(0.5, 0.5), C64::new(0.5, -0.5)),
        };
        PolState::from_parts(r, l)
    }

    pub fn orthogonal(&self) -> Pol {
        match self {
            Pol::R => Pol::L,
            Pol::L => Pol::R,
            Pol::H => Pol::V,
            Pol::V => Pol::H,
            Pol::D => Pol::A,
            Pol::A => Pol::D,
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            Pol::R | Pol::L => Basis::Circular,
            Pol::H | Pol::V => Basis::Rectilinear,
            Pol::D | Pol::A => Basis::Diagonal,
        }
    }

    /// Eigenvalue of the basis Pauli operator.
    pub fn sign(&self) -> f64 {
        match self {
            Pol::R | Pol::H | Pol::D => 1.0,
            Pol::L | Pol::V | Pol::A => -1.0,
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn letter(&self) -> char {
        match self {
            Pol::R => 'R',
            Pol::L => 'L',
            Pol::H => 'H',
            Pol::V => 'V',
            Pol::D => 'D',
            Pol::A => 'A',
        }
    }

    pub fn from_letter(c: char) -> Option<Pol> {
        match c.to_ascii_uppercase() {
            'R' => Some(Pol::R),
            'L' => Some(Pol::L),
            'H' => Some(Pol::H),
            'V' => Some(Pol::V),
            'D' => Some(Pol::D),
            'A' => Some(Pol::A),
            _ => None,
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Pol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Pol::from_letter(c)
                .ok_or_else(|| Error::InvalidInput(format!("unknown polarization label {s:?}"))),
            _ => Err(Error::InvalidInput(format!("unknown polarization label {s:?}"))),
        }
    }
}

/// An analyzer setting: the XX photon is projected on `proj_xx`, the X photon
/// on `proj_x` (and, in the three-detector scheme, simultaneously on its
/// orthogonal complement).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub proj_xx: PolState,
    pub proj_x: PolState,
}

impl MeasurementSetting {
    pub fn new(proj_xx: PolState, proj_x: PolState) -> Self {
        MeasurementSetting { proj_xx, proj_x }
    }

    pub fn from_pols(xx: Pol, x: Pol) -> Self {
        Self::new(xx.state(), x.state())
    }

    /// Both photons on the RL–HV great circle at the given polar angles.
    pub fn from_polar(theta_xx_deg: f64, theta_x_deg: f64) -> Self {
        Self::new(
            PolState::from_angles(PoincareAngle::polar(theta_xx_deg)),
            PolState::from_angles(PoincareAngle::polar(theta_x_deg)),
        )
    }

    /// Checks that both projectors are normalized.
    pub fn validate(&self) -> Result<()> {
        for s in [&self.proj_xx, &self.proj_x] {
            let n2 = s.amp_r().norm_sqr() + s.amp_l().norm_sqr();
            if !((n2 - 1.0).abs() <= NORM_TOL) {
                return Err(Error::NotNormalized(n2));
            }
        }
        Ok(())
    }

    /// `|ψ_xx⟩ ⊗ |ψ_x⟩` in the (RR, RL, LR, LL) basis.
    pub fn product_vector(&self) -> [C64; 4] {
        product(&self.proj_xx, &self.proj_x)
    }
}

pub(crate) fn product(a: &PolState, b: &PolState) -> [C64; 4] {
    let a = a.amplitudes();
    let b = b.amplitudes();
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Polarization label of one arm: one of the six analyzer states or a polar
/// angle on the RL–HV circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmLabel {
    Pol(Pol),
    Polar(f64),
}

impl ArmLabel {
    pub fn state(&self) -> PolState {
        match self {
            ArmLabel::Pol(p) => p.state(),
            ArmLabel::Polar(t) => PolState::from_angles(PoincareAngle::polar(*t)),
        }
    }
}

/// Name of a measurement setting. Two letters (`LR`: XX on L, X on R) or two
/// polar angles (`p0_45`: θ_XX = 0°, θ_X = 45°).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettingLabel {
    pub xx: ArmLabel,
    pub x: ArmLabel,
}

impl SettingLabel {
    pub fn pols(xx: Pol, x: Pol) -> Self {
        SettingLabel {
            xx: ArmLabel::Pol(xx),
            x: ArmLabel::Pol(x),
        }
    }

    pub fn polar(theta_xx: f64, theta_x: f64) -> Self {
        SettingLabel {
            xx: ArmLabel::Polar(wrap_deg(theta_xx)),
            x: ArmLabel::Polar(wrap_deg(theta_x)),
        }
    }

    pub fn setting(&self) -> MeasurementSetting {
        MeasurementSetting::new(self.xx.state(), self.x.state())
    }

    pub fn as_pols(&self) -> Option<(Pol, Pol)> {
        match (self.xx, self.x) {
            (ArmLabel::Pol(a), ArmLabel::Pol(b)) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_polar(&self) -> Option<(f64, f64)> {
        match (self.xx, self.x) {
            (ArmLabel::Polar(a), ArmLabel::Polar(b)) => Some((a, b)),
            _ => None,
        }
    }
}

fn fmt_angle(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl fmt::Display for SettingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.xx, self.x) {
            (ArmLabel::Pol(a), ArmLabel::Pol(b)) => write!(f, "{a}{b}"),
            (ArmLabel::Polar(a), ArmLabel::Polar(b)) => {
                write!(f, "p{}_{}", fmt_angle(a), fmt_angle(b))
            }
            (ArmLabel::Pol(a), ArmLabel::Polar(b)) => write!(f, "{a}_{}", fmt_angle(b)),
            (ArmLabel::Polar(a), ArmLabel::Pol(b)) => write!(f, "p{}_{b}", fmt_angle(a)),
        }
    }
}

impl FromStr for SettingLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("bad setting label {s:?}"));
        if let Some(rest) = s.strip_prefix('p') {
            let (a, b) = rest.split_once('_').ok_or_else(bad)?;
            let a: f64 = a.parse().map_err(|_| bad())?;
            let b: f64 = b.parse().map_err(|_| bad())?;
            if !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            return Ok(SettingLabel::polar(a, b));
        }
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 2 {
            return Err(bad());
        }
        let xx = Pol::from_letter(chars[0]).ok_or_else(bad)?;
        let x = Pol::from_letter(chars[1]).ok_or_else(bad)?;
        Ok(SettingLabel::pols(xx, x))
    }
}
