//! Free plane-wave Dirac modes in a periodic one-dimensional box.
//!
//! A mode is labelled by an integer momentum index `r` (momentum
//! `p_r = 2πr/L`) and an energy branch `λ = ±1`. Its free energy is
//! `λ E_r` with `E_r = √(p_r² + m²)` and its spatial part is
//! `u_{λ,r} e^{i p_r z}` for a real two-component spinor `u_{λ,r}`
//! normalised so that `|u|² L = 1`.
//!
//! Every quantity is available in `f64` and, through the `*_in` variants,
//! in any [`Real`] type. The sum kernels use the double-double instantiation
//! because the mode sums cancel by up to eleven decimal orders at large `|r|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Periodic box of length `L` holding a fermion of mass `m` (ħ = c = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct BoxConfig {
    length: f64,
    mass: f64,
}

#[derive(Deserialize)]
struct RawBox {
    length: f64,
    mass: f64,
}

impl TryFrom<RawBox> for BoxConfig {
    type Error = Error;

    fn try_from(raw: RawBox) -> Result<Self> {
        BoxConfig::new(raw.length, raw.mass)
    }
}

impl BoxConfig {
    pub fn new(length: f64, mass: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "box length must be positive and finite, got {length}"
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        Ok(Self { length, mass })
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Wavenumber `k_w = 2πw/L` of the `w`-th spatial harmonic.
    pub fn wavenumber(&self, w: i64) -> f64 {
        momentum(self, w)
    }

    /// Fails unless `k_w < m`, the regime in which the sinc-burst results hold.
    pub fn require_subluminal_harmonic(&self, w: i64) -> Result<()> {
        if w < 1 {
            return Err(Error::InvalidArgument(format!(
                "harmonic index w must be a positive integer, got {w}"
            )));
        }
        let k = self.wavenumber(w);
        if k >= self.mass {
            return Err(Error::Precondition(format!(
                "k_w = 2πw/L = {k} must be below the mass m = {} (w = {w}, L = {})",
                self.mass, self.length
            )));
        }
        Ok(())
    }
}

/// Sign of a mode's free energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Branch {
    Negative,
    Positive,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Negative, Branch::Positive];

    #[inline]
    pub fn sign(self) -> i8 {
        match self {
            Branch::Negative => -1,
            Branch::Positive => 1,
        }
    }

    /// Dense index, `Negative = 0`, `Positive = 1`.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Branch::Negative => 0,
            Branch::Positive => 1,
        }
    }
}

impl TryFrom<i8> for Branch {
    type Error = Error;

    fn try_from(sign: i8) -> Result<Self> {
        match sign {
            -1 => Ok(Branch::Negative),
            1 => Ok(Branch::Positive),
            other => Err(Error::InvalidArgument(format!(
                "branch must be +1 or -1, got {other}"
            ))),
        }
    }
}

impl From<Branch> for i8 {
    fn from(b: Branch) -> i8 {
        b.sign()
    }
}

/// Single-particle plane-wave label `(λ, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub branch: Branch,
    pub r: i64,
}

impl Mode {
    pub const fn new(branch: Branch, r: i64) -> Self {
        Self { branch, r }
    }

    pub const fn negative(r: i64) -> Self {
        Self::new(Branch::Negative, r)
    }

    pub const fn positive(r: i64) -> Self {
        Self::new(Branch::Positive, r)
    }
}

/// Real two-component spinor `u_{λ,r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<T = f64> {
    pub upper: T,
    pub lower: T,
}

pub fn momentum_in<T: Real>(cfg: &BoxConfig, r: i64) -> T {
    let two_pi = T::pi() + T::pi();
    two_pi * T::from_i64(r) / T::from(cfg.length)
}

/// `E_r = √(p_r² + m²)`, the unsigned energy.
pub fn abs_energy_in<T: Real>(cfg: &BoxConfig, r: i64) -> T {
    let p = momentum_in::<T>(cfg, r);
    let m = T::from(cfg.mass);
    (p * p + m * m).sqrt()
}

/// Signed free energy `ε⁽⁰⁾_{λ,r} = λ E_r`.
pub fn energy_in<T: Real>(cfg: &BoxConfig, mode: Mode) -> T {
    let e = abs_energy_in::<T>(cfg, mode.r);
    match mode.branch {
        Branch::Positive => e,
        Branch::Negative => -e,
    }
}

/// Spinor components, evaluated without the `E − m` cancellation of the
/// textbook form on the negative branch.
///
/// The negative-branch zero mode is `(0, √(1/L))`, the eigenvector of
/// `σ_z m` with eigenvalue `−m`.
pub fn spinor_in<T: Real>(cfg: &BoxConfig, mode: Mode) -> Spinor<T> {
    let p = momentum_in::<T>(cfg, mode.r);
    let m = T::from(cfg.mass);
    let l = T::from(cfg.length);
    let two = T::one() + T::one();
    let e = (p * p + m * m).sqrt();
    match mode.branch {
        Branch::Positive => {
            let upper = ((e + m) / (two * l * e)).sqrt();
            Spinor {
                upper,
                lower: upper * p / (e + m),
            }
        }
        Branch::Negative if mode.r == 0 => Spinor {
            upper: T::zero(),
            lower: (T::one() / l).sqrt(),
        },
        Branch::Negative => {
            // N = √((E − m)/(2LE)) = |p|/√(2LE(E + m)); lower = N p/(m − E).
            let p_abs = momentum_in::<T>(cfg, mode.r.abs());
            let upper = p_abs / (two * l * e * (e + m)).sqrt();
            let lower = ((e + m) / (two * l * e)).sqrt();
            let lower = if mode.r > 0 { -lower } else { lower };
            Spinor { upper, lower }
        }
    }
}

#[inline]
pub fn spinor_inner_in<T: Real>(a: &Spinor<T>, b: &Spinor<T>) -> T {
    a.upper * b.upper + a.lower * b.lower
}

/// `p_r = 2πr/L`.
pub fn momentum(cfg: &BoxConfig, r: i64) -> f64 {
    momentum_in::<f64>(cfg, r)
}

/// `ε⁽⁰⁾_{λ,r} = λ E_r`.
pub fn energy(cfg: &BoxConfig, mode: Mode) -> f64 {
    energy_in::<f64>(cfg, mode)
}

pub fn spinor(cfg: &BoxConfig, mode: Mode) -> Spinor {
    spinor_in::<f64>(cfg, mode)
}

pub fn spinor_inner(a: &Spinor, b: &Spinor) -> f64 {
    spinor_inner_in(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use crate::real::Quad;

    fn cfg(l: f64, m: f64) -> BoxConfig {
        BoxConfig::new(l, m).unwrap()
    }

    /// Applies `σ_x p + σ_z m` to a spinor.
    fn apply_free_hamiltonian(c: &BoxConfig, r: i64, u: &Spinor) -> Spinor {
        let p = momentum(c, r);
        let m = c.mass();
        Spinor {
            upper: m * u.upper + p * u.lower,
            lower: p * u.upper - m * u.lower,
        }
    }

    #[test]
    fn momentum_examples() {
        assert_eq!(momentum(&cfg(10.0, 1.0), 0), 0.0);
        assert_relative_eq!(momentum(&cfg(2.0 * PI, 1.0), 3), 3.0, max_relative = 1e-15);
        assert_relative_eq!(momentum(&cfg(10.0, 1.0), 5), PI, max_relative = 1e-15);
    }

    #[test]
    fn energy_examples() {
        let c = cfg(10.0, 1.0);
        assert_eq!(energy(&c, Mode::positive(0)), 1.0);
        assert_eq!(energy(&c, Mode::negative(0)), -1.0);
        assert_relative_eq!(
            energy(&cfg(2.0 * PI, 3.0), Mode::positive(4)),
            5.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn rest_frame_spinors() {
        let c = cfg(4.0, 1.3);
        let up = spinor(&c, Mode::positive(0));
        assert_relative_eq!(up.upper, 0.5, max_relative = 1e-15);
        assert_eq!(up.lower, 0.0);
        let down = spinor(&c, Mode::negative(0));
        assert_eq!(down.upper, 0.0);
        assert_relative_eq!(down.lower, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn negative_zero_mode_is_eigenvector() {
        let c = cfg(7.0, 2.0);
        let u = spinor(&c, Mode::negative(0));
        let hu = apply_free_hamiltonian(&c, 0, &u);
        assert_eq!(hu.upper, 0.0);
        assert_relative_eq!(hu.lower, -2.0 * u.lower, max_relative = 1e-15);
    }

    #[test]
    fn matches_textbook_normalisation_away_from_cancellation() {
        // N_{λ,r} = √((λE+m)/(2LλE)), lower = N p/(λE+m)
        let c = cfg(3.0, 0.7);
        for r in [-9, -2, 1, 4, 11] {
            for b in Branch::BOTH {
                let mode = Mode::new(b, r);
                let e = energy(&c, mode);
                let p = momentum(&c, r);
                let n = ((e + c.mass()) / (2.0 * c.length() * e)).sqrt();
                let u = spinor(&c, mode);
                assert_relative_eq!(u.upper, n, max_relative = 1e-12);
                assert_relative_eq!(u.lower, n * p / (e + c.mass()), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn overlap_square_matches_closed_form() {
        // (u_{λ,r+w}·u_{λ,r})² = (λE_{r+w} λE_r + p_r p_{r+w} + m²) / (2 λE_{r+w} λE_r L²)
        let c = cfg(10.0, 1.0);
        for b in Branch::BOTH {
            for r in -30..30 {
                for w in [-2, -1, 1, 3] {
                    let a = spinor(&c, Mode::new(b, r + w));
                    let u = spinor(&c, Mode::new(b, r));
                    let ea = energy(&c, Mode::new(b, r + w));
                    let eu = energy(&c, Mode::new(b, r));
                    let expected = (ea * eu
                        + momentum(&c, r) * momentum(&c, r + w)
                        + c.mass() * c.mass())
                        / (2.0 * ea * eu * c.length() * c.length());
                    assert_relative_eq!(spinor_inner(&a, &u).powi(2), expected, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn double_double_agrees_with_f64() {
        let c = cfg(10.0, 1.0);
        for r in [-500, -3, 0, 2, 777] {
            for b in Branch::BOTH {
                let mode = Mode::new(b, r);
                let hi = spinor_in::<Quad>(&c, mode);
                let lo = spinor(&c, mode);
                assert_relative_eq!(hi.upper.to_f64(), lo.upper, max_relative = 1e-15, epsilon = 1e-300);
                assert_relative_eq!(hi.lower.to_f64(), lo.lower, max_relative = 1e-15);
                assert_relative_eq!(
                    energy_in::<Quad>(&c, mode).to_f64(),
                    energy(&c, mode),
                    max_relative = 1e-15
                );
            }
        }
    }

    #[test]
    fn rejects_bad_box() {
        assert!(BoxConfig::new(0.0, 1.0).is_err());
        assert!(BoxConfig::new(1.0, -1.0).is_err());
        assert!(BoxConfig::new(f64::NAN, 1.0).is_err());
        assert!(matches!(
            cfg(10.0, 1.0).require_subluminal_harmonic(2),
            Err(Error::Precondition(_))
        ));
        assert!(cfg(10.0, 1.0).require_subluminal_harmonic(1).is_ok());
    }

    #[test]
    fn branch_serde_uses_signs() {
        let m: Mode = serde_json::from_str(r#"{"branch": -1, "r": 4}"#).unwrap();
        assert_eq!(m, Mode::negative(4));
        assert!(serde_json::from_str::<Mode>(r#"{"branch": 0, "r": 4}"#).is_err());
        assert_eq!(serde_json::to_string(&Mode::positive(-2)).unwrap(), r#"{"branch":1,"r":-2}"#);
    }

    fn arb_box() -> impl Strategy<Value = BoxConfig> {
        (0.5f64..200.0, 0.05f64..20.0).prop_map(|(l, m)| BoxConfig::new(l, m).unwrap())
    }

    fn arb_branch() -> impl Strategy<Value = Branch> {
        prop_oneof![Just(Branch::Negative), Just(Branch::Positive)]
    }

    proptest! {
        #[test]
        fn normalised(c in arb_box(), r in -5000i64..5000, b in arb_branch()) {
            let u = spinor(&c, Mode::new(b, r));
            let norm = spinor_inner(&u, &u) * c.length();
            prop_assert!((norm - 1.0).abs() < 1e-12, "norm·L = {norm}");
        }

        #[test]
        fn branches_orthogonal(c in arb_box(), r in -5000i64..5000) {
            let a = spinor(&c, Mode::positive(r));
            let b = spinor(&c, Mode::negative(r));
            prop_assert!((spinor_inner(&a, &b) * c.length()).abs() < 1e-12);
        }

        #[test]
        fn energy_even_in_r(c in arb_box(), r in -5000i64..5000, b in arb_branch()) {
            prop_assert_eq!(energy(&c, Mode::new(b, r)), energy(&c, Mode::new(b, -r)));
        }

        #[test]
        fn energy_sign_and_gap(c in arb_box(), r in -5000i64..5000, b in arb_branch()) {
            let e = energy(&c, Mode::new(b, r));
            prop_assert!(e.abs() >= c.mass());
            prop_assert_eq!(e.signum() as i8, b.sign());
        }

        #[test]
        fn eigenvector_of_free_hamiltonian(c in arb_box(), r in -5000i64..5000, b in arb_branch()) {
            let mode = Mode::new(b, r);
            let u = spinor(&c, mode);
            let hu = apply_free_hamiltonian(&c, r, &u);
            let e = energy(&c, mode);
            let scale = e.abs() / c.length().sqrt();
            prop_assert!((hu.upper - e * u.upper).abs() <= 1e-12 * scale);
            prop_assert!((hu.lower - e * u.lower).abs() <= 1e-12 * scale);
        }
    }
}
