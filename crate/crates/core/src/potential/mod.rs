//! The perturbation `V(z,t)`, its matrix elements between free modes, and the
//! first-order transition amplitudes
//! `f_{λ′,s;λ,r} = ∫ V_{λ′,s;λ,r}(t) e^{i(ε_{λ′,s} − ε_{λ,r})t} dt`.
//!
//! A potential is a finite sum of spatial harmonics
//! `V(z,t) = Σ_n v_n(t) e^{i k_n z}` with `k_n = 2πn/L`. The box integral of
//! two plane waves and one harmonic is non-zero only for `n = s − r`, so the
//! matrix element reduces to `L (u_{λ′,s}·u_{λ,r}) v_{s−r}(t)`.

mod spline;
mod table;

pub use table::{build_f_table, FCoefficients, FSource};

use std::collections::BTreeMap;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::basis::{abs_energy_in, energy, spinor, spinor_in, spinor_inner, spinor_inner_in, BoxConfig, Mode};
use crate::error::{Error, Result};
use crate::real::Real;
use spline::ComplexSpline;

/// Support `[t0, tf]` of the perturbation; `V = 0` outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow")]
pub struct TimeWindow {
    t0: f64,
    tf: f64,
}

#[derive(Deserialize)]
struct RawWindow {
    t0: f64,
    tf: f64,
}

impl TryFrom<RawWindow> for TimeWindow {
    type Error = Error;
    fn try_from(raw: RawWindow) -> Result<Self> {
        TimeWindow::new(raw.t0, raw.tf)
    }
}

impl TimeWindow {
    pub fn new(t0: f64, tf: f64) -> Result<Self> {
        if !(t0.is_finite() && tf.is_finite() && t0 < tf) {
            return Err(Error::InvalidArgument(format!(
                "time window needs finite t0 < tf, got [{t0}, {tf}]"
            )));
        }
        Ok(Self { t0, tf })
    }

    /// `[-T, T]`.
    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn duration(&self) -> f64 {
        self.tf - self.t0
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.tf
    }
}

/// Time dependence `v_n(t)` of one spatial harmonic.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `amplitude · sin(m t)/t` with `m` the box mass, equal to `amplitude · m` at `t = 0`.
    SincBurst { amplitude: f64 },
    /// Natural cubic spline through complex samples.
    Sampled(Sampled),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    times: Vec<f64>,
    values: Vec<Complex64>,
    spline: ComplexSpline,
}

impl Sampled {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidPotential(format!(
                "sampled profile has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidPotential(
                "sampled profile needs at least two samples".into(),
            ));
        }
        if times.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("sampled profile has non-finite entries".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPotential(
                "sampled profile times must be strictly increasing".into(),
            ));
        }
        let spline = ComplexSpline::new(times.clone(), values.clone());
        Ok(Self {
            times,
            values,
            spline,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn conj(&self) -> Self {
        let values = self.values.iter().map(|v| v.conj()).collect();
        Self::new(self.times.clone(), values).expect("conjugate of a valid profile")
    }
}

impl Profile {
    pub fn value(&self, t: f64, mass: f64) -> Complex64 {
        match self {
            Profile::SincBurst { amplitude } => {
                let s = if t == 0.0 { mass } else { (mass * t).sin() / t };
                Complex64::new(amplitude * s, 0.0)
            }
            Profile::Sampled(s) => s.spline.eval(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHarmonic", into = "RawHarmonic")]
pub struct HarmonicProfile {
    pub n: i64,
    pub profile: Profile,
}

#[derive(Serialize, Deserialize)]
struct RawHarmonic {
    n: i64,
    profile: RawProfile,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawProfile {
    Sinc {
        amplitude: f64,
    },
    Sampled {
        times: Vec<f64>,
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

impl TryFrom<RawHarmonic> for HarmonicProfile {
    type Error = Error;

    fn try_from(raw: RawHarmonic) -> Result<Self> {
        let profile = match raw.profile {
            RawProfile::Sinc { amplitude } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidPotential("sinc amplitude must be finite".into()));
                }
                Profile::SincBurst { amplitude }
            }
            RawProfile::Sampled { times, re, im } => {
                if re.len() != im.len() {
                    return Err(Error::InvalidPotential(format!(
                        "harmonic {}: re has {} entries, im has {}",
                        raw.n,
                        re.len(),
                        im.len()
                    )));
                }
                let values = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
                Profile::Sampled(Sampled::new(times, values)?)
            }
        };
        Ok(HarmonicProfile { n: raw.n, profile })
    }
}

impl From<HarmonicProfile> for RawHarmonic {
    fn from(h: HarmonicProfile) -> Self {
        let profile = match h.profile {
            Profile::SincBurst { amplitude } => RawProfile::Sinc { amplitude },
            Profile::Sampled(s) => RawProfile::Sampled {
                re: s.values.iter().map(|v| v.re).collect(),
                im: s.values.iter().map(|v| v.im).collect(),
                times: s.times,
            },
        };
        RawHarmonic { n: h.n, profile }
    }
}

/// A real potential `V(z,t) = Σ_n v_n(t) e^{i 2πn z/L}` on a finite time window.
///
/// The charge `q` is not part of the potential; every result is the
/// coefficient of the corresponding power of `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct PotentialSpec {
    harmonics: Vec<HarmonicProfile>,
    window: TimeWindow,
}

#[derive(Deserialize)]
struct RawSpec {
    harmonics: Vec<HarmonicProfile>,
    window: TimeWindow,
}

impl TryFrom<RawSpec> for PotentialSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        PotentialSpec::new(raw.harmonics, raw.window)
    }
}

const HERMITICITY_TOL: f64 = 1e-12;

fn conj_mismatch(a: Complex64, b: Complex64) -> bool {
    (a - b.conj()).norm() > HERMITICITY_TOL * a.norm().max(b.norm()).max(1.0)
}

fn check_hermitian_pair(plus: &HarmonicProfile, minus: &HarmonicProfile) -> Result<()> {
    let bad = || {
        Error::InvalidPotential(format!(
            "potential is not real: v_{}(t) is not the conjugate of v_{}(t)",
            minus.n, plus.n
        ))
    };
    match (&plus.profile, &minus.profile) {
        (Profile::SincBurst { amplitude: a }, Profile::SincBurst { amplitude: b }) => {
            if conj_mismatch(Complex64::new(*a, 0.0), Complex64::new(*b, 0.0)) {
                return Err(bad());
            }
        }
        (Profile::Sampled(a), Profile::Sampled(b)) => {
            if a.times != b.times || a.values.iter().zip(&b.values).any(|(x, y)| conj_mismatch(*x, *y)) {
                return Err(bad());
            }
        }
        _ => return Err(bad()),
    }
    Ok(())
}

impl PotentialSpec {
    /// Validates uniqueness of harmonic indices and that `V` is real,
    /// i.e. `v_{−n}(t) = conj(v_n(t))` for every harmonic.
    pub fn new(mut harmonics: Vec<HarmonicProfile>, window: TimeWindow) -> Result<Self> {
        harmonics.sort_by_key(|h| h.n);
        if let Some(w) = harmonics.windows(2).find(|w| w[0].n == w[1].n) {
            return Err(Error::InvalidPotential(format!("harmonic {} listed twice", w[0].n)));
        }
        let by_n: BTreeMap<i64, &HarmonicProfile> = harmonics.iter().map(|h| (h.n, h)).collect();
        for h in &harmonics {
            let partner = by_n.get(&-h.n).ok_or_else(|| {
                Error::InvalidPotential(format!(
                    "potential is not real: harmonic {} has no partner {}",
                    h.n, -h.n
                ))
            })?;
            check_hermitian_pair(h, partner)?;
        }
        Ok(Self { harmonics, window })
    }

    /// `V = 0` on the given window.
    pub fn zero(window: TimeWindow) -> Self {
        Self {
            harmonics: Vec::new(),
            window,
        }
    }

    /// `4 cos(k_w z) sin(m t)/t` truncated to `[-T, T]`: amplitude 2 at `n = ±w`.
    pub fn sinc_burst(w: i64, half_width: f64) -> Result<Self> {
        if w < 1 {
            return Err(Error::InvalidArgument(format!("w must be positive, got {w}")));
        }
        let h = |n| HarmonicProfile {
            n,
            profile: Profile::SincBurst { amplitude: 2.0 },
        };
        Self::new(vec![h(w), h(-w)], TimeWindow::symmetric(half_width)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidPotential(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("potential serialises")
    }

    pub fn harmonics(&self) -> &[HarmonicProfile] {
        &self.harmonics
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn harmonic(&self, n: i64) -> Option<&HarmonicProfile> {
        self.harmonics
            .binary_search_by_key(&n, |h| h.n)
            .ok()
            .map(|i| &self.harmonics[i])
    }

    /// Largest `|n|` among the harmonics; 0 for `V = 0`.
    pub fn reach(&self) -> i64 {
        self.harmonics.iter().map(|h| h.n.abs()).max().unwrap_or(0)
    }

    /// `v_n(t)`, zero for absent harmonics and outside the window.
    pub fn harmonic_value(&self, n: i64, t: f64, mass: f64) -> Complex64 {
        match self.harmonic(n) {
            Some(h) if self.window.contains(t) => h.profile.value(t, mass),
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

/// `V_{λ′,s;λ,r}(t) = L (u_{λ′,s}·u_{λ,r}) v_{s−r}(t)`.
pub fn matrix_element(cfg: &BoxConfig, spec: &PotentialSpec, dest: Mode, src: Mode, t: f64) -> Complex64 {
    let v = spec.harmonic_value(dest.r - src.r, t, cfg.mass());
    if v == Complex64::new(0.0, 0.0) {
        return v;
    }
    let overlap = spinor_inner(&spinor(cfg, dest), &spinor(cfg, src));
    v * (cfg.length() * overlap)
}

/// Composite Simpson rule with a fixed number of sub-intervals (rounded up to even).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrature {
    pub steps: usize,
}

impl Quadrature {
    pub const fn new(steps: usize) -> Self {
        Self { steps }
    }

    /// Enough steps that `h·ω_max ≤ 0.02` over the window.
    pub fn resolving(window: TimeWindow, max_frequency: f64) -> Self {
        let steps = (window.duration() * max_frequency.max(1e-3) / 0.02).ceil() as usize;
        Self::new(steps.max(16))
    }

    /// Default for an f-table over modes `|r| ≤ window`: resolves the largest
    /// transition frequency `2E_window` plus the profile bandwidth (`m` for
    /// the sinc burst, the sampling Nyquist frequency for sampled profiles).
    pub fn for_table(cfg: &BoxConfig, spec: &PotentialSpec, window: i64) -> Self {
        let bandwidth = spec
            .harmonics()
            .iter()
            .map(|h| match &h.profile {
                Profile::SincBurst { .. } => cfg.mass(),
                Profile::Sampled(s) => {
                    let spacing = s.times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                    std::f64::consts::PI / spacing
                }
            })
            .fold(0.0, f64::max);
        Self::resolving(spec.window(), 2.0 * abs_energy_in::<f64>(cfg, window) + bandwidth)
    }

    fn validated(self) -> Result<Self> {
        if self.steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least 2 steps, got {}",
                self.steps
            )));
        }
        Ok(Self::new(self.steps + self.steps % 2))
    }
}

/// `e^{ix}` with `cis(−x) = conj(cis(x))` bit for bit.
#[inline]
pub(crate) fn cis_odd(x: f64) -> Complex64 {
    let (s, c) = x.abs().sin_cos();
    Complex64::new(c, if x < 0.0 { -s } else { s })
}

/// One harmonic sampled on a Simpson grid with the Simpson weights folded in.
#[derive(Debug, Clone)]
pub(crate) struct WeightedSamples {
    times: Vec<f64>,
    weighted: Vec<Complex64>,
}

impl WeightedSamples {
    pub(crate) fn new(profile: &Profile, window: TimeWindow, mass: f64, quad: Quadrature) -> Result<Self> {
        let quad = quad.validated()?;
        let n = quad.steps;
        let h = window.duration() / n as f64;
        let mut times = Vec::with_capacity(n + 1);
        let mut weighted = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = if i == n { window.tf() } else { window.t0() + i as f64 * h };
            let w = match i {
                0 => 1.0,
                _ if i == n => 1.0,
                _ if i % 2 == 1 => 4.0,
                _ => 2.0,
            } * h
                / 3.0;
            times.push(t);
            weighted.push(profile.value(t, mass) * w);
        }
        Ok(Self { times, weighted })
    }

    /// `∫ v(t) e^{iωt} dt`.
    pub(crate) fn fourier(&self, omega: f64) -> Complex64 {
        self.times
            .iter()
            .zip(&self.weighted)
            .map(|(&t, &v)| v * cis_odd(omega * t))
            .sum()
    }
}

/// Numerical first-order amplitude over the potential's window.
pub fn f_numeric(
    cfg: &BoxConfig,
    spec: &PotentialSpec,
    dest: Mode,
    src: Mode,
    quadrature: Quadrature,
) -> Result<Complex64> {
    let quadrature = quadrature.validated()?;
    let Some(h) = spec.harmonic(dest.r - src.r) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let samples = WeightedSamples::new(&h.profile, spec.window(), cfg.mass(), quadrature)?;
    Ok(numeric_amplitude(cfg, &samples, dest, src))
}

pub(crate) fn numeric_amplitude(cfg: &BoxConfig, samples: &WeightedSamples, dest: Mode, src: Mode) -> Complex64 {
    let overlap = spinor_inner(&spinor(cfg, dest), &spinor(cfg, src));
    let omega = energy(cfg, dest) - energy(cfg, src);
    samples.fourier(omega) * (cfg.length() * overlap)
}

/// Box-regularised Kronecker delta: `L` at zero, else 0.
pub fn delta_l(cfg: &BoxConfig, n: i64) -> f64 {
    if n == 0 {
        cfg.length()
    } else {
        0.0
    }
}

pub(crate) fn f_analytic_sinc_in<T: Real>(
    cfg: &BoxConfig,
    w: i64,
    dest: Mode,
    src: Mode,
) -> Complex<T> {
    if dest.branch != src.branch {
        return Complex::new(T::zero(), T::zero());
    }
    let shift = dest.r - src.r;
    if shift != w && shift != -w {
        return Complex::new(T::zero(), T::zero());
    }
    // Only one of δ_L(w + r − s), δ_L(−w + r − s) survives for w ≠ 0.
    let overlap = spinor_inner_in(&spinor_in::<T>(cfg, dest), &spinor_in::<T>(cfg, src));
    let two_pi = T::pi() + T::pi();
    let l = T::from(cfg.length());
    Complex::new(two_pi * l * overlap, T::zero())
}

/// Infinite-time amplitude for the sinc burst `4 cos(k_w z) sin(m t)/t`:
/// `2π L (u_{λ,s}·u_{λ,r})` for `s = r ± w` on the same branch, zero otherwise.
pub fn f_analytic_sinc(cfg: &BoxConfig, w: i64, dest: Mode, src: Mode) -> Result<Complex64> {
    cfg.require_subluminal_harmonic(w)?;
    Ok(f_analytic_sinc_in::<f64>(cfg, w, dest, src))
}
