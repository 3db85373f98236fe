//! Brute-force check of the perturbative shifts: integrate the Dirac equation
//! projected onto a truncated plane-wave basis and measure the energy directly.
//!
//! In the interaction picture the mode coefficients obey
//! `i dc_{λ′,s}/dt = q Σ V_{λ′,s;λ,r}(t) e^{i(ε_{λ′,s} − ε_{λ,r})t} c_{λ,r}`,
//! which is integrated with fixed-step classical RK4 over the time grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{energy, spinor, spinor_inner, BoxConfig, Branch, Mode};
use crate::error::{Error, Result};
use crate::potential::{cis_odd, PotentialSpec};

/// Relative population allowed in the outermost shell of the basis.
pub const BOUNDARY_LEAK_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    /// Modes `|s| ≤ cutoff` on both branches are kept.
    pub cutoff: i64,
    pub charge: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl EvolutionConfig {
    /// Time grid equal to the potential's window and a cutoff of
    /// `|r| + 4·reach`, enough to keep the boundary shell four hops away.
    pub fn covering(spec: &PotentialSpec, initial: Mode, charge: f64, steps: usize) -> Self {
        let w = spec.window();
        Self {
            cutoff: initial.r.abs() + 4 * spec.reach().max(1),
            charge,
            t_start: w.t0(),
            t_end: w.tf(),
            steps,
        }
    }

    pub fn with_charge(self, charge: f64) -> Self {
        Self { charge, ..self }
    }
}

/// Interaction-picture coefficients `c_{λ,s}`, `|s| ≤ cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    cutoff: i64,
    coefficients: Vec<Complex64>,
}

impl StateVector {
    fn basis_state(cutoff: i64, mode: Mode) -> Self {
        let mut s = Self {
            cutoff,
            coefficients: vec![Complex64::new(0.0, 0.0); 2 * (2 * cutoff + 1) as usize],
        };
        let i = s.index(mode).expect("mode within cutoff");
        s.coefficients[i] = Complex64::new(1.0, 0.0);
        s
    }

    fn index(&self, mode: Mode) -> Option<usize> {
        (mode.r.abs() <= self.cutoff)
            .then(|| mode.branch.index() * (2 * self.cutoff + 1) as usize + (mode.r + self.cutoff) as usize)
    }

    fn mode_at(&self, i: usize) -> Mode {
        let width = (2 * self.cutoff + 1) as usize;
        let branch = if i < width { Branch::Negative } else { Branch::Positive };
        Mode::new(branch, (i % width) as i64 - self.cutoff)
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Zero for modes outside the basis.
    pub fn amplitude(&self, mode: Mode) -> Complex64 {
        self.index(mode)
            .map(|i| self.coefficients[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn population(&self, mode: Mode) -> f64 {
        self.amplitude(mode).norm_sqr()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Mode, Complex64)> + '_ {
        self.coefficients.iter().enumerate().map(|(i, &c)| (self.mode_at(i), c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `|Σ|c|² − 1|`.
    pub fn norm_drift(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }
}

struct Coupling {
    dest: usize,
    src: usize,
    harmonic: usize,
    /// `L (u_dest·u_src)`
    weight: f64,
}

struct Propagator<'a> {
    mass: f64,
    spec: &'a PotentialSpec,
    energies: Vec<f64>,
    couplings: Vec<Coupling>,
    charge: f64,
}

impl Propagator<'_> {
    /// `dc/dt` at time `t`.
    fn rhs(&self, t: f64, c: &[Complex64], out: &mut [Complex64], scratch: &mut Scratch) {
        for (k, h) in self.spec.harmonics().iter().enumerate() {
            scratch.profile[k] = self.spec.harmonic_value(h.n, t, self.mass);
        }
        for (j, &e) in self.energies.iter().enumerate() {
            scratch.phase[j] = cis_odd(e * t);
            scratch.rotated[j] = scratch.phase[j].conj() * c[j];
        }
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for cp in &self.couplings {
            out[cp.dest] += scratch.profile[cp.harmonic] * cp.weight * scratch.rotated[cp.src];
        }
        let factor = Complex64::new(0.0, -self.charge);
        for (o, p) in out.iter_mut().zip(&scratch.phase) {
            *o *= factor * p;
        }
    }
}

struct Scratch {
    profile: Vec<Complex64>,
    phase: Vec<Complex64>,
    rotated: Vec<Complex64>,
}

fn validate(spec: &PotentialSpec, initial: Mode, ec: &EvolutionConfig) -> Result<()> {
    if ec.steps < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 time steps, got {}", ec.steps)));
    }
    if !(ec.t_start.is_finite() && ec.t_end.is_finite() && ec.t_start < ec.t_end) {
        return Err(Error::InvalidArgument(format!(
            "time grid needs finite t_start < t_end, got [{}, {}]",
            ec.t_start, ec.t_end
        )));
    }
    let w = spec.window();
    if w.t0() < ec.t_start || w.tf() > ec.t_end {
        return Err(Error::InvalidArgument(format!(
            "potential window [{}, {}] extends beyond the time grid [{}, {}]",
            w.t0(),
            w.tf(),
            ec.t_start,
            ec.t_end
        )));
    }
    if !ec.charge.is_finite() {
        return Err(Error::InvalidArgument("charge must be finite".into()));
    }
    let required = spec.reach() + initial.r.abs();
    if ec.cutoff < required {
        return Err(Error::InvalidArgument(format!(
            "mode cutoff {} below harmonic reach + |r| = {required}",
            ec.cutoff
        )));
    }
    Ok(())
}

/// Evolves the free mode `initial` through the perturbation and returns the
/// final interaction-picture coefficients.
///
/// Fails with [`Error::TruncationLeak`] when the outermost `reach`-wide shell
/// of the basis ends up holding more than [`BOUNDARY_LEAK_LIMIT`] of the norm.
pub fn evolve(cfg: &BoxConfig, spec: &PotentialSpec, initial: Mode, ec: &EvolutionConfig) -> Result<StateVector> {
    validate(spec, initial, ec)?;
    let mut state = StateVector::basis_state(ec.cutoff, initial);
    let dim = state.coefficients.len();

    let modes: Vec<Mode> = (0..dim).map(|i| state.mode_at(i)).collect();
    let spinors: Vec<_> = modes.iter().map(|&m| spinor(cfg, m)).collect();
    let mut couplings = Vec::new();
    for (k, h) in spec.harmonics().iter().enumerate() {
        for (src, m) in modes.iter().enumerate() {
            for b in Branch::BOTH {
                let Some(dest) = state.index(Mode::new(b, m.r + h.n)) else {
                    continue;
                };
                let weight = cfg.length() * spinor_inner(&spinors[dest], &spinors[src]);
                if weight != 0.0 {
                    couplings.push(Coupling {
                        dest,
                        src,
                        harmonic: k,
                        weight,
                    });
                }
            }
        }
    }
    let prop = Propagator {
        mass: cfg.mass(),
        spec,
        energies: modes.iter().map(|&m| energy(cfg, m)).collect(),
        couplings,
        charge: ec.charge,
    };

    let mut scratch = Scratch {
        profile: vec![Complex64::new(0.0, 0.0); spec.harmonics().len()],
        phase: vec![Complex64::new(0.0, 0.0); dim],
        rotated: vec![Complex64::new(0.0, 0.0); dim],
    };
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]);
    let h = (ec.t_end - ec.t_start) / ec.steps as f64;
    let c = &mut state.coefficients;
    for step in 0..ec.steps {
        let t = ec.t_start + step as f64 * h;
        prop.rhs(t, c, &mut k1, &mut scratch);
        for i in 0..dim {
            tmp[i] = c[i] + k1[i] * (0.5 * h);
        }
        prop.rhs(t + 0.5 * h, &tmp, &mut k2, &mut scratch);
        for i in 0..dim {
            tmp[i] = c[i] + k2[i] * (0.5 * h);
        }
        prop.rhs(t + 0.5 * h, &tmp, &mut k3, &mut scratch);
        for i in 0..dim {
            tmp[i] = c[i] + k3[i] * h;
        }
        prop.rhs(t + h, &tmp, &mut k4, &mut scratch);
        for i in 0..dim {
            c[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }

    let reach = spec.reach();
    if reach > 0 {
        let boundary: f64 = state
            .iter()
            .filter(|(m, _)| m.r.abs() > ec.cutoff - reach)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        let total = state.norm_sqr();
        if boundary > BOUNDARY_LEAK_LIMIT * total {
            return Err(Error::TruncationLeak { boundary, total });
        }
    }
    Ok(state)
}

/// `⟨H₀⟩ − ε⁽⁰⁾_initial` for the evolved state, normalised to unit norm so
/// that integrator drift in `Σ|c|²` does not masquerade as an energy change.
pub fn measured_shift(cfg: &BoxConfig, state: &StateVector, initial: Mode) -> f64 {
    let e0 = energy(cfg, initial);
    let weighted: f64 = state
        .iter()
        .map(|(m, c)| c.norm_sqr() * (energy(cfg, m) - e0))
        .sum();
    weighted / state.norm_sqr()
}

/// Estimate of the `q²` coefficient from runs at two charges.
///
/// With `g(q) = shift(q)/q² = a + b q + O(q²)`, returns
/// `a ≈ (q₁ g(q₂) − q₂ g(q₁)) / (q₁ − q₂)`.
pub fn richardson_shift(
    cfg: &BoxConfig,
    spec: &PotentialSpec,
    initial: Mode,
    ec: &EvolutionConfig,
    q1: f64,
    q2: f64,
) -> Result<f64> {
    if !(q1.is_finite() && q2.is_finite() && q1 > 0.0 && q2 > 0.0) {
        return Err(Error::InvalidArgument(format!("charges must be positive, got {q1}, {q2}")));
    }
    if q1 == q2 {
        return Err(Error::InvalidArgument(format!("charges must differ, got {q1} twice")));
    }
    let (a, b) = rayon::join(
        || evolve(cfg, spec, initial, &ec.with_charge(q1)),
        || evolve(cfg, spec, initial, &ec.with_charge(q2)),
    );
    let g1 = measured_shift(cfg, &a?, initial) / (q1 * q1);
    let g2 = measured_shift(cfg, &b?, initial) / (q2 * q2);
    Ok((q1 * g2 - q2 * g1) / (q1 - q2))
}
