//! Second-order change of the vacuum energy.
//!
//! Hole theory sums the single-particle shifts of the `2N+1` sea electrons
//! `(−1, r)`, `|r| ≤ N`, and splits the result as `Y_N + X_{1,N} + X_{2,N}`:
//!
//! * `Y_N`: transitions into the positive branch, weight `E_s + E_r`;
//! * `X_{1,N}`: sea-to-sea transitions with `|s| ≤ N`, weight `−(E_s − E_r)`,
//!   which cancels pairwise under `r ↔ s`;
//! * `X_{2,N}`: sea-to-sea transitions across the cutoff, `s > N` (`X_{2A}`)
//!   and `s < −N` (`X_{2B}`).
//!
//! Field theory evaluates `⟨vac| a†a H₀ a†a |vac⟩` instead. Only the
//! contraction with an occupied source and an empty destination survives,
//! contributing `ε_dest − ε_src` (energies relative to the vacuum itself).
//! With every negative mode filled this reproduces the standard result; with
//! only `|r| ≤ N` filled it reproduces `Y_N + X_{2,N}` term by term.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use crate::real::{Quad, Real};

use crate::basis::{abs_energy_in, energy_in, momentum, BoxConfig, Branch, Mode};
use crate::error::{Error, Result};
use crate::potential::FCoefficients;
use crate::reduce::pairwise;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VacuumDecomposition {
    pub n: i64,
    /// `ΔE_N⁽²⁾`, accumulated independently of the split.
    pub total: f64,
    pub y: f64,
    pub x1: f64,
    pub x2: f64,
    pub x2a: f64,
    pub x2b: f64,
}

/// Which single-particle modes the reference vacuum fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VacuumOccupancy {
    /// Every negative-energy mode.
    Standard,
    /// Negative-energy modes with `|r| ≤ n` only.
    Redefined { n: i64 },
}

impl VacuumOccupancy {
    pub fn is_occupied(&self, mode: Mode) -> bool {
        match *self {
            VacuumOccupancy::Standard => mode.branch == Branch::Negative,
            VacuumOccupancy::Redefined { n } => mode.branch == Branch::Negative && mode.r.abs() <= n,
        }
    }
}

#[derive(Clone, Copy)]
struct Partial {
    total: Quad,
    y: Quad,
    x1: Quad,
    x2a: Quad,
    x2b: Quad,
}

impl Partial {
    fn zero() -> Self {
        let z = Quad::from(0.0);
        Self {
            total: z,
            y: z,
            x1: z,
            x2a: z,
            x2b: z,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            total: self.total + o.total,
            y: self.y + o.y,
            x1: self.x1 + o.x1,
            x2a: self.x2a + o.x2a,
            x2b: self.x2b + o.x2b,
        }
    }
}

fn require_window(f: &FCoefficients, n: i64) -> Result<()> {
    let required = n + f.reach();
    if f.window() < required {
        return Err(Error::WindowTooSmall {
            required,
            actual: f.window(),
        });
    }
    Ok(())
}

/// Hole-theory vacuum shift at cutoff `N` and its decomposition.
///
/// The table window must reach every destination of the sea electrons,
/// `S ≥ N + reach`.
pub fn ht_decomposition(cfg: &BoxConfig, f: &FCoefficients, n: i64) -> Result<VacuumDecomposition> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("cutoff N must be >= 0, got {n}")));
    }
    require_window(f, n)?;

    let partials: Vec<Partial> = (-n..=n)
        .into_par_iter()
        .map(|r| {
            let src = Mode::negative(r);
            let e_r = abs_energy_in::<Quad>(cfg, r);
            let mut p = Partial::zero();
            for (dest, amp) in f.couplings(src) {
                let weight = amp.norm_sqr();
                if weight == Quad::from(0.0) {
                    continue;
                }
                let e_s = abs_energy_in::<Quad>(cfg, dest.r);
                match dest.branch {
                    Branch::Positive => {
                        let term = weight * (e_s + e_r);
                        p.total += term;
                        p.y += term;
                    }
                    Branch::Negative => {
                        let term = -(weight * (e_s - e_r));
                        p.total += term;
                        if dest.r > n {
                            p.x2a += term;
                        } else if dest.r < -n {
                            p.x2b += term;
                        } else {
                            p.x1 += term;
                        }
                    }
                }
            }
            p
        })
        .collect();
    let sum = pairwise(&partials, Partial::zero(), &Partial::add);
    // x2 is formed from the rounded halves so the split is exact as reported.
    let (x2a, x2b) = (sum.x2a.to_f64(), sum.x2b.to_f64());
    Ok(VacuumDecomposition {
        n,
        total: sum.total.to_f64(),
        y: sum.y.to_f64(),
        x1: sum.x1.to_f64(),
        x2: x2a + x2b,
        x2a,
        x2b,
    })
}

pub(crate) fn contraction_value_in<T: Real>(
    cfg: &BoxConfig,
    occ: VacuumOccupancy,
    dest: Mode,
    src: Mode,
) -> T {
    if occ.is_occupied(src) && !occ.is_occupied(dest) {
        energy_in::<T>(cfg, dest) - energy_in::<T>(cfg, src)
    } else {
        T::zero()
    }
}

/// `⟨vac| a†_{src} a_{dest} H₀ a†_{dest} a_{src} |vac⟩` with `H₀` measured from the vacuum.
pub fn contraction_value(cfg: &BoxConfig, occ: VacuumOccupancy, dest: Mode, src: Mode) -> f64 {
    contraction_value_in::<f64>(cfg, occ, dest, src)
}

/// Field-theory vacuum shift `Σ contraction · |f_{dest;src}|²` over the table.
///
/// The standard vacuum is truncated to the table window; the redefined
/// vacuum needs `S ≥ N + reach` so that no transition out of the band is lost.
pub fn qft_vacuum_shift(cfg: &BoxConfig, f: &FCoefficients, occ: VacuumOccupancy) -> Result<f64> {
    if let VacuumOccupancy::Redefined { n } = occ {
        if n < 0 {
            return Err(Error::InvalidArgument(format!("cutoff N must be >= 0, got {n}")));
        }
        require_window(f, n)?;
    }
    let s = f.window();
    let per_source: Vec<Quad> = (-s..=s)
        .into_par_iter()
        .map(|r| {
            Branch::BOTH
                .into_iter()
                .map(|b| Mode::new(b, r))
                .filter(|&src| occ.is_occupied(src))
                .flat_map(|src| {
                    f.couplings(src)
                        .map(move |(dest, amp)| amp.norm_sqr() * contraction_value_in::<Quad>(cfg, occ, dest, src))
                })
                .fold(Quad::from(0.0), |acc, x| acc + x)
        })
        .collect();
    Ok(pairwise(&per_source, Quad::from(0.0), &|a, b| a + b).to_f64())
}

/// Large-`N` limit of the cross-cutoff term for the sinc burst and its halves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct X2Asymptotic {
    /// `−4πL k_w²`.
    pub total: f64,
    /// `−2πL k_w²` from `s > N`.
    pub upper: f64,
    /// `−2πL k_w²` from `s < −N`.
    pub lower: f64,
}

pub fn x2_asymptotic(cfg: &BoxConfig, w: i64) -> Result<X2Asymptotic> {
    cfg.require_subluminal_harmonic(w)?;
    let k = cfg.wavenumber(w);
    let half = -2.0 * PI * cfg.length() * k * k;
    Ok(X2Asymptotic {
        total: 2.0 * half,
        upper: half,
        lower: half,
    })
}

/// Exact cross-cutoff sums at finite `N` for the sinc burst, from the closed
/// form of the spinor overlaps rather than from an amplitude table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct X2Boundary {
    pub n: i64,
    pub upper: f64,
    pub lower: f64,
}

impl X2Boundary {
    pub fn total(&self) -> f64 {
        self.upper + self.lower
    }
}

/// `−2π² Σ (1 + (p_r p_{r±w} + m²)/(E_{r±w} E_r)) (E_{r±w} − E_r)` over the
/// sea electrons whose `±w` neighbour lies beyond the cutoff.
pub fn x2_boundary_sum(cfg: &BoxConfig, w: i64, n: i64) -> Result<X2Boundary> {
    cfg.require_subluminal_harmonic(w)?;
    if n < 0 {
        return Err(Error::InvalidArgument(format!("cutoff N must be >= 0, got {n}")));
    }
    let m2 = cfg.mass() * cfg.mass();
    let term = |r: i64, s: i64| {
        let (er, es) = (abs_energy_in::<f64>(cfg, r), abs_energy_in::<f64>(cfg, s));
        let (pr, ps) = (momentum(cfg, r), momentum(cfg, s));
        // E_s − E_r = (p_s − p_r)(p_s + p_r)/(E_s + E_r)
        let gap = momentum(cfg, s - r) * momentum(cfg, s + r) / (es + er);
        (1.0 + (pr * ps + m2) / (es * er)) * gap
    };
    let upper: f64 = ((n + 1 - w).max(-n)..=n).map(|r| term(r, r + w)).sum();
    let lower: f64 = (-n..=(-n - 1 + w).min(n)).map(|r| term(r, r - w)).sum();
    Ok(X2Boundary {
        n,
        upper: -2.0 * PI * PI * upper,
        lower: -2.0 * PI * PI * lower,
    })
}
