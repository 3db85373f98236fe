//! Second-order single-particle energy shifts.
//!
//! The shift of mode `(λ, r)` is
//! `δε⁽²⁾ = Σ_{λ′,s} |f_{λ′,s;λ,r}|² (ε_{λ′,s} − ε_{λ,r})`; the first-order
//! shift vanishes identically. For the sinc burst the sum collapses to
//! `2π² λ k_w ((p_r + k_w)/E_{r+w} − (p_r − k_w)/E_{r−w})`.

use std::f64::consts::PI;

use serde::Serialize;
use crate::real::{Quad, Real};

use crate::basis::{abs_energy_in, energy_in, momentum, BoxConfig, Mode};
use crate::error::{Error, Result};
use crate::potential::FCoefficients;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftResult {
    pub mode: Mode,
    /// Coefficient of `q²`.
    pub value: f64,
    /// Window `S` of the `s`-sum.
    pub truncation: i64,
}

/// Sums `|f|² Δε` over every in-window destination, accumulating in double-double.
pub fn second_order_shift(cfg: &BoxConfig, f: &FCoefficients, mode: Mode) -> Result<ShiftResult> {
    if !f.contains(mode) {
        return Err(Error::InvalidArgument(format!(
            "mode r = {} lies outside the table window S = {}",
            mode.r,
            f.window()
        )));
    }
    Ok(ShiftResult {
        mode,
        value: second_order_shift_precise(cfg, f, mode).to_f64(),
        truncation: f.window(),
    })
}

pub(crate) fn second_order_shift_precise(cfg: &BoxConfig, f: &FCoefficients, mode: Mode) -> Quad {
    let e0 = energy_in::<Quad>(cfg, mode);
    f.couplings(mode)
        .map(|(dest, amp)| amp.norm_sqr() * (energy_in::<Quad>(cfg, dest) - e0))
        .fold(Quad::from(0.0), |acc, x| acc + x)
}

/// The first-order shift, which vanishes for any perturbation.
pub fn first_order_shift() -> f64 {
    0.0
}

/// `p_a/E_a − p_b/E_b`, rewritten as
/// `m² (p_a² − p_b²) / (E_a E_b (p_a E_b + p_b E_a))` when both momenta share a
/// sign and the direct difference would cancel.
fn velocity_gap(cfg: &BoxConfig, a: i64, b: i64) -> f64 {
    let (pa, pb) = (momentum(cfg, a), momentum(cfg, b));
    let (ea, eb) = (abs_energy_in::<f64>(cfg, a), abs_energy_in::<f64>(cfg, b));
    if pa * pb > 0.0 {
        let m2 = cfg.mass() * cfg.mass();
        m2 * momentum(cfg, a - b) * momentum(cfg, a + b) / (ea * eb * (pa * eb + pb * ea))
    } else {
        pa / ea - pb / eb
    }
}

/// Closed-form second-order shift of mode `(λ, r)` under the sinc burst at harmonic `w`.
pub fn closed_form_shift(cfg: &BoxConfig, w: i64, mode: Mode) -> Result<f64> {
    cfg.require_subluminal_harmonic(w)?;
    let k = cfg.wavenumber(w);
    let lambda = f64::from(mode.branch.sign());
    Ok(2.0 * PI * PI * lambda * k * velocity_gap(cfg, mode.r + w, mode.r - w))
}

/// Evaluates `(p_r + k_w)/E_{r+w} > (p_r − k_w)/E_{r−w}` directly.
pub fn check_sign_inequality(cfg: &BoxConfig, w: i64, r: i64) -> bool {
    let p = momentum(cfg, r);
    let k = cfg.wavenumber(w);
    let lhs = (p + k) / abs_energy_in::<f64>(cfg, r + w);
    let rhs = (p - k) / abs_energy_in::<f64>(cfg, r - w);
    lhs > rhs
}
