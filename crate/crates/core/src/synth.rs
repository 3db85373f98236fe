//! Seeded random real potentials for sweeps and property checks.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::potential::{HarmonicProfile, PotentialSpec, Profile, Sampled, TimeWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthOptions {
    /// Harmonic indices are drawn from `0..=max_harmonic`.
    pub max_harmonic: i64,
    /// At most this many distinct `|n|`.
    pub max_count: usize,
    pub duration: f64,
    pub samples: usize,
    /// Scale of the random complex coefficients.
    pub amplitude: f64,
    /// Carrier frequencies are uniform in `[−max_frequency, max_frequency]`.
    pub max_frequency: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            max_harmonic: 3,
            max_count: 3,
            duration: 8.0,
            samples: 161,
            amplitude: 0.4,
            max_frequency: 3.0,
        }
    }
}

/// A real potential with between one and `max_count` harmonics `±n`.
///
/// Each `v_n(t)` is a sum of two random complex carriers under a `sin²`
/// envelope on `[0, duration]`, sampled on a uniform grid; `v_{−n}` is
/// the exact conjugate and `v_0`, when drawn, is real.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, opts: &SynthOptions) -> PotentialSpec {
    let mut pool: Vec<i64> = (0..=opts.max_harmonic.max(1)).collect();
    pool.shuffle(rng);
    let count = rng.gen_range(1..=opts.max_count.clamp(1, pool.len()));
    let samples = opts.samples.max(2);
    let times: Vec<f64> = (0..samples)
        .map(|i| opts.duration * i as f64 / (samples - 1) as f64)
        .collect();

    let mut harmonics = Vec::new();
    for &n in &pool[..count] {
        let carriers: Vec<(Complex64, f64)> = (0..2)
            .map(|_| {
                let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * opts.amplitude;
                (a, rng.gen_range(-opts.max_frequency..=opts.max_frequency))
            })
            .collect();
        let values: Vec<Complex64> = times
            .iter()
            .map(|&t| {
                let env = (PI * t / opts.duration).sin().powi(2);
                let v: Complex64 = carriers.iter().map(|&(a, w)| a * Complex64::cis(-w * t)).sum();
                let v = v * env;
                if n == 0 {
                    Complex64::new(v.re, 0.0)
                } else {
                    v
                }
            })
            .collect();
        let sampled = Sampled::new(times.clone(), values).expect("uniform grid");
        if n != 0 {
            harmonics.push(HarmonicProfile {
                n: -n,
                profile: Profile::Sampled(sampled.conj()),
            });
        }
        harmonics.push(HarmonicProfile {
            n,
            profile: Profile::Sampled(sampled),
        });
    }
    let window = TimeWindow::new(0.0, opts.duration).expect("positive duration");
    PotentialSpec::new(harmonics, window).expect("constructed hermitian")
}
