use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use crate::real::{Quad, Real};

use super::{f_analytic_sinc_in, numeric_amplitude, PotentialSpec, Quadrature, WeightedSamples};
use crate::basis::{BoxConfig, Branch, Mode};
use crate::error::{Error, Result};

/// Where the amplitudes of a table come from.
#[derive(Debug, Clone, Copy)]
pub enum FSource<'a> {
    /// Simpson quadrature of the matrix element over the potential's window.
    Numeric {
        spec: &'a PotentialSpec,
        quadrature: Quadrature,
    },
    /// Infinite-time closed form for the sinc burst at harmonic `w`.
    AnalyticSinc { w: i64 },
}

/// First-order amplitudes `f_{λ′,s;λ,r}` for `r, s ∈ [−S, S]` and both branches.
///
/// Only momentum transfers `s − r` that the potential actually carries can be
/// non-zero, so values are stored per transfer ("offset") rather than as a
/// dense `(2S+1)²` matrix. Each value is kept in double-double precision; for
/// quadrature tables the low word is zero.
#[derive(Debug, Clone)]
pub struct FCoefficients {
    window: i64,
    offsets: Vec<i64>,
    values: Vec<Complex<Quad>>,
    analytic: bool,
}

impl FCoefficients {
    pub fn window(&self) -> i64 {
        self.window
    }

    /// Momentum transfers `s − r` that can carry a non-zero amplitude, ascending.
    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn reach(&self) -> i64 {
        self.offsets.iter().map(|n| n.abs()).max().unwrap_or(0)
    }

    pub fn is_analytic(&self) -> bool {
        self.analytic
    }

    pub fn contains(&self, mode: Mode) -> bool {
        mode.r.abs() <= self.window
    }

    fn width(&self) -> usize {
        (2 * self.window + 1) as usize
    }

    fn slot(&self, dest: Mode, src: Mode) -> Option<usize> {
        if !self.contains(dest) || !self.contains(src) {
            return None;
        }
        let k = self.offsets.binary_search(&(dest.r - src.r)).ok()?;
        Some(self.index(dest.branch, src.branch, k, src.r))
    }

    #[inline]
    fn index(&self, dest: Branch, src: Branch, k: usize, r: i64) -> usize {
        ((dest.index() * 2 + src.index()) * self.offsets.len() + k) * self.width() + (r + self.window) as usize
    }

    /// Zero for pairs outside the window or without a carrying harmonic.
    pub fn get_precise(&self, dest: Mode, src: Mode) -> Complex<Quad> {
        self.slot(dest, src)
            .map(|i| self.values[i])
            .unwrap_or_else(|| Complex::new(Quad::from(0.0), Quad::from(0.0)))
    }

    pub fn get(&self, dest: Mode, src: Mode) -> Complex64 {
        let v = self.get_precise(dest, src);
        Complex64::new(v.re.to_f64(), v.im.to_f64())
    }

    /// Every in-window destination coupled to `src`, with its amplitude.
    pub fn couplings(&self, src: Mode) -> impl Iterator<Item = (Mode, Complex<Quad>)> + '_ {
        let in_window = self.contains(src);
        Branch::BOTH.into_iter().flat_map(move |b| {
            self.offsets.iter().enumerate().filter_map(move |(k, &n)| {
                let dest = Mode::new(b, src.r + n);
                (in_window && self.contains(dest)).then(|| (dest, self.values[self.index(b, src.branch, k, src.r)]))
            })
        })
    }

    fn entries(&self) -> impl Iterator<Item = (Mode, Mode, Complex<Quad>)> + '_ {
        Branch::BOTH.into_iter().flat_map(move |b| {
            (-self.window..=self.window).flat_map(move |r| {
                let src = Mode::new(b, r);
                self.couplings(src).map(move |(dest, f)| (dest, src, f))
            })
        })
    }

    /// Non-zero amplitudes with both modes inside the window.
    pub fn nonzero_count(&self) -> usize {
        self.entries()
            .filter(|(_, _, f)| f.re != Quad::from(0.0) || f.im != Quad::from(0.0))
            .count()
    }

    /// All non-zero amplitudes as `(dest, src, f)`, sources in ascending order.
    pub fn nonzero_entries(&self) -> Vec<(Mode, Mode, Complex64)> {
        self.entries()
            .map(|(d, s, f)| (d, s, Complex64::new(f.re.to_f64(), f.im.to_f64())))
            .filter(|(_, _, f)| *f != Complex64::new(0.0, 0.0))
            .collect()
    }

    /// `Σ |f|²` over the window.
    pub fn total_weight(&self) -> f64 {
        self.entries().map(|(_, _, f)| f.norm_sqr().to_f64()).sum()
    }

    /// `max |f_{a;b} − conj f_{b;a}| / max |f|`, zero for an empty table.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (dest, src, f) in self.entries() {
            let f = Complex64::new(f.re.to_f64(), f.im.to_f64());
            scale = scale.max(f.norm());
            worst = worst.max((f - self.get(src, dest).conj()).norm());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

/// Materialises the amplitudes over `r, s ∈ [−S, S]`.
pub fn build_f_table(cfg: &BoxConfig, source: FSource<'_>, window: i64) -> Result<FCoefficients> {
    if window < 1 {
        return Err(Error::InvalidArgument(format!("table window S must be >= 1, got {window}")));
    }
    let width = (2 * window + 1) as usize;
    let pairs = [
        (Branch::Negative, Branch::Negative),
        (Branch::Negative, Branch::Positive),
        (Branch::Positive, Branch::Negative),
        (Branch::Positive, Branch::Positive),
    ];
    let zero = Complex::new(Quad::from(0.0), Quad::from(0.0));

    let (offsets, values, analytic) = match source {
        FSource::AnalyticSinc { w } => {
            cfg.require_subluminal_harmonic(w)?;
            let offsets = vec![-w, w];
            let values = (0..4 * offsets.len() * width)
                .into_par_iter()
                .map(|i| {
                    let (pair, rest) = (i / (offsets.len() * width), i % (offsets.len() * width));
                    let (k, col) = (rest / width, rest % width);
                    let (db, sb) = pairs[pair];
                    let src = Mode::new(sb, col as i64 - window);
                    let dest = Mode::new(db, src.r + offsets[k]);
                    if dest.r.abs() > window {
                        zero
                    } else {
                        f_analytic_sinc_in::<Quad>(cfg, w, dest, src)
                    }
                })
                .collect();
            (offsets, values, true)
        }
        FSource::Numeric { spec, quadrature } => {
            let offsets: Vec<i64> = spec.harmonics().iter().map(|h| h.n).collect();
            let samples = spec
                .harmonics()
                .iter()
                .map(|h| WeightedSamples::new(&h.profile, spec.window(), cfg.mass(), quadrature))
                .collect::<Result<Vec<_>>>()?;
            let values = (0..4 * offsets.len() * width)
                .into_par_iter()
                .map(|i| {
                    let (pair, rest) = (i / (offsets.len() * width), i % (offsets.len() * width));
                    let (k, col) = (rest / width, rest % width);
                    let (db, sb) = pairs[pair];
                    let src = Mode::new(sb, col as i64 - window);
                    let dest = Mode::new(db, src.r + offsets[k]);
                    if dest.r.abs() > window {
                        zero
                    } else {
                        let f = numeric_amplitude(cfg, &samples[k], dest, src);
                        Complex::new(Quad::from(f.re), Quad::from(f.im))
                    }
                })
                .collect();
            (offsets, values, false)
        }
    };
    Ok(FCoefficients {
        window,
        offsets,
        values,
        analytic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{f_analytic_sinc, f_numeric, TimeWindow};
    use crate::synth::{random_hermitian, SynthOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> BoxConfig {
        BoxConfig::new(10.0, 1.0).unwrap()
    }

    #[test]
    fn zero_potential_table() {
        let spec = PotentialSpec::zero(TimeWindow::new(0.0, 1.0).unwrap());
        let t = build_f_table(
            &cfg(),
            FSource::Numeric {
                spec: &spec,
                quadrature: Quadrature::new(10),
            },
            4,
        )
        .unwrap();
        assert_eq!(t.nonzero_count(), 0);
        assert_eq!(t.get(Mode::negative(1), Mode::negative(0)), Complex64::new(0.0, 0.0));
        assert_eq!(t.hermiticity_defect(), 0.0);
    }

    #[test]
    fn analytic_nonzero_count() {
        for (l, w, s) in [(10.0, 1, 5), (100.0, 3, 12), (100.0, 7, 7)] {
            let c = BoxConfig::new(l, 1.0).unwrap();
            let t = build_f_table(&c, FSource::AnalyticSinc { w }, s).unwrap();
            assert!(t.is_analytic());
            assert_eq!(t.nonzero_count() as i64, 2 * (2 * s + 1 - w) * 2);
        }
    }

    #[test]
    fn analytic_table_matches_pointwise() {
        let c = cfg();
        let t = build_f_table(&c, FSource::AnalyticSinc { w: 1 }, 6).unwrap();
        for db in Branch::BOTH {
            for sb in Branch::BOTH {
                for r in -6..=6 {
                    for s in -6..=6 {
                        let (d, src) = (Mode::new(db, s), Mode::new(sb, r));
                        let direct = f_analytic_sinc(&c, 1, d, src).unwrap();
                        assert!((t.get(d, src) - direct).norm() <= 1e-15 * direct.norm().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn window_too_small_rejected() {
        assert!(matches!(
            build_f_table(&cfg(), FSource::AnalyticSinc { w: 1 }, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_f_table(&cfg(), FSource::AnalyticSinc { w: 2 }, 4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn numeric_table_matches_f_numeric_and_is_hermitian() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let spec = random_hermitian(&mut rng, &SynthOptions::default());
            let quadrature = Quadrature::new(600);
            let t = build_f_table(&c, FSource::Numeric { spec: &spec, quadrature }, 6).unwrap();
            assert!(t.hermiticity_defect() <= 1e-10, "defect {}", t.hermiticity_defect());
            for (dest, src, f) in t.nonzero_entries().into_iter().step_by(7) {
                assert_eq!(f, f_numeric(&c, &spec, dest, src, quadrature).unwrap());
                // |f_{−1,s;−1,r}| = |f_{−1,r;−1,s}|
                assert!((f.norm() - t.get(src, dest).norm()).abs() <= 1e-10 * f.norm());
            }
        }
    }

    #[test]
    fn couplings_respect_window() {
        let t = build_f_table(&cfg(), FSource::AnalyticSinc { w: 1 }, 3).unwrap();
        let dests: Vec<Mode> = t.couplings(Mode::negative(3)).map(|(d, _)| d).collect();
        assert_eq!(dests, vec![Mode::negative(2), Mode::positive(2)]);
        assert_eq!(t.couplings(Mode::negative(4)).count(), 0);
    }
}
