use num_complex::Complex64;

/// Natural cubic spline through complex samples on a strictly increasing grid.
///
/// Real and imaginary parts are interpolated with the same real weights, so
/// the spline of conjugated samples is the exact conjugate of the spline.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ComplexSpline {
    times: Vec<f64>,
    values: Vec<Complex64>,
    second: Vec<Complex64>,
}

impl ComplexSpline {
    /// Caller guarantees `times.len() == values.len() >= 2`, strictly increasing.
    pub(crate) fn new(times: Vec<f64>, values: Vec<Complex64>) -> Self {
        let n = times.len();
        debug_assert!(n >= 2 && values.len() == n);
        let mut second = vec![Complex64::new(0.0, 0.0); n];
        if n > 2 {
            // Thomas sweep on the interior knots; natural ends M_0 = M_{n-1} = 0.
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![Complex64::new(0.0, 0.0); m];
            for i in 1..n - 1 {
                let h0 = times[i] - times[i - 1];
                let h1 = times[i + 1] - times[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0) * 6.0;
            }
            for k in 1..m {
                let lower = times[k + 1] - times[k];
                let factor = lower / diag[k - 1];
                diag[k] -= factor * upper[k - 1];
                let prev = rhs[k - 1];
                rhs[k] -= prev * factor;
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for k in (0..m - 1).rev() {
                second[k + 1] = (rhs[k] - second[k + 2] * upper[k]) / diag[k];
            }
        }
        Self {
            times,
            values,
            second,
        }
    }

    /// Zero outside the sampled range.
    pub(crate) fn eval(&self, t: f64) -> Complex64 {
        let n = self.times.len();
        if !(t >= self.times[0] && t <= self.times[n - 1]) {
            return Complex64::new(0.0, 0.0);
        }
        let hi = self.times.partition_point(|&x| x <= t).clamp(1, n - 1);
        let lo = hi - 1;
        let h = self.times[hi] - self.times[lo];
        let a = (self.times[hi] - t) / h;
        let b = (t - self.times[lo]) / h;
        let curvature =
            (self.second[lo] * (a * a * a - a) + self.second[hi] * (b * b * b - b)) * (h * h / 6.0);
        self.values[lo] * a + self.values[hi] * b + curvature
    }
}
