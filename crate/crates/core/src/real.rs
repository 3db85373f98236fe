//! Scalar types the basis and sum kernels are generic over.

use std::ops::Neg;

use num_traits::Num;

/// Double-double: about 32 significant digits.
pub use qd::Quad;

pub trait Real: Copy + PartialOrd + Num + Neg<Output = Self> + From<f64> + Send + Sync {
    fn pi() -> Self;
    fn sqrt(self) -> Self;
    fn to_f64(self) -> f64;

    /// Exact for `|r| < 2⁵³`.
    fn from_i64(r: i64) -> Self {
        Self::from(r as f64)
    }
}

impl Real for f64 {
    fn pi() -> Self {
        std::f64::consts::PI
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for Quad {
    fn pi() -> Self {
        Quad::PI
    }

    fn sqrt(self) -> Self {
        Quad::sqrt(self)
    }

    fn to_f64(self) -> f64 {
        self.0 + self.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_carries_the_low_word() {
        let third = Quad::from(1.0) / Quad::from(3.0);
        let residual = Quad::from(1.0) - third * Quad::from(3.0);
        assert!(residual.0.abs() < 1e-31);
        let root = Real::sqrt(Quad::from(2.0));
        assert!((root * root - Quad::from(2.0)).0.abs() < 1e-31);
        // π to 32 digits
        let pi = <Quad as Real>::pi();
        assert_eq!(pi.0, std::f64::consts::PI);
        assert!((pi.1 - 1.2246467991473532e-16).abs() < 1e-32);
    }
}
