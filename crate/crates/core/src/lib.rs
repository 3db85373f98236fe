//! Perturbative energy shifts of Dirac modes in a periodic box, the vacuum
//! (Dirac sea) energy shift in the hole-theory and field-theory pictures, and
//! a direct time-evolution oracle for checking them.

pub mod basis;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod real;
pub mod shifts;
pub mod synth;
pub mod vacuum;

mod reduce;

pub use basis::{BoxConfig, Branch, Mode, Spinor};
pub use error::{Error, Result};
pub use potential::{build_f_table, FCoefficients, FSource, PotentialSpec, Quadrature, TimeWindow};
