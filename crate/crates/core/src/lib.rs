//! Weighted conditional-type operators `T = M_w·E·M_u` on finite measure
//! spaces.
//!
//! The crate builds the operators, evaluates the closed-form polar and
//! Aluthge calculus for them, computes point and joint point spectra
//! structurally, and checks the associated theorems numerically with
//! seeded falsification campaigns.

pub mod condexp;
pub mod error;
pub mod examples;
pub mod io;
pub mod linalg;
pub mod report;
pub mod space;
pub mod spectral;
pub mod verifier;
pub mod wct;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use linalg::{LinOperator, Polar};
pub use space::{FiniteMeasureSpace, MFunc, Partition};
pub use wct::{FactoredOp, WctInstance};
