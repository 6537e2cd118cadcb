//! Uniform approximation of weighted periodic function classes by ramped
//! trigonometric summation operators.
//!
//! The library covers the full pipeline: a catalog of admissible weight
//! functions and their half-decay characteristics ([`psi`]), coefficient
//! analysis and synthesis ([`fourier`]), the multiplier tables of the
//! operators ([`summation`]), the weighted-derivative calculus and the
//! extremal derivative ([`psi_class`]), exact class errors via the deviation
//! kernel ([`oracle`]), and the leading asymptotic constants
//! ([`asymptotics`]).

pub mod asymptotics;
pub mod error;
pub mod fourier;
pub mod oracle;
pub mod psi;
pub mod psi_class;
pub mod quad;
pub mod summation;

pub use error::{Error, Result};
pub use fourier::{analyze, synthesize, PeriodicGrid, TrigCoeffs};
pub use oracle::{class_error, class_error_for_method, DeviationKernel};
pub use psi::{PsiCharacteristics, PsiFamily, PsiSpec};
pub use psi_class::{ClassParams, PartitionData, Regime};
pub use summation::{apply_multipliers, build_multipliers, Method, MultiplierSet};
