//! Executable Poisson and Dirac geometry.
//!
//! * [`fields`]: exact polynomial exterior calculus on ℝⁿ.
//! * [`poisson`]: brackets, Jacobiators, Lie algebroids, leaves, Moser flows, Euler-like linearization.
//! * [`dirac`]: the Courant bracket, Dirac frames, gauge transformations, pullbacks.
//! * [`realization`]: symplectic realizations built from Poisson sprays.
//! * [`maningroup`]: Manin triples, Drinfeld bivectors, dressing actions.

pub mod dirac;
pub mod error;
pub mod exact;
pub mod fields;
pub mod maningroup;
pub mod numeric;
pub mod poisson;
pub mod realization;
pub mod report;

pub use error::{Error, Result};
