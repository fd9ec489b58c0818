//! Numerical laboratory for the nearly-Kähler 6-sphere.

pub mod catalog;
pub mod cone;
pub mod config;
pub mod dual;
pub mod error;
pub mod exterior;
pub mod forms;
pub mod index;
pub mod lagrangian;
pub mod octonion;
pub mod quadrature;
pub mod sphere;
pub mod suite;
pub mod surface;
pub mod variation;
pub mod vec7;

pub use error::{Error, Result};
pub use config::{RunConfig, Suite, Tier, Tolerances};
pub use suite::{run, CheckRecord, Status, SuiteReport};
