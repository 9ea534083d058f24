//! Fano problems: degrees, square systems in Grassmannian charts, double-point
//! witnesses, interval certification and monodromy sampling.

pub mod certify;
pub mod error;
pub mod exact;
pub mod forge;
pub mod io;
pub mod monodromy;
pub mod problem;
pub mod system;
pub mod tracker;

pub use error::{FanoError, Result};
