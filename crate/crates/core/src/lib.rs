//! Exact and numerical evaluation of Dirichlet character sums, the Dirichlet
//! series they generate, and the L-function quantities that bound them.

pub mod error;
pub mod residues;

pub use error::{Error, Result};
pub mod expsums;
pub mod hsums;
pub mod zseries;
pub mod lfunc;
pub mod report;

pub use report::SumReport;
