//! Bethe ansatz solver and operator-relation checkers for delta-interaction
//! gases on affine root systems.

pub mod bethe;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod exp_poly;
pub mod linalg;
pub mod operators;
pub mod report;
pub mod root_system;
pub mod sampling;
pub mod suite;
pub mod weyl;

pub use error::{Error, Result};
pub use exp_poly::{ExpPolynomial, Polynomial};
pub use report::CheckReport;
pub use root_system::{AffineRoot, CartanKind, Multiplicity, RootSystem};
pub use weyl::WeylGroup;
