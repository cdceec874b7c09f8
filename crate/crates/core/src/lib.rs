//! Desk-scale computations around the diameter of closed hyperbolic manifolds:
//! subgroup growth of the rank-2 free group, Schreier graphs and their
//! diameters, a combinatorial model of glued manifolds, hyperbolic volume
//! bounds, and exact integral homology of nerves of metric covers.

pub mod complex;
pub mod curves;
pub mod error;
pub mod geometry;
pub mod gabber;
pub mod gl;
pub mod homology;
pub mod metric;
pub mod nerve;
pub mod net;
pub mod perm;
pub mod pipeline;
pub mod quadrature;
pub mod schreier;
pub mod seed;
pub mod snf;
pub mod subgroups;

pub use complex::SimplicialComplex;
pub use error::{Error, Result};
pub use gl::{BlockTable, GLDescriptor};
pub use homology::HomologyProfile;
pub use metric::FiniteMetricSpace;
pub use net::Net;
pub use schreier::{DiameterStatistics, SchreierGraph};
pub use subgroups::SubgroupCountTable;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
