//! Curvature toolkit for warped-product metrics.
//!
//! The crate evaluates sectional curvatures and the (p,n)-intermediate scalar
//! curvature `s_{p,n}` of the metric families used in positive-curvature
//! surgery constructions (round spheres and their products, torpedo, toe,
//! bend and boot metrics, concordance cylinders), checks every closed form
//! against a finite-difference tensor oracle, and certifies positivity by
//! minimizing over the Grassmann bundle on a parameter grid.

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose; index loops
// mirror the tensor formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod concordance;
pub mod constructions;
pub mod curvature;
pub mod descriptor;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod positivity;
pub mod profiles;
pub mod report;

pub use error::{Error, Result};
pub use geometry::{MetricModel, ModelPoint, PlaneComplement, TangentVector};
pub use profiles::{Jet, Jet2, TwoVarProfile, WarpingProfile};
