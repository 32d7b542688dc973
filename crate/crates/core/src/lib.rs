//! Semi-analytical solver for a straight crack on the interface of two
//! dissimilar elastic half-planes whose crack faces and bond line carry a
//! curvature-dependent surface tension.
//!
//! The displacement-slope functions on the crack faces and on the interface
//! satisfy a system of six singular integro-differential equations built from
//! half-plane Dirichlet-to-Neumann maps. Two discretizations are provided:
//!
//! * [`taylor`], the production path: slopes approximated by Taylor
//!   polynomials (negative powers outside the crack), coefficient matching of
//!   the analytic Cauchy series, and four global constraint rows, giving a
//!   dense `6N+10` system.
//! * [`spline`], an independent verification path: the system mapped onto
//!   finite intervals, linear/cubic spline approximation and midpoint
//!   collocation, giving an `18N+7` system.
//!
//! [`postprocess`] reconstructs crack shapes, face and interface stresses,
//! logarithmic tip-singularity coefficients and the classical
//! pressurized-crack reference solution.

pub mod error;
pub mod model;
pub mod numerics;
pub mod postprocess;
pub mod spline;
pub mod taylor;

pub use error::{Error, Result};
pub use model::{
    check_farfield_compatibility, check_load_equilibrium, CompatibilityReport, CrackLoad,
    FarField, Material, MaterialConstants, Problem, SurfaceTension,
};
