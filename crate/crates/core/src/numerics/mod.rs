//! Numerical kernels shared by the solvers: analytic Cauchy series, dense
//! linear algebra, principal-value quadrature and logarithmic least squares.

pub mod cauchy;
pub mod linalg;
pub mod logfit;
pub mod quadrature;

pub use cauchy::{
    cauchy_integral, cauchy_monomial_integral, cauchy_polynomial_integral,
    symmetric_monomial_integral, CauchyKind, DEFAULT_SERIES_CAP, SERIES_TAIL_TOL,
};
pub use linalg::{solve_dense, LinearSystem, SolveReport, CONDITION_LIMIT};
pub use logfit::{fit_log_basis, LogFit};
pub use quadrature::{integrate_smooth, pv_quadrature_oracle};
