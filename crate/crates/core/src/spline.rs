//! Verification solver: the singular system rewritten over finite intervals
//! and discretized with splines, collocated at segment midpoints.
//!
//! The interface functions are folded into the crack segment through
//! `x -> l^2/x`, turning the exterior Cauchy integrals into integrals of
//! `phi0(x) = (l^2/x) phi(l^2/x)` (same for `psi0`) against the bounded
//! kernel `1/(r x - l^2)`. Tangential slopes get linear splines, normal
//! slopes cubic splines (so they can be differentiated twice); all
//! spline-against-kernel integrals are evaluated in closed form per piece,
//! and the equations are enforced at the `2N` midpoints only.
//!
//! This path exists to cross-validate the Taylor solver; it is not the
//! production solver.

use crate::error::{Error, Result};
use crate::model::{poly_eval, poly_symmetric_integral, Problem};
use crate::numerics::linalg::{solve_dense, LinearSystem};
use crate::taylor::{SolveQuality, TaylorSolution};

/// Uniform partition of the crack segment: `2N+1` nodes `x_j = -l + j l/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplineGrid {
    pub half_count: usize,
    pub half_length: f64,
    /// Node spacing `l / N`.
    pub h: f64,
}

impl SplineGrid {
    pub fn new(half_count: usize, half_length: f64) -> Self {
        Self {
            half_count,
            half_length,
            h: half_length / half_count as f64,
        }
    }

    pub fn node_count(&self) -> usize {
        2 * self.half_count + 1
    }

    /// `x_j`, j = 0..=2N.
    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.h
    }

    /// Midpoint of the piece `[x_{j-1}, x_j]`, j = 1..=2N.
    pub fn midpoint(&self, j: usize) -> f64 {
        self.node(j) - 0.5 * self.h
    }

    /// Index of the piece containing `x`, clamped to `1..=2N`.
    fn piece_index(&self, x: f64) -> usize {
        let raw = ((x + self.half_length) / self.h).ceil() as isize;
        raw.clamp(1, 2 * self.half_count as isize) as usize
    }
}

/// Kernels and substitution terms of the finite-interval form of the system.
#[derive(Debug, Clone, Copy)]
pub struct FiniteTransform {
    pub half_length: f64,
}

impl FiniteTransform {
    pub fn cauchy_kernel(&self, r: f64, x: f64) -> f64 {
        1.0 / (r - x)
    }

    /// Bounded kernel `1/(r x - l^2)` replacing the exterior Cauchy kernel;
    /// `|r x| < l^2` strictly for interior points, so no singularity.
    pub fn transformed_kernel(&self, r: f64, x: f64) -> f64 {
        1.0 / (r * x - self.half_length * self.half_length)
    }

    /// The exterior coordinate `l^2/x` a folded point maps back to.
    pub fn outer_coordinate(&self, x: f64) -> f64 {
        self.half_length * self.half_length / x
    }

    /// Fold an exterior function: `f0(x) = (l^2/x) f(l^2/x)`.
    pub fn fold(&self, f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let outer = self.outer_coordinate(x);
        outer * f(outer)
    }

    /// Curvature term of the folded interface shear equation:
    /// `l^-4 (2 x^2 psi0 + 4 x^3 psi0' + x^4 psi0'')`.
    pub fn shear_curvature_term(&self, x: f64, psi0: f64, dpsi0: f64, ddpsi0: f64) -> f64 {
        let l4 = self.half_length.powi(4);
        (2.0 * x * x * psi0 + 4.0 * x.powi(3) * dpsi0 + x.powi(4) * ddpsi0) / l4
    }

    /// Slope term of the folded interface normal equation:
    /// `l^-2 (x psi0 + x^2 psi0')`.
    pub fn normal_slope_term(&self, x: f64, psi0: f64, dpsi0: f64) -> f64 {
        (x * psi0 + x * x * dpsi0) / (self.half_length * self.half_length)
    }
}

/// Kernels of the finite-interval form for a problem.
pub fn transform_to_finite(p: &Problem) -> FiniteTransform {
    FiniteTransform {
        half_length: p.half_length,
    }
}

/// Nodal solution of the spline discretization.
///
/// Index 0 holds the folded interface functions (`phi0`, `psi0`), 1 and 2 the
/// upper and lower crack-face functions. `w` are linear-spline nodal values
/// of the tangential slopes; `y`/`z` are cubic-spline values and second
/// derivatives of the normal slopes. The decay pins `w[0][N] = y[0][N] = 0`
/// are already inserted.
#[derive(Debug, Clone)]
pub struct SplineSolution {
    pub grid: SplineGrid,
    pub w: [Vec<f64>; 3],
    pub y: [Vec<f64>; 3],
    pub z: [Vec<f64>; 3],
    pub quality: SolveQuality,
}

impl SplineSolution {
    /// Linear-spline value of tangential slope `k` at `x`.
    pub fn linear_at(&self, k: usize, x: f64) -> f64 {
        let j = self.grid.piece_index(x);
        let (a, b) = (self.grid.node(j - 1), self.grid.node(j));
        let h = self.grid.h;
        (self.w[k][j] * (x - a) + self.w[k][j - 1] * (b - x)) / h
    }

    fn cubic_piece_eval(&self, k: usize, x: f64, deriv: u32) -> f64 {
        let j = self.grid.piece_index(x);
        let (a, b) = (self.grid.node(j - 1), self.grid.node(j));
        let h = self.grid.h;
        let (zl, zr) = (self.z[k][j - 1], self.z[k][j]);
        let (yl, yr) = (self.y[k][j - 1], self.y[k][j]);
        let (da, db) = (x - a, b - x);
        match deriv {
            0 => {
                zr * da.powi(3) / (6.0 * h) + zl * db.powi(3) / (6.0 * h)
                    + (yr / h - h * zr / 6.0) * da
                    + (yl / h - h * zl / 6.0) * db
            }
            1 => {
                zr * da * da / (2.0 * h) - zl * db * db / (2.0 * h) + (yr - yl) / h
                    - h * (zr - zl) / 6.0
            }
            2 => (zr * da + zl * db) / h,
            _ => unreachable!(),
        }
    }

    /// Cubic-spline value of normal slope `k` at `x`.
    pub fn cubic_at(&self, k: usize, x: f64) -> f64 {
        self.cubic_piece_eval(k, x, 0)
    }

    pub fn cubic_deriv_at(&self, k: usize, x: f64) -> f64 {
        self.cubic_piece_eval(k, x, 1)
    }

    pub fn cubic_second_at(&self, k: usize, x: f64) -> f64 {
        self.cubic_piece_eval(k, x, 2)
    }

    /// `∫_{-l}^{x} psi_k`, exact for the piecewise cubics: the crack-face
    /// opening when `k` is 1 or 2.
    pub fn opening_at(&self, k: usize, x: f64) -> f64 {
        let grid = &self.grid;
        let h = grid.h;
        let target = grid.piece_index(x);
        let mut total = 0.0;
        for j in 1..target {
            total += (self.y[k][j] + self.y[k][j - 1]) * h / 2.0
                - (self.z[k][j] + self.z[k][j - 1]) * h * h * h / 24.0;
        }
        // Partial piece: antiderivative of the cubic representation.
        let (a, b) = (grid.node(target - 1), grid.node(target));
        let (zl, zr) = (self.z[k][target - 1], self.z[k][target]);
        let (yl, yr) = (self.y[k][target - 1], self.y[k][target]);
        let anti = |r: f64| {
            zr * (r - a).powi(4) / (24.0 * h) - zl * (b - r).powi(4) / (24.0 * h)
                + (yr / h - h * zr / 6.0) * (r - a) * (r - a) / 2.0
                - (yl / h - h * zl / 6.0) * (b - r) * (b - r) / 2.0
        };
        total + anti(x.clamp(a, b)) - anti(a)
    }
}

/// Column layout of the spline unknowns (pinned entries skipped).
#[derive(Debug, Clone, Copy)]
struct SplineLayout {
    n: usize,
}

impl SplineLayout {
    fn dimension(&self) -> usize {
        18 * self.n + 7
    }

    /// Column of `w[k][j]`; `None` for the pinned `w[0][N]`.
    fn w(&self, k: usize, j: usize) -> Option<usize> {
        let nodes = 2 * self.n + 1;
        match k {
            0 => {
                if j == self.n {
                    None
                } else {
                    Some(if j < self.n { j } else { j - 1 })
                }
            }
            1 => Some(2 * self.n + j),
            _ => Some(2 * self.n + nodes + j),
        }
    }

    fn y(&self, k: usize, j: usize) -> Option<usize> {
        let base = 6 * self.n + 2;
        let nodes = 2 * self.n + 1;
        match k {
            0 => {
                if j == self.n {
                    None
                } else {
                    Some(base + if j < self.n { j } else { j - 1 })
                }
            }
            1 => Some(base + 2 * self.n + j),
            _ => Some(base + 2 * self.n + nodes + j),
        }
    }

    fn z(&self, k: usize, j: usize) -> usize {
        12 * self.n + 4 + k * (2 * self.n + 1) + j
    }
}

/// `PV ∫_a^b p(r)/(r - xi) dr` for a cubic `p` (coefficients low-to-high),
/// valid whether `xi` lies inside or outside `[a, b]` (not an endpoint).
fn cauchy_piece(c: &[f64; 4], a: f64, b: f64, xi: f64) -> f64 {
    // p(r) = q(r) (r - xi) + p(xi) by synthetic division.
    let q2 = c[3];
    let q1 = c[2] + xi * q2;
    let q0 = c[1] + xi * q1;
    let p_xi = c[0] + xi * q0;
    let int_q = q0 * (b - a) + q1 * (b * b - a * a) / 2.0 + q2 * (b * b * b - a * a * a) / 3.0;
    int_q + p_xi * ((b - xi) / (a - xi)).abs().ln()
}

/// `∫_a^b p(r)/(r xi - l^2) dr` for a cubic `p`. Series in `xi r / l^2` for
/// small `|xi|` (where the reciprocal form would cancel), reciprocal Cauchy
/// form otherwise.
fn transformed_piece(c: &[f64; 4], a: f64, b: f64, xi: f64, l: f64) -> f64 {
    if xi.abs() <= 0.5 * l {
        let l2 = l * l;
        let mut total = 0.0;
        let mut factor = -1.0 / l2;
        let mut a_pow = a; // a^(n+1)
        let mut b_pow = b;
        let mut largest = 0.0f64;
        for n in 0..200 {
            let mut moment = 0.0;
            let mut ap = a_pow;
            let mut bp = b_pow;
            for (i, ci) in c.iter().enumerate() {
                moment += ci * (bp - ap) / (n + i + 1) as f64;
                ap *= a;
                bp *= b;
            }
            let term = factor * moment;
            total += term;
            largest = largest.max(term.abs());
            if n > 3 && term.abs() <= 1e-17 * largest.max(1e-300) {
                break;
            }
            factor *= xi / l2;
            a_pow *= a;
            b_pow *= b;
        }
        total
    } else {
        // 1/(r xi - l^2) = (1/xi) / (r - l^2/xi), and l^2/xi lies outside the
        // crack segment, so the Cauchy form is regular.
        cauchy_piece(c, a, b, l * l / xi) / xi
    }
}

/// Per-midpoint integration weights: coefficient of each nodal unknown in the
/// spline-against-kernel integrals over the whole segment.
struct KernelWeights {
    lin_cauchy: Vec<f64>,
    lin_transf: Vec<f64>,
    cub_cauchy_y: Vec<f64>,
    cub_cauchy_z: Vec<f64>,
    cub_transf_y: Vec<f64>,
    cub_transf_z: Vec<f64>,
}

fn kernel_weights(grid: &SplineGrid, xi: f64) -> KernelWeights {
    let nodes = grid.node_count();
    let h = grid.h;
    let l = grid.half_length;
    let mut w = KernelWeights {
        lin_cauchy: vec![0.0; nodes],
        lin_transf: vec![0.0; nodes],
        cub_cauchy_y: vec![0.0; nodes],
        cub_cauchy_z: vec![0.0; nodes],
        cub_transf_y: vec![0.0; nodes],
        cub_transf_z: vec![0.0; nodes],
    };
    for j in 1..nodes {
        let a = grid.node(j - 1);
        let b = grid.node(j);
        // Linear basis: right node (r-a)/h, left node (b-r)/h.
        let lin_right = [-a / h, 1.0 / h, 0.0, 0.0];
        let lin_left = [b / h, -1.0 / h, 0.0, 0.0];
        // Cubic basis per the z/y parametrization of the piece.
        let z_right = [
            -a.powi(3) / (6.0 * h) + h * a / 6.0,
            a * a / (2.0 * h) - h / 6.0,
            -a / (2.0 * h),
            1.0 / (6.0 * h),
        ];
        let z_left = [
            b.powi(3) / (6.0 * h) - h * b / 6.0,
            -b * b / (2.0 * h) + h / 6.0,
            b / (2.0 * h),
            -1.0 / (6.0 * h),
        ];
        w.lin_cauchy[j] += cauchy_piece(&lin_right, a, b, xi);
        w.lin_cauchy[j - 1] += cauchy_piece(&lin_left, a, b, xi);
        w.lin_transf[j] += transformed_piece(&lin_right, a, b, xi, l);
        w.lin_transf[j - 1] += transformed_piece(&lin_left, a, b, xi, l);
        w.cub_cauchy_y[j] += cauchy_piece(&lin_right, a, b, xi);
        w.cub_cauchy_y[j - 1] += cauchy_piece(&lin_left, a, b, xi);
        w.cub_cauchy_z[j] += cauchy_piece(&z_right, a, b, xi);
        w.cub_cauchy_z[j - 1] += cauchy_piece(&z_left, a, b, xi);
        w.cub_transf_y[j] += transformed_piece(&lin_right, a, b, xi, l);
        w.cub_transf_y[j - 1] += transformed_piece(&lin_left, a, b, xi, l);
        w.cub_transf_z[j] += transformed_piece(&z_right, a, b, xi, l);
        w.cub_transf_z[j - 1] += transformed_piece(&z_left, a, b, xi, l);
    }
    w
}

fn check_spline_preconditions(p: &Problem, half_count: usize) -> Result<()> {
    p.validate()?;
    if half_count < 4 {
        return Err(Error::InvalidInput(format!(
            "spline half-count must be at least 4, got {half_count}"
        )));
    }
    Ok(())
}

/// Assemble the `(18N+7) x (18N+7)` spline collocation system.
///
/// Rows: the six folded equations at the `2N` midpoints (equation-major),
/// then the `6N+3` second-derivative consistency rows with zero ghost
/// values, then the four constraint rows in the same order as the Taylor
/// solver.
pub fn assemble_spline_system(p: &Problem, half_count: usize) -> Result<LinearSystem> {
    check_spline_preconditions(p, half_count)?;
    let n = half_count;
    let grid = SplineGrid::new(n, p.half_length);
    let lay = SplineLayout { n };
    let mut sys = LinearSystem::new(lay.dimension());
    let l = p.half_length;
    let l2 = l * l;
    let c1 = p.material_upper.constants();
    let c2 = p.material_lower.constants();
    let st = &p.surface_tension;
    let (sigma, tau) = (p.far_field.sigma, p.far_field.tau);
    let alpha_diff = c1.alpha - c2.alpha;
    let beta_sum = c1.beta + c2.beta;
    let h = grid.h;
    let two_n = 2 * n;

    // Pointwise coefficients of the cubic piece at its own midpoint.
    // S(xi)   = (y_l + y_r)/2 - (z_l + z_r) h^2/16
    // S'(xi)  = (y_r - y_l)/h - (z_r - z_l) h/24
    // S''(xi) = (z_l + z_r)/2
    let s_y = 0.5;
    let s_z = -h * h / 16.0;
    let sp_y = 1.0 / h;
    let sp_z = -h / 24.0;

    let add = |sys: &mut LinearSystem, row: usize, col: Option<usize>, v: f64| {
        if let Some(c) = col {
            if v != 0.0 {
                sys.add(row, c, v);
            }
        }
    };

    for i in 1..=two_n {
        let xi = grid.midpoint(i);
        let kw = kernel_weights(&grid, xi);
        let (jl, jr) = (i - 1, i); // nodes bounding the midpoint's piece

        // Equation rows for this midpoint.
        let r_shear_up = i - 1;
        let r_norm_up = two_n + (i - 1);
        let r_shear_lo = 2 * two_n + (i - 1);
        let r_norm_lo = 3 * two_n + (i - 1);
        let r_shear_int = 4 * two_n + (i - 1);
        let r_norm_int = 5 * two_n + (i - 1);

        // Upper shear: a1 psi1 + b1 C[phi1] + b1 K[phi0] - g1+ psi1'' = -tau + f+.
        for node in [jl, jr] {
            add(&mut sys, r_shear_up, lay.y(1, node), c1.alpha * s_y);
            add(
                &mut sys,
                r_shear_up,
                Some(lay.z(1, node)),
                c1.alpha * s_z - st.gamma1_plus * 0.5,
            );
        }
        for j in 0..=two_n {
            add(&mut sys, r_shear_up, lay.w(1, j), c1.beta * kw.lin_cauchy[j]);
            add(&mut sys, r_shear_up, lay.w(0, j), c1.beta * kw.lin_transf[j]);
        }
        sys.rhs[r_shear_up] = -tau + poly_eval(&p.load.f_plus, xi);

        // Upper normal: -a1 phi1 + b1 C[psi1] + b1 K[psi0] + g0+ psi1' = -sigma + g+.
        add(&mut sys, r_norm_up, lay.w(1, jl), -c1.alpha * 0.5);
        add(&mut sys, r_norm_up, lay.w(1, jr), -c1.alpha * 0.5);
        for j in 0..=two_n {
            add(&mut sys, r_norm_up, lay.y(1, j), c1.beta * kw.cub_cauchy_y[j]);
            add(
                &mut sys,
                r_norm_up,
                Some(lay.z(1, j)),
                c1.beta * kw.cub_cauchy_z[j],
            );
            add(&mut sys, r_norm_up, lay.y(0, j), c1.beta * kw.cub_transf_y[j]);
            add(
                &mut sys,
                r_norm_up,
                Some(lay.z(0, j)),
                c1.beta * kw.cub_transf_z[j],
            );
        }
        add(&mut sys, r_norm_up, lay.y(1, jl), -st.gamma0_plus * sp_y);
        add(&mut sys, r_norm_up, lay.y(1, jr), st.gamma0_plus * sp_y);
        add(&mut sys, r_norm_up, Some(lay.z(1, jl)), -st.gamma0_plus * sp_z);
        add(&mut sys, r_norm_up, Some(lay.z(1, jr)), st.gamma0_plus * sp_z);
        sys.rhs[r_norm_up] = -sigma + poly_eval(&p.load.g_plus, xi);

        // Lower shear: a2 psi2 - b2 C[phi2] - b2 K[phi0] + g1- psi2'' = -tau + f-.
        for node in [jl, jr] {
            add(&mut sys, r_shear_lo, lay.y(2, node), c2.alpha * s_y);
            add(
                &mut sys,
                r_shear_lo,
                Some(lay.z(2, node)),
                c2.alpha * s_z + st.gamma1_minus * 0.5,
            );
        }
        for j in 0..=two_n {
            add(&mut sys, r_shear_lo, lay.w(2, j), -c2.beta * kw.lin_cauchy[j]);
            add(&mut sys, r_shear_lo, lay.w(0, j), -c2.beta * kw.lin_transf[j]);
        }
        sys.rhs[r_shear_lo] = -tau + poly_eval(&p.load.f_minus, xi);

        // Lower normal: -a2 phi2 - b2 C[psi2] - b2 K[psi0] - g0- psi2' = -sigma + g-.
        add(&mut sys, r_norm_lo, lay.w(2, jl), -c2.alpha * 0.5);
        add(&mut sys, r_norm_lo, lay.w(2, jr), -c2.alpha * 0.5);
        for j in 0..=two_n {
            add(&mut sys, r_norm_lo, lay.y(2, j), -c2.beta * kw.cub_cauchy_y[j]);
            add(
                &mut sys,
                r_norm_lo,
                Some(lay.z(2, j)),
                -c2.beta * kw.cub_cauchy_z[j],
            );
            add(&mut sys, r_norm_lo, lay.y(0, j), -c2.beta * kw.cub_transf_y[j]);
            add(
                &mut sys,
                r_norm_lo,
                Some(lay.z(0, j)),
                -c2.beta * kw.cub_transf_z[j],
            );
        }
        add(&mut sys, r_norm_lo, lay.y(2, jl), st.gamma0_minus * sp_y);
        add(&mut sys, r_norm_lo, lay.y(2, jr), -st.gamma0_minus * sp_y);
        add(&mut sys, r_norm_lo, Some(lay.z(2, jl)), st.gamma0_minus * sp_z);
        add(&mut sys, r_norm_lo, Some(lay.z(2, jr)), -st.gamma0_minus * sp_z);
        sys.rhs[r_norm_lo] = -sigma + poly_eval(&p.load.g_minus, xi);

        // Interface shear (folded): (a1-a2) psi0 + b1 l^2 K[phi1]
        // + b2 l^2 K[phi2] + (b1+b2) C[phi0]
        // - g1i l^-4 (2 xi^2 psi0 + 4 xi^3 psi0' + xi^4 psi0'') = 0.
        let curv = st.gamma1_interface / l2 / l2;
        for (node, sign) in [(jl, -1.0), (jr, 1.0)] {
            // psi0 pointwise terms gathered per node below.
            let y_coeff = alpha_diff * s_y
                - curv * (2.0 * xi * xi * s_y + 4.0 * xi.powi(3) * sign * sp_y);
            let z_coeff = alpha_diff * s_z
                - curv
                    * (2.0 * xi * xi * s_z
                        + 4.0 * xi.powi(3) * sign * sp_z
                        + xi.powi(4) * 0.5);
            add(&mut sys, r_shear_int, lay.y(0, node), y_coeff);
            add(&mut sys, r_shear_int, Some(lay.z(0, node)), z_coeff);
        }
        for j in 0..=two_n {
            add(&mut sys, r_shear_int, lay.w(1, j), c1.beta * l2 * kw.lin_transf[j]);
            add(&mut sys, r_shear_int, lay.w(2, j), c2.beta * l2 * kw.lin_transf[j]);
            add(&mut sys, r_shear_int, lay.w(0, j), beta_sum * kw.lin_cauchy[j]);
        }

        // Interface normal (folded): -(a1-a2) phi0 + b1 l^2 K[psi1]
        // + b2 l^2 K[psi2] + (b1+b2) C[psi0] - g0i l^-2 (xi psi0 + xi^2 psi0') = 0.
        let slope = st.gamma0_interface / l2;
        add(&mut sys, r_norm_int, lay.w(0, jl), -alpha_diff * 0.5);
        add(&mut sys, r_norm_int, lay.w(0, jr), -alpha_diff * 0.5);
        for (node, sign) in [(jl, -1.0), (jr, 1.0)] {
            let y_coeff = -slope * (xi * s_y + xi * xi * sign * sp_y);
            let z_coeff = -slope * (xi * s_z + xi * xi * sign * sp_z);
            add(&mut sys, r_norm_int, lay.y(0, node), y_coeff);
            add(&mut sys, r_norm_int, Some(lay.z(0, node)), z_coeff);
        }
        for j in 0..=two_n {
            add(&mut sys, r_norm_int, lay.y(1, j), c1.beta * l2 * kw.cub_transf_y[j]);
            add(
                &mut sys,
                r_norm_int,
                Some(lay.z(1, j)),
                c1.beta * l2 * kw.cub_transf_z[j],
            );
            add(&mut sys, r_norm_int, lay.y(2, j), c2.beta * l2 * kw.cub_transf_y[j]);
            add(
                &mut sys,
                r_norm_int,
                Some(lay.z(2, j)),
                c2.beta * l2 * kw.cub_transf_z[j],
            );
            add(&mut sys, r_norm_int, lay.y(0, j), beta_sum * kw.cub_cauchy_y[j]);
            add(
                &mut sys,
                r_norm_int,
                Some(lay.z(0, j)),
                beta_sum * kw.cub_cauchy_z[j],
            );
        }
    }

    // Second-derivative consistency rows with zero ghost values:
    // z_{j-1} + 4 z_j + z_{j+1} = (6/h^2)(y_{j-1} - 2 y_j + y_{j+1}),
    // written scaled by h^2/6 so the rows sit at the same magnitude as the
    // rest of the system.
    let cont_base = 12 * n;
    let h2_6 = h * h / 6.0;
    for k in 0..3 {
        for j in 0..=two_n {
            let r = cont_base + k * (two_n + 1) + j;
            if j > 0 {
                sys.add(r, lay.z(k, j - 1), h2_6);
                add(&mut sys, r, lay.y(k, j - 1), -1.0);
            }
            sys.add(r, lay.z(k, j), 4.0 * h2_6);
            add(&mut sys, r, lay.y(k, j), 2.0);
            if j < two_n {
                sys.add(r, lay.z(k, j + 1), h2_6);
                add(&mut sys, r, lay.y(k, j + 1), -1.0);
            }
        }
    }

    // Constraint rows, same order as the Taylor solver.
    let base = 18 * n + 3;

    // Net normal traction: g0+ [psi1] + g0- [psi2] = ∫(g+ - g-).
    let r = base;
    add(&mut sys, r, lay.y(1, two_n), st.gamma0_plus);
    add(&mut sys, r, lay.y(1, 0), -st.gamma0_plus);
    add(&mut sys, r, lay.y(2, two_n), st.gamma0_minus);
    add(&mut sys, r, lay.y(2, 0), -st.gamma0_minus);
    sys.rhs[r] =
        poly_symmetric_integral(&p.load.g_plus, l) - poly_symmetric_integral(&p.load.g_minus, l);

    // Net shear traction: g1+ [psi1'] + g1- [psi2'] = -∫(f+ - f-).
    // Endpoint derivatives of the cubic pieces:
    //   S'(x_0)  = (y_1 - y_0)/h - h (z_0/3 + z_1/6)
    //   S'(x_2N) = (y_2N - y_2N-1)/h + h (z_2N/3 + z_2N-1/6)
    let r = base + 1;
    for (g, k) in [(st.gamma1_plus, 1usize), (st.gamma1_minus, 2usize)] {
        add(&mut sys, r, lay.y(k, two_n), g / h);
        add(&mut sys, r, lay.y(k, two_n - 1), -g / h);
        add(&mut sys, r, Some(lay.z(k, two_n)), g * h / 3.0);
        add(&mut sys, r, Some(lay.z(k, two_n - 1)), g * h / 6.0);
        add(&mut sys, r, lay.y(k, 1), -g / h);
        add(&mut sys, r, lay.y(k, 0), g / h);
        add(&mut sys, r, Some(lay.z(k, 0)), g * h / 3.0);
        add(&mut sys, r, Some(lay.z(k, 1)), g * h / 6.0);
    }
    sys.rhs[r] =
        -(poly_symmetric_integral(&p.load.f_plus, l) - poly_symmetric_integral(&p.load.f_minus, l));

    // Horizontal single-valuedness: trapezoid-exact ∫(phi1 - phi2) = 0.
    let r = base + 2;
    for j in 0..=two_n {
        let weight = if j == 0 || j == two_n { h / 2.0 } else { h };
        add(&mut sys, r, lay.w(1, j), weight);
        add(&mut sys, r, lay.w(2, j), -weight);
    }

    // Vertical single-valuedness: exact cubic integrals, ∫(psi1 - psi2) = 0.
    let r = base + 3;
    for j in 0..=two_n {
        let y_weight = if j == 0 || j == two_n { h / 2.0 } else { h };
        let z_weight = if j == 0 || j == two_n {
            -h * h * h / 24.0
        } else {
            -h * h * h / 12.0
        };
        add(&mut sys, r, lay.y(1, j), y_weight);
        add(&mut sys, r, lay.y(2, j), -y_weight);
        add(&mut sys, r, Some(lay.z(1, j)), z_weight);
        add(&mut sys, r, Some(lay.z(2, j)), -z_weight);
    }

    Ok(sys)
}

/// Assemble, solve and unpack the spline discretization.
pub fn solve_spline(p: &Problem, half_count: usize) -> Result<SplineSolution> {
    let sys = assemble_spline_system(p, half_count)?;
    let report = solve_dense(&sys)?;
    let n = half_count;
    let lay = SplineLayout { n };
    let grid = SplineGrid::new(n, p.half_length);
    let nodes = grid.node_count();
    let sol = &report.solution;
    let unpack_w = |k: usize| -> Vec<f64> {
        (0..nodes)
            .map(|j| lay.w(k, j).map_or(0.0, |c| sol[c]))
            .collect()
    };
    let unpack_y = |k: usize| -> Vec<f64> {
        (0..nodes)
            .map(|j| lay.y(k, j).map_or(0.0, |c| sol[c]))
            .collect()
    };
    let unpack_z = |k: usize| -> Vec<f64> { (0..nodes).map(|j| sol[lay.z(k, j)]).collect() };
    Ok(SplineSolution {
        grid,
        w: [unpack_w(0), unpack_w(1), unpack_w(2)],
        y: [unpack_y(0), unpack_y(1), unpack_y(2)],
        z: [unpack_z(0), unpack_z(1), unpack_z(2)],
        quality: SolveQuality {
            condition_estimate: report.condition_estimate,
            residual_norm: report.residual_norm,
        },
    })
}

/// Discrepancy metrics between the two discretizations on a shared grid.
#[derive(Debug, Clone, Copy)]
pub struct Discrepancy {
    /// Relative max-norm gap of the upper normal slope.
    pub psi1_linf_rel: f64,
    pub psi2_linf_rel: f64,
    /// Relative max-norm gap of the crack opening (upper face).
    pub opening_linf_rel: f64,
    pub opening_l2_rel: f64,
}

/// Compare a Taylor solution against a spline solution of the same problem.
pub fn compare(t: &TaylorSolution, s: &SplineSolution, xs: &[f64]) -> Discrepancy {
    let mut psi1_gap = 0.0f64;
    let mut psi1_ref = 0.0f64;
    let mut psi2_gap = 0.0f64;
    let mut psi2_ref = 0.0f64;
    let mut open_gap = 0.0f64;
    let mut open_ref = 0.0f64;
    let mut open_sq = 0.0;
    let mut open_ref_sq = 0.0;
    for &x in xs {
        let p1t = t.psi1_at(x);
        let p2t = t.psi2_at(x);
        psi1_gap = psi1_gap.max((p1t - s.cubic_at(1, x)).abs());
        psi2_gap = psi2_gap.max((p2t - s.cubic_at(2, x)).abs());
        psi1_ref = psi1_ref.max(p1t.abs());
        psi2_ref = psi2_ref.max(p2t.abs());
        let (ut, _) = crate::postprocess::crack_opening(t, x);
        let us = s.opening_at(1, x);
        open_gap = open_gap.max((ut - us).abs());
        open_ref = open_ref.max(ut.abs());
        open_sq += (ut - us) * (ut - us);
        open_ref_sq += ut * ut;
    }
    let guard = |v: f64| if v == 0.0 { 1.0 } else { v };
    Discrepancy {
        psi1_linf_rel: psi1_gap / guard(psi1_ref),
        psi2_linf_rel: psi2_gap / guard(psi2_ref),
        opening_linf_rel: open_gap / guard(open_ref),
        opening_l2_rel: open_sq.sqrt() / guard(open_ref_sq.sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CrackLoad, FarField, Material, SurfaceTension};
    use crate::numerics::quadrature::{integrate_smooth, pv_quadrature_oracle};
    use crate::taylor;

    fn fig2_problem() -> Problem {
        Problem {
            material_upper: Material::new(70.0, 0.3).unwrap(),
            material_lower: Material::new(70.0, 0.3).unwrap(),
            surface_tension: SurfaceTension {
                gamma0_plus: 0.01,
                gamma0_minus: 0.01,
                gamma1_plus: 0.01,
                gamma1_minus: 0.01,
                gamma0_interface: 0.005,
                gamma1_interface: 0.005,
            },
            far_field: FarField::tension(1.0),
            load: CrackLoad::zero(),
            half_length: 1.0,
        }
    }

    #[test]
    fn grid_structure() {
        let g = SplineGrid::new(5, 1.0);
        assert_eq!(g.node_count(), 11);
        assert_eq!(g.node(0), -1.0);
        assert_eq!(g.node(10), 1.0);
        assert!((g.node(5)).abs() < 1e-15);
        assert!((g.midpoint(1) - (-0.9)).abs() < 1e-15);
        assert!((g.h - 0.2).abs() < 1e-15);
    }

    #[test]
    fn transform_identities() {
        let p = fig2_problem();
        let tr = transform_to_finite(&p);
        // phi(x) = 1/x folds to the constant 1.
        for x in [0.2, -0.7, 0.95] {
            assert!((tr.fold(|r| 1.0 / r, x) - 1.0).abs() < 1e-12);
        }
        // Kernel at r = 0 is -1/l^2 for any x.
        assert!((tr.transformed_kernel(0.0, 0.3) + 1.0).abs() < 1e-15);
        // Kernel bounded on the segment: |r x| < l^2.
        for r in [-0.99, -0.3, 0.4, 0.99] {
            for x in [-0.97, 0.1, 0.92] {
                assert!(tr.transformed_kernel(r, x).abs() < 1e3);
            }
        }
    }

    #[test]
    fn dimension_bookkeeping() {
        let sys = assemble_spline_system(&fig2_problem(), 30).unwrap();
        assert_eq!(sys.dimension, 547);
        let sys = assemble_spline_system(&fig2_problem(), 4).unwrap();
        assert_eq!(sys.dimension, 79);
        assert!(assemble_spline_system(&fig2_problem(), 3).is_err());
    }

    #[test]
    fn piece_kernel_integrals_match_quadrature() {
        // Cauchy kernel with the singular point inside the piece.
        let c = [0.3, -1.2, 0.5, 2.0];
        let poly = |r: f64| 0.3 - 1.2 * r + 0.5 * r * r + 2.0 * r * r * r;
        let (a, b) = (-0.4, 0.1);
        let xi = -0.15;
        let direct = cauchy_piece(&c, a, b, xi);
        let oracle = pv_quadrature_oracle(poly, a, b, xi).unwrap();
        assert!((direct - oracle).abs() < 1e-11, "{direct} vs {oracle}");
        // Singular point outside the piece.
        let xi = 0.7;
        let direct = cauchy_piece(&c, a, b, xi);
        let oracle = integrate_smooth(|r| poly(r) / (r - xi), a, b).unwrap();
        assert!((direct - oracle).abs() < 1e-11);
        // Transformed kernel, both branches of the evaluator.
        for xi in [0.05, 0.3, 0.8, -0.6, -0.97] {
            let l = 1.0;
            let direct = transformed_piece(&c, a, b, xi, l);
            let oracle = integrate_smooth(|r| poly(r) / (r * xi - l * l), a, b).unwrap();
            assert!(
                (direct - oracle).abs() < 1e-12,
                "xi={xi}: {direct} vs {oracle}"
            );
        }
    }

    #[test]
    fn cubic_interpolation_identity() {
        // The piecewise formula returns y_j and z_j at the nodes for any
        // parameter values, independent of the consistency relations.
        let grid = SplineGrid::new(6, 1.3);
        let nodes = grid.node_count();
        let mut s = SplineSolution {
            grid,
            w: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
            y: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
            z: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
            quality: SolveQuality {
                condition_estimate: 1.0,
                residual_norm: 0.0,
            },
        };
        for j in 0..nodes {
            s.y[1][j] = (j as f64 * 0.7).sin();
            s.z[1][j] = (j as f64 * 1.3).cos();
        }
        for j in 0..nodes {
            let x = s.grid.node(j);
            assert!((s.cubic_at(1, x) - s.y[1][j]).abs() < 1e-12);
            assert!((s.cubic_second_at(1, x) - s.z[1][j]).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_formulas_match_piece_evaluation() {
        let grid = SplineGrid::new(4, 1.0);
        let nodes = grid.node_count();
        let mut s = SplineSolution {
            grid,
            w: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
            y: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
            z: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
            quality: SolveQuality {
                condition_estimate: 1.0,
                residual_norm: 0.0,
            },
        };
        for j in 0..nodes {
            s.y[0][j] = 0.3 * j as f64 - 0.1 * (j as f64).powi(2);
            s.z[0][j] = 0.5 - 0.2 * j as f64;
        }
        let h = s.grid.h;
        for i in 1..=8usize {
            let xi = s.grid.midpoint(i);
            let (yl, yr) = (s.y[0][i - 1], s.y[0][i]);
            let (zl, zr) = (s.z[0][i - 1], s.z[0][i]);
            let value = (yl + yr) / 2.0 - (zl + zr) * h * h / 16.0;
            let deriv = (yr - yl) / h - (zr - zl) * h / 24.0;
            let second = (zl + zr) / 2.0;
            assert!((s.cubic_at(0, xi) - value).abs() < 1e-13);
            assert!((s.cubic_deriv_at(0, xi) - deriv).abs() < 1e-13);
            assert!((s.cubic_second_at(0, xi) - second).abs() < 1e-13);
        }
    }

    #[test]
    fn spline_interpolant_fourth_order_interior() {
        // Sample a smooth function, solve the consistency relations for z,
        // and check interior convergence of the interpolant.
        let f = |x: f64| (2.0 * x).sin() + 0.3 * x * x;
        let mut errors = Vec::new();
        for n in [8usize, 16, 32] {
            let grid = SplineGrid::new(n, 1.0);
            let nodes = grid.node_count();
            let y: Vec<f64> = (0..nodes).map(|j| f(grid.node(j))).collect();
            // Solve z from the consistency rows (ghost values zero).
            let mut sys = LinearSystem::new(nodes);
            let h2 = grid.h * grid.h;
            for j in 0..nodes {
                if j > 0 {
                    sys.add(j, j - 1, 1.0);
                }
                sys.add(j, j, 4.0);
                if j + 1 < nodes {
                    sys.add(j, j + 1, 1.0);
                }
                let ym = if j > 0 { y[j - 1] } else { 0.0 };
                let yp = if j + 1 < nodes { y[j + 1] } else { 0.0 };
                sys.rhs[j] = 6.0 / h2 * (ym - 2.0 * y[j] + yp);
            }
            let z = solve_dense(&sys).unwrap().solution;
            let mut s = SplineSolution {
                grid,
                w: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
                y: [y.clone(), vec![0.0; nodes], vec![0.0; nodes]],
                z: [z, vec![0.0; nodes], vec![0.0; nodes]],
                quality: SolveQuality {
                    condition_estimate: 1.0,
                    residual_norm: 0.0,
                },
            };
            let _ = &mut s;
            let mut err = 0.0f64;
            for i in 0..200 {
                let x = -0.5 + i as f64 / 199.0;
                err = err.max((s.cubic_at(0, x) - f(x)).abs());
            }
            errors.push(err);
        }
        assert!(
            errors[1] < errors[0] / 8.0 && errors[2] < errors[1] / 8.0,
            "interior convergence too slow: {errors:?}"
        );
    }

    #[test]
    fn zero_loading_zero_solution() {
        let mut p = fig2_problem();
        p.far_field = FarField::default();
        let s = solve_spline(&p, 6).unwrap();
        for k in 0..3 {
            assert!(s.w[k].iter().all(|v| *v == 0.0));
            assert!(s.y[k].iter().all(|v| *v == 0.0));
            assert!(s.z[k].iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn load_scaling_linearity() {
        let p = fig2_problem();
        let mut p2 = p.clone();
        p2.far_field.sigma = 3.0;
        let s1 = solve_spline(&p, 8).unwrap();
        let s2 = solve_spline(&p2, 8).unwrap();
        let norm = s1.y[1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in s1.y[1].iter().zip(&s2.y[1]) {
            assert!((3.0 * a - b).abs() <= 1e-11 * norm.max(1.0));
        }
    }

    #[test]
    fn consistency_rows_hold() {
        let p = fig2_problem();
        let s = solve_spline(&p, 10).unwrap();
        let h2 = s.grid.h * s.grid.h;
        let scale = s.z[1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..3 {
            for j in 0..s.grid.node_count() {
                let zm = if j > 0 { s.z[k][j - 1] } else { 0.0 };
                let zp = if j + 1 < s.grid.node_count() {
                    s.z[k][j + 1]
                } else {
                    0.0
                };
                let ym = if j > 0 { s.y[k][j - 1] } else { 0.0 };
                let yp = if j + 1 < s.grid.node_count() {
                    s.y[k][j + 1]
                } else {
                    0.0
                };
                let lhs = zm + 4.0 * s.z[k][j] + zp;
                let rhs = 6.0 / h2 * (ym - 2.0 * s.y[k][j] + yp);
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * scale.max(1.0),
                    "k={k} j={j}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn decay_pins_enforced() {
        let p = fig2_problem();
        let s = solve_spline(&p, 8).unwrap();
        let n = s.grid.half_count;
        assert_eq!(s.w[0][n], 0.0);
        assert_eq!(s.y[0][n], 0.0);
    }

    #[test]
    fn self_comparison_is_zero() {
        // Sampling the spline representation from a Taylor solution and
        // comparing against itself gives zero discrepancy.
        let p = fig2_problem();
        let t = taylor::solve(&p, 16).unwrap();
        let grid = SplineGrid::new(12, p.half_length);
        let nodes = grid.node_count();
        let mut y1 = Vec::with_capacity(nodes);
        for j in 0..nodes {
            y1.push(t.psi1_at(grid.node(j)));
        }
        let s = SplineSolution {
            grid,
            w: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
            y: [vec![0.0; nodes], y1, vec![0.0; nodes]],
            z: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]],
            quality: SolveQuality {
                condition_estimate: 1.0,
                residual_norm: 0.0,
            },
        };
        let xs: Vec<f64> = (0..nodes).map(|j| s.grid.node(j)).collect();
        let mut gap = 0.0f64;
        for &x in &xs {
            gap = gap.max((s.cubic_at(1, x) - t.psi1_at(x)).abs());
        }
        assert!(gap < 1e-14);
    }

    #[test]
    fn cross_validates_taylor_fig2() {
        // Shared functionals: crack opening at 11 equally spaced interior
        // points. Both discretizations lose accuracy in the tip regions, so
        // the cross-validation grid is the interior one.
        let p = fig2_problem();
        let t = taylor::solve(&p, 30).unwrap();
        let s = solve_spline(&p, 30).unwrap();
        let xs: Vec<f64> = (1..=11).map(|i| -1.0 + 2.0 * i as f64 / 12.0).collect();
        let d = compare(&t, &s, &xs);
        assert!(
            d.opening_linf_rel <= 2e-2,
            "opening gap {} too large",
            d.opening_linf_rel
        );
        assert!(d.opening_l2_rel <= 2e-2, "l2 gap {}", d.opening_l2_rel);
    }
}
