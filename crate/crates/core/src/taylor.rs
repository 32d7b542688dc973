//! Production solver: Taylor-polynomial approximation of the six unknown
//! slope functions and coefficient matching of the singular system.
//!
//! The crack-face slopes are polynomials (degree `N` for the tangential
//! slopes, `N+2` for the normal slopes, whose two extra coefficients carry
//! the integration constants of the problem), the interface slopes are sums
//! of negative powers `x^-1 .. x^-(N+1)` so they decay at infinity. Matching
//! coefficients of `x^0..x^N` on the crack and `x^-1..x^-(N+1)` on the
//! interface, plus the four global constraint rows, yields a dense
//! `(6N+10) x (6N+10)` system.
//!
//! Row order: the four crack blocks (shear+, normal+, shear-, normal-) for
//! `k = 0..N`, the two interface blocks for `k = 1..N+1`, then the four
//! constraints (net normal traction, net shear traction, horizontal and
//! vertical single-valuedness). Unknown order: `a1, a2, a3, b1, b2, b3`.

use crate::error::{Error, Result};
use crate::model::{poly_eval, poly_symmetric_integral, Problem};
use crate::numerics::cauchy::{
    cauchy_integral, odd_weight, symmetric_monomial_integral, CauchyKind,
};
use crate::numerics::linalg::{solve_dense, LinearSystem};
use crate::numerics::quadrature::integrate_smooth;

/// Solver-quality metadata carried along with a solution.
#[derive(Debug, Clone, Copy)]
pub struct SolveQuality {
    pub condition_estimate: f64,
    pub residual_norm: f64,
}

/// Taylor coefficients of the six slope functions.
///
/// `a1`, `a2` hold the crack-face tangential slopes (powers `0..=N`);
/// `b1`, `b2` the crack-face normal slopes (powers `0..=N+2`); `a3`, `b3`
/// the interface slopes, entry `i` multiplying `x^-(i+1)`.
#[derive(Debug, Clone)]
pub struct TaylorSolution {
    pub order: usize,
    pub half_length: f64,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub a3: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub b3: Vec<f64>,
    pub quality: SolveQuality,
}

/// Column offsets of the unknown blocks for a given order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub n: usize,
}

impl Layout {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn dimension(&self) -> usize {
        6 * self.n + 10
    }

    /// `a1_k`, k = 0..=N
    pub fn a1(&self, k: usize) -> usize {
        k
    }

    /// `a2_k`, k = 0..=N
    pub fn a2(&self, k: usize) -> usize {
        (self.n + 1) + k
    }

    /// `a3_k`, k = 1..=N+1 (coefficient of `x^-k`)
    pub fn a3(&self, k: usize) -> usize {
        2 * (self.n + 1) + (k - 1)
    }

    /// `b1_k`, k = 0..=N+2
    pub fn b1(&self, k: usize) -> usize {
        3 * (self.n + 1) + k
    }

    /// `b2_k`, k = 0..=N+2
    pub fn b2(&self, k: usize) -> usize {
        3 * (self.n + 1) + (self.n + 3) + k
    }

    /// `b3_k`, k = 1..=N+1 (coefficient of `x^-k`)
    pub fn b3(&self, k: usize) -> usize {
        3 * (self.n + 1) + 2 * (self.n + 3) + (k - 1)
    }
}

fn check_preconditions(p: &Problem, order: usize) -> Result<()> {
    p.validate()?;
    if order < 2 {
        return Err(Error::InvalidInput(format!(
            "Taylor order must be at least 2, got {order}"
        )));
    }
    if p.load.degree() > order {
        return Err(Error::DimensionMismatch(format!(
            "crack-load degree {} exceeds Taylor order {order}",
            p.load.degree()
        )));
    }
    Ok(())
}

/// Assemble the `(6N+10) x (6N+10)` coefficient-matching system.
pub fn assemble(p: &Problem, order: usize) -> Result<LinearSystem> {
    check_preconditions(p, order)?;
    let n = order;
    let lay = Layout::new(n);
    let mut sys = LinearSystem::new(lay.dimension());
    let l = p.half_length;
    let c1 = p.material_upper.constants();
    let c2 = p.material_lower.constants();
    let st = &p.surface_tension;
    let (sigma, tau) = (p.far_field.sigma, p.far_field.tau);
    let load = &p.load;
    let load_coeff = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);

    // Power helper: signed integer powers of l.
    let lp = |e: i64| l.powi(e as i32);

    // Crack blocks, matching powers x^k, k = 0..N.
    for k in 0..=n {
        let ki = k as i64;
        let kf = k as f64;
        let delta0 = if k == 0 { 1.0 } else { 0.0 };

        // Block 1: shear condition on the upper face.
        let r = k;
        sys.add(r, lay.b1(k), c1.alpha);
        for j in 0..=n {
            if j != k {
                sys.add(r, lay.a1(j), -c1.beta * odd_weight(ki - j as i64) * lp(j as i64 - ki));
            }
        }
        for j in 1..=n + 1 {
            sys.add(r, lay.a3(j), c1.beta * odd_weight(j as i64 + ki) * lp(-(j as i64) - ki));
        }
        sys.add(r, lay.b1(k + 2), -st.gamma1_plus * (kf + 2.0) * (kf + 1.0));
        sys.rhs[r] = -tau * delta0 + load_coeff(&load.f_plus, k);

        // Block 2: normal condition on the upper face.
        let r = (n + 1) + k;
        sys.add(r, lay.a1(k), -c1.alpha);
        for j in 0..=n + 2 {
            if j != k {
                sys.add(r, lay.b1(j), -c1.beta * odd_weight(ki - j as i64) * lp(j as i64 - ki));
            }
        }
        for j in 1..=n + 1 {
            sys.add(r, lay.b3(j), c1.beta * odd_weight(j as i64 + ki) * lp(-(j as i64) - ki));
        }
        sys.add(r, lay.b1(k + 1), st.gamma0_plus * (kf + 1.0));
        sys.rhs[r] = -sigma * delta0 + load_coeff(&load.g_plus, k);

        // Block 3: shear condition on the lower face.
        let r = 2 * (n + 1) + k;
        sys.add(r, lay.b2(k), c2.alpha);
        for j in 0..=n {
            if j != k {
                sys.add(r, lay.a2(j), c2.beta * odd_weight(ki - j as i64) * lp(j as i64 - ki));
            }
        }
        for j in 1..=n + 1 {
            sys.add(r, lay.a3(j), -c2.beta * odd_weight(j as i64 + ki) * lp(-(j as i64) - ki));
        }
        sys.add(r, lay.b2(k + 2), st.gamma1_minus * (kf + 2.0) * (kf + 1.0));
        sys.rhs[r] = -tau * delta0 + load_coeff(&load.f_minus, k);

        // Block 4: normal condition on the lower face.
        let r = 3 * (n + 1) + k;
        sys.add(r, lay.a2(k), -c2.alpha);
        for j in 0..=n + 2 {
            if j != k {
                sys.add(r, lay.b2(j), c2.beta * odd_weight(ki - j as i64) * lp(j as i64 - ki));
            }
        }
        for j in 1..=n + 1 {
            sys.add(r, lay.b3(j), -c2.beta * odd_weight(j as i64 + ki) * lp(-(j as i64) - ki));
        }
        sys.add(r, lay.b2(k + 1), -st.gamma0_minus * (kf + 1.0));
        sys.rhs[r] = -sigma * delta0 + load_coeff(&load.g_minus, k);
    }

    // Interface blocks, matching powers x^-k, k = 1..N+1.
    let alpha_diff = c1.alpha - c2.alpha;
    let beta_sum = c1.beta + c2.beta;
    for k in 1..=n + 1 {
        let ki = k as i64;
        let kf = k as f64;

        // Block 5: shear jump across the interface.
        let r = 4 * (n + 1) + (k - 1);
        sys.add(r, lay.b3(k), alpha_diff);
        for j in 1..=n + 1 {
            if j != k {
                sys.add(r, lay.a3(j), beta_sum * odd_weight(ki - j as i64) * lp(ki - j as i64));
            }
        }
        for j in 0..=n {
            let w = odd_weight(j as i64 + ki) * lp(ki + j as i64);
            sys.add(r, lay.a1(j), -c1.beta * w);
            sys.add(r, lay.a2(j), -c2.beta * w);
        }
        if k >= 3 {
            sys.add(r, lay.b3(k - 2), -st.gamma1_interface * (kf - 2.0) * (kf - 1.0));
        }

        // Block 6: normal jump across the interface.
        let r = 5 * (n + 1) + (k - 1);
        sys.add(r, lay.a3(k), -alpha_diff);
        for j in 1..=n + 1 {
            if j != k {
                sys.add(r, lay.b3(j), beta_sum * odd_weight(ki - j as i64) * lp(ki - j as i64));
            }
        }
        for j in 0..=n + 2 {
            let w = odd_weight(j as i64 + ki) * lp(ki + j as i64);
            sys.add(r, lay.b1(j), -c1.beta * w);
            sys.add(r, lay.b2(j), -c2.beta * w);
        }
        if k >= 2 {
            sys.add(r, lay.b3(k - 1), -st.gamma0_interface * (kf - 1.0));
        }
    }

    // Constraint rows. The load integrals on the right-hand sides follow from
    // integrating the face boundary conditions over the crack; the net-traction
    // conditions read
    //   g0+ [psi1] + g0- [psi2] = ∫(g+ - g-) dx    (normal),
    //   g1+ [psi1'] + g1- [psi2'] = -∫(f+ - f-) dx (shear),
    // with [h] = h(l) - h(-l).
    let base = 6 * (n + 1);

    let r = base; // net normal traction
    for k in 0..=n + 2 {
        let w = if k % 2 == 1 { 2.0 * lp(k as i64) } else { 0.0 };
        if w != 0.0 {
            sys.add(r, lay.b1(k), st.gamma0_plus * w);
            sys.add(r, lay.b2(k), st.gamma0_minus * w);
        }
    }
    sys.rhs[r] =
        poly_symmetric_integral(&load.g_plus, l) - poly_symmetric_integral(&load.g_minus, l);

    let r = base + 1; // net shear traction
    for k in 1..=n + 2 {
        let w = if (k - 1) % 2 == 1 {
            2.0 * k as f64 * lp(k as i64 - 1)
        } else {
            0.0
        };
        if w != 0.0 {
            sys.add(r, lay.b1(k), st.gamma1_plus * w);
            sys.add(r, lay.b2(k), st.gamma1_minus * w);
        }
    }
    sys.rhs[r] =
        -(poly_symmetric_integral(&load.f_plus, l) - poly_symmetric_integral(&load.f_minus, l));

    let r = base + 2; // horizontal single-valuedness
    for k in 0..=n {
        let w = symmetric_monomial_integral(k, l);
        if w != 0.0 {
            sys.add(r, lay.a1(k), w);
            sys.add(r, lay.a2(k), -w);
        }
    }

    let r = base + 3; // vertical single-valuedness
    for k in 0..=n + 2 {
        let w = symmetric_monomial_integral(k, l);
        if w != 0.0 {
            sys.add(r, lay.b1(k), w);
            sys.add(r, lay.b2(k), -w);
        }
    }

    Ok(sys)
}

/// Assemble and solve for the Taylor coefficients.
pub fn solve(p: &Problem, order: usize) -> Result<TaylorSolution> {
    let sys = assemble(p, order)?;
    let report = solve_dense(&sys)?;
    let n = order;
    let lay = Layout::new(n);
    let x = &report.solution;
    let slice = |from: usize, len: usize| x[from..from + len].to_vec();
    Ok(TaylorSolution {
        order: n,
        half_length: p.half_length,
        a1: slice(lay.a1(0), n + 1),
        a2: slice(lay.a2(0), n + 1),
        a3: slice(lay.a3(1), n + 1),
        b1: slice(lay.b1(0), n + 3),
        b2: slice(lay.b2(0), n + 3),
        b3: slice(lay.b3(1), n + 1),
        quality: SolveQuality {
            condition_estimate: report.condition_estimate,
            residual_norm: report.residual_norm,
        },
    })
}

impl TaylorSolution {
    pub fn phi1_at(&self, x: f64) -> f64 {
        poly_eval(&self.a1, x)
    }

    pub fn phi2_at(&self, x: f64) -> f64 {
        poly_eval(&self.a2, x)
    }

    pub fn psi1_at(&self, x: f64) -> f64 {
        poly_eval(&self.b1, x)
    }

    pub fn psi2_at(&self, x: f64) -> f64 {
        poly_eval(&self.b2, x)
    }

    pub fn psi1_deriv_at(&self, x: f64) -> f64 {
        poly_eval(&derive_coeffs(&self.b1), x)
    }

    pub fn psi2_deriv_at(&self, x: f64) -> f64 {
        poly_eval(&derive_coeffs(&self.b2), x)
    }

    pub fn psi1_second_at(&self, x: f64) -> f64 {
        poly_eval(&derive_coeffs(&derive_coeffs(&self.b1)), x)
    }

    pub fn psi2_second_at(&self, x: f64) -> f64 {
        poly_eval(&derive_coeffs(&derive_coeffs(&self.b2)), x)
    }

    /// Interface tangential slope `sum a3_k x^-k`.
    pub fn phi_at(&self, x: f64) -> f64 {
        negative_power_eval(&self.a3, x, 0)
    }

    /// Interface normal slope `sum b3_k x^-k`.
    pub fn psi_at(&self, x: f64) -> f64 {
        negative_power_eval(&self.b3, x, 0)
    }

    pub fn psi_deriv_at(&self, x: f64) -> f64 {
        negative_power_eval(&self.b3, x, 1)
    }

    pub fn psi_second_at(&self, x: f64) -> f64 {
        negative_power_eval(&self.b3, x, 2)
    }

    pub fn phi_deriv_at(&self, x: f64) -> f64 {
        negative_power_eval(&self.a3, x, 1)
    }
}

pub(crate) fn derive_coeffs(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

/// Evaluate `sum_k c[k-1] x^-k` differentiated `deriv` times; entry `i`
/// multiplies `x^-(i+1)`.
fn negative_power_eval(coeffs: &[f64], x: f64, deriv: u32) -> f64 {
    let mut sum = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let k = (i + 1) as f64;
        let mut factor = 1.0;
        for d in 0..deriv {
            factor *= -(k + d as f64);
        }
        sum += c * factor * x.powi(-((i + 1) as i32 + deriv as i32));
    }
    sum
}

/// `sum_j coeffs[j] * ∫ r^j/(r-x) dr` over the crack segment (positive powers).
pub(crate) fn positive_series_sum(
    coeffs: &[f64],
    kind: CauchyKind,
    x: f64,
    l: f64,
) -> Result<f64> {
    debug_assert!(matches!(kind, CauchyKind::InnerInner | CauchyKind::InnerOuter));
    let mut sum = 0.0;
    for (j, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            sum += c * cauchy_integral(kind, j, x, l)?;
        }
    }
    Ok(sum)
}

/// `sum_k coeffs[k-1] * ∫ r^-k/(r-x) dr` over the interface rays.
pub(crate) fn negative_series_sum(
    coeffs: &[f64],
    kind: CauchyKind,
    x: f64,
    l: f64,
) -> Result<f64> {
    debug_assert!(matches!(kind, CauchyKind::OuterInner | CauchyKind::OuterOuter));
    let mut sum = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            sum += c * cauchy_integral(kind, i + 1, x, l)?;
        }
    }
    Ok(sum)
}

/// Residuals of the four constraint conditions together with the scale of the
/// terms entering each, for relative comparison.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintResiduals {
    /// Net normal traction, net shear traction, horizontal and vertical
    /// single-valuedness.
    pub values: [f64; 4],
    pub scales: [f64; 4],
}

/// Max-norm residuals of the six singular equations on a sample grid, plus
/// the constraint residuals and the two routes for the net-shear integral.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// Max absolute residual per equation (upper shear, upper normal, lower
    /// shear, lower normal, interface shear, interface normal).
    pub equation_max: [f64; 6],
    pub constraints: ConstraintResiduals,
    /// `∫ (s12+ - s12-) dx` over the slightly truncated crack, evaluated from
    /// the face boundary conditions (exact polynomial integration).
    pub shear_jump_integral_face: f64,
    /// Same integral with the face stresses reconstructed through the
    /// Dirichlet-to-Neumann maps (quadrature of the series representation).
    pub shear_jump_integral_dtn: f64,
}

/// Margin (fraction of `l`) sample points must keep from the tips.
pub const RESIDUAL_TIP_MARGIN: f64 = 1e-3;

/// Outer sample points must stay within this multiple of `l`.
pub const RESIDUAL_OUTER_LIMIT: f64 = 10.0;

fn constraint_residuals(p: &Problem, s: &TaylorSolution) -> ConstraintResiduals {
    let l = p.half_length;
    let st = &p.surface_tension;
    let jump = |f: &dyn Fn(f64) -> f64| (f(l), f(-l));

    let (p1l, p1m) = jump(&|x| s.psi1_at(x));
    let (p2l, p2m) = jump(&|x| s.psi2_at(x));
    let gp = poly_symmetric_integral(&p.load.g_plus, l);
    let gm = poly_symmetric_integral(&p.load.g_minus, l);
    let normal = st.gamma0_plus * (p1l - p1m) + st.gamma0_minus * (p2l - p2m) - (gp - gm);
    let normal_scale = st.gamma0_plus.abs() * (p1l.abs() + p1m.abs())
        + st.gamma0_minus.abs() * (p2l.abs() + p2m.abs())
        + gp.abs()
        + gm.abs();

    let (d1l, d1m) = jump(&|x| s.psi1_deriv_at(x));
    let (d2l, d2m) = jump(&|x| s.psi2_deriv_at(x));
    let fp = poly_symmetric_integral(&p.load.f_plus, l);
    let fm = poly_symmetric_integral(&p.load.f_minus, l);
    let shear = st.gamma1_plus * (d1l - d1m) + st.gamma1_minus * (d2l - d2m) + (fp - fm);
    let shear_scale = st.gamma1_plus.abs() * (d1l.abs() + d1m.abs())
        + st.gamma1_minus.abs() * (d2l.abs() + d2m.abs())
        + fp.abs()
        + fm.abs();

    let mut horizontal = 0.0;
    let mut horizontal_scale = 0.0;
    for (k, (c1, c2)) in s.a1.iter().zip(&s.a2).enumerate() {
        let w = symmetric_monomial_integral(k, l);
        horizontal += (c1 - c2) * w;
        horizontal_scale += (c1.abs() + c2.abs()) * w;
    }

    let mut vertical = 0.0;
    let mut vertical_scale = 0.0;
    for (k, (c1, c2)) in s.b1.iter().zip(&s.b2).enumerate() {
        let w = symmetric_monomial_integral(k, l);
        vertical += (c1 - c2) * w;
        vertical_scale += (c1.abs() + c2.abs()) * w;
    }

    ConstraintResiduals {
        values: [normal, shear, horizontal, vertical],
        scales: [normal_scale, shear_scale, horizontal_scale, vertical_scale],
    }
}

/// Shear stresses on the two crack faces reconstructed through the DtN maps
/// (perturbation part plus far-field shear). Valid for `|x| < l`.
fn dtn_face_shear(p: &Problem, s: &TaylorSolution, x: f64) -> Result<(f64, f64)> {
    let l = p.half_length;
    let c1 = p.material_upper.constants();
    let c2 = p.material_lower.constants();
    let tau = p.far_field.tau;
    let upper = c1.alpha * s.psi1_at(x)
        + c1.beta
            * (positive_series_sum(&s.a1, CauchyKind::InnerInner, x, l)?
                + negative_series_sum(&s.a3, CauchyKind::OuterInner, x, l)?)
        + tau;
    let lower = c2.alpha * s.psi2_at(x)
        - c2.beta
            * (positive_series_sum(&s.a2, CauchyKind::InnerInner, x, l)?
                + negative_series_sum(&s.a3, CauchyKind::OuterInner, x, l)?)
        + tau;
    Ok((upper, lower))
}

/// Evaluate the six equations of the singular system at the sample points and
/// report max-norm residuals per equation, the constraint residuals and the
/// DtN cross-check of the net-shear integral.
pub fn residual(p: &Problem, s: &TaylorSolution, xs: &[f64]) -> Result<ResidualReport> {
    let l = p.half_length;
    let c1 = p.material_upper.constants();
    let c2 = p.material_lower.constants();
    let st = &p.surface_tension;
    let (sigma, tau) = (p.far_field.sigma, p.far_field.tau);
    let mut equation_max = [0.0f64; 6];

    for &x in xs {
        let ax = x.abs();
        if ax < l {
            if ax > l * (1.0 - RESIDUAL_TIP_MARGIN) {
                return Err(Error::Domain(format!(
                    "crack sample x={x} too close to a tip (margin {RESIDUAL_TIP_MARGIN})"
                )));
            }
            let ii_a1 = positive_series_sum(&s.a1, CauchyKind::InnerInner, x, l)?;
            let ii_a2 = positive_series_sum(&s.a2, CauchyKind::InnerInner, x, l)?;
            let ii_b1 = positive_series_sum(&s.b1, CauchyKind::InnerInner, x, l)?;
            let ii_b2 = positive_series_sum(&s.b2, CauchyKind::InnerInner, x, l)?;
            let oi_a3 = negative_series_sum(&s.a3, CauchyKind::OuterInner, x, l)?;
            let oi_b3 = negative_series_sum(&s.b3, CauchyKind::OuterInner, x, l)?;

            let r1 = c1.alpha * s.psi1_at(x) + c1.beta * (ii_a1 + oi_a3) + tau
                - st.gamma1_plus * s.psi1_second_at(x)
                - poly_eval(&p.load.f_plus, x);
            let r2 = -c1.alpha * s.phi1_at(x) + c1.beta * (ii_b1 + oi_b3) + sigma
                + st.gamma0_plus * s.psi1_deriv_at(x)
                - poly_eval(&p.load.g_plus, x);
            let r3 = c2.alpha * s.psi2_at(x) - c2.beta * (ii_a2 + oi_a3) + tau
                + st.gamma1_minus * s.psi2_second_at(x)
                - poly_eval(&p.load.f_minus, x);
            let r4 = -c2.alpha * s.phi2_at(x) - c2.beta * (ii_b2 + oi_b3) + sigma
                - st.gamma0_minus * s.psi2_deriv_at(x)
                - poly_eval(&p.load.g_minus, x);
            equation_max[0] = equation_max[0].max(r1.abs());
            equation_max[1] = equation_max[1].max(r2.abs());
            equation_max[2] = equation_max[2].max(r3.abs());
            equation_max[3] = equation_max[3].max(r4.abs());
        } else {
            if ax < l * (1.0 + RESIDUAL_TIP_MARGIN) || ax > l * RESIDUAL_OUTER_LIMIT {
                return Err(Error::Domain(format!(
                    "interface sample x={x} outside the valid band"
                )));
            }
            let io_a1 = positive_series_sum(&s.a1, CauchyKind::InnerOuter, x, l)?;
            let io_a2 = positive_series_sum(&s.a2, CauchyKind::InnerOuter, x, l)?;
            let io_b1 = positive_series_sum(&s.b1, CauchyKind::InnerOuter, x, l)?;
            let io_b2 = positive_series_sum(&s.b2, CauchyKind::InnerOuter, x, l)?;
            let oo_a3 = negative_series_sum(&s.a3, CauchyKind::OuterOuter, x, l)?;
            let oo_b3 = negative_series_sum(&s.b3, CauchyKind::OuterOuter, x, l)?;
            let alpha_diff = c1.alpha - c2.alpha;
            let beta_sum = c1.beta + c2.beta;

            let r5 = alpha_diff * s.psi_at(x)
                + c1.beta * io_a1
                + c2.beta * io_a2
                + beta_sum * oo_a3
                - st.gamma1_interface * s.psi_second_at(x);
            let r6 = -alpha_diff * s.phi_at(x)
                + c1.beta * io_b1
                + c2.beta * io_b2
                + beta_sum * oo_b3
                + st.gamma0_interface * s.psi_deriv_at(x);
            equation_max[4] = equation_max[4].max(r5.abs());
            equation_max[5] = equation_max[5].max(r6.abs());
        }
    }

    // Net-shear integral over the slightly truncated crack, both routes.
    let margin = 0.05 * l;
    let (a, b) = (-l + margin, l - margin);
    let face_jump = |x: f64| {
        let plus = st.gamma1_plus * s.psi1_second_at(x) + poly_eval(&p.load.f_plus, x);
        let minus = -st.gamma1_minus * s.psi2_second_at(x) + poly_eval(&p.load.f_minus, x);
        plus - minus
    };
    let shear_jump_integral_face = integrate_smooth(face_jump, a, b)?;
    let mut shear_jump_integral_dtn = 0.0;
    // Graded panels toward the tips keep the quadrature accurate near the
    // logarithmic ends without adaptive refinement of the costly DtN series.
    let breaks = [0.0, 0.5, 0.8, 0.93, 1.0];
    for w in breaks.windows(2) {
        for (lo, hi) in [
            (a + (w[0] * (b - a)) / 2.0, a + (w[1] * (b - a)) / 2.0),
            (b - (w[1] * (b - a)) / 2.0, b - (w[0] * (b - a)) / 2.0),
        ] {
            shear_jump_integral_dtn += integrate_smooth(
                |x| {
                    let (up, lo_) = dtn_face_shear(p, s, x).unwrap_or((f64::NAN, f64::NAN));
                    up - lo_
                },
                lo,
                hi,
            )?;
        }
    }

    Ok(ResidualReport {
        equation_max,
        constraints: constraint_residuals(p, s),
        shear_jump_integral_face,
        shear_jump_integral_dtn,
    })
}

/// Default off-grid sample set for residual evaluation: interior points away
/// from the tips plus interface points on both sides.
pub fn default_residual_samples(l: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    for i in 0..12 {
        let t = -0.9 + 1.8 * i as f64 / 11.0;
        xs.push(t * l);
    }
    for m in [1.05, 1.2, 1.5, 2.0, 3.0, 5.0] {
        xs.push(m * l);
        xs.push(-m * l);
    }
    xs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CrackLoad, FarField, Material, SurfaceTension};

    pub(crate) fn fig2_problem() -> Problem {
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
    fn system_dimension_matches_order() {
        let sys = assemble(&fig2_problem(), 30).unwrap();
        assert_eq!(sys.dimension, 190);
        let sys = assemble(&fig2_problem(), 5).unwrap();
        assert_eq!(sys.dimension, 40);
    }

    #[test]
    fn zero_loading_zero_rhs_zero_solution() {
        let mut p = fig2_problem();
        p.far_field = FarField::default();
        let sys = assemble(&p, 12).unwrap();
        assert!(sys.rhs.iter().all(|v| *v == 0.0));
        let s = solve(&p, 12).unwrap();
        for c in s.a1.iter().chain(&s.a2).chain(&s.a3).chain(&s.b1).chain(&s.b2).chain(&s.b3) {
            assert_eq!(*c, 0.0);
        }
    }

    #[test]
    fn block1_k0_entries() {
        // At k = 0 the first row carries alpha1 on b1_0 and -2 gamma1+ on b1_2.
        let p = fig2_problem();
        let n = 8;
        let sys = assemble(&p, n).unwrap();
        let lay = Layout::new(n);
        let alpha1 = p.material_upper.constants().alpha;
        assert!((sys.at(0, lay.b1(0)) - alpha1).abs() < 1e-12);
        assert!((sys.at(0, lay.b1(2)) + 2.0 * p.surface_tension.gamma1_plus).abs() < 1e-12);
    }

    #[test]
    fn load_degree_above_order_rejected() {
        let mut p = fig2_problem();
        let mut f = vec![0.0; 6];
        f[5] = 1.0;
        p.load = CrackLoad::new(f.clone(), f, vec![], vec![]);
        assert!(matches!(
            assemble(&p, 4),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(assemble(&p, 6).is_ok());
    }

    #[test]
    fn loads_scale_linearly() {
        let p = fig2_problem();
        let mut p2 = p.clone();
        p2.far_field.sigma = 2.0;
        let s1 = solve(&p, 10).unwrap();
        let s2 = solve(&p2, 10).unwrap();
        let norm: f64 = s1.b1.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (c1, c2) in s1
            .a1
            .iter()
            .chain(&s1.a2)
            .chain(&s1.a3)
            .chain(&s1.b1)
            .chain(&s1.b2)
            .chain(&s1.b3)
            .zip(
                s2.a1
                    .iter()
                    .chain(&s2.a2)
                    .chain(&s2.a3)
                    .chain(&s2.b1)
                    .chain(&s2.b2)
                    .chain(&s2.b3),
            )
        {
            assert!(
                (2.0 * c1 - c2).abs() <= 1e-12 * norm.max(1.0),
                "{c1} vs {c2}"
            );
        }
    }

    #[test]
    fn tension_parity_structure() {
        // Equal materials, symmetric tension: normal slopes odd, tangential even.
        let s = solve(&fig2_problem(), 20).unwrap();
        let scale = s
            .b1
            .iter()
            .chain(&s.a1)
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        for (k, c) in s.b1.iter().enumerate() {
            if k % 2 == 0 {
                assert!(c.abs() <= 1e-8 * scale, "b1[{k}] = {c} not odd");
            }
        }
        for (k, c) in s.b3.iter().enumerate() {
            let power = k + 1;
            if power % 2 == 0 {
                assert!(c.abs() <= 1e-8 * scale, "b3 power {power} = {c} not odd");
            }
        }
        for (k, c) in s.a1.iter().enumerate() {
            if k % 2 == 1 {
                assert!(c.abs() <= 1e-8 * scale, "a1[{k}] = {c} not even");
            }
        }
        for (k, c) in s.a3.iter().enumerate() {
            let power = k + 1;
            if power % 2 == 1 {
                assert!(c.abs() <= 1e-8 * scale, "a3 power {power} = {c} not even");
            }
        }
    }

    #[test]
    fn constraints_hold_exactly() {
        let p = fig2_problem();
        let s = solve(&p, 16).unwrap();
        let c = constraint_residuals(&p, &s);
        for i in 0..4 {
            assert!(
                c.values[i].abs() <= 1e-12 * c.scales[i].max(1e-30),
                "constraint {i}: {} vs scale {}",
                c.values[i],
                c.scales[i]
            );
        }
    }

    #[test]
    fn residual_decreases_with_order() {
        let p = fig2_problem();
        let xs = default_residual_samples(p.half_length);
        let lo = residual(&p, &solve(&p, 12).unwrap(), &xs).unwrap();
        let hi = residual(&p, &solve(&p, 24).unwrap(), &xs).unwrap();
        let max_lo = lo.equation_max.iter().fold(0.0f64, |m, v| m.max(*v));
        let max_hi = hi.equation_max.iter().fold(0.0f64, |m, v| m.max(*v));
        assert!(
            max_hi < max_lo,
            "residual did not decrease: {max_lo} -> {max_hi}"
        );
    }

    #[test]
    fn perturbed_coefficient_raises_residual() {
        let p = fig2_problem();
        let s = solve(&p, 12).unwrap();
        let xs = default_residual_samples(p.half_length);
        let base = residual(&p, &s, &xs).unwrap();
        let mut bad = s.clone();
        // Perturb the dominant normal-slope coefficient by 10%.
        let idx = s
            .b1
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        bad.b1[idx] *= 1.1;
        let worse = residual(&p, &bad, &xs).unwrap();
        assert!(
            worse.equation_max[0] > base.equation_max[0] * 1.001,
            "{} vs {}",
            worse.equation_max[0],
            base.equation_max[0]
        );
    }

    #[test]
    fn residual_rejects_points_near_tip() {
        let p = fig2_problem();
        let s = solve(&p, 6).unwrap();
        assert!(residual(&p, &s, &[0.9999]).is_err());
        assert!(residual(&p, &s, &[1.0001]).is_err());
        assert!(residual(&p, &s, &[11.0]).is_err());
    }

    #[test]
    fn dtn_route_consistent_with_face_route() {
        // Shear loading makes the face shear jump even in x, so the two
        // integral routes are compared on a nonzero quantity.
        let mut p = fig2_problem();
        p.far_field = FarField::shear(1.0);
        let s = solve(&p, 30).unwrap();
        let r = residual(&p, &s, &[0.0]).unwrap();
        let gap = (r.shear_jump_integral_face - r.shear_jump_integral_dtn).abs();
        let scale = r
            .shear_jump_integral_face
            .abs()
            .max(r.shear_jump_integral_dtn.abs());
        assert!(scale > 0.0, "cross-check quantity unexpectedly zero");
        assert!(gap < 0.05 * scale.max(1.0), "routes disagree by {gap} (scale {scale})");
    }
}
