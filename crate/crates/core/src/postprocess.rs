//! Physical fields reconstructed from a solved problem: crack-face
//! displacements, boundary and interface stresses, logarithmic tip
//! singularity coefficients and the classical pressurized-crack reference.

use crate::error::{Error, Result};
use crate::model::{poly_eval, Material, Problem};
use crate::numerics::cauchy::CauchyKind;
use crate::numerics::logfit::{fit_log_basis, LogFit};
use crate::taylor::{negative_series_sum, positive_series_sum, TaylorSolution};

/// Slope values (displacement derivatives) at a point on `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slopes {
    /// Inside the crack: per-face tangential and normal slopes.
    Crack { phi1: f64, phi2: f64, psi1: f64, psi2: f64 },
    /// On the bonded interface: shared slopes.
    Interface { phi: f64, psi: f64 },
}

/// Evaluate the six slope series at `x` (positive powers inside the crack,
/// negative powers outside).
pub fn evaluate_slopes(s: &TaylorSolution, x: f64) -> Result<Slopes> {
    let l = s.half_length;
    if x.abs() == l {
        return Err(Error::Domain("slopes are singular at the crack tips".into()));
    }
    if x.abs() < l {
        Ok(Slopes::Crack {
            phi1: s.phi1_at(x),
            phi2: s.phi2_at(x),
            psi1: s.psi1_at(x),
            psi2: s.psi2_at(x),
        })
    } else {
        Ok(Slopes::Interface {
            phi: s.phi_at(x),
            psi: s.psi_at(x),
        })
    }
}

/// Vertical displacements of the two crack faces at `x`, anchored to zero at
/// the left tip, by exact integration of the normal-slope polynomials.
///
/// These are perturbation-field quantities (the homogeneous far-field part is
/// excluded); the vertical single-valuedness constraint makes the two faces
/// rejoin at the right tip.
pub fn crack_opening(s: &TaylorSolution, x: f64) -> (f64, f64) {
    let l = s.half_length;
    let antiderivative = |coeffs: &[f64]| {
        let mut sum = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            let kp = k as i32 + 1;
            sum += c * (x.powi(kp) - (-l).powi(kp)) / kp as f64;
        }
        sum
    };
    (antiderivative(&s.b1), antiderivative(&s.b2))
}

/// Total tractions on `y = 0` at a point `x`.
///
/// Inside the crack these are the face values from the surface-tension
/// boundary conditions (polynomial in `x`); outside they are the upper- and
/// lower-side interface stresses from the Dirichlet-to-Neumann maps plus the
/// far field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryStresses {
    pub s12_plus: f64,
    pub s12_minus: f64,
    pub s22_plus: f64,
    pub s22_minus: f64,
}

pub fn boundary_stresses(p: &Problem, s: &TaylorSolution, x: f64) -> Result<BoundaryStresses> {
    let l = p.half_length;
    if x.abs() == l {
        return Err(Error::Domain("stresses are singular at the crack tips".into()));
    }
    let st = &p.surface_tension;
    if x.abs() < l {
        Ok(BoundaryStresses {
            s12_plus: st.gamma1_plus * s.psi1_second_at(x) + poly_eval(&p.load.f_plus, x),
            s12_minus: -st.gamma1_minus * s.psi2_second_at(x) + poly_eval(&p.load.f_minus, x),
            s22_plus: -st.gamma0_plus * s.psi1_deriv_at(x) + poly_eval(&p.load.g_plus, x),
            s22_minus: st.gamma0_minus * s.psi2_deriv_at(x) + poly_eval(&p.load.g_minus, x),
        })
    } else {
        let c1 = p.material_upper.constants();
        let c2 = p.material_lower.constants();
        let (sigma, tau) = (p.far_field.sigma, p.far_field.tau);
        let io_a1 = positive_series_sum(&s.a1, CauchyKind::InnerOuter, x, l)?;
        let io_a2 = positive_series_sum(&s.a2, CauchyKind::InnerOuter, x, l)?;
        let io_b1 = positive_series_sum(&s.b1, CauchyKind::InnerOuter, x, l)?;
        let io_b2 = positive_series_sum(&s.b2, CauchyKind::InnerOuter, x, l)?;
        let oo_a3 = negative_series_sum(&s.a3, CauchyKind::OuterOuter, x, l)?;
        let oo_b3 = negative_series_sum(&s.b3, CauchyKind::OuterOuter, x, l)?;
        Ok(BoundaryStresses {
            s12_plus: c1.alpha * s.psi_at(x) + c1.beta * (io_a1 + oo_a3) + tau,
            s12_minus: c2.alpha * s.psi_at(x) - c2.beta * (io_a2 + oo_a3) + tau,
            s22_plus: -c1.alpha * s.phi_at(x) + c1.beta * (io_b1 + oo_b3) + sigma,
            s22_minus: -c2.alpha * s.phi_at(x) - c2.beta * (io_b2 + oo_b3) + sigma,
        })
    }
}

/// A fully evaluated point on `y = 0`.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub x: f64,
    pub slopes: Slopes,
    /// Face displacements; populated only inside the crack.
    pub u2_plus: Option<f64>,
    pub u2_minus: Option<f64>,
    pub stresses: BoundaryStresses,
}

pub fn field_sample(p: &Problem, s: &TaylorSolution, x: f64) -> Result<FieldSample> {
    let slopes = evaluate_slopes(s, x)?;
    let stresses = boundary_stresses(p, s, x)?;
    let (u2_plus, u2_minus) = if x.abs() < p.half_length {
        let (up, um) = crack_opening(s, x);
        (Some(up), Some(um))
    } else {
        (None, None)
    };
    Ok(FieldSample {
        x,
        slopes,
        u2_plus,
        u2_minus,
        stresses,
    })
}

/// Which crack tip a singularity fit targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tip {
    Left,
    Right,
}

/// Default fit window `(t_min, t_max)` as fractions of the half-length.
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (1e-3, 1e-1);

/// Number of log-spaced samples used by [`fit_singularity`].
pub const FIT_SAMPLES: usize = 24;

/// Logarithmic-singularity fit of the face stresses near a tip.
///
/// `k1`/`k2` are the `ln^2` coefficients of the upper/lower face shear
/// stress; the normal-stress fits are carried along so boundedness (no
/// significant `ln^2` content) can be checked.
#[derive(Debug, Clone, Copy)]
pub struct SingularityFit {
    /// Coordinate of the fitted tip (`+l` or `-l`).
    pub tip: f64,
    pub k1: f64,
    pub k2: f64,
    pub s12_plus: LogFit,
    pub s12_minus: LogFit,
    pub s22_plus: LogFit,
    pub s22_minus: LogFit,
    /// Window `(t_min, t_max)` in fractions of the half-length.
    pub window: (f64, f64),
    /// Relative change of `(k1, k2)` when the outer window edge is halved;
    /// large values flag a fit that has not settled. `None` when the window
    /// is too narrow to halve.
    pub window_sensitivity: Option<(f64, f64)>,
}

impl SingularityFit {
    /// Largest root-mean-square residual across the four fits.
    pub fn fit_residual(&self) -> f64 {
        self.s12_plus
            .rms_residual
            .max(self.s12_minus.rms_residual)
            .max(self.s22_plus.rms_residual)
            .max(self.s22_minus.rms_residual)
    }

    /// Scale of the shear `ln^2` coefficients.
    pub fn k_scale(&self) -> f64 {
        self.k1.abs().max(self.k2.abs())
    }
}

fn fit_window(
    p: &Problem,
    s: &TaylorSolution,
    tip: Tip,
    w_min: f64,
    w_max: f64,
) -> Result<(LogFit, LogFit, LogFit, LogFit)> {
    let l = p.half_length;
    let mut samples12p = Vec::with_capacity(FIT_SAMPLES);
    let mut samples12m = Vec::with_capacity(FIT_SAMPLES);
    let mut samples22p = Vec::with_capacity(FIT_SAMPLES);
    let mut samples22m = Vec::with_capacity(FIT_SAMPLES);
    for i in 0..FIT_SAMPLES {
        let f = i as f64 / (FIT_SAMPLES - 1) as f64;
        let t = l * w_min * (w_max / w_min).powf(f);
        let x = match tip {
            Tip::Right => l - t,
            Tip::Left => -l + t,
        };
        let st = boundary_stresses(p, s, x)?;
        samples12p.push((t, st.s12_plus));
        samples12m.push((t, st.s12_minus));
        samples22p.push((t, st.s22_plus));
        samples22m.push((t, st.s22_minus));
    }
    Ok((
        fit_log_basis(&samples12p)?,
        fit_log_basis(&samples12m)?,
        fit_log_basis(&samples22p)?,
        fit_log_basis(&samples22m)?,
    ))
}

/// Fit the face stresses near `tip` on the basis `{1, ln t, ln^2 t}` where
/// `t` is the distance to the tip, over `window` (fractions of `l`).
pub fn fit_singularity(
    p: &Problem,
    s: &TaylorSolution,
    tip: Tip,
    window: Option<(f64, f64)>,
) -> Result<SingularityFit> {
    if p.surface_tension.gamma1_plus == 0.0 || p.surface_tension.gamma1_minus == 0.0 {
        return Err(Error::InvalidInput(
            "singularity fit requires nonzero gamma1 face constants".into(),
        ));
    }
    let (w_min, w_max) = window.unwrap_or(DEFAULT_FIT_WINDOW);
    if !(0.0 < w_min && w_min < w_max && w_max < 1.0) {
        return Err(Error::InvalidInput(format!(
            "fit window ({w_min}, {w_max}) must satisfy 0 < t_min < t_max < 1"
        )));
    }
    let tip_x = match tip {
        Tip::Right => p.half_length,
        Tip::Left => -p.half_length,
    };

    let (s12_plus, s12_minus, s22_plus, s22_minus) = fit_window(p, s, tip, w_min, w_max)?;
    let shift = |full: f64, half: f64| {
        if full == 0.0 && half == 0.0 {
            0.0
        } else {
            (half - full).abs() / full.abs().max(1e-300)
        }
    };
    let window_sensitivity = if 0.5 * w_max > w_min * 1.01 {
        let (half12p, half12m, _, _) = fit_window(p, s, tip, w_min, 0.5 * w_max)?;
        Some((
            shift(s12_plus.c2, half12p.c2),
            shift(s12_minus.c2, half12m.c2),
        ))
    } else {
        None
    };
    Ok(SingularityFit {
        tip: tip_x,
        k1: s12_plus.c2,
        k2: s12_minus.c2,
        s12_plus,
        s12_minus,
        s22_plus,
        s22_minus,
        window: (w_min, w_max),
        window_sensitivity,
    })
}

/// Classical pressurized interface crack (zero surface tension): explicit
/// face displacements with the bimaterial oscillation index.
#[derive(Debug, Clone, Copy)]
pub struct EnglandReference {
    /// Bimaterial ratio `(mu1 + mu2 k1) / (mu2 + mu1 k1)`.
    pub alpha: f64,
    /// Oscillation index `ln(alpha) / (2 pi)`; zero iff `alpha = 1`.
    pub gamma: f64,
    pressure: f64,
    half_length: f64,
    factor_plus: f64,
    factor_minus: f64,
}

impl EnglandReference {
    pub fn new(upper: &Material, lower: &Material, pressure: f64, half_length: f64) -> Self {
        let k1 = upper.constants().kappa;
        let k2 = lower.constants().kappa;
        let (mu1, mu2) = (upper.shear_modulus, lower.shear_modulus);
        let alpha = (mu1 + mu2 * k1) / (mu2 + mu1 * k1);
        let gamma = alpha.ln() / (2.0 * std::f64::consts::PI);
        let factor_plus = pressure * (1.0 + k1) * alpha.sqrt() / (2.0 * mu1 * (1.0 + alpha));
        let factor_minus = -pressure * (1.0 + k2) * alpha.sqrt() / (2.0 * mu2 * (1.0 + alpha));
        Self {
            alpha,
            gamma,
            pressure,
            half_length,
            factor_plus,
            factor_minus,
        }
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }

    fn oscillating_part(&self, x: f64) -> f64 {
        let l = self.half_length;
        if x.abs() >= l {
            return 0.0;
        }
        let radical = (l * l - x * x).sqrt();
        radical * (self.gamma * (((l + x) / (l - x)).abs().ln())).cos()
    }

    pub fn u2_plus(&self, x: f64) -> f64 {
        self.factor_plus * self.oscillating_part(x)
    }

    pub fn u2_minus(&self, x: f64) -> f64 {
        self.factor_minus * self.oscillating_part(x)
    }
}

/// Face displacements of the classical solution at a point, for uniform
/// pressure `t` and no far-field loading.
pub fn england_reference(
    upper: &Material,
    lower: &Material,
    t: f64,
    l: f64,
    x: f64,
) -> (f64, f64) {
    let reference = EnglandReference::new(upper, lower, t, l);
    (reference.u2_plus(x), reference.u2_minus(x))
}

/// Location and value of a stress extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub x: f64,
}

/// Maxima of the absolute face stresses over the crack.
#[derive(Debug, Clone, Copy)]
pub struct StressMaxima {
    pub s22_plus: Extremum,
    pub s22_minus: Extremum,
    pub s12_plus: Extremum,
    pub s12_minus: Extremum,
}

/// Scan the face stresses on a tip-refined grid and report the maxima of
/// their absolute values.
pub fn max_stress_scan(p: &Problem, s: &TaylorSolution) -> Result<StressMaxima> {
    let l = p.half_length;
    let mut grid = Vec::new();
    let interior = 201;
    for i in 0..interior {
        grid.push(-0.99 * l + 1.98 * l * i as f64 / (interior - 1) as f64);
    }
    // Geometric refinement toward both tips, down to 1e-4 of the half-length.
    for k in 1..=16 {
        let t = l * 10f64.powf(-(k as f64) / 4.0);
        grid.push(l - t);
        grid.push(-l + t);
    }

    let mut maxima = StressMaxima {
        s22_plus: Extremum { value: 0.0, x: grid[0] },
        s22_minus: Extremum { value: 0.0, x: grid[0] },
        s12_plus: Extremum { value: 0.0, x: grid[0] },
        s12_minus: Extremum { value: 0.0, x: grid[0] },
    };
    for &x in &grid {
        let st = boundary_stresses(p, s, x)?;
        let update = |m: &mut Extremum, v: f64| {
            if v.abs() > m.value {
                *m = Extremum { value: v.abs(), x };
            }
        };
        update(&mut maxima.s22_plus, st.s22_plus);
        update(&mut maxima.s22_minus, st.s22_minus);
        update(&mut maxima.s12_plus, st.s12_plus);
        update(&mut maxima.s12_minus, st.s12_minus);
    }
    Ok(maxima)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CrackLoad, FarField, SurfaceTension};
    use crate::taylor::{residual, solve};

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

    fn fig5_problem(nu1: f64) -> Problem {
        let mut p = fig2_problem();
        p.material_upper = Material::new(70.0, nu1).unwrap();
        p
    }

    #[test]
    fn slope_evaluation_regions() {
        let s = solve(&fig2_problem(), 10).unwrap();
        assert!(matches!(
            evaluate_slopes(&s, 0.3).unwrap(),
            Slopes::Crack { .. }
        ));
        assert!(matches!(
            evaluate_slopes(&s, 1.7).unwrap(),
            Slopes::Interface { .. }
        ));
        assert!(evaluate_slopes(&s, 1.0).is_err());
    }

    #[test]
    fn interface_slope_single_term() {
        // psi = x^-1 gives psi(2) = 0.5.
        let mut s = solve(&fig2_problem(), 4).unwrap();
        for c in s.b3.iter_mut() {
            *c = 0.0;
        }
        s.b3[0] = 1.0;
        assert!((s.psi_at(2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tension_normal_slope_odd() {
        let s = solve(&fig2_problem(), 20).unwrap();
        assert!(s.psi1_at(0.0).abs() < 1e-12);
    }

    #[test]
    fn opening_anchored_and_closed() {
        let p = fig2_problem();
        let s = solve(&p, 30).unwrap();
        let (up, um) = crack_opening(&s, -p.half_length);
        assert_eq!(up, 0.0);
        assert_eq!(um, 0.0);
        let (up, um) = crack_opening(&s, p.half_length);
        let scale = crack_opening(&s, 0.0).0.abs().max(1e-30);
        assert!(
            (up - um).abs() <= 1e-10 * scale,
            "closure violated: {} vs {}",
            up,
            um
        );
        // Crack opens under remote tension.
        let (mid_up, mid_um) = crack_opening(&s, 0.0);
        assert!(mid_up > 0.0, "upper face should lift: {mid_up}");
        assert!(mid_up - mid_um > 0.0, "faces should separate");
    }

    #[test]
    fn normal_face_stress_reduces_to_load() {
        // With gamma0+ = 0 the upper normal face stress equals g+ exactly.
        let mut p = fig2_problem();
        p.surface_tension.gamma0_plus = 0.0;
        p.load = CrackLoad::new(vec![0.0], vec![0.0], vec![0.3, 0.0, 0.1], vec![0.3, 0.0, 0.1]);
        let s = solve(&p, 16).unwrap();
        for x in [-0.8, -0.2, 0.5] {
            let st = boundary_stresses(&p, &s, x).unwrap();
            let g = 0.3 + 0.1 * x * x;
            assert!((st.s22_plus - g).abs() < 1e-12, "{} vs {g}", st.s22_plus);
        }
    }

    #[test]
    fn interface_jump_matches_curvature_term() {
        // s12+ - s12- = gamma1_int psi'' on the interface, up to the
        // discretization residual of the interface shear equation.
        let p = fig2_problem();
        let s = solve(&p, 30).unwrap();
        let xs: Vec<f64> = vec![1.2, 1.5, 2.0, -1.3, -2.5];
        let tol = residual(&p, &s, &xs).unwrap().equation_max[4] + 1e-12;
        for &x in &xs {
            let st = boundary_stresses(&p, &s, x).unwrap();
            let jump = st.s12_plus - st.s12_minus;
            let curvature = p.surface_tension.gamma1_interface * s.psi_second_at(x);
            assert!(
                (jump - curvature).abs() <= tol,
                "x={x}: jump {jump} vs {curvature} (tol {tol})"
            );
        }
    }

    #[test]
    fn face_stress_small_mid_crack_rising_at_tips() {
        let p = fig2_problem();
        let s = solve(&p, 30).unwrap();
        let mid = boundary_stresses(&p, &s, 0.0).unwrap();
        let near_tip = boundary_stresses(&p, &s, 0.995).unwrap();
        assert!(mid.s22_plus.abs() < 0.2, "mid-crack stress {}", mid.s22_plus);
        assert!(near_tip.s22_plus.abs() > mid.s22_plus.abs());
    }

    #[test]
    fn field_sample_region_population() {
        let p = fig2_problem();
        let s = solve(&p, 12).unwrap();
        let inside = field_sample(&p, &s, 0.4).unwrap();
        assert!(matches!(inside.slopes, Slopes::Crack { .. }));
        assert!(inside.u2_plus.is_some() && inside.u2_minus.is_some());
        let outside = field_sample(&p, &s, -1.5).unwrap();
        assert!(matches!(outside.slopes, Slopes::Interface { .. }));
        assert!(outside.u2_plus.is_none() && outside.u2_minus.is_none());
        assert!(field_sample(&p, &s, 1.0).is_err());
    }

    #[test]
    fn england_identical_materials() {
        let m = Material::new(70.0, 0.3).unwrap();
        let reference = EnglandReference::new(&m, &m, 1.0, 1.0);
        assert!((reference.alpha - 1.0).abs() < 1e-15);
        assert_eq!(reference.gamma, 0.0);
        // Midpoint value T (1 + kappa) / (4 mu) = 2.8 / 280 = 0.01.
        assert!((reference.u2_plus(0.0) - 0.01).abs() < 1e-15);
        assert!((reference.u2_minus(0.0) + 0.01).abs() < 1e-15);
        // Tips close.
        assert_eq!(reference.u2_plus(1.0), 0.0);
        assert_eq!(reference.u2_minus(-1.0), 0.0);
    }

    #[test]
    fn england_dissimilar_oscillation_index() {
        let m1 = Material::new(70.0, 0.3).unwrap();
        let m2 = Material::new(80.0, 0.35).unwrap();
        let r = EnglandReference::new(&m1, &m2, 1.0, 1.0);
        assert!(r.alpha > 0.0 && (r.alpha - 1.0).abs() > 1e-6);
        assert!(r.gamma != 0.0);
        let (up, um) = england_reference(&m1, &m2, 1.0, 1.0, 0.25);
        assert!((up - r.u2_plus(0.25)).abs() < 1e-15);
        assert!((um - r.u2_minus(0.25)).abs() < 1e-15);
    }

    #[test]
    fn zero_loading_zero_fit() {
        let mut p = fig2_problem();
        p.far_field = FarField::default();
        let s = solve(&p, 12).unwrap();
        let fit = fit_singularity(&p, &s, Tip::Right, None).unwrap();
        assert_eq!(fit.k1, 0.0);
        assert_eq!(fit.k2, 0.0);
    }

    #[test]
    fn fit_scales_with_load() {
        let p = fig2_problem();
        let mut p2 = p.clone();
        p2.far_field.sigma = 2.0;
        let f1 = fit_singularity(&p, &solve(&p, 24).unwrap(), Tip::Right, None).unwrap();
        let f2 = fit_singularity(&p2, &solve(&p2, 24).unwrap(), Tip::Right, None).unwrap();
        assert!((f2.k1 - 2.0 * f1.k1).abs() <= 1e-9 * f1.k1.abs().max(1e-12));
        assert!((f2.k2 - 2.0 * f1.k2).abs() <= 1e-9 * f1.k2.abs().max(1e-12));
    }

    #[test]
    fn fit_rejects_zero_gamma1() {
        let mut p = fig2_problem();
        p.surface_tension.gamma1_plus = 0.0;
        let s = solve(&p, 10).unwrap();
        assert!(fit_singularity(&p, &s, Tip::Right, None).is_err());
    }

    #[test]
    fn stress_scan_zero_loading() {
        let mut p = fig2_problem();
        p.far_field = FarField::default();
        let s = solve(&p, 10).unwrap();
        let m = max_stress_scan(&p, &s).unwrap();
        assert_eq!(m.s22_plus.value, 0.0);
        assert_eq!(m.s12_minus.value, 0.0);
    }

    #[test]
    fn stress_maxima_near_tips_and_scale() {
        let p = fig5_problem(0.2);
        let s = solve(&p, 30).unwrap();
        let m = max_stress_scan(&p, &s).unwrap();
        // Normal-stress maxima sit within the last 1% of the crack length.
        assert!(
            m.s22_plus.x.abs() > 0.99,
            "s22+ max at {} (value {})",
            m.s22_plus.x,
            m.s22_plus.value
        );
        let mut p2 = p.clone();
        p2.far_field.sigma = 3.0;
        let m2 = max_stress_scan(&p2, &solve(&p2, 30).unwrap()).unwrap();
        assert!((m2.s22_plus.value - 3.0 * m.s22_plus.value).abs() < 1e-8 * m.s22_plus.value.max(1.0));
    }
}
