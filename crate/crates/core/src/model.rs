//! Problem definition: materials, surface-tension constants, loading and the
//! physical consistency checks a configuration must satisfy.
//!
//! Conventions: plane strain (Kolosov constant `kappa = 3 - 4 nu`), and all
//! quantities in consistent dimensionless units; no unit conversion happens
//! anywhere in the crate.

use crate::error::{Error, Result};
use crate::numerics::cauchy::symmetric_monomial_integral;

/// Isotropic elastic half-plane material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Shear modulus `mu` (stress units, > 0).
    pub shear_modulus: f64,
    /// Poisson ratio `nu`, strictly inside (-1, 1/2).
    pub poisson_ratio: f64,
}

impl Material {
    pub fn new(shear_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        if !(shear_modulus > 0.0) || !shear_modulus.is_finite() {
            return Err(Error::InvalidMaterial(format!(
                "shear modulus must be positive and finite, got {shear_modulus}"
            )));
        }
        if !(poisson_ratio > -1.0 && poisson_ratio < 0.5) {
            return Err(Error::InvalidMaterial(format!(
                "Poisson ratio must lie in (-1, 0.5), got {poisson_ratio}"
            )));
        }
        Ok(Self {
            shear_modulus,
            poisson_ratio,
        })
    }

    /// Derived constants entering the Dirichlet-to-Neumann maps.
    pub fn constants(&self) -> MaterialConstants {
        derive_material_constants(self)
    }
}

/// Constants derived from a [`Material`].
///
/// `alpha` and `beta` are the diagonal and Cauchy-kernel coefficients of the
/// half-plane Dirichlet-to-Neumann maps; `lambda` is the Lame constant
/// recovered from `nu = lambda / (2 (lambda + mu))`; `kappa = 3 - 4 nu`
/// (plane strain).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialConstants {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

/// Compute `lambda`, `alpha`, `beta`, `kappa` for a valid material.
pub fn derive_material_constants(m: &Material) -> MaterialConstants {
    let mu = m.shear_modulus;
    let nu = m.poisson_ratio;
    let lambda = 2.0 * mu * nu / (1.0 - 2.0 * nu);
    let alpha = 2.0 * mu * mu / (lambda + 3.0 * mu);
    let beta = 2.0 * mu * (lambda + 2.0 * mu) / ((lambda + 3.0 * mu) * std::f64::consts::PI);
    let kappa = 3.0 - 4.0 * nu;
    MaterialConstants {
        lambda,
        alpha,
        beta,
        kappa,
    }
}

/// Surface-tension constants on the crack faces and on the bonded interface.
///
/// `gamma0_*` couple to the slope (first derivative of the normal
/// displacement), `gamma1_*` to the curvature derivative (third derivative).
/// The tip-singularity classification requires all three `gamma1` constants
/// to be nonzero; that is reported as a warning, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceTension {
    pub gamma0_plus: f64,
    pub gamma0_minus: f64,
    pub gamma1_plus: f64,
    pub gamma1_minus: f64,
    pub gamma0_interface: f64,
    pub gamma1_interface: f64,
}

impl SurfaceTension {
    /// All face and interface constants set to the same value.
    pub fn uniform(gamma: f64) -> Self {
        Self {
            gamma0_plus: gamma,
            gamma0_minus: gamma,
            gamma1_plus: gamma,
            gamma1_minus: gamma,
            gamma0_interface: gamma,
            gamma1_interface: gamma,
        }
    }

    fn validate(&self) -> Result<Vec<String>> {
        let all = [
            self.gamma0_plus,
            self.gamma0_minus,
            self.gamma1_plus,
            self.gamma1_minus,
            self.gamma0_interface,
            self.gamma1_interface,
        ];
        if all.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidInput(
                "surface-tension constants must be finite".into(),
            ));
        }
        let mut warnings = Vec::new();
        if self.gamma1_plus == 0.0 || self.gamma1_minus == 0.0 || self.gamma1_interface == 0.0 {
            warnings.push(
                "a gamma1 constant is zero: the logarithmic tip-singularity \
                 classification does not apply"
                    .to_string(),
            );
        }
        Ok(warnings)
    }
}

/// Loading at infinity. Tension `sigma` and shear `tau` are shared by both
/// half-planes; `sigma_x1` and the rotations are optional and only checked
/// for compatibility.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FarField {
    pub sigma: f64,
    pub tau: f64,
    pub sigma_x1: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
}

impl FarField {
    pub fn tension(sigma: f64) -> Self {
        Self {
            sigma,
            ..Self::default()
        }
    }

    pub fn shear(tau: f64) -> Self {
        Self {
            tau,
            ..Self::default()
        }
    }
}

/// Polynomial tractions applied to the crack faces, stored as coefficient
/// vectors in powers of `x`. All four vectors share the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct CrackLoad {
    pub f_plus: Vec<f64>,
    pub f_minus: Vec<f64>,
    pub g_plus: Vec<f64>,
    pub g_minus: Vec<f64>,
}

impl CrackLoad {
    /// Build a load, zero-padding the four coefficient vectors to a common
    /// length.
    pub fn new(
        f_plus: Vec<f64>,
        f_minus: Vec<f64>,
        g_plus: Vec<f64>,
        g_minus: Vec<f64>,
    ) -> Self {
        let len = f_plus
            .len()
            .max(f_minus.len())
            .max(g_plus.len())
            .max(g_minus.len())
            .max(1);
        let pad = |mut v: Vec<f64>| {
            v.resize(len, 0.0);
            v
        };
        Self {
            f_plus: pad(f_plus),
            f_minus: pad(f_minus),
            g_plus: pad(g_plus),
            g_minus: pad(g_minus),
        }
    }

    pub fn zero() -> Self {
        Self::new(vec![0.0], vec![0.0], vec![0.0], vec![0.0])
    }

    /// Uniform internal pressure `T`: both faces carry the normal traction
    /// `g+ = g- = -T`, which opens the crack for `T > 0` and reproduces the
    /// classical pressurized-crack solution in the zero-surface-tension
    /// limit.
    pub fn uniform_pressure(t: f64) -> Self {
        Self::new(vec![0.0], vec![0.0], vec![-t], vec![-t])
    }

    /// Degree of the highest nonzero coefficient across the four polynomials.
    pub fn degree(&self) -> usize {
        [&self.f_plus, &self.f_minus, &self.g_plus, &self.g_minus]
            .iter()
            .map(|v| v.iter().rposition(|c| *c != 0.0).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        [&self.f_plus, &self.f_minus, &self.g_plus, &self.g_minus]
            .iter()
            .all(|v| v.iter().all(|c| *c == 0.0))
    }

    /// Scale bound used to normalize the equilibrium tolerance.
    fn scale(&self, l: f64) -> f64 {
        [&self.f_plus, &self.f_minus, &self.g_plus, &self.g_minus]
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .map(|(k, c)| c.abs() * 2.0 * l.powi(k as i32 + 1) / (k as f64 + 1.0))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Evaluate a coefficient vector as a polynomial at `x`.
pub(crate) fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// `∫_{-l}^{l} p(x) dx` by exact monomial integration.
pub(crate) fn poly_symmetric_integral(coeffs: &[f64], l: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * symmetric_monomial_integral(k, l))
        .sum()
}

/// Full problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub material_upper: Material,
    pub material_lower: Material,
    pub surface_tension: SurfaceTension,
    pub far_field: FarField,
    pub load: CrackLoad,
    /// Crack half-length `l` (> 0); the crack occupies `|x| < l`.
    pub half_length: f64,
}

impl Problem {
    /// Validate the configuration; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.half_length > 0.0) || !self.half_length.is_finite() {
            return Err(Error::InvalidInput(format!(
                "half_length must be positive and finite, got {}",
                self.half_length
            )));
        }
        Material::new(self.material_upper.shear_modulus, self.material_upper.poisson_ratio)?;
        Material::new(self.material_lower.shear_modulus, self.material_lower.poisson_ratio)?;
        let mut warnings = self.surface_tension.validate()?;
        if !check_load_equilibrium(&self.load, self.half_length) {
            return Err(Error::InvalidInput(
                "crack-face loads are not in equilibrium".into(),
            ));
        }
        let report = check_farfield_compatibility(
            &self.far_field,
            &self.material_upper,
            &self.material_lower,
        );
        if !report.passes {
            return Err(Error::InvalidInput(
                "far-field loading violates the cross-plane compatibility relations".into(),
            ));
        }
        warnings.extend(report.warnings);
        Ok(warnings)
    }
}

/// Outcome of the far-field compatibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    /// `sigma_x2` compatible with the supplied `sigma_x1`, when given.
    pub sigma_x2: Option<f64>,
    /// Required rotation difference `omega2 - omega1`.
    pub rotation_mismatch: f64,
    /// Whether user-supplied rotations match the required mismatch
    /// (`None` when rotations were not supplied).
    pub rotations_consistent: Option<bool>,
    pub passes: bool,
    pub warnings: Vec<String>,
}

/// Relative tolerance for user-supplied far-field values.
pub const FARFIELD_REL_TOL: f64 = 1e-12;

/// Check the relations tying the two half-planes' loads at infinity: the
/// horizontal stresses and rotations cannot be chosen independently once
/// `sigma` and `tau` are fixed.
pub fn check_farfield_compatibility(
    far: &FarField,
    upper: &Material,
    lower: &Material,
) -> CompatibilityReport {
    let c1 = upper.constants();
    let c2 = lower.constants();
    let (mu1, mu2) = (upper.shear_modulus, lower.shear_modulus);

    // (1+k1)/mu1 sx1 - (1+k2)/mu2 sx2 = ((3-k1)/mu1 - (3-k2)/mu2) sigma
    let sigma_x2 = far.sigma_x1.map(|sx1| {
        let lhs = (1.0 + c1.kappa) / mu1 * sx1;
        let rhs = ((3.0 - c1.kappa) / mu1 - (3.0 - c2.kappa) / mu2) * far.sigma;
        (lhs - rhs) * mu2 / (1.0 + c2.kappa)
    });

    let rotation_mismatch = (mu2 - mu1) / (2.0 * mu1 * mu2) * far.tau;
    let rotations_consistent = match (far.omega1, far.omega2) {
        (Some(w1), Some(w2)) => {
            let diff = w2 - w1;
            let scale = diff.abs().max(rotation_mismatch.abs()).max(1.0);
            Some((diff - rotation_mismatch).abs() <= FARFIELD_REL_TOL * scale)
        }
        _ => None,
    };

    let passes = rotations_consistent.unwrap_or(true);
    let mut warnings = Vec::new();
    if let (Some(w), None) | (None, Some(w)) = (far.omega1, far.omega2) {
        warnings.push(format!(
            "only one far-field rotation supplied ({w}); compatibility not checked"
        ));
    }
    CompatibilityReport {
        sigma_x2,
        rotation_mismatch,
        rotations_consistent,
        passes,
        warnings,
    }
}

/// Equilibrium of the crack-face tractions:
/// `∫ (f+ + i g+) dx - ∫ (f- + i g-) dx = 0`, evaluated by exact monomial
/// integration, within `1e-12 * max(1, load scale)`.
pub fn check_load_equilibrium(load: &CrackLoad, half_length: f64) -> bool {
    let real = poly_symmetric_integral(&load.f_plus, half_length)
        - poly_symmetric_integral(&load.f_minus, half_length);
    let imag = poly_symmetric_integral(&load.g_plus, half_length)
        - poly_symmetric_integral(&load.g_minus, half_length);
    let tol = 1e-12 * load.scale(half_length).max(1.0);
    real.abs() <= tol && imag.abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constants_mu70_nu03() {
        let c = Material::new(70.0, 0.3).unwrap().constants();
        assert!((c.lambda - 105.0).abs() < 1e-12);
        assert!((c.alpha - 9800.0 / 315.0).abs() < 1e-10);
        assert!((c.beta - 34300.0 / (315.0 * std::f64::consts::PI)).abs() < 1e-10);
        assert!((c.kappa - 1.8).abs() < 1e-12);
        // Four-decimal values: alpha 31.1111, beta 140*245/(315 pi) = 34.6604.
        assert!((c.alpha - 31.1111).abs() < 1e-4);
        assert!((c.beta - 34.6604).abs() < 1e-4);
    }

    #[test]
    fn constants_mu80_nu035() {
        let c = Material::new(80.0, 0.35).unwrap().constants();
        assert!((c.lambda - 560.0 / 3.0).abs() < 1e-10);
        assert!((c.alpha - 30.0).abs() < 1e-10);
        assert!((c.beta - 41.3803).abs() < 1e-4);
        assert!((c.kappa - 1.6).abs() < 1e-12);
    }

    #[test]
    fn constants_nu_zero() {
        let mu = 37.5;
        let c = Material::new(mu, 0.0).unwrap().constants();
        assert_eq!(c.lambda, 0.0);
        assert!((c.alpha - 2.0 * mu / 3.0).abs() < 1e-12);
        assert!((c.beta - 4.0 * mu / (3.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert_eq!(c.kappa, 3.0);
    }

    #[test]
    fn invalid_materials_rejected() {
        assert!(Material::new(-1.0, 0.3).is_err());
        assert!(Material::new(0.0, 0.3).is_err());
        assert!(Material::new(70.0, 0.5).is_err());
        assert!(Material::new(70.0, -1.0).is_err());
    }

    #[test]
    fn identical_materials_compatibility() {
        let m = Material::new(70.0, 0.3).unwrap();
        let far = FarField {
            sigma: 2.0,
            tau: 1.0,
            sigma_x1: Some(0.7),
            ..Default::default()
        };
        let report = check_farfield_compatibility(&far, &m, &m);
        assert!((report.sigma_x2.unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(report.rotation_mismatch, 0.0);
        assert!(report.passes);
    }

    #[test]
    fn dissimilar_sigma_x2() {
        // mu1=70, k1=1.8, mu2=80, k2=1.6, sigma=1, sx1=1 -> sx2 = 1.24176
        let upper = Material::new(70.0, 0.3).unwrap();
        let lower = Material::new(80.0, 0.35).unwrap();
        let far = FarField {
            sigma: 1.0,
            sigma_x1: Some(1.0),
            ..Default::default()
        };
        let report = check_farfield_compatibility(&far, &upper, &lower);
        assert!(
            (report.sigma_x2.unwrap() - 1.2417582417582418).abs() < 1e-12,
            "got {:?}",
            report.sigma_x2
        );
    }

    #[test]
    fn rotation_mismatch_checked() {
        let upper = Material::new(70.0, 0.3).unwrap();
        let lower = Material::new(80.0, 0.35).unwrap();
        let mismatch = (80.0 - 70.0) / (2.0 * 70.0 * 80.0);
        let good = FarField {
            tau: 1.0,
            omega1: Some(0.0),
            omega2: Some(mismatch),
            ..Default::default()
        };
        assert!(check_farfield_compatibility(&good, &upper, &lower).passes);
        let bad = FarField {
            tau: 1.0,
            omega1: Some(0.0),
            omega2: Some(mismatch + 1e-6),
            ..Default::default()
        };
        assert!(!check_farfield_compatibility(&bad, &upper, &lower).passes);
    }

    #[test]
    fn load_equilibrium_cases() {
        let l = 1.0;
        assert!(check_load_equilibrium(&CrackLoad::zero(), l));
        // Equal constants on both faces cancel.
        let equal = CrackLoad::new(vec![3.0], vec![3.0], vec![-2.0], vec![-2.0]);
        assert!(check_load_equilibrium(&equal, l));
        // Odd monomial integrates to zero.
        let odd = CrackLoad::new(vec![0.0, 1.0], vec![0.0], vec![0.0], vec![0.0]);
        assert!(check_load_equilibrium(&odd, l));
        // Unbalanced constant fails.
        let bad = CrackLoad::new(vec![1.0], vec![0.0], vec![0.0], vec![0.0]);
        assert!(!check_load_equilibrium(&bad, l));
    }

    #[test]
    fn load_padding_and_degree() {
        let load = CrackLoad::new(vec![1.0, 2.0, 0.0], vec![], vec![5.0], vec![]);
        assert_eq!(load.f_plus.len(), 3);
        assert_eq!(load.g_minus.len(), 3);
        assert_eq!(load.degree(), 1);
        assert!(!load.is_zero());
        assert_eq!(CrackLoad::zero().degree(), 0);
    }

    proptest! {
        #[test]
        fn constants_scale_covariant(mu in 1.0f64..500.0, nu in -0.9f64..0.49, s in 0.1f64..50.0) {
            let base = Material::new(mu, nu).unwrap().constants();
            let scaled = Material::new(s * mu, nu).unwrap().constants();
            prop_assert!((scaled.lambda - s * base.lambda).abs() <= 1e-10 * (1.0 + base.lambda.abs() * s));
            prop_assert!((scaled.alpha - s * base.alpha).abs() <= 1e-10 * s * base.alpha);
            prop_assert!((scaled.beta - s * base.beta).abs() <= 1e-10 * s * base.beta);
            prop_assert_eq!(scaled.kappa, base.kappa);
        }

        #[test]
        fn constants_positive_and_finite(mu in 1e-3f64..1e4, nu in -0.99f64..0.499) {
            let c = Material::new(mu, nu).unwrap().constants();
            prop_assert!(c.alpha > 0.0 && c.alpha.is_finite());
            prop_assert!(c.beta > 0.0 && c.beta.is_finite());
            prop_assert!(c.lambda.is_finite());
        }

        #[test]
        fn equilibrium_invariant_under_shared_odd_term(c1 in -5.0f64..5.0, c3 in -5.0f64..5.0) {
            // Adding the same odd polynomial to f+ and f- leaves the check alone.
            let base = CrackLoad::new(vec![2.0], vec![2.0], vec![1.0], vec![1.0]);
            let shifted = CrackLoad::new(
                vec![2.0, c1, 0.0, c3],
                vec![2.0, c1, 0.0, c3],
                vec![1.0],
                vec![1.0],
            );
            prop_assert_eq!(
                check_load_equilibrium(&base, 1.0),
                check_load_equilibrium(&shifted, 1.0)
            );
        }
    }
}
