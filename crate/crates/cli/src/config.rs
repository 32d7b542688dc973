//! Run configuration: a TOML document describing the problem, solver
//! parameters and the workflow-specific blocks.

use crate::error::CliError;
use interface_crack::model::{CrackLoad, FarField, Material, Problem, SurfaceTension};
use serde::Deserialize;
use std::path::Path;

pub const DEFAULT_ORDER: usize = 30;
pub const DEFAULT_SAMPLES: usize = 201;
/// Verification tolerances calibrated on the reference two-material
/// configuration (measured discrepancies sit near 1.6e-2 on the comparison
/// grid, see the verify report).
pub const DEFAULT_TOL_TAYLOR: f64 = 2.5e-2;
pub const DEFAULT_TOL_SPLINE: f64 = 2.5e-2;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub half_length: f64,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub material: MaterialPair,
    pub surface_tension: SurfaceTensionConfig,
    #[serde(default)]
    pub far_field: FarFieldConfig,
    #[serde(default)]
    pub crack_load: CrackLoadConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    pub sweep: Option<SweepConfig>,
    pub reference: Option<ReferenceConfig>,
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialPair {
    pub upper: MaterialConfig,
    pub lower: MaterialConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub shear_modulus: f64,
    pub poisson_ratio: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceTensionConfig {
    pub gamma0_plus: f64,
    pub gamma0_minus: f64,
    pub gamma1_plus: f64,
    pub gamma1_minus: f64,
    pub gamma0_interface: f64,
    pub gamma1_interface: f64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FarFieldConfig {
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub tau: f64,
    pub sigma_x1: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CrackLoadConfig {
    #[serde(default)]
    pub f_plus: Vec<f64>,
    #[serde(default)]
    pub f_minus: Vec<f64>,
    #[serde(default)]
    pub g_plus: Vec<f64>,
    #[serde(default)]
    pub g_minus: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_tol_taylor")]
    pub tolerance_taylor: f64,
    #[serde(default = "default_tol_spline")]
    pub tolerance_spline: f64,
    /// Spline half-count; defaults to the Taylor order.
    pub spline_half_count: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tolerance_taylor: DEFAULT_TOL_TAYLOR,
            tolerance_spline: DEFAULT_TOL_SPLINE,
            spline_half_count: None,
        }
    }
}

fn default_tol_taylor() -> f64 {
    DEFAULT_TOL_TAYLOR
}

fn default_tol_spline() -> f64 {
    DEFAULT_TOL_SPLINE
}

/// Sweepable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "nu1")]
    Nu1,
    #[serde(rename = "mu1")]
    Mu1,
    /// All four face constants set to the sweep value; interface constants
    /// stay at their configured values.
    #[serde(rename = "gamma-all")]
    GammaAll,
    #[serde(rename = "sigma")]
    Sigma,
    #[serde(rename = "tau")]
    Tau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepSpacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default)]
    pub spacing: SweepSpacing,
}

impl SweepConfig {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.steps == 0 {
            return Err(CliError::Config("sweep.steps must be positive".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.start]);
        }
        let mut values = Vec::with_capacity(self.steps);
        match self.spacing {
            SweepSpacing::Linear => {
                for i in 0..self.steps {
                    let f = i as f64 / (self.steps - 1) as f64;
                    values.push(self.start + (self.stop - self.start) * f);
                }
            }
            SweepSpacing::Log => {
                if self.start <= 0.0 || self.stop <= 0.0 {
                    return Err(CliError::Config(
                        "log spacing requires positive start/stop".into(),
                    ));
                }
                for i in 0..self.steps {
                    let f = i as f64 / (self.steps - 1) as f64;
                    values.push(self.start * (self.stop / self.start).powf(f));
                }
            }
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub pressure: f64,
    pub gammas: Vec<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
        Ok(config)
    }

    /// Build and validate the problem instance.
    pub fn problem(&self) -> Result<(Problem, Vec<String>), CliError> {
        let upper = Material::new(self.material.upper.shear_modulus, self.material.upper.poisson_ratio)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let lower = Material::new(self.material.lower.shear_modulus, self.material.lower.poisson_ratio)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let st = &self.surface_tension;
        let problem = Problem {
            material_upper: upper,
            material_lower: lower,
            surface_tension: SurfaceTension {
                gamma0_plus: st.gamma0_plus,
                gamma0_minus: st.gamma0_minus,
                gamma1_plus: st.gamma1_plus,
                gamma1_minus: st.gamma1_minus,
                gamma0_interface: st.gamma0_interface,
                gamma1_interface: st.gamma1_interface,
            },
            far_field: FarField {
                sigma: self.far_field.sigma,
                tau: self.far_field.tau,
                sigma_x1: self.far_field.sigma_x1,
                omega1: self.far_field.omega1,
                omega2: self.far_field.omega2,
            },
            load: CrackLoad::new(
                self.crack_load.f_plus.clone(),
                self.crack_load.f_minus.clone(),
                self.crack_load.g_plus.clone(),
                self.crack_load.g_minus.clone(),
            ),
            half_length: self.half_length,
        };
        let warnings = problem
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok((problem, warnings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG2_TOML: &str = r#"
half_length = 1.0
order = 30

[material.upper]
shear_modulus = 70.0
poisson_ratio = 0.3

[material.lower]
shear_modulus = 70.0
poisson_ratio = 0.3

[surface_tension]
gamma0_plus = 0.01
gamma0_minus = 0.01
gamma1_plus = 0.01
gamma1_minus = 0.01
gamma0_interface = 0.005
gamma1_interface = 0.005

[far_field]
sigma = 1.0
"#;

    #[test]
    fn parses_reference_document() {
        let config: RunConfig = toml::from_str(FIG2_TOML).unwrap();
        assert_eq!(config.order, 30);
        assert_eq!(config.samples, DEFAULT_SAMPLES);
        let (problem, warnings) = config.problem().unwrap();
        assert!(warnings.is_empty());
        assert_eq!(problem.far_field.sigma, 1.0);
        assert_eq!(problem.load.degree(), 0);
    }

    #[test]
    fn missing_mandatory_field_names_it() {
        let bad = FIG2_TOML.replace("half_length = 1.0", "");
        let err = toml::from_str::<RunConfig>(&bad).unwrap_err();
        assert!(err.to_string().contains("half_length"), "{err}");
    }

    #[test]
    fn sweep_values_spacing() {
        let sweep = SweepConfig {
            parameter: SweepParameter::Nu1,
            start: 0.1,
            stop: 0.4,
            steps: 4,
            spacing: SweepSpacing::Linear,
        };
        let v = sweep.values().unwrap();
        assert_eq!(v.len(), 4);
        assert!((v[1] - 0.2).abs() < 1e-12);
        let sweep = SweepConfig {
            parameter: SweepParameter::GammaAll,
            start: 0.01,
            stop: 0.04,
            steps: 3,
            spacing: SweepSpacing::Log,
        };
        let v = sweep.values().unwrap();
        assert!((v[1] - 0.02).abs() < 1e-12);
    }

    #[test]
    fn unknown_key_rejected() {
        let bad = format!("{FIG2_TOML}\nbogus_key = 1\n");
        assert!(toml::from_str::<RunConfig>(&bad).is_err());
    }
}
