//! Workflow layer behind the command-line interface: solve a configuration,
//! cross-verify the two discretizations, sweep a parameter, or compare
//! against the classical pressurized-crack solution. Each workflow writes
//! plot-ready CSV curves plus a manifest with content digests.

pub mod config;
pub mod error;
pub mod output;

use config::{ReferenceConfig, RunConfig, SweepParameter};
use error::CliError;
use interface_crack::model::{Material, Problem, SurfaceTension};
use interface_crack::postprocess::{
    crack_opening, fit_singularity, max_stress_scan, EnglandReference, SingularityFit, Tip,
};
use interface_crack::spline;
use interface_crack::taylor;
use output::{Csv, OutputDir};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};

/// Command-line overrides applied on top of the config document.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub order: Option<usize>,
    pub samples: Option<usize>,
    pub tolerance_taylor: Option<f64>,
    pub tolerance_spline: Option<f64>,
}

fn load_config(config_path: &Path, overrides: &Overrides) -> Result<(RunConfig, Vec<u8>), CliError> {
    let bytes = std::fs::read(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let mut config = RunConfig::load(config_path)?;
    if let Some(order) = overrides.order {
        config.order = order;
    }
    if let Some(samples) = overrides.samples {
        config.samples = samples;
    }
    if let Some(t) = overrides.tolerance_taylor {
        config.verify.tolerance_taylor = t;
    }
    if let Some(t) = overrides.tolerance_spline {
        config.verify.tolerance_spline = t;
    }
    if config.samples < 2 {
        return Err(CliError::Config("samples must be at least 2".into()));
    }
    Ok((config, bytes))
}

fn uniform_grid(l: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|i| -l + 2.0 * l * i as f64 / (samples - 1) as f64)
        .collect()
}

/// Stress-sampling grid: midpoint-shifted so the singular tips are never hit.
fn interior_grid(l: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|i| -l + 2.0 * l * (i as f64 + 0.5) / samples as f64)
        .collect()
}

/// Comparison functionals: 11 equally spaced interior points.
pub fn comparison_grid(l: f64) -> Vec<f64> {
    (1..=11).map(|i| -l + 2.0 * l * i as f64 / 12.0).collect()
}

#[derive(Debug, Clone, Serialize)]
struct FitJson {
    tip: f64,
    k1: f64,
    k2: f64,
    window: (f64, f64),
    window_sensitivity: Option<(f64, f64)>,
    s12_plus: [f64; 4],
    s12_minus: [f64; 4],
    s22_plus: [f64; 4],
    s22_minus: [f64; 4],
}

impl FitJson {
    fn from(fit: &SingularityFit) -> Self {
        let pack = |f: &interface_crack::numerics::LogFit| [f.c0, f.c1, f.c2, f.rms_residual];
        Self {
            tip: fit.tip,
            k1: fit.k1,
            k2: fit.k2,
            window: fit.window,
            window_sensitivity: fit.window_sensitivity,
            s12_plus: pack(&fit.s12_plus),
            s12_minus: pack(&fit.s12_minus),
            s22_plus: pack(&fit.s22_plus),
            s22_minus: pack(&fit.s22_minus),
        }
    }
}

/// Outcome summary of a solve run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub manifest_path: PathBuf,
    pub condition_estimate: f64,
    pub k1_right: f64,
    pub k2_right: f64,
}

pub fn run_solve(
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<SolveOutcome, CliError> {
    let (config, config_bytes) = load_config(config_path, overrides)?;
    let (problem, warnings) = config.problem()?;
    let l = problem.half_length;
    let solution = taylor::solve(&problem, config.order)?;
    let residual_report =
        taylor::residual(&problem, &solution, &taylor::default_residual_samples(l))?;

    let mut out = OutputDir::new(out_dir)?;

    let mut coefficients = Csv::new("coefficients.csv", &["function", "power", "value"]);
    let blocks: [(&str, &Vec<f64>, i64); 6] = [
        ("phi1", &solution.a1, 1),
        ("phi2", &solution.a2, 1),
        ("phi", &solution.a3, -1),
        ("psi1", &solution.b1, 1),
        ("psi2", &solution.b2, 1),
        ("psi", &solution.b3, -1),
    ];
    for (name, coeffs, direction) in blocks {
        for (i, c) in coeffs.iter().enumerate() {
            let power = if direction > 0 {
                i as i64
            } else {
                -(i as i64 + 1)
            };
            coefficients.row(&[name.to_string(), power.to_string(), output::fmt(*c)]);
        }
    }
    out.push_csv(coefficients);

    let mut shape = Csv::new("crack_shape.csv", &["x", "u2_plus", "u2_minus"]);
    for x in uniform_grid(l, config.samples) {
        let (up, um) = crack_opening(&solution, x);
        shape.numeric_row(&[x, up, um]);
    }
    out.push_csv(shape);

    let mut stress = Csv::new(
        "face_stress.csv",
        &["x", "s12_plus", "s12_minus", "s22_plus", "s22_minus"],
    );
    for x in interior_grid(l, config.samples) {
        let st = interface_crack::postprocess::boundary_stresses(&problem, &solution, x)?;
        stress.numeric_row(&[x, st.s12_plus, st.s12_minus, st.s22_plus, st.s22_minus]);
    }
    out.push_csv(stress);

    let right = fit_singularity(&problem, &solution, Tip::Right, None)?;
    let left = fit_singularity(&problem, &solution, Tip::Left, None)?;
    out.push_json(
        "singularity.json",
        &json!({
            "right": FitJson::from(&right),
            "left": FitJson::from(&left),
        }),
    )?;

    let maxima = max_stress_scan(&problem, &solution)?;
    let solver = json!({
        "condition_estimate": solution.quality.condition_estimate,
        "linear_residual_norm": solution.quality.residual_norm,
        "equation_residual_max": residual_report.equation_max,
        "constraint_residuals": residual_report.constraints.values,
        "constraint_scales": residual_report.constraints.scales,
        "shear_jump_integral_face": residual_report.shear_jump_integral_face,
        "shear_jump_integral_dtn": residual_report.shear_jump_integral_dtn,
        "max_stress": {
            "s22_plus": [maxima.s22_plus.value, maxima.s22_plus.x],
            "s22_minus": [maxima.s22_minus.value, maxima.s22_minus.x],
            "s12_plus": [maxima.s12_plus.value, maxima.s12_plus.x],
            "s12_minus": [maxima.s12_minus.value, maxima.s12_minus.x],
        },
    });
    let parameters = json!({
        "order": config.order,
        "samples": config.samples,
        "half_length": l,
    });
    let manifest_path = out.finish("solve", &config_bytes, parameters, solver, warnings)?;
    Ok(SolveOutcome {
        manifest_path,
        condition_estimate: solution.quality.condition_estimate,
        k1_right: right.k1,
        k2_right: right.k2,
    })
}

/// Outcome of a verification run.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub taylor_gap: f64,
    pub spline_gap: f64,
    pub tolerance_taylor: f64,
    pub tolerance_spline: f64,
    pub passed: bool,
}

pub fn run_verify(
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<VerifyOutcome, CliError> {
    let (config, config_bytes) = load_config(config_path, overrides)?;
    let (problem, warnings) = config.problem()?;
    let l = problem.half_length;
    let order = config.order;
    let spline_n = config.verify.spline_half_count.unwrap_or(order);

    let coarse = taylor::solve(&problem, order)?;
    let fine = taylor::solve(&problem, order + 20)?;
    let spline_solution = spline::solve_spline(&problem, spline_n)?;

    let grid = comparison_grid(l);
    let mut taylor_gap = 0.0f64;
    let mut reference_max = 0.0f64;
    for &x in &grid {
        let (uc, _) = crack_opening(&coarse, x);
        let (uf, _) = crack_opening(&fine, x);
        taylor_gap = taylor_gap.max((uc - uf).abs());
        reference_max = reference_max.max(uf.abs());
    }
    let taylor_gap = taylor_gap / reference_max.max(1e-300);
    let discrepancy = spline::compare(&coarse, &spline_solution, &grid);
    let spline_gap = discrepancy.opening_linf_rel;

    let mut curves = Csv::new(
        "opening_comparison.csv",
        &["x", "taylor_low", "taylor_high", "spline"],
    );
    for x in uniform_grid(l, config.samples) {
        curves.numeric_row(&[
            x,
            crack_opening(&coarse, x).0,
            crack_opening(&fine, x).0,
            spline_solution.opening_at(1, x),
        ]);
    }

    let passed =
        taylor_gap <= config.verify.tolerance_taylor && spline_gap <= config.verify.tolerance_spline;
    let report = json!({
        "taylor_orders": [order, order + 20],
        "spline_half_count": spline_n,
        "comparison_points": grid,
        "taylor_gap_rel_linf": taylor_gap,
        "spline_gap_rel_linf": spline_gap,
        "spline_gap_rel_l2": discrepancy.opening_l2_rel,
        "psi1_gap_rel_linf": discrepancy.psi1_linf_rel,
        "psi2_gap_rel_linf": discrepancy.psi2_linf_rel,
        "tolerance_taylor": config.verify.tolerance_taylor,
        "tolerance_spline": config.verify.tolerance_spline,
        "passed": passed,
    });

    let mut out = OutputDir::new(out_dir)?;
    out.push_csv(curves);
    out.push_json("verify_report.json", &report)?;
    let solver = json!({
        "taylor_condition": [coarse.quality.condition_estimate, fine.quality.condition_estimate],
        "spline_condition": spline_solution.quality.condition_estimate,
    });
    let parameters = json!({
        "order": order,
        "samples": config.samples,
        "half_length": l,
    });
    out.finish("verify", &config_bytes, parameters, solver, warnings)?;

    let outcome = VerifyOutcome {
        taylor_gap,
        spline_gap,
        tolerance_taylor: config.verify.tolerance_taylor,
        tolerance_spline: config.verify.tolerance_spline,
        passed,
    };
    if !passed {
        return Err(CliError::Verification(format!(
            "discrepancies (taylor {taylor_gap:.3e}, spline {spline_gap:.3e}) exceed tolerances \
             ({:.3e}, {:.3e})",
            outcome.tolerance_taylor, outcome.tolerance_spline
        )));
    }
    Ok(outcome)
}

fn sweep_problem(base: &Problem, parameter: SweepParameter, value: f64) -> Result<Problem, CliError> {
    let mut p = base.clone();
    match parameter {
        SweepParameter::Nu1 => {
            p.material_upper = Material::new(p.material_upper.shear_modulus, value)
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        SweepParameter::Mu1 => {
            p.material_upper = Material::new(value, p.material_upper.poisson_ratio)
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        SweepParameter::GammaAll => {
            p.surface_tension = SurfaceTension {
                gamma0_plus: value,
                gamma0_minus: value,
                gamma1_plus: value,
                gamma1_minus: value,
                ..p.surface_tension
            };
        }
        SweepParameter::Sigma => p.far_field.sigma = value,
        SweepParameter::Tau => p.far_field.tau = value,
    }
    Ok(p)
}

/// One row of a sweep result.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub ok: bool,
    pub max_s22_plus: f64,
    pub max_s22_minus: f64,
    pub max_s12_plus: f64,
    pub max_s12_minus: f64,
    pub k1: f64,
    pub k2: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failed_steps: usize,
}

pub fn run_sweep(
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<SweepOutcome, CliError> {
    let (config, config_bytes) = load_config(config_path, overrides)?;
    let (base, warnings) = config.problem()?;
    let sweep = config
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("sweep block missing from config".into()))?;
    let values = sweep.values()?;

    let parameter_name = match sweep.parameter {
        SweepParameter::Nu1 => "nu1",
        SweepParameter::Mu1 => "mu1",
        SweepParameter::GammaAll => "gamma-all",
        SweepParameter::Sigma => "sigma",
        SweepParameter::Tau => "tau",
    };

    let mut csv = Csv::new(
        "sweep.csv",
        &[
            "parameter",
            "value",
            "status",
            "max_s22_plus",
            "max_s22_minus",
            "max_s12_plus",
            "max_s12_minus",
            "k1",
            "k2",
        ],
    );
    let mut rows = Vec::new();
    let mut failed = 0usize;
    for &value in &values {
        let step = sweep_problem(&base, sweep.parameter, value).and_then(|p| {
            p.validate().map_err(|e| CliError::Config(e.to_string()))?;
            let s = taylor::solve(&p, config.order)?;
            let fit = fit_singularity(&p, &s, Tip::Right, None)?;
            let maxima = max_stress_scan(&p, &s)?;
            Ok((fit, maxima))
        });
        match step {
            Ok((fit, maxima)) => {
                rows.push(SweepRow {
                    value,
                    ok: true,
                    max_s22_plus: maxima.s22_plus.value,
                    max_s22_minus: maxima.s22_minus.value,
                    max_s12_plus: maxima.s12_plus.value,
                    max_s12_minus: maxima.s12_minus.value,
                    k1: fit.k1,
                    k2: fit.k2,
                });
                let r = rows.last().unwrap();
                csv.row(&[
                    parameter_name.to_string(),
                    output::fmt(value),
                    "ok".to_string(),
                    output::fmt(r.max_s22_plus),
                    output::fmt(r.max_s22_minus),
                    output::fmt(r.max_s12_plus),
                    output::fmt(r.max_s12_minus),
                    output::fmt(r.k1),
                    output::fmt(r.k2),
                ]);
            }
            Err(e) => {
                failed += 1;
                rows.push(SweepRow {
                    value,
                    ok: false,
                    max_s22_plus: f64::NAN,
                    max_s22_minus: f64::NAN,
                    max_s12_plus: f64::NAN,
                    max_s12_minus: f64::NAN,
                    k1: f64::NAN,
                    k2: f64::NAN,
                });
                let msg = e.to_string().replace(',', ";");
                csv.row(&[
                    parameter_name.to_string(),
                    output::fmt(value),
                    format!("error: {msg}"),
                    "NaN".into(),
                    "NaN".into(),
                    "NaN".into(),
                    "NaN".into(),
                    "NaN".into(),
                    "NaN".into(),
                ]);
            }
        }
    }

    if failed == values.len() {
        return Err(CliError::Numerical("every sweep step failed".into()));
    }

    let mut out = OutputDir::new(out_dir)?;
    out.push_csv(csv);
    let parameters = json!({
        "order": config.order,
        "parameter": parameter_name,
        "start": sweep.start,
        "stop": sweep.stop,
        "steps": sweep.steps,
        "failed_steps": failed,
    });
    out.finish("sweep", &config_bytes, parameters, json!({}), warnings)?;
    Ok(SweepOutcome {
        rows,
        failed_steps: failed,
    })
}

pub fn run_reference(
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), CliError> {
    let (config, config_bytes) = load_config(config_path, overrides)?;
    let (base, warnings) = config.problem()?;
    let reference: ReferenceConfig = config
        .reference
        .clone()
        .ok_or_else(|| CliError::Config("reference block missing from config".into()))?;

    let l = base.half_length;
    let england = EnglandReference::new(
        &base.material_upper,
        &base.material_lower,
        reference.pressure,
        l,
    );

    // Solve the surface-tension problem for each nonzero gamma.
    let mut solutions = Vec::new();
    for &gamma in &reference.gammas {
        if gamma == 0.0 {
            solutions.push(None);
            continue;
        }
        let mut p = base.clone();
        p.surface_tension = SurfaceTension::uniform(gamma);
        p.far_field = Default::default();
        p.load = interface_crack::model::CrackLoad::uniform_pressure(reference.pressure);
        let s = taylor::solve(&p, config.order)?;
        solutions.push(Some(s));
    }

    let mut header: Vec<String> = vec!["x".into(), "england_u2_plus".into(), "england_u2_minus".into()];
    for &gamma in &reference.gammas {
        header.push(format!("u2_plus_gamma_{gamma}"));
        header.push(format!("u2_minus_gamma_{gamma}"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = Csv::new("reference_shape.csv", &header_refs);
    for x in uniform_grid(l, config.samples) {
        let mut row = vec![x, england.u2_plus(x), england.u2_minus(x)];
        for s in &solutions {
            match s {
                Some(s) => {
                    let (up, um) = crack_opening(s, x);
                    row.push(up);
                    row.push(um);
                }
                None => {
                    row.push(england.u2_plus(x));
                    row.push(england.u2_minus(x));
                }
            }
        }
        csv.numeric_row(&row);
    }

    let mut out = OutputDir::new(out_dir)?;
    out.push_csv(csv);
    let parameters = json!({
        "order": config.order,
        "samples": config.samples,
        "pressure": reference.pressure,
        "gammas": reference.gammas,
        "bimaterial_ratio": england.alpha,
        "oscillation_index": england.gamma,
    });
    out.finish("reference", &config_bytes, parameters, json!({}), warnings)?;
    Ok(())
}
