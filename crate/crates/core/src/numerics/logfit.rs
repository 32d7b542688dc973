//! Least-squares fitting on the logarithmic basis `{1, ln t, ln^2 t}`,
//! used to extract tip singularity coefficients from stress samples.

use crate::error::{Error, Result};
use crate::numerics::linalg::{solve_dense, LinearSystem};

/// Result of a `{1, ln t, ln^2 t}` fit: `value ~ c0 + c1 ln t + c2 ln^2 t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Root-mean-square residual of the fit over the samples.
    pub rms_residual: f64,
}

/// Ordinary least squares of `(t, value)` samples on the logarithmic basis.
///
/// Requires at least 6 samples with strictly positive `t` spanning at least
/// 3 distinct abscissae.
pub fn fit_log_basis(samples: &[(f64, f64)]) -> Result<LogFit> {
    if samples.len() < 6 {
        return Err(Error::InvalidInput(format!(
            "need at least 6 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(t, _)| !(*t > 0.0)) {
        return Err(Error::Domain("all abscissae must be strictly positive".into()));
    }
    let mut distinct: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::RankDeficient(format!(
            "only {} distinct abscissae, need 3",
            distinct.len()
        )));
    }

    // Normal equations for the 3-column basis.
    let mut sys = LinearSystem::new(3);
    for (t, v) in samples {
        let basis = [1.0, t.ln(), t.ln() * t.ln()];
        for i in 0..3 {
            for j in 0..3 {
                sys.add(i, j, basis[i] * basis[j]);
            }
            sys.rhs[i] += basis[i] * v;
        }
    }
    let report = solve_dense(&sys).map_err(|e| match e {
        Error::SingularMatrix { .. } | Error::IllConditioned { .. } => {
            Error::RankDeficient("log-basis normal equations are degenerate".into())
        }
        other => other,
    })?;
    let (c0, c1, c2) = (report.solution[0], report.solution[1], report.solution[2]);

    let mut sq = 0.0;
    for (t, v) in samples {
        let lt = t.ln();
        let r = c0 + c1 * lt + c2 * lt * lt - v;
        sq += r * r;
    }
    Ok(LogFit {
        c0,
        c1,
        c2,
        rms_residual: (sq / samples.len() as f64).sqrt(),
    })
}
