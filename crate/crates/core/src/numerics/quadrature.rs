//! Principal-value quadrature, used as an independent oracle for the
//! analytic monomial series.
//!
//! `PV ∫_a^b f(r)/(r-x) dr` is split at the singular point: the symmetric
//! window `[x-d, x+d]` is folded into the regular integrand
//! `(f(x+s) - f(x-s))/s` on `(0, d]`, and the leftover piece is regular.
//! Both parts are integrated by composite Gauss-Legendre with panel doubling
//! (Richardson-style refinement) until the result stops changing.

use crate::error::{Error, Result};
use std::sync::OnceLock;

const GAUSS_POINTS: usize = 16;
const MAX_PANELS: usize = 4096;
const REFINE_TOL: f64 = 5e-14;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gauss_table() -> &'static (Vec<f64>, Vec<f64>) {
    static TABLE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    TABLE.get_or_init(|| gauss_legendre(GAUSS_POINTS))
}

fn gauss_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_table();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (t, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + half * t);
    }
    sum * half
}

/// Composite Gauss-Legendre with panel doubling until two successive
/// refinements agree.
pub fn integrate_smooth(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = 1usize;
    let mut previous = gauss_panel(&f, a, b);
    loop {
        panels *= 2;
        let h = (b - a) / panels as f64;
        let mut current = 0.0;
        for i in 0..panels {
            current += gauss_panel(&f, a + i as f64 * h, a + (i + 1) as f64 * h);
        }
        let scale = 1.0f64.max(current.abs());
        if (current - previous).abs() <= REFINE_TOL * scale {
            return Ok(current);
        }
        if panels >= MAX_PANELS {
            return Err(Error::NonConvergence(format!(
                "panel refinement stalled at {panels} panels, last change {:.3e}",
                (current - previous).abs()
            )));
        }
        previous = current;
    }
}

/// Principal-value integral `PV ∫_a^b f(r)/(r-x) dr` with `x` strictly inside
/// `(a, b)` and `f` smooth on `[a, b]`.
pub fn pv_quadrature_oracle(f: impl Fn(f64) -> f64, a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a < x && x < b) {
        return Err(Error::Domain(format!(
            "singular point x={x} must lie inside ({a}, {b})"
        )));
    }
    let d = (x - a).min(b - x);
    // Symmetric window around the singularity: its kernel contribution folds
    // into a regular integrand (the limit at s->0 is 2 f'(x), never sampled
    // because Gauss nodes are interior).
    let symmetric = integrate_smooth(|s| (f(x + s) - f(x - s)) / s, 0.0, d)?;
    let leftover = if x - a <= b - x {
        integrate_smooth(|r| f(r) / (r - x), x + d, b)?
    } else {
        integrate_smooth(|r| f(r) / (r - x), a, x - d)?
    };
    Ok(symmetric + leftover)
}
