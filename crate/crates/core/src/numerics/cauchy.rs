//! Principal-value integrals of monomials against the Cauchy kernel.
//!
//! The four kernels here are series expansions of
//! `PV ∫ r^±k / (r - x) dr` taken over the crack segment `|r| < l` or the
//! interface rays `|r| > l`, evaluated either inside or outside the segment.
//! Each series is geometric in `x/l` (inside) or `l/x` (outside) and is
//! truncated adaptively so the neglected tail factor is below `SERIES_TAIL_TOL`.

use crate::error::{Error, Result};

/// Truncation cap for the monomial series.
pub const DEFAULT_SERIES_CAP: usize = 2000;

/// Geometric tail factor at which the series is cut off.
pub const SERIES_TAIL_TOL: f64 = 1e-12;

/// Which of the four monomial/domain combinations to integrate.
///
/// The first word names the integration domain (`Inner` = `|r| < l`,
/// `Outer` = `|r| > l`), the second where the evaluation point `x` lies.
/// Inner-domain integrands are `r^k`; outer-domain integrands are `r^-k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CauchyKind {
    /// `PV ∫_{|r|<l} r^k/(r-x) dr` for `|x| < l`.
    InnerInner,
    /// `∫_{|r|>l} r^-k/(r-x) dr` for `|x| < l` (k >= 1).
    OuterInner,
    /// `∫_{|r|<l} r^k/(r-x) dr` for `|x| > l`.
    InnerOuter,
    /// `PV ∫_{|r|>l} r^-k/(r-x) dr` for `|x| > l` (k >= 1).
    OuterOuter,
}

/// `(1 - (-1)^m)/m`: 2/m for odd m, 0 for even m (and m = 0).
#[inline]
pub(crate) fn odd_weight(m: i64) -> f64 {
    if m % 2 != 0 {
        2.0 / m as f64
    } else {
        0.0
    }
}

fn required_terms(ratio: f64, cap: usize) -> Result<usize> {
    if ratio == 0.0 {
        return Ok(1);
    }
    let required = (SERIES_TAIL_TOL.ln() / ratio.ln()).ceil() as usize;
    if required > cap {
        Err(Error::Truncation { required, cap })
    } else {
        Ok(required)
    }
}

/// Evaluate one of the four monomial Cauchy integrals by its series expansion.
///
/// `cap` bounds the number of series terms; exceeding it is a truncation
/// error, which in practice means `x` sits too close to a crack tip.
pub fn cauchy_monomial_integral(
    kind: CauchyKind,
    k: usize,
    x: f64,
    l: f64,
    cap: usize,
) -> Result<f64> {
    if !(l > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("need finite x and l > 0, got x={x}, l={l}")));
    }
    let inside = matches!(kind, CauchyKind::InnerInner | CauchyKind::OuterInner);
    if inside && x.abs() >= l {
        return Err(Error::Domain(format!(
            "evaluation point |x|={} must lie inside the segment (l={l})",
            x.abs()
        )));
    }
    if !inside && x.abs() <= l {
        return Err(Error::Domain(format!(
            "evaluation point |x|={} must lie outside the segment (l={l})",
            x.abs()
        )));
    }
    if matches!(kind, CauchyKind::OuterInner | CauchyKind::OuterOuter) && k == 0 {
        return Err(Error::Domain(
            "outer-domain integrand r^-k requires k >= 1".into(),
        ));
    }

    let ki = k as i64;
    let ratio = if inside { x.abs() / l } else { l / x.abs() };
    // Make sure the finite leading part (j up to ~k) is always summed.
    let terms = required_terms(ratio, cap)?.max(k + 2);

    // Series variable: t^j with t = x/l (inside) or l/x (outside).
    let t = if inside { x / l } else { l / x };
    let mut sum = 0.0;
    let mut tj = 1.0; // t^0; the outside series start at j = 1 and skip this.
    match kind {
        CauchyKind::InnerInner => {
            // -sum_{j>=0, j!=k} w(j-k) x^j l^(k-j)  = -l^k sum w(j-k) t^j
            for j in 0..=terms as i64 {
                if j != ki {
                    sum -= odd_weight(j - ki) * tj;
                }
                tj *= t;
            }
            sum *= l.powi(ki as i32);
        }
        CauchyKind::OuterInner => {
            // sum_{j>=0} w(j+k) x^j l^(-j-k) = l^-k sum w(j+k) t^j
            for j in 0..=terms as i64 {
                sum += odd_weight(j + ki) * tj;
                tj *= t;
            }
            sum *= l.powi(-(ki as i32));
        }
        CauchyKind::InnerOuter => {
            // -sum_{j>=1} w(j+k) x^-j l^(j+k) = -l^k sum_{j>=1} w(j+k) t^j
            tj = t;
            for j in 1..=terms as i64 {
                sum -= odd_weight(j + ki) * tj;
                tj *= t;
            }
            sum *= l.powi(ki as i32);
        }
        CauchyKind::OuterOuter => {
            // sum_{j>=1, j!=k} w(j-k) x^-j l^(j-k) = l^-k sum_{j>=1,j!=k} w(j-k) t^j
            tj = t;
            for j in 1..=terms as i64 {
                if j != ki {
                    sum += odd_weight(j - ki) * tj;
                }
                tj *= t;
            }
            sum *= l.powi(-(ki as i32));
        }
    }
    Ok(sum)
}

/// Convenience wrapper with the default truncation cap.
pub fn cauchy_integral(kind: CauchyKind, k: usize, x: f64, l: f64) -> Result<f64> {
    cauchy_monomial_integral(kind, k, x, l, DEFAULT_SERIES_CAP)
}

/// `PV ∫_{-l}^{l} p(r)/(r-x) dr` for a polynomial `p` given by its
/// coefficients, valid for any `x` with `|x| != l`.
///
/// Uses the division `p(r) = q(r)(r-x) + p(x)`, so the result is exact up to
/// rounding: `∫ q(r) dr + p(x) ln|(l-x)/(l+x)|`.
pub fn cauchy_polynomial_integral(coeffs: &[f64], x: f64, l: f64) -> Result<f64> {
    if x.abs() == l {
        return Err(Error::Domain("evaluation at a segment endpoint".into()));
    }
    // Synthetic division by (r - x): quotient coefficients via Horner.
    let n = coeffs.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut quotient = vec![0.0; n.saturating_sub(1)];
    let mut carry = 0.0;
    for i in (0..n).rev() {
        let value = coeffs[i] + carry * x;
        if i > 0 {
            quotient[i - 1] = value;
            carry = value;
        } else {
            carry = value; // p(x)
        }
    }
    let p_at_x = carry;
    let mut integral = 0.0;
    for (m, q) in quotient.iter().enumerate() {
        integral += q * symmetric_monomial_integral(m, l);
    }
    Ok(integral + p_at_x * ((l - x).abs() / (l + x).abs()).ln())
}

/// `∫_{-l}^{l} x^k dx`: `2 l^(k+1)/(k+1)` for even `k`, zero for odd `k`.
#[inline]
pub fn symmetric_monomial_integral(k: usize, l: f64) -> f64 {
    if k % 2 == 0 {
        2.0 * l.powi(k as i32 + 1) / (k as f64 + 1.0)
    } else {
        0.0
    }
}
