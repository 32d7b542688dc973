//! Dense linear solving: LU with partial pivoting plus a 1-norm condition
//! estimate in the style of LAPACK's `gecon`.

use crate::error::{Error, Result};

/// Maximum accepted condition estimate before a solve is rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// A dense square system `A x = b` with row-major storage.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub dimension: usize,
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            matrix: vec![0.0; dimension * dimension],
            rhs: vec![0.0; dimension],
        }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dimension + col]
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.matrix[row * self.dimension + col] += value;
    }

    /// Max-norm of the coefficient matrix.
    pub fn matrix_max_norm(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn validate(&self) -> Result<()> {
        if self.matrix.len() != self.dimension * self.dimension {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} entries, expected {}",
                self.matrix.len(),
                self.dimension * self.dimension
            )));
        }
        if self.rhs.len() != self.dimension {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} entries, expected {}",
                self.rhs.len(),
                self.dimension
            )));
        }
        Ok(())
    }
}

/// Solution of a dense system together with quality metadata.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub condition_estimate: f64,
    /// Max-norm of `A x - b` evaluated with the original matrix.
    pub residual_norm: f64,
}

struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    pivots: Vec<usize>,
}

impl LuFactors {
    fn factor(n: usize, matrix: &[f64]) -> Result<Self> {
        let mut lu = matrix.to_vec();
        let mut pivots = vec![0usize; n];
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_val = lu[col * n + col].abs();
            for row in col + 1..n {
                let v = lu[row * n + col].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = row;
                }
            }
            if pivot_val == 0.0 {
                return Err(Error::SingularMatrix { pivot: col });
            }
            pivots[col] = pivot_row;
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
            }
            let diag = lu[col * n + col];
            for row in col + 1..n {
                let factor = lu[row * n + col] / diag;
                lu[row * n + col] = factor;
                if factor != 0.0 {
                    for j in col + 1..n {
                        lu[row * n + j] -= factor * lu[col * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, pivots })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for col in 0..n {
            x.swap(col, self.pivots[col]);
        }
        for col in 0..n {
            let xc = x[col];
            if xc != 0.0 {
                for row in col + 1..n {
                    x[row] -= self.lu[row * n + col] * xc;
                }
            }
        }
        for col in (0..n).rev() {
            x[col] /= self.lu[col * n + col];
            let xc = x[col];
            if xc != 0.0 {
                for row in 0..col {
                    x[row] -= self.lu[row * n + col] * xc;
                }
            }
        }
        x
    }

    /// Solve `A^T y = b` using the same factors (needed by the condition
    /// estimator).
    fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        // A^T = (P^T L U)^T = U^T L^T P, so forward-solve U^T, back-solve L^T,
        // then undo the row permutation.
        for col in 0..n {
            let mut sum = x[col];
            for row in 0..col {
                sum -= self.lu[row * n + col] * x[row];
            }
            x[col] = sum / self.lu[col * n + col];
        }
        for col in (0..n).rev() {
            let mut sum = x[col];
            for row in col + 1..n {
                sum -= self.lu[row * n + col] * x[row];
            }
            x[col] = sum;
        }
        for col in (0..n).rev() {
            x.swap(col, self.pivots[col]);
        }
        x
    }
}

fn one_norm(n: usize, matrix: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for col in 0..n {
        let mut sum = 0.0;
        for row in 0..n {
            sum += matrix[row * n + col].abs();
        }
        best = best.max(sum);
    }
    best
}

/// Hager/Higham estimate of `||A^-1||_1` from the LU factors.
fn inverse_one_norm_estimate(factors: &LuFactors) -> f64 {
    let n = factors.n;
    let mut x = vec![1.0 / n as f64; n];
    let mut estimate = 0.0;
    for _ in 0..5 {
        let y = factors.solve(&x);
        estimate = y.iter().map(|v| v.abs()).sum();
        let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = factors.solve_transposed(&xi);
        let (mut jmax, mut zmax) = (0usize, 0.0f64);
        for (j, v) in z.iter().enumerate() {
            if v.abs() > zmax {
                zmax = v.abs();
                jmax = j;
            }
        }
        let zx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= zx {
            break;
        }
        x = vec![0.0; n];
        x[jmax] = 1.0;
    }
    estimate
}

/// Solve a dense system by LU factorization with partial pivoting.
///
/// Rejects systems whose 1-norm condition estimate exceeds
/// [`CONDITION_LIMIT`].
pub fn solve_dense(sys: &LinearSystem) -> Result<SolveReport> {
    sys.validate()?;
    let n = sys.dimension;
    if n == 0 {
        return Ok(SolveReport {
            solution: vec![],
            condition_estimate: 1.0,
            residual_norm: 0.0,
        });
    }
    let factors = LuFactors::factor(n, &sys.matrix)?;
    let condition_estimate = one_norm(n, &sys.matrix) * inverse_one_norm_estimate(&factors);
    if !condition_estimate.is_finite() || condition_estimate > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            estimate: condition_estimate,
        });
    }
    let solution = factors.solve(&sys.rhs);
    let mut residual_norm = 0.0f64;
    for row in 0..n {
        let mut ax = 0.0;
        for col in 0..n {
            ax += sys.at(row, col) * solution[col];
        }
        residual_norm = residual_norm.max((ax - sys.rhs[row]).abs());
    }
    // Accepted solves must back-substitute accurately; a violation here means
    // the factorization lost far more digits than the condition estimate
    // admits.
    let xmax = solution.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = 1e-9 * sys.matrix_max_norm().max(1.0) * xmax.max(1.0);
    if residual_norm > bound {
        return Err(Error::IllConditioned {
            estimate: condition_estimate,
        });
    }
    Ok(SolveReport {
        solution,
        condition_estimate,
        residual_norm,
    })
}
