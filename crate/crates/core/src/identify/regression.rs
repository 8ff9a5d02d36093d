//! Ordinary least squares of accuracy on observation number, probe
//! probability and attendance probability, via the normal equations.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const REGRESSORS: [&str; 3] = ["observation_number", "probe_prob", "attendance_prob"];
const K: usize = REGRESSORS.len();

/// A column whose residual variance after eliminating the earlier columns
/// falls below this fraction of its own variance is treated as collinear.
const COLLINEAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionSample {
    pub observation_number: f64,
    pub probe_prob: f64,
    pub attendance_prob: f64,
    pub accuracy: f64,
}

impl RegressionSample {
    fn regressors(&self) -> [f64; K] {
        [self.observation_number, self.probe_prob, self.attendance_prob]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegressionError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("design matrix is rank deficient ({0} is collinear with the other regressors)")]
    RankDeficient(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    /// In [`REGRESSORS`] order.
    pub coefficients: [f64; K],
    pub coefficient_std_errors: [f64; K],
    pub intercept: f64,
    pub multiple_r: f64,
    pub r_square: f64,
    pub adjusted_r_square: f64,
    /// Residual standard error, `sqrt(SSE / (n - k - 1))`.
    pub standard_error: f64,
    pub sample_count: usize,
}

impl RegressionSummary {
    pub fn t_stats(&self) -> [f64; K] {
        std::array::from_fn(|i| self.coefficients[i] / self.coefficient_std_errors[i])
    }
}

impl fmt::Display for RegressionSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Multiple R\t{:.8}", self.multiple_r)?;
        writeln!(f, "R Square\t{:.8}", self.r_square)?;
        writeln!(f, "Adjusted R Square\t{:.8}", self.adjusted_r_square)?;
        writeln!(f, "Standard Error\t{:.8}", self.standard_error)?;
        writeln!(f, "Simulations\t{}", self.sample_count)?;
        writeln!(f, "Intercept\t{:.8}", self.intercept)?;
        let t = self.t_stats();
        for (i, name) in REGRESSORS.iter().enumerate() {
            writeln!(
                f,
                "{name}\t{:.8}\tse {:.8}\tt {:.3}",
                self.coefficients[i], self.coefficient_std_errors[i], t[i]
            )?;
        }
        Ok(())
    }
}

/// Fit `accuracy ~ 1 + observation_number + probe_prob + attendance_prob`.
///
/// Regressors are centred first, so the intercept drops out of the 4x4
/// normal equations and a 3x3 system remains.
pub fn fit_regression(samples: &[RegressionSample]) -> Result<RegressionSummary, RegressionError> {
    let n = samples.len();
    let needed = K + 2;
    if n < needed {
        return Err(RegressionError::TooFewSamples { needed, got: n });
    }
    let nf = n as f64;
    let mut mean_x = [0.0; K];
    let mut raw_sq = [0.0; K];
    let mut mean_y = 0.0;
    for s in samples {
        for (i, x) in s.regressors().into_iter().enumerate() {
            mean_x[i] += x;
            raw_sq[i] += x * x;
        }
        mean_y += s.accuracy;
    }
    mean_x.iter_mut().for_each(|m| *m /= nf);
    mean_y /= nf;

    let mut xtx = [[0.0; K]; K];
    let mut xty = [0.0; K];
    let mut sst = 0.0;
    for s in samples {
        let x = s.regressors();
        let dx: [f64; K] = std::array::from_fn(|i| x[i] - mean_x[i]);
        let dy = s.accuracy - mean_y;
        for i in 0..K {
            for j in 0..K {
                xtx[i][j] += dx[i] * dx[j];
            }
            xty[i] += dx[i] * dy;
        }
        sst += dy * dy;
    }

    // a constant column is collinear with the intercept
    for i in 0..K {
        if xtx[i][i] <= COLLINEAR_TOL * raw_sq[i] {
            return Err(RegressionError::RankDeficient(REGRESSORS[i]));
        }
    }
    let inverse = invert(&xtx)?;
    let beta: [f64; K] = std::array::from_fn(|i| (0..K).map(|j| inverse[i][j] * xty[j]).sum());
    let intercept = mean_y - (0..K).map(|i| beta[i] * mean_x[i]).sum::<f64>();

    let sse: f64 = samples
        .iter()
        .map(|s| {
            let x = s.regressors();
            let fit = intercept + (0..K).map(|i| beta[i] * x[i]).sum::<f64>();
            (s.accuracy - fit).powi(2)
        })
        .sum();
    let dof = (n - K - 1) as f64;
    let r_square = if sst > 0.0 { (1.0 - sse / sst).clamp(0.0, 1.0) } else { 1.0 };
    let adjusted_r_square = 1.0 - (1.0 - r_square) * (nf - 1.0) / dof;
    let sigma2 = sse / dof;
    Ok(RegressionSummary {
        coefficients: beta,
        coefficient_std_errors: std::array::from_fn(|i| (sigma2 * inverse[i][i]).sqrt()),
        intercept,
        multiple_r: r_square.sqrt(),
        r_square,
        adjusted_r_square,
        standard_error: sigma2.sqrt(),
        sample_count: n,
    })
}

/// Gauss-Jordan inverse of a symmetric positive semi-definite matrix, in
/// column order without pivoting so a collinear column is reported by name.
fn invert(m: &[[f64; K]; K]) -> Result<[[f64; K]; K], RegressionError> {
    let mut a = *m;
    let mut inv = [[0.0; K]; K];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..K {
        let pivot = a[col][col];
        if m[col][col] <= 0.0 || pivot <= COLLINEAR_TOL * m[col][col] {
            return Err(RegressionError::RankDeficient(REGRESSORS[col]));
        }
        for j in 0..K {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for row in 0..K {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..K {
                a[row][j] -= factor * a[col][j];
                inv[row][j] -= factor * inv[col][j];
            }
        }
    }
    Ok(inv)
}
