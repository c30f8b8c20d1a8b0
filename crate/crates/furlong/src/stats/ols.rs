//! Small dense ordinary least squares, shared by the regression-based
//! estimators. Normal equations with partial pivoting are plenty for the
//! handful of regressors used here.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub r_squared: f64,
}

impl OlsFit {
    pub fn t_stat(&self, idx: usize) -> f64 {
        self.coefficients[idx] / self.std_errors[idx]
    }
}

/// Solve the augmented system [a | rhs] in place via Gauss-Jordan with
/// partial pivoting. `a` is k x k, `rhs` is k x m.
#[allow(clippy::needless_range_loop)]
fn solve_augmented(mut a: Vec<Vec<f64>>, mut rhs: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let k = a.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 * scale {
            return Err(Error::Domain(
                "rank-deficient regression design matrix".into(),
            ));
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let diag = a[col][col];
        for v in a[col].iter_mut() {
            *v /= diag;
        }
        for v in rhs[col].iter_mut() {
            *v /= diag;
        }
        for row in 0..k {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..k {
                let t = a[col][j];
                a[row][j] -= factor * t;
            }
            for j in 0..rhs[0].len() {
                let t = rhs[col][j];
                rhs[row][j] -= factor * t;
            }
        }
    }
    Ok(rhs)
}

/// Fit y = X b by least squares. `rows` holds one regressor vector per
/// observation; include a 1.0 column for an intercept.
#[allow(clippy::needless_range_loop)]
pub fn ols(y: &[f64], rows: &[Vec<f64>]) -> Result<OlsFit> {
    let n = y.len();
    if n == 0 || rows.len() != n {
        return Err(Error::Domain("regression needs matching y and X".into()));
    }
    let k = rows[0].len();
    if n <= k {
        return Err(Error::InsufficientData {
            what: "least squares",
            required: k + 1,
            actual: n,
        });
    }

    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in i..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }

    // augment with the identity to recover (X'X)^-1 alongside the solution
    let mut rhs = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        rhs[i][0] = xty[i];
        rhs[i][i + 1] = 1.0;
    }
    let solved = solve_augmented(xtx, rhs)?;
    let coefficients: Vec<f64> = solved.iter().map(|r| r[0]).collect();

    let ss_res: f64 = rows
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let fitted: f64 = row.iter().zip(&coefficients).map(|(x, b)| x * b).sum();
            (yi - fitted) * (yi - fitted)
        })
        .sum();
    let sigma2 = ss_res / (n - k) as f64;
    let std_errors: Vec<f64> = (0..k)
        .map(|i| (sigma2 * solved[i][i + 1]).sqrt())
        .collect();

    let y_mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let r_squared = if ss_tot <= f64::EPSILON * n as f64 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };

    Ok(OlsFit {
        coefficients,
        std_errors,
        r_squared,
    })
}

/// Convenience: simple regression y = a + b x, returning (a, b, r_squared).
pub fn simple_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![1.0, v]).collect();
    let fit = ols(y, &rows)?;
    Ok((fit.coefficients[0], fit.coefficients[1], fit.r_squared))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_exact_line() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 + 2.0 * v).collect();
        let (a, b, r2) = simple_regression(&x, &y).unwrap();
        assert_abs_diff_eq!(a, 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn known_two_regressor_fit() {
        // y = 1 + 2*x1 - 0.5*x2 with tiny residuals
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![1.0, i as f64, ((i * i) % 7) as f64])
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| 1.0 + 2.0 * r[1] - 0.5 * r[2] + if i % 2 == 0 { 1e-9 } else { -1e-9 })
            .collect();
        let fit = ols(&y, &rows).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.coefficients[1], 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.coefficients[2], -0.5, epsilon = 1e-6);
        assert!(fit.std_errors.iter().all(|se| *se > 0.0));
    }

    #[test]
    fn collinear_design_is_rejected() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(ols(&y, &rows), Err(Error::Domain(_))));
    }
}
