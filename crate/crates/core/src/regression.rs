//! Ordinary least squares via Householder QR.

use crate::error::{Error, Result};

/// Relative size below which a column's component orthogonal to the
/// preceding columns counts as zero.
const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub feature_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// `1 - SS_res / SS_tot`; zero when the target is constant.
    pub r_squared: f64,
    pub residual_norm: f64,
}

impl RegressionFit {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }
}

/// Solves `min ||X b - y||` for a column-major design. Returns the
/// coefficient vector and the residuals.
///
/// Columns whose component orthogonal to the earlier columns vanishes are
/// reported by name as collinear.
pub fn solve_least_squares(
    columns: &[Vec<f64>],
    names: &[String],
    target: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = target.len();
    let p = columns.len();
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidInput(
            "design columns differ in length".into(),
        ));
    }
    if rows < p {
        return Err(Error::SingularDesign {
            columns: names.to_vec(),
        });
    }
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut b = target.to_vec();
    let original_norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();
    let mut diag = vec![0.0; p];
    let mut dependent = Vec::new();

    // `r` is the next pivot row; it only advances on independent columns so
    // the tail norm always measures the part outside the span so far.
    let mut r = 0;
    for j in 0..p {
        let tail_norm = norm(&a[j][r..]);
        if original_norms[j] == 0.0 || tail_norm <= RANK_TOLERANCE * original_norms[j] {
            dependent.push(names[j].clone());
            continue;
        }
        let alpha = if a[j][r] > 0.0 { -tail_norm } else { tail_norm };
        let mut v: Vec<f64> = a[j][r..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[j] = alpha;
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(j) {
                reflect(&v, vnorm2, &mut col[r..]);
            }
            reflect(&v, vnorm2, &mut b[r..]);
        }
        r += 1;
    }
    if !dependent.is_empty() {
        return Err(Error::SingularDesign { columns: dependent });
    }

    let mut coef = vec![0.0; p];
    for j in (0..p).rev() {
        let mut s = b[j];
        for k in j + 1..p {
            s -= a[k][j] * coef[k];
        }
        coef[j] = s / diag[j];
    }
    let residuals: Vec<f64> = (0..rows)
        .map(|i| target[i] - (0..p).map(|j| columns[j][i] * coef[j]).sum::<f64>())
        .collect();
    Ok((coef, residuals))
}

fn reflect(v: &[f64], vnorm2: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let scale = 2.0 * dot / vnorm2;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= scale * vi;
    }
}

fn norm(x: &[f64]) -> f64 {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    max * x.iter().map(|v| (v / max).powi(2)).sum::<f64>().sqrt()
}

/// Fits `target ~ intercept + features` by least squares.
///
/// `features` holds one row per observation. Needs more observations than
/// parameters.
pub fn fit_with_intercept(
    features: &[Vec<f64>],
    names: &[String],
    target: &[f64],
) -> Result<RegressionFit> {
    let rows = features.len();
    let k = names.len();
    if rows != target.len() {
        return Err(Error::InvalidInput(format!(
            "{rows} feature rows but {} targets",
            target.len()
        )));
    }
    if features.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidInput("feature rows differ in width".into()));
    }
    if rows <= k + 1 {
        return Err(Error::InvalidInput(format!(
            "need more than {} observations for {k} features, got {rows}",
            k + 1
        )));
    }
    let mut columns = Vec::with_capacity(k + 1);
    columns.push(vec![1.0; rows]);
    for j in 0..k {
        columns.push(features.iter().map(|r| r[j]).collect());
    }
    let mut all_names = vec!["intercept".to_string()];
    all_names.extend(names.iter().cloned());
    let (coef, residuals) = solve_least_squares(&columns, &all_names, target)?;

    let mean = target.iter().sum::<f64>() / rows as f64;
    let ss_tot: f64 = target.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        0.0
    };
    Ok(RegressionFit {
        feature_names: names.to_vec(),
        intercept: coef[0],
        coefficients: coef[1..].to_vec(),
        r_squared,
        residual_norm: ss_res.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn recovers_exact_linear_combination() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let x = i as f64 / 11.0;
                vec![x, (x * 7.3).sin().abs()]
            })
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 0.5 * r[0] + 0.2 * r[1] + 0.1).collect();
        let fit = fit_with_intercept(&rows, &names(&["pr", "cl"]), &y).unwrap();
        assert!((fit.coefficients[0] - 0.5).abs() < 1e-8);
        assert!((fit.coefficients[1] - 0.2).abs() < 1e-8);
        assert!((fit.intercept - 0.1).abs() < 1e-8);
        assert!(fit.r_squared >= 0.999999);
    }

    #[test]
    fn constant_target() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let y = vec![0.4; 6];
        let fit = fit_with_intercept(&rows, &names(&["a", "b"]), &y).unwrap();
        assert_eq!(fit.r_squared, 0.0);
        assert!(fit.coefficients.iter().all(|c| c.abs() < 1e-12));
        assert!((fit.intercept - 0.4).abs() < 1e-12);
    }

    #[test]
    fn identity_feature() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 0.3]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let fit = fit_with_intercept(&rows, &names(&["x"]), &y).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_are_named() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..6).map(|i| i as f64).collect();
        match fit_with_intercept(&rows, &names(&["x", "twice_x"]), &y) {
            Err(Error::SingularDesign { columns }) => assert_eq!(columns, vec!["twice_x"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_feature_collides_with_intercept() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 3.0]).collect();
        let y: Vec<f64> = (0..6).map(|i| i as f64).collect();
        match fit_with_intercept(&rows, &names(&["x", "flat"]), &y) {
            Err(Error::SingularDesign { columns }) => assert_eq!(columns, vec!["flat"]),
            other => panic!("{other:?}"),
        }
    }
}
