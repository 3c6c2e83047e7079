//! Small numeric helpers shared by the fitting code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition threshold on the ratio of smallest to largest singular value
/// of the column-scaled design matrix.
const RANK_TOLERANCE: f64 = 1e-10;

/// Ordinary least squares `y ≈ X·β` for a row-major design matrix.
///
/// Columns are scaled to unit norm before the solve, so the collinearity
/// check does not depend on predictor units.
pub fn ols(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let n = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if n < p || p == 0 {
        return Err(Error::DegenerateCorpus(format!(
            "{n} observations for {p} coefficients"
        )));
    }
    let mut x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let mut scale = vec![1.0; p];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = x.column(j).norm();
        if norm == 0.0 {
            return Err(Error::DegenerateCorpus(format!(
                "predictor {j} is identically zero"
            )));
        }
        *s = norm;
        x.column_mut(j).unscale_mut(norm);
    }
    let svd = x.svd(true, true);
    let sv = &svd.singular_values;
    let max = sv.max();
    let min = sv.min();
    if max.is_nan() || max <= 0.0 || min / max < RANK_TOLERANCE {
        return Err(Error::DegenerateCorpus("collinear predictors".into()));
    }
    let rhs = DVector::from_column_slice(y);
    let beta = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::DegenerateCorpus(e.to_string()))?;
    Ok(beta.iter().zip(&scale).map(|(b, s)| b / s).collect())
}

/// Linear-interpolation quantile of an unsorted sample, `q` in `[0, 1]`.
///
/// Uses the `(n - 1)·q` order-statistic position.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Pearson correlation. Returns 0 when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct ResidualStats {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

impl ResidualStats {
    pub fn from_residuals(r: &[f64]) -> Self {
        if r.is_empty() {
            return Self::default();
        }
        let n = r.len() as f64;
        let mean = r.iter().sum::<f64>() / n;
        let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        ResidualStats {
            mean,
            std_dev: var.sqrt(),
            min: r.iter().copied().fold(f64::INFINITY, f64::min),
            max: r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// `count` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else if i == 0 {
                        lo
                    } else {
                        10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_recovers_exact_line() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| 3.0 - 0.5 * i as f64).collect();
        let b = ols(&rows, &y).unwrap();
        assert!((b[0] - 3.0).abs() < 1e-12);
        assert!((b[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ols_rejects_collinear() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![1.0, i as f64, 2.0 * i as f64])
            .collect();
        let y = vec![0.0; 10];
        assert!(matches!(ols(&rows, &y), Err(Error::DegenerateCorpus(_))));
    }

    #[test]
    fn quantile_interpolates() {
        let v = [4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 5.0);
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert!((quantile(&v, 0.1) - 1.4).abs() < 1e-12);
    }

    #[test]
    fn pearson_signs() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&a, &[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-12);
        assert!((pearson(&a, &[8.0, 6.0, 4.0, 2.0]) + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&a, &[1.0; 4]), 0.0);
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1.3e9, 40e9, 20);
        assert_eq!(v.len(), 20);
        assert_eq!(v[0], 1.3e9);
        assert_eq!(v[19], 40e9);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }
}
