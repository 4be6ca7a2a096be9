//! Least-squares helpers for the verification suite.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Polynomial coefficients `c[k]` of `sum c[k] x^k` fitted to the samples.
///
/// The abscissae are rescaled to `[0, 1]` before the solve so the Vandermonde
/// matrix stays well conditioned for the degrees used here.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("ys", "length differs from xs"));
    }
    if xs.len() <= degree {
        return Err(Error::invalid("xs", "need more samples than the degree"));
    }
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::invalid("xs", "all abscissae are zero"));
    }
    let a = DMatrix::from_fn(xs.len(), degree + 1, |i, k| (xs[i] / scale).powi(k as i32));
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let sol = svd.solve(&b, 1e-14).map_err(|e| Error::invalid("xs", e.to_string()))?;
    Ok(sol.iter().enumerate().map(|(k, c)| c / scale.powi(k as i32)).collect())
}

/// Fit `ln y = ln y0 - rate * t`. Returns `(rate, r_squared)`.
pub fn exponential_decay_fit(ts: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if ts.len() != ys.len() || ts.len() < 3 {
        return Err(Error::invalid("samples", "need at least three paired samples"));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::invalid("samples", "decay samples must stay positive"));
    }
    let n = ts.len() as f64;
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mt = ts.iter().sum::<f64>() / n;
    let ml = ls.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (t, l) in ts.iter().zip(&ls) {
        sxy += (t - mt) * (l - ml);
        sxx += (t - mt) * (t - mt);
        syy += (l - ml) * (l - ml);
    }
    if sxx == 0.0 {
        return Err(Error::invalid("samples", "all sample times coincide"));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok((-slope, r2))
}
