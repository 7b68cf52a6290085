//! Ordinary least-squares line fits.

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; `NaN` for two points.
    pub stderr: f64,
}

/// OLS fit of `y = slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit, HarnessError> {
    if xs.len() != ys.len() {
        return Err(HarnessError::Domain("x and y lengths differ".into()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(HarnessError::Domain(
            "a fit needs at least two points".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(HarnessError::Domain("non-finite fit input".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::Domain("all x values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(LineFit {
        slope,
        intercept,
        stderr,
    })
}

/// OLS fit on `(ln x, ln y)`; the intercept is `ln` of the prefactor.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<LineFit, HarnessError> {
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(HarnessError::Domain(
            "log-log fit needs positive values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

/// OLS fit on `(x, ln y)`.
pub fn fit_semilog_slope(xs: &[f64], ys: &[f64]) -> Result<LineFit, HarnessError> {
    if ys.iter().any(|&v| !(v > 0.0)) {
        return Err(HarnessError::Domain(
            "semi-log fit needs positive values".into(),
        ));
    }
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    fit_line(xs, &ly)
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Sample mean and unbiased standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
