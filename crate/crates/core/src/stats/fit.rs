//! Scaling-exponent estimation: log-log regression, offset power-law fits,
//! bisection and bootstrap standard errors.

use rand::Rng;

use crate::{Error, Result};

/// Functional form of a fitted scaling law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitModel {
    /// `y = prefactor * x^exponent`
    PowerLaw,
    /// `y = a0 + prefactor * x^exponent`
    OffsetPower { a0: f64 },
}

/// Result of a scaling fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub fit_range: (f64, f64),
    pub stderr: f64,
    pub model: FitModel,
}

/// Ordinary least squares on `(x, y)`: `(slope, intercept, slope_stderr)`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::FitFailed(format!(
            "need >= 2 paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::FitFailed("zero variance in x".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if x.len() > 2 {
        let ss_res: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let r = b - (intercept + slope * a);
                r * r
            })
            .sum();
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, intercept, stderr))
}

/// Pure power-law fit `y = c * x^zeta` by OLS in log-log space, restricted
/// to `fit_range` in `x`. Non-positive `y` values abort the fit.
pub fn log_log_fit(x: &[f64], y: &[f64], fit_range: (f64, f64)) -> Result<ScalingFit> {
    let (lo, hi) = fit_range;
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&xv, &yv) in x.iter().zip(y) {
        if xv < lo || xv > hi {
            continue;
        }
        if yv <= 0.0 {
            return Err(Error::FitFailed(format!(
                "non-positive value {yv} at x = {xv} in log-log fit"
            )));
        }
        lx.push(xv.ln());
        ly.push(yv.ln());
    }
    let (slope, intercept, stderr) = linear_regression(&lx, &ly)?;
    Ok(ScalingFit {
        exponent: slope,
        prefactor: intercept.exp(),
        fit_range,
        stderr,
        model: FitModel::PowerLaw,
    })
}

/// Offset power-law fit `y = a0 + a1 * x^zeta`.
///
/// For fixed `zeta` the model is linear in `(a0, a1)`, so `zeta` is profiled:
/// a coarse scan over `zeta_range` followed by golden-section refinement.
pub fn offset_power_fit(x: &[f64], y: &[f64], zeta_range: (f64, f64)) -> Result<ScalingFit> {
    if x.len() != y.len() || x.len() < 4 {
        return Err(Error::FitFailed(
            "offset power fit needs >= 4 points".into(),
        ));
    }

    let sse = |zeta: f64| -> Option<(f64, f64, f64)> {
        // least squares for y = a0 + a1 * u with u = x^zeta
        let n = x.len() as f64;
        let u: Vec<f64> = x.iter().map(|&v| v.powf(zeta)).collect();
        let mu = u.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let suu: f64 = u.iter().map(|a| (a - mu) * (a - mu)).sum();
        if suu <= 0.0 {
            return None;
        }
        let suy: f64 = u.iter().zip(y).map(|(a, b)| (a - mu) * (b - my)).sum();
        let a1 = suy / suu;
        let a0 = my - a1 * mu;
        let err: f64 = u
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let r = b - (a0 + a1 * a);
                r * r
            })
            .sum();
        Some((err, a0, a1))
    };

    let (z_lo, z_hi) = zeta_range;
    let mut best = None;
    let steps = 200;
    for i in 0..=steps {
        let z = z_lo + (z_hi - z_lo) * i as f64 / steps as f64;
        if let Some((err, ..)) = sse(z) {
            if best.map_or(true, |(be, _)| err < be) {
                best = Some((err, z));
            }
        }
    }
    let (_, z0) = best.ok_or_else(|| Error::FitFailed("offset power fit degenerate".into()))?;

    // golden-section refinement around the coarse minimum
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let width = (z_hi - z_lo) / steps as f64;
    let (mut a, mut b) = ((z0 - 2.0 * width).max(z_lo), (z0 + 2.0 * width).min(z_hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    for _ in 0..60 {
        let fc = sse(c).map(|t| t.0).unwrap_or(f64::INFINITY);
        let fd = sse(d).map(|t| t.0).unwrap_or(f64::INFINITY);
        if fc < fd {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    let zeta = 0.5 * (a + b);
    let (err, a0, a1) =
        sse(zeta).ok_or_else(|| Error::FitFailed("offset power fit degenerate".into()))?;

    let dof = (x.len() as f64 - 3.0).max(1.0);
    let xmin = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let xmax = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingFit {
        exponent: zeta,
        prefactor: a1,
        fit_range: (xmin, xmax),
        stderr: (err / dof).sqrt(),
        model: FitModel::OffsetPower { a0 },
    })
}

/// Root of `f` on `[lo, hi]` by bisection, or `None` when no sign change
/// brackets a root.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut fa = fa;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Bootstrap standard error of an estimator over `n` exchangeable items.
///
/// `estimator` receives a resampled index multiset; replicates returning
/// `None` (degenerate resamples) are skipped.
pub fn bootstrap_stderr<R, F>(n: usize, replicates: usize, rng: &mut R, estimator: F) -> f64
where
    R: Rng + ?Sized,
    F: Fn(&[usize]) -> Option<f64>,
{
    if n < 2 {
        return 0.0;
    }
    let mut estimates = Vec::with_capacity(replicates);
    let mut indices = vec![0usize; n];
    for _ in 0..replicates {
        for slot in indices.iter_mut() {
            *slot = rng.random_range(0..n);
        }
        if let Some(v) = estimator(&indices) {
            estimates.push(v);
        }
    }
    if estimates.len() < 2 {
        return f64::NAN;
    }
    let k = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / k;
    (estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (k - 1.0)).sqrt()
}
