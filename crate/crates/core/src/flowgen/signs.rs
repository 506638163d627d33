//! Metaorder sign sequences with power-law autocorrelation.
//!
//! The target binary autocorrelation `E[e_t e_{t+tau}] = gamma_meta *
//! tau^(-gamma_cross)` is realized by clipping a stationary Gaussian
//! sequence: for jointly Gaussian variables, `E[sign(x) sign(y)] =
//! (2/pi) asin(rho)`, so a Gaussian autocovariance of
//! `sin(pi/2 * gamma_meta * tau^(-gamma_cross))` yields the target exactly.
//! The covariance is truncated beyond `t_cut` to keep it summable, and the
//! Gaussian sequence is drawn by circulant (spectral) embedding.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Draw `n` signs in `{-1, +1}` with zero mean and lag-`tau`
/// autocorrelation `gamma_meta * tau^(-gamma_cross)` for `tau <= t_cut`.
///
/// `gamma_meta = 0` yields i.i.d. fair signs. Targets whose clipped-Gaussian
/// covariance is not positive semidefinite are rejected with the offending
/// spectral component.
pub fn generate_correlated_signs<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    gamma_meta: f64,
    gamma_cross: f64,
    t_cut: u64,
) -> Result<Vec<i8>> {
    if !(0.0..1.0).contains(&gamma_meta) {
        return Err(Error::Domain(format!(
            "gamma_meta = {gamma_meta} must lie in [0, 1)"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if gamma_meta == 0.0 {
        return Ok((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect());
    }
    if gamma_cross <= 0.0 {
        return Err(Error::Domain(format!(
            "gamma_cross = {gamma_cross} must be > 0"
        )));
    }
    if t_cut < 1 {
        return Err(Error::Domain("t_cut must be >= 1".into()));
    }

    // Circulant size: large enough that wrap-around never correlates two of
    // the first n entries (covariance support is t_cut).
    let t_cut = t_cut as usize;
    let m = (n + t_cut + 1).next_power_of_two().max(2 * (t_cut + 1));

    let mut spectrum = vec![Complex64::new(0.0, 0.0); m];
    spectrum[0].re = 1.0;
    for tau in 1..=t_cut.min(m / 2) {
        let binary_target = gamma_meta * (tau as f64).powf(-gamma_cross);
        let gaussian_cov = (std::f64::consts::FRAC_PI_2 * binary_target).sin();
        spectrum[tau].re = gaussian_cov;
        spectrum[m - tau].re = gaussian_cov;
    }

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut spectrum);

    let max_eig = spectrum.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    let floor = -1e-9 * max_eig.max(1.0);
    let mut field = Vec::with_capacity(m);
    for (index, c) in spectrum.iter().enumerate() {
        if c.re < floor {
            return Err(Error::SignCovarianceNotPsd { index, eigenvalue: c.re });
        }
        let amp = c.re.max(0.0).sqrt();
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        field.push(Complex64::new(a * amp, b * amp));
    }
    planner.plan_fft_forward(m).process(&mut field);

    Ok(field[..n].iter().map(|c| if c.re >= 0.0 { 1 } else { -1 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{day_rng, Purpose};

    fn autocorr(signs: &[i8], tau: usize) -> f64 {
        let n = signs.len() - tau;
        let sum: i64 = (0..n).map(|i| i64::from(signs[i] * signs[i + tau])).sum();
        sum as f64 / n as f64
    }

    #[test]
    fn iid_signs_are_balanced_and_uncorrelated() {
        let mut rng = day_rng(11, Purpose::FlowGen, 0);
        let n = 1_000_000;
        let signs = generate_correlated_signs(&mut rng, n, 0.0, 0.5, 1000).unwrap();
        let bound = 3.0 / (n as f64).sqrt();
        let mean: f64 = signs.iter().map(|&s| f64::from(s)).sum::<f64>() / n as f64;
        assert!(mean.abs() < bound, "mean {mean}");
        for tau in [1, 5, 50] {
            assert!(autocorr(&signs, tau).abs() < bound);
        }
    }

    #[test]
    fn outputs_are_unit_signs_with_zero_mean() {
        let mut rng = day_rng(12, Purpose::FlowGen, 0);
        let n = 200_000;
        let signs = generate_correlated_signs(&mut rng, n, 0.1, 0.5, 1000).unwrap();
        assert_eq!(signs.len(), n);
        assert!(signs.iter().all(|&s| s == 1 || s == -1));
        let mean: f64 = signs.iter().map(|&s| f64::from(s)).sum::<f64>() / n as f64;
        // correlated signs have an inflated variance of the mean; stay loose
        assert!(mean.abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn autocorrelation_matches_power_law_target() {
        // Monte Carlo estimate against the analytic target at selected lags.
        let gamma_meta = 0.1;
        let gamma_cross = 0.5;
        let mut rng = day_rng(13, Purpose::FlowGen, 0);
        let n = 1_000_000;
        let signs =
            generate_correlated_signs(&mut rng, n, gamma_meta, gamma_cross, 1000).unwrap();
        for tau in [10usize, 30, 100] {
            let measured = autocorr(&signs, tau);
            let target = gamma_meta * (tau as f64).powf(-gamma_cross);
            assert!(
                (measured - target).abs() / target < 0.2,
                "tau {tau}: measured {measured}, target {target}"
            );
        }
    }

    #[test]
    fn empty_and_domain_errors() {
        let mut rng = day_rng(14, Purpose::FlowGen, 0);
        assert!(generate_correlated_signs(&mut rng, 0, 0.1, 0.5, 1000)
            .unwrap()
            .is_empty());
        assert!(generate_correlated_signs(&mut rng, 10, -0.1, 0.5, 1000).is_err());
        assert!(generate_correlated_signs(&mut rng, 10, 1.0, 0.5, 1000).is_err());
        assert!(generate_correlated_signs(&mut rng, 10, 0.1, 0.0, 1000).is_err());
    }
}
