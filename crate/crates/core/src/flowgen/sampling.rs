//! Child-volume and metaorder-size sampling.

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Zipf};

use crate::{Error, Result};

/// Child volume `q >= 1`, lognormal `(m, sigma_l)` truncated below 1 by
/// resampling. `sigma_l = 0` degenerates to `e^m`.
pub fn sample_child_volume<R: Rng + ?Sized>(rng: &mut R, m: f64, sigma_l: f64) -> f64 {
    if sigma_l == 0.0 {
        return m.exp();
    }
    let dist = LogNormal::new(m, sigma_l).expect("sigma_l must be finite and >= 0");
    loop {
        let q = dist.sample(rng);
        if q >= 1.0 {
            return q;
        }
    }
}

/// Number of child orders: discrete power law `P(s) ∝ s^(-1-mu_q)` on
/// `[1, s_max]`.
pub fn sample_metaorder_size<R: Rng + ?Sized>(
    rng: &mut R,
    mu_q: f64,
    s_max: u64,
) -> Result<u64> {
    if mu_q <= 1.0 {
        return Err(Error::Domain(format!(
            "size-tail exponent mu_q = {mu_q} must exceed 1"
        )));
    }
    if s_max == 1 {
        return Ok(1);
    }
    let dist = Zipf::new(s_max as f64, 1.0 + mu_q)
        .map_err(|e| Error::Domain(format!("invalid size distribution: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Analytic mean of the truncated size distribution,
/// `sum s^(-mu) / sum s^(-1-mu)` over `s in [1, s_max]`.
pub fn expected_metaorder_size(mu: f64, s_max: u64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for s in 1..=s_max {
        let s = s as f64;
        let w = s.powf(-1.0 - mu);
        den += w;
        num += s * w;
    }
    num / den
}
