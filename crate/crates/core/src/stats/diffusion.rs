//! Price diffusivity diagnostics: the signature plot and the scaling of
//! price-change moments, both in trade time.

use crate::impact::PriceSeries;
use crate::stats::fit::{offset_power_fit, ScalingFit};
use crate::stats::imbalance::window_starts;
use crate::Result;

/// Log-spaced integer lags covering `[1, max_lag]`, deduplicated.
pub fn log_spaced_lags(max_lag: usize, per_decade: usize) -> Vec<usize> {
    let mut lags = Vec::new();
    let decades = (max_lag as f64).log10();
    let n = (decades * per_decade as f64).ceil() as usize;
    for i in 0..=n {
        let lag = 10f64.powf(decades * i as f64 / n as f64).round() as usize;
        let lag = lag.clamp(1, max_lag);
        if lags.last() != Some(&lag) {
            lags.push(lag);
        }
    }
    lags
}

/// Accumulates `E[(p_{k+tau} - p_k)^2]` over all in-day pairs, per lag.
#[derive(Debug, Clone)]
pub struct SignatureAccumulator {
    lags: Vec<usize>,
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl SignatureAccumulator {
    pub fn new(lags: Vec<usize>) -> Self {
        let n = lags.len();
        SignatureAccumulator {
            lags,
            sums: vec![0.0; n],
            counts: vec![0; n],
        }
    }

    pub fn add_day(&mut self, prices: &PriceSeries) {
        let p = &prices.prices;
        for (i, &tau) in self.lags.iter().enumerate() {
            if tau >= p.len() {
                continue;
            }
            let mut sum = 0.0;
            for k in 0..p.len() - tau {
                let d = p[k + tau] - p[k];
                sum += d * d;
            }
            self.sums[i] += sum;
            self.counts[i] += (p.len() - tau) as u64;
        }
    }

    /// `(tau, Sigma^2(tau) / tau)` averaged over the accumulated days.
    pub fn finalize(&self) -> Vec<(usize, f64)> {
        self.lags
            .iter()
            .zip(self.sums.iter().zip(&self.counts))
            .filter(|(_, (_, &c))| c > 0)
            .map(|(&tau, (&s, &c))| (tau, s / c as f64 / tau as f64))
            .collect()
    }
}

/// Signature plot over a set of priced days.
pub fn signature_plot(days: &[&PriceSeries], lags: &[usize]) -> Vec<(usize, f64)> {
    let mut acc = SignatureAccumulator::new(lags.to_vec());
    for d in days {
        acc.add_day(d);
    }
    acc.finalize()
}

/// Accumulates `E[|Delta_T|^(2n)]` over non-overlapping trade-time windows.
#[derive(Debug, Clone)]
pub struct PriceMomentAccumulator {
    pub t_values: Vec<usize>,
    pub n_values: Vec<u32>,
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl PriceMomentAccumulator {
    pub fn new(t_values: Vec<usize>, n_values: Vec<u32>) -> Self {
        let cells = t_values.len() * n_values.len();
        PriceMomentAccumulator {
            t_values,
            n_values,
            sums: vec![0.0; cells],
            counts: vec![0; cells],
        }
    }

    /// `T = 2^k` from 1 to 8192, moments `n` in {1, 2, 3}.
    pub fn standard() -> Self {
        PriceMomentAccumulator::new((0..=13).map(|k| 1usize << k).collect(), vec![1, 2, 3])
    }

    pub fn add_day(&mut self, prices: &PriceSeries) {
        let p = &prices.prices;
        let n_n = self.n_values.len();
        for (ti, &t) in self.t_values.iter().enumerate() {
            for start in window_starts(p.len(), t) {
                let d = (p[start + t] - p[start]).abs();
                let d2 = d * d;
                let mut pow = 1.0;
                for (ni, _) in self.n_values.iter().enumerate() {
                    pow *= d2;
                    self.sums[ti * n_n + ni] += pow;
                    self.counts[ti * n_n + ni] += 1;
                }
            }
        }
    }

    /// Empirical moment `E[|Delta_T|^(2n)]` for `(t_index, n_index)`.
    pub fn moment(&self, t_index: usize, n_index: usize) -> f64 {
        let i = t_index * self.n_values.len() + n_index;
        if self.counts[i] == 0 {
            f64::NAN
        } else {
            self.sums[i] / self.counts[i] as f64
        }
    }

    /// Moments normalized to 1 at the smallest `T`, per `n`.
    pub fn normalized_moments(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.n_values.len())
            .map(|ni| {
                let base = self.moment(0, ni);
                self.t_values
                    .iter()
                    .enumerate()
                    .map(|(ti, &t)| (t, self.moment(ti, ni) / base))
                    .collect()
            })
            .collect()
    }
}

/// Fit `Sigma^(2n)(T) = a0 + a1 T^zeta_n` to the normalized moments;
/// one fit per requested `n`. Diffusive prices give `zeta_n ~ n`.
pub fn price_moment_scaling(acc: &PriceMomentAccumulator) -> Vec<(u32, Result<ScalingFit>)> {
    acc.normalized_moments()
        .into_iter()
        .zip(&acc.n_values)
        .map(|(curve, &n)| {
            let xs: Vec<f64> = curve.iter().map(|&(t, _)| t as f64).collect();
            let ys: Vec<f64> = curve.iter().map(|&(_, m)| m).collect();
            let max_zeta = 2.0 * f64::from(n) + 1.0;
            (n, offset_power_fit(&xs, &ys, (0.05, max_zeta)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(prices: Vec<f64>) -> PriceSeries {
        PriceSeries {
            day: 0,
            times: vec![0.0; prices.len()],
            prices,
        }
    }

    #[test]
    fn lags_are_sorted_unique() {
        let lags = log_spaced_lags(2000, 12);
        assert_eq!(lags[0], 1);
        assert_eq!(*lags.last().unwrap(), 2000);
        for w in lags.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn unit_step_random_walk_is_flat_at_one() {
        use crate::seeding::{day_rng, Purpose};
        use rand::Rng;
        let mut rng = day_rng(41, Purpose::FlowGen, 0);
        let mut acc = SignatureAccumulator::new(vec![1, 4, 16, 64, 256]);
        for _ in 0..20 {
            let mut p = vec![0.0];
            for _ in 0..20_000 {
                let step = if rng.random::<bool>() { 1.0 } else { -1.0 };
                p.push(p.last().unwrap() + step);
            }
            acc.add_day(&series(p));
        }
        for (tau, v) in acc.finalize() {
            assert!((v - 1.0).abs() < 0.05, "tau {tau}: {v}");
        }
    }

    #[test]
    fn ballistic_path_signature_grows_linearly() {
        let p: Vec<f64> = (0..10_000).map(|k| k as f64).collect();
        let acc = {
            let mut acc = SignatureAccumulator::new(vec![1, 10, 100]);
            acc.add_day(&series(p));
            acc
        };
        for (tau, v) in acc.finalize() {
            // Sigma^2(tau)/tau = tau for p_t = t
            assert!((v - tau as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn brownian_moments_are_diffusive() {
        use crate::seeding::{day_rng, Purpose};
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = day_rng(42, Purpose::FlowGen, 0);
        let normal = StandardNormal;
        let mut acc = PriceMomentAccumulator::standard();
        for _ in 0..30 {
            let mut p = vec![0.0f64];
            for _ in 0..30_000 {
                let step: f64 = normal.sample(&mut rng);
                p.push(p.last().unwrap() + step);
            }
            acc.add_day(&series(p));
        }
        let fits = price_moment_scaling(&acc);
        let (n, fit) = &fits[0];
        assert_eq!(*n, 1);
        let zeta = fit.as_ref().unwrap().exponent;
        assert!((zeta - 1.0).abs() < 0.05, "zeta_1 {zeta}");
    }

    #[test]
    fn deterministic_ballistic_first_moment_is_two() {
        // p_t = t: |Delta_T|^2 = T^2 exactly, fitted zeta_1 = 2
        let p: Vec<f64> = (0..20_000).map(|k| k as f64).collect();
        let mut acc = PriceMomentAccumulator::standard();
        acc.add_day(&series(p));
        let fits = price_moment_scaling(&acc);
        let zeta = fits[0].1.as_ref().unwrap().exponent;
        assert!((zeta - 2.0).abs() < 1e-6, "zeta {zeta}");
    }
}
