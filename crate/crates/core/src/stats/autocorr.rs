//! Sign autocorrelation of the child-order flow, conditioned on volume.
//!
//! Events are pooled across days after rescaling each volume by its day's
//! total traded volume, `q_tilde = q / phi_D`, and partitioned into
//! logarithmic bins of `q_tilde`. Within a bin the autocorrelation is
//! measured in bin-internal event lag: the lag counts only events of that
//! bin, each day's subsequence contributing its own pairs.

use rayon::prelude::*;

use crate::flowgen::ChildOrderEvent;
use crate::stats::fit::{log_log_fit, ScalingFit};

/// Minimum pooled events for a bin to be measured at all.
pub const MIN_BIN_EVENTS: usize = 1_000;
/// Lag range of the power-law fit `C(tau) ~ tau^-gamma`.
pub const GAMMA_FIT_RANGE: (f64, f64) = (10.0, 1_000.0);

/// Autocorrelation of one volume bin.
#[derive(Debug, Clone)]
pub struct BinAutocorr {
    /// Bin edges in rescaled volume `q_tilde` (natural scale).
    pub q_lo: f64,
    pub q_hi: f64,
    /// Pooled number of events in the bin; 0 marks an empty (unfit) bin.
    pub count: usize,
    /// `(tau, C(tau))` in bin-internal event lag.
    pub curve: Vec<(usize, f64)>,
    /// Fitted memory exponent `gamma(q)`, when the curve supports a fit.
    pub gamma: Option<ScalingFit>,
}

/// Volume-binned and unconditional sign autocorrelation.
#[derive(Debug, Clone)]
pub struct VolumeBinnedAutocorr {
    pub bins: Vec<BinAutocorr>,
    pub unconditional: Vec<(usize, f64)>,
    pub unconditional_gamma: Option<ScalingFit>,
}

/// Per-day compact view of the flow: rescaled volumes and signs.
#[derive(Debug, Clone, Default)]
pub struct AutocorrAccumulator {
    days: Vec<(Vec<f64>, Vec<i8>)>,
}

impl AutocorrAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_day(&mut self, events: &[ChildOrderEvent]) {
        let phi_d: f64 = events.iter().map(|e| e.volume).sum();
        let q_tilde: Vec<f64> = events.iter().map(|e| e.volume / phi_d).collect();
        let signs: Vec<i8> = events.iter().map(|e| e.sign).collect();
        self.days.push((q_tilde, signs));
    }

    /// Pool the accumulated days into `n_bins` logarithmic volume bins and
    /// measure each bin's autocorrelation at the given lags.
    pub fn finalize(&self, n_bins: usize, lags: &[usize]) -> VolumeBinnedAutocorr {
        assert!(n_bins >= 1);
        let edges = self.bin_edges(n_bins);

        // per-day sign subsequences per bin, plus the unconditional stream
        let mut bin_days: Vec<Vec<Vec<i8>>> = vec![Vec::new(); n_bins];
        let mut all_days: Vec<Vec<i8>> = Vec::new();
        for (q_tilde, signs) in &self.days {
            let mut per_bin: Vec<Vec<i8>> = vec![Vec::new(); n_bins];
            for (&q, &s) in q_tilde.iter().zip(signs) {
                per_bin[bin_of(&edges, q)].push(s);
            }
            for (b, seq) in per_bin.into_iter().enumerate() {
                bin_days[b].push(seq);
            }
            all_days.push(signs.clone());
        }

        let bins: Vec<BinAutocorr> = bin_days
            .iter()
            .enumerate()
            .map(|(b, days)| {
                let count: usize = days.iter().map(|d| d.len()).sum();
                let (curve, gamma) = if count >= MIN_BIN_EVENTS {
                    let curve = pooled_autocorr(days, lags);
                    let gamma = fit_gamma(&curve);
                    (curve, gamma)
                } else {
                    (Vec::new(), None)
                };
                BinAutocorr {
                    q_lo: edges[b].exp(),
                    q_hi: edges[b + 1].exp(),
                    count,
                    curve,
                    gamma,
                }
            })
            .collect();

        let unconditional = pooled_autocorr(&all_days, lags);
        let unconditional_gamma = fit_gamma(&unconditional);
        VolumeBinnedAutocorr {
            bins,
            unconditional,
            unconditional_gamma,
        }
    }

    /// Log-equispaced edges between the 0.5% and 99.5% quantiles of the
    /// pooled `ln q_tilde`; outliers are clamped into the edge bins.
    fn bin_edges(&self, n_bins: usize) -> Vec<f64> {
        let mut sample: Vec<f64> = Vec::new();
        let total: usize = self.days.iter().map(|(q, _)| q.len()).sum();
        let stride = (total / 200_000).max(1);
        let mut i = 0usize;
        for (q_tilde, _) in &self.days {
            for &q in q_tilde {
                if i % stride == 0 {
                    sample.push(q.ln());
                }
                i += 1;
            }
        }
        sample.sort_unstable_by(f64::total_cmp);
        if sample.is_empty() {
            return vec![0.0; n_bins + 1];
        }
        let quantile = |p: f64| sample[((sample.len() - 1) as f64 * p).round() as usize];
        let lo = quantile(0.005);
        let hi = quantile(0.995).max(lo + 1e-12);
        (0..=n_bins)
            .map(|b| lo + (hi - lo) * b as f64 / n_bins as f64)
            .collect()
    }
}

fn bin_of(edges: &[f64], q_tilde: f64) -> usize {
    let n_bins = edges.len() - 1;
    let lq = q_tilde.ln();
    if lq <= edges[0] {
        return 0;
    }
    let b = edges[1..].partition_point(|&e| e < lq);
    b.min(n_bins - 1)
}

/// `C(tau) = E[s_t s_{t+tau}]`, pairs pooled across the day subsequences.
fn pooled_autocorr(days: &[Vec<i8>], lags: &[usize]) -> Vec<(usize, f64)> {
    lags.par_iter()
        .map(|&tau| {
            let mut sum = 0i64;
            let mut count = 0u64;
            for signs in days {
                if signs.len() <= tau {
                    continue;
                }
                let mut day_sum = 0i32;
                for i in 0..signs.len() - tau {
                    day_sum += i32::from(signs[i] * signs[i + tau]);
                }
                sum += i64::from(day_sum);
                count += (signs.len() - tau) as u64;
            }
            (tau, if count == 0 { f64::NAN } else { sum as f64 / count as f64 })
        })
        .collect()
}

fn fit_gamma(curve: &[(usize, f64)]) -> Option<ScalingFit> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|&&(tau, c)| {
            let t = tau as f64;
            t >= GAMMA_FIT_RANGE.0 && t <= GAMMA_FIT_RANGE.1 && c > 0.0 && c.is_finite()
        })
        .map(|&(tau, c)| (tau as f64, c))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    log_log_fit(&xs, &ys, GAMMA_FIT_RANGE)
        .ok()
        .map(|mut fit| {
            // report the memory exponent gamma > 0 for a decaying C
            fit.exponent = -fit.exponent;
            fit
        })
}

/// One-shot interface over a set of days.
pub fn sign_autocorr_by_volume(
    days: &[&[ChildOrderEvent]],
    n_bins: usize,
    lags: &[usize],
) -> VolumeBinnedAutocorr {
    let mut acc = AutocorrAccumulator::new();
    for d in days {
        acc.add_day(d);
    }
    acc.finalize(n_bins, lags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::diffusion::log_spaced_lags;

    fn event(sign: i8, volume: f64) -> ChildOrderEvent {
        ChildOrderEvent {
            timestamp: 0.0,
            volume,
            sign,
            rank: 1,
            parent_id: 0.0,
            beta_q: 0.25,
        }
    }

    #[test]
    fn all_buys_give_unit_autocorrelation() {
        let day: Vec<ChildOrderEvent> = (0..5_000).map(|_| event(1, 1.0)).collect();
        let res = sign_autocorr_by_volume(&[&day], 4, &[1, 10, 100]);
        for &(_, c) in &res.unconditional {
            assert_eq!(c, 1.0);
        }
        // all volume identical: every event lands in one bin
        let populated: Vec<_> = res.bins.iter().filter(|b| b.count > 0).collect();
        assert_eq!(populated.len(), 1);
        for &(_, c) in &populated[0].curve {
            assert_eq!(c, 1.0);
        }
    }

    #[test]
    fn small_bins_reported_empty() {
        let day: Vec<ChildOrderEvent> = (0..500).map(|_| event(1, 1.0)).collect();
        let res = sign_autocorr_by_volume(&[&day], 4, &[1, 10]);
        assert!(res.bins.iter().all(|b| b.curve.is_empty() && b.gamma.is_none()));
    }

    #[test]
    fn iid_signs_have_no_memory() {
        use crate::seeding::{day_rng, Purpose};
        use rand::Rng;
        let mut rng = day_rng(51, Purpose::FlowGen, 0);
        let days: Vec<Vec<ChildOrderEvent>> = (0..5)
            .map(|_| {
                (0..40_000)
                    .map(|_| {
                        event(
                            if rng.random::<bool>() { 1 } else { -1 },
                            (rng.random::<f64>() * 3.0).exp(),
                        )
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[ChildOrderEvent]> = days.iter().map(|d| d.as_slice()).collect();
        let res = sign_autocorr_by_volume(&refs, 4, &log_spaced_lags(1000, 8));
        let n = 200_000f64;
        for &(tau, c) in &res.unconditional {
            if tau >= 1 {
                assert!(c.abs() < 5.0 / n.sqrt() * 3.0, "tau {tau}: {c}");
            }
        }
    }

    #[test]
    fn bin_lag_is_internal_to_the_bin() {
        // alternating large/small volumes with signs periodic at lag 2 in
        // the full stream: within each volume bin the signs are constant,
        // so bin-internal C(1) = 1 even though full-stream C(1) = -1.
        let mut day = Vec::new();
        for i in 0..4_000 {
            let (sign, volume) = if i % 2 == 0 { (1, 10.0) } else { (-1, 0.1) };
            day.push(event(sign, volume));
        }
        let res = sign_autocorr_by_volume(&[&day], 2, &[1]);
        let populated: Vec<_> = res.bins.iter().filter(|b| b.count >= 1_000).collect();
        assert_eq!(populated.len(), 2);
        for b in populated {
            assert_eq!(b.curve[0].1, 1.0);
        }
        assert_eq!(res.unconditional[0].1, -1.0);
    }
}
