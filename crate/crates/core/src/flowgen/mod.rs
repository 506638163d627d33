//! Metaorder and child-order flow generation.
//!
//! A trading day is built in four steps: metaorder start times arrive as a
//! Poisson process of rate `nu`; each metaorder draws a child volume `q`, a
//! sign (optionally correlated across metaorders), per-volume exponents
//! `mu_q`/`beta_q` and a size `s`; child executions are spaced by
//! exponential gaps of rate `phi`; finally all child orders are merged into
//! one globally time-sorted tape.

mod sampling;
mod signs;

pub use sampling::{expected_metaorder_size, sample_child_volume, sample_metaorder_size};
pub use signs::generate_correlated_signs;

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::config::{SimulationConfig, BETA_EPS, MU_EPS};
use crate::seeding::{day_rng, Purpose};
use crate::{Error, Result};

/// One parent order. The start time is unique within a day and doubles as
/// the metaorder identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Metaorder {
    pub t_start: f64,
    pub sign: i8,
    /// Child volume, constant within the metaorder.
    pub q: f64,
    /// Number of child orders.
    pub s: u32,
    pub mu_q: f64,
    pub beta_q: f64,
    /// Strictly increasing execution times; `child_times[0] == t_start`.
    pub child_times: Vec<f64>,
}

/// One executed trade of the merged tape. `parent_id` is the parent's start
/// time, which identifies the metaorder within its day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChildOrderEvent {
    pub timestamp: f64,
    pub volume: f64,
    pub sign: i8,
    /// 1-based position within the parent metaorder.
    pub rank: u32,
    pub parent_id: f64,
    pub beta_q: f64,
}

impl ChildOrderEvent {
    /// Start time of the parent metaorder.
    pub fn t_start(&self) -> f64 {
        self.parent_id
    }
}

/// One generated day: the metaorders and the merged, time-sorted tape.
#[derive(Debug, Clone)]
pub struct DayFlow {
    pub day: u32,
    pub metaorders: Vec<Metaorder>,
    pub events: Vec<ChildOrderEvent>,
}

/// Base exponents at `q = 1`: `mu_1 = mu_m - lambda * m`,
/// `beta_1 = beta_m + lambda_p * m`.
pub fn calibrate_base_exponents(cfg: &SimulationConfig) -> (f64, f64) {
    (
        cfg.mu_m - cfg.lambda * cfg.m,
        cfg.beta_m + cfg.lambda_p * cfg.m,
    )
}

/// Size-tail exponent at child volume `q`, floored just above 1.
pub fn mu_of_q(q: f64, mu_1: f64, lambda: f64) -> Result<f64> {
    if q < 1.0 {
        return Err(Error::Domain(format!("volume q = {q} must be >= 1")));
    }
    Ok((mu_1 + lambda * q.ln()).max(1.0 + MU_EPS))
}

/// Impact-decay exponent at child volume `q`, clamped to `[0, 1/2)`.
/// A clamped value of 0 encodes permanent impact.
pub fn beta_of_q(q: f64, beta_1: f64, lambda_p: f64) -> Result<f64> {
    if q < 1.0 {
        return Err(Error::Domain(format!("volume q = {q} must be >= 1")));
    }
    Ok((beta_1 - lambda_p * q.ln()).clamp(0.0, 0.5 - BETA_EPS))
}

/// Propagator time constant `1 / (nu * phi * s_mean)`.
pub fn derive_tau0(nu: f64, phi: f64, mean_size: f64) -> f64 {
    1.0 / (nu * phi * mean_size)
}

/// Metaorder start times: strictly increasing Poisson arrivals of rate `nu`
/// on `[0, day_length)`. Start times serve as identifiers and are emitted at
/// microsecond resolution, so uniqueness is enforced at that granularity
/// (colliding draws are re-drawn).
pub fn sample_start_times<R: Rng + ?Sized>(
    rng: &mut R,
    nu: f64,
    day_length: f64,
) -> Vec<f64> {
    let gap = Exp::new(nu).expect("nu > 0");
    let mut times = Vec::new();
    let mut seen = HashSet::new();
    let mut t = 0.0f64;
    loop {
        t += gap.sample(rng);
        if t >= day_length {
            break;
        }
        let micros = (t * 1e6).round() as i64;
        if seen.insert(micros) {
            times.push(t);
        }
    }
    times
}

/// Child execution times: `t_start` followed by `s - 1` exponential gaps of
/// rate `phi`. Strictly increasing.
pub fn schedule_children<R: Rng + ?Sized>(
    rng: &mut R,
    t_start: f64,
    s: u32,
    phi: f64,
) -> Vec<f64> {
    let gap = Exp::new(phi).expect("phi > 0");
    let mut times = Vec::with_capacity(s as usize);
    times.push(t_start);
    let mut t = t_start;
    for _ in 1..s {
        loop {
            let next = t + gap.sample(rng);
            if next > t {
                t = next;
                break;
            }
        }
        times.push(t);
    }
    times
}

/// Generate one day of flow under the configured scenario.
///
/// Metaorders started within the day complete their schedule even past
/// `day_length`; the merged tape is sorted by `(timestamp, parent_id)`.
pub fn build_day_flow(cfg: &SimulationConfig, day: u32) -> Result<DayFlow> {
    cfg.validate()?;
    let cfg = cfg.clone().normalized();
    if cfg.s_max > u64::from(u32::MAX) {
        return Err(Error::InvalidConfig("s_max exceeds u32 range".into()));
    }

    let mut rng = day_rng(cfg.seed, Purpose::FlowGen, day);

    let starts = sample_start_times(&mut rng, cfg.nu, cfg.day_length);
    let signs = generate_correlated_signs(
        &mut rng,
        starts.len(),
        cfg.gamma_meta,
        cfg.gamma_cross,
        cfg.t_cut,
    )?;

    let (mu_1, beta_1) = calibrate_base_exponents(&cfg);
    let mut metaorders = Vec::with_capacity(starts.len());
    for (&t_start, &sign) in starts.iter().zip(&signs) {
        let q = if cfg.scenario.volume_fluctuations() {
            sample_child_volume(&mut rng, cfg.m, cfg.sigma_l)
        } else {
            1.0
        };
        let mu_q = mu_of_q(q, mu_1, cfg.lambda)?;
        let beta_q = beta_of_q(q, beta_1, cfg.lambda_p)?;
        let s = sample_metaorder_size(&mut rng, mu_q, cfg.s_max)? as u32;
        let child_times = schedule_children(&mut rng, t_start, s, cfg.phi);
        metaorders.push(Metaorder {
            t_start,
            sign,
            q,
            s,
            mu_q,
            beta_q,
            child_times,
        });
    }

    let total: usize = metaorders.iter().map(|mo| mo.s as usize).sum();
    let mut events = Vec::with_capacity(total);
    for mo in &metaorders {
        for (k, &t) in mo.child_times.iter().enumerate() {
            events.push(ChildOrderEvent {
                timestamp: t,
                volume: mo.q,
                sign: mo.sign,
                rank: k as u32 + 1,
                parent_id: mo.t_start,
                beta_q: mo.beta_q,
            });
        }
    }
    events.sort_unstable_by(|a, b| {
        a.timestamp
            .total_cmp(&b.timestamp)
            .then(a.parent_id.total_cmp(&b.parent_id))
    });

    Ok(DayFlow {
        day,
        metaorders,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;

    fn small_config(scenario: Scenario) -> SimulationConfig {
        let mut cfg = SimulationConfig::preset(scenario);
        cfg.day_length = 2e5;
        cfg.seed = 99;
        cfg
    }

    #[test]
    fn base_exponent_calibration() {
        let mut cfg = SimulationConfig::preset(Scenario::CVdVf);
        cfg.mu_m = 1.5;
        cfg.lambda = 0.125;
        cfg.m = 3.0;
        cfg.beta_m = 0.25;
        cfg.lambda_p = 0.25;
        let (mu_1, beta_1) = calibrate_base_exponents(&cfg);
        assert!((mu_1 - 1.125).abs() < 1e-12);
        assert!((beta_1 - 1.0).abs() < 1e-12);

        cfg.lambda = 0.0;
        cfg.lambda_p = 0.0;
        let (mu_1, beta_1) = calibrate_base_exponents(&cfg);
        assert_eq!(mu_1, cfg.mu_m);
        assert_eq!(beta_1, cfg.beta_m);
    }

    #[test]
    fn exponent_maps() {
        assert_eq!(mu_of_q(1.0, 1.125, 0.125).unwrap(), 1.125);
        let mu = mu_of_q(6f64.exp(), 1.125, 0.125).unwrap();
        assert!((mu - 1.875).abs() < 1e-12);
        // floor engages
        assert_eq!(mu_of_q(1.0, 0.3, 0.0).unwrap(), 1.0 + MU_EPS);
        assert!(mu_of_q(0.5, 1.125, 0.125).is_err());

        assert_eq!(beta_of_q(7.0, 0.25, 0.0).unwrap(), 0.25);
        let b = beta_of_q(3f64.exp(), 1.0, 0.25).unwrap();
        assert!((b - 0.25).abs() < 1e-12);
        // upper clamp engages at q = 1 with beta_1 = 1
        assert_eq!(beta_of_q(1.0, 1.0, 0.25).unwrap(), 0.5 - BETA_EPS);
        // zero encodes permanent impact
        assert_eq!(beta_of_q(100.0, 0.25, 0.25).unwrap(), 0.0);
        assert!(beta_of_q(0.99, 0.25, 0.0).is_err());
    }

    #[test]
    fn tau0_arithmetic() {
        assert_eq!(derive_tau0(1.0, 1.0, 1.0), 1.0);
        let t = derive_tau0(1.5e-3, 2e-3, 2.0);
        assert!((derive_tau0(1.5e-3, 2e-3, 4.0) - t / 2.0).abs() < 1e-9);
    }

    #[test]
    fn start_times_strictly_increasing_in_range() {
        let mut rng = day_rng(7, Purpose::FlowGen, 0);
        let times = sample_start_times(&mut rng, 1.5e-3, 2.88e4);
        for w in times.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(times.iter().all(|&t| (0.0..2.88e4).contains(&t)));
    }

    #[test]
    fn start_time_count_matches_poisson_mean() {
        // Oracle: expected count nu * day_length.
        let nu = 1.5e-3;
        let day_length = 2.88e4;
        let n_days = 10_000;
        let mut total = 0usize;
        for day in 0..n_days {
            let mut rng = day_rng(8, Purpose::FlowGen, day);
            total += sample_start_times(&mut rng, nu, day_length).len();
        }
        let mean = total as f64 / n_days as f64;
        let expected = nu * day_length;
        assert!(
            (mean - expected).abs() / expected < 0.02,
            "mean {mean} vs {expected}"
        );
    }

    #[test]
    fn start_times_unique_at_microsecond_resolution() {
        for day in 0..1_000 {
            let mut rng = day_rng(9, Purpose::FlowGen, day);
            let times = sample_start_times(&mut rng, 5e-3, 1e5);
            let mut seen = HashSet::new();
            for &t in &times {
                assert!(seen.insert((t * 1e6).round() as i64));
            }
        }
    }

    #[test]
    fn schedule_shape_and_mean_gap() {
        let mut rng = day_rng(10, Purpose::FlowGen, 0);
        assert_eq!(schedule_children(&mut rng, 5.0, 1, 2e-3), vec![5.0]);

        let phi = 2e-3;
        let mut sum = 0.0;
        let mut count = 0u64;
        for _ in 0..1_000 {
            let times = schedule_children(&mut rng, 0.0, 1_000, phi);
            assert_eq!(times[0], 0.0);
            for w in times.windows(2) {
                assert!(w[1] > w[0]);
                sum += w[1] - w[0];
                count += 1;
            }
        }
        let mean = sum / count as f64;
        assert!((mean - 500.0).abs() / 500.0 < 0.02, "mean gap {mean}");
    }

    #[test]
    fn day_flow_is_sorted_with_consistent_ranks() {
        let flow = build_day_flow(&small_config(Scenario::CVdVf), 0).unwrap();
        let total: usize = flow.metaorders.iter().map(|m| m.s as usize).sum();
        assert_eq!(flow.events.len(), total);
        for w in flow.events.windows(2) {
            assert!(w[1].timestamp >= w[0].timestamp);
        }
        // per-parent ranks are consecutive with non-decreasing timestamps
        use std::collections::HashMap;
        let mut last: HashMap<i64, (u32, f64)> = HashMap::new();
        for ev in &flow.events {
            let key = (ev.parent_id * 1e6).round() as i64;
            let entry = last.entry(key).or_insert((0, f64::NEG_INFINITY));
            assert_eq!(ev.rank, entry.0 + 1);
            assert!(ev.timestamp >= entry.1);
            *entry = (ev.rank, ev.timestamp);
        }
    }

    #[test]
    fn determinism_bit_identical_days() {
        let cfg = small_config(Scenario::CVdVf);
        let a = build_day_flow(&cfg, 3).unwrap();
        let b = build_day_flow(&cfg, 3).unwrap();
        assert_eq!(a.events, b.events);
        assert_eq!(a.metaorders, b.metaorders);
        let c = build_day_flow(&cfg, 4).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn scenario_consistency() {
        let flow = build_day_flow(&small_config(Scenario::NcNvdNvf), 0).unwrap();
        assert!(flow.events.iter().all(|e| e.volume == 1.0));

        let flow = build_day_flow(&small_config(Scenario::NcNvdVf), 0).unwrap();
        let cfg = small_config(Scenario::NcNvdVf);
        assert!(flow
            .metaorders
            .iter()
            .all(|m| m.mu_q == cfg.mu_m && m.beta_q == cfg.beta_m));
        assert!(flow.metaorders.iter().any(|m| m.volume_ne_one()));
    }

    impl Metaorder {
        fn volume_ne_one(&self) -> bool {
            self.q != 1.0
        }
    }

    #[test]
    fn sign_balance_over_many_metaorders() {
        let mut cfg = small_config(Scenario::CVdVf);
        cfg.day_length = 2e6;
        let mut sum = 0i64;
        let mut n = 0u64;
        for day in 0..40 {
            let flow = build_day_flow(&cfg, day).unwrap();
            for mo in &flow.metaorders {
                sum += i64::from(mo.sign);
                n += 1;
            }
        }
        assert!(n > 100_000, "need >= 1e5 metaorders, got {n}");
        let mean = sum as f64 / n as f64;
        assert!(mean.abs() < 3.0 / (n as f64).sqrt() * 3.0, "mean sign {mean}");
    }

    #[test]
    fn two_single_child_metaorders_merge_in_order() {
        // hand-built flow: the merge logic alone
        let mos = vec![
            Metaorder {
                t_start: 2.0,
                sign: -1,
                q: 1.0,
                s: 1,
                mu_q: 1.5,
                beta_q: 0.25,
                child_times: vec![2.0],
            },
            Metaorder {
                t_start: 1.0,
                sign: 1,
                q: 1.0,
                s: 1,
                mu_q: 1.5,
                beta_q: 0.25,
                child_times: vec![1.0],
            },
        ];
        let mut events: Vec<ChildOrderEvent> = mos
            .iter()
            .flat_map(|mo| {
                mo.child_times.iter().enumerate().map(|(k, &t)| ChildOrderEvent {
                    timestamp: t,
                    volume: mo.q,
                    sign: mo.sign,
                    rank: k as u32 + 1,
                    parent_id: mo.t_start,
                    beta_q: mo.beta_q,
                })
            })
            .collect();
        events.sort_unstable_by(|a, b| {
            a.timestamp
                .total_cmp(&b.timestamp)
                .then(a.parent_id.total_cmp(&b.parent_id))
        });
        assert_eq!(events[0].timestamp, 1.0);
        assert_eq!(events[1].timestamp, 2.0);
        assert_eq!(events[0].rank, 1);
        assert_eq!(events[1].rank, 1);
    }
}
