//! Generalized order-flow imbalance over trade-time windows.
//!
//! A day of `N` events is cut into non-overlapping windows of `T`
//! consecutive trades. Window `w` contributes the imbalance
//! `I^a = sum sign * volume^a` over its `T` events and the price change
//! `Delta = p[start + T] - p[start]`. Only windows whose closing price
//! exists are kept, so every `(a, T)` cell of a grid shares identical
//! window boundaries.

use rayon::prelude::*;

use crate::flowgen::ChildOrderEvent;
use crate::impact::PriceSeries;
use crate::stats::fit::{log_log_fit, ScalingFit};
use crate::Result;

/// Start indices of the complete windows of length `t` over `n` events
/// (the closing price `p[start + t]` must exist).
pub fn window_starts(n: usize, t: usize) -> impl Iterator<Item = usize> {
    let n_windows = if n > t { (n - 1) / t } else { 0 };
    (0..n_windows).map(move |w| w * t)
}

/// Per-window generalized imbalance `I^a_T` for one day.
pub fn imbalance_windows(events: &[ChildOrderEvent], a: f64, t: usize) -> Vec<f64> {
    window_starts(events.len(), t)
        .map(|start| {
            events[start..start + t]
                .iter()
                .map(|ev| f64::from(ev.sign) * ev.volume.powf(a))
                .sum()
        })
        .collect()
}

/// Pooled per-window imbalances and price changes on an `(a, T)` grid.
///
/// Windows from successive days are appended in day order, so the `w`-th
/// entry of every cell with the same `T` refers to the same window.
#[derive(Debug, Clone)]
pub struct ImbalanceGrid {
    pub a_values: Vec<f64>,
    pub t_values: Vec<usize>,
    /// `cells[a_index * t_values.len() + t_index]` = per-window `I^a_T`.
    cells: Vec<Vec<f64>>,
    /// `deltas[t_index]` = per-window price change.
    deltas: Vec<Vec<f64>>,
}

impl ImbalanceGrid {
    pub fn new(a_values: Vec<f64>, t_values: Vec<usize>) -> Self {
        let cells = vec![Vec::new(); a_values.len() * t_values.len()];
        let deltas = vec![Vec::new(); t_values.len()];
        ImbalanceGrid {
            a_values,
            t_values,
            cells,
            deltas,
        }
    }

    /// The standard analysis grid: `a` from -0.5 to 3.0 in steps of 0.25,
    /// `T` in powers of two from 8 to 8192.
    pub fn standard() -> Self {
        let a_values: Vec<f64> = (0..=14).map(|i| -0.5 + 0.25 * i as f64).collect();
        let t_values: Vec<usize> = (3..=13).map(|k| 1usize << k).collect();
        ImbalanceGrid::new(a_values, t_values)
    }

    /// Accumulate one day's windows.
    pub fn add_day(&mut self, events: &[ChildOrderEvent], prices: &PriceSeries) {
        assert_eq!(
            events.len(),
            prices.prices.len(),
            "events and prices must describe the same day"
        );
        let n = events.len();
        let ln_q: Vec<f64> = events.iter().map(|ev| ev.volume.ln()).collect();
        let signs: Vec<f64> = events.iter().map(|ev| f64::from(ev.sign)).collect();

        // deltas once per T
        for (ti, &t) in self.t_values.iter().enumerate() {
            for start in window_starts(n, t) {
                self.deltas[ti].push(prices.prices[start + t] - prices.prices[start]);
            }
        }

        // imbalances per (a, T); a-rows are independent
        let n_t = self.t_values.len();
        let t_values = &self.t_values;
        let a_values = &self.a_values;
        self.cells
            .par_chunks_mut(n_t)
            .enumerate()
            .for_each(|(ai, row)| {
                let a = a_values[ai];
                let weighted: Vec<f64> = if a == 0.0 {
                    signs.clone()
                } else {
                    ln_q.iter()
                        .zip(&signs)
                        .map(|(&lq, &s)| s * (a * lq).exp())
                        .collect()
                };
                for (ti, &t) in t_values.iter().enumerate() {
                    for start in window_starts(n, t) {
                        row[ti].push(weighted[start..start + t].iter().sum());
                    }
                }
            });
    }

    pub fn a_index(&self, a: f64) -> Option<usize> {
        self.a_values.iter().position(|&v| (v - a).abs() < 1e-12)
    }

    pub fn t_index(&self, t: usize) -> Option<usize> {
        self.t_values.iter().position(|&v| v == t)
    }

    /// Per-window imbalances for cell `(a, T)`.
    pub fn cell(&self, a_index: usize, t_index: usize) -> &[f64] {
        &self.cells[a_index * self.t_values.len() + t_index]
    }

    /// Per-window price changes for `T`.
    pub fn delta(&self, t_index: usize) -> &[f64] {
        &self.deltas[t_index]
    }

    /// Empirical `2n`-th moment of `I^a_T` per `T`.
    pub fn imbalance_moments(&self, a_index: usize, n: u32) -> Vec<f64> {
        (0..self.t_values.len())
            .map(|ti| moment_2n(self.cell(a_index, ti), n))
            .collect()
    }
}

/// Mean of `v^(2n)` over a window population.
pub fn moment_2n(values: &[f64], n: u32) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values
        .iter()
        .map(|&v| v.powi(2 * n as i32))
        .sum::<f64>()
        / values.len() as f64
}

/// Log-log fit of the empirical `2n`-th moment against `T`.
///
/// `windows_per_t[i]` holds the window population at `t_values[i]`. The fit
/// needs at least 4 usable `T` values spanning 1.5 decades.
pub fn moment_scaling(
    t_values: &[usize],
    windows_per_t: &[&[f64]],
    n: u32,
    fit_range: (f64, f64),
) -> Result<ScalingFit> {
    assert_eq!(t_values.len(), windows_per_t.len());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, windows) in t_values.iter().zip(windows_per_t) {
        let tf = t as f64;
        if tf < fit_range.0 || tf > fit_range.1 || windows.is_empty() {
            continue;
        }
        xs.push(tf);
        ys.push(moment_2n(windows, n));
    }
    if xs.len() < 4 || xs.last().unwrap() / xs[0] < 10f64.powf(1.5) {
        return Err(crate::Error::FitFailed(format!(
            "moment scaling needs >= 4 T values over >= 1.5 decades, got {:?}",
            xs
        )));
    }
    log_log_fit(&xs, &ys, fit_range)
}
