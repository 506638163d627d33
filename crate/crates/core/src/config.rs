//! Simulation configuration, scenario presets and config hashing.
//!
//! The five scenarios toggle three independent switches:
//!
//! * `C`/`NC` — cross-metaorder sign correlation on/off (`gamma_meta`),
//! * `VD`/`NVD` — volume dependence of the tail/decay exponents on/off
//!   (`lambda`, `lambda_p`),
//! * `VF`/`NVF` — child-volume fluctuations on/off (lognormal vs `q = 1`).
//!
//! A preset fills every field with the standard operating point; individual
//! fields can then be overridden before validation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{flowgen, Error, Result};

/// Floor offset for the size-tail exponent: `mu_q >= 1 + MU_EPS`.
pub const MU_EPS: f64 = 0.05;
/// Gap below 1/2 for the decay exponent: `beta_q <= 1/2 - BETA_EPS`.
pub const BETA_EPS: f64 = 1e-3;

/// The five simulated configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "NC-NVD-NVF")]
    NcNvdNvf,
    #[serde(rename = "NC-NVD-VF")]
    NcNvdVf,
    #[serde(rename = "NC-VD-VF")]
    NcVdVf,
    #[serde(rename = "C-NVD-VF")]
    CNvdVf,
    #[serde(rename = "C-VD-VF")]
    CVdVf,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::NcNvdNvf,
        Scenario::NcNvdVf,
        Scenario::NcVdVf,
        Scenario::CNvdVf,
        Scenario::CVdVf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::NcNvdNvf => "NC-NVD-NVF",
            Scenario::NcNvdVf => "NC-NVD-VF",
            Scenario::NcVdVf => "NC-VD-VF",
            Scenario::CNvdVf => "C-NVD-VF",
            Scenario::CVdVf => "C-VD-VF",
        }
    }

    /// Cross-metaorder sign correlation enabled (`C`).
    pub fn correlated(self) -> bool {
        matches!(self, Scenario::CNvdVf | Scenario::CVdVf)
    }

    /// Volume dependence of `mu_q`, `beta_q` enabled (`VD`).
    pub fn volume_dependent(self) -> bool {
        matches!(self, Scenario::NcVdVf | Scenario::CVdVf)
    }

    /// Child-volume fluctuations enabled (`VF`); otherwise `q = 1` exactly.
    pub fn volume_fluctuations(self) -> bool {
        !matches!(self, Scenario::NcNvdNvf)
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown scenario `{s}`; valid options: {}",
                    Scenario::ALL.map(|sc| sc.name()).join(", ")
                ))
            })
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full parameter set for a simulation run.
///
/// Rates are per unit of simulated time; `m` and `sigma_l` parameterize the
/// lognormal child volume; `mu_m`/`beta_m` are the tail and decay exponents
/// at the typical volume `q = e^m`; `lambda`/`lambda_p` are the slopes of
/// `mu_q` and `beta_q` in `ln q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub scenario: Scenario,
    /// Metaorder initiation rate.
    pub nu: f64,
    /// Within-metaorder participation (child execution) rate.
    pub phi: f64,
    /// Lognormal location of child volume.
    pub m: f64,
    /// Lognormal scale of child volume.
    pub sigma_l: f64,
    /// Size-tail exponent at the typical volume.
    pub mu_m: f64,
    /// Impact-decay exponent at the typical volume.
    pub beta_m: f64,
    /// Slope of `mu_q` in `ln q`.
    pub lambda: f64,
    /// Slope of `beta_q` in `ln q` (decay is slower for larger child orders).
    pub lambda_p: f64,
    /// Cross-metaorder sign-correlation amplitude.
    pub gamma_meta: f64,
    /// Cross-metaorder sign-correlation decay exponent.
    pub gamma_cross: f64,
    /// Propagator amplitude.
    pub theta: f64,
    /// Rank offset in the execution factor of the kernel.
    pub n0: f64,
    /// Propagator time constant; `None` derives `1 / (nu * phi * s_mean)`.
    pub tau0: Option<f64>,
    /// Power-law truncation of the metaorder size distribution.
    pub s_max: u64,
    /// Lag cutoff of the cross-metaorder sign covariance.
    pub t_cut: u64,
    /// Trading-day duration in time units.
    pub day_length: f64,
    /// Number of independent days.
    pub n_days: u32,
    /// Master RNG seed.
    pub seed: u64,
}

/// Day length tuned so the standard operating point (`nu = 1.5e-3`,
/// `phi = 2e-3`, `mu_m = 1.5`, `s_max = 1e4`) averages ~5e4 trades per day
/// when the size-tail exponent is flat (`lambda = 0`).
pub const DAY_LENGTH_NVD: f64 = 1.727e7;
/// Same target with volume-dependent exponents (`lambda * sigma_l^2 = 1/8`,
/// `m = 3`); the broader `mu_q` mix raises the mean metaorder size.
pub const DAY_LENGTH_VD: f64 = 1.480e7;

impl SimulationConfig {
    /// Standard operating point for a scenario.
    pub fn preset(scenario: Scenario) -> Self {
        let vd = scenario.volume_dependent();
        let lambda = if vd { 0.125 } else { 0.0 };
        SimulationConfig {
            scenario,
            nu: 1.5e-3,
            phi: 2e-3,
            m: 3.0,
            sigma_l: if scenario.volume_fluctuations() { 1.0 } else { 0.0 },
            mu_m: 1.5,
            beta_m: 0.25,
            lambda,
            lambda_p: 2.0 * lambda,
            gamma_meta: if scenario.correlated() { 0.1 } else { 0.0 },
            gamma_cross: 0.5,
            theta: 1.0,
            n0: 3.0,
            tau0: None,
            s_max: 10_000,
            t_cut: 1_000,
            day_length: if vd { DAY_LENGTH_VD } else { DAY_LENGTH_NVD },
            n_days: 100,
            seed: 0,
        }
    }

    /// Force parameters consistent with the scenario switches: `NC` zeroes
    /// `gamma_meta`, `NVD` zeroes `lambda`/`lambda_p`, `NVF` zeroes
    /// `sigma_l` (child volume becomes exactly 1).
    pub fn normalized(mut self) -> Self {
        if !self.scenario.correlated() {
            self.gamma_meta = 0.0;
        }
        if !self.scenario.volume_dependent() {
            self.lambda = 0.0;
            self.lambda_p = 0.0;
        }
        if !self.scenario.volume_fluctuations() {
            self.sigma_l = 0.0;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(msg.to_string()))
            }
        }
        check(self.nu > 0.0, "nu must be > 0")?;
        check(self.phi > 0.0, "phi must be > 0")?;
        check(self.sigma_l >= 0.0, "sigma_l must be >= 0")?;
        check(self.m >= 0.0, "m must be >= 0")?;
        check(
            self.mu_m > 1.0 && self.mu_m < 2.0,
            "mu_m must lie in (1, 2)",
        )?;
        check(self.lambda >= 0.0, "lambda must be >= 0")?;
        check(self.lambda_p >= 0.0, "lambda_p must be >= 0")?;
        check(
            (0.0..1.0).contains(&self.gamma_meta),
            "gamma_meta must lie in [0, 1)",
        )?;
        check(
            self.gamma_meta == 0.0 || self.gamma_cross > 0.0,
            "gamma_cross must be > 0 when gamma_meta > 0",
        )?;
        check(self.theta > 0.0, "theta must be > 0")?;
        check(self.n0 > 0.0, "n0 must be > 0")?;
        if let Some(t0) = self.tau0 {
            check(t0 > 0.0, "tau0 must be > 0")?;
        }
        check(self.s_max >= 1, "s_max must be >= 1")?;
        check(self.t_cut >= 1, "t_cut must be >= 1")?;
        check(self.day_length > 0.0, "day_length must be > 0")?;
        check(self.n_days >= 1, "n_days must be >= 1")?;
        Ok(())
    }

    /// Propagator time constant: the configured override, or the derived
    /// value `1 / (nu * phi * s_mean)` with `s_mean` the analytic mean of
    /// the truncated size distribution at the typical tail exponent.
    pub fn effective_tau0(&self) -> f64 {
        self.tau0.unwrap_or_else(|| {
            let s_mean = flowgen::expected_metaorder_size(self.mu_m, self.s_max);
            flowgen::derive_tau0(self.nu, self.phi, s_mean)
        })
    }

    /// Canonical key-value rendering; the basis of [`Self::config_hash`].
    pub fn canonical_string(&self) -> String {
        format!(
            "scenario={};nu={:?};phi={:?};m={:?};sigma_l={:?};mu_m={:?};beta_m={:?};\
             lambda={:?};lambda_p={:?};gamma_meta={:?};gamma_cross={:?};theta={:?};\
             n0={:?};tau0={:?};s_max={};t_cut={};day_length={:?};n_days={};seed={}",
            self.scenario,
            self.nu,
            self.phi,
            self.m,
            self.sigma_l,
            self.mu_m,
            self.beta_m,
            self.lambda,
            self.lambda_p,
            self.gamma_meta,
            self.gamma_cross,
            self.theta,
            self.n0,
            self.tau0,
            self.s_max,
            self.t_cut,
            self.day_length,
            self.n_days,
            self.seed,
        )
    }

    /// Short stable hash of the full configuration, embedded in every
    /// emitted CSV and in the day caches.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
