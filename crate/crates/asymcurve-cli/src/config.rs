//! Run configuration shared by every subcommand, and its digest.
//!
//! A report is only comparable to another report if both embed the same
//! config digest, so the digest covers every field of the config,
//! including the output paths it records. Serialization order is the
//! struct order below and serde_json's float formatting is canonical
//! shortest-roundtrip, so the digest is deterministic across runs and
//! platforms with IEEE doubles.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

pub const DEFAULT_DELTA_EXPONENTS: std::ops::RangeInclusive<i32> = 3..=10;

/// Numeric tolerances for the verification suite. These absorb floating
/// point and discretization error, not modelling slack; the asymptotic
/// slack factor lives in `RunConfig::asym_slack`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Quadrature refinement target for the length integrals.
    pub quadrature: f64,
    /// Additive headroom on deviation bounds.
    pub deviation: f64,
    /// Relative slack on length-ratio lower bounds (discretization loss).
    pub ratio_slack: f64,
    /// Headroom for identities that hold exactly up to float roundoff.
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature: 1e-8,
            deviation: 1e-9,
            ratio_slack: 0.05,
            exact: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Primary block exponent for the suite; stacks are built to depth `n`.
    pub n: u32,
    /// Depth cap for the assembled curve.
    pub depth_cap: u32,
    /// Largest block exponent of the assembled curve.
    pub n_max: u32,
    pub samples_per_bump: u32,
    pub level1_samples: usize,
    pub budget: u64,
    pub seed: u64,
    /// Chord-filter ladder, as fractions of the curve diameter, descending.
    pub deltas: Vec<f64>,
    /// Uniform-approximability tolerance (per-piece ratio <= 1 + epsilon).
    pub epsilon: f64,
    pub ua_n_cap: u64,
    pub pair_budget: u64,
    /// Endpoint-grid stride for pair scans; 0 selects one per curve size.
    pub stride: usize,
    /// Factor relaxing the asymptotic-constant bounds (checks L3-L9): those
    /// constants are claimed for sufficiently large n, and the suite runs at
    /// desk scale. Raw margins are always reported against the stated bound.
    pub asym_slack: f64,
    pub tolerances: Tolerances,
    /// Curve output path, when a subcommand wrote one.
    pub out: Option<PathBuf>,
    /// Report output path, when one was requested.
    pub report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 5,
            depth_cap: 5,
            n_max: 5,
            samples_per_bump: asymcurve::construction::DEFAULT_SAMPLES_PER_BUMP,
            level1_samples: asymcurve::construction::DEFAULT_LEVEL1_SAMPLES,
            budget: asymcurve::construction::DEFAULT_SAMPLE_BUDGET,
            seed: 7,
            deltas: DEFAULT_DELTA_EXPONENTS.map(|i| 0.5f64.powi(i)).collect(),
            epsilon: 0.01,
            ua_n_cap: 1 << 22,
            pair_budget: 2_000_000,
            stride: 0,
            asym_slack: 1.5,
            tolerances: Tolerances::default(),
            out: None,
            report: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.n >= 2 && self.n <= 30, "n must be in 2..=30");
        anyhow::ensure!(self.depth_cap >= 1, "depth_cap must be positive");
        anyhow::ensure!(self.n_max >= 1, "n_max must be positive");
        anyhow::ensure!(self.budget > 0, "budget must be positive");
        anyhow::ensure!(self.epsilon > 0.0, "epsilon must be positive");
        anyhow::ensure!(self.asym_slack >= 1.0, "asym_slack must be >= 1");
        anyhow::ensure!(
            !self.deltas.is_empty() && self.deltas.iter().all(|d| *d > 0.0),
            "deltas must be positive"
        );
        Ok(())
    }

    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let out = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for b in out {
            use std::fmt::Write;
            write!(hex, "{b:02x}").unwrap();
        }
        hex
    }

    pub fn build_options(&self) -> asymcurve::BuildOptions {
        asymcurve::BuildOptions {
            samples_per_bump: self.samples_per_bump,
            level1_samples: self.level1_samples,
            budget: self.budget,
        }
    }
}

/// Sample budget honoring the ASYMCURVE_BUDGET override. The environment
/// wins over flags so a deployment cap cannot be bypassed per invocation.
pub fn budget_with_env(flag: u64) -> anyhow::Result<u64> {
    match std::env::var("ASYMCURVE_BUDGET") {
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => anyhow::bail!("ASYMCURVE_BUDGET is not unicode: {e}"),
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map_err(|e| anyhow::anyhow!("ASYMCURVE_BUDGET '{raw}': {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = RunConfig::default();
        let b = RunConfig::default();
        assert_eq!(a.digest(), b.digest());
        let c = RunConfig {
            seed: 8,
            ..RunConfig::default()
        };
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn default_config_validates() {
        RunConfig::default().validate().unwrap();
    }
}
