//! θ₁ line search and SCNU transfer curves.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, ReliabilityMode};
use crate::code::{CodeSpec, TannerGraph};
use crate::decoder::{Algorithm, ScnuConfig};
use crate::error::{Error, Result};
use crate::sim::{BerPoint, SimConfig, Simulator};

/// `0.1, 0.2, ..., 4.0`.
pub fn default_theta1_grid() -> Vec<f64> {
    (1..=40).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub theta1_grid: Vec<f64>,
    /// θ₂ = gamma · θ₁.
    pub gamma: f64,
    pub levels: usize,
    /// Eb/N0 (dB) at which BER is evaluated; the reliability is frozen here too.
    pub design_ebn0_db: f64,
    /// Code, iterations, stopping rule, seed and workers. Its grid and
    /// reliability mode are ignored.
    pub base: SimConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            theta1_grid: default_theta1_grid(),
            gamma: 1.0,
            levels: 8,
            design_ebn0_db: 2.8,
            base: SimConfig::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.theta1_grid.is_empty() {
            return Err(Error::Config("theta1 grid is empty".into()));
        }
        if self.theta1_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config("theta1 grid values must be positive".into()));
        }
        if self.theta1_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("theta1 grid must be strictly increasing".into()));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.levels == 0 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if !self.design_ebn0_db.is_finite() {
            return Err(Error::Config("design Eb/N0 must be finite".into()));
        }
        Ok(())
    }

    /// Simulation config for one grid value.
    pub fn sim_config(&self, theta1: f64) -> SimConfig {
        let mut cfg = self.base.clone();
        cfg.ebn0_grid = vec![self.design_ebn0_db];
        cfg.reliability = ReliabilityMode::Fixed { design_ebn0_db: self.design_ebn0_db };
        let mut scnu = cfg.decoder.scnu.take().unwrap_or_default();
        scnu.levels = self.levels;
        scnu.theta1 = theta1;
        scnu.theta2 = self.gamma * theta1;
        cfg.decoder.algorithm = if self.levels == 1 { Algorithm::Elena } else { Algorithm::MlElena };
        cfg.decoder.scnu = Some(scnu);
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub theta1: f64,
    pub theta2: f64,
    pub ber: BerPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Index into `points` of the lowest BER.
    pub best: usize,
}

impl SweepResult {
    pub fn best_point(&self) -> &SweepPoint {
        &self.points[self.best]
    }
}

/// Index of the smallest BER; ties go to the earlier (smaller θ₁) entry.
pub fn argmin_ber(points: &[SweepPoint]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        if best.is_none_or(|b| p.ber.ber < points[b].ber.ber) {
            best = Some(i);
        }
    }
    best
}

/// Evaluates BER at the design point for every θ₁ in the grid.
///
/// Every grid value sees the same noise realizations.
pub fn sweep_theta1(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let (graph, spec) = config.base.code.load()?;
    sweep_theta1_on(config, Arc::new(graph), spec, |_| {})
}

/// Like [`sweep_theta1`] on a preloaded graph, reporting each point as it completes.
pub fn sweep_theta1_on(
    config: &SweepConfig,
    graph: Arc<TannerGraph>,
    spec: CodeSpec,
    mut on_point: impl FnMut(&SweepPoint),
) -> Result<SweepResult> {
    config.validate()?;
    let mut points = Vec::with_capacity(config.theta1_grid.len());
    for &theta1 in &config.theta1_grid {
        let cfg = config.sim_config(theta1);
        let sim = Simulator::with_graph(cfg, graph.clone(), spec)?;
        let params = ChannelParams::new(config.design_ebn0_db, sim.rate(), sim.config().reliability)?;
        let ber = sim.run_point_with(0, &params)?;
        let scnu = sim.config().decoder.scnu.as_ref().expect("set by sim_config");
        let p = SweepPoint { theta1, theta2: scnu.theta2, ber };
        on_point(&p);
        points.push(p);
    }
    let best = argmin_ber(&points).expect("grid is nonempty");
    Ok(SweepResult { points, best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferPoint {
    pub min_mag: f64,
    pub raw_output: f64,
}

/// Raw SCNU output magnitude (before the memory neuron) over `grid`.
pub fn characterize_scnu(config: &ScnuConfig, grid: &[f64]) -> Result<Vec<TransferPoint>> {
    config.validate()?;
    if let Some(m) = grid.iter().find(|m| m.is_nan() || **m < 0.0) {
        return Err(Error::Config(format!("magnitudes must be non-negative, got {m}")));
    }
    Ok(grid
        .iter()
        .map(|&m| TransferPoint { min_mag: m, raw_output: config.raw_magnitude(m) })
        .collect())
}

/// `n` evenly spaced points on `[0, max]`, both ends included.
pub fn linear_grid(max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| max * k as f64 / (n - 1) as f64).collect(),
    }
}
