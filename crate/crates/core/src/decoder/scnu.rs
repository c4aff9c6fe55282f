//! Spiking check-node update (SCNU).
//!
//! An SCNU with `L` levels maps the minimum extrinsic magnitude `m` to the
//! staircase `theta2 * |{l in 1..=L : m > l * theta1}|`, applies the parity
//! sign and feeds the result through a leaky-integrator memory neuron whose
//! potential is the outgoing message. `L = 1` is the single-threshold
//! decoder.
//!
//! Two backends produce the staircase:
//!
//! * `Functional` evaluates the indicator sum directly.
//! * `SnnEmulation` runs one LIF neuron per (level, extrinsic input) driven by
//!   `gain * (l * theta1 - |L|)` for `substeps` steps, ORs their spikes in a
//!   combining LIF neuron, and lets level `l` contribute `theta2` only if the
//!   combining neuron stayed silent.
//!
//! An input neuron starting from rest under constant drive `x` reaches
//! `x * c_k` after `k` steps, where `c_k` is the unit-drive response. It
//! therefore fires within `S` steps iff `x * max_k c_k > v_th`, i.e. iff
//! `|L| < l * theta1 - eps` with `eps = v_th / (gain * max_k c_k)`. Inputs
//! further than `eps` from every threshold are resolved identically by both
//! backends; see [`ScnuConfig::resolvable_margin`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neuron::{Dynamics, LiState, LifParams, LifState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ScnuBackend {
    #[default]
    Functional,
    SnnEmulation,
}

/// Whether the inner LIF neurons of the emulation backend keep their state
/// from one decoding iteration to the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InnerMemory {
    #[default]
    StatelessPerIteration,
    FullyStateful,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScnuConfig {
    pub levels: usize,
    pub theta1: f64,
    pub theta2: f64,
    /// Output memory neuron.
    pub li_params: LifParams,
    /// Memory neuron steps per decoding iteration; the SCNU output is held
    /// constant over them and the potential is read after the last one.
    pub memory_steps: usize,
    /// Inner spiking neurons of the emulation backend.
    pub lif_params: LifParams,
    pub backend: ScnuBackend,
    pub substeps: usize,
    pub gain: f64,
    pub inner_memory: InnerMemory,
}

impl Default for ScnuConfig {
    fn default() -> Self {
        Self {
            levels: 1,
            theta1: 1.0,
            theta2: 1.0,
            li_params: LifParams::default(),
            memory_steps: 3,
            lif_params: LifParams::default(),
            backend: ScnuBackend::Functional,
            substeps: 3,
            gain: 10.0,
            inner_memory: InnerMemory::StatelessPerIteration,
        }
    }
}

impl ScnuConfig {
    pub fn new(levels: usize, theta1: f64, theta2: f64) -> Self {
        Self { levels, theta1, theta2, ..Self::default() }
    }

    /// `theta2 = gamma * theta1`.
    pub fn coupled(levels: usize, theta1: f64, gamma: f64) -> Self {
        Self::new(levels, theta1, gamma * theta1)
    }

    pub fn gamma(&self) -> f64 {
        self.theta2 / self.theta1
    }

    pub fn with_backend(mut self, backend: ScnuBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::Config("SCNU needs at least one level".into()));
        }
        if !(self.theta1.is_finite() && self.theta1 > 0.0) {
            return Err(Error::Config(format!("theta1 must be positive, got {}", self.theta1)));
        }
        if !(self.theta2.is_finite() && self.theta2 > 0.0) {
            return Err(Error::Config(format!("theta2 must be positive, got {}", self.theta2)));
        }
        self.li_params.validate()?;
        if self.memory_steps == 0 {
            return Err(Error::Config("memory_steps must be at least 1".into()));
        }
        if self.backend == ScnuBackend::SnnEmulation {
            self.lif_params.validate()?;
            if self.substeps == 0 {
                return Err(Error::Config("emulation needs at least one substep".into()));
            }
            if !(self.gain.is_finite() && self.gain > 0.0) {
                return Err(Error::Config(format!("gain must be positive, got {}", self.gain)));
            }
        }
        Ok(())
    }

    /// Number of levels whose threshold `l * theta1` lies strictly below
    /// `min_mag`.
    pub fn active_levels(&self, min_mag: f64) -> usize {
        (1..=self.levels)
            .take_while(|&l| min_mag > l as f64 * self.theta1)
            .count()
    }

    /// Staircase magnitude before the sign and the memory neuron.
    pub fn raw_magnitude(&self, min_mag: f64) -> f64 {
        self.active_levels(min_mag) as f64 * self.theta2
    }

    /// Half-width of the band around each threshold where the emulation
    /// backend may disagree with the functional one. Infinite when the
    /// input neurons cannot fire within `substeps` steps at all.
    pub fn resolvable_margin(&self) -> f64 {
        let d = self.lif_params.dynamics();
        let peak = d
            .unit_drive_response(self.substeps)
            .into_iter()
            .fold(0.0, f64::max);
        if peak <= 0.0 {
            f64::INFINITY
        } else {
            (d.v_th - d.v_rest) / (self.gain * peak)
        }
    }
}

/// Functional SCNU for one directed edge: staircase, sign, memory neuron.
pub fn scnu_functional(min_mag: f64, beta: f64, config: &ScnuConfig, memory: &mut LiState) -> f64 {
    let raw = beta * config.raw_magnitude(min_mag);
    memory.step_held(&config.li_params.dynamics(), raw, config.memory_steps)
}

/// Inner neurons of one emulated SCNU: `levels * inputs` input neurons
/// (level-major) followed by `levels` combining neurons.
#[derive(Debug, Clone, PartialEq)]
pub struct SnnBank {
    pub inputs: usize,
    pub neurons: Vec<LifState>,
}

impl SnnBank {
    pub fn new(levels: usize, inputs: usize, rest: &Dynamics) -> Self {
        Self {
            inputs,
            neurons: vec![LifState::at_rest(rest); levels * (inputs + 1)],
        }
    }

    pub fn reset(&mut self, rest: &Dynamics) {
        self.neurons.iter_mut().for_each(|n| n.reset(rest));
    }
}

/// Emulates the spiking staircase on neuron banks.
#[derive(Debug, Clone)]
pub struct SnnEmulator {
    levels: usize,
    theta1: f64,
    theta2: f64,
    gain: f64,
    substeps: usize,
    dynamics: Dynamics,
    /// Synaptic weight into the combining neuron: large enough that one
    /// spike pushes it over threshold on the following step.
    or_weight: f64,
}

impl SnnEmulator {
    pub fn new(config: &ScnuConfig) -> Self {
        let dynamics = config.lif_params.dynamics();
        let or_weight = 2.0 * (dynamics.v_th - dynamics.v_rest).abs().max(1.0) / dynamics.decay_m;
        Self {
            levels: config.levels,
            theta1: config.theta1,
            theta2: config.theta2,
            gain: config.gain,
            substeps: config.substeps,
            dynamics,
            or_weight,
        }
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    /// Staircase magnitude for the extrinsic magnitudes `mags`, using (and
    /// updating) the neurons in `bank`. The caller resets the bank when the
    /// neurons should start from rest.
    pub fn raw_magnitude(&self, mags: &[f64], bank: &mut SnnBank) -> f64 {
        debug_assert_eq!(mags.len(), bank.inputs);
        let d = &self.dynamics;
        let n_in = bank.inputs;
        let (inputs, combiners) = bank.neurons.split_at_mut(self.levels * n_in);
        let mut silent = 0usize;
        for (level, (neurons, combiner)) in inputs
            .chunks_mut(n_in.max(1))
            .zip(combiners.iter_mut())
            .enumerate()
            .take(self.levels)
        {
            let threshold = (level + 1) as f64 * self.theta1;
            let mut fired = false;
            // One extra step lets a spike from the last input step reach the
            // combining neuron's potential.
            for t in 0..=self.substeps {
                let mut spikes = 0usize;
                if t < self.substeps {
                    for (neuron, &m) in neurons.iter_mut().zip(mags) {
                        if neuron.step(d, self.gain * (threshold - m)) {
                            spikes += 1;
                        }
                    }
                }
                fired |= combiner.step(d, self.or_weight * spikes as f64);
            }
            if !fired {
                silent += 1;
            }
        }
        silent as f64 * self.theta2
    }
}

/// Emulated SCNU for one directed edge, with fresh inner neurons.
pub fn scnu_snn(extrinsic: &[f64], config: &ScnuConfig, memory: &mut LiState) -> f64 {
    let emulator = SnnEmulator::new(config);
    let mags: Vec<f64> = extrinsic.iter().map(|x| x.abs()).collect();
    let mut bank = SnnBank::new(config.levels, mags.len(), emulator.dynamics());
    let raw = crate::decoder::check::sign_product(extrinsic) * emulator.raw_magnitude(&mags, &mut bank);
    memory.step_held(&config.li_params.dynamics(), raw, config.memory_steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_examples() {
        let c = ScnuConfig::new(8, 0.7, 0.7);
        // 0.7, 1.4 and 2.1 lie below 2.3.
        assert_eq!(c.active_levels(2.3), 3);
        assert_eq!(c.raw_magnitude(2.3), 3.0 * 0.7);
        let elena = ScnuConfig::new(1, 1.5, 1.5);
        assert_eq!(elena.raw_magnitude(1.2), 0.0);
        assert_eq!(elena.raw_magnitude(1.6), 1.5);
        // Saturation at L * theta2.
        assert_eq!(c.raw_magnitude(100.0), 8.0 * 0.7);
    }

    #[test]
    fn threshold_tie_does_not_count() {
        let c = ScnuConfig::new(4, 0.5, 1.0);
        for l in 1..=4 {
            let at = l as f64 * 0.5;
            assert_eq!(c.active_levels(at), l - 1);
        }
        assert_eq!(ScnuConfig::new(1, 1.5, 2.0).raw_magnitude(1.5), 0.0);
    }

    #[test]
    fn functional_applies_sign_and_memory() {
        let c = ScnuConfig { memory_steps: 1, ..ScnuConfig::new(2, 1.0, 0.5) };
        let mut mem = LiState::default();
        // Memory output lags the staircase by one step.
        assert_eq!(scnu_functional(2.5, -1.0, &c, &mut mem), 0.0);
        let second = scnu_functional(2.5, -1.0, &c, &mut mem);
        assert!((second + 1.0 * (-1.0f64).exp()).abs() < 1e-15);

        // Three held steps from rest reach d * (1 + 2d).
        let c = ScnuConfig::new(2, 1.0, 0.5);
        let mut mem = LiState::default();
        let d = (-1.0f64).exp();
        let out = scnu_functional(2.5, 1.0, &c, &mut mem);
        assert!((out - d * (1.0 + 2.0 * d)).abs() < 1e-15);
        assert!(ScnuConfig { memory_steps: 0, ..c }.validate().is_err());
    }

    #[test]
    fn default_margin_for_three_substeps() {
        let c = ScnuConfig::default();
        let d = (-1.0f64).exp();
        let expect = 1.0 / (10.0 * d * (1.0 + 2.0 * d));
        assert!((c.resolvable_margin() - expect).abs() < 1e-15);
        let one = ScnuConfig { substeps: 1, ..ScnuConfig::default() };
        assert_eq!(one.resolvable_margin(), f64::INFINITY);
    }

    #[test]
    fn emulation_far_from_thresholds() {
        let c = ScnuConfig::new(4, 1.0, 0.5).with_backend(ScnuBackend::SnnEmulation);
        let em = SnnEmulator::new(&c);
        let mut bank = SnnBank::new(4, 3, em.dynamics());
        // Everything far above: every level silent, full plateau.
        assert_eq!(em.raw_magnitude(&[14.0, 15.0, 20.0], &mut bank), 2.0);
        bank.reset(em.dynamics());
        // One input far below theta1 kills every level.
        assert_eq!(em.raw_magnitude(&[14.0, 0.1, 20.0], &mut bank), 0.0);
        bank.reset(em.dynamics());
        // min = 2.5: levels 1 and 2 pass, 3 and 4 fire.
        assert_eq!(em.raw_magnitude(&[2.5, 9.0, 9.0], &mut bank), 1.0);
    }

    #[test]
    fn single_substep_never_fires() {
        let c = ScnuConfig { substeps: 1, ..ScnuConfig::new(2, 1.0, 1.0) };
        let em = SnnEmulator::new(&c);
        let mut bank = SnnBank::new(2, 2, em.dynamics());
        assert_eq!(em.raw_magnitude(&[0.0, 0.0], &mut bank), 2.0);
    }

    #[test]
    fn emulation_edge_of_margin() {
        let c = ScnuConfig::new(1, 1.0, 1.0).with_backend(ScnuBackend::SnnEmulation);
        let eps = c.resolvable_margin();
        let em = SnnEmulator::new(&c);
        let run = |m: f64| {
            let mut bank = SnnBank::new(1, 1, em.dynamics());
            em.raw_magnitude(&[m], &mut bank)
        };
        assert_eq!(run(1.0 - eps - 1e-9), 0.0);
        assert_eq!(run(1.0 - eps + 1e-9), 1.0);
        assert_eq!(run(1.0 + 1e-9), 1.0);
    }

    #[test]
    fn validation() {
        assert!(ScnuConfig::new(0, 1.0, 1.0).validate().is_err());
        assert!(ScnuConfig::new(1, 0.0, 1.0).validate().is_err());
        assert!(ScnuConfig::new(1, 1.0, -1.0).validate().is_err());
        assert!(ScnuConfig::coupled(16, 0.95, 0.5).validate().is_ok());
        assert_eq!(ScnuConfig::coupled(16, 0.95, 0.5).theta2, 0.475);
    }
}
