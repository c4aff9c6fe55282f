//! Discrete-time leaky integrate-and-fire (LIF) and leaky integrator (LI)
//! neurons.
//!
//! One step maps `(v, i)` to
//!
//! ```text
//! v' = (v + i) * exp(-dt / tau_m)
//! i' = i * exp(-dt / tau_s) + input
//! ```
//!
//! so an input first shows up in the potential returned by the following step.
//! A LIF neuron fires when `v'` strictly exceeds `v_th` and then resets `v'`
//! to `v_rest`; the LI neuron never fires.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time constants are in milliseconds; potentials are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifParams {
    pub tau_m: f64,
    pub tau_s: f64,
    pub dt: f64,
    pub v_th: f64,
    pub v_rest: f64,
}

impl Default for LifParams {
    fn default() -> Self {
        Self {
            tau_m: 1.0,
            tau_s: 1.0,
            dt: 1.0,
            v_th: 1.0,
            v_rest: 0.0,
        }
    }
}

impl LifParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.tau_m) && ok(self.tau_s) && ok(self.dt)) {
            return Err(Error::Config(format!(
                "neuron time constants must be positive and finite (tau_m={}, tau_s={}, dt={})",
                self.tau_m, self.tau_s, self.dt
            )));
        }
        if !self.v_th.is_finite() || !self.v_rest.is_finite() {
            return Err(Error::Config("v_th and v_rest must be finite".into()));
        }
        Ok(())
    }

    pub fn dynamics(&self) -> Dynamics {
        Dynamics {
            decay_m: (-self.dt / self.tau_m).exp(),
            decay_s: (-self.dt / self.tau_s).exp(),
            v_th: self.v_th,
            v_rest: self.v_rest,
        }
    }
}

/// Precomputed decay factors for the hot loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub decay_m: f64,
    pub decay_s: f64,
    pub v_th: f64,
    pub v_rest: f64,
}

impl Dynamics {
    /// Potential reached after `k` steps of constant unit drive starting
    /// from rest, ignoring the threshold. Index 0 is the initial state.
    pub fn unit_drive_response(&self, steps: usize) -> Vec<f64> {
        let mut state = LiState::default();
        let mut out = Vec::with_capacity(steps + 1);
        out.push(state.v);
        for _ in 0..steps {
            out.push(state.step(self, 1.0));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LifState {
    pub v: f64,
    pub i: f64,
}

impl LifState {
    pub fn at_rest(d: &Dynamics) -> Self {
        Self { v: d.v_rest, i: 0.0 }
    }

    /// Advances one step and reports whether the neuron fired.
    #[inline]
    pub fn step(&mut self, d: &Dynamics, weighted_input: f64) -> bool {
        let candidate = (self.v + self.i) * d.decay_m;
        self.i = self.i * d.decay_s + weighted_input;
        if candidate > d.v_th {
            self.v = d.v_rest;
            true
        } else {
            self.v = candidate;
            false
        }
    }

    pub fn reset(&mut self, d: &Dynamics) {
        *self = Self::at_rest(d);
    }
}

/// Leaky integrator: LIF dynamics with firing disabled. The potential is
/// the neuron's output.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LiState {
    pub v: f64,
    pub i: f64,
}

impl LiState {
    #[inline]
    pub fn step(&mut self, d: &Dynamics, weighted_input: f64) -> f64 {
        self.v = (self.v + self.i) * d.decay_m;
        self.i = self.i * d.decay_s + weighted_input;
        self.v
    }

    /// Holds `weighted_input` for `steps` steps and returns the final potential.
    #[inline]
    pub fn step_held(&mut self, d: &Dynamics, weighted_input: f64, steps: usize) -> f64 {
        for _ in 0..steps {
            self.step(d, weighted_input);
        }
        self.v
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

pub fn lif_step(state: LifState, params: &LifParams, weighted_input: f64) -> (LifState, bool) {
    let mut s = state;
    let spiked = s.step(&params.dynamics(), weighted_input);
    (s, spiked)
}

pub fn li_step(state: LiState, params: &LifParams, weighted_input: f64) -> LiState {
    let mut s = state;
    s.step(&params.dynamics(), weighted_input);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: f64 = 0.36787944117144233; // e^-1

    #[test]
    fn pure_decay() {
        let p = LifParams::default();
        let (s, spiked) = lif_step(LifState { v: 2.0, i: 0.0 }, &p, 0.0);
        assert!(!spiked);
        assert_eq!(s.v, 2.0 * (-1.0f64).exp());
    }

    #[test]
    fn current_lands_one_step_late() {
        let p = LifParams::default();
        let (s1, f1) = lif_step(LifState::default(), &p, 10.0);
        assert!(!f1);
        assert_eq!((s1.v, s1.i), (0.0, 10.0));
        let (s2, f2) = lif_step(s1, &p, 0.0);
        // candidate = 10 e^-1 ~ 3.679 > 1
        assert!(f2);
        assert_eq!(s2.v, 0.0);
        assert!((s2.i - 10.0 * D).abs() < 1e-12);
    }

    #[test]
    fn exact_threshold_does_not_fire() {
        // decay 0.5 makes the candidate exactly representable: (2 + 0) * 0.5 = v_th.
        let d = Dynamics { decay_m: 0.5, decay_s: 0.5, v_th: 1.0, v_rest: 0.0 };
        let mut s = LifState { v: 2.0, i: 0.0 };
        assert!(!s.step(&d, 0.0));
        assert_eq!(s.v, 1.0);
        let mut above = LifState { v: 2.0, i: 1e-12 };
        assert!(above.step(&d, 0.0));
    }

    #[test]
    fn decay_law() {
        let d = LifParams::default().dynamics();
        let mut s = LifState { v: 0.9, i: 0.0 };
        for k in 1..=30 {
            s.step(&d, 0.0);
            let expect = 0.9 * (-(k as f64)).exp();
            assert!((s.v - expect).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn li_fixed_point() {
        let d = LifParams::default().dynamics();
        let mut s = LiState::default();
        for _ in 0..200 {
            s.step(&d, 1.0);
        }
        let fixed = D / ((1.0 - D) * (1.0 - D));
        assert!((s.v - fixed).abs() < 1e-12);
        assert!((fixed - 0.9206).abs() < 1e-4);
    }

    #[test]
    fn li_single_pulse_shape() {
        // v[k] = u (k-1) d^(k-1) counting the pulse step as k = 1.
        let d = LifParams::default().dynamics();
        let u = 3.0;
        let mut s = LiState::default();
        s.step(&d, u);
        for k in 2..20 {
            let v = s.step(&d, 0.0);
            let expect = u * (k - 1) as f64 * D.powi(k - 1);
            assert!((v - expect).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn reset_is_idempotent() {
        let d = LifParams::default().dynamics();
        let mut s = LifState { v: 0.4, i: 2.0 };
        s.reset(&d);
        let once = s;
        s.reset(&d);
        assert_eq!(s, once);
        let mut fresh = LifState::default();
        assert_eq!(s.step(&d, 1.5), fresh.step(&d, 1.5));
        assert_eq!(s, fresh);
    }

    #[test]
    fn invalid_params() {
        let p = LifParams { tau_m: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
        assert!(LifParams::default().validate().is_ok());
    }

    #[test]
    fn unit_drive_response() {
        let d = LifParams::default().dynamics();
        let r = d.unit_drive_response(3);
        assert_eq!(r[0], 0.0);
        assert_eq!(r[1], 0.0);
        assert!((r[2] - D).abs() < 1e-15);
        assert!((r[3] - D * (1.0 + 2.0 * D)).abs() < 1e-15);
    }
}
