//! Flooding-schedule message passing over a [`TannerGraph`].
//!
//! Messages live in two per-edge arrays in the graph's canonical
//! (check-node-major) edge order. One iteration updates every check-to-
//! variable message from the current variable-to-check messages, then every
//! variable-to-check message from the new check messages; no update reads a
//! value written in the same half-iteration.

pub mod check;
pub mod scnu;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::code::TannerGraph;
use crate::error::{Error, Result};
use crate::neuron::{Dynamics, LiState};

pub use check::{ms_cn_update, nms_cn_update, oms_cn_update, spa_cn_update, MAG_MAX};
pub use scnu::{scnu_functional, scnu_snn, InnerMemory, ScnuBackend, ScnuConfig, SnnBank, SnnEmulator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Spa,
    Ms,
    Oms,
    Nms,
    Elena,
    MlElena,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Spa,
        Algorithm::Ms,
        Algorithm::Oms,
        Algorithm::Nms,
        Algorithm::Elena,
        Algorithm::MlElena,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Spa => "spa",
            Algorithm::Ms => "ms",
            Algorithm::Oms => "oms",
            Algorithm::Nms => "nms",
            Algorithm::Elena => "elena",
            Algorithm::MlElena => "ml-elena",
        }
    }

    pub fn uses_scnu(self) -> bool {
        matches!(self, Algorithm::Elena | Algorithm::MlElena)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    /// Zero iterations means a hard decision on the channel LLRs.
    pub iterations: usize,
    pub nms_lambda: f64,
    pub oms_offset: f64,
    pub scnu: Option<ScnuConfig>,
    pub early_stop: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Nms,
            iterations: 20,
            nms_lambda: 0.75,
            oms_offset: 0.5,
            scnu: None,
            early_stop: false,
        }
    }
}

impl DecoderConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self { algorithm, ..Self::default() }
    }

    pub fn spa() -> Self {
        Self::new(Algorithm::Spa)
    }

    pub fn ms() -> Self {
        Self::new(Algorithm::Ms)
    }

    pub fn nms(lambda: f64) -> Self {
        Self { nms_lambda: lambda, ..Self::new(Algorithm::Nms) }
    }

    pub fn oms(offset: f64) -> Self {
        Self { oms_offset: offset, ..Self::new(Algorithm::Oms) }
    }

    pub fn elena(theta1: f64, theta2: f64) -> Self {
        Self {
            scnu: Some(ScnuConfig::new(1, theta1, theta2)),
            ..Self::new(Algorithm::Elena)
        }
    }

    pub fn ml_elena(levels: usize, theta1: f64, theta2: f64) -> Self {
        Self {
            scnu: Some(ScnuConfig::new(levels, theta1, theta2)),
            ..Self::new(Algorithm::MlElena)
        }
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.algorithm {
            Algorithm::Nms if !(self.nms_lambda > 0.0 && self.nms_lambda <= 1.0) => Err(Error::Config(
                format!("nms_lambda must lie in (0, 1], got {}", self.nms_lambda),
            )),
            Algorithm::Oms if !(self.oms_offset >= 0.0 && self.oms_offset.is_finite()) => Err(
                Error::Config(format!("oms_offset must be non-negative, got {}", self.oms_offset)),
            ),
            Algorithm::Elena | Algorithm::MlElena => {
                let scnu = self.scnu.as_ref().ok_or_else(|| {
                    Error::Config(format!("{} needs an [scnu] section", self.algorithm))
                })?;
                if self.algorithm == Algorithm::Elena && scnu.levels != 1 {
                    return Err(Error::Config(format!(
                        "elena uses a single level, got levels = {}",
                        scnu.levels
                    )));
                }
                scnu.validate()
            }
            _ => Ok(()),
        }
    }

    /// Short label such as `nms`, `ml-elena-L16`.
    pub fn label(&self) -> String {
        match (&self.scnu, self.algorithm) {
            (Some(s), Algorithm::MlElena) => format!("ml-elena-L{}", s.levels),
            _ => self.algorithm.name().to_string(),
        }
    }
}

/// Per-edge messages in canonical edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMessages {
    /// Variable-to-check messages.
    pub v2c: Vec<f64>,
    /// Check-to-variable messages.
    pub c2v: Vec<f64>,
}

impl EdgeMessages {
    pub fn zeros(n_edges: usize) -> Self {
        Self { v2c: vec![0.0; n_edges], c2v: vec![0.0; n_edges] }
    }
}

/// Neuron state of every SCNU in a decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct ScnuState {
    /// One memory neuron per directed check-to-variable edge.
    pub memory: Vec<LiState>,
    /// Inner neurons per edge, kept only by the fully stateful emulation.
    pub inner: Vec<SnnBank>,
}

impl ScnuState {
    fn new(graph: &TannerGraph, config: &ScnuConfig) -> Self {
        let stateful = config.backend == ScnuBackend::SnnEmulation
            && config.inner_memory == InnerMemory::FullyStateful;
        let inner = if stateful {
            let rest = config.lif_params.dynamics();
            graph
                .edges()
                .map(|(j, _)| SnnBank::new(config.levels, graph.cn_neighbors(j).len() - 1, &rest))
                .collect()
        } else {
            Vec::new()
        };
        Self { memory: vec![LiState::default(); graph.n_edges()], inner }
    }

    pub fn reset(&mut self, rest: &Dynamics) {
        self.memory.iter_mut().for_each(LiState::reset);
        self.inner.iter_mut().for_each(|b| b.reset(rest));
    }

    pub fn is_at_rest(&self, rest: &Dynamics) -> bool {
        self.memory.iter().all(|m| *m == LiState::default())
            && self
                .inner
                .iter()
                .all(|b| b.neurons.iter().all(|n| n.v == rest.v_rest && n.i == 0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub output_llr: Vec<f64>,
    pub iterations_run: usize,
    /// All parity checks satisfied by `bits`.
    pub converged: bool,
}

impl DecodeResult {
    pub fn bit_errors_vs_zero(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }
}

/// Extrinsic variable-node message: `L_i` plus the other incoming check
/// messages. The check messages are summed first.
pub fn vn_update(channel_llr: f64, other_c2v: &[f64]) -> f64 {
    channel_llr + other_c2v.iter().sum::<f64>()
}

/// A-posteriori LLR: `L_i` plus every incoming check message.
pub fn output_llr(channel_llr: f64, all_c2v: &[f64]) -> f64 {
    channel_llr + all_c2v.iter().sum::<f64>()
}

/// `1` iff the LLR is not positive.
pub fn hard_decision(llr: f64) -> u8 {
    u8::from(llr <= 0.0)
}

struct ScnuRuntime {
    config: ScnuConfig,
    memory_dynamics: Dynamics,
    emulator: Option<SnnEmulator>,
    state: ScnuState,
    scratch_bank: Option<SnnBank>,
}

/// A decoder instance bound to one graph and configuration. It owns its
/// message and neuron buffers, so give each worker its own clone.
pub struct Decoder {
    graph: Arc<TannerGraph>,
    config: DecoderConfig,
    msgs: EdgeMessages,
    scnu: Option<ScnuRuntime>,
    scratch: Vec<f64>,
}

impl Clone for Decoder {
    fn clone(&self) -> Self {
        // Buffers are rebuilt; only the binding to graph and config matters.
        Self::new(self.graph.clone(), self.config.clone()).expect("validated on construction")
    }
}

impl Decoder {
    pub fn new(graph: Arc<TannerGraph>, config: DecoderConfig) -> Result<Self> {
        config.validate()?;
        if let Some(j) = (0..graph.n_cns()).find(|&j| graph.cn_neighbors(j).len() < 2) {
            return Err(Error::Degenerate(format!(
                "check node {j} has degree {}",
                graph.cn_neighbors(j).len()
            )));
        }
        if let Some(i) = (0..graph.n_vns()).find(|&i| graph.vn_edges(i).is_empty()) {
            return Err(Error::Degenerate(format!("variable node {i} has no checks")));
        }
        let scnu = if config.algorithm.uses_scnu() {
            let sc = config.scnu.clone().expect("validated");
            let emulator = (sc.backend == ScnuBackend::SnnEmulation).then(|| SnnEmulator::new(&sc));
            Some(ScnuRuntime {
                memory_dynamics: sc.li_params.dynamics(),
                state: ScnuState::new(&graph, &sc),
                scratch_bank: None,
                emulator,
                config: sc,
            })
        } else {
            None
        };
        let n_edges = graph.n_edges();
        Ok(Self {
            graph,
            config,
            msgs: EdgeMessages::zeros(n_edges),
            scnu,
            scratch: Vec::new(),
        })
    }

    pub fn graph(&self) -> &Arc<TannerGraph> {
        &self.graph
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn messages(&self) -> &EdgeMessages {
        &self.msgs
    }

    pub fn messages_mut(&mut self) -> &mut EdgeMessages {
        &mut self.msgs
    }

    pub fn scnu_state(&self) -> Option<&ScnuState> {
        self.scnu.as_ref().map(|s| &s.state)
    }

    fn check_len(&self, llr: &[f64]) -> Result<()> {
        if llr.len() != self.graph.n_vns() {
            return Err(Error::LengthMismatch { expected: self.graph.n_vns(), found: llr.len() });
        }
        Ok(())
    }

    /// Loads `v2c = L_i` on every edge, clears `c2v` and the SCNU neurons.
    pub fn initialize(&mut self, llr: &[f64]) -> Result<()> {
        self.check_len(llr)?;
        for (m, &i) in self.msgs.v2c.iter_mut().zip(self.graph.edge_vns()) {
            *m = llr[i];
        }
        self.msgs.c2v.iter_mut().for_each(|m| *m = 0.0);
        self.reset();
        Ok(())
    }

    /// Clears all neuron memory.
    pub fn reset(&mut self) {
        if let Some(rt) = &mut self.scnu {
            let rest = rt.config.lif_params.dynamics();
            rt.state.reset(&rest);
        }
    }

    /// Check-node half-iteration: recomputes every `c2v` from `v2c`.
    pub fn check_update(&mut self) {
        let graph = &*self.graph;
        let EdgeMessages { v2c, c2v } = &mut self.msgs;
        let cfg = &self.config;
        for j in 0..graph.n_cns() {
            let range = graph.cn_edge_range(j);
            let input = &v2c[range.clone()];
            let out = &mut c2v[range.clone()];
            match cfg.algorithm {
                Algorithm::Spa => check::spa_all(input, out, &mut self.scratch),
                Algorithm::Ms => check::min_sum_all(input, out, |_, m| m),
                Algorithm::Nms => {
                    let lambda = cfg.nms_lambda;
                    check::min_sum_all(input, out, |_, m| lambda * m)
                }
                Algorithm::Oms => {
                    let offset = cfg.oms_offset;
                    check::min_sum_all(input, out, |_, m| (m - offset).max(0.0))
                }
                Algorithm::Elena | Algorithm::MlElena => {
                    let rt = self.scnu.as_mut().expect("scnu runtime");
                    scnu_check(rt, range.start, input, out, &mut self.scratch);
                }
            }
        }
    }

    /// Variable-node half-iteration: recomputes every `v2c` from `c2v`.
    pub fn variable_update(&mut self, llr: &[f64]) {
        let graph = &*self.graph;
        let EdgeMessages { v2c, c2v } = &mut self.msgs;
        for (i, &l) in llr.iter().enumerate() {
            let edges = graph.vn_edges(i);
            for &e in edges {
                let others: f64 = edges.iter().filter(|&&o| o != e).map(|&o| c2v[o]).sum();
                v2c[e] = l + others;
            }
        }
    }

    /// A-posteriori LLRs from the current check messages.
    pub fn output_llrs(&self, llr: &[f64]) -> Vec<f64> {
        llr.iter()
            .enumerate()
            .map(|(i, &l)| l + self.graph.vn_edges(i).iter().map(|&e| self.msgs.c2v[e]).sum::<f64>())
            .collect()
    }

    fn hard_decisions(&self, llr: &[f64]) -> (Vec<f64>, Vec<u8>) {
        let out = self.output_llrs(llr);
        let bits = out.iter().map(|&l| hard_decision(l)).collect();
        (out, bits)
    }

    /// Decodes one received word. Neuron memory is cleared afterwards.
    pub fn decode(&mut self, llr: &[f64]) -> Result<DecodeResult> {
        self.initialize(llr)?;
        let mut iterations_run = 0;
        for _ in 0..self.config.iterations {
            self.check_update();
            self.variable_update(llr);
            iterations_run += 1;
            if self.config.early_stop {
                let (_, bits) = self.hard_decisions(llr);
                if self.graph.is_codeword(&bits)? {
                    break;
                }
            }
        }
        let (output_llr, bits) = self.hard_decisions(llr);
        let converged = self.graph.is_codeword(&bits)?;
        self.reset();
        Ok(DecodeResult { bits, output_llr, iterations_run, converged })
    }
}

fn scnu_check(rt: &mut ScnuRuntime, first_edge: usize, input: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
    match &rt.emulator {
        None => {
            let cfg = &rt.config;
            check::min_sum_all(input, out, |_, m| cfg.raw_magnitude(m));
        }
        Some(em) => {
            let d = input.len();
            let negatives = input.iter().filter(|&&x| x < 0.0).count();
            for k in 0..d {
                scratch.clear();
                scratch.extend(
                    input.iter().enumerate().filter(|&(o, _)| o != k).map(|(_, &x)| x.abs()),
                );
                let bank = if rt.state.inner.is_empty() {
                    let bank = rt
                        .scratch_bank
                        .get_or_insert_with(|| SnnBank::new(rt.config.levels, d - 1, em.dynamics()));
                    if bank.inputs != d - 1 {
                        *bank = SnnBank::new(rt.config.levels, d - 1, em.dynamics());
                    } else {
                        bank.reset(em.dynamics());
                    }
                    bank
                } else {
                    &mut rt.state.inner[first_edge + k]
                };
                let mag = em.raw_magnitude(scratch, bank);
                let odd = (negatives - usize::from(input[k] < 0.0)) % 2 == 1;
                out[k] = if odd { -mag } else { mag };
            }
        }
    }
    // Memory neuron per directed edge; its potential is the message.
    for (k, o) in out.iter_mut().enumerate() {
        *o = rt.state.memory[first_edge + k].step_held(&rt.memory_dynamics, *o, rt.config.memory_steps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::construct_regular_code;

    fn small_graph() -> Arc<TannerGraph> {
        Arc::new(construct_regular_code(60, 3, 6, 3, 10_000).unwrap())
    }

    fn all_configs() -> Vec<DecoderConfig> {
        vec![
            DecoderConfig::spa(),
            DecoderConfig::ms(),
            DecoderConfig::oms(0.3),
            DecoderConfig::nms(0.75),
            DecoderConfig::elena(1.5, 1.5),
            DecoderConfig::ml_elena(8, 0.7, 0.7),
            DecoderConfig {
                scnu: Some(ScnuConfig::new(4, 0.9, 0.9).with_backend(ScnuBackend::SnnEmulation)),
                ..DecoderConfig::new(Algorithm::MlElena)
            },
        ]
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("bp".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(DecoderConfig::nms(0.0).validate().is_err());
        assert!(DecoderConfig::nms(1.2).validate().is_err());
        assert!(DecoderConfig::oms(-0.1).validate().is_err());
        assert!(DecoderConfig::new(Algorithm::MlElena).validate().is_err());
        let mut bad = DecoderConfig::elena(1.0, 1.0);
        bad.scnu.as_mut().unwrap().levels = 2;
        assert!(bad.validate().is_err());
        for c in all_configs() {
            c.validate().unwrap();
        }
    }

    #[test]
    fn degenerate_graphs_rejected() {
        let g = Arc::new(TannerGraph::from_rows(3, &[vec![0, 1], vec![2]]).unwrap());
        assert!(matches!(Decoder::new(g, DecoderConfig::ms()), Err(Error::Degenerate(_))));
        let g = Arc::new(TannerGraph::from_rows(3, &[vec![0, 1]]).unwrap());
        assert!(matches!(Decoder::new(g, DecoderConfig::ms()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn length_mismatch() {
        let mut dec = Decoder::new(small_graph(), DecoderConfig::ms()).unwrap();
        assert!(matches!(dec.decode(&[1.0; 5]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn vn_helpers() {
        assert_eq!(vn_update(0.1, &[]), 0.1);
        assert_eq!(vn_update(0.1, &[0.7, -0.7]), 0.1);
        assert_eq!(output_llr(1.0, &[0.5, 0.25]), 1.75);
        assert_eq!(hard_decision(0.0), 1);
        assert_eq!(hard_decision(-0.0), 1);
        assert_eq!(hard_decision(1e-300), 0);
    }

    #[test]
    fn noiseless_word_decodes_to_zero() {
        let g = small_graph();
        for cfg in all_configs() {
            let mut dec = Decoder::new(g.clone(), cfg.clone()).unwrap();
            let r = dec.decode(&vec![4.0; g.n_vns()]).unwrap();
            assert!(r.bits.iter().all(|&b| b == 0), "{}", cfg.label());
            assert!(r.converged);
            assert_eq!(r.iterations_run, 20);
        }
    }

    #[test]
    fn zero_iterations_is_channel_hard_decision() {
        let g = small_graph();
        let llr: Vec<f64> = (0..g.n_vns()).map(|i| if i % 7 == 0 { -0.5 } else { 1.0 }).collect();
        let mut dec = Decoder::new(g, DecoderConfig::ms().with_iterations(0)).unwrap();
        let r = dec.decode(&llr).unwrap();
        assert_eq!(r.output_llr, llr);
        assert_eq!(r.iterations_run, 0);
        for (b, l) in r.bits.iter().zip(&llr) {
            assert_eq!(*b, hard_decision(*l));
        }
    }

    #[test]
    fn early_stop_exits_on_codeword() {
        let g = small_graph();
        let cfg = DecoderConfig { early_stop: true, ..DecoderConfig::nms(0.75) };
        let mut dec = Decoder::new(g.clone(), cfg).unwrap();
        let r = dec.decode(&vec![3.0; g.n_vns()]).unwrap();
        assert_eq!(r.iterations_run, 1);
        assert!(r.converged);
    }

    #[test]
    fn memory_cleared_after_decode() {
        let g = small_graph();
        let mut cfg = DecoderConfig::ml_elena(4, 0.5, 0.5);
        cfg.scnu.as_mut().unwrap().backend = ScnuBackend::SnnEmulation;
        cfg.scnu.as_mut().unwrap().inner_memory = InnerMemory::FullyStateful;
        let mut dec = Decoder::new(g.clone(), cfg).unwrap();
        let llr: Vec<f64> = (0..g.n_vns()).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.0).collect();
        let first = dec.decode(&llr).unwrap();
        let rest = crate::neuron::LifParams::default().dynamics();
        assert!(dec.scnu_state().unwrap().is_at_rest(&rest));
        assert!(!dec.scnu_state().unwrap().inner.is_empty());
        assert_eq!(dec.decode(&llr).unwrap(), first);
    }

    #[test]
    fn extrinsic_check_update() {
        let g = small_graph();
        for cfg in all_configs() {
            let mut dec = Decoder::new(g.clone(), cfg.clone()).unwrap();
            let llr: Vec<f64> = (0..g.n_vns()).map(|i| ((i * 13) % 17) as f64 * 0.4 - 2.0).collect();
            dec.initialize(&llr).unwrap();
            let base_msgs = dec.messages().clone();
            dec.check_update();
            let base = dec.messages().c2v.clone();
            for e in (0..g.n_edges()).step_by(17) {
                dec.initialize(&llr).unwrap();
                *dec.messages_mut() = base_msgs.clone();
                dec.messages_mut().v2c[e] += 5.0;
                dec.check_update();
                assert_eq!(dec.messages().c2v[e], base[e], "{} edge {e}", cfg.label());
            }
        }
    }
}
