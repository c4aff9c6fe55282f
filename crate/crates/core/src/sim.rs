//! Monte Carlo BER/FER estimation.
//!
//! Codeword `c` at grid point `p` draws its noise from
//! [`codeword_rng`]`(master_seed, p, c)`. Codewords are decoded in parallel
//! batches but folded into the running counts strictly in index order, and
//! the stopping rule is checked after every codeword, so a [`BerPoint`]
//! depends only on the configuration, never on the worker count.

use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{codeword_rng, transmit_all_zero, ChannelParams, ReliabilityMode};
use crate::code::{CodeSpec, RegularConstruction, TannerGraph};
use crate::decoder::{Decoder, DecoderConfig};
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

const BATCH: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CodeSource {
    Construct(RegularConstruction),
    Alist {
        path: PathBuf,
        /// Declared dimension; defaults to `N - M`.
        #[serde(default)]
        k: Option<usize>,
    },
}

impl Default for CodeSource {
    fn default() -> Self {
        CodeSource::Construct(RegularConstruction::default())
    }
}

impl CodeSource {
    pub fn load(&self) -> Result<(TannerGraph, CodeSpec)> {
        match self {
            CodeSource::Construct(c) => {
                let g = c.build()?;
                let spec = CodeSpec { n: c.n, k: c.n - g.n_cns(), dv: c.dv, dc: c.dc };
                Ok((g, spec))
            }
            CodeSource::Alist { path, k } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let g = TannerGraph::from_alist(&text)?;
                let mut spec = CodeSpec::for_graph(&g);
                if let Some(k) = k {
                    spec.k = *k;
                }
                Ok((g, spec))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            CodeSource::Construct(c) => format!("regular-{}-{}-{}-s{}", c.n, c.dv, c.dc, c.seed),
            CodeSource::Alist { path, .. } => path.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopRule {
    /// Stop once this many bit errors have been seen...
    pub min_bit_errors: u64,
    /// ...and at least this many codewords simulated.
    pub min_codewords: u64,
    /// Hard cap.
    pub max_codewords: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_bit_errors: 100, min_codewords: 0, max_codewords: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub code: CodeSource,
    /// Overrides the declared code rate `k / n` for the Eb/N0 conversion.
    pub rate: Option<f64>,
    pub decoder: DecoderConfig,
    pub ebn0_grid: Vec<f64>,
    pub reliability: ReliabilityMode,
    pub stop: StopRule,
    pub master_seed: u64,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            code: CodeSource::default(),
            rate: None,
            decoder: DecoderConfig::default(),
            ebn0_grid: vec![2.5, 2.75, 3.0, 3.25, 3.5],
            reliability: ReliabilityMode::Matched,
            stop: StopRule::default(),
            master_seed: 1,
            workers: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ebn0_grid.is_empty() {
            return Err(Error::Config("Eb/N0 grid is empty".into()));
        }
        if let Some(x) = self.ebn0_grid.iter().find(|x| !x.is_finite()) {
            return Err(Error::Config(format!("non-finite Eb/N0 value {x}")));
        }
        if self.stop.min_bit_errors == 0 {
            return Err(Error::Config("min_bit_errors must be at least 1".into()));
        }
        if self.stop.max_codewords == 0 {
            return Err(Error::Config("max_codewords must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.decoder.validate()
    }
}

/// Aggregated statistics at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub codewords_sent: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl BerPoint {
    pub fn from_counts(ebn0_db: f64, n: usize, codewords: u64, bit_errors: u64, frame_errors: u64) -> Self {
        let bits_sent = codewords * n as u64;
        let (wilson_low, wilson_high) = wilson_interval(bit_errors, bits_sent, Z_95);
        Self {
            ebn0_db,
            bits_sent,
            bit_errors,
            codewords_sent: codewords,
            frame_errors,
            ber: ratio(bit_errors, bits_sent),
            fer: ratio(frame_errors, codewords),
            wilson_low,
            wilson_high,
        }
    }
}

fn ratio(k: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A resolved simulation: configuration plus the loaded code.
pub struct Simulator {
    config: SimConfig,
    graph: Arc<TannerGraph>,
    spec: CodeSpec,
    rate: f64,
    decoder: Decoder,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let (graph, spec) = config.code.load()?;
        Self::with_graph(config, Arc::new(graph), spec)
    }

    /// Uses an already loaded graph; `config.code` is kept only as a label.
    pub fn with_graph(config: SimConfig, graph: Arc<TannerGraph>, spec: CodeSpec) -> Result<Self> {
        config.validate()?;
        let rate = config.rate.unwrap_or_else(|| spec.rate());
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidRate(rate));
        }
        let decoder = Decoder::new(graph.clone(), config.decoder.clone())?;
        Ok(Self { config, graph, spec, rate, decoder })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn graph(&self) -> &Arc<TannerGraph> {
        &self.graph
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.config.workers {
            b = b.num_threads(w);
        }
        b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
    }

    /// Simulates grid point `point_index` at `ebn0_db`.
    pub fn run_point(&self, point_index: usize, ebn0_db: f64) -> Result<BerPoint> {
        let params = ChannelParams::new(ebn0_db, self.rate, self.config.reliability)?;
        self.run_point_with(point_index, &params)
    }

    /// Like [`run_point`](Self::run_point) with explicit channel parameters.
    pub fn run_point_with(&self, point_index: usize, params: &ChannelParams) -> Result<BerPoint> {
        let pool = self.pool()?;
        let stop = self.config.stop;
        let n = self.graph.n_vns();
        let seed = self.config.master_seed;

        let (mut codewords, mut bit_errors, mut frame_errors) = (0u64, 0u64, 0u64);
        let done = |cw: u64, be: u64| cw >= stop.max_codewords || (cw >= stop.min_codewords && be >= stop.min_bit_errors);
        let mut next = 0u64;
        'outer: while !done(codewords, bit_errors) {
            let end = (next + BATCH as u64).min(stop.max_codewords);
            let results: Vec<usize> = pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map_init(
                        || self.decoder.clone(),
                        |dec, cw| {
                            let mut rng = codeword_rng(seed, point_index as u64, cw);
                            let word = transmit_all_zero(n, params, &mut rng);
                            dec.decode(&word.llr).map(|r| r.bit_errors_vs_zero())
                        },
                    )
                    .collect::<Result<Vec<_>>>()
            })?;
            for errors in results {
                codewords += 1;
                bit_errors += errors as u64;
                frame_errors += u64::from(errors > 0);
                if done(codewords, bit_errors) {
                    break 'outer;
                }
            }
            next = end;
        }
        Ok(BerPoint::from_counts(params.ebn0_db, n, codewords, bit_errors, frame_errors))
    }

    /// Runs every grid point in order, handing each result to `on_point` as
    /// soon as it is available.
    pub fn run_curve(&self, mut on_point: impl FnMut(&BerPoint)) -> Result<Vec<BerPoint>> {
        let mut out = Vec::with_capacity(self.config.ebn0_grid.len());
        for (idx, &ebn0) in self.config.ebn0_grid.iter().enumerate() {
            let p = self.run_point(idx, ebn0)?;
            on_point(&p);
            out.push(p);
        }
        Ok(out)
    }
}

pub fn run_curve(config: SimConfig) -> Result<Vec<BerPoint>> {
    Simulator::new(config)?.run_curve(|_| {})
}
