//! Config file layout and flag merging.
//!
//! ```toml
//! seed = 7
//! workers = 4
//! output_dir = "results"
//!
//! [code]
//! kind = "construct"     # or: kind = "alist", path = "code.alist"
//! n = 1500
//! dv = 3
//! dc = 15
//! seed = 1
//!
//! [decoder]
//! algorithm = "ml-elena"
//! iterations = 20
//! [decoder.scnu]
//! levels = 16
//! theta1 = 0.7
//! theta2 = 0.7
//!
//! [simulate]
//! ebn0 = [2.6, 2.8, 3.0]
//! reliability = { mode = "fixed", design_ebn0_db = 2.8 }
//! stop = { min_bit_errors = 200, max_codewords = 50000 }
//!
//! [sweep]
//! levels = 8
//! gamma = 1.0
//! design_ebn0 = 2.8
//!
//! [characterize]
//! levels = 4
//! theta1 = 1.0
//! theta2 = 1.0
//! ```
//!
//! Command-line flags take precedence over every value here.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;
use snn_ldpc::channel::ReliabilityMode;
use snn_ldpc::decoder::{Algorithm, ScnuConfig};
use snn_ldpc::sim::{CodeSource, StopRule};
use snn_ldpc::{DecoderConfig, RegularConstruction};

use crate::args::{CodeArgs, DecoderArgs, ReliabilityArg, StopArgs};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub code: Option<CodeSource>,
    pub decoder: Option<DecoderConfig>,
    pub simulate: SimulateSection,
    pub sweep: SweepSection,
    pub characterize: CharacterizeSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub ebn0: Option<Vec<f64>>,
    pub reliability: Option<ReliabilityMode>,
    pub rate: Option<f64>,
    pub stop: Option<StopRule>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub theta1: Option<Vec<f64>>,
    pub gamma: Option<f64>,
    pub levels: Option<usize>,
    pub design_ebn0: Option<f64>,
    pub stop: Option<StopRule>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharacterizeSection {
    pub levels: Option<usize>,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub gamma: Option<f64>,
    pub max_mag: Option<f64>,
    pub points: Option<usize>,
}

impl FileConfig {
    /// Reads `path`, or returns the empty config when no file was given.
    /// Relative alist paths are resolved against the file's directory.
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: FileConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(CodeSource::Alist { path: alist, .. }) = &mut cfg.code {
            if alist.is_relative() {
                if let Some(dir) = path.parent() {
                    *alist = dir.join(&*alist);
                }
            }
        }
        Ok(cfg)
    }
}

/// Code source from flags, falling back to the config file.
pub fn resolve_code(args: &CodeArgs, file: &FileConfig) -> anyhow::Result<CodeSource> {
    if let Some(path) = &args.code {
        if args.n.is_some() {
            bail!("--code and --n are mutually exclusive");
        }
        return Ok(CodeSource::Alist { path: path.clone(), k: args.k });
    }
    let mut source = match (&file.code, args.n) {
        (_, Some(n)) => {
            let base = match &file.code {
                Some(CodeSource::Construct(c)) => c.clone(),
                _ => RegularConstruction::default(),
            };
            CodeSource::Construct(RegularConstruction { n, ..base })
        }
        (Some(c), None) => c.clone(),
        (None, None) => bail!("no code given: pass --code <alist>, --n <length>, or add a [code] section"),
    };
    match &mut source {
        CodeSource::Construct(c) => {
            if let Some(dv) = args.dv {
                c.dv = dv;
            }
            if let Some(dc) = args.dc {
                c.dc = dc;
            }
            if let Some(seed) = args.code_seed {
                c.seed = seed;
            }
        }
        CodeSource::Alist { k, .. } => {
            if args.k.is_some() {
                *k = args.k;
            }
        }
    }
    Ok(source)
}

/// Decoder configuration from the file's `[decoder]` section with flags applied.
pub fn resolve_decoder(args: &DecoderArgs, file: &FileConfig) -> anyhow::Result<DecoderConfig> {
    let mut cfg = file.decoder.clone().unwrap_or_default();
    if let Some(alg) = args.decoder {
        cfg.algorithm = alg;
    }
    if let Some(it) = args.iterations {
        cfg.iterations = it;
    }
    if let Some(l) = args.lambda {
        cfg.nms_lambda = l;
    }
    if let Some(o) = args.offset {
        cfg.oms_offset = o;
    }
    if args.early_stop {
        cfg.early_stop = true;
    }
    if cfg.algorithm.uses_scnu() {
        cfg.scnu = Some(resolve_scnu(args, cfg.scnu.take(), cfg.algorithm)?);
    } else if args.levels.is_some() || args.theta1.is_some() {
        bail!("--levels/--theta1 only apply to elena and ml-elena");
    }
    Ok(cfg)
}

fn resolve_scnu(args: &DecoderArgs, from_file: Option<ScnuConfig>, alg: Algorithm) -> anyhow::Result<ScnuConfig> {
    let had_file = from_file.is_some();
    let mut s = from_file.unwrap_or_default();
    match (args.levels, alg) {
        (Some(l), _) => s.levels = l,
        (None, Algorithm::Elena) => s.levels = 1,
        (None, _) if !had_file => bail!("ml-elena needs --levels"),
        _ => {}
    }
    match args.theta1 {
        Some(t) => {
            let gamma = if had_file { s.gamma() } else { 1.0 };
            s.theta1 = t;
            s.theta2 = gamma * t;
        }
        None if !had_file => bail!("{alg} needs --theta1"),
        None => {}
    }
    match (args.theta2, args.gamma) {
        (Some(_), Some(_)) => bail!("--theta2 and --gamma are mutually exclusive"),
        (Some(t2), None) => s.theta2 = t2,
        (None, Some(g)) => s.theta2 = g * s.theta1,
        (None, None) => {}
    }
    if let Some(b) = args.backend {
        s.backend = b.into();
    }
    if let Some(st) = args.memory_steps {
        s.memory_steps = st;
    }
    Ok(s)
}

pub fn resolve_reliability(
    mode: Option<ReliabilityArg>,
    design: Option<f64>,
    from_file: Option<ReliabilityMode>,
) -> anyhow::Result<ReliabilityMode> {
    let file_design = match from_file {
        Some(ReliabilityMode::Fixed { design_ebn0_db }) => Some(design_ebn0_db),
        _ => None,
    };
    Ok(match (mode, design) {
        (Some(ReliabilityArg::Matched), Some(_)) => bail!("--design-ebn0 needs --reliability fixed"),
        (Some(ReliabilityArg::Matched), None) => ReliabilityMode::Matched,
        (Some(ReliabilityArg::Fixed), d) | (None, d @ Some(_)) => {
            let design_ebn0_db = d
                .or(file_design)
                .context("--reliability fixed needs --design-ebn0")?;
            ReliabilityMode::Fixed { design_ebn0_db }
        }
        (None, None) => from_file.unwrap_or_default(),
    })
}

pub fn resolve_stop(args: &StopArgs, from_file: Option<StopRule>) -> StopRule {
    let mut stop = from_file.unwrap_or_default();
    if let Some(e) = args.min_errors {
        stop.min_bit_errors = e;
    }
    if let Some(c) = args.min_codewords {
        stop.min_codewords = c;
    }
    if let Some(c) = args.max_codewords {
        stop.max_codewords = c;
    }
    stop
}
