//! `snn-ldpc` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 code
//! construction failure, 4 simulation aborted.

mod args;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::Parser;
use serde::Serialize;
use snn_ldpc::sim::{BerPoint, CodeSource, SimConfig, Simulator};
use snn_ldpc::sweep::{characterize_scnu, default_theta1_grid, linear_grid, sweep_theta1_on, SweepConfig};
use snn_ldpc::{CodeSpec, Error as CoreError, RegularConstruction, ScnuConfig, TannerGraph};

use args::{CharacterizeArgs, Cli, Command, ConstructArgs, SimulateArgs, SweepArgs};
use config::FileConfig;
use output::{output_path, sibling, write_csv, write_json, RunManifest};

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 2, error: error.into() }
    }

    fn construction(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 3, error: error.into() }
    }

    fn aborted(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 4, error: error.into() }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::ConstructionFailed { .. } => Failure::construction(e),
            CoreError::Degenerate(_) | CoreError::LengthMismatch { .. } => Failure::aborted(e),
            _ => Failure::usage(e),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Characterize(a) => characterize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    FileConfig::load(path).map_err(Failure::usage)
}

fn out_dir<'a>(flag: &'a Option<PathBuf>, file: &'a FileConfig) -> Option<&'a Path> {
    flag.as_deref().or(file.output_dir.as_deref())
}

fn load_code(source: &CodeSource) -> Result<(TannerGraph, CodeSpec), Failure> {
    source.load().map_err(|e| match e {
        CoreError::InvalidParameters(_) => Failure::construction(e),
        other => other.into(),
    })
}

fn construct(a: ConstructArgs) -> CmdResult {
    let started = Instant::now();
    let file = load_config(a.common.config.as_deref())?;
    let mut rc = match &file.code {
        Some(CodeSource::Construct(c)) => c.clone(),
        Some(CodeSource::Alist { .. }) => {
            return Err(Failure::usage(anyhow!("construct needs a [code] section with kind = \"construct\"")))
        }
        None => RegularConstruction::default(),
    };
    if file.code.is_none() && a.n.is_none() {
        return Err(Failure::usage(anyhow!("missing --n (or a [code] section)")));
    }
    if let Some(n) = a.n {
        rc.n = n;
    }
    if let Some(dv) = a.dv {
        rc.dv = dv;
    }
    if let Some(dc) = a.dc {
        rc.dc = dc;
    }
    if let Some(seed) = a.seed {
        rc.seed = seed;
    }
    if let Some(r) = a.max_restarts {
        rc.max_restarts = r;
    }

    let g = rc.build().map_err(Failure::construction)?;
    let rows = g.row_weights();
    let cols = g.col_weights();
    let regular = rows.iter().all(|&w| w == rc.dc) && cols.iter().all(|&w| w == rc.dv);
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    println!("code: n = {}, m = {}, design rate {:.4}", g.n_vns(), g.n_cns(), 1.0 - g.n_cns() as f64 / g.n_vns() as f64);
    println!("regular ({}, {}): {}", rc.dv, rc.dc, yes_no(regular));
    println!("max row overlap: {}", g.max_row_overlap());
    println!("girth ≥ 6: {}", yes_no(!g.has_four_cycle()));

    let path = output_path(
        a.common.output.as_deref(),
        out_dir(&a.common.out_dir, &file),
        &format!("code-{}-{}-{}-s{}.alist", rc.n, rc.dv, rc.dc, rc.seed),
    );
    output::ensure_parent(&path).map_err(Failure::aborted)?;
    std::fs::write(&path, g.to_alist())
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::aborted)?;
    let mut manifest = RunManifest::new("construct", &rc, Some(rc.seed), started);
    manifest.outputs.push(path.clone());
    manifest.finish(&path).map_err(Failure::aborted)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sim_config(a: &SimulateArgs, file: &FileConfig) -> Result<SimConfig, Failure> {
    let code = config::resolve_code(&a.code, file).map_err(Failure::usage)?;
    let decoder = config::resolve_decoder(&a.decoder, file).map_err(Failure::usage)?;
    let ebn0_grid = a
        .ebn0
        .clone()
        .or_else(|| file.simulate.ebn0.clone())
        .ok_or_else(|| Failure::usage(anyhow!("missing --ebn0 (or simulate.ebn0 in the config)")))?;
    let reliability = config::resolve_reliability(a.reliability, a.design_ebn0, file.simulate.reliability)
        .map_err(Failure::usage)?;
    let cfg = SimConfig {
        code,
        rate: a.rate.or(file.simulate.rate),
        decoder,
        ebn0_grid,
        reliability,
        stop: config::resolve_stop(&a.stop, file.simulate.stop),
        master_seed: a.run.seed.or(file.seed).unwrap_or(1),
        workers: a.run.workers.or(file.workers),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct BerRow<'a> {
    ebn0_db: f64,
    bits: u64,
    bit_errors: u64,
    ber: f64,
    wilson_low: f64,
    wilson_high: f64,
    frames: u64,
    frame_errors: u64,
    fer: f64,
    decoder: &'a str,
    code: &'a str,
    seed: u64,
}

#[derive(Serialize)]
struct SimReport<'a> {
    config: &'a SimConfig,
    rate: f64,
    points: &'a [BerPoint],
}

fn simulate(a: SimulateArgs) -> CmdResult {
    let started = Instant::now();
    let file = load_config(a.common.config.as_deref())?;
    let cfg = sim_config(&a, &file)?;
    let (graph, spec) = load_code(&cfg.code)?;
    let sim = Simulator::with_graph(cfg.clone(), Arc::new(graph), spec)?;
    let label = cfg.decoder.label();
    let code_label = cfg.code.label();
    println!(
        "{label} on {code_label} (n = {}, rate {:.4}), {} iterations",
        spec.n,
        sim.rate(),
        cfg.decoder.iterations
    );
    println!("{:>8} {:>12} {:>10} {:>12} {:>10}", "Eb/N0", "BER", "bit errs", "FER", "frames");
    let points = sim
        .run_curve(|p| {
            println!(
                "{:>8.3} {:>12.4e} {:>10} {:>12.4e} {:>10}",
                p.ebn0_db, p.ber, p.bit_errors, p.fer, p.codewords_sent
            )
        })
        .map_err(Failure::aborted)?;

    let path = output_path(
        a.common.output.as_deref(),
        out_dir(&a.common.out_dir, &file),
        &format!("ber-{label}.csv"),
    );
    let rows: Vec<BerRow> = points
        .iter()
        .map(|p| BerRow {
            ebn0_db: p.ebn0_db,
            bits: p.bits_sent,
            bit_errors: p.bit_errors,
            ber: p.ber,
            wilson_low: p.wilson_low,
            wilson_high: p.wilson_high,
            frames: p.codewords_sent,
            frame_errors: p.frame_errors,
            fer: p.fer,
            decoder: &label,
            code: &code_label,
            seed: cfg.master_seed,
        })
        .collect();
    write_csv(&path, &rows).map_err(Failure::aborted)?;
    let json = sibling(&path, "json");
    write_json(&json, &SimReport { config: &cfg, rate: sim.rate(), points: &points }).map_err(Failure::aborted)?;
    let mut manifest = RunManifest::new("simulate", &cfg, Some(cfg.master_seed), started);
    manifest.outputs = vec![path.clone(), json];
    manifest.finish(&path).map_err(Failure::aborted)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    theta1: f64,
    theta2: f64,
    ber: f64,
    wilson_low: f64,
    wilson_high: f64,
}

fn sweep(a: SweepArgs) -> CmdResult {
    let started = Instant::now();
    let file = load_config(a.common.config.as_deref())?;
    let code = config::resolve_code(&a.code, &file).map_err(Failure::usage)?;
    let mut decoder = file.decoder.clone().unwrap_or_default();
    if let Some(it) = a.iterations {
        decoder.iterations = it;
    }
    if let Some(b) = a.backend {
        decoder.scnu.get_or_insert_with(ScnuConfig::default).backend = b.into();
    }
    let s = &file.sweep;
    let cfg = SweepConfig {
        theta1_grid: a.theta1.clone().or_else(|| s.theta1.clone()).unwrap_or_else(default_theta1_grid),
        gamma: a.gamma.or(s.gamma).unwrap_or(1.0),
        levels: a
            .levels
            .or(s.levels)
            .ok_or_else(|| Failure::usage(anyhow!("missing --levels (or sweep.levels in the config)")))?,
        design_ebn0_db: a.design_ebn0.or(s.design_ebn0).unwrap_or(2.8),
        base: SimConfig {
            code,
            decoder,
            stop: config::resolve_stop(&a.stop, s.stop.or(file.simulate.stop)),
            master_seed: a.run.seed.or(file.seed).unwrap_or(1),
            workers: a.run.workers.or(file.workers),
            rate: file.simulate.rate,
            ..SimConfig::default()
        },
    };
    cfg.validate()?;
    cfg.sim_config(cfg.theta1_grid[0]).validate()?;
    let (graph, spec) = load_code(&cfg.base.code)?;

    println!(
        "theta1 sweep: L = {}, gamma = {}, {} dB, {} points",
        cfg.levels,
        cfg.gamma,
        cfg.design_ebn0_db,
        cfg.theta1_grid.len()
    );
    println!("{:>8} {:>8} {:>12} {:>10}", "theta1", "theta2", "BER", "bit errs");
    let result = sweep_theta1_on(&cfg, Arc::new(graph), spec, |p| {
        println!("{:>8.3} {:>8.3} {:>12.4e} {:>10}", p.theta1, p.theta2, p.ber.ber, p.ber.bit_errors)
    })
    .map_err(Failure::aborted)?;
    let best = result.best_point();
    println!("best: theta1 = {}, theta2 = {}, BER {:.4e}", best.theta1, best.theta2, best.ber.ber);

    let path = output_path(
        a.common.output.as_deref(),
        out_dir(&a.common.out_dir, &file),
        &format!("sweep-L{}-{}dB.csv", cfg.levels, cfg.design_ebn0_db),
    );
    let rows: Vec<SweepRow> = result
        .points
        .iter()
        .map(|p| SweepRow {
            theta1: p.theta1,
            theta2: p.theta2,
            ber: p.ber.ber,
            wilson_low: p.ber.wilson_low,
            wilson_high: p.ber.wilson_high,
        })
        .collect();
    write_csv(&path, &rows).map_err(Failure::aborted)?;
    let mut manifest = RunManifest::new("sweep", &cfg, Some(cfg.base.master_seed), started);
    manifest.outputs.push(path.clone());
    manifest.finish(&path).map_err(Failure::aborted)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn characterize(a: CharacterizeArgs) -> CmdResult {
    let started = Instant::now();
    let file = load_config(a.common.config.as_deref())?;
    let c = &file.characterize;
    let missing = |flag: &str| Failure::usage(anyhow!("missing --{flag} (or characterize.{flag} in the config)"));
    let levels = a.levels.or(c.levels).ok_or_else(|| missing("levels"))?;
    let theta1 = a.theta1.or(c.theta1).ok_or_else(|| missing("theta1"))?;
    let theta2 = match (a.theta2, a.gamma) {
        (Some(t), _) => t,
        (None, Some(g)) => g * theta1,
        (None, None) => c.theta2.or(c.gamma.map(|g| g * theta1)).unwrap_or(theta1),
    };
    let scnu = ScnuConfig::new(levels, theta1, theta2);
    let max_mag = a.max_mag.or(c.max_mag).unwrap_or((levels + 1) as f64 * theta1);
    let points = a.points.or(c.points).unwrap_or(1000);
    if points == 0 {
        return Err(Failure::usage(anyhow!("the magnitude grid is empty")));
    }
    if !(max_mag.is_finite() && max_mag > 0.0) {
        return Err(Failure::usage(anyhow!("--max-mag must be positive")));
    }
    let curve = characterize_scnu(&scnu, &linear_grid(max_mag, points))?;

    let path = output_path(
        a.common.output.as_deref(),
        out_dir(&a.common.out_dir, &file),
        &format!("characterize-L{levels}.csv"),
    );
    write_csv(&path, &curve).map_err(Failure::aborted)?;
    let mut manifest = RunManifest::new("characterize", &scnu, None, started);
    manifest.outputs.push(path.clone());
    manifest.finish(&path).map_err(Failure::aborted)?;
    println!("L = {levels}, theta1 = {theta1}, theta2 = {theta2}: {points} points up to {max_mag}");
    println!("wrote {}", path.display());
    Ok(())
}
