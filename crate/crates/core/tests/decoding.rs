use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snn_ldpc::channel::{codeword_rng, transmit_all_zero, ChannelParams, ReliabilityMode};
use snn_ldpc::decoder::{InnerMemory, ScnuBackend};
use snn_ldpc::sim::{CodeSource, SimConfig, Simulator, StopRule};
use snn_ldpc::{construct_regular_code, Algorithm, Decoder, DecoderConfig, RegularConstruction, ScnuConfig, TannerGraph};

fn code() -> Arc<TannerGraph> {
    Arc::new(construct_regular_code(240, 3, 6, 21, 10_000).unwrap())
}

fn word(n: usize, ebn0: f64, mode: ReliabilityMode, cw: u64) -> Vec<f64> {
    let params = ChannelParams::new(ebn0, 0.5, mode).unwrap();
    transmit_all_zero(n, &params, &mut codeword_rng(5, 0, cw)).llr
}

#[test]
fn every_decoder_fixes_light_noise() {
    let g = code();
    let configs = [
        DecoderConfig::spa(),
        DecoderConfig::ms(),
        DecoderConfig::oms(0.5),
        DecoderConfig::nms(0.75),
        DecoderConfig::elena(1.5, 1.5),
        DecoderConfig::ml_elena(16, 0.7, 0.7),
        DecoderConfig {
            scnu: Some(ScnuConfig::new(8, 0.7, 0.7).with_backend(ScnuBackend::SnnEmulation)),
            ..DecoderConfig::new(Algorithm::MlElena)
        },
        DecoderConfig {
            scnu: Some(ScnuConfig {
                inner_memory: InnerMemory::FullyStateful,
                ..ScnuConfig::new(8, 0.7, 0.7).with_backend(ScnuBackend::SnnEmulation)
            }),
            ..DecoderConfig::new(Algorithm::MlElena)
        },
    ];
    for cfg in configs {
        let mut dec = Decoder::new(g.clone(), cfg.clone()).unwrap();
        let mut fixed = 0;
        let mode = match cfg.scnu {
            Some(_) => ReliabilityMode::Fixed { design_ebn0_db: 2.8 },
            None => ReliabilityMode::Matched,
        };
        for cw in 0..20 {
            let llr = word(g.n_vns(), 5.0, mode, cw);
            let r = dec.decode(&llr).unwrap();
            if r.converged && r.bit_errors_vs_zero() == 0 {
                fixed += 1;
            }
        }
        assert!(fixed >= 19, "{}: {fixed}/20", cfg.label());
    }
}

#[test]
fn spa_beats_uncoded_at_moderate_snr() {
    let g = code();
    let mut dec = Decoder::new(g.clone(), DecoderConfig::spa()).unwrap();
    let (mut raw, mut decoded) = (0usize, 0usize);
    for cw in 0..50 {
        let llr = word(g.n_vns(), 2.5, ReliabilityMode::Matched, cw);
        raw += llr.iter().filter(|&&l| l <= 0.0).count();
        decoded += dec.decode(&llr).unwrap().bit_errors_vs_zero();
    }
    assert!(decoded * 5 < raw, "decoded {decoded} vs raw {raw}");
}

#[test]
fn min_sum_hard_decisions_are_scale_invariant() {
    let g = code();
    let mut dec = Decoder::new(g.clone(), DecoderConfig::ms()).unwrap();
    for cw in 0..10 {
        let llr = word(g.n_vns(), 1.5, ReliabilityMode::Matched, cw);
        let scaled: Vec<f64> = llr.iter().map(|l| l * 4.0).collect();
        assert_eq!(dec.decode(&llr).unwrap().bits, dec.decode(&scaled).unwrap().bits);
    }
}

#[test]
fn early_stop_agrees_with_full_run_on_success() {
    let g = code();
    let mut full = Decoder::new(g.clone(), DecoderConfig::nms(0.75)).unwrap();
    let mut early = Decoder::new(g.clone(), DecoderConfig { early_stop: true, ..DecoderConfig::nms(0.75) }).unwrap();
    for cw in 0..10 {
        let llr = word(g.n_vns(), 4.0, ReliabilityMode::Matched, cw);
        let a = full.decode(&llr).unwrap();
        let b = early.decode(&llr).unwrap();
        assert!(b.iterations_run <= a.iterations_run);
        if b.converged {
            assert_eq!(a.bits, b.bits);
        }
    }
}

fn sim(decoder: DecoderConfig, reliability: ReliabilityMode, grid: Vec<f64>) -> SimConfig {
    SimConfig {
        code: CodeSource::Construct(RegularConstruction::new(240, 3, 6, 21)),
        decoder,
        ebn0_grid: grid,
        reliability,
        stop: StopRule { min_bit_errors: 200, min_codewords: 0, max_codewords: 3000 },
        master_seed: 77,
        workers: Some(2),
        ..SimConfig::default()
    }
}

#[test]
fn nms_ber_falls_with_snr() {
    let points = Simulator::new(sim(DecoderConfig::nms(0.75), ReliabilityMode::Matched, vec![1.0, 2.0, 3.0]))
        .unwrap()
        .run_curve(|_| {})
        .unwrap();
    for w in points.windows(2) {
        assert!(w[1].wilson_high < w[0].wilson_low, "{:?}", points);
    }
}

#[test]
fn reliability_mode_matters_only_when_decoding() {
    let fixed = ReliabilityMode::Fixed { design_ebn0_db: 3.0 };
    let hard = DecoderConfig::ms().with_iterations(0);
    let a = Simulator::new(sim(hard.clone(), ReliabilityMode::Matched, vec![1.0])).unwrap().run_point(0, 1.0).unwrap();
    let b = Simulator::new(sim(hard, fixed, vec![1.0])).unwrap().run_point(0, 1.0).unwrap();
    assert_eq!(a, b);

    let spa = DecoderConfig::spa().with_iterations(10);
    let a = Simulator::new(sim(spa.clone(), ReliabilityMode::Matched, vec![1.0])).unwrap().run_point(0, 1.0).unwrap();
    let b = Simulator::new(sim(spa, fixed, vec![1.0])).unwrap().run_point(0, 1.0).unwrap();
    assert_ne!(a, b);
}

#[test]
fn stop_rule_is_exact() {
    let mut cfg = sim(DecoderConfig::nms(0.75), ReliabilityMode::Matched, vec![0.5]);
    cfg.stop = StopRule { min_bit_errors: 50, min_codewords: 7, max_codewords: 1000 };
    let p = Simulator::new(cfg.clone()).unwrap().run_point(0, 0.5).unwrap();
    assert!(p.bit_errors >= 50);
    assert!(p.codewords_sent >= 7);

    // Dropping the last codeword must fall below one of the thresholds.
    let mut dec = Decoder::new(code(), cfg.decoder.clone()).unwrap();
    let params = ChannelParams::new(0.5, 0.5, ReliabilityMode::Matched).unwrap();
    let mut errors = 0u64;
    for cw in 0..p.codewords_sent - 1 {
        let y = transmit_all_zero(240, &params, &mut codeword_rng(77, 0, cw));
        errors += dec.decode(&y.llr).unwrap().bit_errors_vs_zero() as u64;
    }
    assert!(errors < 50 || p.codewords_sent - 1 < 7);
}

#[test]
fn channel_rng_streams_are_independent() {
    let params = ChannelParams::new(2.0, 0.5, ReliabilityMode::Matched).unwrap();
    let a = transmit_all_zero(64, &params, &mut codeword_rng(1, 0, 0));
    let b = transmit_all_zero(64, &params, &mut codeword_rng(1, 0, 1));
    let c = transmit_all_zero(64, &params, &mut codeword_rng(1, 1, 0));
    let again = transmit_all_zero(64, &params, &mut codeword_rng(1, 0, 0));
    assert_eq!(a, again);
    assert_ne!(a.y, b.y);
    assert_ne!(a.y, c.y);
    let _ = ChaCha8Rng::seed_from_u64(0);
}
