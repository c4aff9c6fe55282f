use proptest::prelude::*;
use snn_ldpc::code::{load_alist, save_alist, RowSampling};
use snn_ldpc::{construct_regular_code, CodeSpec, Error, RegularConstruction, TannerGraph};

fn assert_regular(g: &TannerGraph, dv: usize, dc: usize) {
    assert!(g.row_weights().iter().all(|&w| w == dc));
    assert!(g.col_weights().iter().all(|&w| w == dv));
    assert!(!g.has_four_cycle());
    assert!(g.max_row_overlap() <= 1);
}

#[test]
fn constructed_code_round_trips_through_alist() {
    let g = construct_regular_code(300, 3, 6, 17, 10_000).unwrap();
    assert_regular(&g, 3, 6);
    let text = save_alist(&g);
    let back = load_alist(&text).unwrap();
    assert_eq!(g, back);
    assert_eq!(save_alist(&back), text);
}

#[test]
fn alist_file_on_disk() {
    let g = construct_regular_code(60, 3, 6, 2, 10_000).unwrap();
    let dir = std::env::temp_dir().join(format!("snn-ldpc-alist-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.alist");
    std::fs::write(&path, g.to_alist()).unwrap();
    let loaded = TannerGraph::from_alist(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(g, loaded);
    assert_eq!(CodeSpec::for_graph(&loaded).rate(), 0.5);
}

#[test]
fn both_row_samplers_build_valid_codes() {
    for sampling in [RowSampling::Uniform, RowSampling::CapacityWeighted] {
        let rc = RegularConstruction { sampling, ..RegularConstruction::new(1500, 3, 15, 5) };
        assert_regular(&rc.build().unwrap(), 3, 15);
    }
}

#[test]
fn seeds_give_different_codes() {
    let a = construct_regular_code(600, 3, 15, 1, 10_000).unwrap();
    let b = construct_regular_code(600, 3, 15, 2, 10_000).unwrap();
    assert_ne!(a, b);
}

#[test]
fn impossible_girth_is_reported() {
    // A single check of degree 15 cannot host three disjoint-pair columns.
    match construct_regular_code(15, 3, 15, 1, 20) {
        Err(Error::ConstructionFailed { restarts }) => assert!(restarts >= 20),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_alist_reports_line() {
    let text = "3 2\n2 2\n1 2 1\n2 2\n1\nx 2\n2\n1 2\n2 3\n";
    match load_alist(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn small_constructions_are_regular(seed in 0u64..10_000, m in 20usize..40) {
        let (dv, dc) = (3, 6);
        let n = m * dc / dv;
        let g = construct_regular_code(n, dv, dc, seed, 10_000).unwrap();
        assert_regular(&g, dv, dc);
        for j in 0..g.n_cns() {
            for (k, e) in g.cn_edge_range(j).enumerate() {
                let (cn, vn) = g.edge(e);
                prop_assert_eq!(cn, j);
                prop_assert_eq!(vn, g.cn_neighbors(j)[k]);
                prop_assert!(g.vn_edges(vn).contains(&e));
            }
        }
    }

    #[test]
    fn syndrome_is_linear(seed in 0u64..1000, a in proptest::collection::vec(0u8..2, 60), b in proptest::collection::vec(0u8..2, 60)) {
        let g = construct_regular_code(60, 3, 6, seed, 10_000).unwrap();
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let sa = g.syndrome(&a).unwrap();
        let sb = g.syndrome(&b).unwrap();
        let ss = g.syndrome(&sum).unwrap();
        for j in 0..g.n_cns() {
            prop_assert_eq!(ss[j], sa[j] ^ sb[j]);
        }
    }
}
