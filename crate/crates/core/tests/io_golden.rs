use std::fs;
use std::path::PathBuf;

use native_graph::{
    parse_matrix_market, read_distances, write_distances, write_matrix_market, EdgeList,
    ParseOptions,
};
use proptest::prelude::*;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn parse_file(name: &str, options: ParseOptions) -> Result<EdgeList, native_graph::ParseError> {
    parse_matrix_market(fs::read(data(name)).unwrap().as_slice(), options)
}

fn render(el: &EdgeList) -> String {
    el.edges.iter().map(|(s, d, w)| format!("{s} {d} {w}\n")).collect()
}

const EXPAND: ParseOptions = ParseOptions {
    force_unit_weights: false,
    expand_symmetric: true,
};

#[test]
fn golden_edge_lists() {
    for (name, vertices) in [
        ("general_real", 4),
        ("symmetric_real", 3),
        ("pattern_symmetric", 4),
        ("integer_general", 3),
    ] {
        let el = parse_file(&format!("{name}.mtx"), EXPAND).unwrap();
        assert_eq!(el.num_vertices, vertices, "{name}");
        let expected = fs::read_to_string(data(&format!("{name}.edges"))).unwrap();
        assert_eq!(render(&el), expected, "{name}");
    }
}

#[test]
fn golden_errors() {
    for name in ["count_mismatch", "bad_header", "out_of_bounds", "negative_weight", "rectangular"] {
        let err = parse_file(&format!("{name}.mtx"), ParseOptions::default()).unwrap_err();
        let expected = fs::read_to_string(data(&format!("{name}.err"))).unwrap();
        assert_eq!(format!("{err}\n"), expected, "{name}");
    }
}

#[test]
fn unit_weights_option() {
    let el = parse_file(
        "general_real.mtx",
        ParseOptions {
            force_unit_weights: true,
            expand_symmetric: false,
        },
    )
    .unwrap();
    assert!(el.edges.iter().all(|e| e.2 == 1.0));
    assert_eq!(el.edges.len(), 5);
}

#[test]
fn reserialized_file_parses_to_the_same_edges() {
    let first = parse_file("general_real.mtx", ParseOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_matrix_market(&first, &mut buf).unwrap();
    let second = parse_matrix_market(buf.as_slice(), ParseOptions::default()).unwrap();
    assert_eq!(second, first);
}

proptest! {
    #[test]
    fn matrix_market_round_trip(
        n in 1usize..30,
        raw in prop::collection::vec((0usize..1000, 0usize..1000, 0.0f64..1e6), 0..60),
    ) {
        let edges = raw.into_iter().map(|(s, d, w)| (s % n, d % n, w)).collect();
        let el = EdgeList { num_vertices: n, edges };
        let mut buf = Vec::new();
        write_matrix_market(&el, &mut buf).unwrap();
        let parsed = parse_matrix_market(buf.as_slice(), ParseOptions::default()).unwrap();
        prop_assert_eq!(parsed, el);
    }

    #[test]
    fn distance_table_round_trip(
        entries in prop::collection::vec(prop::option::of((0u32..1_000_000, 0usize..50)), 1..50),
    ) {
        // six significant digits: values with at most six digits survive exactly
        let dist: Vec<f64> = entries
            .iter()
            .map(|e| e.map_or(f64::INFINITY, |(d, _)| d as f64 / 8.0))
            .map(|d| if d.is_finite() { format!("{:.6e}", d).parse::<f64>().unwrap() } else { d })
            .collect();
        let pred: Vec<Option<usize>> = entries.iter().map(|e| e.map(|(_, p)| p)).collect();
        let mut buf = Vec::new();
        write_distances(&dist, &pred, &mut buf).unwrap();
        let (d2, p2) = read_distances(buf.as_slice()).unwrap();
        prop_assert_eq!(p2, pred);
        for (a, b) in d2.iter().zip(&dist) {
            let rel = if b.is_finite() && *b != 0.0 { ((a - b) / b).abs() } else { 0.0 };
            prop_assert!(a == b || rel < 5e-6, "{} vs {}", a, b);
        }
    }
}
