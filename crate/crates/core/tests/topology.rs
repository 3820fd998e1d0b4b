use lanecode::paths::{enumerate_paths, DEFAULT_MAX_HOPS};
use lanecode::{DelayVector, Error, MultiGraph};

#[test]
fn nsfnet_catalog() {
    let g = MultiGraph::nsfnet();
    assert_eq!(g.links().len(), 21);
    let c = enumerate_paths(&g, 0, 5, DEFAULT_MAX_HOPS).unwrap();
    assert_eq!(c.routes.len(), 11);
    assert_eq!(c.reduced().to_string(), "(2,3,4,4,5,6,6,7,8,8,9)");
    assert_eq!(c.reduced().tau_up(0).unwrap(), 7);
    let e = c.expanded();
    assert_eq!(e.len(), 110);
    assert_eq!((e.d_min_count(), e.d_max_count()), (10, 10));
}

#[test]
fn hop_limit_trims_long_routes() {
    let g = MultiGraph::nsfnet();
    let c = enumerate_paths(&g, 0, 5, 5).unwrap();
    assert_eq!(c.reduced().to_string(), "(2,3,4,4,5)");
}

#[test]
fn text_round_trip() {
    let g = MultiGraph::nsfnet();
    let again = MultiGraph::parse(&g.to_text()).unwrap();
    assert_eq!(again, g);
}

#[test]
fn link_delays_and_multiplicity() {
    let g = MultiGraph::parse("node 0\nnode 1\nnode 2\nlink 0 1 2 5\nlink 1 2 3 1\nlink 0 2 1 4\n").unwrap();
    let c = enumerate_paths(&g, 0, 2, 4).unwrap();
    let got: Vec<(String, u64, u32)> = c.routes.iter().map(|r| (r.to_string(), r.delay, r.wavelengths)).collect();
    assert_eq!(got, [("0-2".into(), 4, 1), ("0-1-2".into(), 6, 2)]);
    assert_eq!(c.expanded().as_slice(), &[4, 6, 6]);
}

#[test]
fn unreachable_and_unknown_nodes() {
    let g = MultiGraph::nsfnet();
    assert!(matches!(enumerate_paths(&g, 5, 0, 10), Err(Error::NoPath { src: 5, dst: 0 })));
    assert!(enumerate_paths(&g, 0, 99, 10).is_err());
}

#[test]
fn parse_errors_carry_line_numbers() {
    match MultiGraph::parse("node 0\n\nlink 0 1 1\n") {
        Err(Error::TopologyParse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(MultiGraph::parse("edge 0 1 1 1").is_err());
}

#[test]
fn delay_vector_forms() {
    let a: DelayVector = "(4, 2,3)".parse().unwrap();
    let b: DelayVector = "2 3 4".parse().unwrap();
    assert_eq!(a, b);
    assert_eq!(a.d(1), 2);
    assert!("".parse::<DelayVector>().is_err());
    assert!("1,-2".parse::<DelayVector>().is_err());
}
