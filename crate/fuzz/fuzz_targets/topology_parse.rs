#![no_main]

use lanecode::paths::enumerate_paths;
use lanecode::MultiGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(g) = MultiGraph::parse(text) else {
        return;
    };
    let again = MultiGraph::parse(&g.to_text()).expect("written topology parses");
    assert_eq!(again, g);
    // Keep the search small; path counts grow exponentially with hops.
    let nodes: Vec<usize> = g.nodes().take(4).collect();
    for &s in &nodes {
        for &t in &nodes {
            if s == t {
                continue;
            }
            if let Ok(catalog) = enumerate_paths(&g, s, t, 4) {
                assert!(catalog.routes.windows(2).all(|w| w[0].delay <= w[1].delay));
                assert!(catalog.routes.iter().all(|r| r.nodes.first() == Some(&s) && r.nodes.last() == Some(&t)));
            }
        }
    }
});
