//! The matching engines underneath the welfare solvers.
//!
//! Run with `cargo run --example matching`.

use share_alloc::matching::{
    max_cardinality_bipartite_matching, max_weight_matching, solve_sbmwm, solve_wbmm, WeightedGraph,
};

fn main() -> share_alloc::error::Result<()> {
    // A weighted 5-cycle with a chord: the blossom case.
    let mut g = WeightedGraph::new(6);
    for (u, v, w) in [(0, 1, 4), (1, 2, 6), (2, 3, 4), (3, 4, 6), (4, 0, 5), (2, 5, 3)] {
        g.add_edge(u, v, w)?;
    }
    let m = max_weight_matching(&g);
    println!("max weight matching {:?} weighs {}", m.edges, m.total_weight);

    for k1 in 1..=3 {
        let best = (0..=30).rev().find(|&k2| solve_sbmwm(&g, k1, k2).is_some()).unwrap_or(0);
        println!("at most {k1} edges: best weight {best}");
    }
    for k2 in 1..=3 {
        match (0..=30).find_map(|k1| solve_wbmm(&g, k1, k2).map(|m| (k1, m))) {
            Some((k1, m)) => println!("at least {k2} edges: cheapest weight {k1} with {:?}", m.edges),
            None => println!("at least {k2} edges: impossible"),
        }
    }

    let bip = max_cardinality_bipartite_matching(3, 3, &[(0, 0), (0, 1), (1, 0), (2, 2)])?;
    println!("bipartite matching of size {}: {:?}", bip.cardinality(), bip.edges);
    Ok(())
}
