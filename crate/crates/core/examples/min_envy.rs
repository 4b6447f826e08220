//! Fewest envious agents, solved by every engine that applies.
//!
//! Run with `cargo run --release --example min_envy`.

use share_alloc::envy::{
    min_envy_auto, min_envy_fpt, nice_decomposition, solve_ersa_auto, solve_ersa_bounded_shared,
    solve_ersa_identical_clique, solve_ersa_treewidth,
};
use share_alloc::model::{envious_agents, Instance};

fn main() -> share_alloc::error::Result<()> {
    // Everyone values things alike and everyone watches everyone.
    let office = Instance::builder(4, 4)
        .identical_utilities(vec![8, 3, 3, 1])
        .allocation(vec![vec![0], vec![1], vec![2], vec![3]])
        .sharing_edges([(0, 1), (1, 2), (2, 3)])
        .attention_clique()
        .build()?;
    let a = solve_ersa_identical_clique(&office, 0)?;
    println!("identical clique: {} envious at best", a.min_envy);
    let (k, _) = min_envy_fpt(&office)?;
    println!("configuration search agrees: {k}");

    // A cycle of neighbours who only look at each other.
    let ring = Instance::builder(5, 5)
        .utilities(vec![
            vec![1, 4, 0, 0, 2],
            vec![3, 1, 2, 0, 0],
            vec![0, 2, 1, 5, 0],
            vec![0, 0, 4, 1, 3],
            vec![2, 0, 0, 3, 1],
        ])
        .allocation(vec![vec![0], vec![1], vec![2], vec![3], vec![4]])
        .sharing_edges([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
        .attention_from_sharing()
        .build()?;
    let nice = nice_decomposition(&ring);
    let tw = solve_ersa_treewidth(&ring, &nice, 0)?;
    println!("treewidth {} dynamic program: {} envious", nice.width(), tw.min_envy);
    for k in 0..=tw.min_envy {
        let w = solve_ersa_bounded_shared(&ring, k, 2)?;
        println!("  at most 2 shares, at most {k} envious: {}", w.is_some());
    }

    let auto = solve_ersa_auto(&ring, tw.min_envy as i64)?;
    println!("auto picked {} and answered {}", auto.algorithm.name(), auto.yes);
    let (k, w, alg) = min_envy_auto(&ring)?;
    let report = envious_agents(&ring, &w)?;
    println!("minimum {k} via {}; envious agents {:?}", alg.name(), report.envious);
    Ok(())
}
