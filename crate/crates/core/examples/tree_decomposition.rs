//! Decomposing a sharing graph and running the bag-by-bag program on a
//! long path.
//!
//! Run with `cargo run --release --example tree_decomposition`.

use std::time::Instant;

use share_alloc::envy::{decompose, solve_ersa_treewidth, NiceTreeDecomposition, TreeDecomposition};
use share_alloc::random::{generate_random, AttentionModel, GraphModel};

fn main() -> share_alloc::error::Result<()> {
    let inst = generate_random(7, 40, 20, GraphModel::Path, AttentionModel::SameAsSharingBidirected, 9)?;
    let td = decompose(inst.agent_count(), inst.sharing_edges());
    println!("{} bags, width {}", td.bags.len(), td.width());

    let nice = NiceTreeDecomposition::from_tree_decomposition(&td, inst.agent_count(), inst.sharing_edges())?;
    println!("nice form has {} nodes", nice.nodes().len());

    let start = Instant::now();
    let a = solve_ersa_treewidth(&inst, &nice, 0)?;
    println!("minimum envy {} in {:?}, {} shares", a.min_envy, start.elapsed(), a.witness.len());

    // Hand-written decompositions work too, as long as they are valid.
    let tiny = share_alloc::model::Instance::builder(3, 3)
        .utilities(vec![vec![1, 3, 0], vec![2, 1, 2], vec![0, 4, 1]])
        .allocation(vec![vec![0], vec![1], vec![2]])
        .sharing_edges([(0, 1), (1, 2)])
        .attention_from_sharing()
        .build()?;
    let by_hand = TreeDecomposition { bags: vec![vec![0, 1], vec![1, 2]], edges: vec![(0, 1)] };
    let nice = NiceTreeDecomposition::from_tree_decomposition(&by_hand, 3, tiny.sharing_edges())?;
    println!("hand-made decomposition: minimum envy {}", solve_ersa_treewidth(&tiny, &nice, 0)?.min_envy);
    Ok(())
}
