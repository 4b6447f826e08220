//! Utilitarian and egalitarian welfare through sharing.
//!
//! Run with `cargo run --example welfare`.

use share_alloc::io::format_ratio;
use share_alloc::model::{welfare, Instance, Rational};
use share_alloc::welfare::{maximize_ewsa_simple, solve_ewsa_bounded_exact, solve_uwsa};

fn main() -> share_alloc::error::Result<()> {
    // Three friends in a line; the middle one owns two things.
    let inst = Instance::builder(3, 4)
        .utilities(vec![vec![2, 5, 1, 0], vec![3, 3, 3, 3], vec![0, 1, 6, 4]])
        .allocation(vec![vec![0], vec![1, 2], vec![3]])
        .sharing_edges([(0, 1), (1, 2)])
        .attention_from_sharing()
        .build()?;

    let none = welfare(&inst, &share_alloc::model::Sharing::empty(1))?;
    println!(
        "before sharing: utilitarian {}, egalitarian {}",
        format_ratio(none.utilitarian),
        format_ratio(none.egalitarian)
    );

    for b in 1..=2 {
        let best = solve_uwsa(&inst, b, Rational::from_integer(0))?;
        println!("b = {b}: best utilitarian welfare {}", format_ratio(best.optimum));
        for a in best.witness.assignments() {
            println!("  share resource {} over {:?}", a.resource, a.edge);
        }
    }

    let (egal, w) = maximize_ewsa_simple(&inst)?;
    println!("best egalitarian welfare with one sharing each: {} ({} shares)", format_ratio(egal), w.len());

    let goal = egal + 1;
    let two = solve_ewsa_bounded_exact(&inst, 2, goal)?;
    println!("can two sharings each reach {}? {}", format_ratio(goal), two.is_some());
    Ok(())
}
