//! Lossy sharing and costly edges.
//!
//! Run with `cargo run --example extensions`.

use share_alloc::envy::solve_ersa_fpt_agents_with;
use share_alloc::envy::FptVariant;
use share_alloc::io::format_ratio;
use share_alloc::model::{Budget, ExtensionParams, Instance, Rational};
use share_alloc::welfare::{maximize_ewsa_simple, solve_uwsa};

fn main() -> share_alloc::error::Result<()> {
    let base = Instance::builder(4, 4)
        .utilities(vec![vec![6, 2, 1, 0], vec![5, 2, 0, 1], vec![1, 1, 4, 2], vec![0, 3, 3, 3]])
        .allocation(vec![vec![0], vec![1], vec![2], vec![3]])
        .sharing_clique()
        .attention_clique()
        .build()?;

    let half = Rational::new(1, 2);
    let one = Rational::from_integer(1);
    for (alpha, beta) in [(one, one), (half, one), (one, half), (half, half)] {
        let inst = base.with_extension(ExtensionParams::with_losses(alpha, beta))?;
        let u = solve_uwsa(&inst, 1, Rational::from_integer(0))?;
        let (e, _) = maximize_ewsa_simple(&inst)?;
        println!(
            "alpha {} beta {}: utilitarian {}, egalitarian {}",
            format_ratio(alpha),
            format_ratio(beta),
            format_ratio(u.optimum),
            format_ratio(e)
        );
    }

    let mut ext = ExtensionParams::default();
    for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        ext.edge_costs.insert((i, j), (i + j) as u64);
    }
    for budget in [0, 2, 4, 8] {
        ext.budget = Budget::Limited(budget);
        let inst = base.with_extension(ext.clone())?;
        let (e, w) = maximize_ewsa_simple(&inst)?;
        let envy_free = solve_ersa_fpt_agents_with(&inst, 0, FptVariant::Extended)?.is_some();
        println!(
            "budget {budget}: egalitarian {} using {} shares, envy-free possible: {envy_free}",
            format_ratio(e),
            w.len()
        );
    }
    Ok(())
}
