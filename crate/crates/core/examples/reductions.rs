//! Building hardness gadgets and checking the witnesses their proofs
//! describe.
//!
//! Run with `cargo run --release --example reductions`.

use share_alloc::envy::{min_envy_auto, solve_ersa_fpt_agents};
use share_alloc::io::format_ratio;
use share_alloc::model::{envious_agents, welfare};
use share_alloc::reductions::{
    gen_3sat_ersa, gen_independent_set_ersa, gen_n3dm_ewsa, independent_set_witness, n3dm_witness, sat_witness, Cnf,
    Graph,
};
use share_alloc::welfare::solve_ewsa_bounded_exact;

fn main() -> share_alloc::error::Result<()> {
    // Two isolated vertices hold an independent set of size 2; a triangle does not.
    for (name, g) in [("two isolated", Graph::new(2, [])?), ("triangle", Graph::new(3, [(0, 1), (1, 2), (0, 2)])?)] {
        let gadget = gen_independent_set_ersa(&g, 2)?;
        let yes = solve_ersa_fpt_agents(&gadget.instance, gadget.k)?.is_some();
        println!("independent set on {name}: {} agents, k = {}, answer {yes}", gadget.instance.agent_count(), gadget.k);
    }
    let g = Graph::new(2, [])?;
    let w = independent_set_witness(&g, 2, &[0, 1])?;
    let gadget = gen_independent_set_ersa(&g, 2)?;
    println!("  proof witness leaves {} envious", envious_agents(&gadget.instance, &w)?.count());

    let cnf = Cnf { variables: 3, clauses: vec![vec![1, 2, 3], vec![-1, -2, 3]] };
    let gadget = gen_3sat_ersa(&cnf)?;
    let w = sat_witness(&cnf, &[true, false, false])?;
    println!(
        "3-SAT gadget: {} agents, proof witness leaves {} envious",
        gadget.instance.agent_count(),
        envious_agents(&gadget.instance, &w)?.count()
    );
    let (k, _, alg) = min_envy_auto(&gadget.instance)?;
    println!("  minimum envy {k} via {}", alg.name());

    let (x, y, z, t) = ([1], [1], [1], 3);
    let gadget = gen_n3dm_ewsa(&x, &y, &z, t)?;
    let w = n3dm_witness(&x, &y, &z, t, &[(0, 0, 0)])?;
    println!(
        "numerical matching gadget: target {}, proof witness reaches {}",
        format_ratio(gadget.k),
        format_ratio(welfare(&gadget.instance, &w)?.egalitarian)
    );
    for k in [gadget.k, gadget.k + 1] {
        let yes = solve_ewsa_bounded_exact(&gadget.instance, gadget.b, k)?.is_some();
        println!("  egalitarian welfare {} reachable: {yes}", format_ratio(k));
    }
    Ok(())
}
