//! Minimizing the number of envious agents with simple 2-sharings.

pub mod bounded;
pub mod clique;
pub mod decomposition;
pub mod fpt;
pub mod treewidth;

pub use bounded::solve_ersa_bounded_shared;
pub use clique::solve_ersa_identical_clique;
pub use decomposition::{decompose, NiceTreeDecomposition, TreeDecomposition};
pub use fpt::{
    feasible_realization_exists, min_envy_fpt, solve_ersa_fpt_agents, solve_ersa_fpt_agents_with, FptVariant,
    SharingConfiguration,
};
pub use treewidth::solve_ersa_treewidth;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Instance, Sharing};

/// Answer of the solvers that compute the minimum outright. `witness`
/// attains `min_envy` whether or not `yes` holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyAnswer {
    pub yes: bool,
    pub min_envy: usize,
    pub witness: Sharing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    IdenticalClique,
    Treewidth,
    FptAgents,
    BoundedShared,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::IdenticalClique => "identical-clique",
            Algorithm::Treewidth => "treewidth",
            Algorithm::FptAgents => "fpt-agents",
            Algorithm::BoundedShared => "bounded-shared",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoAnswer {
    pub yes: bool,
    pub witness: Option<Sharing>,
    pub algorithm: Algorithm,
    /// Set when the chosen engine computes the minimum outright.
    pub min_envy: Option<usize>,
}

/// Widest decomposition the automatic dispatch hands to the dynamic program.
pub const AUTO_MAX_WIDTH: usize = 4;

/// Nice decomposition of the sharing graph built with [`decompose`].
pub fn nice_decomposition(instance: &Instance) -> NiceTreeDecomposition {
    let n = instance.agent_count();
    let td = decompose(n, instance.sharing_edges());
    NiceTreeDecomposition::from_tree_decomposition(&td, n, instance.sharing_edges())
        .expect("built-in decompositions are valid")
}

enum Route {
    IdenticalClique,
    Treewidth(NiceTreeDecomposition),
    BoundedShared(usize),
    FptAgents,
}

fn route(instance: &Instance) -> Route {
    let ext = instance.extension();
    if instance.has_identical_utilities()
        && instance.attention_is_bidirectional_clique()
        && (ext.full_donor_value() || ext.budget.is_unbounded())
    {
        return Route::IdenticalClique;
    }
    if instance.attention_matches_sharing() {
        let nice = nice_decomposition(instance);
        if nice.width() <= AUTO_MAX_WIDTH {
            return Route::Treewidth(nice);
        }
    }
    let n = instance.agent_count();
    let cap = crate::node_cap() as u128;
    if fpt::fpt_work_estimate(n) > cap && bounded::bounded_shared_estimate(instance, n / 2) <= cap {
        return Route::BoundedShared(n / 2);
    }
    Route::FptAgents
}

/// Picks an engine from the instance's structure and answers whether at
/// most `k` agents can be left envious.
pub fn solve_ersa_auto(instance: &Instance, k: i64) -> Result<AutoAnswer> {
    if k < 0 {
        return Err(Error::precondition(format!("k must be nonnegative, got {k}")));
    }
    let k = k as usize;
    let from_answer = |a: EnvyAnswer, algorithm| AutoAnswer {
        yes: a.yes,
        witness: a.yes.then_some(a.witness),
        algorithm,
        min_envy: Some(a.min_envy),
    };
    let from_witness =
        |w: Option<Sharing>, algorithm| AutoAnswer { yes: w.is_some(), witness: w, algorithm, min_envy: None };
    Ok(match route(instance) {
        Route::IdenticalClique => from_answer(solve_ersa_identical_clique(instance, k)?, Algorithm::IdenticalClique),
        Route::Treewidth(nice) => from_answer(solve_ersa_treewidth(instance, &nice, k)?, Algorithm::Treewidth),
        Route::BoundedShared(s) => from_witness(solve_ersa_bounded_shared(instance, k, s)?, Algorithm::BoundedShared),
        Route::FptAgents => from_witness(solve_ersa_fpt_agents(instance, k)?, Algorithm::FptAgents),
    })
}

/// Minimum number of envious agents with a witness, using the engine
/// [`solve_ersa_auto`] would pick.
pub fn min_envy_auto(instance: &Instance) -> Result<(usize, Sharing, Algorithm)> {
    let n = instance.agent_count();
    Ok(match route(instance) {
        Route::IdenticalClique => {
            let a = solve_ersa_identical_clique(instance, 0)?;
            (a.min_envy, a.witness, Algorithm::IdenticalClique)
        }
        Route::Treewidth(nice) => {
            let a = solve_ersa_treewidth(instance, &nice, 0)?;
            (a.min_envy, a.witness, Algorithm::Treewidth)
        }
        Route::BoundedShared(s) => {
            let mut found = None;
            for k in 0..=n {
                if let Some(w) = solve_ersa_bounded_shared(instance, k, s)? {
                    found = Some((k, w, Algorithm::BoundedShared));
                    break;
                }
            }
            found.expect("k = n always admits the empty sharing")
        }
        Route::FptAgents => {
            let (k, w) = min_envy_fpt(instance)?;
            (k, w, Algorithm::FptAgents)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_identical_clique() {
        let inst = Instance::builder(3, 3)
            .identical_utilities(vec![4, 2, 2])
            .allocation(vec![vec![0], vec![1], vec![2]])
            .sharing_clique()
            .attention_clique()
            .build()
            .unwrap();
        let a = solve_ersa_auto(&inst, 1).unwrap();
        assert_eq!(a.algorithm, Algorithm::IdenticalClique);
        assert_eq!(a.yes, solve_ersa_identical_clique(&inst, 1).unwrap().yes);
    }

    #[test]
    fn routes_small_general_to_fpt() {
        let inst = Instance::builder(4, 4)
            .utilities(vec![vec![1, 2, 3, 4], vec![4, 3, 2, 1], vec![1, 1, 1, 1], vec![0, 5, 0, 5]])
            .allocation(vec![vec![0], vec![1], vec![2], vec![3]])
            .sharing_clique()
            .attention_arcs([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
            .build()
            .unwrap();
        let (min, _) = crate::oracle::min_envy_bruteforce(&inst, 1).unwrap();
        for k in 0..4 {
            let a = solve_ersa_auto(&inst, k).unwrap();
            assert_eq!(a.algorithm, Algorithm::FptAgents);
            assert_eq!(a.yes, k as usize >= min);
        }
    }

    #[test]
    fn negative_k() {
        let inst = Instance::builder(1, 0).allocation(vec![vec![]]).build().unwrap();
        assert!(matches!(solve_ersa_auto(&inst, -1), Err(Error::Precondition(_))));
    }

    #[test]
    fn minimum_matches_bruteforce() {
        use crate::random::{generate_random, AttentionModel, GraphModel};
        let shapes = [
            (GraphModel::Path, AttentionModel::SameAsSharingBidirected),
            (GraphModel::Clique, AttentionModel::Graph(GraphModel::Clique)),
            (GraphModel::ErdosRenyi(0.5), AttentionModel::Graph(GraphModel::ErdosRenyi(0.4))),
        ];
        for seed in 0..30 {
            let (g, a) = shapes[seed as usize % 3];
            let inst = generate_random(seed, 5, 5, g, a, 4).unwrap();
            let (k, w, _) = min_envy_auto(&inst).unwrap();
            assert_eq!(k, crate::oracle::min_envy_bruteforce(&inst, 1).unwrap().0, "seed {seed}");
            assert_eq!(crate::model::envious_agents(&inst, &w).unwrap().count(), k);
        }
    }
}
