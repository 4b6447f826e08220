//! Seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AgentId, Instance};

/// Shape of a random graph on the agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    Clique,
    /// Every pair independently with probability `p`.
    ErdosRenyi(f64),
    Path,
    /// Uniform random recursive tree: agent `v` hangs below a uniform
    /// earlier agent.
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttentionModel {
    /// Arcs drawn from the model directly. Erdős–Rényi draws every ordered
    /// pair on its own; the other shapes are taken in both directions.
    Graph(GraphModel),
    SameAsSharingBidirected,
}

impl GraphModel {
    fn check(self) -> Result<()> {
        match self {
            GraphModel::ErdosRenyi(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::precondition(format!("edge probability {p} outside [0,1]")))
            }
            _ => Ok(()),
        }
    }

    fn edges(self, n: usize, rng: &mut ChaCha8Rng) -> Vec<(AgentId, AgentId)> {
        match self {
            GraphModel::Clique => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
            GraphModel::ErdosRenyi(p) => {
                let mut out = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if rng.random_bool(p) {
                            out.push((i, j));
                        }
                    }
                }
                out
            }
            GraphModel::Path => (1..n).map(|v| (v - 1, v)).collect(),
            GraphModel::Tree => (1..n).map(|v| (rng.random_range(0..v), v)).collect(),
        }
    }
}

impl FromStr for GraphModel {
    type Err = Error;

    /// Accepts `clique`, `path`, `tree`, `erdos_renyi:P` and `erdos_renyi(P)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let model = match s {
            "clique" => GraphModel::Clique,
            "path" => GraphModel::Path,
            "tree" => GraphModel::Tree,
            _ => {
                let p = s
                    .strip_prefix("erdos_renyi:")
                    .or_else(|| s.strip_prefix("erdos_renyi(").and_then(|r| r.strip_suffix(')')))
                    .ok_or_else(|| Error::precondition(format!("unknown graph model {s:?}")))?;
                let p = p.trim().parse().map_err(|_| Error::precondition(format!("bad edge probability {p:?}")))?;
                GraphModel::ErdosRenyi(p)
            }
        };
        model.check()?;
        Ok(model)
    }
}

impl FromStr for AttentionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "same_as_sharing_bidirected" {
            Ok(AttentionModel::SameAsSharingBidirected)
        } else {
            s.parse().map(AttentionModel::Graph)
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphModel::Clique => f.write_str("clique"),
            GraphModel::ErdosRenyi(p) => write!(f, "erdos_renyi:{p}"),
            GraphModel::Path => f.write_str("path"),
            GraphModel::Tree => f.write_str("tree"),
        }
    }
}

/// Draws an instance: sharing graph, attention arcs, owners, then
/// utilities, all from one ChaCha8 stream seeded with `seed`.
pub fn generate_random(
    seed: u64,
    n: usize,
    m: usize,
    sharing_model: GraphModel,
    attention_model: AttentionModel,
    u_max: u64,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::precondition("at least one agent is required"));
    }
    sharing_model.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sharing = sharing_model.edges(n, &mut rng);
    let arcs: Vec<(AgentId, AgentId)> = match attention_model {
        AttentionModel::SameAsSharingBidirected => sharing.iter().flat_map(|&(i, j)| [(i, j), (j, i)]).collect(),
        AttentionModel::Graph(GraphModel::ErdosRenyi(p)) => {
            GraphModel::ErdosRenyi(p).check()?;
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.random_bool(p) {
                        out.push((i, j));
                    }
                }
            }
            out
        }
        AttentionModel::Graph(g) => g.edges(n, &mut rng).into_iter().flat_map(|(i, j)| [(i, j), (j, i)]).collect(),
    };
    let mut allocation = vec![Vec::new(); n];
    for r in 0..m {
        allocation[rng.random_range(0..n)].push(r);
    }
    let utilities = (0..n).map(|_| (0..m).map(|_| rng.random_range(0..=u_max)).collect()).collect();
    Instance::builder(n, m)
        .utilities(utilities)
        .allocation(allocation)
        .sharing_edges(sharing)
        .attention_arcs(arcs)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::instance_to_json;

    fn er(p: f64) -> GraphModel {
        GraphModel::ErdosRenyi(p)
    }

    #[test]
    fn deterministic_per_seed() {
        let draw = |seed| {
            let inst = generate_random(seed, 6, 9, er(0.5), AttentionModel::Graph(er(0.3)), 10).unwrap();
            instance_to_json(&inst)
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn extreme_probabilities() {
        let a = AttentionModel::SameAsSharingBidirected;
        assert!(generate_random(1, 7, 3, er(0.0), a, 5).unwrap().sharing_edges().is_empty());
        assert_eq!(generate_random(1, 7, 3, er(1.0), a, 5).unwrap().sharing_edges().len(), 21);
        assert!(generate_random(1, 7, 3, er(1.5), a, 5).is_err());
    }

    #[test]
    fn shapes() {
        let a = AttentionModel::SameAsSharingBidirected;
        let path = generate_random(2, 5, 4, GraphModel::Path, a, 3).unwrap();
        assert_eq!(path.sharing_edges(), &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(path.attention_matches_sharing());
        let tree = generate_random(2, 9, 4, GraphModel::Tree, AttentionModel::Graph(GraphModel::Clique), 3).unwrap();
        assert_eq!(tree.sharing_edges().len(), 8);
        assert!(tree.attention_is_bidirectional_clique());
        assert!(tree.utilities().iter().flatten().all(|&u| u <= 3));
    }

    #[test]
    fn parsing() {
        assert_eq!("erdos_renyi:0.25".parse::<GraphModel>().unwrap(), er(0.25));
        assert_eq!("erdos_renyi(1)".parse::<GraphModel>().unwrap(), er(1.0));
        assert_eq!("tree".parse::<AttentionModel>().unwrap(), AttentionModel::Graph(GraphModel::Tree));
        assert!("erdos_renyi:2".parse::<GraphModel>().is_err());
        assert!("star".parse::<AttentionModel>().is_err());
    }
}
