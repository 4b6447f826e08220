//! Instance generators from classic hard problems, with the index layouts
//! fixed so that witnesses can be read off directly.

pub mod clique;
pub mod independent_set;
pub mod multicolored;
pub mod n3dm;
pub mod sat;

pub use clique::{clique_witness, gen_clique_ersa};
pub use independent_set::{gen_independent_set_ersa, independent_set_witness};
pub use multicolored::{gen_multicolored_clique_ersa, multicolored_clique_witness};
pub use n3dm::{gen_n3dm_ewsa, n3dm_witness};
pub use sat::{gen_3sat_ersa, sat_witness, Cnf};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Instance, Rational};

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::instance(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::instance(format!("self-loop at {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }
}

/// An envy-reduction instance with its target number of envious agents.
#[derive(Debug, Clone)]
pub struct ErsaGadget {
    pub instance: Instance,
    pub k: usize,
}

/// An egalitarian-welfare instance with its sharing bound and target.
#[derive(Debug, Clone)]
pub struct EwsaGadget {
    pub instance: Instance,
    pub b: usize,
    pub k: Rational,
}

pub(crate) fn binomial2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}
