//! 3-CNF satisfiability to envy elimination with a unanimous utility.
//!
//! Layout: agent 0 is the leader, 1 the follower. Variable `v` owns agents
//! `2+4v ..= 5+4v`: the positive and negative value agents, then the dummy
//! holding a 3 and the dummy holding a 1 and a 2. Clauses follow in order,
//! each as (donor, recipient) per literal and then its root. Resources are
//! numbered in the order their owners appear, lowest value first.

use std::collections::BTreeSet;

use super::ErsaGadget;
use crate::error::{Error, Result};
use crate::model::{edge_key, Instance, Sharing, Transfer};

/// Formula over variables `1..=variables`; literals are nonzero integers,
/// negative for negated variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub variables: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.clauses.iter().enumerate() {
            if c.is_empty() || c.len() > 3 {
                return Err(Error::precondition(format!("clause {i} has {} literals", c.len())));
            }
            if let Some(&l) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > self.variables) {
                return Err(Error::precondition(format!("literal {l} in clause {i}")));
            }
        }
        Ok(())
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

struct Layout {
    agents: usize,
    resources: usize,
    /// Per clause: (donor, recipient) per literal, and the root.
    clauses: Vec<(Vec<(usize, usize)>, usize)>,
}

fn layout(cnf: &Cnf) -> Layout {
    let mut next = 2 + 4 * cnf.variables;
    let mut clauses = Vec::new();
    for c in &cnf.clauses {
        let pairs = (0..c.len()).map(|j| (next + 2 * j, next + 2 * j + 1)).collect();
        next += 2 * c.len();
        clauses.push((pairs, next));
        next += 1;
    }
    let literals: usize = cnf.clauses.iter().map(|c| c.len()).sum();
    Layout { agents: next, resources: 1 + 3 * cnf.variables + 3 * literals + cnf.clauses.len(), clauses }
}

fn value_agent(literal: i32) -> usize {
    let v = literal.unsigned_abs() as usize - 1;
    2 + 4 * v + (literal < 0) as usize
}

pub fn gen_3sat_ersa(cnf: &Cnf) -> Result<ErsaGadget> {
    cnf.validate()?;
    let lay = layout(cnf);
    let mut values = Vec::with_capacity(lay.resources);
    let mut alloc = vec![Vec::new(); lay.agents];
    let mut give = |agent: usize, value: u64, alloc: &mut Vec<Vec<usize>>| {
        alloc[agent].push(values.len());
        values.push(value);
    };
    give(0, 2, &mut alloc);
    let mut arcs = vec![(1, 0)];
    for v in 0..cnf.variables {
        let (pos, neg, d1, d2) = (2 + 4 * v, 3 + 4 * v, 4 + 4 * v, 5 + 4 * v);
        give(d1, 3, &mut alloc);
        give(d2, 1, &mut alloc);
        give(d2, 2, &mut alloc);
        arcs.extend([(pos, 1), (neg, 1), (d1, pos), (d1, neg), (d2, pos), (d2, neg)]);
    }
    for (c, (pairs, root)) in cnf.clauses.iter().zip(&lay.clauses) {
        for (&lit, &(donor, recipient)) in c.iter().zip(pairs) {
            give(donor, 1, &mut alloc);
            give(recipient, 1, &mut alloc);
            give(recipient, 1, &mut alloc);
            arcs.extend([(recipient, donor), (*root, recipient), (recipient, value_agent(lit))]);
        }
        give(*root, 2, &mut alloc);
    }
    let edges: BTreeSet<_> = arcs.iter().map(|&(a, b)| edge_key(a, b)).collect();
    let instance = Instance::builder(lay.agents, lay.resources)
        .identical_utilities(values)
        .allocation(alloc)
        .sharing_edges(edges)
        .attention_arcs(arcs)
        .build()?;
    Ok(ErsaGadget { instance, k: 0 })
}

/// The sharing from a satisfying assignment (`assignment[v]` is the value
/// of variable `v + 1`) under which nobody is envious.
pub fn sat_witness(cnf: &Cnf, assignment: &[bool]) -> Result<Sharing> {
    cnf.validate()?;
    if assignment.len() != cnf.variables || !cnf.satisfied_by(assignment) {
        return Err(Error::precondition("assignment does not satisfy the formula"));
    }
    let gadget = gen_3sat_ersa(cnf)?;
    let inst = &gadget.instance;
    let lay = layout(cnf);
    let mut t = vec![Transfer { donor: 0, recipient: 1, resource: inst.bundle(0)[0] }];
    for (v, &value) in assignment.iter().enumerate() {
        let (pos, neg, d1, d2) = (2 + 4 * v, 3 + 4 * v, 4 + 4 * v, 5 + 4 * v);
        let (two, three) = if value { (pos, neg) } else { (neg, pos) };
        t.push(Transfer { donor: d2, recipient: two, resource: inst.bundle(d2)[1] });
        t.push(Transfer { donor: d1, recipient: three, resource: inst.bundle(d1)[0] });
    }
    for (c, (pairs, root)) in cnf.clauses.iter().zip(&lay.clauses) {
        let sat =
            c.iter().position(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)).expect("satisfied clause");
        for (j, &(donor, recipient)) in pairs.iter().enumerate() {
            if j == sat {
                t.push(Transfer { donor: recipient, recipient: *root, resource: inst.bundle(recipient)[0] });
            } else {
                t.push(Transfer { donor, recipient, resource: inst.bundle(donor)[0] });
            }
        }
    }
    Ok(Sharing::from_transfers(1, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{envious_agents, validate_sharing};

    #[test]
    fn single_clause() {
        let cnf = Cnf { variables: 3, clauses: vec![vec![1, 2, 3]] };
        let g = gen_3sat_ersa(&cnf).unwrap();
        let inst = &g.instance;
        assert_eq!(inst.agent_count(), 2 + 12 + 7);
        assert!(inst.attention_matches_sharing());
        assert_eq!(envious_agents(inst, &Sharing::empty(1)).unwrap().envious.into_iter().collect::<Vec<_>>(), vec![1]);
        let w = sat_witness(&cnf, &[false, true, false]).unwrap();
        validate_sharing(inst, &w).unwrap();
        assert_eq!(envious_agents(inst, &w).unwrap().count(), 0);
        assert!(sat_witness(&cnf, &[false, false, false]).is_err());
    }

    #[test]
    fn empty_formula() {
        let g = gen_3sat_ersa(&Cnf { variables: 0, clauses: vec![] }).unwrap();
        assert_eq!(g.instance.agent_count(), 2);
    }

    #[test]
    fn malformed() {
        assert!(gen_3sat_ersa(&Cnf { variables: 1, clauses: vec![vec![2]] }).is_err());
        assert!(gen_3sat_ersa(&Cnf { variables: 1, clauses: vec![vec![]] }).is_err());
        assert!(gen_3sat_ersa(&Cnf { variables: 2, clauses: vec![vec![1, 2, 1, 2]] }).is_err());
    }
}
