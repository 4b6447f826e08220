//! Brute-force ground truth over every b-bounded 2-sharing.
//!
//! Sharings are enumerated over slots `(edge, resource)`: edges in
//! lexicographic order, resources ascending within an edge. Subsets of
//! slots come out in lexicographic order of their indicator vectors, so the
//! empty sharing is first and every optimum reported below is the first one
//! met in that order.

use crate::error::{Error, Result};
use crate::model::{Evaluator, Instance, Rational, Sharing, Transfer};

/// Lazy enumeration of all valid b-bounded 2-sharings of an instance.
pub struct SharingIter<'a> {
    bound: usize,
    slots: Vec<Transfer>,
    chosen: Vec<usize>,
    used: Vec<bool>,
    load: Vec<usize>,
    started: bool,
    done: bool,
    _instance: &'a Instance,
}

impl SharingIter<'_> {
    fn fits(&self, slot: usize) -> bool {
        let t = self.slots[slot];
        !self.used[t.resource] && self.load[t.donor] < self.bound && self.load[t.recipient] < self.bound
    }

    fn push(&mut self, slot: usize) {
        let t = self.slots[slot];
        self.used[t.resource] = true;
        self.load[t.donor] += 1;
        self.load[t.recipient] += 1;
        self.chosen.push(slot);
    }

    fn pop(&mut self) {
        let slot = self.chosen.pop().expect("nonempty");
        let t = self.slots[slot];
        self.used[t.resource] = false;
        self.load[t.donor] -= 1;
        self.load[t.recipient] -= 1;
    }

    fn advance(&mut self) -> bool {
        for j in (0..self.slots.len()).rev() {
            if self.chosen.last() == Some(&j) {
                self.pop();
            } else if self.fits(j) {
                self.push(j);
                return true;
            }
        }
        false
    }

    /// The transfers of the current position, valid until the next call.
    fn current(&self) -> Vec<Transfer> {
        self.chosen.iter().map(|&s| self.slots[s]).collect()
    }

    /// Like `next` but yields transfers instead of building a `Sharing`.
    pub fn next_transfers(&mut self) -> Option<Vec<Transfer>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(Vec::new());
        }
        if self.advance() {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

impl Iterator for SharingIter<'_> {
    type Item = Sharing;

    fn next(&mut self) -> Option<Sharing> {
        let bound = self.bound;
        self.next_transfers().map(|t| Sharing::from_transfers(bound, t))
    }
}

/// Upper bound on the number of sharings: every resource is either kept or
/// shared with one neighbour of its owner.
pub fn sharing_count_bound(instance: &Instance) -> u128 {
    (0..instance.resource_count()).fold(1u128, |acc, r| {
        let deg = instance.sharing_neighbors(instance.owner(r)).len() as u128;
        acc.saturating_mul(1 + deg)
    })
}

pub fn enumerate_sharings(instance: &Instance, bound: usize) -> Result<SharingIter<'_>> {
    if bound == 0 {
        return Err(Error::precondition("sharing bound must be at least 1"));
    }
    let cap = crate::node_cap();
    let estimate = sharing_count_bound(instance);
    if estimate > cap as u128 {
        return Err(Error::TooLarge(format!("brute force would visit up to {estimate} sharings, cap is {cap}")));
    }
    let mut slots = Vec::new();
    for &(i, j) in instance.sharing_edges() {
        let mut rs: Vec<_> = instance.bundle(i).iter().chain(instance.bundle(j)).copied().collect();
        rs.sort_unstable();
        for r in rs {
            let donor = instance.owner(r);
            let recipient = if donor == i { j } else { i };
            slots.push(Transfer { donor, recipient, resource: r });
        }
    }
    Ok(SharingIter {
        bound,
        slots,
        chosen: Vec::new(),
        used: vec![false; instance.resource_count()],
        load: vec![0; instance.agent_count()],
        started: false,
        done: false,
        _instance: instance,
    })
}

/// Minimum number of envious agents over all b-bounded 2-sharings within
/// the instance's budget, with the first optimal sharing.
pub fn min_envy_bruteforce(instance: &Instance, bound: usize) -> Result<(usize, Sharing)> {
    let ev = Evaluator::new(instance);
    let budget = instance.extension().budget;
    let mut it = enumerate_sharings(instance, bound)?;
    let mut best: Option<(usize, Vec<Transfer>)> = None;
    while let Some(t) = it.next_transfers() {
        if !budget.allows(ev.cost(&t)) {
            continue;
        }
        let e = ev.envy_count(&t);
        if best.as_ref().is_none_or(|b| e < b.0) {
            let stop = e == 0;
            best = Some((e, t));
            if stop {
                break;
            }
        }
    }
    let (e, t) = best.expect("the empty sharing is always admissible");
    Ok((e, Sharing::from_transfers(bound, t)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareOptimum {
    pub utilitarian: Rational,
    pub utilitarian_witness: Sharing,
    pub egalitarian: Rational,
    pub egalitarian_witness: Sharing,
}

/// Exact maximum utilitarian and egalitarian welfare over all b-bounded
/// 2-sharings within the instance's budget.
pub fn max_welfare_bruteforce(instance: &Instance, bound: usize) -> Result<WelfareOptimum> {
    let ev = Evaluator::new(instance);
    let budget = instance.extension().budget;
    let mut it = enumerate_sharings(instance, bound)?;
    let mut ut: Option<(i128, Vec<Transfer>)> = None;
    let mut eg: Option<(i128, Vec<Transfer>)> = None;
    while let Some(t) = it.next_transfers() {
        if !budget.allows(ev.cost(&t)) {
            continue;
        }
        let (u, e) = ev.welfare(&t);
        if ut.as_ref().is_none_or(|b| u > b.0) {
            ut = Some((u, t.clone()));
        }
        if eg.as_ref().is_none_or(|b| e > b.0) {
            eg = Some((e, t));
        }
    }
    let (u, ut) = ut.expect("the empty sharing is always admissible");
    let (e, eg) = eg.expect("the empty sharing is always admissible");
    let scale = ev.scale();
    Ok(WelfareOptimum {
        utilitarian: scale.to_rational(u),
        utilitarian_witness: Sharing::from_transfers(bound, ut),
        egalitarian: scale.to_rational(e),
        egalitarian_witness: Sharing::from_transfers(bound, eg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_sharing, Assignment, ExtensionParams};
    use std::collections::HashSet;

    fn two_agent(u: Vec<Vec<u64>>) -> Instance {
        Instance::builder(2, 2)
            .utilities(u)
            .allocation(vec![vec![0], vec![1]])
            .sharing_edges([(0, 1)])
            .attention_arcs([(0, 1), (1, 0)])
            .build()
            .unwrap()
    }

    #[test]
    fn three_sharings_on_one_edge() {
        let inst = two_agent(vec![vec![1, 2], vec![1, 2]]);
        let all: Vec<_> = enumerate_sharings(&inst, 1).unwrap().collect();
        assert_eq!(all.len(), 3);
        assert!(all[0].is_empty());
        let distinct: HashSet<_> = all.iter().map(|s| s.assignments().to_vec()).collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn no_edges_only_empty() {
        let inst = Instance::builder(3, 2).allocation(vec![vec![0], vec![1], vec![]]).build().unwrap();
        assert_eq!(enumerate_sharings(&inst, 2).unwrap().count(), 1);
    }

    #[test]
    fn count_is_p_plus_q_plus_one() {
        for p in 0..4 {
            for q in 0..4 {
                let inst = Instance::builder(2, p + q)
                    .allocation(vec![(0..p).collect(), (p..p + q).collect()])
                    .sharing_edges([(0, 1)])
                    .build()
                    .unwrap();
                assert_eq!(enumerate_sharings(&inst, 1).unwrap().count(), p + q + 1);
            }
        }
    }

    #[test]
    fn enumerated_sharings_are_valid_and_complete() {
        // K3 with two resources per agent at b = 2: compare with a filter
        // over all subsets of slots.
        let inst =
            Instance::builder(3, 4).allocation(vec![vec![0, 1], vec![2], vec![3]]).sharing_clique().build().unwrap();
        let got: HashSet<_> = enumerate_sharings(&inst, 2).unwrap().map(|s| s.assignments().to_vec()).collect();
        let mut slots = Vec::new();
        for &(i, j) in inst.sharing_edges() {
            for r in 0..4 {
                if inst.owner(r) == i || inst.owner(r) == j {
                    slots.push(Assignment { edge: (i, j), resource: r });
                }
            }
        }
        let mut expect = HashSet::new();
        for mask in 0u32..1 << slots.len() {
            let s = Sharing::new(2, (0..slots.len()).filter(|b| mask >> b & 1 == 1).map(|b| slots[b]));
            if validate_sharing(&inst, &s).is_ok() {
                expect.insert(s.assignments().to_vec());
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn min_envy_examples() {
        let inst = two_agent(vec![vec![1, 2], vec![1, 2]]);
        assert_eq!(min_envy_bruteforce(&inst, 1).unwrap().0, 1);
        let fair = two_agent(vec![vec![1, 1], vec![1, 1]]);
        let (e, w) = min_envy_bruteforce(&fair, 1).unwrap();
        assert_eq!(e, 0);
        assert!(w.is_empty());
    }

    #[test]
    fn welfare_examples() {
        let inst = two_agent(vec![vec![1, 4], vec![3, 1]]);
        let w = max_welfare_bruteforce(&inst, 1).unwrap();
        assert_eq!(w.utilitarian, Rational::from_integer(6));
        let none = Instance::builder(2, 2)
            .utilities(vec![vec![1, 4], vec![3, 1]])
            .allocation(vec![vec![0], vec![1]])
            .build()
            .unwrap();
        let w = max_welfare_bruteforce(&none, 1).unwrap();
        assert_eq!((w.utilitarian, w.egalitarian), (Rational::from_integer(2), Rational::from_integer(1)));
    }

    #[test]
    fn zero_budget_allows_only_free_edges() {
        let mut ext = ExtensionParams::default();
        ext.edge_costs.insert((0, 1), 1);
        ext.budget = crate::model::Budget::Limited(0);
        let inst = two_agent(vec![vec![1, 4], vec![3, 1]]).with_extension(ext).unwrap();
        let w = max_welfare_bruteforce(&inst, 1).unwrap();
        assert_eq!(w.utilitarian, Rational::from_integer(2));
        assert!(w.utilitarian_witness.is_empty());
    }

    #[test]
    fn cap_refuses_large_instances() {
        let inst = Instance::builder(8, 40)
            .allocation((0..8).map(|a| (a * 5..a * 5 + 5).collect()).collect())
            .sharing_clique()
            .build()
            .unwrap();
        assert!(matches!(enumerate_sharings(&inst, 1), Err(Error::TooLarge(_))));
    }
}
