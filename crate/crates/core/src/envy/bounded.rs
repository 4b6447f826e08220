//! Exhaustive search over simple 2-sharings with few shared resources.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::matching::max_cardinality_bipartite_matching;
use crate::model::{AgentId, Evaluator, Instance, ResourceId, Sharing, Transfer};

/// Per donor, the resources worth trying: one per distinct utility column,
/// skipping resources nobody values.
fn donor_options(inst: &Instance, d: AgentId) -> Vec<ResourceId> {
    let n = inst.agent_count();
    let mut seen: Vec<Vec<u64>> = Vec::new();
    let mut out = Vec::new();
    for &r in inst.bundle(d) {
        let col: Vec<u64> = (0..n).map(|a| inst.utility(a, r)).collect();
        if col.iter().all(|&x| x == 0) || seen.contains(&col) {
            continue;
        }
        seen.push(col);
        out.push(r);
    }
    out
}

/// Number of search leaves: choose at most `s_max` donors, each with a
/// resource and a neighbour.
pub fn bounded_shared_estimate(instance: &Instance, s_max: usize) -> u128 {
    let n = instance.agent_count();
    // poly[s]: ways to pick s donors with their choices, ignoring clashes.
    let mut poly = vec![0u128; s_max + 1];
    poly[0] = 1;
    for d in 0..n {
        let w = (donor_options(instance, d).len() * instance.sharing_neighbors(d).len()) as u128;
        for s in (1..=s_max).rev() {
            poly[s] = poly[s].saturating_add(poly[s - 1].saturating_mul(w));
        }
    }
    poly.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

struct Search<'a> {
    inst: &'a Instance,
    ev: Evaluator<'a>,
    options: Vec<Vec<ResourceId>>,
    k: usize,
    s_max: usize,
    used: Vec<bool>,
    transfers: Vec<Transfer>,
}

impl Search<'_> {
    fn run(&mut self, d: AgentId) -> bool {
        let budget = self.inst.extension().budget;
        if d == self.inst.agent_count() {
            return budget.allows(self.ev.cost(&self.transfers)) && self.ev.envy_count(&self.transfers) <= self.k;
        }
        if self.run(d + 1) {
            return true;
        }
        if self.used[d] || self.transfers.len() == self.s_max {
            return false;
        }
        self.used[d] = true;
        for i in 0..self.options[d].len() {
            let resource = self.options[d][i];
            for &r in self.inst.sharing_neighbors(d) {
                if self.used[r] {
                    continue;
                }
                self.used[r] = true;
                self.transfers.push(Transfer { donor: d, recipient: r, resource });
                if budget.allows(self.ev.cost(&self.transfers)) && self.run(d + 1) {
                    return true;
                }
                self.transfers.pop();
                self.used[r] = false;
            }
        }
        self.used[d] = false;
        false
    }
}

/// Agents `x` and `y` such that swapping them maps the instance onto
/// itself, assuming identical utilities and no sharing costs.
fn swappable(inst: &Instance, x: AgentId, y: AgentId) -> bool {
    let values = |a: AgentId| {
        let mut v: Vec<u64> = inst.bundle(a).iter().map(|&r| inst.utility(0, r)).collect();
        v.sort_unstable();
        v
    };
    let others = |s: &[AgentId], me: AgentId, twin: AgentId| -> BTreeSet<AgentId> {
        s.iter().copied().filter(|&a| a != me && a != twin).collect()
    };
    values(x) == values(y)
        && others(inst.sharing_neighbors(x), x, y) == others(inst.sharing_neighbors(y), y, x)
        && others(inst.attention_out(x), x, y) == others(inst.attention_out(y), y, x)
        && others(inst.attention_in(x), x, y) == others(inst.attention_in(y), y, x)
        && inst.attention_out(x).contains(&y) == inst.attention_out(y).contains(&x)
}

/// Classes of interchangeable agents, each sorted.
fn twin_classes(inst: &Instance) -> Vec<Vec<AgentId>> {
    let mut classes: Vec<Vec<AgentId>> = Vec::new();
    for a in 0..inst.agent_count() {
        match classes.iter_mut().find(|c| swappable(inst, c[0], a)) {
            Some(c) => c.push(a),
            None => classes.push(vec![a]),
        }
    }
    classes
}

/// With identical utilities and donors keeping full value, only the values
/// received matter, and interchangeable agents can be relabelled freely.
/// Enumerates how many members of each class receive each value; the
/// lowest-numbered members receive, and a bipartite matching finds donors.
struct Collapsed<'a> {
    inst: &'a Instance,
    classes: Vec<Vec<AgentId>>,
    values: Vec<u64>,
    k: usize,
    s_max: usize,
    counts: Vec<Vec<usize>>,
    /// Scaled final value of every agent whose class is settled.
    final_value: Vec<Option<i128>>,
    nodes: u64,
    cap: u64,
}

impl Collapsed<'_> {
    fn applies(inst: &Instance) -> bool {
        let ext = inst.extension();
        inst.has_identical_utilities()
            && ext.full_donor_value()
            && (ext.budget.is_unbounded() || ext.edge_costs.is_empty())
    }

    fn run(&mut self, class: usize, value: usize, used: usize, in_class: usize) -> Result<Option<Vec<Transfer>>> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::TooLarge(format!("more than {} receiver patterns", self.cap)));
        }
        if class == self.classes.len() {
            return Ok(self.check());
        }
        if value == self.values.len() {
            self.settle(class, true);
            let hopeless = self.surely_envious() > self.k;
            let found = if hopeless { None } else { self.run(class + 1, 0, used, 0)? };
            self.settle(class, false);
            return Ok(found);
        }
        let room = (self.classes[class].len() - in_class).min(self.s_max - used);
        for c in 0..=room {
            self.counts[class][value] = c;
            if let Some(t) = self.run(class, value + 1, used + c, in_class + c)? {
                return Ok(Some(t));
            }
        }
        self.counts[class][value] = 0;
        Ok(None)
    }

    /// Fixes (or clears) the final values of a class's members.
    fn settle(&mut self, class: usize, on: bool) {
        let inst = self.inst;
        let scale = inst.scale();
        let gets: Vec<u64> = self.counts[class]
            .iter()
            .enumerate()
            .flat_map(|(v, &count)| std::iter::repeat_n(self.values[v], count))
            .collect();
        for (i, &a) in self.classes[class].iter().enumerate() {
            self.final_value[a] =
                on.then(|| scale.kept(inst.initial_value(0, a)) + gets.get(i).map_or(0, |&v| scale.received(v)));
        }
    }

    /// Settled agents that already see a settled agent above them.
    fn surely_envious(&self) -> usize {
        let inst = self.inst;
        (0..inst.agent_count())
            .filter(|&a| {
                let Some(mine) = self.final_value[a] else { return false };
                inst.attention_out(a).iter().any(|&b| self.final_value[b].is_some_and(|v| v > mine))
            })
            .count()
    }

    fn check(&self) -> Option<Vec<Transfer>> {
        let inst = self.inst;
        let n = inst.agent_count();
        let mut gets: Vec<Option<u64>> = vec![None; n];
        for (c, members) in self.classes.iter().enumerate() {
            let mut next = members.iter();
            for (v, &count) in self.counts[c].iter().enumerate() {
                for _ in 0..count {
                    gets[*next.next().expect("counts fit the class")] = Some(self.values[v]);
                }
            }
        }
        let recipients: Vec<AgentId> = (0..n).filter(|&a| gets[a].is_some()).collect();
        let offer = |d: AgentId, v: u64| inst.bundle(d).iter().copied().find(|&r| inst.utility(0, r) == v);
        let mut edges = Vec::new();
        for (i, &r) in recipients.iter().enumerate() {
            let v = gets[r].expect("recipient");
            for &d in inst.sharing_neighbors(r) {
                if gets[d].is_none() && offer(d, v).is_some() {
                    edges.push((i, d));
                }
            }
        }
        let m = max_cardinality_bipartite_matching(recipients.len(), n, &edges).expect("indices in range");
        if m.cardinality() < recipients.len() {
            return None;
        }
        let scale = inst.scale();
        let value: Vec<i128> =
            (0..n).map(|a| scale.kept(inst.initial_value(0, a)) + gets[a].map_or(0, |v| scale.received(v))).collect();
        let envious = (0..n).filter(|&a| inst.attention_out(a).iter().any(|&b| value[b] > value[a])).count();
        (envious <= self.k).then(|| {
            m.edges
                .iter()
                .map(|&(i, d)| {
                    let r = recipients[i];
                    Transfer {
                        donor: d,
                        recipient: r,
                        resource: offer(d, gets[r].expect("recipient")).expect("offered"),
                    }
                })
                .collect()
        })
    }
}

/// Is there a simple 2-sharing with at most `s_max` shared resources,
/// within the budget, leaving at most `k` agents envious?
pub fn solve_ersa_bounded_shared(instance: &Instance, k: usize, s_max: usize) -> Result<Option<Sharing>> {
    // Every share needs its own donor holding something somebody values.
    let donors = (0..instance.agent_count())
        .filter(|&d| !instance.sharing_neighbors(d).is_empty() && !donor_options(instance, d).is_empty())
        .count();
    let s_max = s_max.min(instance.agent_count() / 2).min(donors);
    let cap = crate::node_cap();
    if Collapsed::applies(instance) {
        let values: BTreeSet<u64> =
            (0..instance.resource_count()).map(|r| instance.utility(0, r)).filter(|&u| u > 0).collect();
        let values: Vec<u64> = values.into_iter().collect();
        let mut classes = twin_classes(instance);
        // Large classes first: settling them early makes the envy bound bite.
        classes.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));
        let mut c = Collapsed {
            final_value: vec![None; instance.agent_count()],
            inst: instance,
            counts: vec![vec![0; values.len()]; classes.len()],
            classes,
            values,
            k,
            s_max,
            nodes: 0,
            cap,
        };
        return Ok(c.run(0, 0, 0, 0)?.map(|t| Sharing::from_transfers(1, t)));
    }
    let estimate = bounded_shared_estimate(instance, s_max);
    if estimate > cap as u128 {
        return Err(Error::TooLarge(format!("up to {estimate} sharings with {s_max} shared resources, cap is {cap}")));
    }
    let n = instance.agent_count();
    let mut s = Search {
        inst: instance,
        ev: Evaluator::new(instance),
        options: (0..n).map(|d| donor_options(instance, d)).collect(),
        k,
        s_max,
        used: vec![false; n],
        transfers: Vec::new(),
    };
    Ok(s.run(0).then(|| Sharing::from_transfers(1, s.transfers)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::envious_agents;

    fn two_agents() -> Instance {
        Instance::builder(2, 2)
            .identical_utilities(vec![1, 2])
            .allocation(vec![vec![0], vec![1]])
            .sharing_edges([(0, 1)])
            .attention_arcs([(0, 1), (1, 0)])
            .build()
            .unwrap()
    }

    #[test]
    fn nothing_shared() {
        let inst = two_agents();
        assert!(solve_ersa_bounded_shared(&inst, 0, 0).unwrap().is_none());
        assert!(solve_ersa_bounded_shared(&inst, 1, 0).unwrap().unwrap().is_empty());
    }

    #[test]
    fn one_share() {
        let inst = two_agents();
        let w = solve_ersa_bounded_shared(&inst, 1, 1).unwrap().unwrap();
        assert!(envious_agents(&inst, &w).unwrap().count() <= 1);
        assert!(solve_ersa_bounded_shared(&inst, 0, 1).unwrap().is_none());
    }

    #[test]
    fn matches_bruteforce() {
        use crate::model::{Budget, ExtensionParams, Rational};
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for round in 0..300 {
            let n = rng.random_range(1..=6);
            let m = rng.random_range(0..=6);
            let identical = round % 2 == 0;
            let row: Vec<u64> = (0..m).map(|_| rng.random_range(0..4)).collect();
            let utilities = (0..n)
                .map(|_| if identical { row.clone() } else { (0..m).map(|_| rng.random_range(0..4)).collect() })
                .collect();
            let mut alloc = vec![Vec::new(); n];
            for r in 0..m {
                alloc[rng.random_range(0..n)].push(r);
            }
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let edges: Vec<_> = pairs.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
            let arcs: Vec<_> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && rng.random_bool(0.5))
                .collect::<Vec<_>>();
            let mut ext = ExtensionParams::default();
            ext.beta = Rational::new(rng.random_range(1..=2), 2);
            if round % 3 == 1 {
                ext.alpha = Rational::new(1, 2);
            }
            if round % 5 == 2 {
                for &e in &edges {
                    ext.edge_costs.insert(e, rng.random_range(0..2));
                }
                ext.budget = Budget::Limited(1);
            }
            let inst = Instance::builder(n, m)
                .utilities(utilities)
                .allocation(alloc)
                .sharing_edges(edges)
                .attention_arcs(arcs)
                .extension(ext)
                .build()
                .unwrap();
            let (min, _) = crate::oracle::min_envy_bruteforce(&inst, 1).unwrap();
            let s_max = n / 2;
            for k in [min.saturating_sub(1), min] {
                let got = solve_ersa_bounded_shared(&inst, k, s_max).unwrap();
                assert_eq!(got.is_some(), k >= min, "round {round} k {k}");
                if let Some(w) = got {
                    crate::model::validate_sharing(&inst, &w).unwrap();
                    assert!(envious_agents(&inst, &w).unwrap().count() <= k);
                    assert!(inst.extension().budget.allows(crate::model::sharing_cost(&inst, &w).unwrap()));
                }
            }
        }
    }

    #[test]
    fn twins() {
        let inst = Instance::builder(5, 2)
            .identical_utilities(vec![1, 1])
            .allocation(vec![vec![0], vec![1], vec![], vec![], vec![]])
            .sharing_clique()
            .attention_arcs([(2, 0), (2, 1), (3, 0), (3, 1), (4, 2), (4, 3)])
            .build()
            .unwrap();
        assert_eq!(twin_classes(&inst), vec![vec![0, 1], vec![2, 3], vec![4]]);
    }

    #[test]
    fn guard() {
        let inst = Instance::builder(30, 30)
            .utilities((0..30).map(|a| (0..30).map(|r| (a + r) as u64 % 7 + 1).collect()).collect())
            .allocation((0..30).map(|a| vec![a]).collect())
            .sharing_clique()
            .build()
            .unwrap();
        assert!(matches!(solve_ersa_bounded_shared(&inst, 0, 15), Err(Error::TooLarge(_))));
    }
}
