//! Identical utilities under clique attention.
//!
//! Everyone values every bundle the same way, so an agent is unenvious
//! exactly when it ends at the highest final value `u*`. For each candidate
//! `u*` a matching decides how many agents can end there with nobody above.

use std::collections::BTreeSet;

use super::EnvyAnswer;
use crate::error::{Error, Result};
use crate::matching::{max_weight_matching, solve_wbmm, WeightedGraph};
use crate::model::{AgentId, Instance, ResourceId, Sharing, Transfer};

struct Values<'a> {
    inst: &'a Instance,
    /// Scaled initial value per agent.
    base: Vec<i128>,
}

impl Values<'_> {
    fn u(&self, r: ResourceId) -> u64 {
        self.inst.utility(0, r)
    }

    fn received(&self, i: AgentId, r: ResourceId) -> i128 {
        self.base[i] + self.inst.scale().received(self.u(r))
    }

    fn donated(&self, i: AgentId, r: ResourceId) -> i128 {
        self.base[i] - self.inst.scale().donor_loss(self.u(r))
    }
}

/// Best share over the edge `{i, j}` for target `u*`: the score counts
/// endpoints landing exactly on `u*`; nobody may exceed it.
fn best_pair(v: &Values, i: AgentId, j: AgentId, target: i128) -> Option<(usize, Transfer)> {
    let mut best: Option<(usize, Transfer)> = None;
    for (d, r) in [(i, j), (j, i)] {
        for &x in v.inst.bundle(d) {
            let (dv, rv) = (v.donated(d, x), v.received(r, x));
            if dv > target || rv > target {
                continue;
            }
            let score = (dv == target) as usize + (rv == target) as usize;
            let t = Transfer { donor: d, recipient: r, resource: x };
            if best.as_ref().is_none_or(|b| score > b.0) {
                best = Some((score, t));
            }
        }
    }
    best
}

/// Agents at `target` when donors keep full value: those already there,
/// plus one raised recipient per matching edge. `None` when the budget
/// cannot be met.
fn count_full_donor(v: &Values, target: i128) -> Option<(usize, Vec<Transfer>)> {
    let inst = v.inst;
    let n = inst.agent_count();
    if v.base.iter().any(|&b| b > target) {
        return None;
    }
    let at = |i: AgentId| v.base[i] == target;
    let raise = |r: AgentId, d: AgentId| -> Option<ResourceId> {
        if at(r) {
            return None;
        }
        inst.bundle(d).iter().copied().find(|&x| v.received(r, x) == target)
    };
    let mut g = WeightedGraph::new(n);
    let mut how = std::collections::BTreeMap::new();
    for &(i, j) in inst.sharing_edges() {
        let t = raise(i, j)
            .map(|x| Transfer { donor: j, recipient: i, resource: x })
            .or_else(|| raise(j, i).map(|x| Transfer { donor: i, recipient: j, resource: x }));
        if let Some(t) = t {
            g.add_edge(i, j, inst.edge_cost(i, j) as i128).expect("simple graph");
            how.insert((i, j), t);
        }
    }
    let base_count = (0..n).filter(|&i| at(i)).count();
    let mut unit = WeightedGraph::new(n);
    for &(a, b, _) in g.edges() {
        unit.add_edge(a, b, 1).expect("simple graph");
    }
    let most = max_weight_matching(&unit);
    let edges = match inst.extension().budget {
        crate::model::Budget::Unbounded => most.edges,
        crate::model::Budget::Limited(b) => {
            (0..=most.cardinality())
                .rev()
                .find_map(|k2| solve_wbmm(&g, b as i128, k2))
                .expect("the empty matching is free")
                .edges
        }
    };
    let transfers: Vec<Transfer> = edges.iter().map(|e| how[e]).collect();
    Some((base_count + transfers.len(), transfers))
}

/// Donors lose value: every agent is idle or in one pair, agents above
/// `u*` must donate, and each pair scores the endpoints landing on `u*`.
fn count_lossy(v: &Values, target: i128) -> Option<(usize, Vec<Transfer>)> {
    let inst = v.inst;
    let n = inst.agent_count();
    let forced: Vec<bool> = v.base.iter().map(|&b| b > target).collect();
    let idle: Vec<usize> = (0..n).map(|i| (v.base[i] == target) as usize).collect();
    let big = 2 * n as i128 + 3;
    let mut g = WeightedGraph::new(n);
    let mut how = std::collections::BTreeMap::new();
    for &(i, j) in inst.sharing_edges() {
        let Some((score, t)) = best_pair(v, i, j, target) else { continue };
        let w = score as i128 - idle[i] as i128 - idle[j] as i128 + big * (forced[i] as i128 + forced[j] as i128);
        if w > 0 {
            g.add_edge(i, j, w).expect("simple graph");
            how.insert((i, j), t);
        }
    }
    let m = max_weight_matching(&g);
    let mut matched = vec![false; n];
    for &(a, b) in &m.edges {
        matched[a] = true;
        matched[b] = true;
    }
    if (0..n).any(|i| forced[i] && !matched[i]) {
        return None;
    }
    let forced_count = forced.iter().filter(|&&f| f).count() as i128;
    let count = idle.iter().sum::<usize>() as i128 + m.total_weight - big * forced_count;
    let transfers = m.edges.iter().map(|e| how[e]).collect();
    Some((count as usize, transfers))
}

/// Minimum envy when all agents share one utility function and everyone
/// pays attention to everyone.
pub fn solve_ersa_identical_clique(instance: &Instance, k: usize) -> Result<EnvyAnswer> {
    if !instance.has_identical_utilities() {
        return Err(Error::precondition("utilities must be identical"));
    }
    if !instance.attention_is_bidirectional_clique() {
        return Err(Error::precondition("attention must be a bidirectional clique"));
    }
    let full_donor = instance.extension().full_donor_value();
    if !full_donor && !instance.extension().budget.is_unbounded() {
        return Err(Error::Unsupported("identical-utility clique with donor losses and a budget".into()));
    }
    let n = instance.agent_count();
    let scale = instance.scale();
    let v = Values { inst: instance, base: (0..n).map(|i| scale.kept(instance.initial_value(0, i))).collect() };
    let top = *v.base.iter().max().expect("at least one agent");

    let mut candidates = BTreeSet::new();
    candidates.insert(top);
    for &(i, j) in instance.sharing_edges() {
        for (d, r) in [(i, j), (j, i)] {
            for &x in instance.bundle(d) {
                candidates.insert(v.received(r, x));
                if !full_donor {
                    candidates.insert(v.donated(d, x));
                    candidates.insert(v.base[r]);
                }
            }
        }
    }
    if !full_donor {
        candidates.extend(v.base.iter().copied());
    }

    let mut best: Option<(usize, Vec<Transfer>)> = None;
    for &target in candidates.iter().filter(|&&c| !full_donor || c >= top) {
        let got = if full_donor { count_full_donor(&v, target) } else { count_lossy(&v, target) };
        if let Some((count, t)) = got {
            if best.as_ref().is_none_or(|b| count > b.0) {
                best = Some((count, t));
            }
        }
    }
    let (count, transfers) = best.expect("the highest initial value is always reachable");
    let min_envy = n - count;
    Ok(EnvyAnswer { yes: min_envy <= k, min_envy, witness: Sharing::from_transfers(1, transfers) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{envious_agents, sharing_cost, validate_sharing, Budget, ExtensionParams, Rational};
    use crate::oracle::min_envy_bruteforce;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clique(row: Vec<u64>, alloc: Vec<Vec<usize>>) -> Instance {
        Instance::builder(alloc.len(), row.len())
            .identical_utilities(row)
            .allocation(alloc)
            .sharing_clique()
            .attention_clique()
            .build()
            .unwrap()
    }

    #[test]
    fn equal_bundles() {
        let inst = clique(vec![2, 2, 2], vec![vec![0], vec![1], vec![2]]);
        let a = solve_ersa_identical_clique(&inst, 0).unwrap();
        assert!(a.yes);
        assert_eq!(a.min_envy, 0);
    }

    #[test]
    fn three_agents() {
        let inst = clique(vec![4, 2, 2], vec![vec![0], vec![1], vec![2]]);
        let a = solve_ersa_identical_clique(&inst, 0).unwrap();
        assert_eq!(a.min_envy, 1);
        assert!(!a.yes);
        assert_eq!(envious_agents(&inst, &a.witness).unwrap().count(), 1);
    }

    #[test]
    fn preconditions() {
        let inst = Instance::builder(2, 2)
            .utilities(vec![vec![1, 2], vec![2, 1]])
            .allocation(vec![vec![0], vec![1]])
            .attention_clique()
            .build()
            .unwrap();
        assert!(solve_ersa_identical_clique(&inst, 0).is_err());
        let no_clique =
            Instance::builder(2, 2).identical_utilities(vec![1, 2]).allocation(vec![vec![0], vec![1]]).build().unwrap();
        assert!(solve_ersa_identical_clique(&no_clique, 0).is_err());
    }

    fn random_instance(rng: &mut ChaCha8Rng, lossy: bool, costly: bool) -> Instance {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(0..=6);
        let row = (0..m).map(|_| rng.random_range(0..6)).collect();
        let mut alloc = vec![Vec::new(); n];
        for r in 0..m {
            alloc[rng.random_range(0..n)].push(r);
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.7) {
                    edges.push((i, j));
                }
            }
        }
        let mut ext = ExtensionParams::default();
        if lossy {
            ext.alpha = Rational::new(rng.random_range(0..=3), 3);
        }
        ext.beta = Rational::new(rng.random_range(1..=2), 2);
        if costly {
            for &e in &edges {
                ext.edge_costs.insert(e, rng.random_range(0..3));
            }
            ext.budget = Budget::Limited(rng.random_range(0..4));
        }
        Instance::builder(n, m)
            .identical_utilities(row)
            .allocation(alloc)
            .sharing_edges(edges)
            .attention_clique()
            .extension(ext)
            .build()
            .unwrap()
    }

    #[test]
    fn matches_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..300 {
            let (lossy, costly) = match round % 3 {
                0 => (false, false),
                1 => (false, true),
                _ => (true, false),
            };
            let inst = random_instance(&mut rng, lossy, costly);
            let a = solve_ersa_identical_clique(&inst, 0).unwrap();
            let (expect, _) = min_envy_bruteforce(&inst, 1).unwrap();
            assert_eq!(a.min_envy, expect, "round {round}");
            validate_sharing(&inst, &a.witness).unwrap();
            assert_eq!(envious_agents(&inst, &a.witness).unwrap().count(), expect);
            assert!(inst.extension().budget.allows(sharing_cost(&inst, &a.witness).unwrap()));
        }
    }
}
