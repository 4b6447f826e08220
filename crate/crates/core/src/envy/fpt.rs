//! Envy reduction by guessing target agents and sharing configurations.
//!
//! For a set `C` of agents that must end up unenvious, a configuration is a
//! set of vertex-disjoint donor/recipient arcs along sharing edges. Which
//! resource travels along each arc is decided by pruning per-arc candidate
//! sets until every envy constraint of a target agent has support.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{AgentId, Evaluator, Instance, ResourceId, Sharing, Transfer, ValueScale};

/// A target set together with vertex-disjoint `(donor, recipient)` arcs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SharingConfiguration {
    pub targets: BTreeSet<AgentId>,
    pub arcs: Vec<(AgentId, AgentId)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Donor,
    Recipient,
}

pub(crate) struct Context<'a> {
    inst: &'a Instance,
    ev: Evaluator<'a>,
    scale: ValueScale,
    /// Base-model shortcuts: arcs only into the targets, recipients pick
    /// their favourite resource.
    base_rules: bool,
}

/// Which form of the configuration search to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FptVariant {
    /// Base rules when donors keep full value, extended rules otherwise.
    #[default]
    Auto,
    /// Base rules; needs `alpha = 1`.
    Base,
    /// Extended rules: arcs to any agent and an exact search over resource
    /// choices, valid for every loss and budget setting.
    Extended,
}

enum Constraint {
    /// `own(viewer, x_own) >= seen(viewer, owner, x_seen)`.
    Binary {
        viewer: AgentId,
        owner: AgentId,
        own: usize,
        seen: usize,
    },
    Unary {
        viewer: AgentId,
        owner: AgentId,
        var: usize,
    },
}

impl<'a> Context<'a> {
    pub(crate) fn new(inst: &'a Instance) -> Self {
        Self::with_variant(inst, FptVariant::Auto)
    }

    fn with_variant(inst: &'a Instance, variant: FptVariant) -> Self {
        let ev = Evaluator::new(inst);
        Context {
            inst,
            scale: ev.scale(),
            ev,
            base_rules: match variant {
                FptVariant::Auto | FptVariant::Base => inst.extension().full_donor_value(),
                FptVariant::Extended => false,
            },
        }
    }

    #[inline]
    fn shift(&self, viewer: AgentId, role: Role, x: Option<ResourceId>) -> i128 {
        let Some(r) = x else { return 0 };
        let u = self.inst.utility(viewer, r);
        match role {
            Role::Recipient => self.scale.received(u),
            Role::Donor => -self.scale.donor_loss(u),
        }
    }

    /// Arcs a configuration for `targets` may use.
    fn arc_allowed(&self, recipient: AgentId, in_c: &[bool]) -> bool {
        // Once donors lose value, sharing with an agent outside the targets
        // can still help by making the donor less enviable.
        in_c[recipient] || !self.base_rules
    }

    /// Per-arc resources (`None`: nothing shared) under which no target is
    /// envious, if any.
    pub(crate) fn realize(&self, in_c: &[bool], arcs: &[(AgentId, AgentId)]) -> Option<Vec<Option<ResourceId>>> {
        let inst = self.inst;
        let n = inst.agent_count();
        let cost: u64 = arcs.iter().map(|&(d, r)| inst.edge_cost(d, r)).sum();
        if !inst.extension().budget.allows(cost) {
            return None;
        }
        let mut var_of: Vec<Option<(usize, Role)>> = vec![None; n];
        let mut domains: Vec<Vec<Option<ResourceId>>> = Vec::with_capacity(arcs.len());
        for (k, &(d, r)) in arcs.iter().enumerate() {
            var_of[d] = Some((k, Role::Donor));
            var_of[r] = Some((k, Role::Recipient));
            let mut dom = vec![None];
            dom.extend(inst.bundle(d).iter().map(|&x| Some(x)));
            domains.push(dom);
        }

        let own = |i: AgentId, x: Option<ResourceId>| -> i128 {
            let base = self.ev.base(i, i);
            match var_of[i] {
                Some((_, role)) => base + self.shift(i, role, x),
                None => base,
            }
        };
        let seen = |i: AgentId, j: AgentId, y: Option<ResourceId>| -> i128 {
            let base = self.ev.base(i, j);
            match var_of[j] {
                Some((_, role)) => base + self.shift(i, role, y),
                None => base,
            }
        };

        let mut constraints = Vec::new();
        for i in (0..n).filter(|&i| in_c[i]) {
            for &j in inst.attention_out(i) {
                match (var_of[i], var_of[j]) {
                    (None, None) => {
                        if own(i, None) < seen(i, j, None) {
                            return None;
                        }
                    }
                    (Some((a, _)), Some((b, _))) if a != b => {
                        constraints.push(Constraint::Binary { viewer: i, owner: j, own: a, seen: b });
                    }
                    (Some((a, _)), _) | (None, Some((a, _))) => {
                        constraints.push(Constraint::Unary { viewer: i, owner: j, var: a });
                    }
                }
            }
        }

        for c in &constraints {
            if let Constraint::Unary { viewer, owner, var } = *c {
                let (vi, vj) = (var_of[viewer].is_some(), var_of[owner].is_some());
                domains[var].retain(|&x| {
                    let o = own(viewer, if vi { x } else { None });
                    let s = seen(viewer, owner, if vj { x } else { None });
                    o >= s
                });
                if domains[var].is_empty() {
                    return None;
                }
            }
        }

        // Remove unsupported values until nothing changes.
        loop {
            let mut changed = false;
            for c in &constraints {
                let Constraint::Binary { viewer, owner, own: a, seen: b } = *c else { continue };
                let best_own = domains[a].iter().map(|&x| own(viewer, x)).max().expect("nonempty");
                let before = domains[b].len();
                domains[b].retain(|&y| seen(viewer, owner, y) <= best_own);
                if domains[b].is_empty() {
                    return None;
                }
                let least_seen = domains[b].iter().map(|&y| seen(viewer, owner, y)).min().expect("nonempty");
                let before_a = domains[a].len();
                domains[a].retain(|&x| own(viewer, x) >= least_seen);
                if domains[a].is_empty() {
                    return None;
                }
                changed |= domains[b].len() != before || domains[a].len() != before_a;
            }
            if !changed {
                break;
            }
        }

        if self.base_rules {
            // Donors keep their value, so each recipient may take its
            // favourite surviving resource: every value left on the other
            // side of a constraint is supported by that maximum.
            let choice = arcs
                .iter()
                .zip(&domains)
                .map(|(&(_, r), dom)| {
                    *dom.iter().max_by_key(|&&x| (own(r, x), x.is_some(), std::cmp::Reverse(x))).expect("nonempty")
                })
                .collect();
            return Some(choice);
        }

        let mut choice = vec![None; arcs.len()];
        let binaries: Vec<_> = constraints
            .iter()
            .filter_map(|c| match *c {
                Constraint::Binary { viewer, owner, own, seen } => Some((viewer, owner, own, seen)),
                Constraint::Unary { .. } => None,
            })
            .collect();
        let ok = backtrack(0, &domains, &mut choice, &|k: usize, choice: &[Option<ResourceId>]| {
            binaries.iter().all(|&(i, j, a, b)| {
                if a.max(b) != k {
                    return true;
                }
                own(i, choice[a]) >= seen(i, j, choice[b])
            })
        });
        ok.then_some(choice)
    }
}

fn backtrack(
    k: usize,
    domains: &[Vec<Option<ResourceId>>],
    choice: &mut Vec<Option<ResourceId>>,
    consistent: &dyn Fn(usize, &[Option<ResourceId>]) -> bool,
) -> bool {
    if k == domains.len() {
        return true;
    }
    for &x in &domains[k] {
        choice[k] = x;
        if consistent(k, choice) && backtrack(k + 1, domains, choice, consistent) {
            return true;
        }
    }
    false
}

/// Checks whether the configuration has a realization leaving no target
/// agent envious; returns the resource per arc (`None`: the arc stays
/// unused).
pub fn feasible_realization_exists(
    instance: &Instance,
    config: &SharingConfiguration,
) -> Result<Option<Vec<Option<ResourceId>>>> {
    let n = instance.agent_count();
    let ctx = Context::new(instance);
    let mut in_c = vec![false; n];
    for &a in &config.targets {
        if a >= n {
            return Err(Error::precondition(format!("target {a} out of range")));
        }
        in_c[a] = true;
    }
    let mut touched = vec![false; n];
    for &(d, r) in &config.arcs {
        if d >= n || r >= n || d == r {
            return Err(Error::precondition(format!("bad arc ({d},{r})")));
        }
        if !instance.is_sharing_edge(d, r) {
            return Err(Error::precondition(format!("arc ({d},{r}) is not a sharing edge")));
        }
        if !ctx.arc_allowed(r, &in_c) {
            return Err(Error::precondition(format!("arc ({d},{r}) points outside the targets")));
        }
        if touched[d] || touched[r] {
            return Err(Error::precondition("arcs are not vertex-disjoint"));
        }
        touched[d] = true;
        touched[r] = true;
    }
    Ok(ctx.realize(&in_c, &config.arcs))
}

/// Calls `visit` on every configuration for the given targets until it
/// returns `Some`.
fn for_each_configuration<T>(
    ctx: &Context,
    in_c: &[bool],
    visit: &mut dyn FnMut(&[(AgentId, AgentId)]) -> Option<T>,
) -> Option<T> {
    fn rec<T>(
        ctx: &Context,
        in_c: &[bool],
        v: usize,
        used: &mut Vec<bool>,
        arcs: &mut Vec<(AgentId, AgentId)>,
        visit: &mut dyn FnMut(&[(AgentId, AgentId)]) -> Option<T>,
    ) -> Option<T> {
        let n = used.len();
        let mut v = v;
        while v < n && used[v] {
            v += 1;
        }
        if v == n {
            return visit(arcs);
        }
        used[v] = true;
        if let Some(t) = rec(ctx, in_c, v + 1, used, arcs, visit) {
            return Some(t);
        }
        for &w in ctx.inst.sharing_neighbors(v) {
            if w < v || used[w] {
                continue;
            }
            used[w] = true;
            for (d, r) in [(v, w), (w, v)] {
                if ctx.arc_allowed(r, in_c) && !ctx.inst.bundle(d).is_empty() {
                    arcs.push((d, r));
                    let found = rec(ctx, in_c, v + 1, used, arcs, visit);
                    arcs.pop();
                    if found.is_some() {
                        used[w] = false;
                        used[v] = false;
                        return found;
                    }
                }
            }
            used[w] = false;
        }
        used[v] = false;
        None
    }
    let mut used = vec![false; in_c.len()];
    rec(ctx, in_c, 0, &mut used, &mut Vec::new(), visit)
}

/// All `size`-subsets of `0..n` as bitmasks in colex order.
fn colex_subsets(n: usize, size: usize) -> Vec<u64> {
    if size == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut x: u64 = (1u64 << size) - 1;
    let limit: u64 = 1u64 << n;
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Number of oriented matchings of a clique on `n` vertices; a bound on the
/// configurations per target set.
fn configurations_bound(n: usize) -> u128 {
    let (mut a, mut b) = (1u128, 1u128);
    for i in 2..=n {
        let c = b.saturating_add((2 * (i as u128 - 1)).saturating_mul(a));
        a = b;
        b = c;
    }
    b
}

/// Rough count of configuration checks for a full search.
pub fn fpt_work_estimate(n: usize) -> u128 {
    if n >= 64 {
        return u128::MAX;
    }
    (1u128 << n).saturating_mul(configurations_bound(n))
}

fn decide(ctx: &Context, k: usize) -> Option<Vec<Transfer>> {
    let n = ctx.inst.agent_count();
    if k >= n {
        return Some(Vec::new());
    }
    colex_subsets(n, n - k).par_iter().find_map_first(|&mask| {
        let in_c: Vec<bool> = (0..n).map(|a| mask >> a & 1 == 1).collect();
        for_each_configuration(ctx, &in_c, &mut |arcs| {
            ctx.realize(&in_c, arcs).map(|choice| {
                arcs.iter()
                    .zip(choice)
                    .filter_map(|(&(d, r), x)| x.map(|res| Transfer { donor: d, recipient: r, resource: res }))
                    .collect::<Vec<_>>()
            })
        })
    })
}

fn check_size(n: usize) -> Result<()> {
    if n >= 64 {
        return Err(Error::TooLarge(format!("{n} agents exceed the target-set enumeration")));
    }
    let estimate = fpt_work_estimate(n);
    if estimate > crate::node_cap() as u128 {
        log::warn!("configuration search over {n} agents may check up to {estimate} configurations");
    }
    Ok(())
}

/// Is there a simple 2-sharing within the budget leaving at most `k`
/// agents envious? Returns a witness when there is.
pub fn solve_ersa_fpt_agents(instance: &Instance, k: usize) -> Result<Option<Sharing>> {
    solve_ersa_fpt_agents_with(instance, k, FptVariant::Auto)
}

pub fn solve_ersa_fpt_agents_with(instance: &Instance, k: usize, variant: FptVariant) -> Result<Option<Sharing>> {
    if variant == FptVariant::Base && !instance.extension().full_donor_value() {
        return Err(Error::precondition("the base search needs alpha = 1"));
    }
    check_size(instance.agent_count())?;
    let ctx = Context::with_variant(instance, variant);
    Ok(decide(&ctx, k).map(|t| Sharing::from_transfers(1, t)))
}

/// Minimum number of envious agents over simple 2-sharings within the
/// budget, found by trying `k = 0, 1, ...`.
pub fn min_envy_fpt(instance: &Instance) -> Result<(usize, Sharing)> {
    check_size(instance.agent_count())?;
    let ctx = Context::new(instance);
    for k in 0..=instance.agent_count() {
        if let Some(t) = decide(&ctx, k) {
            return Ok((k, Sharing::from_transfers(1, t)));
        }
    }
    unreachable!("k = n always admits the empty sharing")
}
