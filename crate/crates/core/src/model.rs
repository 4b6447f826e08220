//! Instances, sharings and their evaluation.
//!
//! An [`Instance`] fixes agents, resources, additive integer utilities, a
//! complete initial allocation, an undirected sharing graph and a directed
//! attention graph. A [`Sharing`] labels sharing-graph edges with resources
//! owned by one endpoint; every resource is shared at most once, so it ends
//! up in at most two bundles.
//!
//! All values are exact. Internally a [`ValueScale`] multiplies every
//! utility by the common denominator of the loss parameters so that the
//! hot paths work on `i128`; the public accessors return [`Rational`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};

pub type AgentId = usize;
pub type ResourceId = usize;
pub type Rational = Ratio<i128>;

/// Normalizes an undirected pair so that the smaller index comes first.
#[inline]
pub fn edge_key(a: AgentId, b: AgentId) -> (AgentId, AgentId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Budget {
    #[default]
    Unbounded,
    Limited(u64),
}

impl Budget {
    pub fn allows(self, cost: u64) -> bool {
        match self {
            Budget::Unbounded => true,
            Budget::Limited(b) => cost <= b,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Budget::Unbounded)
    }
}

/// Loss parameters and sharing costs.
///
/// `alpha` is the fraction of utility a donor keeps from a resource it
/// shares, `beta` the fraction a recipient gets from a shared resource.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub edge_costs: BTreeMap<(AgentId, AgentId), u64>,
    pub budget: Budget,
}

impl Default for ExtensionParams {
    fn default() -> Self {
        ExtensionParams {
            alpha: Rational::from_integer(1),
            beta: Rational::from_integer(1),
            edge_costs: BTreeMap::new(),
            budget: Budget::Unbounded,
        }
    }
}

impl ExtensionParams {
    pub fn with_losses(alpha: Rational, beta: Rational) -> Self {
        ExtensionParams { alpha, beta, ..Default::default() }
    }

    /// True when the parameters reproduce the base model exactly.
    pub fn is_base(&self) -> bool {
        self.alpha == Rational::from_integer(1) && self.beta == Rational::from_integer(1) && self.budget.is_unbounded()
    }

    pub fn full_donor_value(&self) -> bool {
        self.alpha == Rational::from_integer(1)
    }

    fn check(&self) -> Result<()> {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        if self.alpha < zero || self.alpha > one {
            return Err(Error::instance("alpha out of [0,1]"));
        }
        if self.beta < zero || self.beta > one {
            return Err(Error::instance("beta out of [0,1]"));
        }
        Ok(())
    }
}

/// Integer scaling of the loss parameters.
///
/// A kept resource is worth `den * u`, a donated one `alpha * u` and a
/// received one `beta * u`, all divided by `den` afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueScale {
    pub den: i128,
    pub alpha: i128,
    pub beta: i128,
}

impl ValueScale {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        let den = alpha.denom().lcm(beta.denom());
        ValueScale { den, alpha: alpha.numer() * (den / alpha.denom()), beta: beta.numer() * (den / beta.denom()) }
    }

    /// Scaled loss a donor suffers on a resource it values at `u`.
    #[inline]
    pub fn donor_loss(&self, u: u64) -> i128 {
        (self.den - self.alpha) * u as i128
    }

    #[inline]
    pub fn received(&self, u: u64) -> i128 {
        self.beta * u as i128
    }

    #[inline]
    pub fn kept(&self, u: u64) -> i128 {
        self.den * u as i128
    }

    pub fn to_rational(&self, scaled: i128) -> Rational {
        Rational::new(scaled, self.den)
    }
}

/// A problem instance. Construct with [`Instance::builder`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    agents: usize,
    resources: usize,
    utilities: Vec<Vec<u64>>,
    allocation: Vec<Vec<ResourceId>>,
    owner: Vec<AgentId>,
    sharing_edges: Vec<(AgentId, AgentId)>,
    attention_arcs: Vec<(AgentId, AgentId)>,
    extension: ExtensionParams,
    edge_index: HashMap<(AgentId, AgentId), usize>,
    edge_costs: Vec<u64>,
    sharing_adj: Vec<Vec<AgentId>>,
    attention_out: Vec<Vec<AgentId>>,
    attention_in: Vec<Vec<AgentId>>,
    scale: ValueScale,
}

#[derive(Debug, Clone, Default)]
pub struct InstanceBuilder {
    agents: usize,
    resources: usize,
    utilities: Option<Vec<Vec<u64>>>,
    allocation: Vec<Vec<ResourceId>>,
    sharing_edges: Vec<(AgentId, AgentId)>,
    attention_arcs: Vec<(AgentId, AgentId)>,
    extension: ExtensionParams,
}

impl InstanceBuilder {
    pub fn utilities(mut self, utilities: Vec<Vec<u64>>) -> Self {
        self.utilities = Some(utilities);
        self
    }

    /// Every agent values every resource identically.
    pub fn identical_utilities(mut self, row: Vec<u64>) -> Self {
        self.utilities = Some(vec![row; self.agents]);
        self
    }

    pub fn allocation(mut self, allocation: Vec<Vec<ResourceId>>) -> Self {
        self.allocation = allocation;
        self
    }

    pub fn sharing_edges(mut self, edges: impl IntoIterator<Item = (AgentId, AgentId)>) -> Self {
        self.sharing_edges = edges.into_iter().collect();
        self
    }

    pub fn sharing_clique(mut self) -> Self {
        let n = self.agents;
        self.sharing_edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        self
    }

    pub fn attention_arcs(mut self, arcs: impl IntoIterator<Item = (AgentId, AgentId)>) -> Self {
        self.attention_arcs = arcs.into_iter().collect();
        self
    }

    pub fn attention_clique(mut self) -> Self {
        let n = self.agents;
        self.attention_arcs = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        self
    }

    /// Attention arcs in both directions along every sharing edge.
    pub fn attention_from_sharing(mut self) -> Self {
        self.attention_arcs = self.sharing_edges.iter().flat_map(|&(i, j)| [(i, j), (j, i)]).collect();
        self
    }

    pub fn extension(mut self, extension: ExtensionParams) -> Self {
        self.extension = extension;
        self
    }

    pub fn build(self) -> Result<Instance> {
        let n = self.agents;
        let m = self.resources;
        if n == 0 {
            return Err(Error::instance("at least one agent is required"));
        }
        let utilities = self.utilities.unwrap_or_else(|| vec![vec![0; m]; n]);
        if utilities.len() != n {
            return Err(Error::instance(format!("expected {n} utility rows, got {}", utilities.len())));
        }
        if let Some((i, row)) = utilities.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::instance(format!("utility row {i} has {} entries, expected {m}", row.len())));
        }
        if self.allocation.len() != n {
            return Err(Error::instance(format!("expected {n} bundles, got {}", self.allocation.len())));
        }
        let mut owner = vec![usize::MAX; m];
        let mut allocation = self.allocation;
        for (a, bundle) in allocation.iter_mut().enumerate() {
            bundle.sort_unstable();
            for &r in bundle.iter() {
                if r >= m {
                    return Err(Error::instance(format!("resource {r} out of range")));
                }
                if owner[r] != usize::MAX {
                    return Err(Error::instance(format!("resource {r} allocated to agents {} and {a}", owner[r])));
                }
                owner[r] = a;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::instance("allocation not complete"));
        }

        let mut sharing_edges = Vec::with_capacity(self.sharing_edges.len());
        let mut seen = BTreeSet::new();
        for (i, j) in self.sharing_edges {
            if i >= n || j >= n {
                return Err(Error::instance(format!("sharing edge [{i},{j}] out of range")));
            }
            if i == j {
                return Err(Error::instance(format!("sharing edge [{i},{j}] is a self-loop")));
            }
            let e = edge_key(i, j);
            if !seen.insert(e) {
                return Err(Error::instance(format!("duplicate sharing edge [{i},{j}]")));
            }
            sharing_edges.push(e);
        }
        sharing_edges.sort_unstable();

        let mut attention_arcs = Vec::with_capacity(self.attention_arcs.len());
        let mut seen = BTreeSet::new();
        for (i, j) in self.attention_arcs {
            if i >= n || j >= n {
                return Err(Error::instance(format!("attention arc [{i},{j}] out of range")));
            }
            if i == j {
                return Err(Error::instance(format!("attention arc [{i},{j}] is a self-loop")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::instance(format!("duplicate attention arc [{i},{j}]")));
            }
            attention_arcs.push((i, j));
        }
        attention_arcs.sort_unstable();

        self.extension.check()?;
        let edge_index: HashMap<_, _> = sharing_edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let mut edge_costs = vec![0; sharing_edges.len()];
        let mut costs = BTreeMap::new();
        for (&(i, j), &c) in &self.extension.edge_costs {
            let e = edge_key(i, j);
            let Some(&k) = edge_index.get(&e) else {
                return Err(Error::instance(format!("cost given for [{i},{j}] which is not a sharing edge")));
            };
            edge_costs[k] = c;
            if c > 0 {
                costs.insert(e, c);
            }
        }
        let mut extension = self.extension;
        extension.edge_costs = costs;

        let mut sharing_adj = vec![Vec::new(); n];
        for &(i, j) in &sharing_edges {
            sharing_adj[i].push(j);
            sharing_adj[j].push(i);
        }
        sharing_adj.iter_mut().for_each(|v| v.sort_unstable());
        let mut attention_out = vec![Vec::new(); n];
        let mut attention_in = vec![Vec::new(); n];
        for &(i, j) in &attention_arcs {
            attention_out[i].push(j);
            attention_in[j].push(i);
        }
        attention_in.iter_mut().for_each(|v| v.sort_unstable());

        let scale = ValueScale::new(extension.alpha, extension.beta);
        Ok(Instance {
            agents: n,
            resources: m,
            utilities,
            allocation,
            owner,
            sharing_edges,
            attention_arcs,
            extension,
            edge_index,
            edge_costs,
            sharing_adj,
            attention_out,
            attention_in,
            scale,
        })
    }
}

impl Instance {
    pub fn builder(agents: usize, resources: usize) -> InstanceBuilder {
        InstanceBuilder { agents, resources, ..Default::default() }
    }

    /// A builder pre-filled with this instance's data, for small edits.
    pub fn to_builder(&self) -> InstanceBuilder {
        InstanceBuilder {
            agents: self.agents,
            resources: self.resources,
            utilities: Some(self.utilities.clone()),
            allocation: self.allocation.clone(),
            sharing_edges: self.sharing_edges.clone(),
            attention_arcs: self.attention_arcs.clone(),
            extension: self.extension.clone(),
        }
    }

    /// Same instance with different extension parameters.
    pub fn with_extension(&self, extension: ExtensionParams) -> Result<Instance> {
        self.to_builder().extension(extension).build()
    }

    pub fn agent_count(&self) -> usize {
        self.agents
    }

    pub fn resource_count(&self) -> usize {
        self.resources
    }

    #[inline]
    pub fn utility(&self, agent: AgentId, resource: ResourceId) -> u64 {
        self.utilities[agent][resource]
    }

    pub fn utilities(&self) -> &[Vec<u64>] {
        &self.utilities
    }

    pub fn allocation(&self) -> &[Vec<ResourceId>] {
        &self.allocation
    }

    pub fn bundle(&self, agent: AgentId) -> &[ResourceId] {
        &self.allocation[agent]
    }

    #[inline]
    pub fn owner(&self, resource: ResourceId) -> AgentId {
        self.owner[resource]
    }

    pub fn sharing_edges(&self) -> &[(AgentId, AgentId)] {
        &self.sharing_edges
    }

    pub fn attention_arcs(&self) -> &[(AgentId, AgentId)] {
        &self.attention_arcs
    }

    pub fn sharing_neighbors(&self, agent: AgentId) -> &[AgentId] {
        &self.sharing_adj[agent]
    }

    pub fn attention_out(&self, agent: AgentId) -> &[AgentId] {
        &self.attention_out[agent]
    }

    pub fn attention_in(&self, agent: AgentId) -> &[AgentId] {
        &self.attention_in[agent]
    }

    pub fn extension(&self) -> &ExtensionParams {
        &self.extension
    }

    pub fn scale(&self) -> ValueScale {
        self.scale
    }

    pub fn is_sharing_edge(&self, a: AgentId, b: AgentId) -> bool {
        self.edge_index.contains_key(&edge_key(a, b))
    }

    pub fn edge_id(&self, a: AgentId, b: AgentId) -> Option<usize> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    /// Sharing cost of the edge `{a, b}`; zero when no cost was given.
    pub fn edge_cost(&self, a: AgentId, b: AgentId) -> u64 {
        self.edge_id(a, b).map_or(0, |k| self.edge_costs[k])
    }

    /// Value of `agent`'s initial bundle to `viewer`.
    pub fn initial_value(&self, viewer: AgentId, agent: AgentId) -> u64 {
        self.allocation[agent].iter().map(|&r| self.utilities[viewer][r]).sum()
    }

    /// All agents share a single utility function.
    pub fn has_identical_utilities(&self) -> bool {
        self.utilities.windows(2).all(|w| w[0] == w[1])
    }

    pub fn attention_is_bidirectional_clique(&self) -> bool {
        self.attention_arcs.len() == self.agents * (self.agents - 1)
    }

    /// The undirected graph underlying the attention arcs equals the
    /// sharing graph.
    pub fn attention_matches_sharing(&self) -> bool {
        let underlying: BTreeSet<_> = self.attention_arcs.iter().map(|&(i, j)| edge_key(i, j)).collect();
        underlying.len() == self.sharing_edges.len() && self.sharing_edges.iter().all(|e| underlying.contains(e))
    }
}

/// One shared resource on a sharing edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub edge: (AgentId, AgentId),
    pub resource: ResourceId,
}

/// A resolved assignment: who gives what to whom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transfer {
    pub donor: AgentId,
    pub recipient: AgentId,
    pub resource: ResourceId,
}

/// A b-bounded 2-sharing candidate.
///
/// Several resources may sit on the same edge when `bound > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sharing {
    bound: usize,
    assignments: Vec<Assignment>,
}

impl Sharing {
    pub fn empty(bound: usize) -> Self {
        Sharing { bound, assignments: Vec::new() }
    }

    pub fn new(bound: usize, assignments: impl IntoIterator<Item = Assignment>) -> Self {
        let mut assignments: Vec<_> = assignments
            .into_iter()
            .map(|a| Assignment { edge: edge_key(a.edge.0, a.edge.1), resource: a.resource })
            .collect();
        assignments.sort_unstable();
        Sharing { bound, assignments }
    }

    pub fn from_transfers(bound: usize, transfers: impl IntoIterator<Item = Transfer>) -> Self {
        Sharing::new(
            bound,
            transfers.into_iter().map(|t| Assignment { edge: (t.donor, t.recipient), resource: t.resource }),
        )
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    /// Resolves donors and recipients. Assignments whose resource belongs
    /// to neither endpoint are skipped; validate first.
    pub fn transfers(&self, instance: &Instance) -> Vec<Transfer> {
        self.assignments
            .iter()
            .filter_map(|a| {
                let (i, j) = a.edge;
                let o = *instance.owner.get(a.resource)?;
                if o == i {
                    Some(Transfer { donor: i, recipient: j, resource: a.resource })
                } else if o == j {
                    Some(Transfer { donor: j, recipient: i, resource: a.resource })
                } else {
                    None
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownIndex { edge: (AgentId, AgentId), resource: ResourceId },
    EdgeNotInGraph { edge: (AgentId, AgentId) },
    Ownership { edge: (AgentId, AgentId), resource: ResourceId },
    TripleAccess { resource: ResourceId },
    AgentBound { agent: AgentId, count: usize, bound: usize },
    ZeroBound,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownIndex { edge, resource } => {
                write!(f, "edge [{},{}] with resource {resource} refers to an unknown index", edge.0, edge.1)
            }
            Violation::EdgeNotInGraph { edge } => {
                write!(f, "edge [{},{}] is not a sharing edge", edge.0, edge.1)
            }
            Violation::Ownership { edge, resource } => {
                write!(f, "resource {resource} is not owned by an endpoint of [{},{}]", edge.0, edge.1)
            }
            Violation::TripleAccess { resource } => {
                write!(f, "resource {resource} is shared more than once")
            }
            Violation::AgentBound { agent, count, bound } => {
                write!(f, "agent {agent} takes part in {count} sharings, bound is {bound}")
            }
            Violation::ZeroBound => f.write_str("sharing bound must be positive"),
        }
    }
}

/// Checks every structural constraint of a b-bounded 2-sharing and reports
/// all violations found.
pub fn validate_sharing(instance: &Instance, sharing: &Sharing) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if sharing.bound == 0 {
        violations.push(Violation::ZeroBound);
    }
    let mut uses = vec![0usize; instance.resources];
    let mut participation = vec![0usize; instance.agents];
    for a in &sharing.assignments {
        let (i, j) = a.edge;
        if i >= instance.agents || j >= instance.agents || a.resource >= instance.resources {
            violations.push(Violation::UnknownIndex { edge: a.edge, resource: a.resource });
            continue;
        }
        if !instance.is_sharing_edge(i, j) {
            violations.push(Violation::EdgeNotInGraph { edge: a.edge });
        }
        let o = instance.owner[a.resource];
        if o != i && o != j {
            violations.push(Violation::Ownership { edge: a.edge, resource: a.resource });
        }
        uses[a.resource] += 1;
        participation[i] += 1;
        participation[j] += 1;
    }
    for (r, &u) in uses.iter().enumerate() {
        if u > 1 {
            violations.push(Violation::TripleAccess { resource: r });
        }
    }
    if sharing.bound > 0 {
        for (a, &c) in participation.iter().enumerate() {
            if c > sharing.bound {
                violations.push(Violation::AgentBound { agent: a, count: c, bound: sharing.bound });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Per-agent view of a sharing allocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AgentBundle {
    pub kept: BTreeSet<ResourceId>,
    pub received: BTreeSet<ResourceId>,
    pub donated: BTreeSet<ResourceId>,
}

impl AgentBundle {
    /// Every resource the agent can use.
    pub fn all(&self) -> BTreeSet<ResourceId> {
        self.kept.iter().chain(&self.received).chain(&self.donated).copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharingAllocation {
    pub bundles: Vec<AgentBundle>,
}

impl SharingAllocation {
    pub fn agent(&self, a: AgentId) -> &AgentBundle {
        &self.bundles[a]
    }
}

pub fn derive_bundles(instance: &Instance, sharing: &Sharing) -> Result<SharingAllocation> {
    validate_sharing(instance, sharing).map_err(Error::InvalidSharing)?;
    let mut bundles: Vec<AgentBundle> = instance
        .allocation
        .iter()
        .map(|b| AgentBundle { kept: b.iter().copied().collect(), ..Default::default() })
        .collect();
    for t in sharing.transfers(instance) {
        bundles[t.donor].kept.remove(&t.resource);
        bundles[t.donor].donated.insert(t.resource);
        bundles[t.recipient].received.insert(t.resource);
    }
    Ok(SharingAllocation { bundles })
}

fn weighted_value(instance: &Instance, viewer: AgentId, bundle: &AgentBundle) -> Rational {
    let ext = &instance.extension;
    let sum = |set: &BTreeSet<ResourceId>| -> i128 { set.iter().map(|&r| instance.utility(viewer, r) as i128).sum() };
    Rational::from_integer(sum(&bundle.kept))
        + ext.alpha * Rational::from_integer(sum(&bundle.donated))
        + ext.beta * Rational::from_integer(sum(&bundle.received))
}

/// Utility agent `agent` derives from its own bundle.
pub fn own_utility(instance: &Instance, bundles: &SharingAllocation, agent: AgentId) -> Rational {
    weighted_value(instance, agent, &bundles.bundles[agent])
}

/// Value of `owner`'s bundle seen through `viewer`'s utilities, with the
/// owner's donated resources weighted by alpha and received ones by beta.
pub fn perceived_value(
    instance: &Instance,
    bundles: &SharingAllocation,
    viewer: AgentId,
    owner: AgentId,
) -> Result<Rational> {
    if viewer == owner {
        return Err(Error::precondition("an agent does not look at its own bundle"));
    }
    Ok(weighted_value(instance, viewer, &bundles.bundles[owner]))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EnvyReport {
    pub envious: BTreeSet<AgentId>,
    /// One envied out-neighbour per envious agent.
    pub witnesses: BTreeMap<AgentId, (AgentId, AgentId)>,
}

impl EnvyReport {
    pub fn count(&self) -> usize {
        self.envious.len()
    }
}

pub fn envious_agents(instance: &Instance, sharing: &Sharing) -> Result<EnvyReport> {
    let bundles = derive_bundles(instance, sharing)?;
    let own: Vec<Rational> = (0..instance.agents).map(|a| own_utility(instance, &bundles, a)).collect();
    let mut report = EnvyReport::default();
    for &(i, j) in &instance.attention_arcs {
        if report.envious.contains(&i) {
            continue;
        }
        if own[i] < perceived_value(instance, &bundles, i, j)? {
            report.envious.insert(i);
            report.witnesses.insert(i, (i, j));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Welfare {
    pub utilitarian: Rational,
    pub egalitarian: Rational,
}

pub fn welfare(instance: &Instance, sharing: &Sharing) -> Result<Welfare> {
    let bundles = derive_bundles(instance, sharing)?;
    let values: Vec<Rational> = (0..instance.agents).map(|a| own_utility(instance, &bundles, a)).collect();
    Ok(Welfare {
        utilitarian: values.iter().copied().sum(),
        egalitarian: values.iter().copied().min().expect("at least one agent"),
    })
}

pub fn sharing_cost(instance: &Instance, sharing: &Sharing) -> Result<u64> {
    validate_sharing(instance, sharing).map_err(Error::InvalidSharing)?;
    Ok(edges_cost(instance, sharing))
}

/// Cost of the distinct edges carrying at least one resource.
pub(crate) fn edges_cost(instance: &Instance, sharing: &Sharing) -> u64 {
    let edges: BTreeSet<_> = sharing.assignments.iter().map(|a| a.edge).collect();
    edges.into_iter().map(|(i, j)| instance.edge_cost(i, j)).sum()
}

/// Fast scaled evaluation of transfer sets, shared by the solvers and the
/// brute-force oracle.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    instance: &'a Instance,
    scale: ValueScale,
    /// `base[viewer][agent]`: scaled value of `agent`'s initial bundle.
    base: Vec<Vec<i128>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let scale = instance.scale;
        let n = instance.agents;
        let base = (0..n).map(|v| (0..n).map(|a| scale.kept(instance.initial_value(v, a))).collect()).collect();
        Evaluator { instance, scale, base }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn scale(&self) -> ValueScale {
        self.scale
    }

    /// Scaled value of `agent`'s initial bundle to `viewer`.
    #[inline]
    pub fn base(&self, viewer: AgentId, agent: AgentId) -> i128 {
        self.base[viewer][agent]
    }

    /// Scaled value of `agent`'s bundle to `viewer` after the given
    /// transfers touching `agent`.
    pub fn seen(&self, viewer: AgentId, agent: AgentId, transfers: &[Transfer]) -> i128 {
        let mut v = self.base[viewer][agent];
        for t in transfers {
            let u = self.instance.utility(viewer, t.resource);
            if t.donor == agent {
                v -= self.scale.donor_loss(u);
            } else if t.recipient == agent {
                v += self.scale.received(u);
            }
        }
        v
    }

    /// Scaled own value of every agent.
    pub fn own_values(&self, transfers: &[Transfer]) -> Vec<i128> {
        let mut own: Vec<i128> = (0..self.instance.agents).map(|a| self.base[a][a]).collect();
        for t in transfers {
            own[t.donor] -= self.scale.donor_loss(self.instance.utility(t.donor, t.resource));
            own[t.recipient] += self.scale.received(self.instance.utility(t.recipient, t.resource));
        }
        own
    }

    /// Envious agents, as a sorted list.
    pub fn envious(&self, transfers: &[Transfer]) -> Vec<AgentId> {
        let n = self.instance.agents;
        let own = self.own_values(transfers);
        let mut touching: Vec<Vec<Transfer>> = vec![Vec::new(); n];
        for t in transfers {
            touching[t.donor].push(*t);
            touching[t.recipient].push(*t);
        }
        (0..n)
            .filter(|&i| self.instance.attention_out[i].iter().any(|&j| own[i] < self.seen(i, j, &touching[j])))
            .collect()
    }

    pub fn envy_count(&self, transfers: &[Transfer]) -> usize {
        self.envious(transfers).len()
    }

    /// Scaled utilitarian and egalitarian welfare.
    pub fn welfare(&self, transfers: &[Transfer]) -> (i128, i128) {
        let own = self.own_values(transfers);
        (own.iter().sum(), *own.iter().min().expect("at least one agent"))
    }

    pub fn cost(&self, transfers: &[Transfer]) -> u64 {
        let edges: BTreeSet<_> = transfers.iter().map(|t| edge_key(t.donor, t.recipient)).collect();
        edges.into_iter().map(|(i, j)| self.instance.edge_cost(i, j)).sum()
    }
}
