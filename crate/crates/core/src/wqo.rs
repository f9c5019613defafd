//! Upward-closed sets over well-quasi-ordered configuration spaces and the
//! backward coverability saturation engine.
//!
//! An upward-closed set is represented by its [`Basis`], a finite antichain of
//! minimal elements. Starting from `↑target`, [`Saturation`] repeatedly adds the
//! one-step predecessors of the current set until the set stops growing, then
//! asks whether any basis element lies below an initial configuration.

use std::fmt;

use thiserror::Error;

/// A configuration space with a decidable quasi-order and labelled transitions,
/// as consumed by the saturation engine.
///
/// Implementations must make `leq` reflexive and transitive and compatible with
/// the transition relation: if `c1 ≤ t1` and `c1 -l-> c2`, then some `t1 -l-> t2`
/// has `c2 ≤ t2`.
pub trait OrderedSpace {
    type Config: Clone + fmt::Debug;
    type Label: Clone + fmt::Debug;

    /// Labels in declaration order. Saturation visits them in this order.
    fn labels(&self) -> Vec<Self::Label>;

    fn leq(&self, lhs: &Self::Config, rhs: &Self::Config) -> bool;

    /// Whether some initial configuration lies above `c`.
    fn covered_by_initial(&self, c: &Self::Config) -> bool;

    /// A finite basis of the configurations with an `label`-successor inside
    /// `↑basis`.
    fn pre_basis_for_label(
        &self,
        label: &Self::Label,
        basis: &[Self::Config],
    ) -> Result<Vec<Self::Config>, ResourceExhausted>;

    fn successors(&self, c: &Self::Config, label: &Self::Label) -> Vec<Self::Config>;

    /// Minimal configurations at which a transition with `label` is enabled.
    fn min_enabling(&self, label: &Self::Label) -> Vec<Self::Config>;
}

/// Bounds on a saturation run. Exceeding one aborts with [`ResourceExhausted`]
/// rather than producing a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceLimits {
    pub max_basis: usize,
    pub max_iterations: usize,
}

impl ResourceLimits {
    pub const DEFAULT_MAX_BASIS: usize = 100_000;
    pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

    pub fn new(max_basis: usize, max_iterations: usize) -> Self {
        ResourceLimits {
            max_basis,
            max_iterations,
        }
    }
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits::new(Self::DEFAULT_MAX_BASIS, Self::DEFAULT_MAX_ITERATIONS)
    }
}

/// Limits plus the auditing switch, as passed to every saturation-based
/// decider.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SaturationOptions {
    pub limits: ResourceLimits,
    /// Check monotonicity and the antichain property after every iteration.
    pub audit: bool,
}

impl SaturationOptions {
    pub fn new(limits: ResourceLimits) -> Self {
        SaturationOptions { limits, audit: false }
    }

    pub fn audited(mut self) -> Self {
        self.audit = true;
        self
    }
}

/// Which bound a computation ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resource {
    BasisSize,
    Iterations,
    Vertices,
    ExploredStates,
    GraphOrder,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Resource::BasisSize => "basis size",
            Resource::Iterations => "iteration",
            Resource::Vertices => "graph vertex",
            Resource::ExploredStates => "explored state",
            Resource::GraphOrder => "enumeration order",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{resource} limit of {limit} exceeded")]
pub struct ResourceExhausted {
    pub resource: Resource,
    pub limit: usize,
}

impl ResourceExhausted {
    pub fn new(resource: Resource, limit: usize) -> Self {
        ResourceExhausted { resource, limit }
    }
}

/// Finite antichain denoting the upward closure of its elements. The empty
/// basis denotes the empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis<C> {
    elements: Vec<C>,
}

impl<C> Basis<C> {
    pub fn empty() -> Self {
        Basis {
            elements: Vec::new(),
        }
    }

    /// Minimizes `configs` into an antichain; see [`minimize`].
    pub fn from_configs(configs: Vec<C>, leq: impl Fn(&C, &C) -> bool) -> Self {
        Basis {
            elements: minimize(configs, leq),
        }
    }

    pub fn elements(&self) -> &[C] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<C> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Membership of `c` in the denoted upward-closed set.
    pub fn contains(&self, c: &C, leq: impl Fn(&C, &C) -> bool) -> bool {
        self.elements.iter().any(|b| leq(b, c))
    }

    pub fn subsumes(&self, other: &Basis<C>, leq: impl Fn(&C, &C) -> bool) -> bool {
        basis_subsumes(&self.elements, &other.elements, leq)
    }

    pub fn is_antichain(&self, leq: impl Fn(&C, &C) -> bool) -> bool {
        is_antichain(&self.elements, leq)
    }
}

/// Reduces `configs` to an antichain with the same upward closure.
///
/// The result is a subset of the input in input order; among equivalent
/// elements the earliest occurrence is kept.
pub fn minimize<C>(configs: Vec<C>, leq: impl Fn(&C, &C) -> bool) -> Vec<C> {
    let mut kept: Vec<C> = Vec::with_capacity(configs.len());
    for c in configs {
        if kept.iter().any(|m| leq(m, &c)) {
            continue;
        }
        kept.retain(|k| !leq(&c, k));
        kept.push(c);
    }
    kept
}

/// `↑upper ⊇ ↑lower`: every element of `lower` lies above some element of `upper`.
pub fn basis_subsumes<C>(upper: &[C], lower: &[C], leq: impl Fn(&C, &C) -> bool) -> bool {
    lower.iter().all(|l| upper.iter().any(|u| leq(u, l)))
}

pub fn is_antichain<C>(elements: &[C], leq: impl Fn(&C, &C) -> bool) -> bool {
    elements.iter().enumerate().all(|(i, a)| {
        elements
            .iter()
            .enumerate()
            .all(|(j, b)| i == j || !leq(a, b))
    })
}

/// Counters collected during one saturation run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SaturationStats {
    pub iterations: usize,
    pub basis_size: usize,
    pub max_basis_size: usize,
    /// Elements ever inserted into the basis, including the target.
    pub generated: usize,
    /// Iterations after which `↑U_{i+1} ⊇ ↑U_i` failed or the basis was not an
    /// antichain. Only populated when auditing is enabled.
    pub audit_violations: usize,
    pub audited: bool,
}

/// Label sequence leading from a configuration below an initial one to the
/// target's upward closure.
///
/// `chain[0]` is covered by an initial configuration and `chain.last()` is the
/// target. From any configuration above `chain[i]`, some `labels[i]`-successor
/// lies above `chain[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<C, L> {
    pub chain: Vec<C>,
    pub labels: Vec<L>,
}

impl<C, L> Witness<C, L> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Fixpoint reached without meeting an initial configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<C> {
    /// Basis of the backward-reachable set from the target.
    pub basis: Vec<C>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<C, L> {
    Coverable {
        witness: Witness<C, L>,
        stats: SaturationStats,
    },
    NotCoverable {
        certificate: Certificate<C>,
        stats: SaturationStats,
    },
}

impl<C, L> Verdict<C, L> {
    pub fn is_coverable(&self) -> bool {
        matches!(self, Verdict::Coverable { .. })
    }

    pub fn stats(&self) -> &SaturationStats {
        match self {
            Verdict::Coverable { stats, .. } | Verdict::NotCoverable { stats, .. } => stats,
        }
    }

    pub fn witness(&self) -> Option<&Witness<C, L>> {
        match self {
            Verdict::Coverable { witness, .. } => Some(witness),
            Verdict::NotCoverable { .. } => None,
        }
    }
}

struct Entry<C, L> {
    config: C,
    origin: Option<(L, usize)>,
}

/// Backward coverability with configurable limits and optional invariant
/// auditing.
pub struct Saturation<'a, S: OrderedSpace> {
    space: &'a S,
    limits: ResourceLimits,
    audit: bool,
}

impl<'a, S: OrderedSpace> Saturation<'a, S> {
    pub fn new(space: &'a S) -> Self {
        Saturation {
            space,
            limits: ResourceLimits::default(),
            audit: false,
        }
    }

    pub fn limits(mut self, limits: ResourceLimits) -> Self {
        self.limits = limits;
        self
    }

    /// Check monotonicity and the antichain property after every iteration.
    pub fn audit(mut self, audit: bool) -> Self {
        self.audit = audit;
        self
    }

    pub fn options(self, options: SaturationOptions) -> Self {
        self.limits(options.limits).audit(options.audit)
    }

    pub fn run(&self, target: &S::Config) -> Result<Verdict<S::Config, S::Label>, ResourceExhausted> {
        let space = self.space;
        let leq = |a: &S::Config, b: &S::Config| space.leq(a, b);
        let labels = space.labels();

        let mut arena: Vec<Entry<S::Config, S::Label>> = vec![Entry {
            config: target.clone(),
            origin: None,
        }];
        // Indices into `arena`, insertion order.
        let mut basis: Vec<usize> = vec![0];
        let mut frontier: Vec<usize> = vec![0];
        let mut stats = SaturationStats {
            basis_size: 1,
            max_basis_size: 1,
            generated: 1,
            audited: self.audit,
            ..Default::default()
        };

        if space.covered_by_initial(target) {
            return Ok(Verdict::Coverable {
                witness: extract(&arena, 0),
                stats,
            });
        }

        while !frontier.is_empty() {
            if stats.iterations >= self.limits.max_iterations {
                return Err(ResourceExhausted::new(
                    Resource::Iterations,
                    self.limits.max_iterations,
                ));
            }
            stats.iterations += 1;
            let previous: Option<Vec<S::Config>> = self
                .audit
                .then(|| basis.iter().map(|&i| arena[i].config.clone()).collect());

            let mut next_frontier: Vec<usize> = Vec::new();
            for &parent in &frontier {
                for label in &labels {
                    let single = std::slice::from_ref(&arena[parent].config);
                    let pre = space.pre_basis_for_label(label, single)?;
                    for candidate in pre {
                        if basis.iter().any(|&b| leq(&arena[b].config, &candidate)) {
                            continue;
                        }
                        basis.retain(|&b| !leq(&candidate, &arena[b].config));
                        next_frontier.retain(|&b| !leq(&candidate, &arena[b].config));
                        let idx = arena.len();
                        let hit = space.covered_by_initial(&candidate);
                        arena.push(Entry {
                            config: candidate,
                            origin: Some((label.clone(), parent)),
                        });
                        basis.push(idx);
                        next_frontier.push(idx);
                        stats.generated += 1;
                        stats.basis_size = basis.len();
                        stats.max_basis_size = stats.max_basis_size.max(basis.len());
                        if basis.len() > self.limits.max_basis {
                            return Err(ResourceExhausted::new(
                                Resource::BasisSize,
                                self.limits.max_basis,
                            ));
                        }
                        if hit {
                            return Ok(Verdict::Coverable {
                                witness: extract(&arena, idx),
                                stats,
                            });
                        }
                    }
                }
            }

            if let Some(previous) = previous {
                let current: Vec<S::Config> =
                    basis.iter().map(|&i| arena[i].config.clone()).collect();
                if !basis_subsumes(&current, &previous, leq) || !is_antichain(&current, leq) {
                    stats.audit_violations += 1;
                }
            }
            frontier = next_frontier;
        }

        stats.basis_size = basis.len();
        Ok(Verdict::NotCoverable {
            certificate: Certificate {
                basis: basis.iter().map(|&i| arena[i].config.clone()).collect(),
                iterations: stats.iterations,
            },
            stats,
        })
    }
}

fn extract<C: Clone, L: Clone>(arena: &[Entry<C, L>], mut idx: usize) -> Witness<C, L> {
    let mut chain = vec![arena[idx].config.clone()];
    let mut labels = Vec::new();
    while let Some((label, parent)) = &arena[idx].origin {
        labels.push(label.clone());
        chain.push(arena[*parent].config.clone());
        idx = *parent;
    }
    Witness { chain, labels }
}

/// Decides whether `target` is coverable in `space` by backward saturation.
pub fn backward_coverability<S: OrderedSpace>(
    space: &S,
    target: &S::Config,
    limits: ResourceLimits,
) -> Result<Verdict<S::Config, S::Label>, ResourceExhausted> {
    Saturation::new(space).limits(limits).run(target)
}

/// Turns a witness into a concrete run starting at `start`, which must lie above
/// `witness.chain[0]`. Returns the visited configurations, `start` included.
///
/// Depth-first over successors; with a compatible order the first branch
/// already succeeds.
pub fn realize_witness<S: OrderedSpace>(
    space: &S,
    start: &S::Config,
    witness: &Witness<S::Config, S::Label>,
) -> Option<Vec<S::Config>> {
    fn go<S: OrderedSpace>(
        space: &S,
        witness: &Witness<S::Config, S::Label>,
        step: usize,
        path: &mut Vec<S::Config>,
    ) -> bool {
        if step == witness.labels.len() {
            return true;
        }
        let current = path.last().expect("path starts non-empty").clone();
        for next in space.successors(&current, &witness.labels[step]) {
            if !space.leq(&witness.chain[step + 1], &next) {
                continue;
            }
            path.push(next);
            if go(space, witness, step + 1, path) {
                return true;
            }
            path.pop();
        }
        false
    }

    if !witness.chain.first().is_some_and(|c| space.leq(c, start)) {
        return None;
    }
    let mut path = vec![start.clone()];
    go(space, witness, 0, &mut path).then_some(path)
}
