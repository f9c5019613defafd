//! Coverability in broadcast networks with a static topology drawn from a
//! restricted class.
//!
//! Network configurations are labelled graphs ordered by induced-subgraph
//! embedding with labels compared in the process order. Backward saturation
//! runs over this space with a two-part pre-basis: relabelling the same shape
//! so that one of its vertices broadcasts, and adding a fresh broadcasting
//! vertex attached to some of the existing ones.
//!
//! The graph order is only compatible with broadcast steps when every
//! configuration can receive every letter, so positive verdicts on processes
//! that are not receive-complete must be confirmed by a replayed run.

use thiserror::Error;

use crate::oracle::{bn_step, replay, NetworkRun, NetworkSemantics, NetworkStep};
use crate::process::{Letter, Semantics, TransitionLabel, WellStructured};
use crate::topology::{
    canonical_form_by, enumerate_diam_deg_graphs, enumerate_extensions, graph_embeds, moore_bound,
    Graph, LabelledGraph, TopologyClass, TopologyError, MAX_VERTICES,
};
use crate::wqo::{
    minimize, OrderedSpace, Resource, ResourceExhausted, Saturation, SaturationOptions,
    SaturationStats, Verdict, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StaticError {
    #[error("static coverability is not supported for class {0}")]
    Unsupported(TopologyClass),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Exhausted(#[from] ResourceExhausted),
}

/// Labelled graphs over a process, restricted to one topology class.
#[derive(Debug, Clone, Copy)]
pub struct NetworkSpace<'a, P> {
    process: &'a P,
    class: TopologyClass,
    max_candidates: usize,
}

impl<'a, P: WellStructured> NetworkSpace<'a, P> {
    pub fn new(process: &'a P, class: TopologyClass) -> Self {
        NetworkSpace {
            process,
            class,
            max_candidates: 1_000_000,
        }
    }

    /// Upper bound on relabelling combinations tried for one vertex.
    pub fn max_candidates(mut self, max: usize) -> Self {
        self.max_candidates = max;
        self
    }

    pub fn class(&self) -> TopologyClass {
        self.class
    }

    pub fn graph_leq(&self, lhs: &LabelledGraph<P::Config>, rhs: &LabelledGraph<P::Config>) -> bool {
        graph_embeds(lhs, rhs, |a, b| self.process.leq(a, b)).is_some()
    }

    fn above(&self, theta: &LabelledGraph<P::Config>, after: &LabelledGraph<P::Config>) -> bool {
        let identity = theta.order() == after.order()
            && theta.graph == after.graph
            && theta
                .labels
                .iter()
                .zip(&after.labels)
                .all(|(a, b)| self.process.leq(a, b));
        identity || self.graph_leq(theta, after)
    }

    /// Receive pre-basis of every vertex in `mask`, or `None` if some vertex
    /// has none.
    fn receive_choices(
        &self,
        theta: &LabelledGraph<P::Config>,
        receivers: impl Iterator<Item = usize>,
        a: Letter,
    ) -> Option<Vec<(usize, Vec<P::Config>)>> {
        let label = TransitionLabel::receive(a);
        receivers
            .map(|u| {
                let pre = self
                    .process
                    .pre_basis(label, std::slice::from_ref(&theta.labels[u]));
                (!pre.is_empty()).then_some((u, pre))
            })
            .collect()
    }

    /// Emits every `before` labelling of `shape` built from the fixed `base`
    /// labels, `broadcaster` options and per-receiver options, keeping those
    /// with a broadcast successor above `theta`.
    #[allow(clippy::too_many_arguments)]
    fn expand(
        &self,
        theta: &LabelledGraph<P::Config>,
        shape: &Graph,
        base: &[P::Config],
        broadcaster: usize,
        sender_options: &[P::Config],
        receivers: &[(usize, Vec<P::Config>)],
        a: Letter,
        out: &mut Vec<LabelledGraph<P::Config>>,
    ) -> Result<(), ResourceExhausted> {
        let combinations = receivers
            .iter()
            .try_fold(sender_options.len(), |acc, (_, opts)| acc.checked_mul(opts.len()));
        match combinations {
            Some(c) if c <= self.max_candidates => {}
            _ => return Err(ResourceExhausted::new(Resource::BasisSize, self.max_candidates)),
        }
        let mut labels = base.to_vec();
        let mut choice = vec![0usize; receivers.len()];
        for sender in sender_options {
            labels[broadcaster] = sender.clone();
            choice.iter_mut().for_each(|c| *c = 0);
            loop {
                for (slot, (u, opts)) in choice.iter().zip(receivers) {
                    labels[*u] = opts[*slot].clone();
                }
                let before = LabelledGraph::new(shape.clone(), labels.clone());
                if bn_step(self.process, &before, broadcaster, a)
                    .iter()
                    .any(|after| self.above(theta, after))
                {
                    out.push(before);
                }
                // odometer over receiver choices
                let mut i = 0;
                while i < choice.len() {
                    choice[i] += 1;
                    if choice[i] < receivers[i].1.len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == choice.len() {
                    break;
                }
            }
        }
        Ok(())
    }

    /// Minimal graphs that reach `↑theta` by one broadcast of `a`.
    pub fn pre_basis_for_letter(
        &self,
        theta: &LabelledGraph<P::Config>,
        a: Letter,
    ) -> Result<Vec<LabelledGraph<P::Config>>, StaticError> {
        if !self.class.contains(&theta.graph) {
            return Err(TopologyError::ClassViolation {
                graph: theta.graph.clone(),
                class: self.class,
            }
            .into());
        }
        let process = self.process;
        let send = TransitionLabel::broadcast(a);
        let mut out = Vec::new();

        // Same shape: vertex `v` broadcasts.
        for v in 0..theta.order() {
            let senders = process.pre_basis(send, std::slice::from_ref(&theta.labels[v]));
            if senders.is_empty() {
                continue;
            }
            let Some(receivers) = self.receive_choices(theta, theta.graph.neighbors(v), a) else {
                continue;
            };
            self.expand(theta, &theta.graph, &theta.labels, v, &senders, &receivers, a, &mut out)?;
        }

        // One more vertex, which broadcasts.
        let senders = process.min_enabling(send);
        if !senders.is_empty() && !matches!(self.class, TopologyClass::DiamDeg { .. }) {
            if theta.order() + 1 >= MAX_VERTICES {
                return Err(ResourceExhausted::new(Resource::Vertices, MAX_VERTICES - 1).into());
            }
            let fresh = theta.order();
            let mut base = theta.labels.clone();
            base.push(senders[0].clone());
            for shape in enumerate_extensions(&theta.graph, self.class)? {
                let Some(receivers) = self.receive_choices(theta, shape.neighbors(fresh), a) else {
                    continue;
                };
                self.expand(theta, &shape, &base, fresh, &senders, &receivers, a, &mut out)?;
            }
        }

        Ok(minimize(out, |x, y| self.graph_leq(x, y)))
    }

    /// Union of [`Self::pre_basis_for_letter`] over the alphabet.
    pub fn pre_basis(&self, theta: &LabelledGraph<P::Config>) -> Result<Vec<LabelledGraph<P::Config>>, StaticError> {
        let mut out = Vec::new();
        for a in self.process.letters() {
            out.extend(self.pre_basis_for_letter(theta, a)?);
        }
        Ok(minimize(out, |x, y| self.graph_leq(x, y)))
    }
}

impl<P: WellStructured> OrderedSpace for NetworkSpace<'_, P> {
    type Config = LabelledGraph<P::Config>;
    type Label = Letter;

    fn labels(&self) -> Vec<Letter> {
        self.process.letters()
    }

    fn leq(&self, lhs: &Self::Config, rhs: &Self::Config) -> bool {
        self.graph_leq(lhs, rhs)
    }

    fn covered_by_initial(&self, c: &Self::Config) -> bool {
        c.labels.iter().all(|l| self.process.covered_by_initial(l))
    }

    fn pre_basis_for_label(
        &self,
        label: &Letter,
        basis: &[Self::Config],
    ) -> Result<Vec<Self::Config>, ResourceExhausted> {
        let mut out = Vec::new();
        for theta in basis {
            match self.pre_basis_for_letter(theta, *label) {
                Ok(pre) => out.extend(pre),
                Err(StaticError::Exhausted(e)) => return Err(e),
                Err(other) => unreachable!("saturation keeps class members only: {other}"),
            }
        }
        Ok(out)
    }

    fn successors(&self, c: &Self::Config, label: &Letter) -> Vec<Self::Config> {
        (0..c.order())
            .flat_map(|v| bn_step(self.process, c, v, *label))
            .collect()
    }

    fn min_enabling(&self, label: &Letter) -> Vec<Self::Config> {
        self.process
            .min_enabling(TransitionLabel::broadcast(*label))
            .into_iter()
            .map(LabelledGraph::single)
            .collect()
    }
}

/// Static network verdict over graphs of process configurations.
pub type NetworkVerdict<C> = Verdict<LabelledGraph<C>, Letter>;

/// Coverability of `target` in networks of class `PathBounded(k)` or `Clique`.
pub fn static_coverable<P: WellStructured>(
    process: &P,
    target: &P::Config,
    class: TopologyClass,
    options: SaturationOptions,
) -> Result<NetworkVerdict<P::Config>, StaticError> {
    match class {
        TopologyClass::PathBounded(k) if k >= 1 => {}
        TopologyClass::Clique => {}
        other => return Err(StaticError::Unsupported(other)),
    }
    let space = NetworkSpace::new(process, class);
    let seed = LabelledGraph::single(target.clone());
    Ok(Saturation::new(&space).options(options).run(&seed)?)
}

/// A vertex label that is either unconstrained or a configuration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot<C> {
    /// Below every configuration.
    Any,
    Is(C),
}

/// A process whose configurations are extended with the [`Slot::Any`] bottom
/// element, used to seed fixed-shape saturation.
#[derive(Debug, Clone, Copy)]
pub struct Wild<'a, P>(pub &'a P);

impl<P: WellStructured> Semantics for Wild<'_, P> {
    type Config = Slot<P::Config>;

    fn letters(&self) -> Vec<Letter> {
        self.0.letters()
    }

    fn letter_names(&self) -> &[String] {
        self.0.letter_names()
    }

    fn successors(&self, c: &Self::Config, label: TransitionLabel) -> Vec<Self::Config> {
        match c {
            Slot::Any => vec![Slot::Any],
            Slot::Is(c) => self.0.successors(c, label).into_iter().map(Slot::Is).collect(),
        }
    }

    fn leq(&self, lhs: &Self::Config, rhs: &Self::Config) -> bool {
        match (lhs, rhs) {
            (Slot::Any, _) => true,
            (Slot::Is(_), Slot::Any) => false,
            (Slot::Is(a), Slot::Is(b)) => self.0.leq(a, b),
        }
    }

    fn initial_configs(&self) -> Vec<Self::Config> {
        self.0.initial_configs().into_iter().map(Slot::Is).collect()
    }

    fn magnitude(&self, c: &Self::Config) -> usize {
        match c {
            Slot::Any => 0,
            Slot::Is(c) => self.0.magnitude(c),
        }
    }

    fn describe(&self, c: &Self::Config) -> String {
        match c {
            Slot::Any => "*".to_owned(),
            Slot::Is(c) => self.0.describe(c),
        }
    }
}

impl<P: WellStructured> WellStructured for Wild<'_, P> {
    fn labels(&self) -> Vec<TransitionLabel> {
        self.0.labels()
    }

    fn pre_basis(&self, label: TransitionLabel, basis: &[Self::Config]) -> Vec<Self::Config> {
        let mut out = Vec::new();
        for b in basis {
            let pre = match b {
                Slot::Any => self.0.min_enabling(label),
                Slot::Is(c) => self.0.pre_basis(label, std::slice::from_ref(c)),
            };
            out.extend(pre.into_iter().map(Slot::Is));
        }
        out
    }

    fn min_enabling(&self, label: TransitionLabel) -> Vec<Self::Config> {
        self.0.min_enabling(label).into_iter().map(Slot::Is).collect()
    }

    fn covered_by_initial(&self, c: &Self::Config) -> bool {
        match c {
            Slot::Any => true,
            Slot::Is(c) => self.0.covered_by_initial(c),
        }
    }

    fn is_receive_complete(&self) -> bool {
        self.0.is_receive_complete()
    }
}

/// Where a bounded diameter/degree search found the target coverable.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamDegHit<C> {
    pub graph: Graph,
    pub position: usize,
    pub witness: Witness<LabelledGraph<Slot<C>>, Letter>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiamDegOutcome<C> {
    /// Topologies enumerated.
    pub graphs: usize,
    /// Saturation runs performed, one per topology and vertex orbit.
    pub runs: usize,
    /// Whether `n_max` reaches the Moore bound, so that every topology of the
    /// class was considered.
    pub exhaustive: bool,
    pub hit: Option<DiamDegHit<C>>,
    /// Iterations summed over runs; basis sizes are maxima.
    pub stats: SaturationStats,
}

impl<C> DiamDegOutcome<C> {
    pub fn is_coverable(&self) -> bool {
        self.hit.is_some()
    }
}

/// Coverability of `target` over connected topologies with at most `n_max`
/// vertices, diameter at most `k` and degree at most `d`. Each topology is
/// fixed; the target is placed at one vertex and every other vertex starts
/// unconstrained.
pub fn diam_deg_coverable<P: WellStructured>(
    process: &P,
    target: &P::Config,
    k: usize,
    d: usize,
    n_max: usize,
    options: SaturationOptions,
) -> Result<DiamDegOutcome<P::Config>, StaticError> {
    let class = TopologyClass::DiamDeg { k, d };
    let graphs = enumerate_diam_deg_graphs(k, d, n_max)?;
    let wild = Wild(process);
    let space = NetworkSpace::new(&wild, class);
    let mut outcome = DiamDegOutcome {
        graphs: graphs.len(),
        runs: 0,
        exhaustive: moore_bound(k, d) <= n_max as u128,
        hit: None,
        stats: SaturationStats {
            audited: options.audit,
            ..Default::default()
        },
    };
    for graph in graphs {
        let mut orbits = std::collections::HashSet::new();
        for position in 0..graph.order() {
            let marks: Vec<bool> = (0..graph.order()).map(|v| v == position).collect();
            if !orbits.insert(canonical_form_by(&graph, &marks).0) {
                continue;
            }
            let mut labels = vec![Slot::Any; graph.order()];
            labels[position] = Slot::Is(target.clone());
            let seed = LabelledGraph::new(graph.clone(), labels);
            let verdict = Saturation::new(&space).options(options).run(&seed)?;
            outcome.runs += 1;
            let stats = verdict.stats();
            outcome.stats.iterations += stats.iterations;
            outcome.stats.generated += stats.generated;
            outcome.stats.audit_violations += stats.audit_violations;
            outcome.stats.basis_size = outcome.stats.basis_size.max(stats.basis_size);
            outcome.stats.max_basis_size = outcome.stats.max_basis_size.max(stats.max_basis_size);
            if let Verdict::Coverable { witness, .. } = verdict {
                outcome.hit = Some(DiamDegHit {
                    graph,
                    position,
                    witness,
                });
                return Ok(outcome);
            }
        }
    }
    Ok(outcome)
}

/// Why a static witness could not be turned into a run.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("no run follows the saturation chain within {0} explored graphs")]
    NotRealized(usize),
    #[error("constructed run failed replay: {0}")]
    Replay(String),
}

/// Follows a saturation chain forward from an all-initial graph of the first
/// element's shape. `covers(l, c)` says configuration `c` lies above chain
/// label `l`.
fn realize_chain<P, L>(
    process: &P,
    witness: &Witness<LabelledGraph<L>, Letter>,
    covers: impl Fn(&L, &P::Config) -> bool,
    budget: usize,
) -> Result<NetworkRun<P::Config>, WitnessError>
where
    P: Semantics,
{
    let first = &witness.chain[0];
    let initial = process.initial_configs();
    let options: Vec<Vec<P::Config>> = first
        .labels
        .iter()
        .map(|l| initial.iter().filter(|c| covers(l, c)).cloned().collect())
        .collect();

    struct Search<'s, P: Semantics, L, F> {
        process: &'s P,
        witness: &'s Witness<LabelledGraph<L>, Letter>,
        covers: F,
        budget: usize,
        spent: usize,
    }

    impl<P: Semantics, L, F: Fn(&L, &P::Config) -> bool> Search<'_, P, L, F> {
        fn go(&mut self, step: usize, run: &mut NetworkRun<P::Config>) -> bool {
            if step == self.witness.labels.len() {
                return true;
            }
            let a = self.witness.labels[step];
            let current = run.last().clone();
            for v in 0..current.order() {
                for next in bn_step(self.process, &current, v, a) {
                    self.spent += 1;
                    if self.spent > self.budget {
                        return false;
                    }
                    if graph_embeds(&self.witness.chain[step + 1], &next, &self.covers).is_none() {
                        continue;
                    }
                    run.steps.push((NetworkStep::Broadcast { vertex: v, letter: a }, next));
                    if self.go(step + 1, run) {
                        return true;
                    }
                    run.steps.pop();
                }
            }
            false
        }
    }

    let mut search = Search {
        process,
        witness,
        covers,
        budget,
        spent: 0,
    };
    let mut choice = vec![0usize; options.len()];
    if options.iter().any(Vec::is_empty) {
        return Err(WitnessError::NotRealized(0));
    }
    loop {
        let labels = choice.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        let mut run = NetworkRun::new(LabelledGraph::new(first.graph.clone(), labels));
        if search.go(0, &mut run) {
            return Ok(run);
        }
        if search.spent > budget {
            return Err(WitnessError::NotRealized(budget));
        }
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            return Err(WitnessError::NotRealized(search.spent));
        }
    }
}

/// Turns a positive static verdict into a replay-checked run.
pub fn static_witness<P: WellStructured>(
    process: &P,
    witness: &Witness<LabelledGraph<P::Config>, Letter>,
    class: TopologyClass,
    budget: usize,
) -> Result<NetworkRun<P::Config>, WitnessError> {
    let run = realize_chain(process, witness, |l, c| process.leq(l, c), budget)?;
    replay(process, &run, NetworkSemantics::Static(class))
        .map_err(|e| WitnessError::Replay(e.to_string()))?;
    Ok(run)
}

/// Turns a bounded diameter/degree hit into a replay-checked run.
pub fn diam_deg_witness<P: WellStructured>(
    process: &P,
    hit: &DiamDegHit<P::Config>,
    class: TopologyClass,
    budget: usize,
) -> Result<NetworkRun<P::Config>, WitnessError> {
    let covers = |l: &Slot<P::Config>, c: &P::Config| match l {
        Slot::Any => true,
        Slot::Is(l) => process.leq(l, c),
    };
    let run = realize_chain(process, &hit.witness, covers, budget)?;
    replay(process, &run, NetworkSemantics::Static(class))
        .map_err(|e| WitnessError::Replay(e.to_string()))?;
    Ok(run)
}
