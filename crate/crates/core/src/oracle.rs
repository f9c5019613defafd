//! Explicit-state semantics of broadcast networks: single steps, bounded
//! breadth-first exploration and replay of runs.
//!
//! A positive answer from [`explore`] is a concrete run and therefore a proof
//! of coverability. A negative answer only says that nothing was found within
//! the node, depth and magnitude budget.

use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

use thiserror::Error;

use crate::process::{Letter, Semantics, TransitionLabel};
use crate::topology::{
    bits, canonical_form_by, enumerate_graphs, Graph, LabelledGraph, TopologyClass,
};
use crate::wqo::{Resource, ResourceExhausted};

/// Which steps a network may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkSemantics {
    /// Fixed topology drawn from the class.
    Static(TopologyClass),
    /// Edges may be rewritten arbitrarily between broadcasts.
    Reconfigurable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetworkStep {
    Broadcast { vertex: usize, letter: Letter },
    Reconfigure,
}

/// A run of a network: `initial` followed by steps, each paired with the graph
/// it produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkRun<C> {
    pub initial: LabelledGraph<C>,
    pub steps: Vec<(NetworkStep, LabelledGraph<C>)>,
}

impl<C> NetworkRun<C> {
    pub fn new(initial: LabelledGraph<C>) -> Self {
        NetworkRun {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn last(&self) -> &LabelledGraph<C> {
        self.steps.last().map_or(&self.initial, |(_, g)| g)
    }

    pub fn nodes(&self) -> usize {
        self.initial.order()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn broadcasts(&self) -> usize {
        self.steps
            .iter()
            .filter(|(s, _)| matches!(s, NetworkStep::Broadcast { .. }))
            .count()
    }

    pub fn reconfigurations(&self) -> usize {
        self.len() - self.broadcasts()
    }

    /// Index of a vertex of the final graph lying above `target`.
    pub fn covering_vertex<P>(&self, process: &P, target: &C) -> Option<usize>
    where
        P: Semantics<Config = C>,
    {
        self.last().labels.iter().position(|c| process.leq(target, c))
    }
}

/// Graphs reachable from `theta` by vertex `v` broadcasting `a`: `v` takes a
/// `!!a` successor, every neighbour a `??a` successor, the rest is unchanged.
pub fn bn_step<P: Semantics>(
    process: &P,
    theta: &LabelledGraph<P::Config>,
    v: usize,
    a: Letter,
) -> Vec<LabelledGraph<P::Config>> {
    broadcast_labellings(process, &theta.labels, v, theta.graph.neighbor_mask(v), a)
        .into_iter()
        .map(|labels| LabelledGraph::new(theta.graph.clone(), labels))
        .collect()
}

/// Labellings after `v` broadcasts `a` to exactly the vertices in `receivers`.
pub fn broadcast_labellings<P: Semantics>(
    process: &P,
    labels: &[P::Config],
    v: usize,
    receivers: u64,
    a: Letter,
) -> Vec<Vec<P::Config>> {
    let sender = process.successors(&labels[v], TransitionLabel::broadcast(a));
    let mut out: Vec<Vec<P::Config>> = sender
        .into_iter()
        .map(|c| {
            let mut next = labels.to_vec();
            next[v] = c;
            next
        })
        .collect();
    for u in bits(receivers) {
        if out.is_empty() {
            break;
        }
        let options = process.successors(&labels[u], TransitionLabel::receive(a));
        out = out
            .into_iter()
            .flat_map(|partial| {
                options.iter().map(move |c| {
                    let mut next = partial.clone();
                    next[u] = c.clone();
                    next
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) refers to a missing vertex")]
    EdgeOutOfRange(usize, usize),
}

/// Same vertices and labels, edge set replaced by `new_edges`.
pub fn reconfigure<C: Clone>(
    theta: &LabelledGraph<C>,
    new_edges: &[(usize, usize)],
) -> Result<LabelledGraph<C>, OracleError> {
    let n = theta.order();
    let mut graph = Graph::new(n);
    for &(u, v) in new_edges {
        if u == v {
            return Err(OracleError::SelfLoop(u));
        }
        if u >= n || v >= n {
            return Err(OracleError::EdgeOutOfRange(u, v));
        }
        graph.add_edge(u, v);
    }
    Ok(LabelledGraph::new(graph, theta.labels.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("initial graph rejected: {0}")]
    Initial(String),
    #[error("step {index} rejected: {reason}")]
    Step { index: usize, reason: String },
}

/// Checks that `run` starts from initial configurations and that every step is
/// a legal broadcast or, under reconfigurable semantics, a reconfiguration.
pub fn replay<P: Semantics>(
    process: &P,
    run: &NetworkRun<P::Config>,
    semantics: NetworkSemantics,
) -> Result<(), ReplayError> {
    let initial = process.initial_configs();
    for (v, c) in run.initial.labels.iter().enumerate() {
        if !initial.contains(c) {
            return Err(ReplayError::Initial(format!(
                "vertex {v} is labelled {}, which is not initial",
                process.describe(c)
            )));
        }
    }
    if let NetworkSemantics::Static(class) = semantics {
        if !class.contains(&run.initial.graph) {
            return Err(ReplayError::Initial(format!("topology is not in class {class}")));
        }
    }
    let mut before = &run.initial;
    for (index, (step, after)) in run.steps.iter().enumerate() {
        let fail = |reason: String| ReplayError::Step { index, reason };
        if after.order() != before.order() {
            return Err(fail("vertex count changed".into()));
        }
        match *step {
            NetworkStep::Reconfigure => {
                if semantics != NetworkSemantics::Reconfigurable {
                    return Err(fail("reconfiguration under static semantics".into()));
                }
                if after.labels != before.labels {
                    return Err(fail("reconfiguration changed a label".into()));
                }
            }
            NetworkStep::Broadcast { vertex, letter } => {
                check_broadcast(process, before, after, vertex, letter).map_err(fail)?;
            }
        }
        before = after;
    }
    Ok(())
}

fn check_broadcast<P: Semantics>(
    process: &P,
    before: &LabelledGraph<P::Config>,
    after: &LabelledGraph<P::Config>,
    v: usize,
    a: Letter,
) -> Result<(), String> {
    if v >= before.order() {
        return Err(format!("broadcaster {v} does not exist"));
    }
    if after.graph != before.graph {
        return Err("broadcast changed the topology".into());
    }
    let letters = process.letter_names();
    for u in 0..before.order() {
        let label = if u == v {
            TransitionLabel::broadcast(a)
        } else if before.graph.has_edge(u, v) {
            TransitionLabel::receive(a)
        } else {
            if after.labels[u] != before.labels[u] {
                return Err(format!("vertex {u} is not a neighbour of {v} but changed"));
            }
            continue;
        };
        if !process
            .successors(&before.labels[u], label)
            .contains(&after.labels[u])
        {
            return Err(format!(
                "vertex {u} cannot move from {} to {} by {}",
                process.describe(&before.labels[u]),
                process.describe(&after.labels[u]),
                label.display(letters)
            ));
        }
    }
    Ok(())
}

/// Budget for [`explore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreOptions {
    /// Exact number of network nodes.
    pub nodes: usize,
    /// Maximum number of broadcasts. Reconfigurations are not counted.
    pub depth: usize,
    /// Configurations whose magnitude (largest counter, stack height) exceeds
    /// this are discarded.
    pub magnitude_cap: usize,
    pub max_states: usize,
}

impl ExploreOptions {
    pub fn new(nodes: usize, depth: usize) -> Self {
        ExploreOptions {
            nodes,
            depth,
            magnitude_cap: 8,
            max_states: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExploreOutcome<C> {
    pub run: Option<NetworkRun<C>>,
    /// Distinct states visited, up to isomorphism.
    pub explored: usize,
    /// Whether some successor was discarded by the magnitude cap.
    pub capped: bool,
}

struct Node<C> {
    graph: LabelledGraph<C>,
    parent: usize,
    steps: Vec<(NetworkStep, LabelledGraph<C>)>,
    depth: usize,
}

/// Breadth-first search for a run on exactly `options.nodes` vertices that
/// ends with some vertex above `target`.
///
/// Static semantics starts from every class member shape; reconfigurable
/// semantics starts edgeless and, before each broadcast, rewires to the star
/// joining the broadcaster to its chosen receivers. States are deduplicated up
/// to label-preserving isomorphism (reconfigurable states by label multiset).
pub fn explore<P>(
    process: &P,
    semantics: NetworkSemantics,
    options: ExploreOptions,
    target: &P::Config,
) -> Result<ExploreOutcome<P::Config>, ResourceExhausted>
where
    P: Semantics,
{
    let n = options.nodes;
    if n == 0 {
        return Ok(ExploreOutcome {
            run: None,
            explored: 0,
            capped: false,
        });
    }
    let shapes = match semantics {
        NetworkSemantics::Reconfigurable => vec![Graph::new(n)],
        NetworkSemantics::Static(TopologyClass::Clique) => vec![Graph::complete(n)],
        NetworkSemantics::Static(class) => enumerate_graphs(n)?
            .into_iter()
            .filter(|g| class.contains(g))
            .collect(),
    };
    let key = |g: &LabelledGraph<P::Config>| -> (Vec<P::Config>, Vec<u64>) {
        match semantics {
            NetworkSemantics::Reconfigurable => {
                let mut labels = g.labels.clone();
                labels.sort();
                (labels, Vec::new())
            }
            NetworkSemantics::Static(_) => {
                let (form, _) = canonical_form_by(&g.graph, &g.labels);
                (form.keys, form.rows)
            }
        }
    };

    let mut seen: HashSet<(Vec<P::Config>, Vec<u64>)> = HashSet::new();
    let mut nodes: Vec<Node<P::Config>> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut capped = false;
    let covers = |g: &LabelledGraph<P::Config>| g.labels.iter().any(|c| process.leq(target, c));

    let initial = process.initial_configs();
    for shape in &shapes {
        for assignment in assignments(initial.len(), n) {
            let labels = assignment.iter().map(|&i| initial[i].clone()).collect();
            let graph = LabelledGraph::new(shape.clone(), labels);
            if !seen.insert(key(&graph)) {
                continue;
            }
            let idx = nodes.len();
            nodes.push(Node {
                graph,
                parent: usize::MAX,
                steps: Vec::new(),
                depth: 0,
            });
            if covers(&nodes[idx].graph) {
                return Ok(ExploreOutcome {
                    run: Some(rebuild(&nodes, idx)),
                    explored: nodes.len(),
                    capped,
                });
            }
            queue.push_back(idx);
        }
    }

    let letters = process.letters();
    while let Some(idx) = queue.pop_front() {
        if nodes[idx].depth >= options.depth {
            continue;
        }
        let current = nodes[idx].graph.clone();
        let mut successors: Vec<(Vec<(NetworkStep, LabelledGraph<P::Config>)>, LabelledGraph<P::Config>)> =
            Vec::new();
        for v in 0..n {
            for &a in &letters {
                if process
                    .successors(&current.labels[v], TransitionLabel::broadcast(a))
                    .is_empty()
                {
                    continue;
                }
                let step = NetworkStep::Broadcast { vertex: v, letter: a };
                match semantics {
                    NetworkSemantics::Static(_) => {
                        for next in bn_step(process, &current, v, a) {
                            successors.push((vec![(step, next.clone())], next));
                        }
                    }
                    NetworkSemantics::Reconfigurable => {
                        let able = (0..n)
                            .filter(|&u| {
                                u != v
                                    && !process
                                        .successors(&current.labels[u], TransitionLabel::receive(a))
                                        .is_empty()
                            })
                            .fold(0u64, |m, u| m | 1 << u);
                        let mut subset = 0u64;
                        loop {
                            let star = Graph::from_edges(
                                n,
                                &bits(subset).map(|u| (v, u)).collect::<Vec<_>>(),
                            );
                            let rewired = LabelledGraph::new(star.clone(), current.labels.clone());
                            for labels in broadcast_labellings(process, &current.labels, v, subset, a) {
                                let next = LabelledGraph::new(star.clone(), labels);
                                let mut steps = Vec::with_capacity(2);
                                if star != current.graph {
                                    steps.push((NetworkStep::Reconfigure, rewired.clone()));
                                }
                                steps.push((step, next.clone()));
                                successors.push((steps, next));
                            }
                            // next subset of `able`
                            subset = subset.wrapping_sub(able) & able;
                            if subset == 0 {
                                break;
                            }
                        }
                    }
                }
            }
        }
        for (steps, next) in successors {
            if next.labels.iter().any(|c| process.magnitude(c) > options.magnitude_cap) {
                capped = true;
                continue;
            }
            if !seen.insert(key(&next)) {
                continue;
            }
            if nodes.len() >= options.max_states {
                return Err(ResourceExhausted::new(Resource::ExploredStates, options.max_states));
            }
            let child = nodes.len();
            let hit = covers(&next);
            nodes.push(Node {
                graph: next,
                parent: idx,
                steps,
                depth: nodes[idx].depth + 1,
            });
            if hit {
                return Ok(ExploreOutcome {
                    run: Some(rebuild(&nodes, child)),
                    explored: nodes.len(),
                    capped,
                });
            }
            queue.push_back(child);
        }
    }
    Ok(ExploreOutcome {
        run: None,
        explored: nodes.len(),
        capped,
    })
}

/// All maps `0..n -> 0..k`, as index vectors, in lexicographic order.
fn assignments(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..k).map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    out
}

fn rebuild<C: Clone>(nodes: &[Node<C>], mut idx: usize) -> NetworkRun<C> {
    let mut chunks = Vec::new();
    while nodes[idx].parent != usize::MAX {
        chunks.push(nodes[idx].steps.clone());
        idx = nodes[idx].parent;
    }
    let mut run = NetworkRun::new(nodes[idx].graph.clone());
    for chunk in chunks.into_iter().rev() {
        run.steps.extend(chunk);
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::VassSpec;

    fn relay() -> VassSpec {
        VassSpec::builder(1)
            .initial("q0", &[1])
            .initial("q6", &[1])
            .transition("q0", "!!a", &[-1], "q1")
            .transition("q1", "??b", &[1], "q2")
            .transition("q2", "??c", &[1], "q3")
            .transition("q2", "??d", &[1], "q4")
            .transition("q3", "!!d", &[-1], "q5")
            .transition("q6", "??a", &[1], "q7")
            .transition("q7", "!!b", &[-1], "q8")
            .transition("q8", "!!c", &[-1], "q9")
            .build()
            .unwrap()
    }

    #[test]
    fn star_broadcast() {
        let p = relay();
        let mut labels = vec![p.config("q0", &[1])];
        labels.extend(std::iter::repeat_n(p.config("q6", &[1]), 4));
        let theta = LabelledGraph::new(Graph::star(4), labels);
        let out = bn_step(&p, &theta, 0, p.letter_id("a").unwrap());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].labels[0], p.config("q1", &[0]));
        assert!(out[0].labels[1..].iter().all(|c| *c == p.config("q7", &[2])));
    }

    #[test]
    fn isolated_broadcaster_changes_alone() {
        let p = relay();
        let theta = LabelledGraph::new(Graph::new(2), vec![p.config("q0", &[1]), p.config("q6", &[1])]);
        let out = bn_step(&p, &theta, 0, p.letter_id("a").unwrap());
        assert_eq!(out, vec![LabelledGraph::new(Graph::new(2), vec![p.config("q1", &[0]), p.config("q6", &[1])])]);
    }

    #[test]
    fn blocked_receiver_blocks_broadcast() {
        let p = relay();
        let theta = LabelledGraph::new(Graph::path(2), vec![p.config("q0", &[1]), p.config("q0", &[1])]);
        assert!(bn_step(&p, &theta, 0, p.letter_id("a").unwrap()).is_empty());
    }

    #[test]
    fn reconfigure_rules() {
        let theta = LabelledGraph::new(Graph::path(3), vec![1, 2, 3]);
        let cleared = reconfigure(&theta, &[]).unwrap();
        assert_eq!(cleared.graph.edge_count(), 0);
        assert_eq!(cleared.labels, theta.labels);
        assert_eq!(reconfigure(&theta, &[(1, 1)]), Err(OracleError::SelfLoop(1)));
        let once = reconfigure(&theta, &[(0, 2)]).unwrap();
        assert_eq!(reconfigure(&once, &[(0, 2)]).unwrap(), once);
    }

    #[test]
    fn explore_finds_q4_with_three_nodes() {
        let p = relay();
        let target = p.config("q4", &[0]);
        let out = explore(&p, NetworkSemantics::Reconfigurable, ExploreOptions::new(3, 9), &target).unwrap();
        let run = out.run.expect("coverable with three nodes");
        assert_eq!(run.broadcasts(), 5);
        assert!(run.covering_vertex(&p, &target).is_some());
        replay(&p, &run, NetworkSemantics::Reconfigurable).unwrap();
        let none = explore(&p, NetworkSemantics::Reconfigurable, ExploreOptions::new(2, 9), &target).unwrap();
        assert!(none.run.is_none());
    }

    #[test]
    fn trivial_target_needs_no_step() {
        let p = relay();
        let out = explore(&p, NetworkSemantics::Reconfigurable, ExploreOptions::new(1, 0), &p.config("q0", &[0])).unwrap();
        assert!(out.run.unwrap().is_empty());
    }

    #[test]
    fn replay_rejects_bad_receive() {
        let p = relay();
        let g0 = LabelledGraph::new(Graph::path(2), vec![p.config("q0", &[1]), p.config("q6", &[1])]);
        let g1 = LabelledGraph::new(Graph::path(2), vec![p.config("q1", &[0]), p.config("q6", &[1])]);
        let mut run = NetworkRun::new(g0);
        let a = p.letter_id("a").unwrap();
        run.steps.push((NetworkStep::Broadcast { vertex: 0, letter: a }, g1));
        let err = replay(&p, &run, NetworkSemantics::Static(TopologyClass::PathBounded(2))).unwrap_err();
        assert!(matches!(err, ReplayError::Step { index: 0, .. }));
    }
}
