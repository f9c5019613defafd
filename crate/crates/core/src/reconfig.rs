//! Coverability under reconfigurable semantics.
//!
//! Because edges can be rewritten before every broadcast, a receive `??a` is
//! usable as soon as some node can reach a configuration that broadcasts `a`.
//! The decider starts from the process with all receives removed and, sweep by
//! sweep, restores the receives of every letter whose broadcast has become
//! coverable. Once a sweep restores nothing, the target is coverable in the
//! network iff it is coverable in the resulting single process.

use thiserror::Error;

use crate::oracle::{
    explore, replay, ExploreOptions, NetworkRun, NetworkSemantics, NetworkStep,
};
use crate::process::{Letter, ProcessRun, ProcessSpace, Semantics, TransitionLabel, VassSpec};
use crate::pushdown::{PdsConfig, PushdownSpec};
use crate::topology::{Graph, LabelledGraph};
use crate::wqo::{
    realize_witness, ResourceExhausted, Saturation, SaturationOptions, SaturationStats, Verdict,
};

/// Outcome of one single-process coverability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub coverable: bool,
    /// Present for saturation-based engines.
    pub stats: Option<SaturationStats>,
}

/// What the sweep driver needs from a process model.
pub trait Reconfigurable: Semantics + Clone {
    fn strip_receives(&self) -> Self;

    /// `self` plus the `??letter` transitions of `original`.
    fn add_receives(&self, original: &Self, letter: Letter) -> Self;

    /// Finite basis of the configurations enabling some `!!letter` transition.
    fn broadcast_basis(&self, letter: Letter) -> Vec<Self::Config>;

    fn cover(&self, target: &Self::Config, options: SaturationOptions) -> Result<Cover, ResourceExhausted>;

    /// A run of this process from an initial configuration into `↑target`.
    fn cover_run(&self, target: &Self::Config, options: SaturationOptions) -> Option<ProcessRun<Self::Config>>;
}

impl Reconfigurable for VassSpec {
    fn strip_receives(&self) -> Self {
        VassSpec::strip_receives(self)
    }

    fn add_receives(&self, original: &Self, letter: Letter) -> Self {
        VassSpec::add_receives(self, original, letter)
    }

    fn broadcast_basis(&self, letter: Letter) -> Vec<Self::Config> {
        VassSpec::broadcast_basis(self, letter)
    }

    fn cover(&self, target: &Self::Config, options: SaturationOptions) -> Result<Cover, ResourceExhausted> {
        let verdict = Saturation::new(&ProcessSpace(self)).options(options).run(target)?;
        Ok(Cover {
            coverable: verdict.is_coverable(),
            stats: Some(verdict.stats().clone()),
        })
    }

    fn cover_run(&self, target: &Self::Config, options: SaturationOptions) -> Option<ProcessRun<Self::Config>> {
        let space = ProcessSpace(self);
        let Ok(Verdict::Coverable { witness, .. }) = Saturation::new(&space).options(options).run(target)
        else {
            return None;
        };
        self.initial().iter().find_map(|start| {
            let path = realize_witness(&space, start, &witness)?;
            let mut configs = path.into_iter();
            let start = configs.next()?;
            Some(ProcessRun {
                start,
                steps: witness.labels.iter().copied().zip(configs).collect(),
            })
        })
    }
}

impl Reconfigurable for PushdownSpec {
    fn strip_receives(&self) -> Self {
        PushdownSpec::strip_receives(self)
    }

    fn add_receives(&self, original: &Self, letter: Letter) -> Self {
        PushdownSpec::add_receives(self, original, letter)
    }

    fn broadcast_basis(&self, letter: Letter) -> Vec<PdsConfig> {
        self.pds_ca(letter)
    }

    fn cover(&self, target: &PdsConfig, _options: SaturationOptions) -> Result<Cover, ResourceExhausted> {
        Ok(Cover {
            coverable: self.pds_coverable(target),
            stats: None,
        })
    }

    fn cover_run(&self, target: &PdsConfig, _options: SaturationOptions) -> Option<ProcessRun<PdsConfig>> {
        if !self.pds_coverable(target) {
            return None;
        }
        [8, 16, 32, 64]
            .into_iter()
            .find_map(|cap| self.find_run(target, target.stack.len() + cap, 200_000))
    }
}

/// One inner coverability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query<C> {
    pub letter: Letter,
    pub config: C,
    pub coverable: bool,
    pub stats: Option<SaturationStats>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep<C> {
    /// Letters whose receives are restored at the end of this sweep.
    pub unlocked: Vec<Letter>,
    pub queries: Vec<Query<C>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unlock<C> {
    pub letter: Letter,
    /// Index of the sweep that unlocked the letter.
    pub sweep: usize,
    /// Element of the broadcast basis found coverable.
    pub enabler: C,
}

/// Record of the sweeps, including the last one, which unlocks nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationTrace<C> {
    pub sweeps: Vec<Sweep<C>>,
    pub unlocks: Vec<Unlock<C>>,
}

impl<C> SaturationTrace<C> {
    pub fn final_unlocked(&self) -> Vec<Letter> {
        self.unlocks.iter().map(|u| u.letter).collect()
    }

    /// Inner queries on broadcast-basis elements, excluding the final target
    /// query.
    pub fn query_count(&self) -> usize {
        self.sweeps.iter().map(|s| s.queries.len()).sum()
    }

    pub fn unlock(&self, letter: Letter) -> Option<&Unlock<C>> {
        self.unlocks.iter().find(|u| u.letter == letter)
    }

    pub fn audit_violations(&self) -> usize {
        self.sweeps
            .iter()
            .flat_map(|s| &s.queries)
            .filter_map(|q| q.stats.as_ref())
            .map(|s| s.audit_violations)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RbnOutcome<C> {
    pub coverable: bool,
    pub trace: SaturationTrace<C>,
    /// The final target query.
    pub target_query: Cover,
}

/// Decides coverability of `target` in the reconfigurable network of
/// `process`.
pub fn rbn_coverable<P: Reconfigurable>(
    process: &P,
    target: &P::Config,
    options: SaturationOptions,
) -> Result<RbnOutcome<P::Config>, ResourceExhausted> {
    let mut current = process.strip_receives();
    let mut remaining = process.letters();
    let mut trace = SaturationTrace {
        sweeps: Vec::new(),
        unlocks: Vec::new(),
    };
    loop {
        let index = trace.sweeps.len();
        let mut sweep = Sweep {
            unlocked: Vec::new(),
            queries: Vec::new(),
        };
        for &a in &remaining {
            for c in process.broadcast_basis(a) {
                let cover = current.cover(&c, options)?;
                sweep.queries.push(Query {
                    letter: a,
                    config: c.clone(),
                    coverable: cover.coverable,
                    stats: cover.stats,
                });
                if cover.coverable {
                    sweep.unlocked.push(a);
                    trace.unlocks.push(Unlock {
                        letter: a,
                        sweep: index,
                        enabler: c,
                    });
                    break;
                }
            }
        }
        remaining.retain(|a| !sweep.unlocked.contains(a));
        for &a in &sweep.unlocked {
            current = current.add_receives(process, a);
        }
        let done = sweep.unlocked.is_empty();
        trace.sweeps.push(sweep);
        if done {
            break;
        }
    }
    let target_query = current.cover(target, options)?;
    Ok(RbnOutcome {
        coverable: target_query.coverable,
        trace,
        target_query,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("no single-process run covers {0}")]
    NoProcessRun(String),
    #[error("witness construction exceeded {0} nodes")]
    TooManyNodes(usize),
    #[error("constructed run failed replay: {0}")]
    Replay(String),
    #[error("letter {0} was never unlocked")]
    Locked(String),
}

/// Limits for [`rbn_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessOptions {
    pub max_nodes: usize,
    /// Try to replace the stitched run by one on at most this many nodes; 0
    /// disables the search.
    pub compact_nodes: usize,
    pub compact_states: usize,
    pub saturation: SaturationOptions,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            max_nodes: 64,
            compact_nodes: 4,
            compact_states: 200_000,
            saturation: SaturationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RbnWitness<C> {
    pub run: NetworkRun<C>,
    /// Node and step counts of the stitched run before compaction.
    pub stitched_nodes: usize,
    pub stitched_steps: usize,
    pub compacted: bool,
}

struct Stitcher<'a, P: Reconfigurable> {
    process: &'a P,
    /// `levels[s]`: the model used during sweep `s`; the last entry is final.
    levels: Vec<P>,
    trace: &'a SaturationTrace<P::Config>,
    labels: Vec<P::Config>,
    busy: Vec<bool>,
    graph: Graph,
    steps: Vec<(NetworkStep, Vec<P::Config>, Graph)>,
    initial: Vec<P::Config>,
    options: WitnessOptions,
}

impl<P: Reconfigurable> Stitcher<'_, P> {
    fn fresh(&mut self, start: P::Config) -> Result<usize, WitnessError> {
        if self.labels.len() >= self.options.max_nodes {
            return Err(WitnessError::TooManyNodes(self.options.max_nodes));
        }
        // New nodes join at the start of the run, isolated.
        self.initial.push(start.clone());
        self.labels.push(start);
        self.busy.push(false);
        let n = self.labels.len();
        let mut grown = Graph::new(n);
        for (u, v) in self.graph.edges() {
            grown.add_edge(u, v);
        }
        self.graph = grown;
        for (_, _, g) in &mut self.steps {
            let mut grown = Graph::new(n);
            for (u, v) in g.edges() {
                grown.add_edge(u, v);
            }
            *g = grown;
        }
        for (_, labels, _) in &mut self.steps {
            labels.push(self.initial[n - 1].clone());
        }
        Ok(n - 1)
    }

    fn rewire(&mut self, sender: usize, receiver: Option<usize>) {
        let n = self.labels.len();
        let star = match receiver {
            Some(r) => Graph::from_edges(n, &[(sender, r)]),
            None => Graph::new(n),
        };
        let sender_isolated_enough = match receiver {
            None => self.graph.neighbor_mask(sender) == 0,
            Some(_) => false,
        };
        if star != self.graph && !sender_isolated_enough {
            self.graph = star;
            self.steps
                .push((NetworkStep::Reconfigure, self.labels.clone(), self.graph.clone()));
        }
    }

    fn broadcast(&mut self, sender: usize, letter: Letter, sender_next: P::Config, receiver: Option<(usize, P::Config)>) {
        self.rewire(sender, receiver.as_ref().map(|(r, _)| *r));
        self.labels[sender] = sender_next;
        if let Some((r, c)) = receiver {
            self.labels[r] = c;
        }
        self.steps.push((
            NetworkStep::Broadcast { vertex: sender, letter },
            self.labels.clone(),
            self.graph.clone(),
        ));
    }

    /// Adds a node that ends above `goal`, using the model of sweep `level`.
    fn drive(&mut self, goal: &P::Config, level: usize) -> Result<usize, WitnessError> {
        let run = self.levels[level]
            .cover_run(goal, self.options.saturation)
            .ok_or_else(|| WitnessError::NoProcessRun(self.process.describe(goal)))?;
        let node = self.fresh(run.start.clone())?;
        self.busy[node] = true;
        for (label, next) in run.steps {
            if label.is_broadcast() {
                self.broadcast(node, label.letter, next, None);
                continue;
            }
            let unlock = self
                .trace
                .unlock(label.letter)
                .ok_or_else(|| {
                    WitnessError::Locked(label.display(self.process.letter_names()).to_string())
                })?;
            let (enabler, sweep) = (unlock.enabler.clone(), unlock.sweep);
            let helper = match (0..self.labels.len())
                .find(|&h| !self.busy[h] && self.process.leq(&enabler, &self.labels[h]))
            {
                Some(h) => h,
                None => self.drive(&enabler, sweep)?,
            };
            let sender_next = self
                .process
                .successors(&self.labels[helper], TransitionLabel::broadcast(label.letter))
                .into_iter()
                .next()
                .ok_or_else(|| WitnessError::NoProcessRun(self.process.describe(&enabler)))?;
            self.broadcast(helper, label.letter, sender_next, Some((node, next)));
        }
        self.busy[node] = false;
        Ok(node)
    }
}

/// Builds a concrete reconfigurable run covering `target` after a positive
/// [`rbn_coverable`] answer, then validates it by replay.
///
/// Nodes are stitched together from single-process runs: every receive is
/// served by a helper node driven to the letter's broadcast enabler, joined to
/// the receiver by a reconfiguration just before the broadcast. The result is
/// then replaced, when possible, by a bounded search on fewer nodes.
pub fn rbn_witness<P: Reconfigurable>(
    process: &P,
    target: &P::Config,
    trace: &SaturationTrace<P::Config>,
    options: WitnessOptions,
) -> Result<RbnWitness<P::Config>, WitnessError> {
    let mut levels = vec![process.strip_receives()];
    for sweep in &trace.sweeps {
        let mut next = levels.last().expect("non-empty").clone();
        for &a in &sweep.unlocked {
            next = next.add_receives(process, a);
        }
        levels.push(next);
    }
    let final_level = levels.len() - 1;
    let mut stitcher = Stitcher {
        process,
        levels,
        trace,
        labels: Vec::new(),
        busy: Vec::new(),
        graph: Graph::new(0),
        steps: Vec::new(),
        initial: Vec::new(),
        options,
    };
    stitcher.drive(target, final_level)?;

    let initial = LabelledGraph::new(Graph::new(stitcher.initial.len()), stitcher.initial.clone());
    let run = NetworkRun {
        initial,
        steps: stitcher
            .steps
            .into_iter()
            .map(|(step, labels, graph)| (step, LabelledGraph::new(graph, labels)))
            .collect(),
    };
    replay(process, &run, NetworkSemantics::Reconfigurable)
        .map_err(|e| WitnessError::Replay(e.to_string()))?;
    let stitched_nodes = run.nodes();
    let stitched_steps = run.len();

    let limit = options.compact_nodes.min(stitched_nodes.saturating_sub(1));
    if limit > 0 {
        let cap = run
            .steps
            .iter()
            .flat_map(|(_, g)| &g.labels)
            .chain(&run.initial.labels)
            .map(|c| process.magnitude(c))
            .max()
            .unwrap_or(0);
        for nodes in 1..=limit {
            let explore_options = ExploreOptions {
                nodes,
                depth: run.broadcasts(),
                magnitude_cap: cap,
                max_states: options.compact_states,
            };
            let Ok(found) = explore(process, NetworkSemantics::Reconfigurable, explore_options, target) else {
                continue;
            };
            if let Some(small) = found.run {
                if replay(process, &small, NetworkSemantics::Reconfigurable).is_ok() {
                    return Ok(RbnWitness {
                        run: small,
                        stitched_nodes,
                        stitched_steps,
                        compacted: true,
                    });
                }
            }
        }
    }
    Ok(RbnWitness {
        run,
        stitched_nodes,
        stitched_steps,
        compacted: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::FiniteSpec;

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
    fn q4_is_coverable_with_small_witness() {
        let p = relay();
        let target = p.config("q4", &[0]);
        let out = rbn_coverable(&p, &target, SaturationOptions::default()).unwrap();
        assert!(out.coverable);
        assert!(out.trace.sweeps.len() <= p.letters().len() + 1);
        let w = rbn_witness(&p, &target, &out.trace, WitnessOptions::default()).unwrap();
        assert!(w.run.nodes() <= 3 && w.run.len() <= 12, "{} nodes, {} steps", w.run.nodes(), w.run.len());
        assert!(w.run.covering_vertex(&p, &target).is_some());
    }

    #[test]
    fn stitched_run_replays_without_compaction() {
        let p = relay();
        let target = p.config("q4", &[0]);
        let out = rbn_coverable(&p, &target, SaturationOptions::default()).unwrap();
        let options = WitnessOptions {
            compact_nodes: 0,
            ..Default::default()
        };
        let w = rbn_witness(&p, &target, &out.trace, options).unwrap();
        assert!(!w.compacted);
        assert!(w.run.covering_vertex(&p, &target).is_some());
        replay(&p, &w.run, NetworkSemantics::Reconfigurable).unwrap();
    }

    #[test]
    fn no_broadcaster_means_no_receive() {
        let p = FiniteSpec::new()
            .initial("q")
            .transition("q", "??a", "q'")
            .into_vass()
            .unwrap();
        let out = rbn_coverable(&p, &p.config("q'", &[]), SaturationOptions::default()).unwrap();
        assert!(!out.coverable);
        assert!(out.trace.unlocks.is_empty());
        assert_eq!(out.trace.query_count(), 0);
    }

    #[test]
    fn broadcast_only_witness_is_one_node() {
        let p = FiniteSpec::new()
            .initial("q")
            .transition("q", "!!a", "r")
            .into_vass()
            .unwrap();
        let target = p.config("r", &[]);
        let out = rbn_coverable(&p, &target, SaturationOptions::default()).unwrap();
        let w = rbn_witness(&p, &target, &out.trace, WitnessOptions::default()).unwrap();
        assert_eq!(w.run.nodes(), 1);
        assert_eq!(w.run.reconfigurations(), 0);
    }

    #[test]
    fn pushdown_handshake() {
        let p = PushdownSpec::builder(&["A"])
            .initial("p0")
            .initial("r0")
            .rule("p0", "!!req", None, "p1", &["A"])
            .rule("p1", "!!ack", Some("A"), "p2", &[])
            .rule("r0", "??ack", None, "r1", &[])
            .build()
            .unwrap();
        let target = p.config("r1", "");
        let out = rbn_coverable(&p, &target, SaturationOptions::default()).unwrap();
        assert!(out.coverable);
        let w = rbn_witness(&p, &target, &out.trace, WitnessOptions::default()).unwrap();
        assert_eq!(w.run.nodes(), 2);
    }
}
