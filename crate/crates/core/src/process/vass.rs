use std::collections::HashMap;

use super::{
    is_identifier, parse_label, Letter, ModelError, Polarity, Semantics, StateId,
    TransitionLabel, WellStructured,
};
use crate::wqo::minimize;

/// Control state plus a vector of natural-number counters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VassConfig {
    pub state: StateId,
    pub counters: Vec<u32>,
}

impl VassConfig {
    pub fn new(state: StateId, counters: Vec<u32>) -> Self {
        VassConfig { state, counters }
    }

    /// Same control state and componentwise `≤` on counters.
    pub fn leq(&self, other: &VassConfig) -> bool {
        self.state == other.state
            && self
                .counters
                .iter()
                .zip(&other.counters)
                .all(|(a, b)| a <= b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VassTransition {
    pub source: StateId,
    pub label: TransitionLabel,
    pub delta: Vec<i32>,
    pub target: StateId,
}

/// Vector addition system with states whose transitions carry broadcast or
/// receive labels. Finite-state processes are the zero-dimensional case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VassSpec {
    states: Vec<String>,
    letters: Vec<String>,
    dim: usize,
    initial: Vec<VassConfig>,
    transitions: Vec<VassTransition>,
}

impl VassSpec {
    pub fn builder(dim: usize) -> VassBuilder {
        VassBuilder::new(dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32))
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.index()]
    }

    pub fn letter_id(&self, name: &str) -> Option<Letter> {
        self.letters
            .iter()
            .position(|s| s == name)
            .map(|i| Letter(i as u32))
    }

    pub fn initial(&self) -> &[VassConfig] {
        &self.initial
    }

    pub fn transitions(&self) -> &[VassTransition] {
        &self.transitions
    }

    /// Convenience for tests and examples: `config("q1", &[0])`.
    ///
    /// # Panics
    /// If the state is unknown.
    pub fn config(&self, state: &str, counters: &[u32]) -> VassConfig {
        let id = self
            .state_id(state)
            .unwrap_or_else(|| panic!("unknown state `{state}`"));
        VassConfig::new(id, counters.to_vec())
    }

    /// All `(q, u + v)` for transitions `(c.state, label, v, q)` with `u + v ≥ 0`,
    /// in declaration order.
    pub fn vass_successors(&self, c: &VassConfig, label: TransitionLabel) -> Vec<VassConfig> {
        self.transitions
            .iter()
            .filter(|t| t.source == c.state && t.label == label)
            .filter_map(|t| apply_delta(&c.counters, &t.delta).map(|w| VassConfig::new(t.target, w)))
            .collect()
    }

    /// Minimal basis of the configurations with a `label`-successor in `↑basis`.
    pub fn vass_pre_basis(&self, label: TransitionLabel, basis: &[VassConfig]) -> Vec<VassConfig> {
        let mut out = Vec::new();
        for t in self.transitions.iter().filter(|t| t.label == label) {
            for b in basis.iter().filter(|b| b.state == t.target) {
                let counters = b
                    .counters
                    .iter()
                    .zip(&t.delta)
                    .map(|(&u, &v)| {
                        let u = i64::from(u);
                        let v = i64::from(v);
                        (u - v).max(-v).max(0) as u32
                    })
                    .collect();
                out.push(VassConfig::new(t.source, counters));
            }
        }
        minimize(out, VassConfig::leq)
    }

    /// Minimal configurations enabling some transition with `label`: for each
    /// such transition `(p, label, v, q)`, the configuration `(p, max(0, -v))`.
    pub fn vass_min_enabling(&self, label: TransitionLabel) -> Vec<VassConfig> {
        let out = self
            .transitions
            .iter()
            .filter(|t| t.label == label)
            .map(|t| {
                let u = t.delta.iter().map(|&v| (-i64::from(v)).max(0) as u32).collect();
                VassConfig::new(t.source, u)
            })
            .collect();
        minimize(out, VassConfig::leq)
    }

    /// The set `C_a`: minimal configurations at which `!!a` is enabled.
    pub fn broadcast_basis(&self, letter: Letter) -> Vec<VassConfig> {
        self.vass_min_enabling(TransitionLabel::broadcast(letter))
    }

    /// Copy without receive transitions.
    pub fn strip_receives(&self) -> VassSpec {
        VassSpec {
            transitions: self
                .transitions
                .iter()
                .filter(|t| t.label.is_broadcast())
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// Copy of `self` with the `??letter` transitions of `original` restored.
    /// Transitions keep the order they have in `original`.
    pub fn add_receives(&self, original: &VassSpec, letter: Letter) -> VassSpec {
        let restored = TransitionLabel::receive(letter);
        VassSpec {
            transitions: original
                .transitions
                .iter()
                .filter(|t| t.label == restored || self.transitions.contains(t))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// Sends every missing receive to `dead`, which absorbs all letters.
    ///
    /// For each state and letter without an explicit `??letter` transition, a
    /// zero-delta transition to `dead` is appended. `dead` is created if absent.
    pub fn complete_receives(&self, dead: &str) -> Result<VassSpec, ModelError> {
        if !is_identifier(dead) {
            return Err(ModelError::BadIdentifier(dead.to_owned()));
        }
        let mut spec = self.clone();
        let dead_id = match spec.state_id(dead) {
            Some(id) => id,
            None => {
                spec.states.push(dead.to_owned());
                StateId(spec.states.len() as u32 - 1)
            }
        };
        let zero = vec![0; spec.dim];
        for s in 0..spec.states.len() {
            let source = StateId(s as u32);
            for a in 0..spec.letters.len() {
                let label = TransitionLabel::receive(Letter(a as u32));
                let present = self
                    .transitions
                    .iter()
                    .any(|t| t.source == source && t.label == label);
                if !present {
                    spec.transitions.push(VassTransition {
                        source,
                        label,
                        delta: zero.clone(),
                        target: dead_id,
                    });
                }
            }
        }
        Ok(spec)
    }

    pub fn has_receives(&self) -> bool {
        self.transitions.iter().any(|t| t.label.is_receive())
    }

    /// Relabels every receive as a broadcast of the same letter.
    pub fn all_broadcast(&self) -> VassSpec {
        let mut spec = self.clone();
        for t in &mut spec.transitions {
            t.label.polarity = Polarity::Broadcast;
        }
        spec
    }

    pub fn describe_config(&self, c: &VassConfig) -> String {
        if self.dim == 0 {
            self.state_name(c.state).to_owned()
        } else {
            let counters: Vec<String> = c.counters.iter().map(u32::to_string).collect();
            format!("{},({})", self.state_name(c.state), counters.join(","))
        }
    }
}

fn apply_delta(u: &[u32], v: &[i32]) -> Option<Vec<u32>> {
    u.iter()
        .zip(v)
        .map(|(&u, &v)| u32::try_from(i64::from(u) + i64::from(v)).ok())
        .collect()
}

impl Semantics for VassSpec {
    type Config = VassConfig;

    fn letters(&self) -> Vec<Letter> {
        (0..self.letters.len() as u32).map(Letter).collect()
    }

    fn letter_names(&self) -> &[String] {
        &self.letters
    }

    fn successors(&self, c: &VassConfig, label: TransitionLabel) -> Vec<VassConfig> {
        self.vass_successors(c, label)
    }

    fn leq(&self, lhs: &VassConfig, rhs: &VassConfig) -> bool {
        lhs.leq(rhs)
    }

    fn initial_configs(&self) -> Vec<VassConfig> {
        self.initial.clone()
    }

    fn magnitude(&self, c: &VassConfig) -> usize {
        c.counters.iter().copied().max().unwrap_or(0) as usize
    }

    fn describe(&self, c: &VassConfig) -> String {
        self.describe_config(c)
    }
}

impl WellStructured for VassSpec {
    fn labels(&self) -> Vec<TransitionLabel> {
        let mut labels: Vec<TransitionLabel> = Vec::new();
        for t in &self.transitions {
            if !labels.contains(&t.label) {
                labels.push(t.label);
            }
        }
        labels
    }

    fn pre_basis(&self, label: TransitionLabel, basis: &[VassConfig]) -> Vec<VassConfig> {
        self.vass_pre_basis(label, basis)
    }

    fn min_enabling(&self, label: TransitionLabel) -> Vec<VassConfig> {
        self.vass_min_enabling(label)
    }

    fn covered_by_initial(&self, c: &VassConfig) -> bool {
        self.initial.iter().any(|i| c.leq(i))
    }

    fn is_receive_complete(&self) -> bool {
        (0..self.states.len() as u32).all(|s| {
            (0..self.letters.len() as u32).all(|a| {
                let label = TransitionLabel::receive(Letter(a));
                self.transitions.iter().any(|t| {
                    t.source == StateId(s) && t.label == label && t.delta.iter().all(|&d| d >= 0)
                })
            })
        })
    }
}

/// Incremental construction of a [`VassSpec`] from named states and letters.
/// States and letters are declared by first use.
#[derive(Debug, Clone)]
pub struct VassBuilder {
    dim: usize,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    letters: Vec<String>,
    initial: Vec<(StateId, Vec<i64>)>,
    transitions: Vec<(StateId, String, Vec<i64>, StateId)>,
}

impl VassBuilder {
    pub fn new(dim: usize) -> Self {
        VassBuilder {
            dim,
            states: Vec::new(),
            state_index: HashMap::new(),
            letters: Vec::new(),
            initial: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.state_index.get(name) {
            return id;
        }
        let id = StateId(self.states.len() as u32);
        self.states.push(name.to_owned());
        self.state_index.insert(name.to_owned(), id);
        id
    }

    pub fn letter(&mut self, name: &str) -> Letter {
        match self.letters.iter().position(|l| l == name) {
            Some(i) => Letter(i as u32),
            None => {
                self.letters.push(name.to_owned());
                Letter(self.letters.len() as u32 - 1)
            }
        }
    }

    /// Declares an initial configuration `(state, counters)`.
    pub fn initial(mut self, state: &str, counters: &[i64]) -> Self {
        self.add_initial(state, counters);
        self
    }

    pub fn add_initial(&mut self, state: &str, counters: &[i64]) {
        let id = self.state(state);
        self.initial.push((id, counters.to_vec()));
    }

    /// Declares a transition; `label` is `!!a` or `??a`.
    pub fn transition(mut self, source: &str, label: &str, delta: &[i64], target: &str) -> Self {
        self.add_transition(source, label, delta, target);
        self
    }

    pub fn add_transition(&mut self, source: &str, label: &str, delta: &[i64], target: &str) {
        let s = self.state(source);
        let t = self.state(target);
        self.transitions.push((s, label.to_owned(), delta.to_vec(), t));
    }

    pub fn build(mut self) -> Result<VassSpec, ModelError> {
        for name in &self.states {
            if !is_identifier(name) {
                return Err(ModelError::BadIdentifier(name.clone()));
            }
        }
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (index, (source, label, delta, target)) in std::mem::take(&mut self.transitions).into_iter().enumerate() {
            let (polarity, name) =
                parse_label(&label).ok_or_else(|| ModelError::BadLabel(label.clone()))?;
            let letter = self.letter(name);
            if delta.len() != self.dim {
                return Err(ModelError::DimensionMismatch {
                    index,
                    expected: self.dim,
                    found: delta.len(),
                });
            }
            let delta = delta
                .iter()
                .map(|&d| i32::try_from(d).map_err(|_| ModelError::DimensionMismatch {
                    index,
                    expected: self.dim,
                    found: delta.len(),
                }))
                .collect::<Result<Vec<_>, _>>()?;
            transitions.push(VassTransition {
                source,
                label: TransitionLabel { polarity, letter },
                delta,
                target,
            });
        }
        if self.initial.is_empty() {
            return Err(ModelError::NoInitialState);
        }
        let mut initial = Vec::with_capacity(self.initial.len());
        for (state, counters) in &self.initial {
            let name = self.states[state.index()].clone();
            if counters.len() != self.dim {
                return Err(ModelError::InitialDimensionMismatch {
                    state: name,
                    expected: self.dim,
                    found: counters.len(),
                });
            }
            let counters = counters
                .iter()
                .map(|&c| u32::try_from(c).map_err(|_| ModelError::NegativeInitial(name.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            let config = VassConfig::new(*state, counters);
            if !initial.contains(&config) {
                initial.push(config);
            }
        }
        Ok(VassSpec {
            states: self.states,
            letters: self.letters,
            dim: self.dim,
            initial,
            transitions,
        })
    }
}
