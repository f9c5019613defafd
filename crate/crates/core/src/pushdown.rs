//! Pushdown processes.
//!
//! A configuration is a control state and a stack word (top first) ending in the
//! bottom symbol `bot`. Configurations are ordered by *prefix*: `(q, w) ≤ (q, w')`
//! iff `w` is a prefix of `w'`. This order is compatible with the transitions but
//! is not a wqo, so pushdown processes never go through backward saturation.
//! Control-state coverability is decided instead by forward `post*` saturation
//! of a finite automaton over stack words.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::process::{
    is_identifier, parse_label, Letter, ModelError, ProcessRun, Semantics, StateId,
    TransitionLabel,
};

/// Index into the stack alphabet. Index 0 is the bottom symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StackSym(pub u32);

impl StackSym {
    pub const BOTTOM: StackSym = StackSym(0);
}

/// Name of the bottom-of-stack symbol in model files and rendered output.
pub const BOTTOM_NAME: &str = "bot";

/// A pushdown configuration, or a configuration pattern.
///
/// Reachable configurations always end in exactly one bottom symbol. Targets
/// and `C_a` entries may stop short of it: `(q, A)` stands for every
/// configuration whose stack starts with `A`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PdsConfig {
    pub state: StateId,
    /// Top of stack first.
    pub stack: Vec<StackSym>,
}

impl PdsConfig {
    pub fn new(state: StateId, stack: Vec<StackSym>) -> Self {
        PdsConfig { state, stack }
    }

    /// Prefix order.
    pub fn leq(&self, other: &PdsConfig) -> bool {
        self.state == other.state && other.stack.starts_with(&self.stack)
    }

    /// The bottom symbol occurs at most once, and only in last position.
    pub fn is_well_formed(&self) -> bool {
        match self.stack.iter().position(|&s| s == StackSym::BOTTOM) {
            None => true,
            Some(i) => i + 1 == self.stack.len(),
        }
    }
}

/// `(source, label, pop, target, push)`: with `pop = Some(g)` the rule needs `g`
/// on top and replaces it by `push`; with `pop = None` it fires on any stack and
/// pushes `push` on top.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PdsRule {
    pub source: StateId,
    pub label: TransitionLabel,
    pub pop: Option<StackSym>,
    pub target: StateId,
    /// Top first.
    pub push: Vec<StackSym>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushdownSpec {
    states: Vec<String>,
    letters: Vec<String>,
    /// `symbols[0]` is the bottom symbol.
    symbols: Vec<String>,
    initial_states: Vec<StateId>,
    rules: Vec<PdsRule>,
}

impl PushdownSpec {
    pub fn builder(stack_symbols: &[&str]) -> PushdownBuilder {
        PushdownBuilder::new(stack_symbols)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn rules(&self) -> &[PdsRule] {
        &self.rules
    }

    pub fn initial_states(&self) -> &[StateId] {
        &self.initial_states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32))
    }

    pub fn letter_id(&self, name: &str) -> Option<Letter> {
        self.letters
            .iter()
            .position(|s| s == name)
            .map(|i| Letter(i as u32))
    }

    pub fn symbol_id(&self, name: &str) -> Option<StackSym> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| StackSym(i as u32))
    }

    /// Parses a dot-separated stack word such as `A.B.bot`; `eps` is empty.
    pub fn parse_word(&self, word: &str) -> Result<Vec<StackSym>, ModelError> {
        if word == "eps" || word.is_empty() {
            return Ok(Vec::new());
        }
        word.split('.')
            .map(|s| {
                self.symbol_id(s)
                    .ok_or_else(|| ModelError::UnknownStackSymbol(s.to_owned()))
            })
            .collect()
    }

    /// Convenience: `config("q", "A.bot")`.
    ///
    /// # Panics
    /// On unknown names.
    pub fn config(&self, state: &str, word: &str) -> PdsConfig {
        let id = self
            .state_id(state)
            .unwrap_or_else(|| panic!("unknown state `{state}`"));
        PdsConfig::new(id, self.parse_word(word).expect("known stack symbols"))
    }

    pub fn describe_config(&self, c: &PdsConfig) -> String {
        let word = if c.stack.is_empty() {
            "eps".to_owned()
        } else {
            c.stack
                .iter()
                .map(|s| self.symbols[s.0 as usize].as_str())
                .collect::<Vec<_>>()
                .join(".")
        };
        format!("{},{}", self.states[c.state.index()], word)
    }

    /// All `(q', h·w)` for rules `(q, label, g, q', h)` with `c.stack = g·w`.
    pub fn pds_successors(&self, c: &PdsConfig, label: TransitionLabel) -> Vec<PdsConfig> {
        self.rules
            .iter()
            .filter(|r| r.source == c.state && r.label == label)
            .filter_map(|r| apply_rule(r, &c.stack).map(|stack| PdsConfig::new(r.target, stack)))
            .collect()
    }

    /// `C_a`: one configuration `(q, g)` per `!!a` rule, `g` possibly empty.
    pub fn pds_ca(&self, letter: Letter) -> Vec<PdsConfig> {
        let label = TransitionLabel::broadcast(letter);
        let mut out: Vec<PdsConfig> = Vec::new();
        for r in self.rules.iter().filter(|r| r.label == label) {
            let c = PdsConfig::new(r.source, r.pop.into_iter().collect());
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    pub fn strip_receives(&self) -> PushdownSpec {
        PushdownSpec {
            rules: self
                .rules
                .iter()
                .filter(|r| r.label.is_broadcast())
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    pub fn add_receives(&self, original: &PushdownSpec, letter: Letter) -> PushdownSpec {
        let restored = TransitionLabel::receive(letter);
        PushdownSpec {
            rules: original
                .rules
                .iter()
                .filter(|r| r.label == restored || self.rules.contains(r))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// Saturated automaton for the configurations reachable from `Q0 × {bot}`.
    pub fn post_star(&self) -> PostStar {
        PostStar::compute(self)
    }

    /// Whether some reachable configuration lies above `target` in the prefix
    /// order.
    pub fn pds_coverable(&self, target: &PdsConfig) -> bool {
        self.post_star().covers(target)
    }

    /// Breadth-first search for a concrete run reaching `↑target`, bounded by
    /// stack height and number of visited configurations.
    pub fn find_run(
        &self,
        target: &PdsConfig,
        max_stack: usize,
        max_states: usize,
    ) -> Option<ProcessRun<PdsConfig>> {
        let mut parent: HashMap<PdsConfig, Option<(PdsConfig, TransitionLabel)>> = HashMap::new();
        let mut queue = VecDeque::new();
        for c in self.initial_configs() {
            parent.insert(c.clone(), None);
            queue.push_back(c);
        }
        let labels: Vec<TransitionLabel> = self.rules.iter().map(|r| r.label).collect();
        while let Some(c) = queue.pop_front() {
            if target.leq(&c) {
                let mut steps = Vec::new();
                let mut cur = c;
                while let Some(Some((prev, label))) = parent.get(&cur).cloned() {
                    steps.push((label, cur));
                    cur = prev;
                }
                steps.reverse();
                return Some(ProcessRun { start: cur, steps });
            }
            for &label in &labels {
                for next in self.pds_successors(&c, label) {
                    if next.stack.len() > max_stack || parent.contains_key(&next) {
                        continue;
                    }
                    if parent.len() >= max_states {
                        return None;
                    }
                    parent.insert(next.clone(), Some((c.clone(), label)));
                    queue.push_back(next);
                }
            }
        }
        None
    }
}

fn apply_rule(rule: &PdsRule, stack: &[StackSym]) -> Option<Vec<StackSym>> {
    let rest = match rule.pop {
        Some(g) => match stack.split_first() {
            Some((&top, rest)) if top == g => rest,
            _ => return None,
        },
        None => stack,
    };
    let mut out = Vec::with_capacity(rule.push.len() + rest.len());
    out.extend_from_slice(&rule.push);
    out.extend_from_slice(rest);
    Some(out)
}

impl Semantics for PushdownSpec {
    type Config = PdsConfig;

    fn letters(&self) -> Vec<Letter> {
        (0..self.letters.len() as u32).map(Letter).collect()
    }

    fn letter_names(&self) -> &[String] {
        &self.letters
    }

    fn successors(&self, c: &PdsConfig, label: TransitionLabel) -> Vec<PdsConfig> {
        self.pds_successors(c, label)
    }

    fn leq(&self, lhs: &PdsConfig, rhs: &PdsConfig) -> bool {
        lhs.leq(rhs)
    }

    fn initial_configs(&self) -> Vec<PdsConfig> {
        self.initial_states
            .iter()
            .map(|&q| PdsConfig::new(q, vec![StackSym::BOTTOM]))
            .collect()
    }

    fn magnitude(&self, c: &PdsConfig) -> usize {
        c.stack.len()
    }

    fn describe(&self, c: &PdsConfig) -> String {
        self.describe_config(c)
    }
}

/// Normalized rule `<p, γ> -> <p', w>` with `|w| ≤ 2`.
#[derive(Debug, Clone, Copy)]
enum Rhs {
    Pop,
    Swap(u32),
    Push(u32, u32),
}

type Edge = (usize, Option<u32>, usize);

/// Automaton recognizing `post*(Q0 × {bot})`.
///
/// Automaton states `0..controls` are the control states (original states
/// followed by fresh states introduced to split long pushes). Then comes the
/// single final state, then one state per `(p', γ')` pair created by push
/// rules.
#[derive(Debug, Clone)]
pub struct PostStar {
    controls: usize,
    edges: HashSet<Edge>,
    forward: HashMap<usize, Vec<(Option<u32>, usize)>>,
    co_reachable: HashSet<usize>,
}

impl PostStar {
    fn compute(spec: &PushdownSpec) -> PostStar {
        let n_symbols = spec.symbols.len() as u32;
        let mut controls = spec.states.len();
        let mut rules: HashMap<(usize, u32), Vec<(usize, Rhs)>> = HashMap::new();
        let add = |rules: &mut HashMap<(usize, u32), Vec<(usize, Rhs)>>, p: usize, g: u32, q: usize, w: &[u32]| {
            let rhs = match *w {
                [] => Rhs::Pop,
                [a] => Rhs::Swap(a),
                [a, b] => Rhs::Push(a, b),
                _ => unreachable!("split before insertion"),
            };
            rules.entry((p, g)).or_default().push((q, rhs));
        };
        for rule in &spec.rules {
            let tops: Vec<(u32, Vec<u32>)> = match rule.pop {
                Some(g) => vec![(g.0, Vec::new())],
                None => (0..n_symbols).map(|g| (g, vec![g])).collect(),
            };
            for (g, suffix) in tops {
                let w: Vec<u32> = rule.push.iter().map(|s| s.0).chain(suffix).collect();
                let p = rule.source.index();
                let q = rule.target.index();
                if w.len() <= 2 {
                    add(&mut rules, p, g, q, &w);
                    continue;
                }
                // <p,g> -> <f1, w[n-2] w[n-1]>, <f_i, w[n-1-i]> -> <f_{i+1}, w[n-2-i] w[n-1-i]>,
                // the last step landing in q with w[0] w[1] on top.
                let n = w.len();
                let mut from = p;
                let mut top = g;
                for i in 0..n - 1 {
                    let to = if i == n - 2 {
                        q
                    } else {
                        controls += 1;
                        controls - 1
                    };
                    let pair = [w[n - 2 - i], w[n - 1 - i]];
                    add(&mut rules, from, top, to, &pair);
                    from = to;
                    top = w[n - 2 - i];
                }
            }
        }

        let final_state = controls;
        let mut next_state = final_state + 1;
        let mut mid: HashMap<(usize, u32), usize> = HashMap::new();

        let mut rel: HashSet<Edge> = HashSet::new();
        let mut forward: HashMap<usize, Vec<(Option<u32>, usize)>> = HashMap::new();
        let mut eps_into: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut work: Vec<Edge> = spec
            .initial_states
            .iter()
            .map(|q| (q.index(), Some(StackSym::BOTTOM.0), final_state))
            .collect();

        fn insert(
            rel: &mut HashSet<Edge>,
            forward: &mut HashMap<usize, Vec<(Option<u32>, usize)>>,
            eps_into: &mut HashMap<usize, Vec<usize>>,
            e: Edge,
        ) -> bool {
            if !rel.insert(e) {
                return false;
            }
            forward.entry(e.0).or_default().push((e.1, e.2));
            if e.1.is_none() {
                eps_into.entry(e.2).or_default().push(e.0);
            }
            true
        }

        while let Some(t @ (p, g, q)) = work.pop() {
            if !insert(&mut rel, &mut forward, &mut eps_into, t) {
                continue;
            }
            match g {
                Some(g) => {
                    let Some(rs) = rules.get(&(p, g)) else { continue };
                    for &(p2, rhs) in rs {
                        match rhs {
                            Rhs::Pop => work.push((p2, None, q)),
                            Rhs::Swap(a) => work.push((p2, Some(a), q)),
                            Rhs::Push(a, b) => {
                                let m = *mid.entry((p2, a)).or_insert_with(|| {
                                    next_state += 1;
                                    next_state - 1
                                });
                                work.push((p2, Some(a), m));
                                if insert(&mut rel, &mut forward, &mut eps_into, (m, Some(b), q)) {
                                    for &p3 in eps_into.get(&m).into_iter().flatten() {
                                        work.push((p3, Some(b), q));
                                    }
                                }
                            }
                        }
                    }
                }
                None => {
                    for &(sym, q2) in forward.get(&q).into_iter().flatten() {
                        work.push((p, sym, q2));
                    }
                }
            }
        }

        let mut backward: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(from, _, to) in &rel {
            backward.entry(to).or_default().push(from);
        }
        let mut co_reachable = HashSet::from([final_state]);
        let mut stack = vec![final_state];
        while let Some(s) = stack.pop() {
            for &prev in backward.get(&s).into_iter().flatten() {
                if co_reachable.insert(prev) {
                    stack.push(prev);
                }
            }
        }

        PostStar {
            controls,
            edges: rel,
            forward,
            co_reachable,
        }
    }

    pub fn transition_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of control states after splitting long pushes.
    pub fn control_states(&self) -> usize {
        self.controls
    }

    fn eps_closure(&self, mut set: HashSet<usize>) -> HashSet<usize> {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(sym, to) in self.forward.get(&s).into_iter().flatten() {
                if sym.is_none() && set.insert(to) {
                    stack.push(to);
                }
            }
        }
        set
    }

    /// Some accepted configuration of `target.state` has a stack starting with
    /// `target.stack`.
    pub fn covers(&self, target: &PdsConfig) -> bool {
        let mut current = self.eps_closure(HashSet::from([target.state.index()]));
        for sym in &target.stack {
            let next: HashSet<usize> = current
                .iter()
                .flat_map(|s| self.forward.get(s).into_iter().flatten())
                .filter(|(label, _)| *label == Some(sym.0))
                .map(|&(_, to)| to)
                .collect();
            if next.is_empty() {
                return false;
            }
            current = self.eps_closure(next);
        }
        current.iter().any(|s| self.co_reachable.contains(s))
    }
}

/// Builder for [`PushdownSpec`]; states and letters are declared by first use.
#[derive(Debug, Clone)]
pub struct PushdownBuilder {
    states: Vec<String>,
    symbols: Vec<String>,
    initial: Vec<String>,
    rules: Vec<(String, String, Option<String>, String, Vec<String>)>,
    symbol_error: Option<ModelError>,
}

impl PushdownBuilder {
    pub fn new(stack_symbols: &[&str]) -> Self {
        let mut symbols = vec![BOTTOM_NAME.to_owned()];
        let mut symbol_error = None;
        for s in stack_symbols {
            if symbols.iter().any(|x| x == s) {
                symbol_error.get_or_insert(ModelError::DuplicateStackSymbol((*s).to_owned()));
            } else if !is_identifier(s) {
                symbol_error.get_or_insert(ModelError::BadIdentifier((*s).to_owned()));
            }
            symbols.push((*s).to_owned());
        }
        PushdownBuilder {
            states: Vec::new(),
            symbols,
            initial: Vec::new(),
            rules: Vec::new(),
            symbol_error,
        }
    }

    fn state(&mut self, name: &str) -> StateId {
        match self.states.iter().position(|s| s == name) {
            Some(i) => StateId(i as u32),
            None => {
                self.states.push(name.to_owned());
                StateId(self.states.len() as u32 - 1)
            }
        }
    }

    pub fn initial(mut self, state: &str) -> Self {
        self.add_initial(state);
        self
    }

    pub fn add_initial(&mut self, state: &str) {
        self.state(state);
        self.initial.push(state.to_owned());
    }

    /// `pop` of `None` is the empty precondition; `push` is top first.
    pub fn rule(mut self, source: &str, label: &str, pop: Option<&str>, target: &str, push: &[&str]) -> Self {
        self.add_rule(source, label, pop, target, push);
        self
    }

    pub fn add_rule(&mut self, source: &str, label: &str, pop: Option<&str>, target: &str, push: &[&str]) {
        self.state(source);
        self.state(target);
        self.rules.push((
            source.to_owned(),
            label.to_owned(),
            pop.map(str::to_owned),
            target.to_owned(),
            push.iter().map(|s| (*s).to_owned()).collect(),
        ));
    }

    pub fn build(self) -> Result<PushdownSpec, ModelError> {
        if let Some(err) = self.symbol_error {
            return Err(err);
        }
        let mut spec = PushdownSpec {
            states: self.states,
            letters: Vec::new(),
            symbols: self.symbols,
            initial_states: Vec::new(),
            rules: Vec::new(),
        };
        for name in &spec.states {
            if !is_identifier(name) {
                return Err(ModelError::BadIdentifier(name.clone()));
            }
        }
        for (index, (source, label, pop, target, push)) in self.rules.iter().enumerate() {
            let (polarity, letter) = parse_label(label).ok_or_else(|| ModelError::BadLabel(label.clone()))?;
            let letter = match spec.letters.iter().position(|l| l == letter) {
                Some(i) => Letter(i as u32),
                None => {
                    spec.letters.push(letter.to_owned());
                    Letter(spec.letters.len() as u32 - 1)
                }
            };
            let sym = |s: &str| {
                spec.symbol_id(s)
                    .ok_or_else(|| ModelError::UnknownStackSymbol(s.to_owned()))
            };
            let pop = pop.as_deref().map(sym).transpose()?;
            let push = push.iter().map(|s| sym(s)).collect::<Result<Vec<_>, _>>()?;
            if pop == Some(StackSym::BOTTOM) || push.contains(&StackSym::BOTTOM) {
                return Err(ModelError::BottomMisuse(index));
            }
            spec.rules.push(PdsRule {
                source: spec.state_id(source).expect("declared"),
                label: TransitionLabel { polarity, letter },
                pop,
                target: spec.state_id(target).expect("declared"),
                push,
            });
        }
        if self.initial.is_empty() {
            return Err(ModelError::NoInitialState);
        }
        for name in &self.initial {
            let id = spec.state_id(name).expect("declared");
            if !spec.initial_states.contains(&id) {
                spec.initial_states.push(id);
            }
        }
        Ok(spec)
    }
}
