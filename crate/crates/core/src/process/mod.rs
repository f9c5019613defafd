//! Process models: the per-node transition systems of a broadcast network.
//!
//! Every process transition carries a [`TransitionLabel`]: either a broadcast
//! `!!a` or a receive `??a` of some letter `a` from a finite alphabet.

use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::wqo::{OrderedSpace, ResourceExhausted};

mod finite;
mod vass;

pub use finite::FiniteSpec;
pub use vass::{VassBuilder, VassConfig, VassSpec, VassTransition};

/// Index of a letter in a model's alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

/// Index of a control state in a model's state list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Broadcast,
    Receive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionLabel {
    pub polarity: Polarity,
    pub letter: Letter,
}

impl TransitionLabel {
    pub fn broadcast(letter: Letter) -> Self {
        TransitionLabel {
            polarity: Polarity::Broadcast,
            letter,
        }
    }

    pub fn receive(letter: Letter) -> Self {
        TransitionLabel {
            polarity: Polarity::Receive,
            letter,
        }
    }

    pub fn is_broadcast(self) -> bool {
        self.polarity == Polarity::Broadcast
    }

    pub fn is_receive(self) -> bool {
        self.polarity == Polarity::Receive
    }

    /// Renders as `!!a` / `??a` using `letters` for names.
    pub fn display<'a>(self, letters: &'a [String]) -> impl fmt::Display + 'a {
        LabelDisplay {
            label: self,
            letters,
        }
    }
}

struct LabelDisplay<'a> {
    label: TransitionLabel,
    letters: &'a [String],
}

impl fmt::Display for LabelDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sigil = match self.label.polarity {
            Polarity::Broadcast => "!!",
            Polarity::Receive => "??",
        };
        match self.letters.get(self.label.letter.index()) {
            Some(name) => write!(f, "{sigil}{name}"),
            None => write!(f, "{sigil}#{}", self.label.letter.0),
        }
    }
}

/// Splits `!!a` / `??a` into polarity and letter name.
pub fn parse_label(text: &str) -> Option<(Polarity, &str)> {
    let (polarity, rest) = if let Some(rest) = text.strip_prefix("!!") {
        (Polarity::Broadcast, rest)
    } else if let Some(rest) = text.strip_prefix("??") {
        (Polarity::Receive, rest)
    } else {
        return None;
    };
    is_identifier(rest).then_some((polarity, rest))
}

/// ASCII identifier: a letter or `_`, then letters, digits, `_` or `'`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Operational semantics of a single process, independent of any order
/// structure. This is all the forward oracle needs.
pub trait Semantics {
    type Config: Clone + Eq + Ord + Hash + fmt::Debug;

    /// Alphabet in declaration order.
    fn letters(&self) -> Vec<Letter>;

    fn letter_names(&self) -> &[String];

    fn successors(&self, c: &Self::Config, label: TransitionLabel) -> Vec<Self::Config>;

    /// The process order: `lhs ≤ rhs`.
    fn leq(&self, lhs: &Self::Config, rhs: &Self::Config) -> bool;

    fn initial_configs(&self) -> Vec<Self::Config>;

    /// Size measure used to cap explicit exploration (largest counter, stack
    /// height).
    fn magnitude(&self, c: &Self::Config) -> usize;

    fn describe(&self, c: &Self::Config) -> String;
}

/// A process whose order is a wqo compatible with its transitions and that
/// has an effective pre-basis.
pub trait WellStructured: Semantics {
    /// Labels occurring on transitions, in declaration order.
    fn labels(&self) -> Vec<TransitionLabel>;

    fn pre_basis(&self, label: TransitionLabel, basis: &[Self::Config]) -> Vec<Self::Config>;

    fn min_enabling(&self, label: TransitionLabel) -> Vec<Self::Config>;

    fn covered_by_initial(&self, c: &Self::Config) -> bool;

    /// Every configuration can take a `??a` step for every letter `a`.
    /// Static network orders are only compatible with such processes.
    fn is_receive_complete(&self) -> bool;
}

/// Views a well-structured process as an [`OrderedSpace`] over its own labels,
/// i.e. without network semantics.
#[derive(Debug, Clone, Copy)]
pub struct ProcessSpace<'a, P>(pub &'a P);

impl<P: WellStructured> OrderedSpace for ProcessSpace<'_, P> {
    type Config = P::Config;
    type Label = TransitionLabel;

    fn labels(&self) -> Vec<TransitionLabel> {
        self.0.labels()
    }

    fn leq(&self, lhs: &P::Config, rhs: &P::Config) -> bool {
        self.0.leq(lhs, rhs)
    }

    fn covered_by_initial(&self, c: &P::Config) -> bool {
        self.0.covered_by_initial(c)
    }

    fn pre_basis_for_label(
        &self,
        label: &TransitionLabel,
        basis: &[P::Config],
    ) -> Result<Vec<P::Config>, ResourceExhausted> {
        Ok(self.0.pre_basis(*label, basis))
    }

    fn successors(&self, c: &P::Config, label: &TransitionLabel) -> Vec<P::Config> {
        self.0.successors(c, *label)
    }

    fn min_enabling(&self, label: &TransitionLabel) -> Vec<P::Config> {
        self.0.min_enabling(*label)
    }
}

/// A concrete run of one process: `start` followed by labelled steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessRun<C> {
    pub start: C,
    pub steps: Vec<(TransitionLabel, C)>,
}

impl<C> ProcessRun<C> {
    pub fn last(&self) -> &C {
        self.steps.last().map_or(&self.start, |(_, c)| c)
    }
}

/// Errors raised while assembling a process model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed transition label `{0}`; expected `!!letter` or `??letter`")]
    BadLabel(String),
    #[error("malformed identifier `{0}`")]
    BadIdentifier(String),
    #[error("transition {index} has a vector of length {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("initial configuration of `{state}` has a vector of length {found}, expected {expected}")]
    InitialDimensionMismatch {
        state: String,
        expected: usize,
        found: usize,
    },
    #[error("no initial state declared")]
    NoInitialState,
    #[error("negative initial counter for `{0}`")]
    NegativeInitial(String),
    #[error("unknown stack symbol `{0}`")]
    UnknownStackSymbol(String),
    #[error("transition {0} pushes or pops the bottom-of-stack symbol")]
    BottomMisuse(usize),
    #[error("stack symbol `{0}` declared twice")]
    DuplicateStackSymbol(String),
}
