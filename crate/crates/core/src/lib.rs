//! Coverability for broadcast networks whose nodes run infinite-state processes.
//!
//! A network is a finite undirected graph whose vertices each run a copy of one
//! process. A vertex may broadcast a letter `a` (`!!a`), which every neighbour
//! must receive (`??a`) in the same step. Under *reconfigurable* semantics the
//! edge set may additionally be rewritten at any time.
//!
//! The crate provides:
//!
//! * [`wqo`]: antichain bases of upward-closed sets and the generic backward
//!   saturation engine for well-structured transition systems.
//! * [`process`]: finite-state and VASS process models.
//! * [`pushdown`]: pushdown process models with prefix-ordered configurations and
//!   a polynomial control-state coverability check.
//! * [`topology`]: labelled graphs, the induced-subgraph ordering, and small-graph
//!   enumeration.
//! * [`network`]: deciders for static k-path-bounded, clique and bounded
//!   diameter/degree topologies.
//! * [`reconfig`]: the letter-unlocking decider for reconfigurable networks and
//!   witness construction.
//! * [`oracle`]: bounded explicit-state exploration and run replay.

pub mod network;
pub mod oracle;
pub mod process;
pub mod pushdown;
pub mod reconfig;
pub mod topology;
pub mod wqo;

pub use process::{Letter, Polarity, Semantics, StateId, TransitionLabel, WellStructured};
pub use wqo::{ResourceExhausted, ResourceLimits, SaturationOptions};
