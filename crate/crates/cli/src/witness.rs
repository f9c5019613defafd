//! Serialized network runs (`wsbn-witness/1`).

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wsbn::oracle::{replay, NetworkRun, NetworkSemantics, NetworkStep};
use wsbn::process::{VassConfig, VassSpec};
use wsbn::pushdown::{PdsConfig, PushdownSpec};
use wsbn::topology::{Graph, LabelledGraph, MAX_VERTICES};
use wsbn::{Letter, Semantics};

use crate::dsl::QuerySemantics;

pub const WITNESS_FORMAT: &str = "wsbn-witness/1";

/// A vertex label. VASS configurations carry `counters`, pushdown ones
/// `stack` (top first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLiteral {
    pub state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counters: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stack: Option<Vec<String>>,
}

/// A labelled graph: one label per vertex and an undirected edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphLiteral {
    pub vertices: Vec<ConfigLiteral>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StepLiteral {
    Broadcast {
        vertex: usize,
        letter: String,
        graph: GraphLiteral,
    },
    Reconfigure {
        graph: GraphLiteral,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub format: String,
    /// Semantics clause the run was produced under.
    pub semantics: String,
    pub initial: GraphLiteral,
    pub steps: Vec<StepLiteral>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessFileError {
    #[error("unsupported witness format `{0}`; expected `{WITNESS_FORMAT}`")]
    Format(String),
    #[error("invalid semantics `{0}`")]
    Semantics(String),
    #[error("bad graph: {0}")]
    Graph(String),
    #[error("bad label: {0}")]
    Label(String),
    #[error("unknown letter `{0}`")]
    Letter(String),
    #[error("run rejected: {0}")]
    Replay(String),
}

/// Conversion between process configurations and their literals.
pub trait ConfigCodec: Semantics {
    fn encode(&self, c: &Self::Config) -> ConfigLiteral;
    fn decode(&self, literal: &ConfigLiteral) -> Result<Self::Config, String>;
}

impl ConfigCodec for VassSpec {
    fn encode(&self, c: &VassConfig) -> ConfigLiteral {
        ConfigLiteral {
            state: self.state_name(c.state).to_owned(),
            counters: Some(c.counters.clone()),
            stack: None,
        }
    }

    fn decode(&self, literal: &ConfigLiteral) -> Result<VassConfig, String> {
        let state = self
            .state_id(&literal.state)
            .ok_or_else(|| format!("unknown state `{}`", literal.state))?;
        if literal.stack.is_some() {
            return Err("a VASS configuration has no stack".into());
        }
        let counters = literal.counters.clone().unwrap_or_else(|| vec![0; self.dim()]);
        if counters.len() != self.dim() {
            return Err(format!("{} counters given, expected {}", counters.len(), self.dim()));
        }
        Ok(VassConfig::new(state, counters))
    }
}

impl ConfigCodec for PushdownSpec {
    fn encode(&self, c: &PdsConfig) -> ConfigLiteral {
        ConfigLiteral {
            state: self.states()[c.state.index()].clone(),
            counters: None,
            stack: Some(c.stack.iter().map(|s| self.symbols()[s.0 as usize].clone()).collect()),
        }
    }

    fn decode(&self, literal: &ConfigLiteral) -> Result<PdsConfig, String> {
        let state = self
            .state_id(&literal.state)
            .ok_or_else(|| format!("unknown state `{}`", literal.state))?;
        if literal.counters.is_some() {
            return Err("a pushdown configuration has no counters".into());
        }
        let stack = literal
            .stack
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(|s| self.symbol_id(s).ok_or_else(|| format!("unknown stack symbol `{s}`")))
            .collect::<Result<Vec<_>, _>>()?;
        let c = PdsConfig::new(state, stack);
        if !c.is_well_formed() {
            return Err("stack must end in exactly one bottom symbol".into());
        }
        Ok(c)
    }
}

fn encode_graph<P: ConfigCodec>(process: &P, g: &LabelledGraph<P::Config>) -> GraphLiteral {
    GraphLiteral {
        vertices: g.labels.iter().map(|c| process.encode(c)).collect(),
        edges: g.graph.edges().into_iter().map(|(u, v)| [u, v]).collect(),
    }
}

fn decode_graph<P: ConfigCodec>(process: &P, g: &GraphLiteral) -> Result<LabelledGraph<P::Config>, WitnessFileError> {
    let n = g.vertices.len();
    if n >= MAX_VERTICES {
        return Err(WitnessFileError::Graph(format!("{n} vertices; at most {} supported", MAX_VERTICES - 1)));
    }
    let mut graph = Graph::new(n);
    for &[u, v] in &g.edges {
        if u >= n || v >= n || u == v {
            return Err(WitnessFileError::Graph(format!("edge ({u}, {v}) on {n} vertices")));
        }
        graph.add_edge(u, v);
    }
    let labels = g
        .vertices
        .iter()
        .map(|c| process.decode(c).map_err(WitnessFileError::Label))
        .collect::<Result<_, _>>()?;
    Ok(LabelledGraph::new(graph, labels))
}

/// The network semantics named by a semantics clause.
pub fn network_semantics(clause: &QuerySemantics) -> NetworkSemantics {
    match clause.class() {
        Some(class) => NetworkSemantics::Static(class),
        None => NetworkSemantics::Reconfigurable,
    }
}

pub fn encode_run<P: ConfigCodec>(process: &P, run: &NetworkRun<P::Config>, semantics: &QuerySemantics) -> WitnessFile {
    let steps = run
        .steps
        .iter()
        .map(|(step, g)| {
            let graph = encode_graph(process, g);
            match *step {
                NetworkStep::Broadcast { vertex, letter } => StepLiteral::Broadcast {
                    vertex,
                    letter: process.letter_names()[letter.index()].clone(),
                    graph,
                },
                NetworkStep::Reconfigure => StepLiteral::Reconfigure { graph },
            }
        })
        .collect();
    WitnessFile {
        format: WITNESS_FORMAT.to_owned(),
        semantics: semantics.to_string(),
        initial: encode_graph(process, &run.initial),
        steps,
    }
}

pub fn decode_run<P: ConfigCodec>(
    process: &P,
    file: &WitnessFile,
) -> Result<(NetworkRun<P::Config>, QuerySemantics), WitnessFileError> {
    if file.format != WITNESS_FORMAT {
        return Err(WitnessFileError::Format(file.format.clone()));
    }
    let semantics: QuerySemantics = file
        .semantics
        .parse()
        .map_err(|_| WitnessFileError::Semantics(file.semantics.clone()))?;
    let mut run = NetworkRun::new(decode_graph(process, &file.initial)?);
    for step in &file.steps {
        let (step, graph) = match step {
            StepLiteral::Broadcast { vertex, letter, graph } => {
                let index = process
                    .letter_names()
                    .iter()
                    .position(|l| l == letter)
                    .ok_or_else(|| WitnessFileError::Letter(letter.clone()))?;
                let step = NetworkStep::Broadcast {
                    vertex: *vertex,
                    letter: Letter(index as u32),
                };
                (step, graph)
            }
            StepLiteral::Reconfigure { graph } => (NetworkStep::Reconfigure, graph),
        };
        run.steps.push((step, decode_graph(process, graph)?));
    }
    Ok((run, semantics))
}

/// Decodes and replays a witness.
pub fn check_witness<P: ConfigCodec>(
    process: &P,
    file: &WitnessFile,
) -> Result<NetworkRun<P::Config>, WitnessFileError> {
    let (run, semantics) = decode_run(process, file)?;
    replay(process, &run, network_semantics(&semantics)).map_err(|e| WitnessFileError::Replay(e.to_string()))?;
    Ok(run)
}
