//! Query dispatch for `verify`, `explore` and `replay`.

use std::time::Instant;

use wsbn::network::{diam_deg_coverable, diam_deg_witness, static_coverable, static_witness};
use wsbn::oracle::{explore, ExploreOptions, NetworkRun};
use wsbn::reconfig::{rbn_coverable, rbn_witness, Reconfigurable, WitnessOptions};
use wsbn::{ResourceLimits, SaturationOptions, WellStructured};

use crate::dsl::{Model, Process, Query, QuerySemantics, Target};
use crate::report::{
    ExploreQueryReport, ExploreReport, QueryReport, Report, SaturationReport, TopologyReport, TraceReport,
    UnlockReport, VerdictKind, EXPLORE_FORMAT,
};
use crate::witness::{check_witness, encode_run, network_semantics, ConfigCodec, WitnessFile, WitnessFileError};

/// Settings for `verify`. Limits given on a query line take precedence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub max_basis: Option<usize>,
    pub max_iters: Option<usize>,
    pub audit: bool,
    pub witnesses: bool,
    /// Graphs explored when following a static saturation chain forward.
    pub witness_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_basis: None,
            max_iters: None,
            audit: false,
            witnesses: true,
            witness_budget: 1_000_000,
        }
    }
}

impl VerifyOptions {
    fn saturation(&self, query: &Query) -> SaturationOptions {
        let limits = ResourceLimits::new(
            query
                .max_basis
                .or(self.max_basis)
                .unwrap_or(ResourceLimits::DEFAULT_MAX_BASIS),
            query
                .max_iters
                .or(self.max_iters)
                .unwrap_or(ResourceLimits::DEFAULT_MAX_ITERATIONS),
        );
        SaturationOptions { limits, audit: self.audit }
    }
}

fn blank(query: &Query) -> QueryReport {
    QueryReport {
        line: query.line,
        target: query.target_text.clone(),
        semantics: query.semantics.to_string(),
        verdict: VerdictKind::NotCoverable,
        elapsed_us: 0,
        exhausted: None,
        saturation: None,
        trace: None,
        topologies: None,
        witness: None,
        witness_error: None,
    }
}

fn exhausted(report: &mut QueryReport, reason: impl ToString) {
    report.verdict = VerdictKind::ResourceExhausted;
    report.exhausted = Some(reason.to_string());
}

fn verdict(coverable: bool) -> VerdictKind {
    if coverable {
        VerdictKind::Coverable
    } else {
        VerdictKind::NotCoverable
    }
}

fn run_rbn<P: Reconfigurable + ConfigCodec>(
    process: &P,
    target: &P::Config,
    query: &Query,
    options: &VerifyOptions,
) -> QueryReport {
    let mut report = blank(query);
    let saturation = options.saturation(query);
    let outcome = match rbn_coverable(process, target, saturation) {
        Ok(o) => o,
        Err(e) => {
            exhausted(&mut report, e);
            return report;
        }
    };
    let letters = process.letter_names();
    report.verdict = verdict(outcome.coverable);
    report.saturation = outcome.target_query.stats.as_ref().map(SaturationReport::from);
    report.trace = Some(TraceReport {
        sweeps: outcome.trace.sweeps.len(),
        queries: outcome.trace.query_count(),
        enabling_configs: process
            .letters()
            .into_iter()
            .map(|a| process.broadcast_basis(a).len())
            .sum(),
        unlocked: outcome
            .trace
            .unlocks
            .iter()
            .map(|u| UnlockReport {
                letter: letters[u.letter.index()].clone(),
                sweep: u.sweep,
                enabler: process.describe(&u.enabler),
            })
            .collect(),
        audit_violations: outcome.trace.audit_violations(),
    });
    if outcome.coverable && options.witnesses {
        let witness_options = WitnessOptions {
            saturation,
            ..WitnessOptions::default()
        };
        match rbn_witness(process, target, &outcome.trace, witness_options) {
            Ok(w) => report.witness = Some(encode_run(process, &w.run, &query.semantics)),
            Err(e) => report.witness_error = Some(e.to_string()),
        }
    }
    report
}

fn static_outcome<P: WellStructured + ConfigCodec>(
    process: &P,
    report: &mut QueryReport,
    query: &Query,
    found: Option<Result<NetworkRun<P::Config>, String>>,
    options: &VerifyOptions,
) {
    let Some(run) = found else {
        report.verdict = VerdictKind::NotCoverable;
        return;
    };
    match run {
        Ok(run) => {
            report.verdict = VerdictKind::Coverable;
            if options.witnesses {
                report.witness = Some(encode_run(process, &run, &query.semantics));
            }
        }
        Err(e) if process.is_receive_complete() => {
            report.verdict = VerdictKind::Coverable;
            report.witness_error = Some(e);
        }
        Err(e) => exhausted(
            report,
            format!("saturation reached an initial graph but no run was confirmed ({e}); without receive completion the answer is open"),
        ),
    }
}

fn run_static<P: WellStructured + ConfigCodec>(
    process: &P,
    target: &P::Config,
    query: &Query,
    options: &VerifyOptions,
) -> QueryReport {
    let mut report = blank(query);
    let saturation = options.saturation(query);
    let budget = options.witness_budget;
    match query.semantics {
        QuerySemantics::Rbn => unreachable!("dispatched separately"),
        QuerySemantics::PathBounded(_) | QuerySemantics::Clique => {
            let class = query.semantics.class().expect("static");
            match static_coverable(process, target, class, saturation) {
                Ok(v) => {
                    report.saturation = Some(SaturationReport::from(v.stats()));
                    let found = v
                        .witness()
                        .map(|w| static_witness(process, w, class, budget).map_err(|e| e.to_string()));
                    static_outcome(process, &mut report, query, found, options);
                }
                Err(e) => exhausted(&mut report, e),
            }
        }
        QuerySemantics::DiamDeg { k, d, n_max } => {
            let class = query.semantics.class().expect("static");
            match diam_deg_coverable(process, target, k, d, n_max, saturation) {
                Ok(out) => {
                    report.saturation = Some(SaturationReport::from(&out.stats));
                    report.topologies = Some(TopologyReport {
                        graphs: out.graphs,
                        runs: out.runs,
                        exhaustive: out.exhaustive,
                    });
                    let found = out
                        .hit
                        .as_ref()
                        .map(|hit| diam_deg_witness(process, hit, class, budget).map_err(|e| e.to_string()));
                    static_outcome(process, &mut report, query, found, options);
                }
                Err(e) => exhausted(&mut report, e),
            }
        }
    }
    report
}

fn run_query(model: &Model, query: &Query, options: &VerifyOptions) -> QueryReport {
    let start = Instant::now();
    let mut report = match (&model.process, &query.target) {
        (Process::Vass(p), Target::Vass(t)) => match query.semantics {
            QuerySemantics::Rbn => run_rbn(p, t, query, options),
            _ => run_static(p, t, query, options),
        },
        (Process::Pushdown(p), Target::Pushdown(t)) => run_rbn(p, t, query, options),
        _ => unreachable!("targets are compiled against their process"),
    };
    report.elapsed_us = start.elapsed().as_micros() as u64;
    report
}

/// Runs every query in declaration order.
pub fn run_queries(model: &Model, options: &VerifyOptions) -> Report {
    Report::new(model.queries.iter().map(|q| run_query(model, q, options)).collect())
}

/// Settings for `explore`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreSettings {
    /// Largest network tried; every size from 1 up is searched.
    pub nodes: usize,
    pub depth: usize,
    pub magnitude_cap: usize,
    pub max_states: usize,
}

fn explore_one<P: ConfigCodec>(
    process: &P,
    target: &P::Config,
    query: &Query,
    settings: &ExploreSettings,
) -> ExploreQueryReport {
    let mut report = ExploreQueryReport {
        line: query.line,
        target: query.target_text.clone(),
        semantics: query.semantics.to_string(),
        found_nodes: None,
        explored: 0,
        capped: false,
        exhausted: None,
        witness: None,
    };
    let max_nodes = match query.semantics {
        QuerySemantics::DiamDeg { n_max, .. } => settings.nodes.min(n_max),
        _ => settings.nodes,
    };
    let semantics = network_semantics(&query.semantics);
    for n in 1..=max_nodes {
        let options = ExploreOptions {
            nodes: n,
            depth: settings.depth,
            magnitude_cap: settings.magnitude_cap,
            max_states: settings.max_states,
        };
        match explore(process, semantics, options, target) {
            Ok(out) => {
                report.explored += out.explored;
                report.capped |= out.capped;
                if let Some(run) = out.run {
                    report.found_nodes = Some(n);
                    report.witness = Some(encode_run(process, &run, &query.semantics));
                    break;
                }
            }
            Err(e) => {
                report.exhausted = Some(e.to_string());
                break;
            }
        }
    }
    report
}

/// Bounded forward search for every query of the model.
pub fn explore_queries(model: &Model, settings: &ExploreSettings) -> ExploreReport {
    let queries = model
        .queries
        .iter()
        .map(|q| match (&model.process, &q.target) {
            (Process::Vass(p), Target::Vass(t)) => explore_one(p, t, q, settings),
            (Process::Pushdown(p), Target::Pushdown(t)) => explore_one(p, t, q, settings),
            _ => unreachable!("targets are compiled against their process"),
        })
        .collect();
    ExploreReport {
        format: EXPLORE_FORMAT.to_owned(),
        nodes: settings.nodes,
        depth: settings.depth,
        queries,
    }
}

/// Result of replaying one witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplaySummary {
    pub semantics: String,
    pub nodes: usize,
    pub steps: usize,
    /// Lines of the queries whose target some vertex of the final graph covers.
    pub covers: Vec<usize>,
}

fn replay_one<P: ConfigCodec>(
    process: &P,
    model: &Model,
    file: &WitnessFile,
    target: impl Fn(&Target) -> Option<&P::Config>,
) -> Result<ReplaySummary, WitnessFileError> {
    let run = check_witness(process, file)?;
    let covers = model
        .queries
        .iter()
        .filter(|q| target(&q.target).is_some_and(|t| run.covering_vertex(process, t).is_some()))
        .map(|q| q.line)
        .collect();
    Ok(ReplaySummary {
        semantics: file.semantics.clone(),
        nodes: run.nodes(),
        steps: run.len(),
        covers,
    })
}

/// Decodes and replays a witness against the model's process.
pub fn replay_witness(model: &Model, file: &WitnessFile) -> Result<ReplaySummary, WitnessFileError> {
    match &model.process {
        Process::Vass(p) => replay_one(p, model, file, |t| match t {
            Target::Vass(c) => Some(c),
            Target::Pushdown(_) => None,
        }),
        Process::Pushdown(p) => replay_one(p, model, file, |t| match t {
            Target::Pushdown(c) => Some(c),
            Target::Vass(_) => None,
        }),
    }
}

