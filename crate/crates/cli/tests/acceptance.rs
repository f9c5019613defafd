//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Time limits apply to the test profile build.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use wsbn::network::{static_coverable, NetworkSpace};
use wsbn::oracle::{bn_step, explore, replay, ExploreOptions, NetworkSemantics};
use wsbn::process::{FiniteSpec, ProcessSpace, VassConfig, VassSpec};
use wsbn::pushdown::{PdsConfig, StackSym};
use wsbn::reconfig::{rbn_coverable, rbn_witness, RbnOutcome, Reconfigurable, WitnessOptions};
use wsbn::topology::{enumerate_diam_deg_graphs, graph_embeds, multiset_embeds, Graph, LabelledGraph, TopologyClass};
use wsbn::wqo::{is_antichain, Saturation, SaturationStats, Verdict};
use wsbn::{SaturationOptions, Semantics, StateId};
use wsbn_cli::dsl::{load_model, Model, Process, Target};
use wsbn_testkit::{
    brute_canonical, brute_diam_deg, brute_embeds, brute_multiset_embeds, pushdown_forward, random_finite,
    random_labelled_graph, random_pushdown, random_vass, VassShape,
};

const RELAY: &str = include_str!("../models/relay.wsbn");
const HANDSHAKE: &str = include_str!("../models/handshake.wsbn");

const RBN_LIMIT: Duration = Duration::from_secs(5);
const STATIC_TOY_LIMIT: Duration = Duration::from_secs(1);
const STATIC_RELAY_LIMIT: Duration = Duration::from_secs(600);
const RANDOM_VASS_LIMIT: Duration = Duration::from_secs(60);
const EMBEDDING_LIMIT: Duration = Duration::from_secs(30);
const PUSHDOWN_LIMIT: Duration = Duration::from_secs(30);
const DIAM_DEG_LIMIT: Duration = Duration::from_secs(10);
const MAX_WITNESS_NODES: usize = 3;
const MAX_WITNESS_STEPS: usize = 12;

type Outcome = Result<String, String>;

/// Observations shared by the cross-cutting criteria (trace bounds and
/// saturation invariants).
#[derive(Default)]
struct Observed {
    traces: usize,
    trace_failures: Vec<String>,
    saturations: usize,
    unaudited: usize,
    violations: usize,
    bases_checked: usize,
    non_antichain: usize,
}

impl Observed {
    fn stats(&mut self, stats: &SaturationStats) {
        self.saturations += 1;
        if !stats.audited {
            self.unaudited += 1;
        }
        self.violations += stats.audit_violations;
    }

    fn final_basis<C>(&mut self, basis: &[C], leq: impl Fn(&C, &C) -> bool) {
        self.bases_checked += 1;
        if !is_antichain(basis, leq) {
            self.non_antichain += 1;
        }
    }

    fn verdict<C, L>(&mut self, v: &Verdict<C, L>, leq: impl Fn(&C, &C) -> bool) {
        self.stats(v.stats());
        if let Verdict::NotCoverable { certificate, .. } = v {
            self.final_basis(&certificate.basis, leq);
        }
    }

    fn rbn<P: Reconfigurable>(&mut self, name: &str, p: &P, out: &RbnOutcome<P::Config>) {
        self.traces += 1;
        let letters = p.letters();
        let c: usize = letters.iter().map(|&a| p.broadcast_basis(a).len()).sum();
        let sweeps = out.trace.sweeps.len();
        let queries = out.trace.query_count();
        if sweeps > letters.len() + 1 || queries > c * c {
            self.trace_failures.push(format!(
                "{name}: {sweeps} sweeps for {} letters, {queries} queries for C = {c}",
                letters.len()
            ));
        }
        for stats in out.trace.sweeps.iter().flat_map(|s| &s.queries).filter_map(|q| q.stats.as_ref()) {
            self.stats(stats);
        }
        if let Some(stats) = &out.target_query.stats {
            self.stats(stats);
        }
    }
}

fn audited() -> SaturationOptions {
    SaturationOptions::default().audited()
}

fn vass_model(text: &str) -> (VassSpec, Vec<VassConfig>) {
    let Model { process, queries } = load_model(text).expect("model compiles");
    let Process::Vass(p) = process else { panic!("VASS model expected") };
    let targets = queries
        .into_iter()
        .map(|q| match q.target {
            Target::Vass(c) => c,
            Target::Pushdown(_) => unreachable!(),
        })
        .collect();
    (p, targets)
}

fn state_target(rng: &mut StdRng, p: &VassSpec) -> VassConfig {
    VassConfig::new(StateId(rng.gen_range(0..p.states().len()) as u32), vec![0; p.dim()])
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    if elapsed < limit {
        Ok(elapsed)
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn relay_witnesses(obs: &mut Observed) -> Outcome {
    let (p, targets) = vass_model(RELAY);
    let mut notes = Vec::new();
    for name in ["q4", "q5"] {
        let target = p.config(name, &[0]);
        assert!(targets.contains(&target));
        let start = Instant::now();
        let out = rbn_coverable(&p, &target, audited()).map_err(|e| format!("{name}: {e}"))?;
        let elapsed = within(start, RBN_LIMIT).map_err(|e| format!("{name}: {e}"))?;
        obs.rbn(&format!("relay model {name}"), &p, &out);
        if !out.coverable {
            return Err(format!("{name} reported not coverable"));
        }
        let w = rbn_witness(&p, &target, &out.trace, WitnessOptions::default()).map_err(|e| e.to_string())?;
        replay(&p, &w.run, NetworkSemantics::Reconfigurable).map_err(|e| format!("{name}: replay: {e}"))?;
        if w.run.covering_vertex(&p, &target).is_none() {
            return Err(format!("{name}: witness does not cover the target"));
        }
        let (nodes, steps) = (w.run.nodes(), w.run.len());
        if nodes > MAX_WITNESS_NODES || steps > MAX_WITNESS_STEPS {
            return Err(format!("{name}: witness has {nodes} nodes and {steps} steps"));
        }
        notes.push(format!("{name} in {elapsed:.1?} with {nodes} nodes / {steps} steps"));
    }
    Ok(notes.join(", "))
}

fn static_impossibility(obs: &mut Observed) -> Outcome {
    let toy = FiniteSpec::new()
        .initial("q")
        .transition("q", "??a", "q'")
        .into_vass()
        .map_err(|e| e.to_string())?;
    let target = toy.config("q'", &[]);
    let mut notes = Vec::new();
    for class in [TopologyClass::PathBounded(2), TopologyClass::Clique] {
        let start = Instant::now();
        let v = static_coverable(&toy, &target, class, audited()).map_err(|e| e.to_string())?;
        let elapsed = within(start, STATIC_TOY_LIMIT).map_err(|e| format!("{class}: {e}"))?;
        let space = NetworkSpace::new(&toy, class);
        obs.verdict(&v, |a, b| space.graph_leq(a, b));
        if v.is_coverable() {
            return Err(format!("two-state model: q' coverable under {class}"));
        }
        notes.push(format!("toy {class} in {elapsed:.1?}"));
    }
    let (p, _) = vass_model(RELAY);
    let class = TopologyClass::PathBounded(2);
    let start = Instant::now();
    let v = static_coverable(&p, &p.config("q4", &[0]), class, audited()).map_err(|e| format!("relay model q4: {e}"))?;
    let elapsed = within(start, STATIC_RELAY_LIMIT).map_err(|e| format!("relay model q4: {e}"))?;
    let space = NetworkSpace::new(&p, class);
    obs.verdict(&v, |a, b| space.graph_leq(a, b));
    if v.is_coverable() {
        return Err("relay model q4 coverable under path-bounded:2".into());
    }
    notes.push(format!("relay model q4 {class} in {elapsed:.1?} ({} iterations)", v.stats().iterations));
    Ok(notes.join(", "))
}

fn broadcast_only_vass(obs: &mut Observed) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xACC3);
    let shape = VassShape {
        broadcast_only: true,
        ..VassShape::default()
    };
    let start = Instant::now();
    let mut positives = 0;
    for i in 0..50 {
        let p = random_vass(&mut rng, shape);
        let target = state_target(&mut rng, &p);
        let rbn = rbn_coverable(&p, &target, audited()).map_err(|e| format!("model {i}: {e}"))?;
        obs.rbn(&format!("broadcast-only {i}"), &p, &rbn);
        let space = ProcessSpace(&p);
        let plain = Saturation::new(&space)
            .options(audited())
            .run(&target)
            .map_err(|e| format!("model {i}: {e}"))?;
        obs.verdict(&plain, |a, b| a.leq(b));
        if rbn.coverable != plain.is_coverable() {
            return Err(format!("model {i} disagrees: {p:?} {target:?}"));
        }
        positives += usize::from(rbn.coverable);
    }
    let elapsed = within(start, RANDOM_VASS_LIMIT)?;
    Ok(format!("50/50 agree ({positives} coverable) in {elapsed:.1?}"))
}

fn explore_soundness(obs: &mut Observed) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xACC4);
    let (mut positives, mut disagreements) = (0, Vec::new());
    for i in 0..100 {
        let p = random_finite(&mut rng, 4, 3, 6);
        let target = state_target(&mut rng, &p);
        let rbn = rbn_coverable(&p, &target, audited()).map_err(|e| format!("process {i}: {e}"))?;
        obs.rbn(&format!("finite {i}"), &p, &rbn);
        let mut found = false;
        for n in 1..=4 {
            let out = explore(&p, NetworkSemantics::Reconfigurable, ExploreOptions::new(n, 12), &target)
                .map_err(|e| format!("process {i}: {e}"))?;
            if out.run.is_some() {
                found = true;
                break;
            }
        }
        if found {
            positives += 1;
            if !rbn.coverable {
                disagreements.push(i);
            }
        }
    }
    if disagreements.is_empty() {
        Ok(format!("{positives} search positives, all confirmed"))
    } else {
        Err(format!("rbn rejects search positives on processes {disagreements:?}"))
    }
}

fn trace_bounds(obs: &Observed) -> Outcome {
    if obs.traces == 0 {
        return Err("no traces recorded".into());
    }
    if obs.trace_failures.is_empty() {
        Ok(format!("{} traces within bounds", obs.traces))
    } else {
        Err(obs.trace_failures.join("; "))
    }
}

fn embedding_oracles() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xACC6);
    let le = |a: &u32, b: &u32| a <= b;
    let start = Instant::now();
    let mut positives = 0;
    for i in 0..200 {
        let n1: usize = rng.gen_range(1..=7);
        let n2 = rng.gen_range(n1.saturating_sub(1).max(1)..=7);
        let g1 = random_labelled_graph(&mut rng, n1, 0.4, 3);
        let g2 = random_labelled_graph(&mut rng, n2, 0.4, 3);
        let fast = graph_embeds(&g1, &g2, le).is_some();
        if fast != brute_embeds(&g1, &g2, le) {
            return Err(format!("graph pair {i} disagrees: {g1:?} {g2:?}"));
        }
        positives += usize::from(fast);
    }
    let mut multiset_positives = 0;
    for i in 0..200 {
        let m1: Vec<u32> = (0..rng.gen_range(0..=6)).map(|_| rng.gen_range(0..4)).collect();
        let m2: Vec<u32> = (0..rng.gen_range(0..=6)).map(|_| rng.gen_range(0..4)).collect();
        let fast = multiset_embeds(&m1, &m2, le);
        if fast != brute_multiset_embeds(&m1, &m2, le) {
            return Err(format!("multiset pair {i} disagrees: {m1:?} {m2:?}"));
        }
        multiset_positives += usize::from(fast);
    }
    let elapsed = within(start, EMBEDDING_LIMIT)?;
    Ok(format!(
        "200/200 graphs ({positives} embed), 200/200 multisets ({multiset_positives} embed) in {elapsed:.1?}"
    ))
}

fn random_theta(rng: &mut StdRng, p: &VassSpec, class: TopologyClass) -> LabelledGraph<VassConfig> {
    loop {
        let n = rng.gen_range(1..=3);
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.5) {
                    g.add_edge(u, v);
                }
            }
        }
        if class.contains(&g) {
            let labels = (0..n).map(|_| state_target(rng, p)).collect();
            return LabelledGraph::new(g, labels);
        }
    }
}

fn pre_basis_single_step() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xACC7);
    let class = TopologyClass::PathBounded(2);
    let mut checked = 0;
    for i in 0..100 {
        let p = random_finite(&mut rng, 4, 3, 6);
        let theta = random_theta(&mut rng, &p, class);
        let space = NetworkSpace::new(&p, class);
        for a in p.letters() {
            let basis = space.pre_basis_for_letter(&theta, a).map_err(|e| format!("triple {i}: {e}"))?;
            for g in basis {
                let reaches = (0..g.order())
                    .flat_map(|v| bn_step(&p, &g, v, a))
                    .any(|after| space.graph_leq(&theta, &after));
                if !reaches {
                    return Err(format!("triple {i}: {g:?} does not reach {theta:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pre-basis graphs from 100 triples step into the target"))
}

fn pushdown_engine(obs: &mut Observed) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xACC8);
    let start = Instant::now();
    let (mut agreed, mut positives, mut drawn) = (0, 0, 0);
    while agreed < 50 {
        drawn += 1;
        if drawn > 5000 {
            return Err(format!("only {agreed} specs stayed below the stack bound"));
        }
        let p = random_pushdown(&mut rng, 4, 6, 3);
        let state = StateId(rng.gen_range(0..p.states().len()) as u32);
        let stack: Vec<StackSym> = (0..rng.gen_range(0..3))
            .map(|_| StackSym(rng.gen_range(0..p.symbols().len() as u32)))
            .collect();
        let target = PdsConfig::new(state, stack);
        let forward = pushdown_forward(&p, &target, 8);
        if !forward.complete {
            continue;
        }
        if p.pds_coverable(&target) != forward.found {
            return Err(format!("disagreement on {p:?} {target:?}"));
        }
        agreed += 1;
        positives += usize::from(forward.found);
    }
    let Model { process, queries } = load_model(HANDSHAKE).map_err(|e| e.to_string())?;
    let Process::Pushdown(p) = process else { panic!("pushdown model expected") };
    let expected = [true, false, true];
    let mut got = Vec::new();
    for q in &queries {
        let Target::Pushdown(t) = &q.target else { unreachable!() };
        let out = rbn_coverable(&p, t, audited()).map_err(|e| e.to_string())?;
        obs.rbn(&format!("handshake line {}", q.line), &p, &out);
        got.push(out.coverable);
    }
    if got != expected {
        return Err(format!("handshake verdicts {got:?}, expected {expected:?}"));
    }
    let elapsed = within(start, PUSHDOWN_LIMIT)?;
    Ok(format!(
        "50/50 bounded specs agree ({positives} coverable), handshake {got:?}, in {elapsed:.1?}"
    ))
}

fn diam_deg_enumeration() -> Outcome {
    let start = Instant::now();
    let fast = enumerate_diam_deg_graphs(2, 2, 6).map_err(|e| e.to_string())?;
    let largest = fast.iter().max_by_key(|g| g.order()).ok_or("empty enumeration")?;
    if largest.order() != 5 || !(0..5).all(|v| largest.degree(v) == 2) {
        return Err(format!("largest member {largest:?}"));
    }
    let ours: HashSet<Vec<bool>> = fast.iter().map(brute_canonical).collect();
    let brute: HashSet<Vec<bool>> = brute_diam_deg(2, 2, 6).iter().map(brute_canonical).collect();
    if ours.len() != fast.len() {
        return Err("enumeration contains isomorphic duplicates".into());
    }
    if ours != brute {
        return Err(format!("{} graphs, exhaustive search finds {}", ours.len(), brute.len()));
    }
    let elapsed = within(start, DIAM_DEG_LIMIT)?;
    Ok(format!("{} graphs, largest is the 5-cycle, in {elapsed:.1?}", fast.len()))
}

fn saturation_invariants(obs: &Observed) -> Outcome {
    if obs.saturations == 0 {
        return Err("no saturation runs recorded".into());
    }
    if obs.unaudited > 0 || obs.violations > 0 || obs.non_antichain > 0 {
        return Err(format!(
            "{} unaudited runs, {} violations, {} non-antichain final bases",
            obs.unaudited, obs.violations, obs.non_antichain
        ));
    }
    Ok(format!(
        "{} audited runs, 0 violations, {} final bases are antichains",
        obs.saturations, obs.bases_checked
    ))
}

fn main() -> ExitCode {
    let mut obs = Observed::default();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "relay model reconfigurable witnesses", relay_witnesses(&mut obs)),
        (2, "static impossibility", static_impossibility(&mut obs)),
        (3, "broadcast-only VASS match plain coverability", broadcast_only_vass(&mut obs)),
        (4, "bounded search positives confirmed", explore_soundness(&mut obs)),
        (6, "embedding oracles", embedding_oracles()),
        (7, "pre-basis single-step soundness", pre_basis_single_step()),
        (8, "pushdown engine", pushdown_engine(&mut obs)),
        (9, "diameter/degree enumeration", diam_deg_enumeration()),
    ];
    results.push((5, "sweep and query bounds", trace_bounds(&obs)));
    results.push((10, "saturation invariants", saturation_invariants(&obs)));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(note) => println!("criterion {n:>2} PASS  {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
