//! Random model generators and brute-force oracles shared by the wsbn test
//! suites. Oracles here deliberately avoid the library's own algorithms.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use wsbn::process::{FiniteSpec, VassConfig, VassSpec};
use wsbn::pushdown::{PdsConfig, PushdownSpec};
use wsbn::topology::{Graph, LabelledGraph};
use wsbn::{Semantics, TransitionLabel};

/// Shape of a random VASS.
#[derive(Debug, Clone, Copy)]
pub struct VassShape {
    pub max_states: usize,
    pub max_dim: usize,
    pub max_letters: usize,
    pub max_transitions: usize,
    pub broadcast_only: bool,
}

impl Default for VassShape {
    fn default() -> Self {
        VassShape {
            max_states: 4,
            max_dim: 2,
            max_letters: 3,
            max_transitions: 6,
            broadcast_only: false,
        }
    }
}

/// Random VASS with deltas in `{-1, 0, 1}`, initial state `s0` at zero.
pub fn random_vass(rng: &mut impl Rng, shape: VassShape) -> VassSpec {
    let states = rng.gen_range(1..=shape.max_states);
    let dim = rng.gen_range(1..=shape.max_dim);
    let letters = rng.gen_range(1..=shape.max_letters);
    let count = rng.gen_range(1..=shape.max_transitions);
    let mut b = VassSpec::builder(dim);
    b.add_initial("s0", &vec![0; dim]);
    for s in 1..states {
        b.state(&format!("s{s}"));
    }
    for _ in 0..count {
        let src = rng.gen_range(0..states);
        let dst = rng.gen_range(0..states);
        let sigil = if shape.broadcast_only || rng.gen_bool(0.5) { "!!" } else { "??" };
        let letter = rng.gen_range(0..letters);
        let delta: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=1)).collect();
        b.add_transition(&format!("s{src}"), &format!("{sigil}l{letter}"), &delta, &format!("s{dst}"));
    }
    b.build().expect("generated VASS is well formed")
}

/// Random finite-state process with initial state `s0`.
pub fn random_finite(rng: &mut impl Rng, max_states: usize, max_letters: usize, max_transitions: usize) -> VassSpec {
    let states = rng.gen_range(1..=max_states);
    let letters = rng.gen_range(1..=max_letters);
    let count = rng.gen_range(1..=max_transitions);
    let mut spec = FiniteSpec::new().initial("s0");
    for _ in 0..count {
        let src = rng.gen_range(0..states);
        let dst = rng.gen_range(0..states);
        let sigil = if rng.gen_bool(0.5) { "!!" } else { "??" };
        let letter = rng.gen_range(0..letters);
        spec = spec.transition(&format!("s{src}"), &format!("{sigil}l{letter}"), &format!("s{dst}"));
    }
    spec.into_vass().expect("generated process is well formed")
}

/// Random pushdown process over stack symbols `A`, `B`, `C` (a prefix of
/// them), initial state `p0`.
pub fn random_pushdown(rng: &mut impl Rng, max_states: usize, max_rules: usize, max_symbols: usize) -> PushdownSpec {
    let all = ["A", "B", "C"];
    let symbols = &all[..rng.gen_range(1..=max_symbols.min(3))];
    let states = rng.gen_range(1..=max_states);
    let rules = rng.gen_range(1..=max_rules);
    let mut b = PushdownSpec::builder(symbols).initial("p0");
    for _ in 0..rules {
        let src = format!("p{}", rng.gen_range(0..states));
        let dst = format!("p{}", rng.gen_range(0..states));
        let sigil = if rng.gen_bool(0.7) { "!!" } else { "??" };
        let label = format!("{sigil}l{}", rng.gen_range(0..2));
        let pop = rng.gen_bool(0.6).then(|| *symbols.choose(rng).expect("non-empty"));
        let push: Vec<&str> = (0..rng.gen_range(0..=2))
            .map(|_| *symbols.choose(rng).expect("non-empty"))
            .collect();
        b.add_rule(&src, &label, pop, &dst, &push);
    }
    b.build().expect("generated pushdown is well formed")
}

/// Outcome of a bounded forward search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Forward {
    pub found: bool,
    /// The search finished without discarding anything at a bound, so a
    /// negative answer is conclusive.
    pub complete: bool,
}

/// Breadth-first search over single-process configurations, following every
/// label, with `magnitude(c) <= cap` and at most `depth` steps.
pub fn forward_cover<P: Semantics>(process: &P, labels: &[TransitionLabel], target: &P::Config, cap: usize, depth: usize) -> Forward {
    let mut seen: HashSet<P::Config> = HashSet::new();
    let mut queue = VecDeque::new();
    for c in process.initial_configs() {
        if seen.insert(c.clone()) {
            queue.push_back((c, 0));
        }
    }
    let mut complete = true;
    while let Some((c, d)) = queue.pop_front() {
        if process.leq(target, &c) {
            return Forward { found: true, complete: true };
        }
        for &l in labels {
            for next in process.successors(&c, l) {
                if process.magnitude(&next) > cap || d + 1 > depth {
                    if !seen.contains(&next) {
                        complete = false;
                    }
                    continue;
                }
                if seen.insert(next.clone()) {
                    queue.push_back((next, d + 1));
                }
            }
        }
    }
    Forward { found: false, complete }
}

/// Every label of both polarities over the alphabet.
pub fn all_labels<P: Semantics>(process: &P) -> Vec<TransitionLabel> {
    process
        .letters()
        .into_iter()
        .flat_map(|a| [TransitionLabel::broadcast(a), TransitionLabel::receive(a)])
        .collect()
}

/// Whether some `label`-successor of `c` lies above an element of `basis`.
pub fn has_successor_above(spec: &VassSpec, c: &VassConfig, label: TransitionLabel, basis: &[VassConfig]) -> bool {
    spec.vass_successors(c, label)
        .iter()
        .any(|s| basis.iter().any(|b| b.leq(s)))
}

/// Every configuration with the given state count, dimension and counters up
/// to `max`.
pub fn all_vass_configs(spec: &VassSpec, max: u32) -> Vec<VassConfig> {
    let mut vectors: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..spec.dim() {
        vectors = vectors
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    (0..spec.states().len())
        .flat_map(|s| {
            vectors
                .iter()
                .map(move |v| VassConfig::new(wsbn::StateId(s as u32), v.clone()))
        })
        .collect()
}

/// Labelled graph with random edges (probability `density`) and labels drawn
/// from `0..labels`.
pub fn random_labelled_graph(rng: &mut impl Rng, n: usize, density: f64, labels: u32) -> LabelledGraph<u32> {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                g.add_edge(u, v);
            }
        }
    }
    LabelledGraph::new(g, (0..n).map(|_| rng.gen_range(0..labels)).collect())
}

pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64) -> Graph {
    random_labelled_graph(rng, n, density, 1).graph
}

/// All permutations of `0..n`, Heap's algorithm.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k % 2 == 0 { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

/// All injections `0..k -> 0..n`.
pub fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..n)
                    .filter(|x| !prefix.contains(x))
                    .map(|x| {
                        let mut next = prefix.clone();
                        next.push(x);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Induced-subgraph embedding by trying every injection.
pub fn brute_embeds<A, B>(g1: &LabelledGraph<A>, g2: &LabelledGraph<B>, leq: impl Fn(&A, &B) -> bool) -> bool {
    let (n1, n2) = (g1.order(), g2.order());
    injections(n1, n2).into_iter().any(|h| {
        (0..n1).all(|u| leq(&g1.labels[u], &g2.labels[h[u]]))
            && (0..n1).all(|u| (0..n1).all(|v| u == v || g1.graph.has_edge(u, v) == g2.graph.has_edge(h[u], h[v])))
    })
}

/// Multiset injection by trying every injection.
pub fn brute_multiset_embeds<A, B>(m1: &[A], m2: &[B], leq: impl Fn(&A, &B) -> bool) -> bool {
    injections(m1.len(), m2.len())
        .into_iter()
        .any(|h| (0..m1.len()).all(|i| leq(&m1[i], &m2[h[i]])))
}

/// Longest simple path in edges, by trying every ordering of every vertex
/// subset as a path.
pub fn brute_longest_path(g: &Graph) -> usize {
    let n = g.order();
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let vertices: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        if vertices.len() - 1 <= best {
            continue;
        }
        for perm in permutations(vertices.len()) {
            if perm.windows(2).all(|w| g.has_edge(vertices[w[0]], vertices[w[1]])) {
                best = vertices.len() - 1;
                break;
            }
        }
    }
    best
}

/// Diameter by Floyd–Warshall; `None` when disconnected.
pub fn floyd_warshall_diameter(g: &Graph) -> Option<usize> {
    let n = g.order();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for v in 0..n {
            if g.has_edge(u, v) {
                d[u][v] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let max = d.iter().flatten().copied().max().unwrap_or(0);
    (max < inf).then_some(max)
}

/// Adjacency bit string minimized over all vertex permutations.
pub fn brute_canonical(g: &Graph) -> Vec<bool> {
    let n = g.order();
    permutations(n)
        .into_iter()
        .map(|p| {
            let mut bits = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    bits.push(g.has_edge(p[i], p[j]));
                }
            }
            bits
        })
        .min()
        .unwrap_or_default()
}

/// Connected graphs with at most `n_max` vertices, diameter at most `k` and
/// degree at most `d`, up to isomorphism, found by scanning every edge set.
pub fn brute_diam_deg(k: usize, d: usize, n_max: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut seen = HashSet::new();
        for mask in 0u64..(1 << pairs.len()) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::from_edges(n, &edges);
            if g.max_degree() > d || !floyd_warshall_diameter(&g).is_some_and(|x| x <= k) {
                continue;
            }
            if seen.insert(brute_canonical(&g)) {
                out.push(g);
            }
        }
    }
    out
}

/// Breadth-first reachability in a pushdown process, stack height at most
/// `cap`.
pub fn pushdown_forward(spec: &PushdownSpec, target: &PdsConfig, cap: usize) -> Forward {
    let labels: Vec<TransitionLabel> = spec.rules().iter().map(|r| r.label).collect();
    let mut seen: HashSet<PdsConfig> = HashSet::new();
    let mut queue = VecDeque::new();
    for c in spec.initial_configs() {
        seen.insert(c.clone());
        queue.push_back(c);
    }
    let mut complete = true;
    while let Some(c) = queue.pop_front() {
        if c.state == target.state && c.stack.starts_with(&target.stack) {
            return Forward { found: true, complete: true };
        }
        for &l in &labels {
            for next in direct_pds_successors(spec, &c, l) {
                if next.stack.len() > cap {
                    complete = false;
                    continue;
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Forward { found: false, complete }
}

/// Rule matching written out independently of the library.
pub fn direct_pds_successors(spec: &PushdownSpec, c: &PdsConfig, label: TransitionLabel) -> Vec<PdsConfig> {
    let mut out = Vec::new();
    for r in spec.rules() {
        if r.source != c.state || r.label != label {
            continue;
        }
        let rest: &[_] = match r.pop {
            None => &c.stack,
            Some(g) if c.stack.first() == Some(&g) => &c.stack[1..],
            Some(_) => continue,
        };
        let mut stack = r.push.clone();
        stack.extend_from_slice(rest);
        out.push(PdsConfig::new(r.target, stack));
    }
    out
}
