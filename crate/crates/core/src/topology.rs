//! Undirected topologies, labelled graphs and the induced-subgraph order.
//!
//! Graphs are small (at most [`MAX_VERTICES`] vertices) and stored as adjacency
//! bit rows.

use std::fmt;

use thiserror::Error;

use crate::wqo::{Resource, ResourceExhausted};

pub const MAX_VERTICES: usize = 64;

/// Largest order accepted by [`enumerate_diam_deg_graphs`].
pub const MAX_ENUMERATION_ORDER: usize = 8;

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    adj: Vec<u64>,
}

impl Graph {
    /// Edgeless graph.
    ///
    /// # Panics
    /// If `n > MAX_VERTICES`.
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "graphs are limited to {MAX_VERTICES} vertices");
        Graph { adj: vec![0; n] }
    }

    /// # Panics
    /// On self-loops or out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n > 2 {
            g.add_edge(0, n - 1);
        }
        g
    }

    /// Vertex 0 is the centre.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::from_edges(leaves + 1, &edges)
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    /// # Panics
    /// On self-loops or out-of-range endpoints.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop on vertex {u}");
        assert!(u < self.order() && v < self.order(), "edge ({u}, {v}) out of range");
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    /// Neighbourhood of `v` as a bit set.
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.order()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.order())
            .flat_map(|u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.order();
        (0..n).all(|v| self.degree(v) + 1 == n)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.order();
        if n == 0 {
            return true;
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == full
    }

    /// Copy with one fresh vertex `n` adjacent to the vertices in `attach`.
    pub fn with_vertex(&self, attach: u64) -> Graph {
        let n = self.order();
        assert!(n < MAX_VERTICES, "graphs are limited to {MAX_VERTICES} vertices");
        let mut g = self.clone();
        g.adj.push(0);
        for u in bits(attach) {
            g.add_edge(u, n);
        }
        g
    }

    /// Vertices renumbered so that new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let mut g = Graph::new(self.order());
        for (u, v) in self.edges() {
            g.add_edge(inverse[u], inverse[v]);
        }
        g
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}, {:?})", self.order(), self.edges())
    }
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// A graph whose vertices carry labels, typically process configurations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelledGraph<L> {
    pub graph: Graph,
    pub labels: Vec<L>,
}

impl<L> LabelledGraph<L> {
    /// # Panics
    /// If the label count differs from the vertex count.
    pub fn new(graph: Graph, labels: Vec<L>) -> Self {
        assert_eq!(graph.order(), labels.len(), "one label per vertex");
        LabelledGraph { graph, labels }
    }

    pub fn single(label: L) -> Self {
        LabelledGraph::new(Graph::new(1), vec![label])
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn map<M>(&self, f: impl FnMut(&L) -> M) -> LabelledGraph<M> {
        LabelledGraph {
            graph: self.graph.clone(),
            labels: self.labels.iter().map(f).collect(),
        }
    }
}

impl<L: Clone> LabelledGraph<L> {
    pub fn permuted(&self, perm: &[usize]) -> Self {
        LabelledGraph {
            graph: self.graph.permuted(perm),
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }
}

/// Searches for an injection `h` from `g1` into `g2` that preserves edges and
/// non-edges and maps every label below its image. Returns `h` as a vector
/// indexed by vertices of `g1`.
pub fn graph_embeds<A, B>(
    g1: &LabelledGraph<A>,
    g2: &LabelledGraph<B>,
    leq: impl Fn(&A, &B) -> bool,
) -> Option<Vec<usize>> {
    let (n1, n2) = (g1.order(), g2.order());
    if n1 > n2 || g1.graph.edge_count() > g2.graph.edge_count() {
        return None;
    }
    let mut candidates = Vec::with_capacity(n1);
    for u in 0..n1 {
        let d = g1.graph.degree(u);
        let nd = n1 - 1 - d;
        let mut mask = 0u64;
        for w in 0..n2 {
            if g2.graph.degree(w) >= d
                && n2 - 1 - g2.graph.degree(w) >= nd
                && leq(&g1.labels[u], &g2.labels[w])
            {
                mask |= 1 << w;
            }
        }
        if mask == 0 {
            return None;
        }
        candidates.push(mask);
    }
    if !multiset_matchable(&candidates, n2) {
        return None;
    }

    // Most constrained first, then keep neighbours of placed vertices close.
    let mut order: Vec<usize> = Vec::with_capacity(n1);
    let mut placed = 0u64;
    while order.len() < n1 {
        let next = (0..n1)
            .filter(|&u| placed >> u & 1 == 0)
            .min_by_key(|&u| {
                let linked = (g1.graph.neighbor_mask(u) & placed).count_ones();
                (
                    std::cmp::Reverse(linked),
                    candidates[u].count_ones(),
                    std::cmp::Reverse(g1.graph.degree(u)),
                    u,
                )
            })
            .expect("unplaced vertex remains");
        placed |= 1 << next;
        order.push(next);
    }

    let mut h = vec![usize::MAX; n1];
    fn search<A, B>(
        depth: usize,
        order: &[usize],
        candidates: &[u64],
        g1: &LabelledGraph<A>,
        g2: &LabelledGraph<B>,
        used: u64,
        h: &mut [usize],
    ) -> bool {
        let Some(&u) = order.get(depth) else {
            return true;
        };
        let mut options = candidates[u] & !used;
        for &prev in &order[..depth] {
            let image = h[prev];
            options &= if g1.graph.has_edge(u, prev) {
                g2.graph.neighbor_mask(image)
            } else {
                !g2.graph.neighbor_mask(image)
            };
        }
        for w in bits(options) {
            h[u] = w;
            if search(depth + 1, order, candidates, g1, g2, used | 1 << w, h) {
                return true;
            }
        }
        h[u] = usize::MAX;
        false
    }
    search(0, &order, &candidates, g1, g2, 0, &mut h).then_some(h)
}

/// Whether every row can be matched to a distinct column of its mask.
fn multiset_matchable(rows: &[u64], columns: usize) -> bool {
    let mut owner = vec![usize::MAX; columns];
    fn augment(row: usize, rows: &[u64], owner: &mut [usize], seen: &mut u64) -> bool {
        for w in bits(rows[row] & !*seen) {
            *seen |= 1 << w;
            if owner[w] == usize::MAX || augment(owner[w], rows, owner, seen) {
                owner[w] = row;
                return true;
            }
        }
        false
    }
    (0..rows.len()).all(|r| augment(r, rows, &mut owner, &mut 0))
}

/// Whether `m1` injects into `m2` with every element mapped above itself.
pub fn multiset_embeds<A, B>(m1: &[A], m2: &[B], leq: impl Fn(&A, &B) -> bool) -> bool {
    if m1.len() > m2.len() {
        return false;
    }
    // Kuhn's algorithm over an explicit adjacency list; no 64-element limit.
    let adjacency: Vec<Vec<usize>> = m1
        .iter()
        .map(|a| (0..m2.len()).filter(|&j| leq(a, &m2[j])).collect())
        .collect();
    let mut owner = vec![usize::MAX; m2.len()];
    fn augment(row: usize, adjacency: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
        for &w in &adjacency[row] {
            if !seen[w] {
                seen[w] = true;
                if owner[w] == usize::MAX || augment(owner[w], adjacency, owner, seen) {
                    owner[w] = row;
                    return true;
                }
            }
        }
        false
    }
    (0..m1.len()).all(|r| augment(r, &adjacency, &mut owner, &mut vec![false; m2.len()]))
}

/// Number of edges on a longest simple path.
pub fn longest_simple_path_length(g: &Graph) -> usize {
    let n = g.order();
    let mut best = 0;
    fn dfs(g: &Graph, v: usize, visited: u64, len: usize, best: &mut usize, cap: usize) {
        *best = (*best).max(len);
        if *best == cap {
            return;
        }
        for w in bits(g.neighbor_mask(v) & !visited) {
            dfs(g, w, visited | 1 << w, len + 1, best, cap);
        }
    }
    for v in 0..n {
        if best + 1 == n {
            break;
        }
        dfs(g, v, 1 << v, 0, &mut best, n.saturating_sub(1));
    }
    best
}

/// Longest shortest-path distance; `None` for disconnected graphs.
pub fn diameter(g: &Graph) -> Option<usize> {
    let n = g.order();
    let mut diam = 0;
    for s in 0..n {
        let mut seen = 1u64 << s;
        let mut frontier = seen;
        let mut dist = 0;
        loop {
            let mut next = 0;
            for v in bits(frontier) {
                next |= g.neighbor_mask(v);
            }
            next &= !seen;
            if next == 0 {
                break;
            }
            seen |= next;
            frontier = next;
            dist += 1;
        }
        if seen.count_ones() as usize != n {
            return None;
        }
        diam = diam.max(dist);
    }
    Some(diam)
}

pub fn max_degree(g: &Graph) -> usize {
    g.max_degree()
}

/// Restricted topology classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyClass {
    /// Longest simple path has at most `k` edges.
    PathBounded(usize),
    /// A single complete graph.
    Clique,
    /// Connected, diameter at most `k`, maximum degree at most `d`.
    DiamDeg { k: usize, d: usize },
    /// Any topology; used with reconfigurable semantics.
    Unrestricted,
}

impl TopologyClass {
    pub fn contains(&self, g: &Graph) -> bool {
        match *self {
            TopologyClass::PathBounded(k) => longest_simple_path_length(g) <= k,
            TopologyClass::Clique => g.is_complete(),
            TopologyClass::DiamDeg { k, d } => {
                g.max_degree() <= d && diameter(g).is_some_and(|diam| diam <= k)
            }
            TopologyClass::Unrestricted => true,
        }
    }
}

impl fmt::Display for TopologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyClass::PathBounded(k) => write!(f, "path-bounded:{k}"),
            TopologyClass::Clique => write!(f, "clique"),
            TopologyClass::DiamDeg { k, d } => write!(f, "diam-deg:{k},{d}"),
            TopologyClass::Unrestricted => write!(f, "unrestricted"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("graph {graph:?} is not in class {class}")]
    ClassViolation { graph: Graph, class: TopologyClass },
    #[error("graph has {0} vertices; at most {max} are supported", max = MAX_VERTICES - 1)]
    TooLarge(usize),
}

/// Graphs on `n + 1` vertices whose first `n` vertices induce `shape`, one per
/// neighbourhood of the fresh vertex, kept if they belong to `class`. Fixed
/// shape classes (`DiamDeg`) have no extensions.
pub fn enumerate_extensions(shape: &Graph, class: TopologyClass) -> Result<Vec<Graph>, TopologyError> {
    if !class.contains(shape) {
        return Err(TopologyError::ClassViolation {
            graph: shape.clone(),
            class,
        });
    }
    let n = shape.order();
    if n + 1 >= MAX_VERTICES {
        return Err(TopologyError::TooLarge(n + 1));
    }
    let full = (1u64 << n) - 1;
    Ok(match class {
        TopologyClass::DiamDeg { .. } => Vec::new(),
        TopologyClass::Clique => vec![shape.with_vertex(full)],
        TopologyClass::PathBounded(_) | TopologyClass::Unrestricted => (0..=full)
            .map(|attach| shape.with_vertex(attach))
            .filter(|h| class.contains(h))
            .collect(),
    })
}

/// Isomorphism-invariant code of a vertex-keyed graph.
///
/// Vertices are grouped by key; within the resulting order every arrangement of
/// equal-key vertices is tried and the lexicographically least sequence of
/// back-adjacency rows wins. Equal codes imply isomorphism respecting keys.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm<K> {
    pub keys: Vec<K>,
    pub rows: Vec<u64>,
}

/// Canonical form plus the vertex order achieving it.
pub fn canonical_form_by<K: Ord + Clone>(g: &Graph, keys: &[K]) -> (CanonicalForm<K>, Vec<usize>) {
    let n = g.order();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(g.degree(b).cmp(&g.degree(a))));
    let block: Vec<usize> = {
        // block[i] = first position with the same key and degree as position i
        let mut block = vec![0; n];
        for i in 1..n {
            let (a, b) = (sorted[i - 1], sorted[i]);
            block[i] = if keys[a] == keys[b] && g.degree(a) == g.degree(b) {
                block[i - 1]
            } else {
                i
            };
        }
        block
    };
    let block_end: Vec<usize> = {
        let mut end = vec![n; n];
        for i in (0..n).rev() {
            end[i] = if i + 1 < n && block[i + 1] == block[i] { end[i + 1] } else { i + 1 };
        }
        end
    };

    struct Search<'a> {
        g: &'a Graph,
        sorted: &'a [usize],
        block: &'a [usize],
        block_end: &'a [usize],
        perm: Vec<usize>,
        rows: Vec<u64>,
        best: Option<(Vec<u64>, Vec<usize>)>,
    }

    impl Search<'_> {
        /// `tight`: the rows so far equal the best prefix.
        fn go(&mut self, pos: usize, used: u64, tight: bool) {
            let n = self.sorted.len();
            if pos == n {
                if self.best.as_ref().is_none_or(|(b, _)| self.rows < *b) {
                    self.best = Some((self.rows.clone(), self.perm.clone()));
                }
                return;
            }
            let lo = self.block[pos];
            let hi = self.block_end[pos];
            for &v in &self.sorted[lo..hi] {
                if used >> v & 1 == 1 {
                    continue;
                }
                let mut row = 0u64;
                for (j, &p) in self.perm.iter().enumerate() {
                    if self.g.has_edge(v, p) {
                        row |= 1 << j;
                    }
                }
                let mut next_tight = false;
                if tight {
                    if let Some((best, _)) = &self.best {
                        match row.cmp(&best[pos]) {
                            std::cmp::Ordering::Greater => continue,
                            std::cmp::Ordering::Equal => next_tight = true,
                            std::cmp::Ordering::Less => {}
                        }
                    }
                }
                self.perm.push(v);
                self.rows.push(row);
                self.go(pos + 1, used | 1 << v, next_tight);
                self.perm.pop();
                self.rows.pop();
            }
        }
    }

    let mut search = Search {
        g,
        sorted: &sorted,
        block: &block,
        block_end: &block_end,
        perm: Vec::with_capacity(n),
        rows: Vec::with_capacity(n),
        best: None,
    };
    search.go(0, 0, true);
    let (rows, perm) = search.best.expect("at least one arrangement");
    let keys = perm.iter().map(|&v| keys[v].clone()).collect();
    (CanonicalForm { keys, rows }, perm)
}

pub fn canonical_form(g: &Graph) -> CanonicalForm<()> {
    canonical_form_by(g, &vec![(); g.order()]).0
}

/// Canonical form of a labelled graph: labels are part of the code.
pub fn labelled_canonical_form<L: Ord + Clone>(g: &LabelledGraph<L>) -> CanonicalForm<L> {
    canonical_form_by(&g.graph, &g.labels).0
}

/// Every graph on exactly `n` vertices, up to isomorphism, in canonical vertex
/// order.
pub fn enumerate_graphs(n: usize) -> Result<Vec<Graph>, ResourceExhausted> {
    if n > MAX_ENUMERATION_ORDER {
        return Err(ResourceExhausted::new(Resource::GraphOrder, MAX_ENUMERATION_ORDER));
    }
    let mut level = vec![Graph::new(0)];
    for m in 0..n {
        let mut next: std::collections::BTreeMap<CanonicalForm<()>, Graph> = Default::default();
        for g in &level {
            for attach in 0..1u64 << m {
                let h = g.with_vertex(attach);
                let (form, perm) = canonical_form_by(&h, &vec![(); h.order()]);
                next.entry(form).or_insert_with(|| h.permuted(&perm));
            }
        }
        level = next.into_values().collect();
    }
    Ok(level)
}

/// Every connected graph, up to isomorphism, with at most `n_max` vertices,
/// diameter at most `k` and maximum degree at most `d`. Sorted by order, then
/// canonical code; each graph is returned in canonical vertex order.
pub fn enumerate_diam_deg_graphs(k: usize, d: usize, n_max: usize) -> Result<Vec<Graph>, ResourceExhausted> {
    if n_max > MAX_ENUMERATION_ORDER {
        return Err(ResourceExhausted::new(Resource::GraphOrder, MAX_ENUMERATION_ORDER));
    }
    let mut out = Vec::new();
    if n_max == 0 {
        return Ok(out);
    }
    // Every connected graph arises from a connected graph with one vertex
    // fewer; degree bounds are hereditary, diameter is not.
    let mut level: Vec<Graph> = vec![Graph::new(1)];
    for n in 1..=n_max {
        for g in &level {
            if diameter(g).is_some_and(|diam| diam <= k) {
                out.push(g.clone());
            }
        }
        if n == n_max {
            break;
        }
        let mut next: std::collections::BTreeMap<CanonicalForm<()>, Graph> = Default::default();
        let open: u64 = (1u64 << n) - 1;
        for g in &level {
            let free = (0..n).filter(|&v| g.degree(v) < d).fold(0u64, |m, v| m | 1 << v);
            for attach in 1..=open {
                if attach & !free != 0 || attach.count_ones() as usize > d {
                    continue;
                }
                let h = g.with_vertex(attach);
                let (form, perm) = canonical_form_by(&h, &vec![(); h.order()]);
                next.entry(form).or_insert_with(|| h.permuted(&perm));
            }
        }
        level = next.into_values().collect();
    }
    Ok(out)
}

/// Moore bound `1 + d · Σ_{i<k} (d-1)^i`: no graph of maximum degree `d` and
/// diameter `k` has more vertices.
pub fn moore_bound(k: usize, d: usize) -> u128 {
    let mut total: u128 = 1;
    let mut layer: u128 = d as u128;
    for _ in 0..k {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(d.saturating_sub(1) as u128);
    }
    total
}
