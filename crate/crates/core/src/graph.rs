//! Graphs of maximum degree 4, DIMACS ingestion, small-graph generators and
//! an exact backtracking 3-coloring oracle.
//!
//! Vertices are 0-based internally. DIMACS files and user-facing output use
//! 1-based labels.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest vertex degree any [`Graph`] may have.
pub const MAX_DEGREE: usize = 4;

/// The oracle refuses graphs above this size.
pub const ORACLE_MAX_VERTICES: usize = 24;

/// Largest `n_max` accepted by [`enumerate_graphs`].
pub const ENUMERATION_MAX_VERTICES: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {vertex} has degree {degree} > {MAX_DEGREE}")]
    DegreeTooLarge { vertex: usize, degree: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("oracle limited to {ORACLE_MAX_VERTICES} vertices, got {0}")]
    TooLargeForOracle(usize),
    #[error("enumeration limited to n_max <= {ENUMERATION_MAX_VERTICES}, got {0}")]
    EnumerationRange(usize),
    #[error("invalid generator request: {0}")]
    Generator(String),
    #[error("coloring has length {got}, expected {expected}")]
    ColoringLength { got: usize, expected: usize },
    #[error("color {0} is not in {{0, 1, 2}}")]
    BadColor(u8),
}

/// Simple undirected graph with every vertex of degree at most 4.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based edges. Duplicates collapse; self-loops,
    /// out-of-range endpoints and degree violations are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let adjacency = build_adjacency(n, &edges);
        if let Some((vertex, nb)) = adjacency.iter().enumerate().find(|(_, nb)| nb.len() > MAX_DEGREE) {
            return Err(GraphError::DegreeTooLarge { vertex, degree: nb.len() });
        }
        Ok(Graph { n, edges, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Unordered non-adjacent pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2 - self.m());
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.is_adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn without_edge(&self, edge: (usize, usize)) -> Graph {
        let edges = self.edges.iter().copied().filter(|&e| e != edge);
        Graph::new(self.n, edges).expect("edge deletion preserves validity")
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        Graph::new(self.n, self.edges.iter().map(|&(a, b)| (perm[a], perm[b]))).expect("relabeling preserves validity")
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Bit `k` set iff the `k`-th pair in lexicographic `(i, j)` order is an
    /// edge. Only meaningful for n ≤ 11.
    pub fn edge_bitmask(&self) -> u64 {
        self.edges.iter().fold(0u64, |acc, &(i, j)| acc | (1 << pair_index(self.n, i, j)))
    }

    /// Writes the graph in DIMACS COLOR format.
    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p edge {} {}\n", self.n, self.m());
        for &(i, j) in &self.edges {
            s.push_str(&format!("e {} {}\n", i + 1, j + 1));
        }
        s
    }

    /// The Petersen graph (10 vertices, 3-regular).
    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::new(10, edges).expect("petersen graph is valid")
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G(n={}, edges=[", self.n)?;
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}-{}", i + 1, j + 1)?;
        }
        write!(f, "])")
    }
}

fn build_adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for nb in &mut adj {
        nb.sort_unstable();
    }
    adj
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Parses DIMACS COLOR text (`c` comments, one `p edge n m` line, `e i j`
/// lines with 1-based endpoints).
pub fn parse_dimacs(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut degree: Vec<usize> = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| GraphError::Parse { line, message };
        let mut tok = raw.split_whitespace();
        match tok.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(err("duplicate problem line".into()));
                }
                let fmt = tok.next();
                if !matches!(fmt, Some("edge") | Some("col")) {
                    return Err(err(format!("expected 'p edge n m', got '{}'", raw.trim())));
                }
                let n = parse_count(tok.next(), "vertex count").map_err(err)?;
                let m = parse_count(tok.next(), "edge count").map_err(err)?;
                if n == 0 {
                    return Err(err("vertex count must be positive".into()));
                }
                header = Some((n, m));
                degree = vec![0; n];
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| err("edge line before problem line".into()))?;
                let a = parse_count(tok.next(), "endpoint").map_err(err)?;
                let b = parse_count(tok.next(), "endpoint").map_err(err)?;
                for v in [a, b] {
                    if v == 0 || v > n {
                        return Err(err(format!("vertex index {v} out of range 1..={n}")));
                    }
                }
                if a == b {
                    return Err(err(format!("self-loop at vertex {a}")));
                }
                let key = (a.min(b) - 1, a.max(b) - 1);
                if seen.insert(key) {
                    for v in [key.0, key.1] {
                        degree[v] += 1;
                        if degree[v] > MAX_DEGREE {
                            return Err(err(format!("vertex {} has degree > {MAX_DEGREE}", v + 1)));
                        }
                    }
                    edges.push(key);
                }
            }
            Some(other) => return Err(err(format!("unknown line type '{other}'"))),
        }
    }
    let (n, _) = header.ok_or(GraphError::Parse { line: 0, message: "missing problem line".into() })?;
    Graph::new(n, edges)
}

fn parse_count(tok: Option<&str>, what: &str) -> Result<usize, String> {
    let t = tok.ok_or_else(|| format!("missing {what}"))?;
    t.parse().map_err(|_| format!("invalid {what} '{t}'"))
}

/// Generator requests for [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub enum GraphKind {
    Complete(usize),
    Cycle(usize),
    Path(usize),
    Petersen,
    /// Each pair in lexicographic order is kept with probability `p`, unless
    /// it would push an endpoint past degree 4.
    Random {
        n: usize,
        p: f64,
        seed: u64,
    },
}

pub fn generate(kind: &GraphKind) -> Result<Graph, GraphError> {
    match *kind {
        GraphKind::Complete(k) => {
            if k == 0 || k > MAX_DEGREE + 1 {
                return Err(GraphError::Generator(format!("complete graph K{k} needs 1 <= k <= {}", MAX_DEGREE + 1)));
            }
            Graph::new(k, (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))))
        }
        GraphKind::Cycle(k) => {
            if k < 3 {
                return Err(GraphError::Generator(format!("cycle needs k >= 3, got {k}")));
            }
            Graph::new(k, (0..k).map(|i| (i, (i + 1) % k)))
        }
        GraphKind::Path(k) => {
            if k == 0 {
                return Err(GraphError::Generator("path needs k >= 1".into()));
            }
            Graph::new(k, (1..k).map(|i| (i - 1, i)))
        }
        GraphKind::Petersen => Ok(Graph::petersen()),
        GraphKind::Random { n, p, seed } => {
            if n == 0 || !(0.0..=1.0).contains(&p) {
                return Err(GraphError::Generator(format!(
                    "random graph needs n >= 1 and p in [0,1], got n={n}, p={p}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut deg = vec![0usize; n];
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let keep = rng.gen_bool(p);
                    if keep && deg[i] < MAX_DEGREE && deg[j] < MAX_DEGREE {
                        deg[i] += 1;
                        deg[j] += 1;
                        edges.push((i, j));
                    }
                }
            }
            Graph::new(n, edges)
        }
    }
}

/// Assignment of colors 0 (red), 1 (yellow), 2 (blue) to vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coloring(Vec<u8>);

impl Coloring {
    pub fn new(colors: Vec<u8>) -> Result<Self, GraphError> {
        if let Some(&c) = colors.iter().find(|&&c| c > 2) {
            return Err(GraphError::BadColor(c));
        }
        Ok(Coloring(colors))
    }

    pub fn colors(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check_len(&self, g: &Graph) -> Result<(), GraphError> {
        if self.len() != g.n() {
            return Err(GraphError::ColoringLength { got: self.len(), expected: g.n() });
        }
        Ok(())
    }

    /// Edges whose endpoints share a color.
    pub fn monochromatic_edges(&self, g: &Graph) -> Vec<(usize, usize)> {
        g.edges().iter().copied().filter(|&(a, b)| self.0[a] == self.0[b]).collect()
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.len() == g.n() && g.edges().iter().all(|&(a, b)| self.0[a] != self.0[b])
    }

    /// Applies the color bijection `perm` pointwise.
    pub fn permuted(&self, perm: [u8; 3]) -> Coloring {
        Coloring(self.0.iter().map(|&c| perm[c as usize]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub colorable: bool,
    /// Number of proper maps V → {0,1,2}, not quotiented by color symmetry.
    pub count: u64,
    pub witness: Option<Coloring>,
}

/// Exact proper 3-coloring count by backtracking, component by component.
pub fn oracle_3color(g: &Graph) -> Result<OracleResult, GraphError> {
    if g.n() > ORACLE_MAX_VERTICES {
        return Err(GraphError::TooLargeForOracle(g.n()));
    }
    let mut colors = vec![u8::MAX; g.n()];
    let mut total: u64 = 1;
    let mut done = vec![false; g.n()];
    for root in 0..g.n() {
        if done[root] {
            continue;
        }
        let order = bfs_order(g, root);
        for &v in &order {
            done[v] = true;
        }
        let mut witness = None;
        let count = count_component(g, &order, 0, &mut colors, &mut witness);
        if count == 0 {
            return Ok(OracleResult { colorable: false, count: 0, witness: None });
        }
        let w = witness.expect("positive count records a witness");
        for &v in &order {
            colors[v] = w[v];
        }
        total *= count;
    }
    // colors now holds the first witness of every component
    let witness = Coloring::new(colors).expect("oracle colors are in range");
    Ok(OracleResult { colorable: true, count: total, witness: Some(witness) })
}

fn bfs_order(g: &Graph, root: usize) -> Vec<usize> {
    let mut order = vec![root];
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
    }
    order
}

fn count_component(g: &Graph, order: &[usize], pos: usize, colors: &mut [u8], witness: &mut Option<Vec<u8>>) -> u64 {
    if pos == order.len() {
        if witness.is_none() {
            *witness = Some(colors.to_vec());
        }
        return 1;
    }
    let v = order[pos];
    // the first vertex of a component contributes a factor 3 by symmetry
    let candidates: &[u8] = if pos == 0 { &[0] } else { &[0, 1, 2] };
    let mut count = 0;
    for &c in candidates {
        if g.neighbors(v).iter().all(|&w| colors[w] != c) {
            colors[v] = c;
            count += count_component(g, order, pos + 1, colors, witness);
            colors[v] = u8::MAX;
        }
    }
    if pos == 0 {
        count * 3
    } else {
        count
    }
}

/// Random proper coloring via randomized backtracking, or `None` when the
/// graph is not 3-colorable.
pub fn random_proper_coloring<R: Rng>(g: &Graph, rng: &mut R) -> Option<Coloring> {
    let mut colors = vec![u8::MAX; g.n()];
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(rng);
    fn go<R: Rng>(g: &Graph, order: &[usize], pos: usize, colors: &mut [u8], rng: &mut R) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        let mut palette = [0u8, 1, 2];
        palette.shuffle(rng);
        for c in palette {
            if g.neighbors(v).iter().all(|&w| colors[w] != c) {
                colors[v] = c;
                if go(g, order, pos + 1, colors, rng) {
                    return true;
                }
                colors[v] = u8::MAX;
            }
        }
        false
    }
    go(g, &order, 0, &mut colors, rng).then_some(Coloring(colors))
}

/// Not 3-colorable, yet 3-colorable after deleting any single edge.
pub fn is_d_graph(g: &Graph) -> Result<bool, GraphError> {
    if oracle_3color(g)?.colorable {
        return Ok(false);
    }
    for &e in g.edges() {
        if !oracle_3color(&g.without_edge(e))?.colorable {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every connected labeled graph on `2..=n_max` vertices with max degree ≤ 4,
/// ordered by vertex count then by edge bitmask.
pub fn enumerate_graphs(n_max: usize) -> Result<impl Iterator<Item = Graph>, GraphError> {
    if !(1..=ENUMERATION_MAX_VERTICES).contains(&n_max) {
        return Err(GraphError::EnumerationRange(n_max));
    }
    Ok((2..=n_max).flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let total: u64 = 1 << pairs.len();
        (0..total).filter_map(move |mask| graph_from_mask(n, &pairs, mask))
    }))
}

fn graph_from_mask(n: usize, pairs: &[(usize, usize)], mask: u64) -> Option<Graph> {
    // cheap filters before building: enough edges to connect, degree bound
    if (mask.count_ones() as usize) < n - 1 {
        return None;
    }
    let mut deg = [0usize; ENUMERATION_MAX_VERTICES];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if mask >> k & 1 == 1 {
            deg[i] += 1;
            deg[j] += 1;
        }
    }
    if deg[..n].iter().any(|&d| d == 0 || d > MAX_DEGREE) {
        return None;
    }
    let edges = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| p);
    let g = Graph::new(n, edges).ok()?;
    g.is_connected().then_some(g)
}

/// Smallest edge bitmask over all vertex relabelings. Costs n! per graph.
pub fn canonical_bitmask(g: &Graph) -> u64 {
    let n = g.n();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    loop {
        let mask = g.edges().iter().fold(0u64, |acc, &(a, b)| {
            let (x, y) = (perm[a].min(perm[b]), perm[a].max(perm[b]));
            acc | 1 << pair_index(n, x, y)
        });
        best = best.min(mask);
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

/// Keeps the first graph of every isomorphism class, preserving order.
pub fn dedup_isomorphic(graphs: impl IntoIterator<Item = Graph>) -> Vec<Graph> {
    let mut seen = HashSet::new();
    graphs.into_iter().filter(|g| seen.insert((g.n(), canonical_bitmask(g)))).collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(g: &Graph) -> u64 {
        let total = 3u64.pow(g.n() as u32);
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let colors: Vec<u8> = (0..g.n())
                    .map(|_| {
                        let x = (c % 3) as u8;
                        c /= 3;
                        x
                    })
                    .collect();
                g.edges().iter().all(|&(a, b)| colors[a] != colors[b])
            })
            .count() as u64
    }

    #[test]
    fn parses_k2() {
        let g = parse_dimacs("c tiny\np edge 2 1\ne 1 2\n").unwrap();
        assert_eq!((g.n(), g.edges()), (2, &[(0, 1)][..]));
    }

    #[test]
    fn parses_k4_and_collapses_duplicates() {
        let text = "p edge 4 7\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\ne 2 1\n";
        let g = parse_dimacs(text).unwrap();
        assert_eq!(g.m(), 6);
        assert_eq!(g.max_degree(), 3);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_dimacs("p edge 2 1\ne 1 3\n").unwrap_err();
        assert!(matches!(e, GraphError::Parse { line: 2, .. }), "{e}");
        let e = parse_dimacs("p edge 2 1\n\ne 2 2\n").unwrap_err();
        assert!(matches!(e, GraphError::Parse { line: 3, .. }), "{e}");
        let e = parse_dimacs("p edgy 2 1\n").unwrap_err();
        assert!(matches!(e, GraphError::Parse { line: 1, .. }));
        let star: String =
            std::iter::once("p edge 6 5\n".to_string()).chain((2..=6).map(|j| format!("e 1 {j}\n"))).collect();
        let e = parse_dimacs(&star).unwrap_err();
        assert!(matches!(e, GraphError::Parse { line: 6, .. }), "{e}");
        assert!(parse_dimacs("c nothing\n").is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let g = Graph::petersen();
        assert_eq!(parse_dimacs(&g.to_dimacs()).unwrap(), g);
    }

    #[test]
    fn generators() {
        let k4 = generate(&GraphKind::Complete(4)).unwrap();
        assert_eq!(k4.m(), 6);
        let c5 = generate(&GraphKind::Cycle(5)).unwrap();
        assert_eq!(c5.m(), 5);
        assert!((0..5).all(|v| c5.degree(v) == 2));
        assert!(generate(&GraphKind::Complete(6)).is_err());
        let a = generate(&GraphKind::Random { n: 12, p: 0.5, seed: 3 }).unwrap();
        let b = generate(&GraphKind::Random { n: 12, p: 0.5, seed: 3 }).unwrap();
        assert_eq!(a, b);
        assert!(a.max_degree() <= MAX_DEGREE);
        let p = Graph::petersen();
        assert_eq!((p.n(), p.m(), p.max_degree()), (10, 15, 3));
    }

    #[test]
    fn rejects_bad_graphs() {
        assert_eq!(Graph::new(0, []), Err(GraphError::Empty));
        assert_eq!(Graph::new(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(matches!(
            Graph::new(6, (1..6).map(|j| (0, j))),
            Err(GraphError::DegreeTooLarge { vertex: 0, degree: 5 })
        ));
    }

    #[test]
    fn oracle_counts_match_chromatic_polynomials() {
        let k3 = generate(&GraphKind::Complete(3)).unwrap();
        assert_eq!(oracle_3color(&k3).unwrap().count, 6);
        let c5 = generate(&GraphKind::Cycle(5)).unwrap();
        // (k-1)^n + (-1)^n (k-1) at k = 3, n = 5
        assert_eq!(oracle_3color(&c5).unwrap().count, 32 - 2);
        let k4 = generate(&GraphKind::Complete(4)).unwrap();
        let r = oracle_3color(&k4).unwrap();
        assert_eq!((r.colorable, r.count, r.witness), (false, 0, None));
        assert_eq!(brute_force_count(&k4), 0);
        let empty = Graph::new(3, []).unwrap();
        assert_eq!(oracle_3color(&empty).unwrap().count, 27);
    }

    #[test]
    fn oracle_agrees_with_brute_force_and_witness_is_proper() {
        for seed in 0..40 {
            let g = generate(&GraphKind::Random { n: 7, p: 0.55, seed }).unwrap();
            let r = oracle_3color(&g).unwrap();
            assert_eq!(r.count, brute_force_count(&g), "{g}");
            assert_eq!(r.colorable, r.count > 0);
            assert_eq!(r.witness.is_some(), r.colorable);
            if let Some(w) = r.witness {
                assert!(w.is_proper(&g));
            }
        }
    }

    #[test]
    fn oracle_refuses_large_graphs() {
        let g = generate(&GraphKind::Path(25)).unwrap();
        assert_eq!(oracle_3color(&g), Err(GraphError::TooLargeForOracle(25)));
        let g = generate(&GraphKind::Path(24)).unwrap();
        assert_eq!(oracle_3color(&g).unwrap().count, 3 << 23);
    }

    #[test]
    fn d_graphs() {
        assert!(is_d_graph(&generate(&GraphKind::Complete(4)).unwrap()).unwrap());
        assert!(!is_d_graph(&generate(&GraphKind::Complete(3)).unwrap()).unwrap());
        assert!(!is_d_graph(&generate(&GraphKind::Cycle(5)).unwrap()).unwrap());
        // K5 contains K4 strictly, so deleting one edge leaves a K4
        assert!(!is_d_graph(&generate(&GraphKind::Complete(5)).unwrap()).unwrap());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_graphs(2).unwrap().count(), 1);
        let small: Vec<_> = enumerate_graphs(3).unwrap().collect();
        assert_eq!(small.len(), 5);
        assert_eq!(small.iter().filter(|g| g.n() == 3).count(), 4);
        let k4 = generate(&GraphKind::Complete(4)).unwrap();
        assert!(enumerate_graphs(4).unwrap().any(|g| g == k4));
        // 38 connected labeled graphs on 4 vertices
        assert_eq!(enumerate_graphs(4).unwrap().filter(|g| g.n() == 4).count(), 38);
        assert!(enumerate_graphs(8).is_err());
        assert!(enumerate_graphs(0).is_err());
    }

    #[test]
    fn isomorphism_dedup() {
        // connected unlabeled graphs: 1 on 2 vertices, 2 on 3, 6 on 4
        let classes = dedup_isomorphic(enumerate_graphs(4).unwrap());
        assert_eq!(classes.len(), 1 + 2 + 6);
    }

    #[test]
    fn random_coloring_is_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Graph::petersen();
        for _ in 0..20 {
            assert!(random_proper_coloring(&g, &mut rng).unwrap().is_proper(&g));
        }
        assert!(random_proper_coloring(&generate(&GraphKind::Complete(4)).unwrap(), &mut rng).is_none());
    }
}
