//! Simple undirected graphs carrying a commutation pattern.
//!
//! Vertices are `0..n`. An edge marks a pair of operators that anticommute;
//! a missing edge marks a commuting pair. Adjacency is stored as one bit set
//! per vertex so neighbourhood intersections are word operations.

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Fixed-size bit set over `0..len`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a & b != 0)
    }

    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    /// The low 64 bits as a mask. Only meaningful when `len <= 64`.
    pub(crate) fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Undirected simple graph: symmetric adjacency, no self-loops.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<BitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![BitSet::new(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        if n >= 3 {
            for u in 0..n {
                g.insert_edge(u, (u + 1) % n);
            }
        } else if n == 2 {
            g.insert_edge(0, 1);
        }
        g
    }

    /// Builds a graph from an edge list. Duplicates are merged; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            g.insert_edge(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from a dense 0/1 adjacency matrix.
    pub fn from_adjacency_rows(rows: &[&[u8]]) -> Result<Self> {
        let n = rows.len();
        let mut g = Self::empty(n);
        for (u, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!("row {u} has {} entries, expected {n}", row.len())));
            }
            for (v, &x) in row.iter().enumerate() {
                match x {
                    0 => {}
                    1 if u == v => return Err(Error::invalid(format!("self-loop at vertex {u}"))),
                    1 => {
                        if rows[v][u] != 1 {
                            return Err(Error::invalid(format!("adjacency not symmetric at ({u},{v})")));
                        }
                        g.insert_edge(u, v);
                    }
                    _ => return Err(Error::invalid(format!("entry ({u},{v}) is {x}, expected 0 or 1"))),
                }
            }
        }
        Ok(g)
    }

    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) {
        debug_assert_ne!(u, v);
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
    }

    pub(crate) fn delete_edge(&mut self, u: usize, v: usize) {
        self.adjacency[u].remove(v);
        self.adjacency[v].remove(u);
    }

    /// Copy of `self` with the edge `u-v` removed (no-op if absent).
    pub fn without_edge(&self, u: usize, v: usize) -> Self {
        let mut g = self.clone();
        g.delete_edge(u, v);
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(BitSet::count).sum::<usize>() / 2
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    pub fn neighbors(&self, u: usize) -> &BitSet {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].count()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn complement(&self) -> Self {
        let n = self.num_vertices();
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    g.insert_edge(u, v);
                }
            }
        }
        g
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edges()
            .into_iter()
            .all(|(u, v)| !self.adjacency[u].intersects(&self.adjacency[v]))
    }

    /// True when the graph is triangle-free and every absent edge would close
    /// a triangle.
    pub fn is_maximal_triangle_free(&self) -> bool {
        let n = self.num_vertices();
        self.is_triangle_free()
            && (0..n).all(|u| {
                (u + 1..n).all(|v| self.has_edge(u, v) || self.adjacency[u].intersects(&self.adjacency[v]))
            })
    }

    /// Checks symmetry and the absence of self-loops.
    pub fn validate(&self) -> Result<()> {
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.contains(u) {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if let Some(v) = nbrs.iter().find(|&v| !self.adjacency[v].contains(u)) {
                return Err(Error::invalid(format!("adjacency not symmetric at ({u},{v})")));
            }
        }
        Ok(())
    }

    /// Induced subgraph on `vertices`, relabelled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = Self::empty(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.insert_edge(i, j);
                }
            }
        }
        g
    }

    /// `true` iff no two vertices of `set` are adjacent.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| a != b && !self.has_edge(a, b)))
    }

    /// Short stable identifier: vertex count, edge count and an FNV-1a hash
    /// of the sorted edge list.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (u, v) in self.edges() {
            for b in (u as u64).to_le_bytes().into_iter().chain((v as u64).to_le_bytes()) {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        format!("n{}-m{}-{h:016x}", self.num_vertices(), self.num_edges())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphFile {
            n: self.num_vertices(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            weights: None,
        })
        .expect("graph serialization is infallible")
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.num_vertices())
            .field("edges", &self.edges())
            .finish()
    }
}

/// Adjacency matrix of the complement of [`separation_example`].
const SEPARATION_COMPLEMENT: [[u8; 12]; 12] = [
    [0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0],
    [0, 1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0],
    [1, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 1],
    [0, 0, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0],
    [0, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1],
    [1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 1, 0],
    [1, 0, 1, 0, 1, 0, 0, 0, 1, 0, 0, 1],
    [0, 1, 0, 0, 0, 0, 1, 1, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0],
    [0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 1],
    [0, 0, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0],
];

/// Complement of the 12-vertex separation example: a triangle-free graph
/// with 26 edges.
pub fn separation_example_complement() -> Graph {
    let rows: Vec<&[u8]> = SEPARATION_COMPLEMENT.iter().map(|r| r.as_slice()).collect();
    Graph::from_adjacency_rows(&rows).expect("embedded matrix is a valid adjacency matrix")
}

/// The 12-vertex graph with independence number 2 whose uniform-coefficient
/// Hamiltonian has squared norm just above 2.
pub fn separation_example() -> Graph {
    separation_example_complement().complement()
}

/// Random maximal triangle-free graph on `n` vertices.
///
/// Starting from the empty graph, repeatedly adds an edge drawn uniformly
/// from the absent pairs whose addition keeps the graph triangle-free, until
/// no such pair remains. Candidates are kept in lexicographic order and
/// sampled by index, so the result depends only on `(n, seed)`.
pub fn triangle_free_process(n: usize, seed: u64) -> Graph {
    let mut rng = rng::seeded(seed);
    let mut g = Graph::empty(n);
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    while !candidates.is_empty() {
        let (u, v) = candidates[rng.random_range(0..candidates.len())];
        g.insert_edge(u, v);
        candidates.retain(|&(a, b)| {
            !g.has_edge(a, b) && !g.adjacency[a].intersects(&g.adjacency[b])
        });
    }
    g
}

/// Graph with a positive rational weight per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<Rational64>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<Rational64>) -> Result<Self> {
        if weights.len() != graph.num_vertices() {
            return Err(Error::invalid(format!(
                "{} weights for {} vertices",
                weights.len(),
                graph.num_vertices()
            )));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_positive()) {
            return Err(Error::invalid(format!("weight of vertex {i} is {w}, must be positive")));
        }
        Ok(Self { graph, weights })
    }

    pub fn from_integers(graph: Graph, weights: &[i64]) -> Result<Self> {
        Self::new(graph, weights.iter().map(|&w| Rational64::from_integer(w)).collect())
    }

    pub fn unit(graph: Graph) -> Self {
        let n = graph.num_vertices();
        Self {
            graph,
            weights: vec![Rational64::one(); n],
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &[Rational64] {
        &self.weights
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Integer weights, or a validation error naming the first fractional one.
    pub fn integer_weights(&self) -> Result<Vec<u64>> {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                if w.is_integer() {
                    Ok(w.to_integer() as u64)
                } else {
                    Err(Error::invalid(format!("weight of vertex {i} is {w}, not an integer")))
                }
            })
            .collect()
    }

    /// Multiplies all weights by the least common multiple of their
    /// denominators. Returns the scaled copy and the factor used.
    pub fn scale_to_integer(&self) -> (WeightedGraph, i64) {
        let lcm = self
            .weights
            .iter()
            .fold(1i64, |acc, w| acc.lcm(w.denom()));
        let factor = Rational64::from_integer(lcm);
        let scaled = self.weights.iter().map(|w| w * factor).collect();
        (
            WeightedGraph {
                graph: self.graph.clone(),
                weights: scaled,
            },
            lcm,
        )
    }

    /// Replaces every vertex `α` by `m_α` pairwise non-adjacent copies.
    ///
    /// Copy `(α, a)` gets index `Σ_{β<α} m_β + a`. Two copies are adjacent
    /// iff their originals are.
    pub fn blow_up(&self) -> Result<Graph> {
        let m = self.integer_weights()?;
        let mut offsets = Vec::with_capacity(m.len() + 1);
        offsets.push(0usize);
        for &w in &m {
            offsets.push(offsets.last().unwrap() + w as usize);
        }
        let total = *offsets.last().unwrap();
        let mut g = Graph::empty(total);
        for (a, b) in self.graph.edges() {
            for x in offsets[a]..offsets[a + 1] {
                for y in offsets[b]..offsets[b + 1] {
                    g.insert_edge(x, y);
                }
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphFile {
            n: self.graph.num_vertices(),
            edges: self.graph.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            weights: Some(self.weights.iter().map(|w| WeightValue::Text(w.to_string())).collect()),
        })
        .expect("graph serialization is infallible")
    }
}

/// On-disk graph formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    Dimacs,
}

impl GraphFormat {
    /// Guesses the format from the first non-blank character.
    pub fn sniff(text: &str) -> Self {
        match text.trim_start().chars().next() {
            Some('{') => GraphFormat::Json,
            _ => GraphFormat::Dimacs,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<WeightValue>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum WeightValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl WeightValue {
    fn to_rational(&self, index: usize) -> Result<Rational64> {
        let loc = || format!("weights[{index}]");
        match self {
            WeightValue::Int(i) => Ok(Rational64::from_integer(*i)),
            WeightValue::Float(x) => Rational64::approximate_float(*x)
                .ok_or_else(|| Error::parse(loc(), format!("cannot represent {x} as a rational"))),
            WeightValue::Text(s) => parse_rational(s).ok_or_else(|| Error::parse(loc(), format!("bad rational {s:?}"))),
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().ok()?;
        let den: i64 = den.trim().parse().ok()?;
        (den != 0).then(|| Rational64::new(num, den))
    } else if let Ok(i) = s.parse::<i64>() {
        Some(Rational64::from_integer(i))
    } else {
        Rational64::approximate_float(s.parse::<f64>().ok()?)
    }
}

/// Parses a graph in the named format.
///
/// JSON: `{"n": 3, "edges": [[0,1],[1,2]]}` with 0-indexed vertices.
/// DIMACS: a `p edge n m` header followed by `e u v` lines, 1-indexed.
pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph> {
    match format {
        GraphFormat::Json => {
            let file: GraphFile = serde_json::from_str(text)
                .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
            Graph::from_edges(file.n, file.edges.iter().map(|e| (e[0], e[1])))
        }
        GraphFormat::Dimacs => parse_dimacs(text),
    }
}

/// Parses a JSON graph with an optional `weights` array (unit weights when
/// absent).
pub fn parse_weighted_graph(text: &str) -> Result<WeightedGraph> {
    let file: GraphFile = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let graph = Graph::from_edges(file.n, file.edges.iter().map(|e| (e[0], e[1])))?;
    match file.weights {
        None => Ok(WeightedGraph::unit(graph)),
        Some(ws) => {
            let weights = ws
                .iter()
                .enumerate()
                .map(|(i, w)| w.to_rational(i))
                .collect::<Result<Vec<_>>>()?;
            WeightedGraph::new(graph, weights)
        }
    }
}

fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut graph: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let loc = || format!("line {}", lineno + 1);
        let mut fields = line.split_whitespace();
        match fields.next() {
            None | Some("c") => {}
            Some("p") => {
                if graph.is_some() {
                    return Err(Error::parse(loc(), "duplicate problem line"));
                }
                let kind = fields.next();
                if !matches!(kind, Some("edge") | Some("col")) {
                    return Err(Error::parse(loc(), "expected `p edge <n> <m>`"));
                }
                let n = parse_field(fields.next(), loc, "vertex count")?;
                let m = parse_field(fields.next(), loc, "edge count")?;
                graph = Some((n, m));
            }
            Some("e") => {
                let Some((n, _)) = graph else {
                    return Err(Error::parse(loc(), "edge line before problem line"));
                };
                let u: usize = parse_field(fields.next(), loc, "first endpoint")?;
                let v: usize = parse_field(fields.next(), loc, "second endpoint")?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(Error::parse(loc(), format!("endpoint out of range 1..={n}")));
                }
                if u == v {
                    return Err(Error::invalid(format!("self-loop at vertex {} ({})", u - 1, loc())));
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => return Err(Error::parse(loc(), format!("unknown line type {other:?}"))),
        }
    }
    let (n, _) = graph.ok_or_else(|| Error::parse("end of input", "missing `p edge` line"))?;
    Graph::from_edges(n, edges)
}

fn parse_field(field: Option<&str>, loc: impl Fn() -> String, what: &str) -> Result<usize> {
    field
        .ok_or_else(|| Error::parse(loc(), format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(loc(), format!("{what} is not a nonnegative integer")))
}
