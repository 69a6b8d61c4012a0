//! Exact maximum (weighted) independent set by branch and bound.

use num_rational::Rational64;
use serde::Serialize;

use crate::capacity;
use crate::error::Result;
use crate::graph::{Graph, WeightedGraph};

/// Graphs above this size are rejected; the search works on 64-bit masks.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceResult {
    /// Total weight of `witness` (its size when unweighted).
    #[serde(serialize_with = "serialize_ratio")]
    pub value: Rational64,
    /// An independent set achieving `value`, sorted. Not canonical.
    pub witness: Vec<usize>,
}

pub(crate) fn serialize_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_integer() {
        s.serialize_i64(r.to_integer())
    } else {
        s.serialize_str(&r.to_string())
    }
}

/// Independence number α(G) with a witness set.
pub fn independence_number(g: &Graph) -> Result<IndependenceResult> {
    let weights = vec![1u64; g.num_vertices()];
    let (value, witness) = solve(g, &weights)?;
    Ok(IndependenceResult {
        value: Rational64::from_integer(value as i64),
        witness,
    })
}

/// Maximum over independent sets of the summed vertex weights.
pub fn weighted_independence(wg: &WeightedGraph) -> Result<IndependenceResult> {
    let (scaled, factor) = wg.scale_to_integer();
    let weights = scaled.integer_weights()?;
    let (value, witness) = solve(wg.graph(), &weights)?;
    Ok(IndependenceResult {
        value: Rational64::new(value as i64, factor),
        witness,
    })
}

fn solve(g: &Graph, weights: &[u64]) -> Result<(u64, Vec<usize>)> {
    let n = g.num_vertices();
    capacity::check("vertex count for exact independence", n, MAX_VERTICES)?;
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).low_word()).collect();
    let mut search = Search {
        adj: &adj,
        weights,
        best: 0,
        best_set: 0,
    };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    search.expand(all, 0, 0);
    let witness = (0..n).filter(|&v| search.best_set >> v & 1 == 1).collect();
    Ok((search.best, witness))
}

struct Search<'a> {
    adj: &'a [u64],
    weights: &'a [u64],
    best: u64,
    best_set: u64,
}

impl Search<'_> {
    fn expand(&mut self, candidates: u64, weight: u64, chosen: u64) {
        if candidates == 0 {
            if weight > self.best {
                self.best = weight;
                self.best_set = chosen;
            }
            return;
        }
        if weight + self.clique_cover_bound(candidates) <= self.best {
            return;
        }

        // highest degree inside the candidate set, lowest index on ties
        let mut pivot = usize::MAX;
        let mut pivot_degree = 0;
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.adj[v] & candidates).count_ones();
            if pivot == usize::MAX || d > pivot_degree {
                pivot = v;
                pivot_degree = d;
            }
        }

        if pivot_degree == 0 {
            let gained: u64 = bits(candidates).map(|v| self.weights[v]).sum();
            self.expand(0, weight + gained, chosen | candidates);
            return;
        }

        let bit = 1u64 << pivot;
        self.expand(
            candidates & !self.adj[pivot] & !bit,
            weight + self.weights[pivot],
            chosen | bit,
        );
        self.expand(candidates & !bit, weight, chosen);
    }

    /// Partition the candidates greedily into cliques of the graph; an
    /// independent set takes at most one vertex from each.
    fn clique_cover_bound(&self, candidates: u64) -> u64 {
        let mut rest = candidates;
        let mut total = 0;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            let mut clique = 1u64 << v;
            let mut heaviest = self.weights[v];
            let mut common = rest & self.adj[v];
            while common != 0 {
                let u = common.trailing_zeros() as usize;
                clique |= 1 << u;
                heaviest = heaviest.max(self.weights[u]);
                common &= self.adj[u];
            }
            rest &= !clique;
            total += heaviest;
        }
        total
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            v
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::graph::{separation_example, triangle_free_process};
    use proptest::prelude::*;

    fn brute_force(g: &Graph, w: &[u64]) -> u64 {
        let n = g.num_vertices();
        (0u32..1 << n)
            .filter(|&s| {
                (0..n).all(|a| (a + 1..n).all(|b| s >> a & 1 == 0 || s >> b & 1 == 0 || !g.has_edge(a, b)))
            })
            .map(|s| (0..n).filter(|&v| s >> v & 1 == 1).map(|v| w[v]).sum())
            .max()
            .unwrap_or(0)
    }

    fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
        let mut edges = Vec::new();
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[k] {
                    edges.push((u, v));
                }
                k += 1;
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    fn alpha(g: &Graph) -> i64 {
        independence_number(g).unwrap().value.to_integer()
    }

    #[test]
    fn named_graphs() {
        assert_eq!(alpha(&Graph::empty(7)), 7);
        assert_eq!(alpha(&Graph::complete(7)), 1);
        assert_eq!(alpha(&Graph::cycle(5)), 2);
        assert_eq!(alpha(&Graph::cycle(7)), 3);
        assert_eq!(alpha(&separation_example()), 2);
        assert_eq!(alpha(&Graph::empty(0)), 0);
    }

    #[test]
    fn weighted_examples() {
        let r = weighted_independence(&WeightedGraph::from_integers(Graph::cycle(5), &[3, 1, 1, 1, 1]).unwrap()).unwrap();
        assert_eq!(r.value, Rational64::from_integer(4));
        let r = weighted_independence(&WeightedGraph::new(Graph::empty(1), vec![Rational64::new(7, 3)]).unwrap()).unwrap();
        assert_eq!(r.value, Rational64::new(7, 3));
        let c7 = Graph::cycle(7);
        assert_eq!(
            weighted_independence(&WeightedGraph::unit(c7.clone())).unwrap().value,
            independence_number(&c7).unwrap().value
        );
    }

    #[test]
    fn capacity_error() {
        assert!(matches!(independence_number(&Graph::empty(65)), Err(Error::Capacity { .. })));
        assert_eq!(alpha(&Graph::empty(64)), 64);
    }

    #[test]
    fn complement_of_triangle_free_has_alpha_two() {
        for seed in 0..5 {
            let g = triangle_free_process(20, seed).complement();
            assert_eq!(alpha(&g), 2);
        }
    }

    #[test]
    fn blow_up_matches_weighted_value() {
        for seed in 0..10u64 {
            let g = triangle_free_process(7, seed);
            let w: Vec<i64> = (0..7).map(|i| 1 + ((seed as i64 + 3 * i) % 3)).collect();
            let wg = WeightedGraph::from_integers(g, &w).unwrap();
            let blown = wg.blow_up().unwrap();
            assert_eq!(
                independence_number(&blown).unwrap().value,
                weighted_independence(&wg).unwrap().value
            );
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 0usize..=12, bits in proptest::collection::vec(any::<bool>(), 66),
                               w in proptest::collection::vec(1u64..6, 12)) {
            let g = graph_from_bits(n, &bits);
            let r = independence_number(&g).unwrap();
            prop_assert!(g.is_independent(&r.witness));
            prop_assert_eq!(r.value.to_integer() as usize, r.witness.len());
            prop_assert_eq!(r.value.to_integer() as u64, brute_force(&g, &vec![1; n]));

            let wg = WeightedGraph::from_integers(g.clone(), &w[..n].iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap();
            let r = weighted_independence(&wg).unwrap();
            prop_assert!(g.is_independent(&r.witness));
            let witness_weight: u64 = r.witness.iter().map(|&v| w[v]).sum();
            prop_assert_eq!(r.value.to_integer() as u64, witness_weight);
            prop_assert_eq!(witness_weight, brute_force(&g, &w[..n]));
        }

        #[test]
        fn deleting_an_edge_never_decreases(n in 2usize..=12, bits in proptest::collection::vec(any::<bool>(), 66), pick in any::<usize>()) {
            let g = graph_from_bits(n, &bits);
            let edges = g.edges();
            prop_assume!(!edges.is_empty());
            let (u, v) = edges[pick % edges.len()];
            prop_assert!(alpha(&g.without_edge(u, v)) >= alpha(&g));
        }
    }
}
