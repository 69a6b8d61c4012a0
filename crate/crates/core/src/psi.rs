//! Lower bounds on Ψ(G), the largest squared norm of `Σ_α J_α O_α` over unit
//! coefficient vectors and all families of involutions with commutation
//! graph `G`.
//!
//! Every value reported here is the squared norm of one explicit operator in
//! the one-qubit-per-vertex Pauli representation, hence a certified lower
//! bound; nothing claims the exact Ψ.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::Capacity;
use crate::error::{Error, Result};
use crate::graph::{triangle_free_process, Graph, WeightedGraph};
use crate::independence::{independence_number, serialize_ratio, weighted_independence};
use crate::pauli::{graph_to_pauli_rep, GraphHamiltonian, GraphRep};
use crate::rng;
use crate::sdp::lovasz_theta;
use crate::spectral::{norm_report, EigOptions, Method};

/// Separation flags require the value to beat α by this margin.
pub const SEPARATION_MARGIN: f64 = 1e-6;

const CONSTRAINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct PsiOptions {
    pub eig: EigOptions,
    pub capacity: Capacity,
    /// Also solve the theta program for each report.
    pub theta: bool,
}

impl Default for PsiOptions {
    fn default() -> Self {
        Self {
            eig: EigOptions::default(),
            capacity: Capacity::default(),
            theta: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    /// `1/√n` on every vertex.
    Uniform,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiReport {
    pub graph_id: String,
    /// `J_α`, or `K_α` for weighted graphs.
    pub coefficients: Vec<f64>,
    /// Squared operator norm: a lower bound on Ψ.
    pub norm_squared: f64,
    /// Independence number (weighted value for weighted graphs).
    #[serde(serialize_with = "serialize_ratio")]
    pub alpha: Rational64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Seed of the eigensolver start vector, or of the triangle-free
    /// process for search trials.
    pub seed: u64,
    /// Largest eigenpair residual behind `norm_squared`.
    pub residual_norm: f64,
    pub method: Method,
    /// `‖s⟨O⟩ − λ K/m‖` at the dominant eigenvector with `λ` fitted by least
    /// squares; zero exactly at stationary points of the norm.
    pub stationarity_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exceeds_threshold: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<bool>,
}

struct Eval {
    norm_squared: f64,
    residual_norm: f64,
    method: Method,
    /// `s · ⟨ψ|O_α|ψ⟩` with `ψ` the dominant eigenvector and `s` the sign of
    /// its eigenvalue: the gradient of the norm.
    gradient: Vec<f64>,
}

fn evaluate(rep: &GraphRep, k: &[f64], opts: &PsiOptions) -> Result<Eval> {
    let h = GraphHamiltonian::new(rep, k, &opts.capacity)?;
    let r = norm_report(&h, &opts.eig)?;
    let (dominant, sign) = r.dominant();
    let gradient = h
        .term_expectations(&dominant.vector)
        .into_iter()
        .map(|e| sign * e)
        .collect();
    Ok(Eval {
        norm_squared: r.norm * r.norm,
        residual_norm: r.residual(),
        method: dominant.method,
        gradient,
    })
}

fn stationarity_residual(k: &[f64], m: &[f64], gradient: &[f64]) -> f64 {
    let b: Vec<f64> = k.iter().zip(m).map(|(k, m)| k / m).collect();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    let lambda = if bb > 0.0 {
        gradient.iter().zip(&b).map(|(a, b)| a * b).sum::<f64>() / bb
    } else {
        0.0
    };
    gradient
        .iter()
        .zip(&b)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `Σ K_α²/m_α`.
fn weighted_norm_sq(k: &[f64], m: &[f64]) -> f64 {
    k.iter().zip(m).map(|(k, m)| k * k / m).sum()
}

fn project(k: &[f64], m: &[f64]) -> Option<Vec<f64>> {
    let s = weighted_norm_sq(k, m).sqrt();
    (s > 0.0 && s.is_finite()).then(|| k.iter().map(|x| x / s).collect())
}

fn report(
    graph: &Graph,
    alpha: Rational64,
    k: Vec<f64>,
    m: &[f64],
    eval: &Eval,
    opts: &PsiOptions,
) -> Result<PsiReport> {
    let theta = if opts.theta {
        Some(lovasz_theta(graph)?.objective)
    } else {
        None
    };
    Ok(PsiReport {
        graph_id: graph.fingerprint(),
        stationarity_residual: stationarity_residual(&k, m, &eval.gradient),
        coefficients: k,
        norm_squared: eval.norm_squared,
        alpha,
        theta,
        seed: opts.eig.seed,
        residual_norm: eval.residual_norm,
        method: eval.method,
        trial: None,
        exceeds_threshold: None,
        separation: None,
    })
}

/// Squared norm of `Σ J_α O_α` for unit `J`.
pub fn psi_lower_bound(g: &Graph, coeffs: &Coefficients, opts: &PsiOptions) -> Result<PsiReport> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    let j = match coeffs {
        Coefficients::Uniform => vec![1.0 / (n as f64).sqrt(); n],
        Coefficients::Given(j) => {
            if j.len() != n {
                return Err(Error::invalid(format!("{} coefficients for {n} vertices", j.len())));
            }
            let norm_sq: f64 = j.iter().map(|x| x * x).sum();
            if !((norm_sq - 1.0).abs() <= CONSTRAINT_TOL) {
                return Err(Error::invalid(format!("coefficients have squared norm {norm_sq}, expected 1")));
            }
            j.clone()
        }
    };
    opts.capacity.check_qubits(n)?;
    let rep = graph_to_pauli_rep(g)?;
    let eval = evaluate(&rep, &j, opts)?;
    let alpha = independence_number(g)?.value;
    report(g, alpha, j, &vec![1.0; n], &eval, opts)
}

/// Squared norm of `Σ K_α O_α` subject to `Σ K_α²/m_α = 1`.
pub fn weighted_psi_lower_bound(wg: &WeightedGraph, k: &[f64], opts: &PsiOptions) -> Result<PsiReport> {
    let g = wg.graph();
    let m = wg.weights_f64();
    if k.len() != m.len() {
        return Err(Error::invalid(format!("{} coefficients for {} vertices", k.len(), m.len())));
    }
    if m.is_empty() {
        return Err(Error::invalid("graph has no vertices"));
    }
    let c = weighted_norm_sq(k, &m);
    if !((c - 1.0).abs() <= CONSTRAINT_TOL) {
        return Err(Error::invalid(format!("Σ K²/m = {c}, expected 1")));
    }
    opts.capacity.check_qubits(m.len())?;
    let rep = graph_to_pauli_rep(g)?;
    let eval = evaluate(&rep, k, opts)?;
    let alpha = weighted_independence(wg)?.value;
    report(g, alpha, k.to_vec(), &m, &eval, opts)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// `K_α ∝ m_α`: equal coefficients on every copy of the blow-up.
    Uniform,
    /// `K_α = m_α/√w` on a maximum-weight independent set of weight `w`.
    IndependentSet,
    /// Any nonzero vector; rescaled onto the constraint.
    Given(Vec<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    #[serde(flatten)]
    pub best: PsiReport,
    pub initial_norm_squared: f64,
    pub initial_stationarity_residual: f64,
    pub accepted_steps: usize,
    pub evaluations: usize,
}

/// Projected ascent on `‖Σ K_α O_α‖` over `Σ K_α²/m_α = 1`.
///
/// Each step moves toward `ĝ = project(m ⊙ s⟨O⟩)`, the fixed point of the
/// stationarity condition, as `K ← project((1−η)K + ηĝ)`. A step is kept only
/// if it strictly increases the norm; otherwise `η` is halved, up to 30
/// times, after which the iteration stops.
pub fn optimize_coefficients(
    wg: &WeightedGraph,
    init: &Init,
    steps: usize,
    step_size: f64,
    opts: &PsiOptions,
) -> Result<OptimizeReport> {
    if !(step_size > 0.0 && step_size <= 1.0) {
        return Err(Error::invalid("step size must lie in (0, 1]"));
    }
    let g = wg.graph();
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    opts.capacity.check_qubits(n)?;
    let m = wg.weights_f64();
    let raw = match init {
        Init::Uniform => m.clone(),
        Init::IndependentSet => {
            let s = weighted_independence(wg)?;
            let mut k = vec![0.0; n];
            for v in s.witness {
                k[v] = m[v];
            }
            k
        }
        Init::Given(k) => {
            if k.len() != n {
                return Err(Error::invalid(format!("{} coefficients for {n} vertices", k.len())));
            }
            k.clone()
        }
    };
    let mut k = project(&raw, &m).ok_or_else(|| Error::invalid("initial coefficients are zero or non-finite"))?;
    let rep = graph_to_pauli_rep(g)?;
    let mut eval = evaluate(&rep, &k, opts)?;
    let mut evaluations = 1;
    let initial_norm_squared = eval.norm_squared;
    let initial_stationarity_residual = stationarity_residual(&k, &m, &eval.gradient);
    let mut accepted_steps = 0;

    for _ in 0..steps {
        let target: Vec<f64> = eval.gradient.iter().zip(&m).map(|(g, m)| g * m).collect();
        let Some(target) = project(&target, &m) else { break };
        let mut eta = step_size;
        let mut accepted = None;
        for _ in 0..=30 {
            let mixed: Vec<f64> = k.iter().zip(&target).map(|(a, b)| (1.0 - eta) * a + eta * b).collect();
            if let Some(cand) = project(&mixed, &m) {
                let e = evaluate(&rep, &cand, opts)?;
                evaluations += 1;
                if e.norm_squared > eval.norm_squared {
                    accepted = Some((cand, e));
                    break;
                }
            }
            eta *= 0.5;
        }
        match accepted {
            Some((cand, e)) => {
                k = cand;
                eval = e;
                accepted_steps += 1;
            }
            None => break,
        }
    }

    let alpha = weighted_independence(wg)?.value;
    Ok(OptimizeReport {
        best: report(g, alpha, k, &m, &eval, opts)?,
        initial_norm_squared,
        initial_stationarity_residual,
        accepted_steps,
        evaluations,
    })
}

/// Samples `trials` maximal triangle-free graphs on `n` vertices, evaluates
/// uniform coefficients on each complement, and flags values above
/// `threshold` and above α.
///
/// Trial `t` uses the process seed `derive_seed(seed, t)`, recorded in its
/// report; trials run in parallel but the list is in trial order and does
/// not depend on scheduling.
pub fn search_separation(
    n: usize,
    trials: usize,
    threshold: f64,
    seed: u64,
    opts: &PsiOptions,
) -> Result<Vec<PsiReport>> {
    if n == 0 || trials == 0 {
        return Err(Error::invalid("need at least one vertex and one trial"));
    }
    opts.capacity.check_qubits(n)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = rng::derive_seed(seed, t as u64);
            let g = triangle_free_process(n, trial_seed).complement();
            let mut r = psi_lower_bound(&g, &Coefficients::Uniform, opts)?;
            let exceeds = r.norm_squared > threshold;
            let alpha = *r.alpha.numer() as f64 / *r.alpha.denom() as f64;
            r.seed = trial_seed;
            r.trial = Some(t);
            r.exceeds_threshold = Some(exceeds);
            r.separation = Some(exceeds && r.norm_squared >= alpha + SEPARATION_MARGIN);
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::separation_example;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn psi(g: &Graph) -> f64 {
        psi_lower_bound(g, &Coefficients::Uniform, &PsiOptions::default())
            .unwrap()
            .norm_squared
    }

    #[test]
    fn uniform_examples() {
        for n in 1..=8 {
            assert!((psi(&Graph::empty(n)) - n as f64).abs() < 1e-9);
            assert!((psi(&Graph::complete(n)) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn separation_example_exceeds_two() {
        let r = psi_lower_bound(&separation_example(), &Coefficients::Uniform, &PsiOptions::default()).unwrap();
        assert!(r.norm_squared >= 2.005, "{}", r.norm_squared);
        assert!(r.norm_squared < 2.02, "{}", r.norm_squared);
        assert_eq!(r.alpha, Rational64::from_integer(2));
        assert!(r.residual_norm < 1e-8);
    }

    #[test]
    fn rejects_bad_coefficients() {
        let opts = PsiOptions::default();
        let g = Graph::cycle(5);
        assert!(psi_lower_bound(&g, &Coefficients::Given(vec![1.0; 5]), &opts).is_err());
        assert!(psi_lower_bound(&g, &Coefficients::Given(vec![1.0]), &opts).is_err());
        let wg = WeightedGraph::from_integers(g, &[2, 1, 1, 1, 1]).unwrap();
        assert!(weighted_psi_lower_bound(&wg, &[1.0, 0.0, 0.0, 0.0, 0.0], &opts).is_err());
    }

    #[test]
    fn weighted_examples() {
        let opts = PsiOptions::default();
        let single = WeightedGraph::from_integers(Graph::empty(1), &[3]).unwrap();
        let r = weighted_psi_lower_bound(&single, &[3f64.sqrt()], &opts).unwrap();
        assert!((r.norm_squared - 3.0).abs() < 1e-9);

        // {0, 2} has weight 5 in C5 with weights (2,1,3,1,1)
        let wg = WeightedGraph::from_integers(Graph::cycle(5), &[2, 1, 3, 1, 1]).unwrap();
        let w = 5f64;
        let k = [2.0 / w.sqrt(), 0.0, 3.0 / w.sqrt(), 0.0, 0.0];
        let r = weighted_psi_lower_bound(&wg, &k, &opts).unwrap();
        assert!((r.norm_squared - w).abs() < 1e-9);
        assert_eq!(r.alpha, Rational64::from_integer(5));
    }

    #[test]
    fn weighted_matches_blow_up() {
        let opts = PsiOptions::default();
        let weights = [2, 1, 1, 1, 1];
        let wg = WeightedGraph::from_integers(Graph::cycle(5), &weights).unwrap();
        let mut rng = rng::seeded(17);
        let raw: Vec<f64> = (0..5).map(|_| StandardNormal.sample(&mut rng)).collect();
        let m: Vec<f64> = weights.iter().map(|&w| w as f64).collect();
        let k = project(&raw, &m).unwrap();
        let weighted = weighted_psi_lower_bound(&wg, &k, &opts).unwrap().norm_squared;
        let j: Vec<f64> = (0..5)
            .flat_map(|a| std::iter::repeat_n(k[a] / m[a], weights[a] as usize))
            .collect();
        let blown = psi_lower_bound(&wg.blow_up().unwrap(), &Coefficients::Given(j), &opts)
            .unwrap()
            .norm_squared;
        assert!((weighted - blown).abs() < 1e-9, "{weighted} vs {blown}");
    }

    #[test]
    fn optimize_examples() {
        let opts = PsiOptions::default();
        let kn = WeightedGraph::unit(Graph::complete(5));
        let r = optimize_coefficients(&kn, &Init::Given(vec![1.0, -2.0, 0.5, 0.0, 3.0]), 10, 0.5, &opts).unwrap();
        assert!((r.best.norm_squared - 1.0).abs() < 1e-9);
        assert!(r.best.stationarity_residual < 1e-8);

        let c5 = WeightedGraph::unit(Graph::cycle(5));
        let r = optimize_coefficients(&c5, &Init::IndependentSet, 20, 0.5, &opts).unwrap();
        assert!((r.best.norm_squared - 2.0).abs() < 1e-9);
        let c: f64 = r.best.coefficients.iter().map(|x| x * x).sum();
        assert!((c - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ascent_reduces_stationarity_residual_on_c5() {
        let opts = PsiOptions::default();
        let c5 = WeightedGraph::unit(Graph::cycle(5));
        let r = optimize_coefficients(&c5, &Init::Given(vec![1.0, 0.3, 0.2, 0.6, 0.1]), 60, 0.5, &opts).unwrap();
        assert!(r.best.norm_squared >= r.initial_norm_squared);
        assert!(r.best.stationarity_residual < r.initial_stationarity_residual);
        assert!(r.accepted_steps > 0);
    }

    #[test]
    fn search_flags() {
        let opts = PsiOptions::default();
        let reports = search_separation(1, 4, 0.5, 9, &opts).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert_eq!(r.exceeds_threshold, Some(true));
            assert_eq!(r.separation, Some(false));
        }
        let a = serde_json::to_string(&search_separation(9, 5, 2.0, 3, &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&search_separation(9, 5, 2.0, 3, &opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn search_sandwich_with_theta() {
        let opts = PsiOptions {
            theta: true,
            ..PsiOptions::default()
        };
        for r in search_separation(8, 6, 2.0, 21, &opts).unwrap() {
            let theta = r.theta.unwrap();
            assert_eq!(r.alpha, Rational64::from_integer(2));
            assert!(2.0 <= theta + 1e-4);
            assert!(r.norm_squared <= theta + 1e-4, "{} > {theta}", r.norm_squared);
        }
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

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn independent_set_coefficients_give_alpha(n in 1usize..=9, bits in proptest::collection::vec(any::<bool>(), 36)) {
            let g = graph_from_bits(n, &bits);
            let s = independence_number(&g).unwrap();
            let mut j = vec![0.0; n];
            for &v in &s.witness {
                j[v] = 1.0 / (s.witness.len() as f64).sqrt();
            }
            let r = psi_lower_bound(&g, &Coefficients::Given(j), &PsiOptions::default()).unwrap();
            prop_assert!((r.norm_squared - s.witness.len() as f64).abs() < 1e-9);
        }

        #[test]
        fn optimization_never_loses_ground(n in 2usize..=7, bits in proptest::collection::vec(any::<bool>(), 21),
                                           init in proptest::collection::vec(-1.0f64..1.0, 7)) {
            let g = graph_from_bits(n, &bits);
            prop_assume!(init[..n].iter().any(|x| x.abs() > 1e-3));
            let wg = WeightedGraph::unit(g);
            let r = optimize_coefficients(&wg, &Init::Given(init[..n].to_vec()), 5, 0.5, &PsiOptions::default()).unwrap();
            prop_assert!(r.best.norm_squared >= r.initial_norm_squared - 1e-9);
        }
    }
}
