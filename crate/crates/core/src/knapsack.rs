//! The quantum knapsack problem: the least singular value of
//! `O = c + Σ_i O_i`, with each `O_i` a traceless, possibly non-Hermitian
//! operator on qubit `i`.
//!
//! After a unitary change of basis on every qubit, `O_i = c_i Z_i + d_i A_i`
//! with `A = [[0, 0], [1, 0]]`. Splitting on the last qubit,
//!
//! ```text
//! O_k = [[O_{k−1} + c_k, 0], [d_k, O_{k−1} − c_k]],
//! ```
//!
//! and replacing the first block by its least singular value `a` and the
//! second by `b` gives the 2×2 Gram matrix `[[a² + d², d b], [d b, b²]]`
//! whose smallest eigenvalue lower-bounds `σ_min(O_k)²`. Applying this
//! recursively down to scalars gives [`recursive_lower_bound`].

use itertools::Itertools;
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::capacity::{self, Capacity};
use crate::error::{Error, Result};

const TRACE_TOL: f64 = 1e-12;

/// Largest input for exhaustive sign enumeration.
pub const MAX_ENUMERATION: usize = 28;
/// Largest real-valued input for meet-in-the-middle.
pub const MAX_MEET_IN_MIDDLE: usize = 40;
/// Largest operator densified by the exact oracles.
pub const MAX_EXACT_QUBITS: usize = 12;
/// Largest instance for which leaf values are listed.
pub const MAX_LEAF_QUBITS: usize = 16;
/// Largest instance for which all qubit orders are tried.
pub const MAX_ORDER_SEARCH: usize = 6;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `c + Σ_i O_i` with one traceless 2×2 term per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackOperator {
    pub c: Complex64,
    pub qubit_terms: Vec<Matrix2<Complex64>>,
}

impl KnapsackOperator {
    pub fn new(c: Complex64, qubit_terms: Vec<Matrix2<Complex64>>) -> Result<Self> {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::invalid("scalar term is not finite"));
        }
        for (i, m) in qubit_terms.iter().enumerate() {
            if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::invalid(format!("term on qubit {i} is not finite")));
            }
            if m.trace().norm() > TRACE_TOL * (1.0 + m.norm()) {
                return Err(Error::invalid(format!("term on qubit {i} has trace {}", m.trace())));
            }
        }
        Ok(Self { c, qubit_terms })
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_terms.len()
    }

    /// Dense `2^n × 2^n` matrix; qubit `i` is bit `i` of the basis index.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        let n = self.num_qubits();
        capacity::check("knapsack qubits for a dense matrix", n, MAX_EXACT_QUBITS)?;
        let dim = 1usize << n;
        let mut m = DMatrix::from_diagonal_element(dim, dim, self.c);
        for (i, o) in self.qubit_terms.iter().enumerate() {
            for col in 0..dim {
                let b = col >> i & 1;
                for b_out in 0..2 {
                    let row = (col & !(1 << i)) | b_out << i;
                    m[(row, col)] += o[(b_out, b)];
                }
            }
        }
        Ok(m)
    }
}

/// `c + Σ_i (c_i Z_i + d_i A_i)` with `d_i ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnapsackNormalForm {
    pub c: Complex64,
    pub pairs: Vec<(Complex64, f64)>,
}

impl KnapsackNormalForm {
    pub fn new(c: Complex64, pairs: Vec<(Complex64, f64)>) -> Result<Self> {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::invalid("scalar term is not finite"));
        }
        for (i, (ci, di)) in pairs.iter().enumerate() {
            if !(ci.re.is_finite() && ci.im.is_finite() && di.is_finite()) || *di < 0.0 {
                return Err(Error::invalid(format!("pair {i} needs finite c_i and d_i ≥ 0")));
            }
        }
        Ok(Self { c, pairs })
    }

    pub fn num_qubits(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_commuting(&self) -> bool {
        self.pairs.iter().all(|(_, d)| *d == 0.0)
    }

    pub fn to_operator(&self) -> KnapsackOperator {
        KnapsackOperator {
            c: self.c,
            qubit_terms: self
                .pairs
                .iter()
                .map(|&(ci, di)| Matrix2::new(ci, zero(), Complex64::new(di, 0.0), -ci))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.to_operator().to_dense()
    }
}

/// Per-qubit Schur form: unitaries `U_i` with `U_i O_i U_i† = c_i Z + d_i A`.
///
/// `c_i` is the eigenvalue with nonnegative real part (nonnegative imaginary
/// part on ties) and `d_i ≥ 0`.
pub fn to_normal_form(op: &KnapsackOperator) -> Result<(KnapsackNormalForm, Vec<Matrix2<Complex64>>)> {
    let op = KnapsackOperator::new(op.c, op.qubit_terms.clone())?;
    let mut pairs = Vec::with_capacity(op.num_qubits());
    let mut unitaries = Vec::with_capacity(op.num_qubits());
    for o in &op.qubit_terms {
        let (c, d, u) = schur_traceless(o);
        pairs.push((c, d));
        unitaries.push(u);
    }
    Ok((KnapsackNormalForm { c: op.c, pairs }, unitaries))
}

fn schur_traceless(o: &Matrix2<Complex64>) -> (Complex64, f64, Matrix2<Complex64>) {
    let (p, q, r) = (o[(0, 0)], o[(0, 1)], o[(1, 0)]);
    let mut c = (p * p + q * r).sqrt();
    if c.re < 0.0 || (c.re == 0.0 && c.im < 0.0) {
        c = -c;
    }
    // eigenvector for −c: rows of O + c are proportional
    let lambda = -c;
    let v1 = [q, lambda - p];
    let v2 = [lambda + p, r];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let w = if n1.max(n2) == 0.0 {
        [zero(), Complex64::new(1.0, 0.0)]
    } else {
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        let s = n.sqrt();
        [v[0] / s, v[1] / s]
    };
    let mut u1 = [w[1].conj(), -w[0].conj()];
    // d = w† O u1, made real and nonnegative by the phase of u1
    let ou1 = [p * u1[0] + q * u1[1], r * u1[0] - p * u1[1]];
    let d = w[0].conj() * ou1[0] + w[1].conj() * ou1[1];
    if d.norm() > 0.0 {
        let phase = d.conj() / d.norm();
        u1 = [u1[0] * phase, u1[1] * phase];
    }
    let u = Matrix2::new(u1[0].conj(), u1[1].conj(), w[0].conj(), w[1].conj());
    (c, d.norm(), u)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BoundOptions {
    /// Try every qubit order (up to 6 qubits) and keep the best bound.
    pub search_orders: bool,
    /// List `λ_σ = |c + Σ σ_i c_i|` for every sign pattern (up to 16 qubits).
    pub leaves: bool,
    /// Also compute the exact least singular value (up to 12 qubits).
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_sigma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaf_values: Option<Vec<f64>>,
    /// Recursion nodes visited, summed over all orders tried.
    pub evaluations: u64,
    /// Qubit order of the reported bound; the last qubit is split first.
    pub order: Vec<usize>,
}

/// `√λ_min([[a² + d², d b], [d b, b²]])` without cancellation.
fn two_by_two(a: f64, b: f64, d: f64) -> f64 {
    let (a2, b2, d2) = (a * a, b * b, d * d);
    let s = a2 + d2 - b2;
    let lambda_max = 0.5 * ((a2 + d2 + b2) + (s * s + 4.0 * d2 * b2).sqrt());
    if lambda_max == 0.0 {
        0.0
    } else {
        (a2 * b2 / lambda_max).sqrt()
    }
}

fn recurse(c: Complex64, pairs: &[(Complex64, f64)], evaluations: &mut u64) -> f64 {
    *evaluations += 1;
    let Some((&(ck, dk), rest)) = pairs.split_last() else {
        return c.norm();
    };
    let a = recurse(c + ck, rest, evaluations);
    let b = recurse(c - ck, rest, evaluations);
    two_by_two(a, b, dk)
}

/// Recursive lower bound on the least singular value.
pub fn recursive_lower_bound(nf: &KnapsackNormalForm, opts: &BoundOptions, cap: &Capacity) -> Result<BoundReport> {
    let n = nf.num_qubits();
    cap.check_qubits(n)?;
    let mut evaluations = 0u64;
    let identity: Vec<usize> = (0..n).collect();
    let mut best = (recurse(nf.c, &nf.pairs, &mut evaluations), identity.clone());
    if opts.search_orders {
        capacity::check("knapsack qubits for order search", n, MAX_ORDER_SEARCH)?;
        for order in identity.iter().copied().permutations(n) {
            let pairs: Vec<_> = order.iter().map(|&i| nf.pairs[i]).collect();
            let v = recurse(nf.c, &pairs, &mut evaluations);
            if v > best.0 {
                best = (v, order);
            }
        }
    }
    let leaf_values = if opts.leaves {
        capacity::check("knapsack qubits for leaf listing", n, MAX_LEAF_QUBITS)?;
        Some(leaves(nf))
    } else {
        None
    };
    let exact_sigma_min = if opts.exact { Some(exact_min_singular(nf)?) } else { None };
    Ok(BoundReport {
        lower_bound: best.0,
        exact_sigma_min,
        leaf_values,
        evaluations,
        order: best.1,
    })
}

/// `|c + Σ σ_i c_i|` with `σ_i = +1` where bit `n − 1 − i` of the pattern
/// index is clear, in increasing pattern order.
fn leaves(nf: &KnapsackNormalForm) -> Vec<f64> {
    let n = nf.num_qubits();
    (0u64..1 << n)
        .map(|p| {
            let s = nf.pairs.iter().enumerate().fold(nf.c, |acc, (i, (ci, _))| {
                if p >> (n - 1 - i) & 1 == 0 {
                    acc + ci
                } else {
                    acc - ci
                }
            });
            s.norm()
        })
        .collect()
}

/// Least singular value of the dense operator.
pub fn exact_min_singular(nf: &KnapsackNormalForm) -> Result<f64> {
    let m = nf.to_dense()?;
    Ok(m.singular_values().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Ground energy of `O†O`.
pub fn hamiltonian_ground(nf: &KnapsackNormalForm) -> Result<f64> {
    let m = nf.to_dense()?;
    let h = m.adjoint() * &m;
    Ok(h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetSum {
    pub value: f64,
    pub signs: Vec<i8>,
}

fn signs_of(pattern: u64, n: usize) -> Vec<i8> {
    (0..n).map(|i| if pattern >> (n - 1 - i) & 1 == 0 { 1 } else { -1 }).collect()
}

/// Partial sums `Σ σ_i x_i` for every pattern over `xs`, pattern bit
/// `len − 1 − i` selecting `σ_i = −1`, each summed in index order.
fn half_sums(xs: &[Complex64]) -> Vec<Complex64> {
    let k = xs.len();
    (0u64..1 << k)
        .map(|p| {
            xs.iter().enumerate().fold(zero(), |acc, (i, x)| {
                if p >> (k - 1 - i) & 1 == 0 {
                    acc + x
                } else {
                    acc - x
                }
            })
        })
        .collect()
}

/// `min_σ |c + Σ σ_i c_i|` over `σ ∈ {±1}^n`, with the lexicographically
/// smallest optimal pattern (`+1 < −1`).
///
/// Exhaustive up to 28 terms. Longer real inputs (up to 40) use
/// [`subset_sum_min_mitm`].
pub fn subset_sum_min(c: Complex64, coeffs: &[Complex64]) -> Result<SubsetSum> {
    let n = coeffs.len();
    let real = c.im == 0.0 && coeffs.iter().all(|z| z.im == 0.0);
    if n > MAX_ENUMERATION && real {
        let xs: Vec<f64> = coeffs.iter().map(|z| z.re).collect();
        return subset_sum_min_mitm(c.re, &xs);
    }
    capacity::check("subset-sum terms for enumeration", n, MAX_ENUMERATION)?;
    // pattern = (high << low_len) | low; value depends only on the pattern
    let low_len = n / 2;
    let high = half_sums(&coeffs[..n - low_len]);
    let low = half_sums(&coeffs[n - low_len..]);
    let mut best = (f64::INFINITY, 0u64);
    for (hp, h) in high.iter().enumerate() {
        let base = c + h;
        for (lp, l) in low.iter().enumerate() {
            let v = (base + l).norm();
            if v < best.0 {
                best = (v, (hp as u64) << low_len | lp as u64);
            }
        }
    }
    Ok(SubsetSum {
        value: best.0,
        signs: signs_of(best.1, n),
    })
}

/// Meet-in-the-middle for real inputs: `O(2^{n/2} n)` time.
pub fn subset_sum_min_mitm(c: f64, coeffs: &[f64]) -> Result<SubsetSum> {
    let n = coeffs.len();
    capacity::check("subset-sum terms for meet-in-the-middle", n, MAX_MEET_IN_MIDDLE)?;
    let low_len = n / 2;
    let as_complex = |xs: &[f64]| xs.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    let high: Vec<f64> = half_sums(&as_complex(&coeffs[..n - low_len])).iter().map(|z| z.re).collect();
    let mut low: Vec<(f64, u64)> = half_sums(&as_complex(&coeffs[n - low_len..]))
        .iter()
        .enumerate()
        .map(|(p, z)| (z.re, p as u64))
        .collect();
    low.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut best = (f64::INFINITY, 0u64);
    for (hp, h) in high.iter().enumerate() {
        let base = c + h;
        let target = -base;
        let above = low.partition_point(|x| x.0 < target);
        let mut candidates = Vec::with_capacity(2);
        if above < low.len() {
            candidates.push(above);
        }
        if above > 0 {
            let v = low[above - 1].0;
            candidates.push(low.partition_point(|x| x.0 < v));
        }
        for idx in candidates {
            let (l, lp) = low[idx];
            let v = (base + l).abs();
            let pattern = (hp as u64) << low_len | lp;
            if v < best.0 || (v == best.0 && pattern < best.1) {
                best = (v, pattern);
            }
        }
    }
    Ok(SubsetSum {
        value: best.0,
        signs: signs_of(best.1, n),
    })
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum InputFile {
    Raw { c: [f64; 2], qubits: Vec<RawQubit> },
    Normal { c: [f64; 2], pairs: Vec<PairFile> },
}

#[derive(Debug, Deserialize)]
struct RawQubit {
    matrix: [[[f64; 2]; 2]; 2],
}

#[derive(Debug, Deserialize)]
struct PairFile {
    c_i: [f64; 2],
    d_i: f64,
}

#[derive(Debug, Deserialize)]
struct SubsetSumFile {
    c: [f64; 2],
    coeffs: Vec<[f64; 2]>,
}

fn complex(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

/// Reads either input format and returns the normal form (computing it for
/// raw operators).
pub fn parse_knapsack(text: &str) -> Result<KnapsackNormalForm> {
    match serde_json::from_str::<InputFile>(text).map_err(json_error)? {
        InputFile::Raw { c, qubits } => {
            let terms = qubits
                .iter()
                .map(|q| {
                    let m = q.matrix;
                    Matrix2::new(complex(m[0][0]), complex(m[0][1]), complex(m[1][0]), complex(m[1][1]))
                })
                .collect();
            Ok(to_normal_form(&KnapsackOperator::new(complex(c), terms)?)?.0)
        }
        InputFile::Normal { c, pairs } => KnapsackNormalForm::new(
            complex(c),
            pairs.iter().map(|p| (complex(p.c_i), p.d_i)).collect(),
        ),
    }
}

/// `{"c": [re, im], "coeffs": [[re, im], …]}`.
pub fn parse_subset_sum(text: &str) -> Result<(Complex64, Vec<Complex64>)> {
    let f: SubsetSumFile = serde_json::from_str(text).map_err(json_error)?;
    let c = complex(f.c);
    let coeffs: Vec<Complex64> = f.coeffs.into_iter().map(complex).collect();
    if std::iter::once(&c).chain(&coeffs).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::invalid("subset-sum input must be finite"));
    }
    Ok((c, coeffs))
}
