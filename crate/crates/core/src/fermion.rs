//! SYK instances, free-fermion models and Wick evaluation.
//!
//! Majorana modes are indexed from 0 in the library and from 1 in the JSON
//! instance format. Monomials carry the phase `i^{q/2}` (even `q`) or
//! `i^{(q−1)/2}` (odd `q`) that makes them Hermitian, so the SYK Hamiltonian
//! is `Σ_α J_α O_α` with `O_α = i^{…} γ_{a₁} ⋯ γ_{a_q}`.
//!
//! Free-fermion models are given by an imaginary antisymmetric (hence
//! Hermitian) matrix `Q` and have Hamiltonian `i Σ_{a<b} (iQ_{ab}) γ_a γ_b`,
//! the `q = 2` instance with real couplings `J_{ab} = iQ_{ab}`. Its ground
//! state is Gaussian with `⟨γ_a γ_b⟩ = δ_{ab} − sign(Q)_{ab}`, which is
//! `δ_{ab} − Q_{ab}` whenever `Q² = 1`.
//!
//! Jordan–Wigner: `γ_{2k} = (Π_{j<k} Z_j) X_k` and
//! `γ_{2k+1} = (Π_{j<k} Z_j) Y_k` on `n/2` qubits.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{self, Capacity};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pauli::{PauliString, PauliSum, MAX_STRING_QUBITS};
use crate::rng;
use crate::spectral::{dense_spectrum, extreme_eigenvalue, EigOptions, Which};

/// Majorana count limit: two modes per qubit of a single-word Pauli string.
pub const MAX_MODES: usize = 2 * MAX_STRING_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// I.i.d. Gaussians with `E[Σ J²] = 1`.
    Expectation,
    /// Uniform on the unit sphere.
    Sphere,
}

/// Couplings `J_α` on strictly increasing `q`-tuples of `n` Majorana modes,
/// kept in lexicographic order of the tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct SykInstance {
    n: usize,
    q: usize,
    couplings: Vec<(Vec<usize>, f64)>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    q: usize,
    couplings: Vec<(Vec<usize>, f64)>,
}

fn check_modes(n: usize, q: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::invalid(format!("Majorana count must be even and positive, got {n}")));
    }
    if q == 0 || q > n {
        return Err(Error::invalid(format!("degree must lie in 1..={n}, got {q}")));
    }
    capacity::check("Majorana count", n, MAX_MODES)
}

impl SykInstance {
    pub fn new(n: usize, q: usize, mut couplings: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        check_modes(n, q)?;
        for (t, v) in &couplings {
            if t.len() != q || t.windows(2).any(|w| w[0] >= w[1]) || t.iter().any(|&a| a >= n) {
                return Err(Error::invalid(format!(
                    "coupling index {t:?} is not a strictly increasing {q}-tuple below {n}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("coupling {t:?} is not finite")));
            }
        }
        couplings.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = couplings.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid(format!("coupling {:?} appears twice", w[0].0)));
        }
        Ok(Self { n, q, couplings })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn couplings(&self) -> &[(Vec<usize>, f64)] {
        &self.couplings
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.couplings.iter().map(|(_, v)| *v)
    }

    pub fn norm_squared(&self) -> f64 {
        self.values().map(|v| v * v).sum()
    }

    /// Same tuples with new values, in tuple order.
    pub fn with_values(&self, values: impl IntoIterator<Item = f64>) -> Self {
        let couplings: Vec<_> = self
            .couplings
            .iter()
            .zip(values)
            .map(|((t, _), v)| (t.clone(), v))
            .collect();
        assert_eq!(couplings.len(), self.couplings.len(), "one value per coupling");
        Self {
            n: self.n,
            q: self.q,
            couplings,
        }
    }

    /// Rescaled to `Σ J² = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let s = self.norm_squared().sqrt();
        if s == 0.0 {
            return Err(Error::invalid("cannot normalize an all-zero instance"));
        }
        Ok(self.with_values(self.values().map(|v| v / s).collect::<Vec<_>>()))
    }

    /// `{n, q, couplings: [[indices…], value]…}` with 1-based indices.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceFile {
            n: self.n,
            q: self.q,
            couplings: self
                .couplings
                .iter()
                .map(|(t, v)| (t.iter().map(|a| a + 1).collect(), *v))
                .collect(),
        })
        .expect("instance serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        let mut couplings = Vec::with_capacity(file.couplings.len());
        for (t, v) in file.couplings {
            if t.contains(&0) {
                return Err(Error::invalid(format!("coupling {t:?}: Majorana indices start at 1")));
            }
            couplings.push((t.into_iter().map(|a| a - 1).collect(), v));
        }
        Self::new(file.n, file.q, couplings)
    }
}

fn binomial(n: usize, k: usize) -> usize {
    num_integer::binomial(n as u128, k as u128).try_into().unwrap_or(usize::MAX)
}

/// All increasing `q`-tuples of `0..n` in lexicographic order.
fn tuples(n: usize, q: usize, limit: usize, what: &'static str) -> Result<Vec<Vec<usize>>> {
    capacity::check(what, binomial(n, q), limit)?;
    Ok((0..n).combinations(q).collect())
}

/// Random couplings on every `q`-tuple, drawn in lexicographic tuple order.
pub fn syk_random(n: usize, q: usize, seed: u64, normalization: Normalization, cap: &Capacity) -> Result<SykInstance> {
    check_modes(n, q)?;
    let ts = tuples(n, q, cap.max_terms, "coupling count")?;
    let mut rng = rng::seeded(seed);
    let sigma = (1.0 / ts.len() as f64).sqrt();
    let couplings: Vec<_> = ts
        .into_iter()
        .map(|t| {
            let g: f64 = StandardNormal.sample(&mut rng);
            (t, sigma * g)
        })
        .collect();
    let inst = SykInstance { n, q, couplings };
    match normalization {
        Normalization::Expectation => Ok(inst),
        Normalization::Sphere => inst.normalized(),
    }
}

/// Power of `i` that makes a degree-`q` Majorana monomial Hermitian.
pub fn monomial_phase_power(q: usize) -> u8 {
    let k = if q % 2 == 0 { q / 2 } else { (q - 1) / 2 };
    (k % 4) as u8
}

/// Jordan–Wigner image of `γ_a` on `n/2` qubits.
pub fn majorana(n: usize, a: usize) -> Result<PauliString> {
    check_modes(n, 1)?;
    if a >= n {
        return Err(Error::invalid(format!("Majorana index {a} out of range for {n} modes")));
    }
    let k = a / 2;
    let qubits = n / 2;
    let string = PauliString::new(qubits, 1 << k, (1u64 << k) - 1, 0)?;
    Ok(if a % 2 == 0 {
        string
    } else {
        string.multiply(&PauliString::z(qubits, k))?.times_i_pow(1)
    })
}

/// Hermitian monomial `i^{…} γ_{a₁} ⋯ γ_{a_q}` for an increasing tuple.
pub fn monomial(n: usize, tuple: &[usize]) -> Result<PauliString> {
    check_modes(n, tuple.len())?;
    let mut p = PauliString::identity(n / 2);
    for &a in tuple {
        p = p.multiply(&majorana(n, a)?)?;
    }
    let p = p.times_i_pow(monomial_phase_power(tuple.len()));
    debug_assert!(p.is_hermitian());
    Ok(p)
}

/// Vertices are the `q`-subsets of `n` modes in lexicographic order; two
/// monomials anticommute, and are joined, iff `q² − |A ∩ B|` is odd.
pub fn monomial_commutation_graph(n: usize, q: usize, cap: &Capacity) -> Result<Graph> {
    check_modes(n, q)?;
    let ts = tuples(n, q, cap.max_graph_vertices, "monomial count")?;
    let masks: Vec<u128> = ts.iter().map(|t| t.iter().fold(0u128, |m, &a| m | 1 << a)).collect();
    let mut edges = Vec::new();
    for (u, &a) in masks.iter().enumerate() {
        for (v, &b) in masks.iter().enumerate().skip(u + 1) {
            if (q * q + (a & b).count_ones() as usize) % 2 == 1 {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(masks.len(), edges)
}

/// `Σ_α J_α O_α` as a Pauli sum.
pub fn syk_hamiltonian(inst: &SykInstance) -> Result<PauliSum> {
    let mut h = PauliSum::new(inst.n / 2);
    for (t, v) in &inst.couplings {
        h.push(Complex64::new(*v, 0.0), monomial(inst.n, t)?)?;
    }
    Ok(h)
}

/// Smallest and largest eigenvalue of the SYK Hamiltonian.
pub fn syk_exact_extremes(inst: &SykInstance, opts: &EigOptions, cap: &Capacity) -> Result<(f64, f64)> {
    cap.check_qubits(inst.n / 2)?;
    let h = syk_hamiltonian(inst)?;
    let ground = extreme_eigenvalue::<Complex64, _>(&h, Which::Smallest, opts)?;
    let top = extreme_eigenvalue::<Complex64, _>(&h, Which::Largest, opts)?;
    Ok((ground.eigenvalue, top.eigenvalue))
}

/// Sylvester Hadamard matrix of order `m`, a power of two.
pub fn hadamard_matrix(m: usize) -> Result<DMatrix<f64>> {
    if !m.is_power_of_two() {
        return Err(Error::invalid(format!("Sylvester Hadamard order must be a power of two, got {m}")));
    }
    Ok(DMatrix::from_fn(m, m, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }))
}

/// Quadratic Majorana Hamiltonian `i Σ_{a<b} (iQ_{ab}) γ_a γ_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeFermionModel {
    q: DMatrix<Complex64>,
}

const STRUCTURE_TOL: f64 = 1e-12;

impl FreeFermionModel {
    /// `q` must be square of even order, antisymmetric and purely imaginary.
    pub fn new(q: DMatrix<Complex64>) -> Result<Self> {
        let n = q.nrows();
        if q.ncols() != n {
            return Err(Error::invalid("Q must be square"));
        }
        check_modes(n, 1)?;
        for i in 0..n {
            for j in 0..n {
                let z = q[(i, j)];
                if z.re.abs() > STRUCTURE_TOL || (z + q[(j, i)]).norm() > STRUCTURE_TOL || !z.im.is_finite() {
                    return Err(Error::invalid(format!(
                        "Q must be antisymmetric and purely imaginary; entry ({i},{j}) is {z}"
                    )));
                }
            }
        }
        let mut q = q;
        for z in q.iter_mut() {
            z.re = 0.0;
        }
        Ok(Self { q })
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    pub fn q_matrix(&self) -> &DMatrix<Complex64> {
        &self.q
    }

    /// The same Hamiltonian as a `q = 2` instance, `J_{ab} = iQ_{ab}`.
    pub fn as_syk(&self) -> SykInstance {
        let n = self.n();
        let couplings = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .map(|(a, b)| (vec![a, b], -self.q[(a, b)].im))
            .collect();
        SykInstance { n, q: 2, couplings }
    }

    fn is_sign_matrix(&self) -> bool {
        let sq = &self.q * &self.q;
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| {
            let target = if i == j { 1.0 } else { 0.0 };
            (sq[(i, j)] - Complex64::new(target, 0.0)).norm() <= 1e-12
        }))
    }

    /// `sign(Q)`: eigenvalues mapped to ±1, and to 0 when they vanish.
    pub fn sign_matrix(&self) -> DMatrix<Complex64> {
        if self.is_sign_matrix() {
            return self.q.clone();
        }
        let n = self.n();
        let eig = self.q.clone().symmetric_eigen();
        let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut v = eig.eigenvectors.clone();
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            let s = if l.abs() <= 1e-12 * scale { 0.0 } else { l.signum() };
            for x in v.column_mut(k).iter_mut() {
                *x *= s;
            }
        }
        let raw = v * eig.eigenvectors.adjoint();
        DMatrix::from_fn(n, n, |i, j| Complex64::new(0.0, 0.5 * (raw[(i, j)].im - raw[(j, i)].im)))
    }
}

/// `Q_n = (i/√(n/2)) [[0, H], [−H, 0]]` with `H` the Sylvester Hadamard
/// matrix of order `n/2`.
pub fn build_q_matrix(n: usize) -> Result<FreeFermionModel> {
    check_modes(n, 1)?;
    let m = n / 2;
    let h = hadamard_matrix(m)?;
    Ok(FreeFermionModel { q: block_q(&h) })
}

fn block_q(r: &DMatrix<f64>) -> DMatrix<Complex64> {
    let m = r.nrows();
    let s = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(2 * m, 2 * m, |i, j| {
        let v = match (i < m, j < m) {
            (true, false) => r[(i, j - m)],
            (false, true) => -r[(j, i - m)],
            _ => 0.0,
        };
        Complex64::new(0.0, s * v)
    })
}

/// Random-sign variant for any even `n`: `R` has i.i.d. ±1 entries
/// (redrawn until invertible) and the model uses the sign matrix of
/// `(i/√(n/2)) [[0, R], [−Rᵀ, 0]]`, so that `Q² = 1` as in the Hadamard case.
pub fn random_sign_q_matrix(n: usize, seed: u64) -> Result<FreeFermionModel> {
    check_modes(n, 1)?;
    let m = n / 2;
    let mut rng = rng::seeded(seed);
    for _ in 0..10_000 {
        let r = DMatrix::<f64>::from_fn(m, m, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
        // integer matrix: a nonzero determinant is at least 1 in magnitude
        if r.clone().determinant().abs() < 0.5 {
            continue;
        }
        let raw = FreeFermionModel { q: block_q(&r) };
        return Ok(FreeFermionModel { q: raw.sign_matrix() });
    }
    Err(Error::invalid(format!("no invertible ±1 matrix of order {m} found")))
}

/// Ground energy `−½ Σ |λ(Q)|`.
pub fn free_ground_energy(model: &FreeFermionModel) -> f64 {
    let ev = model.q.clone().symmetric_eigenvalues();
    -0.5 * ev.iter().map(|v| v.abs()).sum::<f64>()
}

/// Two-point function `G_{ab} = ⟨γ_a γ_b⟩` of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct WickState {
    pub two_point: DMatrix<Complex64>,
}

/// Ground state of `model`: `G = 1 − sign(Q)`.
pub fn wick_two_point(model: &FreeFermionModel) -> WickState {
    let n = model.n();
    let s = model.sign_matrix();
    WickState {
        two_point: DMatrix::identity(n, n) - s,
    }
}

/// `⟨γ_i γ_j γ_k γ_l⟩ = G_ij G_kl − G_ik G_jl + G_il G_jk`.
pub fn wick_quartic(state: &WickState, t: [usize; 4]) -> Result<Complex64> {
    let n = state.two_point.nrows();
    if t.windows(2).any(|w| w[0] >= w[1]) || t[3] >= n {
        return Err(Error::invalid(format!("{t:?} is not an increasing 4-tuple below {n}")));
    }
    let g = |a: usize, b: usize| state.two_point[(t[a], t[b])];
    Ok(g(0, 1) * g(2, 3) - g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2))
}

fn quartic_tuple(t: &[usize]) -> [usize; 4] {
    [t[0], t[1], t[2], t[3]]
}

fn check_pair(inst: &SykInstance, model: &FreeFermionModel) -> Result<()> {
    if inst.q != 4 {
        return Err(Error::invalid(format!("expected a q = 4 instance, got q = {}", inst.q)));
    }
    if inst.n != model.n() {
        return Err(Error::invalid(format!(
            "instance has {} modes, model has {}",
            inst.n,
            model.n()
        )));
    }
    Ok(())
}

/// `⟨O_α⟩` in the model's ground state for every coupling of a `q = 4`
/// instance, including the monomial phase `i² = −1`.
pub fn signed_wick_values(inst: &SykInstance, model: &FreeFermionModel) -> Result<Vec<f64>> {
    check_pair(inst, model)?;
    let state = wick_two_point(model);
    inst.couplings
        .iter()
        .map(|(t, _)| Ok(-wick_quartic(&state, quartic_tuple(t))?.re))
        .collect()
}

/// `⟨Σ_α J_α O_α⟩` in the ground state of `model`: a variational upper bound
/// on the ground energy of the instance.
pub fn syk_expectation_wick(inst: &SykInstance, model: &FreeFermionModel) -> Result<f64> {
    let w = signed_wick_values(inst, model)?;
    Ok(inst.values().zip(w).map(|(j, w)| j * w).sum())
}

/// Signed sum `Σ_π sgn(π) Q_{π₁π₂} Q_{π₃π₄}` over the 24 orderings of
/// `idx`; antisymmetric in `idx` by construction.
pub fn j0_tensor_entry(q: &DMatrix<Complex64>, idx: [usize; 4]) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for perm in (0..4).permutations(4) {
        let inversions = (0..4)
            .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
            .filter(|&(a, b)| perm[a] > perm[b])
            .count();
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let p = |k: usize| idx[perm[k]];
        total += q[(p(0), p(1))] * q[(p(2), p(3))] * sign;
    }
    total.re
}

/// Couplings whose Hamiltonian `Σ J_α O_α` equals `−(1/n)` times the
/// quartic part of the model Hamiltonian squared, up to a positive factor,
/// normalized to `Σ J² = 1`.
///
/// With the `i² = −1` monomial phase this means `J_α ∝ +Σ_π sgn(π) Q Q`.
pub fn j0_from_model(model: &FreeFermionModel, cap: &Capacity) -> Result<SykInstance> {
    let n = model.n();
    check_modes(n, 4)?;
    let ts = tuples(n, 4, cap.max_terms, "coupling count")?;
    let couplings = ts
        .into_par_iter()
        .map(|t| {
            let v = j0_tensor_entry(&model.q, quartic_tuple(&t)) / n as f64;
            (t, v)
        })
        .collect();
    SykInstance { n, q: 4, couplings }.normalized()
}

/// J⁰ for the Hadamard model on `n` modes.
pub fn j0_coefficients(n: usize, cap: &Capacity) -> Result<SykInstance> {
    j0_from_model(&build_q_matrix(n)?, cap)
}

/// Signs of `inst` replaced by those of `reference` (unchanged where the
/// reference vanishes).
pub fn sign_matched(inst: &SykInstance, reference: &SykInstance) -> Result<SykInstance> {
    if inst.n != reference.n || inst.q != reference.q || inst.couplings.len() != reference.couplings.len() {
        return Err(Error::invalid("instances have different shapes"));
    }
    let values: Vec<f64> = inst
        .couplings
        .iter()
        .zip(&reference.couplings)
        .map(|((t, j), (r, j0))| {
            assert_eq!(t, r, "same tuple order");
            if *j0 == 0.0 {
                *j
            } else {
                j.abs() * j0.signum()
            }
        })
        .collect();
    Ok(inst.with_values(values))
}

/// Wick energy of `inst` after matching its signs to J⁰ of `model`: an upper
/// bound on the ground energy of the commutation-only model, which may pick
/// any signs.
pub fn commutation_only_energy(inst: &SykInstance, model: &FreeFermionModel, cap: &Capacity) -> Result<f64> {
    check_pair(inst, model)?;
    let j0 = j0_from_model(model, cap)?;
    syk_expectation_wick(&sign_matched(inst, &j0)?, model)
}

/// `min_s λ_min(Σ_α s_α J_α O_α)` over all `2^m` sign patterns, by dense
/// diagonalization. Small instances only.
pub fn exhaustive_sign_minimum(inst: &SykInstance, cap: &Capacity) -> Result<f64> {
    let m = inst.couplings.len();
    capacity::check("couplings for sign enumeration", m, 24)?;
    capacity::check("qubits for sign enumeration", inst.n / 2, 6)?;
    let terms: Vec<DMatrix<Complex64>> = inst
        .couplings
        .iter()
        .map(|(t, j)| Ok(monomial(inst.n, t)?.to_dense()? * Complex64::new(*j, 0.0)))
        .collect::<Result<_>>()?;
    cap.check_dense_qubits(inst.n / 2)?;
    let dim = 1usize << (inst.n / 2);
    Ok((0u64..1 << m)
        .into_par_iter()
        .map(|pattern| {
            let mut h = DMatrix::<Complex64>::zeros(dim, dim);
            for (a, d) in terms.iter().enumerate() {
                if pattern >> a & 1 == 1 {
                    h -= d;
                } else {
                    h += d;
                }
            }
            dense_spectrum(&h)[0]
        })
        .reduce(|| f64::INFINITY, f64::min))
}
