//! Bit-mask Pauli strings and the one-qubit-per-vertex graph representation.
//!
//! A string is `i^phase · Π_q X_q^{x_q} Z_q^{z_q}` with qubit `q` the bit of
//! weight `2^q` in the computational basis index. Acting on a basis state,
//! `P|s⟩ = i^phase (−1)^{|s ∧ z|} |s ⊕ x⟩`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::capacity::{self, Capacity};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{LinearOperator, Scalar};

/// Masks are single words.
pub const MAX_STRING_QUBITS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    phase_power: u8,
}

impl PauliString {
    pub fn new(num_qubits: usize, x_mask: u64, z_mask: u64, phase_power: u8) -> Result<Self> {
        capacity::check("Pauli string qubit count", num_qubits, MAX_STRING_QUBITS)?;
        let fits = |m: u64| num_qubits == 64 || m >> num_qubits == 0;
        if !fits(x_mask) || !fits(z_mask) {
            return Err(Error::invalid(format!("masks do not fit {num_qubits} qubits")));
        }
        Ok(Self {
            num_qubits,
            x_mask,
            z_mask,
            phase_power: phase_power % 4,
        })
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self::new(num_qubits, 0, 0, 0).expect("identity fits")
    }

    pub fn x(num_qubits: usize, q: usize) -> Self {
        Self::new(num_qubits, 1 << q, 0, 0).expect("qubit in range")
    }

    pub fn z(num_qubits: usize, q: usize) -> Self {
        Self::new(num_qubits, 0, 1 << q, 0).expect("qubit in range")
    }

    /// `Y = i X Z`.
    pub fn y(num_qubits: usize, q: usize) -> Self {
        Self::new(num_qubits, 1 << q, 1 << q, 1).expect("qubit in range")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn phase_power(&self) -> u8 {
        self.phase_power
    }

    /// `i^phase`.
    pub fn phase(&self) -> Complex64 {
        I_POWERS[self.phase_power as usize]
    }

    /// Same string times `i^k`.
    pub fn times_i_pow(self, k: u8) -> Self {
        Self {
            phase_power: (self.phase_power + k) % 4,
            ..self
        }
    }

    /// `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_size(other)?;
        // Z^{z1} X^{x2} = (−1)^{|z1 ∧ x2|} X^{x2} Z^{z1}
        let swap = (self.z_mask & other.x_mask).count_ones() as u8 % 2;
        Ok(Self {
            num_qubits: self.num_qubits,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            phase_power: (self.phase_power + other.phase_power + 2 * swap) % 4,
        })
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        self.same_size(other)?;
        Ok(self.symplectic(other) % 2 == 0)
    }

    fn symplectic(&self, other: &Self) -> u32 {
        (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones()
    }

    /// `P = P†`, which for these strings is equivalent to `P² = 1`.
    pub fn is_hermitian(&self) -> bool {
        u32::from(self.phase_power) % 2 == (self.x_mask & self.z_mask).count_ones() % 2
    }

    fn same_size(&self, other: &Self) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::invalid(format!(
                "Pauli strings on {} and {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(())
    }

    /// Amplitude factor and source index for output index `t`:
    /// `(P ψ)[t] = factor · ψ[t ⊕ x]`.
    #[inline]
    fn sign_at(&self, t: u64) -> bool {
        ((t ^ self.x_mask) & self.z_mask).count_ones() & 1 == 1
    }

    /// `out ← out + coeff · P ψ`.
    pub fn apply_add(&self, coeff: Complex64, psi: &[Complex64], out: &mut [Complex64]) {
        let c = coeff * self.phase();
        for (t, o) in out.iter_mut().enumerate() {
            let t = t as u64;
            let v = psi[(t ^ self.x_mask) as usize];
            *o += if self.sign_at(t) { -c * v } else { c * v };
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        capacity::check("dense qubit count", self.num_qubits, Capacity::default().max_dense_qubits)?;
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        let c = self.phase();
        for t in 0..dim as u64 {
            let s = t ^ self.x_mask;
            m[(t as usize, s as usize)] = if self.sign_at(t) { -c } else { c };
        }
        Ok(m)
    }
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ["", "i", "-", "-i"][self.phase_power as usize])?;
        for q in (0..self.num_qubits).rev() {
            let c = match (self.x_mask >> q & 1, self.z_mask >> q & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'W', // XZ = −iY
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Symplectic commutation test.
pub fn pauli_commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.commutes_with(q)
}

/// One Hermitian involution per vertex with anticommutation exactly on the
/// edges of `graph`.
#[derive(Debug, Clone)]
pub struct GraphRep {
    graph: Graph,
    strings: Vec<PauliString>,
}

impl GraphRep {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn num_qubits(&self) -> usize {
        self.strings.len()
    }
}

/// Maps vertex `α` to `X_α · Π_{β<α, αβ ∈ E} Z_β` on one qubit per vertex.
pub fn graph_to_pauli_rep(g: &Graph) -> Result<GraphRep> {
    let n = g.num_vertices();
    capacity::check("graph representation qubit count", n, MAX_STRING_QUBITS)?;
    let strings: Vec<PauliString> = (0..n)
        .map(|a| {
            let z = g.neighbors(a).iter().filter(|&b| b < a).fold(0u64, |m, b| m | 1 << b);
            PauliString::new(n, 1 << a, z, 0).expect("fits")
        })
        .collect();
    for a in 0..n {
        assert!(strings[a].is_hermitian());
        for b in a + 1..n {
            assert_eq!(
                strings[a].commutes_with(&strings[b]).expect("same size"),
                !g.has_edge(a, b),
                "representation broke the commutation pattern at ({a},{b})"
            );
        }
    }
    Ok(GraphRep {
        graph: g.clone(),
        strings,
    })
}

/// Matrix-free `H = Σ_α J_α O_α` for a graph representation. All strings are
/// real, so the operator acts on real or complex vectors alike.
#[derive(Debug, Clone)]
pub struct GraphHamiltonian<'a> {
    rep: &'a GraphRep,
    coeffs: Vec<f64>,
}

impl<'a> GraphHamiltonian<'a> {
    pub fn new(rep: &'a GraphRep, coeffs: &[f64], cap: &Capacity) -> Result<Self> {
        if coeffs.len() != rep.num_qubits() {
            return Err(Error::invalid(format!(
                "{} coefficients for {} vertices",
                coeffs.len(),
                rep.num_qubits()
            )));
        }
        cap.check_qubits(rep.num_qubits())?;
        Ok(Self {
            rep,
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn rep(&self) -> &GraphRep {
        self.rep
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `⟨ψ|O_α|ψ⟩` for every vertex `α`.
    pub fn term_expectations<T: Scalar>(&self, psi: &[T]) -> Vec<f64> {
        self.rep
            .strings
            .par_iter()
            .map(|p| {
                let mut acc = 0.0;
                for (t, &amp) in psi.iter().enumerate() {
                    let src = psi[(t as u64 ^ p.x_mask) as usize];
                    let v = (amp.conj() * src).re();
                    acc += if p.sign_at(t as u64) { -v } else { v };
                }
                acc
            })
            .collect()
    }
}

const MATVEC_CHUNK: usize = 1 << 12;

impl<T: Scalar> LinearOperator<T> for GraphHamiltonian<'_> {
    fn dim(&self) -> usize {
        1 << self.rep.num_qubits()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        let terms: Vec<(f64, PauliString)> = self
            .coeffs
            .iter()
            .zip(&self.rep.strings)
            .filter(|(c, _)| **c != 0.0)
            .map(|(&c, &p)| (c, p))
            .collect();
        // Within an aligned chunk every term reads one contiguous source block, so
        // the chunk is filled term by term with the low bits of the masks.
        y.par_chunks_mut(MATVEC_CHUNK).enumerate().for_each(|(ci, chunk)| {
            let base = (ci * MATVEC_CHUNK) as u64;
            let low = chunk.len() as u64 - 1;
            chunk.fill(T::zero());
            for (c, p) in &terms {
                let src = (base ^ p.x_mask) & !low;
                let (xl, zl) = (p.x_mask & low, p.z_mask & low);
                let c = if (src & p.z_mask).count_ones() & 1 == 1 { -c } else { *c };
                let block = &x[src as usize..src as usize + chunk.len()];
                for (off, out) in chunk.iter_mut().enumerate() {
                    let u = off as u64 ^ xl;
                    let sign = if (u & zl).count_ones() & 1 == 1 { -c } else { c };
                    *out += block[u as usize].times(sign);
                }
            }
        });
    }
}

/// `H ψ` with `H = Σ_α J_α O_α`, computed term by term without a matrix.
pub fn apply_hamiltonian(
    coeffs: &[f64],
    rep: &GraphRep,
    state: &[Complex64],
    cap: &Capacity,
) -> Result<Vec<Complex64>> {
    let h = GraphHamiltonian::new(rep, coeffs, cap)?;
    if state.len() != LinearOperator::<Complex64>::dim(&h) {
        return Err(Error::invalid(format!(
            "state has length {}, expected {}",
            state.len(),
            LinearOperator::<Complex64>::dim(&h)
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    h.apply(state, &mut out);
    Ok(out)
}

/// Dense `Σ_α J_α O_α`.
pub fn build_dense(coeffs: &[f64], rep: &GraphRep, cap: &Capacity) -> Result<DMatrix<Complex64>> {
    cap.check_dense_qubits(rep.num_qubits())?;
    if coeffs.len() != rep.num_qubits() {
        return Err(Error::invalid("coefficient count differs from vertex count"));
    }
    let dim = 1usize << rep.num_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for (&c, p) in coeffs.iter().zip(&rep.strings) {
        for t in 0..dim as u64 {
            let s = (t ^ p.x_mask) as usize;
            let v = if p.sign_at(t) { -c } else { c };
            m[(t as usize, s)] += Complex64::new(v, 0.0);
        }
    }
    Ok(m)
}

/// A general Hermitian sum of Pauli strings with complex coefficients.
#[derive(Debug, Clone)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, coeff: Complex64, p: PauliString) -> Result<()> {
        if p.num_qubits != self.num_qubits {
            return Err(Error::invalid("Pauli string size differs from the sum"));
        }
        self.terms.push((coeff, p));
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn to_dense(&self, cap: &Capacity) -> Result<DMatrix<Complex64>> {
        cap.check_dense_qubits(self.num_qubits)?;
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in &self.terms {
            let c = c * p.phase();
            for t in 0..dim as u64 {
                let s = (t ^ p.x_mask) as usize;
                m[(t as usize, s)] += if p.sign_at(t) { -c } else { c };
            }
        }
        Ok(m)
    }

    /// `⟨ψ|Σ|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply(psi, &mut out);
        crate::spectral::dot(psi, &out)
    }
}

impl LinearOperator<Complex64> for PauliSum {
    fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let terms: Vec<(Complex64, PauliString)> =
            self.terms.iter().map(|(c, p)| (c * p.phase(), *p)).collect();
        y.par_chunks_mut(MATVEC_CHUNK).enumerate().for_each(|(ci, chunk)| {
            let base = (ci * MATVEC_CHUNK) as u64;
            for (off, out) in chunk.iter_mut().enumerate() {
                let t = base + off as u64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, p) in &terms {
                    let v = x[(t ^ p.x_mask) as usize];
                    acc += if p.sign_at(t) { -c * v } else { c * v };
                }
                *out = acc;
            }
        });
    }
}
