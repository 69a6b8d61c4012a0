//! Extremal eigenpairs of Hermitian operators.
//!
//! [`extreme_eigenvalue`] runs Lanczos with full reorthogonalization and thick
//! restarts that keep the half of the Ritz vectors nearest the wanted end.
//! When the basis would not fit the memory budget it switches to a two-pass
//! Lanczos that stores no basis and replays the recurrence for the Ritz
//! vector. Convergence is judged on the Ritz pair residual `‖A y − θ y‖`,
//! which is always recomputed with a real matvec before a result is returned. Small operators are densified and
//! diagonalized directly.
//!
//! All reductions use a fixed chunking so results are bit-identical for any
//! number of rayon threads.

use std::fmt::Debug;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::Capacity;
use crate::error::{Error, Result};
use crate::pauli::{GraphHamiltonian, GraphRep};
use crate::rng;

/// Field of the state vectors: `f64` for real-symmetric operators,
/// `Complex64` for general Hermitian ones.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + Debug {
    #[inline]
    fn conj(self) -> Self {
        self.conjugate()
    }
    #[inline]
    fn abs2(self) -> f64 {
        self.modulus_squared()
    }
    #[inline]
    fn re(self) -> f64 {
        self.real()
    }
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_real(x)
    }
    #[inline]
    fn times(self, x: f64) -> Self {
        self * Self::from_real(x)
    }
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// A Hermitian linear map applied matrix-free.
pub trait LinearOperator<T: Scalar>: Sync {
    fn dim(&self) -> usize;
    /// `y ← A x`. `y` is fully overwritten.
    fn apply(&self, x: &[T], y: &mut [T]);
}

/// Dense Hermitian matrix as an operator.
impl<T: Scalar> LinearOperator<T> for DMatrix<T> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (j, &xj) in x.iter().enumerate() {
                acc += self[(i, j)] * xj;
            }
            *yi = acc;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Largest,
    Smallest,
}

impl Which {
    pub fn opposite(self) -> Self {
        match self {
            Which::Largest => Which::Smallest,
            Which::Smallest => Which::Largest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lanczos,
    Dense,
}

#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    /// Residual tolerance relative to the largest Ritz value magnitude.
    pub tol: f64,
    /// Seed of the random start vector.
    pub seed: u64,
    /// Krylov basis length before a restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Operators up to this dimension are diagonalized densely.
    pub dense_threshold: usize,
    /// Upper bound on basis storage; shortens `max_basis` for huge operators.
    pub basis_memory_bytes: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            seed: rng::DEFAULT_SEED,
            max_basis: 200,
            max_restarts: 200,
            dense_threshold: 512,
            basis_memory_bytes: 1 << 30,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigReport<T> {
    pub eigenvalue: f64,
    #[serde(skip)]
    pub vector: Vec<T>,
    pub residual_norm: f64,
    /// Matrix-vector products used (the dimension, for the dense path).
    pub iterations: usize,
    pub method: Method,
}

/// Largest or smallest eigenpair of a Hermitian operator.
pub fn extreme_eigenvalue<T: Scalar, Op: LinearOperator<T> + ?Sized>(
    op: &Op,
    which: Which,
    opts: &EigOptions,
) -> Result<EigReport<T>> {
    Ok(extremes(op, &[which], opts)?.remove(0))
}

/// Largest and smallest eigenpairs. Operators too large for a stored Krylov
/// basis share a single Lanczos run between the two ends.
pub fn extreme_pair<T: Scalar, Op: LinearOperator<T> + ?Sized>(
    op: &Op,
    opts: &EigOptions,
) -> Result<(EigReport<T>, EigReport<T>)> {
    let mut both = extremes(op, &[Which::Largest, Which::Smallest], opts)?;
    let smallest = both.remove(1);
    Ok((both.remove(0), smallest))
}

fn extremes<T: Scalar, Op: LinearOperator<T> + ?Sized>(
    op: &Op,
    whiches: &[Which],
    opts: &EigOptions,
) -> Result<Vec<EigReport<T>>> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::invalid("operator has dimension 0"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if n <= opts.dense_threshold {
        return whiches.iter().map(|&w| dense_extreme(op, w)).collect();
    }
    let max_basis = opts
        .max_basis
        .min(opts.basis_memory_bytes / (n * std::mem::size_of::<T>()).max(1))
        .min(n)
        .max(8.min(n));
    if max_basis < opts.max_basis.min(n) {
        two_pass_lanczos(op, whiches, opts)
    } else {
        whiches.iter().map(|&w| lanczos(op, w, opts, max_basis)).collect()
    }
}

/// Both extremal eigenvalues of a dense Hermitian matrix, ascending order.
pub fn dense_spectrum<T: Scalar>(m: &DMatrix<T>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn densify<T: Scalar, Op: LinearOperator<T> + ?Sized>(op: &Op) -> DMatrix<T> {
    let n = op.dim();
    let mut m = DMatrix::<T>::zeros(n, n);
    let mut e = vec![T::zero(); n];
    let mut col = vec![T::zero(); n];
    for j in 0..n {
        e[j] = T::one();
        op.apply(&e, &mut col);
        e[j] = T::zero();
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    // symmetrize away rounding asymmetry
    let mt = m.adjoint();
    (m + mt) * T::of(0.5)
}

fn dense_extreme<T: Scalar, Op: LinearOperator<T> + ?Sized>(op: &Op, which: Which) -> Result<EigReport<T>> {
    let n = op.dim();
    let eig = densify(op).symmetric_eigen();
    let idx = pick(eig.eigenvalues.as_slice(), which);
    let theta = eig.eigenvalues[idx];
    let vector: Vec<T> = eig.eigenvectors.column(idx).iter().copied().collect();
    let residual_norm = residual(op, &vector, theta);
    Ok(EigReport {
        eigenvalue: theta,
        vector,
        residual_norm,
        iterations: n,
        method: Method::Dense,
    })
}

fn pick(values: &[f64], which: Which) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        let better = match which {
            Which::Largest => v > values[best],
            Which::Smallest => v < values[best],
        };
        if better {
            best = i;
        }
    }
    best
}

fn lanczos<T: Scalar, Op: LinearOperator<T> + ?Sized>(
    op: &Op,
    which: Which,
    opts: &EigOptions,
    max_basis: usize,
) -> Result<EigReport<T>> {
    let n = op.dim();
    let start = start_vector(n, opts.seed);
    let keep = (max_basis / 2).max(1);

    let mut matvecs = 0usize;
    let mut best: Option<(f64, f64)> = None;
    let mut basis: Vec<Vec<T>> = vec![start];
    // projected matrix Vᵀ A V; after a thick restart it has an arrow shape
    let mut proj: Vec<Vec<f64>> = Vec::new();
    let mut w = vec![T::zero(); n];
    let mut since_check = 0usize;

    for _cycle in 0..opts.max_restarts {
        let outcome = loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let h = orthogonalize(&basis, &mut w);
            for (i, &hi) in h.iter().enumerate().take(j) {
                proj[i].push(hi);
            }
            let mut row = h[..j].to_vec();
            row.push(h[j]);
            proj.push(row);
            let beta = norm(&w);
            let k = basis.len();
            let full = k >= max_basis;
            let scale_hint = h.iter().fold(0.0f64, |m, a| m.max(a.abs())) + beta;
            let breakdown = beta <= 1e-13 * scale_hint.max(f64::MIN_POSITIVE) || k == n;
            since_check += 1;
            if full || breakdown || since_check >= 5 || k <= 20 {
                since_check = 0;
                let (values, vectors) = projected_eigen(&proj);
                let idx = pick(&values, which);
                let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let tol = opts.tol * scale.max(f64::MIN_POSITIVE);
                if breakdown || beta * vectors[idx][k - 1].abs() <= tol {
                    let y = combine(&basis, &vectors[idx]);
                    let res = residual(op, &y, values[idx]);
                    matvecs += 1;
                    if res <= tol {
                        return Ok(EigReport {
                            eigenvalue: values[idx],
                            vector: y,
                            residual_norm: res,
                            iterations: matvecs,
                            method: Method::Lanczos,
                        });
                    }
                    keep_best(&mut best, values[idx], res);
                    if breakdown {
                        // invariant subspace without the wanted accuracy
                        basis = vec![y];
                        proj.clear();
                        break None;
                    }
                }
                if full {
                    keep_best(&mut best, values[idx], beta * vectors[idx][k - 1].abs());
                    break Some((beta, values, vectors));
                }
            }
            let inv = 1.0 / beta;
            basis.push(w.iter().map(|&x| x.times(inv)).collect());
        };
        let Some((beta, values, vectors)) = outcome else { continue };

        // keep the `keep` Ritz vectors nearest the wanted end
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| match which {
            Which::Largest => values[b].total_cmp(&values[a]),
            Which::Smallest => values[a].total_cmp(&values[b]),
        });
        order.truncate(keep);
        let coeffs: Vec<Vec<f64>> = order.iter().map(|&i| vectors[i].clone()).collect();
        rotate_basis(&mut basis, &coeffs);
        let inv = 1.0 / beta;
        basis.push(w.iter().map(|&x| x.times(inv)).collect());
        // the coupling column to the new vector is filled in by the next step
        proj = order
            .iter()
            .enumerate()
            .map(|(r, &i)| {
                let mut row = vec![0.0; order.len()];
                row[r] = values[i];
                row
            })
            .collect();
    }

    let (estimate, residual) = best.unwrap_or((f64::NAN, f64::INFINITY));
    Err(Error::NonConvergence {
        iterations: matvecs,
        estimate,
        residual,
    })
}

fn start_vector<T: Scalar>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = rng::seeded(seed);
    let mut start: Vec<T> = (0..n)
        .map(|_| T::of(StandardNormal.sample(&mut rng)))
        .collect();
    normalize(&mut start);
    start
}

/// One step of the three-term recurrence: leaves the unnormalized next
/// direction in `w` and returns `(α_j, β_j)`.
fn recurrence_step<T: Scalar, Op: LinearOperator<T> + ?Sized>(
    op: &Op,
    v: &[T],
    v_prev: &[T],
    beta_prev: f64,
    w: &mut [T],
) -> (f64, f64) {
    op.apply(v, w);
    if beta_prev != 0.0 {
        axpy(-beta_prev, v_prev, w);
    }
    let mut alpha = dot(v, w).re();
    axpy(-alpha, v, w);
    // local correction against the current direction
    let fix = dot(v, w).re();
    axpy(-fix, v, w);
    alpha += fix;
    (alpha, norm(w))
}

/// Lanczos without stored basis for operators whose Krylov basis does not fit
/// the memory budget. The first pass runs the recurrence and tracks the wanted
/// Ritz values of the tridiagonal matrix; once their residual estimates are
/// small the recurrence is replayed from the same start to assemble the Ritz
/// vectors, and the true residuals decide. Loss of orthogonality only
/// duplicates converged Ritz values, so the extreme ones stay correct.
fn two_pass_lanczos<T: Scalar, Op: LinearOperator<T> + ?Sized>(
    op: &Op,
    whiches: &[Which],
    opts: &EigOptions,
) -> Result<Vec<EigReport<T>>> {
    let n = op.dim();
    let start: Vec<T> = start_vector(n, opts.seed);
    let max_steps = opts.max_basis.saturating_mul(opts.max_restarts).max(1);
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut v = start.clone();
    let mut v_prev = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut matvecs = 0usize;
    let mut done: Vec<Option<EigReport<T>>> = whiches.iter().map(|_| None).collect();
    let mut best: Vec<Option<(f64, f64)>> = vec![None; whiches.len()];
    let mut target = 1.0;

    while alpha.len() < max_steps {
        let (a, b) = recurrence_step(op, &v, &v_prev, beta.last().copied().unwrap_or(0.0), &mut w);
        matvecs += 1;
        alpha.push(a);
        beta.push(b);
        let k = alpha.len();
        let breakdown = b <= 1e-13 * (a.abs() + b).max(f64::MIN_POSITIVE) || k == n;
        if k % 10 == 0 || breakdown || k == max_steps || k <= 10 {
            let off = &beta[..k - 1];
            let lo = tridiagonal_extreme(&alpha, off, Which::Smallest);
            let hi = tridiagonal_extreme(&alpha, off, Which::Largest);
            let tol = opts.tol * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
            let mut pending = Vec::new();
            let mut ready = true;
            for (t, &which) in whiches.iter().enumerate() {
                if done[t].is_some() {
                    continue;
                }
                let theta = if which == Which::Largest { hi } else { lo };
                let s = tridiagonal_vector(&alpha, off, theta, which);
                let estimate = b * s[k - 1].abs();
                keep_best(&mut best[t], theta, estimate);
                ready &= estimate <= target * tol;
                pending.push((t, theta, s));
            }
            if breakdown || ready {
                let coeffs: Vec<&[f64]> = pending.iter().map(|p| p.2.as_slice()).collect();
                let ys = replay(op, &start, &beta, &coeffs);
                matvecs += k - 1;
                for ((t, theta, _), y) in pending.into_iter().zip(ys) {
                    let res = residual(op, &y, theta);
                    matvecs += 1;
                    if res <= tol {
                        done[t] = Some(EigReport {
                            eigenvalue: theta,
                            vector: y,
                            residual_norm: res,
                            iterations: matvecs,
                            method: Method::Lanczos,
                        });
                    } else {
                        keep_best(&mut best[t], theta, res);
                    }
                }
                if done.iter().all(Option::is_some) {
                    return Ok(done.into_iter().flatten().collect());
                }
                if breakdown {
                    break;
                }
                target *= 0.1;
            }
        }
        let inv = 1.0 / b;
        std::mem::swap(&mut v_prev, &mut v);
        v.par_iter_mut().zip(w.par_iter()).for_each(|(x, &y)| *x = y.times(inv));
    }

    let failed = done.iter().position(Option::is_none).unwrap_or(0);
    let (estimate, residual) = best[failed].unwrap_or((f64::NAN, f64::INFINITY));
    Err(Error::NonConvergence {
        iterations: matvecs,
        estimate,
        residual,
    })
}

/// `Σ_j s_j v_j` for each coefficient vector, over the Lanczos directions
/// regenerated from `start`.
fn replay<T: Scalar, Op: LinearOperator<T> + ?Sized>(
    op: &Op,
    start: &[T],
    beta: &[f64],
    coeffs: &[&[f64]],
) -> Vec<Vec<T>> {
    let n = start.len();
    let steps = coeffs.first().map_or(0, |s| s.len());
    let mut ys: Vec<Vec<T>> = coeffs
        .iter()
        .map(|s| start.iter().map(|&x| x.times(s[0])).collect())
        .collect();
    let mut v = start.to_vec();
    let mut v_prev = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    for j in 0..steps.saturating_sub(1) {
        let beta_prev = if j == 0 { 0.0 } else { beta[j - 1] };
        recurrence_step(op, &v, &v_prev, beta_prev, &mut w);
        let inv = 1.0 / beta[j];
        std::mem::swap(&mut v_prev, &mut v);
        v.par_iter_mut().zip(w.par_iter()).for_each(|(x, &y)| *x = y.times(inv));
        for (y, s) in ys.iter_mut().zip(coeffs) {
            axpy(s[j + 1], &v, y);
        }
    }
    ys.iter_mut().for_each(|y| normalize(y));
    ys
}

/// Number of eigenvalues of the tridiagonal matrix below `x` (Sturm count).
fn sturm_count(alpha: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in alpha.iter().enumerate() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = a - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (a.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Extreme eigenvalue of the symmetric tridiagonal matrix by bisection.
fn tridiagonal_extreme(alpha: &[f64], off: &[f64], which: Which) -> f64 {
    let m = alpha.len();
    let radius = |i: usize| {
        (if i > 0 { off[i - 1].abs() } else { 0.0 }) + (if i + 1 < m { off[i].abs() } else { 0.0 })
    };
    let mut lo = (0..m).map(|i| alpha[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..m).map(|i| alpha[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let want = match which {
        Which::Largest => m,
        Which::Smallest => 1,
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, off, mid) >= want {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unit eigenvector of the tridiagonal matrix for the extreme eigenvalue
/// `theta`, by inverse iteration on the definite shifted matrix.
fn tridiagonal_vector(alpha: &[f64], off: &[f64], theta: f64, which: Which) -> Vec<f64> {
    let m = alpha.len();
    let spread = alpha.iter().chain(off).fold(0.0f64, |acc, x| acc.max(x.abs())).max(f64::MIN_POSITIVE);
    // M = sign (T - σ) is positive definite, σ just beyond the extreme
    let (sign, sigma) = match which {
        Which::Largest => (-1.0, theta + 1e-12 * spread),
        Which::Smallest => (1.0, theta - 1e-12 * spread),
    };
    let diag: Vec<f64> = alpha.iter().map(|&a| sign * (a - sigma)).collect();
    let sub: Vec<f64> = off.iter().map(|&b| sign * b).collect();
    // LDLᵀ factorization
    let mut d = vec![0.0; m];
    let mut l = vec![0.0; m.saturating_sub(1)];
    let floor = f64::EPSILON * spread;
    d[0] = diag[0].max(floor);
    for i in 1..m {
        l[i - 1] = sub[i - 1] / d[i - 1];
        d[i] = (diag[i] - l[i - 1] * sub[i - 1]).max(floor);
    }
    let mut x = vec![1.0; m];
    for _ in 0..3 {
        for i in 1..m {
            x[i] -= l[i - 1] * x[i - 1];
        }
        for i in 0..m {
            x[i] /= d[i];
        }
        for i in (0..m.saturating_sub(1)).rev() {
            x[i] -= l[i] * x[i + 1];
        }
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    x
}

/// Orthogonalizes `w` against the basis by classical Gram-Schmidt, with a
/// second pass when the first removed most of its norm, and returns the
/// (real parts of the) projection coefficients.
fn orthogonalize<T: Scalar>(basis: &[Vec<T>], w: &mut [T]) -> Vec<f64> {
    let mut h = vec![0.0; basis.len()];
    // the two newest directions carry most of the projection; removing them
    // first makes the norm test below meaningful for the full passes
    for i in basis.len().saturating_sub(2)..basis.len() {
        let c = dot(&basis[i], w);
        axpy_t(-c, &basis[i], w);
        h[i] = c.re();
    }
    let mut before = norm(w);
    for pass in 0..2 {
        let c: Vec<T> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, &ci) in basis.iter().zip(&c) {
            axpy_t(-ci, v, w);
        }
        for (hi, ci) in h.iter_mut().zip(&c) {
            *hi += ci.re();
        }
        let after = norm(w);
        if pass == 0 && after > 0.7 * before {
            break;
        }
        before = after;
    }
    h
}

/// Eigenpairs of the projected matrix; `vectors[i]` is the `i`-th
/// eigenvector.
fn projected_eigen(proj: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = proj.len();
    let t = DMatrix::<f64>::from_fn(k, k, |i, j| 0.5 * (proj[i][j] + proj[j][i]));
    let eig = t.symmetric_eigen();
    let vectors = (0..k).map(|i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    (eig.eigenvalues.iter().copied().collect(), vectors)
}

/// Replaces the basis by `coeffs.len()` combinations of its vectors, in
/// place, one entry position at a time.
fn rotate_basis<T: Scalar>(basis: &mut Vec<Vec<T>>, coeffs: &[Vec<f64>]) {
    let m = basis.len();
    let k = coeffs.len();
    let n = basis[0].len();
    let mut old = vec![T::zero(); m];
    for t in 0..n {
        for (o, v) in old.iter_mut().zip(basis.iter()) {
            *o = v[t];
        }
        for (r, c) in coeffs.iter().enumerate() {
            basis[r][t] = old.iter().zip(c).fold(T::zero(), |acc, (&x, &ci)| acc + x.times(ci));
        }
    }
    basis.truncate(k);
}

/// Keeps the Ritz value with the smallest residual seen so far.
fn keep_best(best: &mut Option<(f64, f64)>, theta: f64, res: f64) {
    if best.is_none_or(|b| res < b.1) {
        *best = Some((theta, res));
    }
}

fn combine<T: Scalar>(basis: &[Vec<T>], coeffs: &[f64]) -> Vec<T> {
    let mut y = vec![T::zero(); basis[0].len()];
    for (v, &c) in basis.iter().zip(coeffs) {
        axpy(c, v, &mut y);
    }
    normalize(&mut y);
    y
}

/// `‖A y − θ y‖`.
pub fn residual<T: Scalar, Op: LinearOperator<T> + ?Sized>(op: &Op, y: &[T], theta: f64) -> f64 {
    let mut ay = vec![T::zero(); y.len()];
    op.apply(y, &mut ay);
    axpy(-theta, y, &mut ay);
    norm(&ay)
}

/// Both extremes of a graph Hamiltonian.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub norm: f64,
    pub largest: EigReport<f64>,
    pub smallest: EigReport<f64>,
}

impl NormReport {
    /// The extreme of larger magnitude and the sign of its eigenvalue.
    pub fn dominant(&self) -> (&EigReport<f64>, f64) {
        if self.largest.eigenvalue.abs() >= self.smallest.eigenvalue.abs() {
            (&self.largest, 1.0)
        } else {
            (&self.smallest, -1.0)
        }
    }

    pub fn residual(&self) -> f64 {
        self.largest.residual_norm.max(self.smallest.residual_norm)
    }
}

/// `max(|λ_max|, |λ_min|)` of a matrix-free graph Hamiltonian, with both
/// eigenpairs.
pub fn norm_report(h: &GraphHamiltonian<'_>, opts: &EigOptions) -> Result<NormReport> {
    let (largest, smallest) = extreme_pair::<f64, _>(h, opts)?;
    Ok(NormReport {
        norm: largest.eigenvalue.abs().max(smallest.eigenvalue.abs()),
        largest,
        smallest,
    })
}

/// Operator norm of `Σ_α J_α O_α` in the representation `rep`.
pub fn operator_norm(coeffs: &[f64], rep: &GraphRep, opts: &EigOptions, cap: &Capacity) -> Result<f64> {
    let h = GraphHamiltonian::new(rep, coeffs, cap)?;
    Ok(norm_report(&h, opts)?.norm)
}

const CHUNK: usize = 1 << 14;

/// `⟨a, b⟩ = Σ conj(a_i) b_i` with a thread-count-independent summation order.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let partial = |(x, y): (&[T], &[T])| {
        x.iter()
            .zip(y)
            .fold(T::zero(), |acc, (&p, &q)| acc + p.conj() * q)
    };
    let parts: Vec<T> = if a.len() > 4 * CHUNK {
        a.par_chunks(CHUNK).zip(b.par_chunks(CHUNK)).map(partial).collect()
    } else {
        a.chunks(CHUNK).zip(b.chunks(CHUNK)).map(partial).collect()
    };
    parts.into_iter().fold(T::zero(), |acc, p| acc + p)
}

pub fn norm<T: Scalar>(a: &[T]) -> f64 {
    let partial = |x: &[T]| x.iter().map(|v| v.abs2()).sum::<f64>();
    let parts: Vec<f64> = if a.len() > 4 * CHUNK {
        a.par_chunks(CHUNK).map(partial).collect()
    } else {
        a.chunks(CHUNK).map(partial).collect()
    };
    parts.into_iter().sum::<f64>().sqrt()
}

fn normalize<T: Scalar>(a: &mut [T]) {
    let nrm = norm(a);
    if nrm > 0.0 {
        let inv = 1.0 / nrm;
        a.par_iter_mut().for_each(|x| *x = x.times(inv));
    }
}

fn axpy<T: Scalar>(alpha: f64, x: &[T], y: &mut [T]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, &xi)| *yi += xi.times(alpha));
}

fn axpy_t<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, &xi)| *yi += alpha * xi);
}
