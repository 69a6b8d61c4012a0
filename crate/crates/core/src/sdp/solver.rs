//! Operator-splitting solver for small dense SDPs.
//!
//! Solves `min/max ⟨C, X⟩` over symmetric `X ⪰ 0` subject to linear equality
//! constraints on the entries of `X`, by ADMM on the splitting
//! `X ∈ affine set`, `Z ∈ PSD cone`, `X = Z`:
//!
//! ```text
//! X ← Π_A(Z − U − C/ρ)
//! X̂ ← a·X + (1 − a)·Z
//! Z ← Π_PSD(X̂ + U)
//! U ← U + X̂ − Z
//! ```
//!
//! The affine projection is exact: constraints are grouped into connected
//! components by shared entries and each group is projected with its own
//! Gram pseudo-inverse. The PSD projection clips a full symmetric
//! eigendecomposition.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// `Σ w · X_ij = rhs`. Both `(i, j)` and `(j, i)` name the same entry of the
/// symmetric variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    /// `X_ij = value`.
    pub fn entry(i: usize, j: usize, value: f64) -> Self {
        Self {
            terms: vec![(i, j, 1.0)],
            rhs: value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub dim: usize,
    pub constraints: Vec<Constraint>,
    /// Symmetric cost matrix `C`.
    pub objective: DMatrix<f64>,
    pub sense: Sense,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    /// Scale-relative primal and dual residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation factor `a`.
    pub relaxation: f64,
    /// Initial penalty `ρ`; adapted by residual balancing.
    pub rho: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200_000,
            relaxation: 1.6,
            rho: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Converged,
    MaxIter,
    InfeasibleDetected,
}

#[derive(Debug, Clone, Serialize)]
pub struct SdpReport {
    pub objective: f64,
    /// Final variable: the PSD iterate projected back onto the affine set, so
    /// every equality constraint holds to rounding.
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector_part: Option<Vec<f64>>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: SdpStatus,
}

impl SdpReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Rows of the constraint operator in scaled-vectorized coordinates, where
/// off-diagonal entries carry a factor `√2` so that the Euclidean projection
/// equals the Frobenius one.
struct AffineProjector {
    groups: Vec<Group>,
}

enum Group {
    /// A single constraint on a single entry: assign it.
    Fixed { i: usize, j: usize, value: f64 },
    Dense {
        coords: Vec<(usize, usize)>,
        /// `rows[k][c]` is the coefficient of constraint `k` on `coords[c]`.
        rows: DMatrix<f64>,
        rhs: Vec<f64>,
        gram_pinv: DMatrix<f64>,
    },
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn scale_of(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        SQRT2
    }
}

impl AffineProjector {
    fn new(dim: usize, constraints: &[Constraint]) -> Result<Self> {
        let coord = |i: usize, j: usize| if i <= j { (i, j) } else { (j, i) };
        // merged coefficients per constraint on canonical coordinates
        let mut normalized: Vec<Vec<((usize, usize), f64)>> = Vec::with_capacity(constraints.len());
        for (k, c) in constraints.iter().enumerate() {
            let mut terms: Vec<((usize, usize), f64)> = Vec::new();
            for &(i, j, w) in &c.terms {
                if i >= dim || j >= dim {
                    return Err(Error::invalid(format!(
                        "constraint {k} references entry ({i},{j}) of a {dim}x{dim} variable"
                    )));
                }
                if !w.is_finite() {
                    return Err(Error::invalid(format!("constraint {k} has a non-finite coefficient")));
                }
                let key = coord(i, j);
                match terms.iter_mut().find(|(kk, _)| *kk == key) {
                    Some((_, acc)) => *acc += w,
                    None => terms.push((key, w)),
                }
            }
            terms.retain(|(_, w)| *w != 0.0);
            if terms.is_empty() {
                return Err(Error::invalid(format!("constraint {k} has no nonzero terms")));
            }
            if !c.rhs.is_finite() {
                return Err(Error::invalid(format!("constraint {k} has a non-finite right-hand side")));
            }
            normalized.push(terms);
        }

        // union-find over constraints sharing a coordinate
        let m = normalized.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut owner = std::collections::HashMap::new();
        for (k, terms) in normalized.iter().enumerate() {
            for (key, _) in terms {
                if let Some(&other) = owner.get(key) {
                    let (a, b) = (find(&mut parent, k), find(&mut parent, other));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                } else {
                    owner.insert(*key, k);
                }
            }
        }
        let mut members: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for k in 0..m {
            let r = find(&mut parent, k);
            members.entry(r).or_default().push(k);
        }

        let mut groups = Vec::with_capacity(members.len());
        for ks in members.into_values() {
            if ks.len() == 1 && normalized[ks[0]].len() == 1 {
                let ((i, j), w) = normalized[ks[0]][0];
                groups.push(Group::Fixed {
                    i,
                    j,
                    value: constraints[ks[0]].rhs / w,
                });
                continue;
            }
            let mut coords: Vec<(usize, usize)> = ks
                .iter()
                .flat_map(|&k| normalized[k].iter().map(|(key, _)| *key))
                .collect();
            coords.sort_unstable();
            coords.dedup();
            let mut rows = DMatrix::zeros(ks.len(), coords.len());
            for (r, &k) in ks.iter().enumerate() {
                for &(key, w) in &normalized[k] {
                    let c = coords.binary_search(&key).expect("coordinate collected");
                    // X_ij = svec_ij / s
                    rows[(r, c)] = w / scale_of(key.0, key.1);
                }
            }
            let gram = &rows * rows.transpose();
            let gram_pinv = gram
                .pseudo_inverse(1e-12)
                .map_err(|e| Error::invalid(format!("constraint Gram matrix: {e}")))?;
            groups.push(Group::Dense {
                coords,
                rows,
                rhs: ks.iter().map(|&k| constraints[k].rhs).collect(),
                gram_pinv,
            });
        }
        Ok(Self { groups })
    }

    fn project(&self, x: &mut DMatrix<f64>) {
        for g in &self.groups {
            match g {
                Group::Fixed { i, j, value } => {
                    x[(*i, *j)] = *value;
                    x[(*j, *i)] = *value;
                }
                Group::Dense {
                    coords,
                    rows,
                    rhs,
                    gram_pinv,
                } => {
                    let y = nalgebra::DVector::from_iterator(
                        coords.len(),
                        coords.iter().map(|&(i, j)| x[(i, j)] * scale_of(i, j)),
                    );
                    let r = rows * &y - nalgebra::DVector::from_column_slice(rhs);
                    let lambda = gram_pinv * r;
                    let step = rows.transpose() * lambda;
                    for (c, &(i, j)) in coords.iter().enumerate() {
                        let v = (y[c] - step[c]) / scale_of(i, j);
                        x[(i, j)] = v;
                        x[(j, i)] = v;
                    }
                }
            }
        }
    }
}

fn project_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut scaled = eig.eigenvectors.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        scaled.column_mut(k).scale_mut(lambda.max(0.0));
    }
    let mut out = scaled * eig.eigenvectors.transpose();
    symmetrize(&mut out);
    out
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

const WINDOW: usize = 1000;
const ADAPT_EVERY: usize = 50;
const ADAPT_UNTIL: usize = 20_000;

/// Solves an SDP by alternating projections with over-relaxation.
///
/// Non-convergence is not an error: the report carries `status = MaxIter`
/// and the last iterate. Stagnating primal residual over three consecutive
/// windows of 1000 iterations with stationary iterates is reported as
/// `InfeasibleDetected`.
pub fn solve_sdp(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpReport> {
    let n = problem.dim;
    if n == 0 {
        return Err(Error::invalid("SDP variable has dimension 0"));
    }
    if problem.objective.nrows() != n || problem.objective.ncols() != n {
        return Err(Error::invalid(format!(
            "objective is {}x{}, variable is {n}x{n}",
            problem.objective.nrows(),
            problem.objective.ncols()
        )));
    }
    if !(opts.tol > 0.0) || !(opts.rho > 0.0) || !(opts.relaxation > 0.0 && opts.relaxation < 2.0) {
        return Err(Error::invalid("need tol > 0, rho > 0 and relaxation in (0, 2)"));
    }
    let affine = AffineProjector::new(n, &problem.constraints)?;

    let mut cost = problem.objective.clone();
    symmetrize(&mut cost);
    if problem.sense == Sense::Maximize {
        cost = -cost;
    }

    let a = opts.relaxation;
    let mut rho = opts.rho;
    let mut z = DMatrix::<f64>::zeros(n, n);
    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut x;
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;

    let mut window_residuals: Vec<f64> = Vec::new();
    let mut rho_changed_in_window = false;

    for k in 1..=opts.max_iter {
        iterations = k;
        x = &z - &u - &cost / rho;
        affine.project(&mut x);
        let x_hat = &x * a + &z * (1.0 - a);
        let z_old = std::mem::replace(&mut z, project_psd(&(&x_hat + &u)));
        u += &x_hat - &z;

        let r_abs = (&x - &z).norm();
        let s_abs = rho * (&z - &z_old).norm();
        primal = r_abs / (1.0 + x.norm().max(z.norm()));
        dual = s_abs / (1.0 + rho * u.norm());
        if primal < opts.tol && dual < opts.tol {
            status = SdpStatus::Converged;
            break;
        }

        if k % ADAPT_EVERY == 0 && k <= ADAPT_UNTIL {
            if primal > 10.0 * dual && rho < 1e6 {
                rho *= 2.0;
                u /= 2.0;
                rho_changed_in_window = true;
            } else if dual > 10.0 * primal && rho > 1e-6 {
                rho /= 2.0;
                u *= 2.0;
                rho_changed_in_window = true;
            }
        }

        if k % WINDOW == 0 {
            if rho_changed_in_window {
                window_residuals.clear();
            }
            rho_changed_in_window = false;
            window_residuals.push(r_abs);
            let w = window_residuals.len();
            if w >= 4 && primal > 1e3 * opts.tol && dual < opts.tol {
                let stagnant = window_residuals[w - 4..]
                    .windows(2)
                    .all(|p| p[1] >= 0.999 * p[0]);
                if stagnant {
                    status = SdpStatus::InfeasibleDetected;
                    break;
                }
            }
        }
    }

    let mut matrix = z;
    affine.project(&mut matrix);
    symmetrize(&mut matrix);
    let objective = problem.objective.component_mul(&matrix).sum();
    Ok(SdpReport {
        objective,
        matrix,
        vector_part: None,
        primal_residual: primal,
        dual_residual: dual,
        iterations,
        status,
    })
}
