//! Graph semidefinite programs: the Lovász theta function and the degree-2
//! relaxations for the ground energy of `H = Σ J_α O_α` and for `H²`, where
//! the `O_α` are involutions that anticommute along the edges of a graph and
//! commute otherwise.
//!
//! All programs are solved in real-symmetric form; a complex optimum can be
//! replaced by its real part without changing the objective.

mod solver;

use nalgebra::DMatrix;

pub use solver::{solve_sdp, Constraint, SdpOptions, SdpProblem, SdpReport, SdpStatus, Sense};

use crate::error::{Error, Result};
use crate::graph::Graph;

fn check_coeffs(g: &Graph, j: &[f64]) -> Result<()> {
    if g.num_vertices() == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    if j.len() != g.num_vertices() {
        return Err(Error::invalid(format!(
            "{} coefficients for {} vertices",
            j.len(),
            g.num_vertices()
        )));
    }
    if j.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("coefficients must be finite"));
    }
    Ok(())
}

fn edge_zeros(g: &Graph, offset: usize) -> impl Iterator<Item = Constraint> + '_ {
    g.edges()
        .into_iter()
        .map(move |(u, v)| Constraint::entry(u + offset, v + offset, 0.0))
}

/// ϑ(G) = max Σ_{αβ} M_{αβ} over PSD `M` with unit trace and zeros on edges.
pub fn lovasz_theta(g: &Graph) -> Result<SdpReport> {
    lovasz_theta_with(g, &SdpOptions::default())
}

pub fn lovasz_theta_with(g: &Graph, opts: &SdpOptions) -> Result<SdpReport> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    let mut constraints = vec![Constraint {
        terms: (0..n).map(|i| (i, i, 1.0)).collect(),
        rhs: 1.0,
    }];
    constraints.extend(edge_zeros(g, 0));
    solve_sdp(
        &SdpProblem {
            dim: n,
            constraints,
            objective: DMatrix::from_element(n, n, 1.0),
            sense: Sense::Maximize,
        },
        opts,
    )
}

/// max Σ_{αβ} M_{αβ} J_α J_β over PSD `M` with unit diagonal and zeros on
/// edges: an upper bound on the largest eigenvalue of `H²`.
pub fn graph_sdp_h2(g: &Graph, j: &[f64]) -> Result<SdpReport> {
    graph_sdp_h2_with(g, j, &SdpOptions::default())
}

pub fn graph_sdp_h2_with(g: &Graph, j: &[f64], opts: &SdpOptions) -> Result<SdpReport> {
    check_coeffs(g, j)?;
    let n = g.num_vertices();
    let mut constraints: Vec<Constraint> = (0..n).map(|i| Constraint::entry(i, i, 1.0)).collect();
    constraints.extend(edge_zeros(g, 0));
    let v = nalgebra::DVector::from_column_slice(j);
    solve_sdp(
        &SdpProblem {
            dim: n,
            constraints,
            objective: &v * v.transpose(),
            sense: Sense::Maximize,
        },
        opts,
    )
}

/// min Σ_α J_α v_α over PSD `N = [[1, vᵀ], [v, M]]` with `M` as in
/// [`graph_sdp_h2`]: a lower bound on the ground energy of `H`. The report's
/// `vector_part` holds `v`.
pub fn graph_sdp_h(g: &Graph, j: &[f64]) -> Result<SdpReport> {
    graph_sdp_h_with(g, j, &SdpOptions::default())
}

pub fn graph_sdp_h_with(g: &Graph, j: &[f64], opts: &SdpOptions) -> Result<SdpReport> {
    check_coeffs(g, j)?;
    let n = g.num_vertices();
    let mut constraints: Vec<Constraint> = (0..=n).map(|i| Constraint::entry(i, i, 1.0)).collect();
    constraints.extend(edge_zeros(g, 1));
    let mut c = DMatrix::zeros(n + 1, n + 1);
    for (a, &ja) in j.iter().enumerate() {
        c[(0, a + 1)] = 0.5 * ja;
        c[(a + 1, 0)] = 0.5 * ja;
    }
    let mut report = solve_sdp(
        &SdpProblem {
            dim: n + 1,
            constraints,
            objective: c,
            sense: Sense::Minimize,
        },
        opts,
    )?;
    report.vector_part = Some((1..=n).map(|a| report.matrix[(0, a)]).collect());
    Ok(report)
}
