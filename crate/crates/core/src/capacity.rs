//! Size limits for the exponential-cost routines.

use crate::error::{Error, Result};

/// Environment variable that overrides the matrix-free qubit limit.
pub const CAPACITY_ENV: &str = "GRAMOPS_CAPACITY";

/// Limits on instance sizes. Every routine whose cost is exponential in the
/// instance size checks against one of these before allocating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    /// Largest qubit count for matrix-free state vectors.
    pub max_qubits: usize,
    /// Largest qubit count for which a dense operator is materialized.
    pub max_dense_qubits: usize,
    /// Largest graph handled by the exact independence solver.
    pub max_independence_vertices: usize,
    /// Largest number of graph vertices created from combinatorial families.
    pub max_graph_vertices: usize,
    /// Largest number of couplings in a generated instance.
    pub max_terms: usize,
}

impl Default for Capacity {
    fn default() -> Self {
        Self {
            max_qubits: 26,
            max_dense_qubits: 14,
            max_independence_vertices: 64,
            max_graph_vertices: 20_000,
            max_terms: 1_000_000,
        }
    }
}

impl Capacity {
    /// Defaults, with `max_qubits` replaced by `GRAMOPS_CAPACITY` when set.
    pub fn from_env() -> Result<Self> {
        let mut cap = Self::default();
        if let Ok(raw) = std::env::var(CAPACITY_ENV) {
            cap.max_qubits = raw.trim().parse().map_err(|_| {
                Error::parse(CAPACITY_ENV, format!("expected a qubit count, got {raw:?}"))
            })?;
        }
        Ok(cap)
    }

    pub(crate) fn check_qubits(&self, n: usize) -> Result<()> {
        check("qubit count", n, self.max_qubits)
    }

    pub(crate) fn check_dense_qubits(&self, n: usize) -> Result<()> {
        check("dense qubit count", n, self.max_dense_qubits)
    }
}

pub(crate) fn check(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::Capacity {
            what,
            actual,
            limit,
        })
    } else {
        Ok(())
    }
}
