use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default edge penalty; any value above 1 makes ground states maximum
/// independent sets.
pub const DEFAULT_PENALTY: f64 = 2.0;

pub(crate) fn check_penalty(penalty: f64) -> Result<()> {
    if penalty > 1.0 && penalty.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("edge penalty must exceed 1, got {penalty}")))
    }
}

/// `-Σ n_i + U Σ_(i,j)∈E n_i n_j`
pub fn classical_energy(graph: &Graph, assignment: &[bool], penalty: f64) -> Result<f64> {
    check_penalty(penalty)?;
    if assignment.len() != graph.vertex_count() {
        return Err(Error::LengthMismatch { expected: graph.vertex_count(), actual: assignment.len() });
    }
    let occupied = assignment.iter().filter(|&&b| b).count() as f64;
    let violated = graph
        .edges()
        .iter()
        .filter(|&&(u, v)| assignment[u] && assignment[v])
        .count() as f64;
    Ok(-occupied + penalty * violated)
}

/// The same cost in spin variables `z = 2n - 1`:
/// `Σ J_ij z_i z_j + Σ h_i z_i + constant`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingForm {
    pub couplers: Vec<((usize, usize), f64)>,
    pub fields: Vec<f64>,
    pub constant: f64,
}

impl IsingForm {
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let pair: f64 = self
            .couplers
            .iter()
            .map(|&((i, j), c)| c * f64::from(spins[i]) * f64::from(spins[j]))
            .sum();
        let field: f64 = self.fields.iter().zip(spins).map(|(h, &z)| h * f64::from(z)).sum();
        pair + field + self.constant
    }

    pub fn energy_of_bits(&self, bits: &[bool]) -> f64 {
        let spins: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
        self.energy(&spins)
    }
}

/// `J_ij = U/4` on edges, `h_i = U·deg(i)/4 − 1/2`, `constant = −n/2 + U·|E|/4`.
pub fn to_ising(graph: &Graph, penalty: f64) -> Result<IsingForm> {
    check_penalty(penalty)?;
    let quarter = penalty / 4.0;
    Ok(IsingForm {
        couplers: graph.edges().iter().map(|&e| (e, quarter)).collect(),
        fields: (0..graph.vertex_count())
            .map(|v| quarter * graph.degree(v) as f64 - 0.5)
            .collect(),
        constant: -(graph.vertex_count() as f64) / 2.0 + quarter * graph.edge_count() as f64,
    })
}
