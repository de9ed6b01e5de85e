use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphMeta};
use crate::error::{Error, Result};

/// Unit-disk radius of union-jack instances, in units of the lattice spacing.
/// Connects nearest (a) and diagonal (√2·a) neighbours but not 2a pairs.
pub const UNION_JACK_RADIUS_RATIO: f64 = 1.5;

/// Relative slack on distance comparisons so √2·a never flickers.
pub const DISTANCE_RTOL: f64 = 1e-9;

/// Site-diluted square lattice with unit-disk connectivity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionJackSpec {
    pub side_length: usize,
    pub nodes: usize,
    /// Lattice spacing in micrometers.
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_spacing() -> f64 {
    5.45
}

impl UnionJackSpec {
    pub fn new(side_length: usize, nodes: usize, seed: u64) -> Self {
        UnionJackSpec { side_length, nodes, spacing: default_spacing(), seed }
    }

    pub fn validate(&self) -> Result<()> {
        let sites = self.side_length * self.side_length;
        if self.nodes > sites {
            return Err(Error::InvalidParameter(format!(
                "{} nodes do not fit on a {}x{} lattice",
                self.nodes, self.side_length, self.side_length
            )));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidParameter("lattice spacing must be positive".into()));
        }
        Ok(())
    }
}

/// Draws `nodes` distinct lattice sites uniformly at random and connects every
/// pair within `1.5 * spacing`.
pub fn generate_union_jack(spec: &UnionJackSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sites = spec.side_length * spec.side_length;
    let mut chosen = rand::seq::index::sample(&mut rng, sites, spec.nodes).into_vec();
    chosen.sort_unstable();
    let coords: Vec<[f64; 2]> = chosen
        .iter()
        .map(|&site| {
            let row = site / spec.side_length;
            let col = site % spec.side_length;
            [col as f64 * spec.spacing, row as f64 * spec.spacing]
        })
        .collect();
    let graph = build_unit_disk_graph(&coords, UNION_JACK_RADIUS_RATIO * spec.spacing)?;
    Ok(graph.with_meta(GraphMeta {
        seed: Some(spec.seed),
        spec: Some(serde_json::json!({
            "kind": "union-jack",
            "side_length": spec.side_length,
            "nodes": spec.nodes,
            "spacing": spec.spacing,
        })),
    }))
}

pub(crate) fn within(distance: f64, radius: f64) -> bool {
    distance <= radius * (1.0 + DISTANCE_RTOL)
}

pub(crate) fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Edge iff Euclidean distance ≤ `radius`; ties count as edges.
pub fn build_unit_disk_graph(coords: &[[f64; 2]], radius: f64) -> Result<Graph> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("unit-disk radius must be positive".into()));
    }
    let n = coords.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if within(distance(coords[u], coords[v]), radius) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)?.with_coords(coords.to_vec())
}

/// Correlation-threshold market graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssetGraphSpec {
    pub correlations: Vec<Vec<f64>>,
    /// Carried for the weighted variant; ignored when building MIS instances.
    #[serde(default)]
    pub expected_returns: Option<Vec<f64>>,
    pub threshold: f64,
}

const SYMMETRY_TOL: f64 = 1e-12;

/// One vertex per asset, edge `(i, j)` iff `|σ_ij| ≥ threshold`.
pub fn build_asset_graph(spec: &AssetGraphSpec) -> Result<Graph> {
    let sigma = &spec.correlations;
    let n = sigma.len();
    if sigma.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter("correlation matrix must be square".into()));
    }
    if !(0.0..=1.0).contains(&spec.threshold) {
        return Err(Error::InvalidParameter("threshold must lie in [0, 1]".into()));
    }
    for i in 0..n {
        if (sigma[i][i] - 1.0).abs() > SYMMETRY_TOL {
            return Err(Error::InvalidParameter(format!("diagonal entry {i} is not 1")));
        }
        for j in 0..n {
            let s = sigma[i][j];
            if !(-1.0..=1.0).contains(&s) {
                return Err(Error::InvalidParameter(format!("entry ({i}, {j}) outside [-1, 1]")));
            }
            if (s - sigma[j][i]).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "correlation matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if sigma[i][j].abs() >= spec.threshold {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn two_by_two_lattice_is_k4() {
        let g = generate_union_jack(&UnionJackSpec::new(2, 4, 11)).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn full_three_by_three_has_twenty_edges() {
        // Brute-force count of site pairs within 1.5 lattice units.
        let mut expected = 0;
        for a in 0..9 {
            for b in a + 1..9 {
                let (dx, dy) = ((a % 3) as f64 - (b % 3) as f64, (a / 3) as f64 - (b / 3) as f64);
                if dx * dx + dy * dy <= 2.25 {
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 20);
        let g = generate_union_jack(&UnionJackSpec::new(3, 9, 0)).unwrap();
        assert_eq!(g.edge_count(), expected);
    }

    #[test]
    fn fourteen_side_instance_has_requested_size() {
        let g = generate_union_jack(&UnionJackSpec::new(14, 137, 7)).unwrap();
        assert_eq!(g.vertex_count(), 137);
        assert_eq!(g.meta().unwrap().seed, Some(7));
    }

    #[test]
    fn too_many_nodes_is_rejected() {
        assert!(generate_union_jack(&UnionJackSpec::new(3, 10, 0)).is_err());
    }

    #[test]
    fn union_jack_is_deterministic() {
        let spec = UnionJackSpec::new(8, 40, 123);
        assert_eq!(generate_union_jack(&spec).unwrap(), generate_union_jack(&spec).unwrap());
    }

    #[test]
    fn unit_disk_boundary_is_inclusive() {
        let g = build_unit_disk_graph(&[[0.0, 0.0], [2.5, 0.0]], 2.5).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn collinear_points_form_a_path() {
        let g = build_unit_disk_graph(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], 1.0).unwrap();
        assert_eq!(g.edges(), Graph::path(3).edges());
    }

    #[test]
    fn unit_disk_edge_count_monotone_in_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<[f64; 2]> = (0..5).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let mut last = 0;
        for step in 1..=30 {
            let radius = step as f64 * 0.05;
            let brute = (0..5)
                .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
                .filter(|&(u, v)| distance(pts[u], pts[v]) <= radius * (1.0 + DISTANCE_RTOL))
                .count();
            let count = build_unit_disk_graph(&pts, radius).unwrap().edge_count();
            assert_eq!(count, brute);
            assert!(count >= last);
            last = count;
        }
        assert_eq!(last, 10);
    }

    #[test]
    fn nonpositive_radius_is_rejected() {
        assert!(build_unit_disk_graph(&[[0.0, 0.0]], 0.0).is_err());
    }

    fn spec(correlations: Vec<Vec<f64>>, threshold: f64) -> AssetGraphSpec {
        AssetGraphSpec { correlations, expected_returns: None, threshold }
    }

    #[test]
    fn identity_correlations_give_edgeless_graph() {
        let id = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        assert_eq!(build_asset_graph(&spec(id, 0.5)).unwrap().edge_count(), 0);
    }

    #[test]
    fn all_ones_correlations_give_triangle() {
        let g = build_asset_graph(&spec(vec![vec![1.0; 3]; 3], 0.5)).unwrap();
        assert_eq!(g.edges(), Graph::complete(3).edges());
    }

    #[test]
    fn asset_graph_thresholds_each_entry() {
        let sigma = vec![
            vec![1.0, 0.6, 0.2],
            vec![0.6, 1.0, 0.7],
            vec![0.2, 0.7, 1.0],
        ];
        let g = build_asset_graph(&spec(sigma, 0.5)).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn negative_correlations_count_by_magnitude() {
        let sigma = vec![vec![1.0, -0.8], vec![-0.8, 1.0]];
        assert_eq!(build_asset_graph(&spec(sigma, 0.5)).unwrap().edge_count(), 1);
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let sigma = vec![vec![1.0, 0.6], vec![0.5, 1.0]];
        assert!(build_asset_graph(&spec(sigma, 0.5)).is_err());
    }
}
