//! Instance hardness and benchmark statistics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::driver::SolveReport;
use crate::error::{Error, Result};
use crate::graph::{Graph, IndependentSet};
use crate::rng::stream_rng;
use crate::search::{mask_to_vec, BitGraph, DEFAULT_ENUMERATION_LIMIT};

pub const DEFAULT_BOOTSTRAP_SAMPLES: usize = 10_000;
/// Two-sided coverage of the bootstrap interval.
pub const CONFIDENCE: f64 = 0.90;

/// A maximum independent set, found by branch and bound.
pub fn max_independent_set(graph: &Graph) -> Result<IndependentSet> {
    let bits = BitGraph::new(graph, DEFAULT_ENUMERATION_LIMIT)?;
    IndependentSet::new(graph, mask_to_vec(bits.max_independent_set()))
}

/// Number of independent sets with exactly `size` vertices.
pub fn count_independent_sets(graph: &Graph, size: usize) -> Result<u128> {
    Ok(BitGraph::new(graph, DEFAULT_ENUMERATION_LIMIT)?.count_of_size(size))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardnessReport {
    pub mis_size: usize,
    pub degeneracy_at_mis: u128,
    pub degeneracy_below: u128,
    pub hardness: f64,
}

/// `H = D(α-1) / (α · D(α))`: how many near-optimal sets compete with each
/// optimal one.
pub fn hardness(graph: &Graph) -> Result<HardnessReport> {
    let bits = BitGraph::new(graph, DEFAULT_ENUMERATION_LIMIT)?;
    let alpha = bits.max_independent_set().count_ones() as usize;
    if alpha == 0 {
        return Err(Error::InvalidParameter("hardness is undefined for the empty graph".into()));
    }
    let at = bits.count_of_size(alpha);
    let below = bits.count_of_size(alpha - 1);
    Ok(HardnessReport {
        mis_size: alpha,
        degeneracy_at_mis: at,
        degeneracy_below: below,
        hardness: below as f64 / (alpha as f64 * at as f64),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmisEstimate {
    pub p_mis: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_runs: usize,
}

/// Fraction of runs reaching `optimum`, with a percentile bootstrap interval.
pub fn estimate_pmis(reports: &[SolveReport], optimum: usize, bootstrap_samples: usize, seed: u64) -> Result<PmisEstimate> {
    let hits: Vec<bool> = reports.iter().map(|r| r.size() == optimum).collect();
    estimate_success_rate(&hits, optimum, bootstrap_samples, seed)
}

/// Same as [`estimate_pmis`] on raw per-run outcomes.
pub fn estimate_success_rate(hits: &[bool], optimum: usize, bootstrap_samples: usize, seed: u64) -> Result<PmisEstimate> {
    if optimum == 0 {
        return Err(Error::InvalidParameter("optimum must be at least 1".into()));
    }
    if hits.is_empty() {
        return Err(Error::InsufficientData("no runs to estimate from".into()));
    }
    if bootstrap_samples == 0 {
        return Err(Error::InvalidParameter("bootstrap_samples must be positive".into()));
    }
    let n = hits.len();
    let p = hits.iter().filter(|&&h| h).count() as f64 / n as f64;
    let mut rng = stream_rng(seed, 0);
    let mut means: Vec<f64> = (0..bootstrap_samples)
        .map(|_| (0..n).filter(|_| hits[rng.gen_range(0..n)]).count() as f64 / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - CONFIDENCE) / 2.0;
    let last = (bootstrap_samples - 1) as f64;
    let low = means[(tail * last).floor() as usize];
    let high = means[((1.0 - tail) * last).ceil() as usize];
    // Percentile intervals need not contain the point estimate on tiny samples.
    Ok(PmisEstimate { p_mis: p, ci_low: low.min(p), ci_high: high.max(p), n_runs: n })
}

/// Mean success rate over several instances, with a stratified bootstrap:
/// runs are resampled within each instance, then the per-instance rates are
/// averaged.
pub fn estimate_mean_success_rate(groups: &[Vec<bool>], bootstrap_samples: usize, seed: u64) -> Result<PmisEstimate> {
    if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InsufficientData("every instance needs at least one run".into()));
    }
    if bootstrap_samples == 0 {
        return Err(Error::InvalidParameter("bootstrap_samples must be positive".into()));
    }
    let rate = |hits: &mut dyn Iterator<Item = bool>, n: usize| hits.filter(|&h| h).count() as f64 / n as f64;
    let k = groups.len() as f64;
    let p = groups.iter().map(|g| rate(&mut g.iter().copied(), g.len())).sum::<f64>() / k;
    let mut rng = stream_rng(seed, 0);
    let mut means: Vec<f64> = (0..bootstrap_samples)
        .map(|_| {
            groups
                .iter()
                .map(|g| rate(&mut (0..g.len()).map(|_| g[rng.gen_range(0..g.len())]), g.len()))
                .sum::<f64>()
                / k
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - CONFIDENCE) / 2.0;
    let last = (bootstrap_samples - 1) as f64;
    let low = means[(tail * last).floor() as usize];
    let high = means[((1.0 - tail) * last).ceil() as usize];
    Ok(PmisEstimate {
        p_mis: p,
        ci_low: low.min(p),
        ci_high: high.max(p),
        n_runs: groups.iter().map(Vec::len).sum(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub c: f64,
    pub beta: f64,
    /// Sum of squared residuals in the transformed coordinates.
    pub residual: f64,
    pub used: usize,
    /// Points dropped because `P` was 0 or 1.
    pub excluded: usize,
}

/// Least-squares fit of `P = 1 - exp(-C H^-β)` via the linearization
/// `log(-log(1 - P)) = log C - β log H`.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(h, p)| *p > 0.0 && *p < 1.0 && *h > 0.0)
        .map(|&(h, p)| (h.ln(), (-(1.0 - p).ln()).ln()))
        .collect();
    let excluded = points.len() - usable.len();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 points with 0 < P < 1, have {} ({excluded} excluded)",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * n {
        return Err(Error::InsufficientData("all points share one hardness value".into()));
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = usable.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(ScalingFit { c: intercept.exp(), beta: -slope, residual, used: usable.len(), excluded })
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("correlation needs at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InsufficientData("zero variance".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_on_small_graphs() {
        let k3 = Graph::complete(3);
        assert_eq!(count_independent_sets(&k3, 0).unwrap(), 1);
        assert_eq!(count_independent_sets(&k3, 1).unwrap(), 3);
        let c5 = Graph::cycle(5);
        assert_eq!(count_independent_sets(&c5, 1).unwrap(), 5);
        assert_eq!(count_independent_sets(&c5, 2).unwrap(), 5);
        assert_eq!(count_independent_sets(&Graph::path(3), 2).unwrap(), 1);
    }

    #[test]
    fn hardness_examples() {
        let h = hardness(&Graph::complete(3)).unwrap();
        assert_eq!((h.mis_size, h.degeneracy_at_mis, h.degeneracy_below), (1, 3, 1));
        assert!((h.hardness - 1.0 / 3.0).abs() < 1e-15);
        assert!((hardness(&Graph::cycle(5)).unwrap().hardness - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hardness_limits() {
        assert!(matches!(hardness(&Graph::edgeless(41)), Err(Error::LimitExceeded { .. })));
        assert!(hardness(&Graph::edgeless(0)).is_err());
    }

    #[test]
    fn bootstrap_degenerate_cases() {
        let all = estimate_success_rate(&[true; 20], 3, 1000, 1).unwrap();
        assert_eq!((all.p_mis, all.ci_low, all.ci_high), (1.0, 1.0, 1.0));
        let none = estimate_success_rate(&[false; 20], 3, 1000, 1).unwrap();
        assert_eq!((none.p_mis, none.ci_low, none.ci_high), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bootstrap_interval_is_reasonable() {
        let hits: Vec<bool> = (0..100).map(|i| i % 4 == 0).collect();
        let e = estimate_success_rate(&hits, 1, DEFAULT_BOOTSTRAP_SAMPLES, 5).unwrap();
        assert_eq!(e.p_mis, 0.25);
        // Normal approximation: 1.645 * sqrt(p(1-p)/n) ≈ 0.071.
        assert!((e.ci_high - e.ci_low - 0.142).abs() < 0.03, "{e:?}");
        assert!(e.ci_low <= e.p_mis && e.p_mis <= e.ci_high);
    }

    #[test]
    fn stratified_mean_matches_single_group() {
        let hits: Vec<bool> = (0..40).map(|i| i % 5 < 2).collect();
        let one = estimate_mean_success_rate(&[hits.clone()], 2000, 3).unwrap();
        assert_eq!(one.p_mis, 0.4);
        let two = estimate_mean_success_rate(&[hits, vec![true; 10]], 2000, 3).unwrap();
        assert!((two.p_mis - 0.7).abs() < 1e-12);
        assert!(two.ci_low <= 0.7 && 0.7 <= two.ci_high);
        // Half the width: the second instance has no variance.
        assert!(two.ci_high - two.ci_low < one.ci_high - one.ci_low);
        assert!(estimate_mean_success_rate(&[vec![]], 10, 0).is_err());
    }

    #[test]
    fn fit_recovers_planted_law() {
        let (c, beta) = (2.0, 0.7);
        let pts: Vec<(f64, f64)> = [1.5, 3.0, 10.0, 40.0, 200.0]
            .iter()
            .map(|&h: &f64| (h, 1.0 - (-c * h.powf(-beta)).exp()))
            .collect();
        let fit = fit_scaling(&pts).unwrap();
        assert!((fit.c - c).abs() / c < 1e-6);
        assert!((fit.beta - beta).abs() / beta < 1e-6);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_scaling(&[(2.0, 0.3), (2.0, 0.4), (2.0, 0.5)]).is_err());
        let pts = [(1.0, 1.0), (2.0, 0.5), (4.0, 0.3), (8.0, 0.2), (16.0, 0.0)];
        let fit = fit_scaling(&pts).unwrap();
        assert_eq!((fit.used, fit.excluded), (3, 2));
        assert!(fit_scaling(&pts[..3]).is_err());
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&x, &[2.0, 4.0, 6.0, 8.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &[-1.0, -2.0, -3.0, -4.0]).unwrap() + 1.0).abs() < 1e-12);
        // By hand: means 2.5 and 2.5, sxy = 3.5, sxx = 5, syy = 5.
        let r = pearson(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
        assert!(pearson(&x, &[1.0; 4]).is_err());
        assert!(pearson(&x, &[1.0]).is_err());
    }

    #[test]
    fn oracle_matches_known_optima() {
        assert_eq!(max_independent_set(&Graph::cycle(7)).unwrap().size(), 3);
        assert_eq!(max_independent_set(&Graph::complete(5)).unwrap().size(), 1);
        assert_eq!(max_independent_set(&Graph::edgeless(0)).unwrap().size(), 0);
    }
}
