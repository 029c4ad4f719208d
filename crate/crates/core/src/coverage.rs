//! How much of `T^n` an ensemble of detector outputs covers.
//!
//! Each record is rotated into the anchor's basis; its last `n - 2`
//! coordinates (the tail) locate it on the sphere. Spread is summarized by
//! the trace of the tail covariance and compared against radius-matched
//! uniform draws.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{build_basis, dot, tail_coordinates, CorrelationValue, NormalizedVector, OrthonormalBasis};
use crate::rng::{par_map_indexed, StreamSeed};
use crate::tsphere::sample_tail;

pub const MIN_TRIALS: usize = 999;

/// One detector's standardized output and its correlation with the anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRecord {
    pub id: String,
    pub tag: String,
    pub vector: NormalizedVector,
    pub q_hat: CorrelationValue,
}

impl EnsembleRecord {
    pub fn new(id: impl Into<String>, tag: impl Into<String>, vector: NormalizedVector, anchor: &NormalizedVector) -> Result<Self> {
        if vector.n() != anchor.n() {
            return Err(Error::DimensionMismatch(vector.n(), anchor.n()));
        }
        let q_hat = CorrelationValue::new(dot(vector.values(), anchor.values()))?;
        Ok(Self { id: id.into(), tag: tag.into(), vector, q_hat })
    }
}

/// Records with `q_lo <= q̂ <= q_hi`, in input order.
pub fn filter_band(records: &[EnsembleRecord], q_lo: f64, q_hi: f64) -> Result<Vec<EnsembleRecord>> {
    if !(-1.0 <= q_lo && q_lo <= q_hi && q_hi <= 1.0) {
        return Err(Error::InvalidParams(format!("band [{q_lo}, {q_hi}] is not inside [-1, 1]")));
    }
    let kept: Vec<EnsembleRecord> = records
        .iter()
        .filter(|r| (q_lo..=q_hi).contains(&r.q_hat.value()))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyBand { q_lo, q_hi });
    }
    Ok(kept)
}

fn require(records: &[EnsembleRecord], need: usize, anchor: &NormalizedVector) -> Result<()> {
    if records.len() < need {
        return Err(Error::TooFewRecords { got: records.len(), need });
    }
    if let Some(r) = records.iter().find(|r| r.vector.n() != anchor.n()) {
        return Err(Error::DimensionMismatch(r.vector.n(), anchor.n()));
    }
    Ok(())
}

fn tails(records: &[EnsembleRecord], basis: &OrthonormalBasis) -> Result<Vec<Vec<f64>>> {
    records
        .iter()
        .map(|r| tail_coordinates(&r.vector, basis).map(|(_, t)| t))
        .collect()
}

/// Sum of the per-coordinate sample variances (denominator `m - 1`).
pub fn trace_of_covariance(points: &[Vec<f64>]) -> f64 {
    let m = points.len();
    if m < 2 {
        return 0.0;
    }
    let d = points[0].len();
    let mut mean = vec![0.0; d];
    for p in points {
        mean.iter_mut().zip(p).for_each(|(a, x)| *a += x);
    }
    mean.iter_mut().for_each(|a| *a /= m as f64);
    let ss: f64 = points
        .iter()
        .map(|p| p.iter().zip(&mean).map(|(x, a)| (x - a) * (x - a)).sum::<f64>())
        .sum();
    ss / (m - 1) as f64
}

/// 2-D coordinates of an ensemble on its top principal axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscProjection {
    pub points: Vec<(f64, f64)>,
    pub explained_variance: (f64, f64),
    pub radius_bound: f64,
}

/// Principal axes of the centered rows of `points`, largest first, keeping
/// only axes with non-negligible variance (at most two).
fn principal_axes(points: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let m = points.len();
    let d = points[0].len();
    let mut mean = vec![0.0; d];
    for p in points {
        mean.iter_mut().zip(p).for_each(|(a, x)| *a += x / m as f64);
    }
    let centered = DMatrix::from_fn(m, d, |i, j| points[i][j] - mean[j]);
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut axes = Vec::new();
    let mut variances = Vec::new();
    for &k in order.iter().take(2) {
        let sigma = svd.singular_values[k];
        if sigma <= 1e-12 {
            break;
        }
        let mut axis: Vec<f64> = v_t.row(k).iter().copied().collect();
        // orient so the largest-magnitude entry is positive
        let pivot = axis.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            axis.iter_mut().for_each(|x| *x = -*x);
        }
        axes.push(axis);
        variances.push(sigma * sigma / (m - 1) as f64);
    }
    (axes, variances)
}

/// Projects tail points onto their own principal axes.
///
/// Axes come from the centered data; the points themselves are projected
/// uncentered, so every point stays inside the disc of radius
/// `max sqrt(1 - q̂²)` around the sphere's center.
pub fn project_tails(points: &[Vec<f64>]) -> (Vec<(f64, f64)>, (f64, f64)) {
    let (axes, variances) = principal_axes(points);
    let coord = |p: &[f64], k: usize| axes.get(k).map_or(0.0, |a| dot(a, p));
    let projected = points.iter().map(|p| (coord(p, 0), coord(p, 1))).collect();
    let ev = (
        variances.first().copied().unwrap_or(0.0),
        variances.get(1).copied().unwrap_or(0.0),
    );
    (projected, ev)
}

fn radius_bound(records: &[EnsembleRecord]) -> f64 {
    records
        .iter()
        .map(|r| (1.0 - r.q_hat.value().powi(2)).max(0.0).sqrt())
        .fold(0.0, f64::max)
}

/// Disc view of an ensemble around `anchor`.
pub fn disc_projection(records: &[EnsembleRecord], anchor: &NormalizedVector) -> Result<DiscProjection> {
    require(records, 3, anchor)?;
    let basis = build_basis(anchor, None)?;
    let points = tails(records, &basis)?;
    let (points, explained_variance) = project_tails(&points);
    Ok(DiscProjection { points, explained_variance, radius_bound: radius_bound(records) })
}

/// Trace of the sample covariance of the tail coordinates.
pub fn covariance_trace(records: &[EnsembleRecord], anchor: &NormalizedVector) -> Result<f64> {
    require(records, 2, anchor)?;
    covariance_trace_with_basis(records, &build_basis(anchor, None)?)
}

/// As [`covariance_trace`], in a caller-supplied basis for the anchor.
pub fn covariance_trace_with_basis(records: &[EnsembleRecord], basis: &OrthonormalBasis) -> Result<f64> {
    require(records, 2, basis.anchor())?;
    Ok(trace_of_covariance(&tails(records, basis)?))
}

/// Smallest correlation over all pairs of records (`+inf` below two).
pub fn min_pairwise_correlation(records: &[EnsembleRecord]) -> f64 {
    let mut min = f64::INFINITY;
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            min = min.min(dot(a.vector.values(), b.vector.values()));
        }
    }
    min
}

/// Per-tag record count and tail trace (trace is `None` below two records).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TagSummary {
    pub count: usize,
    pub trace: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub trace_detectors: f64,
    pub null_traces: Vec<f64>,
    pub null_mean: f64,
    pub null_expected: f64,
    pub p_value: f64,
    pub min_pairwise_corr: f64,
    pub band: (f64, f64),
    pub tags: BTreeMap<String, TagSummary>,
}

/// Radius-matched uniform draws: one tail per record, at that record's `q̂`.
pub fn null_ensemble_tails<R: rand::Rng + ?Sized>(q_hats: &[f64], dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    q_hats.iter().map(|&q| sample_tail(dim, q, rng)).collect()
}

/// One-tailed Monte Carlo test of whether the ensemble's tail covariance
/// trace is smaller than that of uniform draws on `T^n`.
pub fn coverage_significance(
    records: &[EnsembleRecord],
    anchor: &NormalizedVector,
    trials: usize,
    seed: u64,
) -> Result<CoverageReport> {
    require(records, 3, anchor)?;
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParams(format!("trials {trials} < {MIN_TRIALS}")));
    }
    let basis = build_basis(anchor, None)?;
    let points = tails(records, &basis)?;
    let observed = trace_of_covariance(&points);

    let q_hats: Vec<f64> = records.iter().map(|r| r.q_hat.value()).collect();
    let dim = anchor.n() - 2;
    let null_traces = par_map_indexed(StreamSeed::new(seed), trials, |_, rng| {
        trace_of_covariance(&null_ensemble_tails(&q_hats, dim, rng))
    });
    let at_most = null_traces.iter().filter(|&&t| t <= observed).count();
    let p_value = (1 + at_most) as f64 / (1 + trials) as f64;

    let min_pairwise_corr = min_pairwise_correlation(records);

    let mut groups: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for (r, p) in records.iter().zip(&points) {
        groups.entry(r.tag.clone()).or_default().push(p.clone());
    }
    let tags = groups
        .into_iter()
        .map(|(tag, pts)| {
            let trace = (pts.len() >= 2).then(|| trace_of_covariance(&pts));
            (tag, TagSummary { count: pts.len(), trace })
        })
        .collect();

    let null_mean = null_traces.iter().sum::<f64>() / trials as f64;
    let null_expected = q_hats.iter().map(|q| 1.0 - q * q).sum::<f64>() / q_hats.len() as f64;
    let band = q_hats.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &q| (lo.min(q), hi.max(q)));
    Ok(CoverageReport {
        trace_detectors: observed,
        null_traces,
        null_mean,
        null_expected,
        p_value,
        min_pairwise_corr,
        band,
        tags,
    })
}
