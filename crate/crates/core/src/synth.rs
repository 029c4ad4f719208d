//! Synthetic detector ensembles: clusters of tail directions on `T^n`.

use rand::Rng;
use rand_distr::{Normal, StandardNormal};

use crate::coverage::EnsembleRecord;
use crate::error::{Error, Result};
use crate::geometry::{build_basis, dot, NormalizedVector};
use crate::rng::StreamSeed;

pub const DEFAULT_Q_JITTER: f64 = 0.02;

const CENTER_TAG: u64 = 0x6365_6e74;
const RECORD_TAG: u64 = 0x7265_6364;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub anchor: NormalizedVector,
    pub target_q: f64,
    pub clusters: usize,
    /// Std of the isotropic noise added to each record's direction.
    pub within_spread: f64,
    /// Length of each cluster's center offset.
    pub between_spread: f64,
    pub count_per_cluster: usize,
    /// Std of the per-record accuracy around `target_q`.
    pub q_jitter: f64,
    pub seed: u64,
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InfeasibleConfig(msg));
        if !(self.target_q > 0.0 && self.target_q < 1.0) {
            return bad(format!("target q {} outside (0, 1)", self.target_q));
        }
        if self.clusters == 0 || self.count_per_cluster == 0 {
            return bad("need at least one cluster and one record per cluster".into());
        }
        if !(self.within_spread >= 0.0 && self.between_spread >= 0.0 && self.q_jitter >= 0.0) {
            return bad("spreads must be non-negative".into());
        }
        if self.within_spread == 0.0 && self.between_spread == 0.0 {
            return bad("within and between spreads are both zero; tail direction undefined".into());
        }
        Ok(())
    }
}

fn unit_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&z, &z).sqrt();
        if norm > 0.0 {
            return z.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Draws the ensemble described by `config`.
///
/// Record `j` of cluster `k` has accuracy `q̂ = target_q + N(0, jitter)`
/// (clamped into `(0, 1)`) and tail `sqrt(1 - q̂²)·normalize(μ_k + within·ε)`.
pub fn generate_ensemble(config: &SynthConfig) -> Result<Vec<EnsembleRecord>> {
    config.validate()?;
    let basis = build_basis(&config.anchor, None)?;
    let dim = config.anchor.n() - 2;
    let seed = StreamSeed::new(config.seed);
    let centers: Vec<Vec<f64>> = (0..config.clusters)
        .map(|k| {
            let mut rng = seed.derive(CENTER_TAG).stream(k as u64);
            unit_direction(dim, &mut rng)
                .into_iter()
                .map(|x| x * config.between_spread)
                .collect()
        })
        .collect();

    let jitter = Normal::new(0.0, config.q_jitter).map_err(|e| Error::InfeasibleConfig(e.to_string()))?;
    let record_streams = seed.derive(RECORD_TAG);
    let mut records = Vec::with_capacity(config.clusters * config.count_per_cluster);
    for (k, center) in centers.iter().enumerate() {
        for i in 0..config.count_per_cluster {
            let index = (k * config.count_per_cluster + i) as u64;
            let mut rng = record_streams.stream(index);
            let q_hat = (config.target_q + rng.sample(jitter)).clamp(1e-6, 1.0 - 1e-6);
            let mut dir: Vec<f64> = center
                .iter()
                .map(|c| c + config.within_spread * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let norm = dot(&dir, &dir).sqrt();
            if norm == 0.0 {
                return Err(Error::InfeasibleConfig("zero tail direction".into()));
            }
            let radius = (1.0 - q_hat * q_hat).sqrt();
            dir.iter_mut().for_each(|x| *x *= radius / norm);
            let vector = NormalizedVector::with_tolerance(basis.reconstruct(q_hat, &dir), 1e-10)?;
            records.push(EnsembleRecord::new(
                format!("c{k}-{i:04}"),
                format!("cluster-{k}"),
                vector,
                &config.anchor,
            )?);
        }
    }
    Ok(records)
}
