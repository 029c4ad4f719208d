//! Uniform sampling on `T^n(q)`, the `(n-3)`-sphere of standardized vectors
//! whose correlation with an anchor `u` equals `q`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{build_basis, dot, CorrelationValue, NormalizedVector, OrthonormalBasis};
use crate::rng::{par_chunks, par_map_indexed, StreamSeed};

/// The sphere `T^n(q)` around an anchor.
#[derive(Debug, Clone)]
pub struct TsphereSpec {
    basis: OrthonormalBasis,
    q: CorrelationValue,
}

impl TsphereSpec {
    pub fn new(anchor: &NormalizedVector, q: f64) -> Result<Self> {
        let q = CorrelationValue::new(q)?;
        Ok(Self { basis: build_basis(anchor, None)?, q })
    }

    /// Reuses an existing basis (whose anchor defines the sphere).
    pub fn with_basis(basis: OrthonormalBasis, q: f64) -> Result<Self> {
        Ok(Self { basis, q: CorrelationValue::new(q)? })
    }

    pub fn anchor(&self) -> &NormalizedVector {
        self.basis.anchor()
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn q(&self) -> f64 {
        self.q.value()
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn radius(&self) -> f64 {
        radius(self.q())
    }

    /// One uniform draw from the sphere.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> NormalizedVector {
        let tail = sample_tail(self.n() - 2, self.q(), rng);
        NormalizedVector::from_unit_unchecked(self.basis.reconstruct(self.q(), &tail))
    }
}

pub(crate) fn radius(q: f64) -> f64 {
    (1.0 - q * q).max(0.0).sqrt()
}

/// `sqrt(1 - q²) · z / ‖z‖` for a standard normal `z` of length `dim`.
pub fn sample_tail<R: Rng + ?Sized>(dim: usize, q: f64, rng: &mut R) -> Vec<f64> {
    let mut z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dot(&z, &z).sqrt();
    let scale = if norm > 0.0 { radius(q) / norm } else { 0.0 };
    z.iter_mut().for_each(|x| *x *= scale);
    z
}

/// A reproducible batch of draws from one sphere.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub spec: TsphereSpec,
    pub seed: u64,
    pub vectors: Vec<NormalizedVector>,
}

/// Draws `count` vectors uniformly from `T^n(q)`; sample `i` uses stream `i`.
pub fn sample_tsphere(spec: &TsphereSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidParams("count must be positive".into()));
    }
    let vectors = par_map_indexed(StreamSeed::new(seed), count, |_, rng| spec.draw(rng));
    Ok(SampleBatch { spec: spec.clone(), seed, vectors })
}

/// Expected correlation between a proxy of accuracy `q` and a target whose
/// true correlation with the construct is `r`.
pub fn expected_cross_correlation(q: f64, r: f64) -> Result<CorrelationValue> {
    let q = CorrelationValue::new(q)?;
    let r = CorrelationValue::new(r)?;
    CorrelationValue::new(q.value() * r.value())
}

/// Running mean / sum of squared deviations, merged with Chan's update.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub count: f64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count > 1.0 {
            self.m2 / (self.count - 1.0)
        } else {
            0.0
        }
    }
}

/// Monte Carlo mean of `ρ(û, v)` over `û` uniform on `T^n(q)` around `u`,
/// with its standard error.
pub fn cross_correlation_mc(
    u: &NormalizedVector,
    v: &NormalizedVector,
    q: f64,
    count: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if u.n() != v.n() {
        return Err(Error::DimensionMismatch(u.n(), v.n()));
    }
    if count < 100 {
        return Err(Error::InvalidParams(format!("count {count} < 100")));
    }
    let spec = TsphereSpec::new(u, q)?;
    let streams = StreamSeed::new(seed);
    let moments = par_chunks(count, |range| {
        let mut m = Moments::default();
        for i in range {
            let uh = spec.draw(&mut streams.stream(i as u64));
            m.push(dot(uh.values(), v.values()));
        }
        m
    })
    .into_iter()
    .fold(Moments::default(), Moments::merge);
    Ok((moments.mean, (moments.variance() / count as f64).sqrt()))
}
