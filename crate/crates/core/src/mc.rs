//! Brute-force Monte Carlo oracles for the analytic results.
//!
//! Draws of `û` here do not go through the rotated basis: a standard normal
//! vector is projected onto the complement of `span{1, u}` and normalized,
//! which is uniform on that `(n-3)`-sphere, and `û = q·u + sqrt(1-q²)·w`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::false_corr::FalseCorrParams;
use crate::geometry::{dot, standardize, NormalizedVector};
use crate::rng::{par_chunks, StreamSeed};
use crate::soper::SoperDist;

pub const MIN_COUNT: usize = 10_000;

const PAIR_TAG: u64 = 0x7061_6972;
const DRAW_TAG: u64 = 0x6472_6177;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub count: usize,
    pub seed: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, count: usize, seed: u64) -> Self {
        let p = hits as f64 / count as f64;
        Self { estimate: p, stderr: binomial_stderr(p, count), count, seed }
    }
}

/// `sqrt(p(1-p)/count)`.
pub fn binomial_stderr(p: f64, count: usize) -> f64 {
    (p * (1.0 - p) / count as f64).sqrt()
}

fn random_unit_orthogonal<R: Rng + ?Sized>(u: &NormalizedVector, rng: &mut R) -> Vec<f64> {
    let n = u.n();
    loop {
        let mut z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mean = z.iter().sum::<f64>() / n as f64;
        z.iter_mut().for_each(|x| *x -= mean);
        for _ in 0..2 {
            let p = dot(&z, u.values());
            z.iter_mut().zip(u.values()).for_each(|(x, ui)| *x -= p * ui);
        }
        let norm = dot(&z, &z).sqrt();
        if norm > 1e-8 {
            z.iter_mut().for_each(|x| *x /= norm);
            return z;
        }
    }
}

/// A random standardized pair with `ρ(u, v) = r`.
pub fn construct_pair(n: usize, r: f64, seed: u64) -> Result<(NormalizedVector, NormalizedVector)> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    if !(r.abs() <= 1.0) {
        return Err(Error::InvalidParams(format!("r = {r} outside [-1, 1]")));
    }
    let mut rng = StreamSeed::new(seed).stream(0);
    let u = loop {
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = standardize(&x) {
            break u;
        }
    };
    if r == 1.0 {
        return Ok((u.clone(), u));
    }
    let w = random_unit_orthogonal(&u, &mut rng);
    let s = (1.0 - r * r).sqrt();
    let v: Vec<f64> = u.values().iter().zip(&w).map(|(a, b)| r * a + s * b).collect();
    Ok((u, NormalizedVector::new(v)?))
}

/// `ρ(û, v)` for one uniform draw `û ∈ T^n(q)`.
fn draw_correlation<R: Rng + ?Sized>(u: &NormalizedVector, v: &NormalizedVector, q: f64, rng: &mut R) -> f64 {
    let w = random_unit_orthogonal(u, rng);
    let s = (1.0 - q * q).max(0.0).sqrt();
    u.values()
        .iter()
        .zip(&w)
        .zip(v.values())
        .map(|((a, b), c)| (q * a + s * b) * c)
        .sum()
}

/// Sign error relative to `r`; a zero correlation is a false positive when
/// `r < 0`.
fn is_false(rho: f64, r: f64) -> bool {
    if r < 0.0 {
        rho >= 0.0
    } else {
        rho < 0.0
    }
}

fn check_count(count: usize) -> Result<()> {
    if count < MIN_COUNT {
        return Err(Error::InvalidParams(format!("count {count} < {MIN_COUNT}")));
    }
    Ok(())
}

fn count_hits<F>(count: usize, seed: StreamSeed, trial: F) -> u64
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> bool + Sync,
{
    par_chunks(count, |range| range.filter(|&i| trial(&mut seed.stream(i as u64))).count() as u64)
        .into_iter()
        .sum()
}

/// Fraction of uniform draws from `T^n(q)` whose correlation with `v` has
/// the wrong sign.
pub fn false_corr_prob_mc(n: usize, q: f64, r: f64, count: usize, seed: u64) -> Result<McEstimate> {
    FalseCorrParams::new(n, q, r)?;
    check_count(count)?;
    let base = StreamSeed::new(seed);
    let (u, v) = construct_pair(n, r, base.derive(PAIR_TAG).value())?;
    let draws = base.derive(DRAW_TAG);
    let hits = count_hits(count, draws, |rng| is_false(draw_correlation(&u, &v, q, rng), r));
    Ok(McEstimate::from_hits(hits, count, seed))
}

/// Empirical `Pr[sign error]` for a fixed `q̂` of either sign.
pub fn sign_error_mc(n: usize, q_hat: f64, r: f64, count: usize, seed: u64) -> Result<McEstimate> {
    FalseCorrParams::new(n, 1.0, r)?;
    if !(q_hat.abs() <= 1.0) {
        return Err(Error::InvalidParams(format!("q = {q_hat} outside [-1, 1]")));
    }
    check_count(count)?;
    let base = StreamSeed::new(seed);
    let (u, v) = construct_pair(n, r, base.derive(PAIR_TAG).value())?;
    let draws = base.derive(DRAW_TAG);
    let hits = count_hits(count, draws, |rng| is_false(draw_correlation(&u, &v, q_hat, rng), r));
    Ok(McEstimate::from_hits(hits, count, seed))
}

/// Two-stage oracle: `q̂ ~ Pr(q̂ | q, n)`, then `û` uniform on `T^n(q̂)`.
pub fn marginal_false_corr_prob_mc(n: usize, q: f64, r: f64, count: usize, seed: u64) -> Result<McEstimate> {
    FalseCorrParams::new(n, q, r)?;
    check_count(count)?;
    let sampler = SoperDist::build(q, n)?.sampler();
    let base = StreamSeed::new(seed);
    let (u, v) = construct_pair(n, r, base.derive(PAIR_TAG).value())?;
    let draws = base.derive(DRAW_TAG);
    let hits = count_hits(count, draws, |rng| {
        let q_hat = sampler.draw(rng);
        is_false(draw_correlation(&u, &v, q_hat, rng), r)
    });
    Ok(McEstimate::from_hits(hits, count, seed))
}
