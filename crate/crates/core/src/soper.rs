//! Soper's approximate sampling distribution of the sample correlation `q̂`
//! and the false-correlation probability marginalized over it.
//!
//! ```text
//! Pr(q̂ | q, n) ∝ (1 - q̂)^{m₁} (1 + q̂)^{m₂}
//! m₁ = ½(λ - 1)(1 - μ) - 1,   m₂ = ½(λ - 1)(1 + μ) - 1,   λ = (1 - μ²)/σ²
//! σ  = (1 - q²)/√n · (1 + (1 + 5.5 q²)/(2n))
//! μ  = sqrt(q² - c/n - c(1 + 5q²)/(2n²)),   c = q²(1 - q²)
//! ```
//!
//! `μ` takes the sign of `q`. The kernel is normalized numerically.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::false_corr::{false_corr_prob_ext, FalseCorrParams, Method, ProbabilityResult};
use crate::quadrature::{gauss_kronrod, integrate_pieces};
use crate::rng::{par_map_indexed, StreamSeed};

pub const DEFAULT_MARGINAL_REL_TOL: f64 = 1e-6;
/// Grid points of the tabulated CDF used for sampling.
pub const CDF_GRID: usize = 4097;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoperDist {
    pub q: f64,
    pub n: usize,
    pub mu_q: f64,
    pub sigma_q: f64,
    pub lambda: f64,
    pub m1: f64,
    pub m2: f64,
    pub log_norm_const: f64,
}

impl SoperDist {
    pub fn build(q: f64, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParams(format!("Soper approximation needs n >= 4, got {n}")));
        }
        if !(q.abs() < 1.0) {
            return Err(Error::InvalidParams(format!("q = {q}; need |q| < 1")));
        }
        let (mu_q, sigma_q, lambda) = shape_parameters(q, n as f64)?;
        let m1 = 0.5 * (lambda - 1.0) * (1.0 - mu_q) - 1.0;
        let m2 = 0.5 * (lambda - 1.0) * (1.0 + mu_q) - 1.0;
        let mut dist = Self { q, n, mu_q, sigma_q, lambda, m1, m2, log_norm_const: 0.0 };

        let shift = dist.log_kernel(dist.mode());
        let unnormalized = |x: f64| (dist.log_kernel(x) - shift).exp();
        let total = integrate_pieces(unnormalized, &dist.breakpoints(), 1e-12, 0.0)?;
        dist.log_norm_const = shift + total.value.ln();
        Ok(dist)
    }

    fn log_kernel(&self, x: f64) -> f64 {
        self.m1 * (-x).ln_1p() + self.m2 * x.ln_1p()
    }

    /// Interior maximizer of the kernel, or 0 when one exponent is not positive.
    fn mode(&self) -> f64 {
        if self.m1 > 0.0 && self.m2 > 0.0 {
            (self.m2 - self.m1) / (self.m1 + self.m2)
        } else {
            0.0
        }
    }

    fn breakpoints(&self) -> [f64; 3] {
        [-1.0, self.mode(), 1.0]
    }

    /// Normalized density; zero outside `(-1, 1)`.
    pub fn pdf(&self, q_hat: f64) -> f64 {
        if q_hat <= -1.0 || q_hat >= 1.0 || q_hat.is_nan() {
            return 0.0;
        }
        (self.log_kernel(q_hat) - self.log_norm_const).exp()
    }

    /// `∫ g(q̂)·pdf(q̂) dq̂` by adaptive quadrature.
    pub fn expect<F: Fn(f64) -> f64>(&self, g: F) -> Result<f64> {
        Ok(integrate_pieces(|x| g(x) * self.pdf(x), &self.breakpoints(), 1e-11, 0.0)?.value)
    }

    pub fn mean(&self) -> Result<f64> {
        self.expect(|x| x)
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        self.expect(|x| (x - m) * (x - m))
    }

    /// Inverse-CDF sampler over a tabulated CDF.
    pub fn sampler(&self) -> SoperSampler {
        SoperSampler::new(self)
    }
}

/// `(μ, σ, λ)` for real-valued `n`; fails when the approximation has no
/// valid parameters.
fn shape_parameters(q: f64, nf: f64) -> Result<(f64, f64, f64)> {
    let q2 = q * q;
    let c = q2 * (1.0 - q2);
    let radicand = q2 - c / nf - c * (1.0 + 5.0 * q2) / (2.0 * nf * nf);
    if radicand < 0.0 {
        return Err(Error::ApproximationBreakdown(format!(
            "negative radicand {radicand:e} in the mean for q = {q}, n = {nf}"
        )));
    }
    let mu_q = radicand.sqrt().copysign(q);
    let sigma_q = (1.0 - q2) / nf.sqrt() * (1.0 + (1.0 + 5.5 * q2) / (2.0 * nf));
    let lambda = (1.0 - mu_q * mu_q) / (sigma_q * sigma_q);
    if !(lambda > 1.0) {
        return Err(Error::ApproximationBreakdown(format!("lambda = {lambda} <= 1 for q = {q}, n = {nf}")));
    }
    Ok((mu_q, sigma_q, lambda))
}

/// Piecewise-linear CDF on a uniform `CDF_GRID`-point grid over `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct SoperSampler {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl SoperSampler {
    fn new(dist: &SoperDist) -> Self {
        let cells = CDF_GRID - 1;
        let grid: Vec<f64> = (0..CDF_GRID).map(|i| -1.0 + 2.0 * i as f64 / cells as f64).collect();
        let pdf = |x: f64| dist.pdf(x);
        let mut cdf = Vec::with_capacity(CDF_GRID);
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in grid.windows(2) {
            acc += gauss_kronrod(&pdf, w[0], w[1]).0;
            cdf.push(acc);
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Self { grid, cdf }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let pos = (x + 1.0) / 2.0 * (CDF_GRID - 1) as f64;
        let i = (pos.floor() as usize).min(CDF_GRID - 2);
        let frac = pos - i as f64;
        self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Maps `p ∈ [0, 1)` to `q̂ ∈ (-1, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        // first index with cdf > p
        let hi = self.cdf.partition_point(|&c| c <= p).clamp(1, CDF_GRID - 1);
        let lo = hi - 1;
        let span = self.cdf[hi] - self.cdf[lo];
        let frac = if span > 0.0 { (p - self.cdf[lo]) / span } else { 0.5 };
        let x = self.grid[lo] + frac * (self.grid[hi] - self.grid[lo]);
        x.clamp(-1.0 + 1e-15, 1.0 - 1e-15)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// `count` draws of `q̂`; draw `i` uses stream `i` of `seed`.
pub fn soper_sample(dist: &SoperDist, count: usize, seed: u64) -> Vec<f64> {
    let sampler = dist.sampler();
    par_map_indexed(StreamSeed::new(seed), count, |_, rng| sampler.draw(rng))
}

/// False-correlation probability averaged over `q̂ ~ Pr(q̂ | q, n)`.
///
/// `q̂ ≤ 0` is handled by the reflection extension of `h`.
pub fn marginal_false_corr_prob(n: usize, q: f64, r: f64, rel_tol: f64) -> Result<ProbabilityResult> {
    FalseCorrParams::new(n, q, r)?;
    let dist = SoperDist::build(q, n)?;
    let inner_tol = (rel_tol * 1e-3).max(1e-12);
    let r_edge = (1.0 - r * r).sqrt();
    let mut breaks = vec![-1.0, -r_edge, 0.0, r_edge, dist.mode(), 1.0];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let failure = std::cell::Cell::new(None);
    let inner_err = std::cell::Cell::new(0.0f64);
    let integrand = |x: f64| {
        let density = dist.pdf(x);
        if density == 0.0 {
            return 0.0;
        }
        match false_corr_prob_ext(n, x, r, inner_tol) {
            Ok(h) => {
                inner_err.set(inner_err.get().max(h.abs_error_bound));
                h.value * density
            }
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let outer = integrate_pieces(integrand, &breaks, rel_tol, 1e-12)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(ProbabilityResult {
        value: outer.value.clamp(0.0, 1.0),
        method: Method::MarginalQuadrature,
        // the density integrates to one, so inner errors add at most their max
        abs_error_bound: outer.abs_error + inner_err.get(),
    })
}
