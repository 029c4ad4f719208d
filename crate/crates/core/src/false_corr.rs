//! Probability that a proxy-based sample correlation has the wrong sign.
//!
//! With `û` uniform on `T^n(q)` and true correlation `r`, the sample
//! correlation is `ρ(û, v) = q·r + û₃·sqrt(1 - r²)`. Its sign flips when the
//! third rotated coordinate exceeds `c = |q·r| / sqrt(1 - r²)`, which happens
//! with probability
//!
//! ```text
//! h(n, q, r) = ½ · 1[c² ≤ 1 - q²]                          n = 3
//! h(n, q, r) = ½ ∫₀^∞ f₁(t) F_{n-3}(α t) dt,  α = (1-q²-c²)/c²   n > 3
//! ```
//!
//! where `f_k`/`F_k` are chi-square densities/CDFs. The integral is evaluated
//! after substituting `t = s²`, which turns `f₁(t) dt` into
//! `sqrt(2/π) e^{-s²/2} ds` and removes the `t^{-1/2}` endpoint singularity.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::soper::marginal_false_corr_prob;
use crate::special::ChiSquared;

pub use crate::special::{chi2_cdf, chi2_pdf};

/// Upper limit of the `s` integral; the neglected mass is below `e^{-72}`.
pub const S_MAX: f64 = 12.0;
/// Default relative tolerance for the quadrature route.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// `1 - q² - r²` within this distance of zero is treated as exactly zero.
const BOUNDARY_EPS: f64 = 1e-14;

/// `√(2/π)·∫_{S_MAX}^∞ e^{-s²/2} ds`, bounded by the Mills ratio.
fn truncation_bound() -> f64 {
    (2.0 / PI).sqrt() * (-0.5 * S_MAX * S_MAX).exp() / S_MAX
}

/// Validated `(n, q, r)` for the false-correlation probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FalseCorrParams {
    n: usize,
    q: f64,
    r: f64,
}

impl FalseCorrParams {
    pub fn new(n: usize, q: f64, r: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("n = {n}; need n >= 3")));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParams(format!("q = {q}; need 0 < q <= 1")));
        }
        if r == 0.0 {
            return Err(Error::InvalidParams("false correlation undefined at r=0".into()));
        }
        if !r.is_finite() || 1.0 - r * r < 1e-12 {
            return Err(Error::InvalidParams(format!("r = {r}; need 0 < |r| < 1")));
        }
        Ok(Self { n, q, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `|q·r| / sqrt(1 - r²)`.
    pub fn c(&self) -> f64 {
        (self.q * self.r).abs() / (1.0 - self.r * self.r).sqrt()
    }

    /// `1 - q² - c²`, computed as `(1 - r² - q²)/(1 - r²)` and snapped to
    /// zero at the boundary.
    pub fn slack(&self) -> f64 {
        let (q2, r2) = (self.q * self.q, self.r * self.r);
        let num = 1.0 - r2 - q2;
        if num.abs() <= BOUNDARY_EPS {
            0.0
        } else {
            num / (1.0 - r2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    IndicatorN3,
    Quadrature,
    ClosedForm,
    MarginalQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityResult {
    pub value: f64,
    pub method: Method,
    pub abs_error_bound: f64,
}

impl ProbabilityResult {
    fn exact(value: f64, method: Method) -> Self {
        Self { value, method, abs_error_bound: 0.0 }
    }
}

/// `h(n, q, r)` by quadrature (indicator for `n = 3`).
pub fn false_corr_prob(params: &FalseCorrParams, rel_tol: f64) -> Result<ProbabilityResult> {
    let slack = params.slack();
    if params.n == 3 {
        let value = if slack >= 0.0 { 0.5 } else { 0.0 };
        return Ok(ProbabilityResult::exact(value, Method::IndicatorN3));
    }
    if slack <= 0.0 {
        return Ok(ProbabilityResult::exact(0.0, Method::Quadrature));
    }
    let c = params.c();
    let alpha = slack / (c * c);
    let chi = ChiSquared::new(params.n as i64 - 3)?;
    let integrand = |s: f64| (-0.5 * s * s).exp() * chi.cdf(alpha * s * s);
    let quad = integrate(integrand, 0.0, S_MAX, rel_tol, 0.0)?;
    let scale = 0.5 * (2.0 / PI).sqrt();
    Ok(ProbabilityResult {
        value: (scale * quad.value).clamp(0.0, 0.5),
        method: Method::Quadrature,
        abs_error_bound: scale * quad.abs_error + 0.5 * truncation_bound(),
    })
}

/// `h` through the Beta law of `χ²₁/(χ²₁ + χ²_{n-3})`:
/// `h = ½·I_{1-x}((n-3)/2, ½)` with `x = c²/(1 - q²)`.
///
/// Independent of the quadrature route; used to cross-check it.
pub fn false_corr_prob_closed_form(params: &FalseCorrParams) -> Result<ProbabilityResult> {
    if params.n == 3 {
        return Err(Error::InvalidParams("closed form requires n > 3".into()));
    }
    let slack = params.slack();
    if slack <= 0.0 {
        return Ok(ProbabilityResult::exact(0.0, Method::ClosedForm));
    }
    // 1 - x = slack / (1 - q²)
    let one_minus_x = (slack / (1.0 - params.q * params.q)).min(1.0);
    let k = (params.n - 3) as f64;
    let value = 0.5 * statrs::function::beta::beta_reg(k / 2.0, 0.5, one_minus_x);
    Ok(ProbabilityResult {
        value,
        method: Method::ClosedForm,
        abs_error_bound: 1e-13,
    })
}

/// `h` extended to every `q̂ ∈ [-1, 1]` by reflecting `û ↦ -û`:
/// `h(q̂)` for `q̂ > 0`, `½` at zero, `1 - h(-q̂)` below.
pub fn false_corr_prob_ext(n: usize, q_hat: f64, r: f64, rel_tol: f64) -> Result<ProbabilityResult> {
    if q_hat == 0.0 {
        // every point of T^n(0) has a mirror image with opposite ρ(û, v)
        FalseCorrParams::new(n, 1.0, r)?;
        return Ok(ProbabilityResult::exact(0.5, Method::Quadrature));
    }
    let h = false_corr_prob(&FalseCorrParams::new(n, q_hat.abs(), r)?, rel_tol)?;
    if q_hat > 0.0 {
        Ok(h)
    } else {
        Ok(ProbabilityResult { value: 1.0 - h.value, ..h })
    }
}

/// One probability per `n` in `n_min..=n_max`, either `h` itself or the
/// value marginalized over the sampling distribution of `q̂`.
pub fn false_corr_curve(q: f64, r: f64, n_min: usize, n_max: usize, marginal: bool) -> Result<Vec<(usize, f64)>> {
    if n_min < 3 || n_min > n_max {
        return Err(Error::InvalidParams(format!("need 3 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    FalseCorrParams::new(n_min, q, r)?;
    (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let p = if marginal {
                marginal_false_corr_prob(n, q, r, crate::soper::DEFAULT_MARGINAL_REL_TOL)?
            } else {
                false_corr_prob(&FalseCorrParams::new(n, q, r)?, DEFAULT_REL_TOL)?
            };
            Ok((n, p.value))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: usize, q: f64, r: f64) -> f64 {
        false_corr_prob(&FalseCorrParams::new(n, q, r).unwrap(), DEFAULT_REL_TOL).unwrap().value
    }

    fn closed(n: usize, q: f64, r: f64) -> f64 {
        false_corr_prob_closed_form(&FalseCorrParams::new(n, q, r).unwrap()).unwrap().value
    }

    /// Direct evaluation of ½·P[χ²₁ ≥ β χ²_k] by integrating the two
    /// chi-square densities on a fine trapezoid grid; slow and crude, but
    /// shares no code with either route.
    fn brute_force(n: usize, q: f64, r: f64) -> f64 {
        let c2 = (q * r).powi(2) / (1.0 - r * r);
        let alpha = (1.0 - q * q - c2) / c2;
        let k = (n - 3) as f64;
        let ln_norm = |kk: f64| -(kk / 2.0) * 2f64.ln() - statrs::function::gamma::ln_gamma(kk / 2.0);
        // F_k by trapezoid in w = sqrt(t), where the density becomes smooth
        let cdf = |x: f64| {
            let steps = 4000;
            let top = x.sqrt();
            let dw = top / steps as f64;
            let g = |w: f64| if w <= 0.0 { if k == 1.0 { 2.0 * ln_norm(k).exp() } else { 0.0 } } else { 2.0 * ((k - 1.0) * w.ln() - w * w / 2.0 + ln_norm(k)).exp() };
            (0..=steps).map(|i| g(i as f64 * dw) * if i == 0 || i == steps { 0.5 } else { 1.0 }).sum::<f64>() * dw
        };
        // outer integral in s = sqrt(t) to tame the f1 singularity
        let steps = 2000;
        let ds = S_MAX / steps as f64;
        let total: f64 = (0..=steps)
            .map(|i| {
                let s = i as f64 * ds;
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                w * (-0.5 * s * s).exp() * cdf(alpha * s * s)
            })
            .sum::<f64>()
            * ds;
        0.5 * (2.0 / PI).sqrt() * total
    }

    #[test]
    fn n3_indicator() {
        let q = 30f64.to_radians().cos();
        let r = 105f64.to_radians().cos();
        let p = FalseCorrParams::new(3, q, r).unwrap();
        assert!((p.c().powi(2) - 0.0538).abs() < 1e-3);
        let res = false_corr_prob(&p, DEFAULT_REL_TOL).unwrap();
        assert_eq!(res.value, 0.5);
        assert_eq!(res.method, Method::IndicatorN3);
        // c² > 1 - q²  →  0
        assert_eq!(h(3, 0.9, -0.6), 0.0);
        // boundary c² = 1 - q² counts as inside
        assert_eq!(h(3, 0.8, -0.6), 0.5);
    }

    #[test]
    fn perfect_detector_never_flips() {
        assert_eq!(h(10, 1.0, -0.5), 0.0);
        assert_eq!(closed(10, 1.0, -0.5), 0.0);
    }

    #[test]
    fn invalid_params() {
        for (n, q, r) in [(2, 0.5, 0.3), (5, 0.0, 0.3), (5, 1.1, 0.3), (5, 0.5, 0.0), (5, 0.5, 1.0), (5, 0.5, -1.0)] {
            assert!(matches!(FalseCorrParams::new(n, q, r), Err(Error::InvalidParams(_))), "{n} {q} {r}");
        }
        let msg = FalseCorrParams::new(20, 0.5, 0.0).unwrap_err().to_string();
        assert!(msg.contains("false correlation undefined at r=0"));
    }

    #[test]
    fn quadrature_matches_brute_force() {
        for (n, q, r) in [(20, 0.5, 0.37), (4, 0.6, -0.4), (14, 0.57, -0.497), (7, 0.3, 0.8)] {
            let oracle = brute_force(n, q, r);
            let got = h(n, q, r);
            assert!((got - oracle).abs() < 2e-5, "({n},{q},{r}): {got} vs {oracle}");
        }
    }

    #[test]
    fn closed_form_agrees() {
        for (n, q, r) in [(20, 0.5, 0.37), (4, 0.6, -0.4), (5, 0.05, 0.9), (200, 0.2, -0.6), (1000, 0.9, 0.1)] {
            let a = h(n, q, r);
            let b = closed(n, q, r);
            assert!((a - b).abs() < 1e-8, "({n},{q},{r}): {a} vs {b}");
        }
    }

    #[test]
    fn sign_symmetry_and_range() {
        for n in [4, 9, 30] {
            for q in [0.1, 0.5, 0.95] {
                for r in [0.1, 0.37, 0.8] {
                    let a = h(n, q, r);
                    assert_eq!(a, h(n, q, -r));
                    assert!((0.0..=0.5).contains(&a));
                }
            }
        }
    }

    #[test]
    fn extension_branches() {
        let pos = false_corr_prob_ext(10, 0.4, -0.5, 1e-10).unwrap().value;
        let neg = false_corr_prob_ext(10, -0.4, -0.5, 1e-10).unwrap().value;
        assert!((pos + neg - 1.0).abs() < 1e-15);
        assert_eq!(false_corr_prob_ext(10, 0.0, -0.5, 1e-10).unwrap().value, 0.5);
        // continuity at zero
        assert!((false_corr_prob_ext(10, 1e-6, -0.5, 1e-10).unwrap().value - 0.5).abs() < 1e-5);
    }

    #[test]
    fn direct_curve_decreases() {
        let curve = false_corr_curve(0.5, 0.37, 4, 200, false).unwrap();
        assert_eq!(curve.len(), 197);
        assert!(curve.windows(2).all(|w| w[1].1 < w[0].1));
        assert_eq!(false_corr_curve(0.5, 0.37, 5, 5, false).unwrap().len(), 1);
        assert!(false_corr_curve(0.5, 0.37, 6, 5, false).is_err());
        assert!(false_corr_curve(0.5, 0.37, 2, 5, false).is_err());
    }
}
