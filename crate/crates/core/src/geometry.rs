//! Standardized vectors, Pearson correlation, and the rotated basis in
//! which `u` becomes the second axis.
//!
//! All measurement vectors are centered and scaled to unit Euclidean length,
//! so a Pearson correlation is a plain dot product. The basis `B` has the
//! all-ones direction as its first row and `u` as its second, which
//! annihilates the first coordinate of every zero-mean vector and sends `u`
//! to `e₂`. Any vector `û` then reads as `B·û = (0, ρ(û,u), tail…)`.

use crate::error::{Error, Result};

/// Tolerance used when validating caller-supplied standardized vectors.
pub const INPUT_TOL: f64 = 1e-12;
/// Tolerance for invariants of constructed objects (bases, samples).
pub const CONSTRUCTION_TOL: f64 = 1e-10;

/// A zero-mean, unit-length real vector with `n >= 3` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedVector {
    values: Vec<f64>,
}

impl NormalizedVector {
    /// Wraps values that are already standardized, checking the invariants
    /// at `INPUT_TOL` (scaled by `sqrt(n)` for the mean).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::check(&values, INPUT_TOL)?;
        Ok(Self { values })
    }

    /// Same as [`NormalizedVector::new`] with a caller-chosen tolerance.
    pub fn with_tolerance(values: Vec<f64>, tol: f64) -> Result<Self> {
        Self::check(&values, tol)?;
        Ok(Self { values })
    }

    pub(crate) fn from_unit_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(Self::check(&values, 1e-8).is_ok());
        Self { values }
    }

    fn check(values: &[f64], tol: f64) -> Result<()> {
        let n = values.len();
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let norm = dot(values, values).sqrt();
        if mean.abs() > tol || (norm - 1.0).abs() > tol {
            return Err(Error::NotStandardized(format!("mean {mean:e}, norm {norm}")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn negated(&self) -> Self {
        Self { values: self.values.iter().map(|x| -x).collect() }
    }
}

/// A Pearson correlation in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CorrelationValue(f64);

impl CorrelationValue {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value.abs() > 1.0 + INPUT_TOL {
            return Err(Error::InvalidParams(format!("correlation {value} outside [-1, 1]")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<CorrelationValue> for f64 {
    fn from(c: CorrelationValue) -> f64 {
        c.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Centers `x` and scales it to unit length.
///
/// Scaling uses the Euclidean norm of the centered vector rather than the
/// standard deviation; Pearson correlation is indifferent to the choice.
pub fn standardize(x: &[f64]) -> Result<NormalizedVector> {
    let n = x.len();
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("non-finite value in vector".into()));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    // second centering pass removes the rounding left by the first
    let resid = centered.iter().sum::<f64>() / n as f64;
    centered.iter_mut().for_each(|v| *v -= resid);
    let norm = dot(&centered, &centered).sqrt();
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm == 0.0 || norm <= 1e-14 * scale * (n as f64).sqrt() {
        return Err(Error::ConstantVector);
    }
    centered.iter_mut().for_each(|v| *v /= norm);
    Ok(NormalizedVector { values: centered })
}

/// Pearson correlation of two standardized vectors.
pub fn pearson(a: &NormalizedVector, b: &NormalizedVector) -> Result<CorrelationValue> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    CorrelationValue::new(dot(&a.values, &b.values))
}

/// Rotation `B` with `B·1 ∝ e₁`, `B·u = e₂` and, when a coplanar `v` is
/// given, `B·v = (0, r, sqrt(1 - r²), 0, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    n: usize,
    rows: Vec<f64>,
    anchor: NormalizedVector,
    coplanar: Option<NormalizedVector>,
}

impl OrthonormalBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn anchor(&self) -> &NormalizedVector {
        &self.anchor
    }

    pub fn coplanar(&self) -> Option<&NormalizedVector> {
        self.coplanar.as_ref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    /// `B·x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Bᵀ·y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n);
        let mut out = vec![0.0; self.n];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.row(i)) {
                *o += yi * b;
            }
        }
        out
    }

    /// Builds `Bᵀ·(0, q, tail)`, the point of `T^n(q)` with the given tail.
    pub fn reconstruct(&self, q: f64, tail: &[f64]) -> Vec<f64> {
        assert_eq!(tail.len() + 2, self.n);
        let mut out: Vec<f64> = self.row(1).iter().map(|b| q * b).collect();
        for (k, &t) in tail.iter().enumerate() {
            for (o, b) in out.iter_mut().zip(self.row(k + 2)) {
                *o += t * b;
            }
        }
        out
    }

    /// Replaces the basis rows. Used to swap in an alternative completion;
    /// the invariants are re-checked at `CONSTRUCTION_TOL`.
    pub fn with_rows(&self, rows: Vec<f64>) -> Result<Self> {
        let candidate = Self { rows, ..self.clone() };
        candidate.verify()?;
        Ok(candidate)
    }

    /// Largest violation of the basis invariants.
    pub fn invariant_error(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = dot(self.row(i), self.row(j)) - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.abs());
            }
        }
        let inv_sqrt_n = 1.0 / (n as f64).sqrt();
        for &b in self.row(0) {
            worst = worst.max((b - inv_sqrt_n).abs());
        }
        let bu = self.apply(self.anchor.values());
        for (i, &x) in bu.iter().enumerate() {
            worst = worst.max((x - if i == 1 { 1.0 } else { 0.0 }).abs());
        }
        if let Some(v) = &self.coplanar {
            let r = dot(self.anchor.values(), v.values());
            let bv = self.apply(v.values());
            let expected = |i: usize| match i {
                1 => r,
                2 => (1.0 - r * r).sqrt(),
                _ => 0.0,
            };
            for (i, &x) in bv.iter().enumerate() {
                worst = worst.max((x - expected(i)).abs());
            }
        }
        worst
    }

    fn verify(&self) -> Result<()> {
        if self.rows.len() != self.n * self.n {
            return Err(Error::DimensionMismatch(self.rows.len(), self.n * self.n));
        }
        let err = self.invariant_error();
        if err > CONSTRUCTION_TOL {
            return Err(Error::InvalidParams(format!("basis invariants violated by {err:e}")));
        }
        Ok(())
    }
}

fn normalize_in_place(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    norm
}

/// Removes the components of `x` along every row in `rows` (two passes of
/// modified Gram–Schmidt).
fn orthogonalize(x: &mut [f64], rows: &[Vec<f64>]) {
    for _ in 0..2 {
        for r in rows {
            let p = dot(x, r);
            x.iter_mut().zip(r).for_each(|(xi, ri)| *xi -= p * ri);
        }
    }
}

/// Constructs the rotation for anchor `u` and optional coplanar `v`.
///
/// Rows beyond the fixed ones come from identity columns, always taking the
/// candidate with the largest residual after projection (lowest index on
/// ties), so the result is deterministic.
pub fn build_basis(u: &NormalizedVector, v: Option<&NormalizedVector>) -> Result<OrthonormalBasis> {
    let n = u.n();
    if let Some(v) = v {
        if v.n() != n {
            return Err(Error::DimensionMismatch(n, v.n()));
        }
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    rows.push(vec![1.0 / (n as f64).sqrt(); n]);

    let mut second = u.values().to_vec();
    orthogonalize(&mut second, &rows[..1]);
    normalize_in_place(&mut second);
    rows.push(second);

    if let Some(v) = v {
        let r = dot(u.values(), v.values());
        if 1.0 - r.abs() < CONSTRUCTION_TOL {
            return Err(Error::DegenerateCoplanar);
        }
        let mut third = v.values().to_vec();
        orthogonalize(&mut third, &rows);
        normalize_in_place(&mut third);
        rows.push(third);
    }

    // residual[j] = 1 - sum_r r[j]^2 = squared norm of e_j after projection
    let mut residual = vec![1.0; n];
    let mut used = vec![false; n];
    for r in &rows {
        residual.iter_mut().zip(r).for_each(|(w, x)| *w -= x * x);
    }
    while rows.len() < n {
        let (j, _) = residual
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .fold((usize::MAX, f64::NEG_INFINITY), |best, (j, &w)| if w > best.1 { (j, w) } else { best });
        used[j] = true;
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        orthogonalize(&mut e, &rows);
        normalize_in_place(&mut e);
        residual.iter_mut().zip(&e).for_each(|(w, x)| *w -= x * x);
        rows.push(e);
    }

    let basis = OrthonormalBasis {
        n,
        rows: rows.concat(),
        anchor: u.clone(),
        coplanar: v.cloned(),
    };
    basis.verify()?;
    Ok(basis)
}

/// Correlation with the anchor and the remaining `n - 2` rotated coordinates.
pub fn tail_coordinates(u_hat: &NormalizedVector, basis: &OrthonormalBasis) -> Result<(CorrelationValue, Vec<f64>)> {
    if u_hat.n() != basis.n() {
        return Err(Error::DimensionMismatch(u_hat.n(), basis.n()));
    }
    let mut y = basis.apply(u_hat.values());
    let q = CorrelationValue::new(y[1])?;
    Ok((q, y.split_off(2)))
}
