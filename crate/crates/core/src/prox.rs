//! Prox functions and their Bregman distances.
//!
//! Two prox functions are supported, each paired with the domain on which it
//! has a closed-form prox step:
//!
//! * [`ProxFunction::Entropy`]: `d(x) = Σ xᵢ ln xᵢ + ln m` on the simplex Δm,
//!   1-strongly convex w.r.t. ℓ1. The prox step is the multiplicative weights
//!   update.
//! * [`ProxFunction::Euclidean`]: `d(x) = ½‖x‖₂²`, 1-strongly convex w.r.t. ℓ2.
//!   The prox step is a plain gradient step. On an affine domain it is exact
//!   whenever the linear term lies in the domain's direction space, which is
//!   the case for every subgradient the engine produces.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{check_len, norm1, norm2, norm_inf};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProxFunction {
    Entropy,
    Euclidean,
}

impl ProxFunction {
    pub fn name(self) -> &'static str {
        match self {
            ProxFunction::Entropy => "entropy",
            ProxFunction::Euclidean => "euclidean",
        }
    }

    /// The norm w.r.t. which the prox function is 1-strongly convex.
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            ProxFunction::Entropy => norm1(v),
            ProxFunction::Euclidean => norm2(v),
        }
    }

    /// Dual of [`ProxFunction::norm`]; subgradients are measured in it.
    pub fn dual_norm(self, v: &[f64]) -> f64 {
        match self {
            ProxFunction::Entropy => norm_inf(v),
            ProxFunction::Euclidean => norm2(v),
        }
    }

    /// `d(x)`. Uses `0 · ln 0 = 0`.
    pub fn value(self, x: &[f64]) -> Result<f64> {
        match self {
            ProxFunction::Entropy => {
                let mut s = 0.0;
                for (i, &xi) in x.iter().enumerate() {
                    if xi < 0.0 {
                        return Err(Error::NotInterior(i));
                    }
                    if xi > 0.0 {
                        s += xi * math::ln(xi);
                    }
                }
                Ok(s + math::ln(x.len() as f64))
            }
            ProxFunction::Euclidean => Ok(0.5 * x.iter().map(|v| v * v).sum::<f64>()),
        }
    }

    /// `∇d(y)`. The entropy gradient is undefined on the simplex boundary.
    pub fn gradient(self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            ProxFunction::Entropy => y
                .iter()
                .enumerate()
                .map(|(i, &yi)| {
                    if yi > 0.0 {
                        Ok(1.0 + math::ln(yi))
                    } else {
                        Err(Error::NotInterior(i))
                    }
                })
                .collect(),
            ProxFunction::Euclidean => Ok(y.to_vec()),
        }
    }

    /// Bregman distance `D(x, y) = d(x) − d(y) − ∇d(y)ᵀ(x − y)`.
    ///
    /// Not symmetric. Rounding can push the raw expression a few ulps below
    /// zero for nearby points; the result is clamped at zero.
    pub fn bregman(self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len(y.len(), x.len())?;
        let grad = self.gradient(y)?;
        let dx = self.value(x)?;
        let dy = self.value(y)?;
        let lin: f64 = grad
            .iter()
            .zip(x.iter().zip(y))
            .map(|(g, (a, b))| g * (a - b))
            .sum();
        Ok((dx - dy - lin).max(0.0))
    }

    /// Exact minimizer of `α·cᵀx + D(x, anchor)` over the prox function's
    /// domain.
    ///
    /// Entropy: `xᵢ ∝ anchorᵢ·exp(−α cᵢ)`, with the smallest `α cᵢ`
    /// subtracted before exponentiating and the result divided by its
    /// computed sum. Euclidean: `anchor − α c`.
    pub fn prox_solve(self, c: &[f64], anchor: &[f64], alpha: f64) -> Result<Vec<f64>> {
        check_len(anchor.len(), c.len())?;
        if !(alpha >= 0.0) {
            return Err(Error::NegativeStep(alpha));
        }
        if let Some(pos) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        match self {
            ProxFunction::Entropy => {
                if let Some(pos) = anchor.iter().position(|&v| !(v > 0.0)) {
                    return Err(Error::NotInterior(pos));
                }
                if alpha == 0.0 || c.iter().all(|&v| v == 0.0) {
                    return Ok(anchor.to_vec());
                }
                let shift = c.iter().fold(f64::INFINITY, |m, &v| m.min(alpha * v));
                let mut out: Vec<f64> = anchor
                    .iter()
                    .zip(c)
                    .map(|(&a, &ci)| a * math::exp(-(alpha * ci - shift)))
                    .collect();
                let total: f64 = out.iter().sum();
                for v in &mut out {
                    *v /= total;
                }
                Ok(out)
            }
            ProxFunction::Euclidean => Ok(anchor
                .iter()
                .zip(c)
                .map(|(&a, &ci)| a - alpha * ci)
                .collect()),
        }
    }

    /// An upper bound `D̄ ≥ max_x D(x, x0)` over the domain.
    ///
    /// For entropy the maximum over Δm is attained at a vertex, so
    /// `D̄ = max_i −ln x0ᵢ`, which is exactly `ln m` at the uniform point. The
    /// Euclidean domains used here are unbounded, so the caller must pass the
    /// optimum it wants the distance to; the result is then
    /// `D(x*, x0) = ½‖x* − x0‖₂²`.
    pub fn diameter_bound(self, x0: &[f64], optimum: Option<&[f64]>) -> Result<f64> {
        match self {
            ProxFunction::Entropy => {
                if x0.is_empty() {
                    return Err(Error::Empty("simplex point"));
                }
                if let Some(pos) = x0.iter().position(|&v| !(v > 0.0)) {
                    return Err(Error::NotInterior(pos));
                }
                if x0.iter().all(|&v| v == x0[0]) {
                    return Ok(math::ln(x0.len() as f64));
                }
                Ok(x0.iter().fold(0.0, |m, &v| m.max(-math::ln(v))))
            }
            ProxFunction::Euclidean => {
                let opt = optimum.ok_or(Error::UnboundedDomain)?;
                check_len(x0.len(), opt.len())?;
                Ok(0.5
                    * opt
                        .iter()
                        .zip(x0)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>())
            }
        }
    }
}

/// The uniform point of Δm.
pub fn uniform(m: usize) -> Vec<f64> {
    alloc::vec![1.0 / m as f64; m]
}
