//! Product-form regularized delta functions.
//!
//! `delta(y) = eps^-n * prod_i phi(y_i / eps)` for a continuous 1D profile
//! `phi` with unit integral and support in `[-1, 1]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::composite_gauss;

/// Panels per axis of the composite rule used for moments (4 nodes each).
const MOMENT_PANELS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// `(1 + cos(pi s)) / 2` on `[-1, 1]`.
    Cosine,
    /// `1 - |s|` on `[-1, 1]`.
    Hat,
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Self::Cosine),
            "hat" => Ok(Self::Hat),
            other => Err(Error::config(
                "profile",
                format!("unknown profile `{other}` (expected `cosine` or `hat`)"),
            )),
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cosine => "cosine",
            Self::Hat => "hat",
        })
    }
}

/// One-dimensional kernel profile, optionally scaled (used to probe
/// unnormalized kernels).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile1D {
    pub kind: ProfileKind,
    pub scale: f64,
}

impl Profile1D {
    pub fn new(kind: ProfileKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    pub fn support_halfwidth(&self) -> f64 {
        1.0
    }

    #[inline]
    pub fn evaluate(&self, s: f64) -> f64 {
        let a = s.abs();
        if a >= 1.0 {
            return 0.0;
        }
        let v = match self.kind {
            ProfileKind::Cosine => 0.5 * (1.0 + (PI * s).cos()),
            ProfileKind::Hat => 1.0 - a,
        };
        self.scale * v
    }

    /// Exact integral over the real line.
    pub fn integral(&self) -> f64 {
        self.scale
    }
}

/// Regularized delta function of width `epsilon` in `dim` dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaKernel {
    pub profile: Profile1D,
    pub epsilon: f64,
    pub dim: usize,
}

impl DeltaKernel {
    pub fn new(kind: ProfileKind, epsilon: f64, dim: usize) -> Result<Self> {
        Self::with_profile(Profile1D::new(kind), epsilon, dim)
    }

    pub fn with_profile(profile: Profile1D, epsilon: f64, dim: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kernel width must be positive, got {epsilon}"
            )));
        }
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidArgument(format!(
                "kernel dimension must be 2 or 3, got {dim}"
            )));
        }
        Ok(Self {
            profile,
            epsilon,
            dim,
        })
    }

    /// Half-width of the axis box `[-r, r]^n` containing the support.
    #[inline]
    pub fn box_halfwidth(&self) -> f64 {
        self.epsilon * self.profile.support_halfwidth()
    }

    /// Radius of the ball enclosing the support box.
    pub fn support_radius(&self) -> f64 {
        (self.dim as f64).sqrt() * self.box_halfwidth()
    }

    /// Evaluates the kernel at `y`; only the first `dim` entries are read.
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        debug_assert!(y.len() >= self.dim);
        let inv = 1.0 / self.epsilon;
        let mut v = inv.powi(self.dim as i32);
        for &yi in &y[..self.dim] {
            if v == 0.0 {
                break;
            }
            v *= self.profile.evaluate(yi * inv);
        }
        v
    }

    /// Two-dimensional fast path.
    #[inline]
    pub fn evaluate2(&self, y0: f64, y1: f64) -> f64 {
        let hw = self.box_halfwidth();
        if y0.abs() >= hw || y1.abs() >= hw {
            return 0.0;
        }
        let inv = 1.0 / self.epsilon;
        inv * inv * self.profile.evaluate(y0 * inv) * self.profile.evaluate(y1 * inv)
    }

    /// Integral of the kernel over its support box, by a tensor composite
    /// Gauss rule (64 nodes per axis).
    pub fn moment_zero(&self) -> f64 {
        self.integrate(|_, v| v)
    }

    /// `(int |y|^(p w) |delta(y)|^p dy)^(1/p)` with `w` in `{0, 1}`.
    pub fn weighted_lp_norm(&self, p: f64, weight_power: u32) -> f64 {
        let wp = p * f64::from(weight_power);
        let integral = self.integrate(|y, v| {
            let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
            let weight = if weight_power == 0 { 1.0 } else { r.powf(wp) };
            weight * v.abs().powf(p)
        });
        integral.powf(1.0 / p)
    }

    fn integrate(&self, f: impl Fn(&[f64], f64) -> f64) -> f64 {
        let hw = self.box_halfwidth();
        let nodes = composite_gauss(-hw, hw, MOMENT_PANELS);
        let m = nodes.len();
        let mut idx = vec![0usize; self.dim];
        let mut y = vec![0.0; self.dim];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                y[k] = nodes[i].0;
                w *= nodes[i].1;
            }
            total += w * f(&y, self.evaluate(&y));
            // odometer increment
            let mut k = 0;
            loop {
                if k == self.dim {
                    return total;
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// Weighted L^p norms of a kernel family over decreasing widths, used to
/// check the `eps^(w - n + n/p)` scaling law.
pub fn weighted_lp_scaling(
    kind: ProfileKind,
    dim: usize,
    epsilons: &[f64],
    p: f64,
    weight_power: u32,
) -> Result<Vec<(f64, f64)>> {
    if p < 1.0 {
        return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
    }
    if weight_power > 1 {
        return Err(Error::InvalidArgument("weight power must be 0 or 1".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "kernel widths must be strictly decreasing".into(),
        ));
    }
    epsilons
        .iter()
        .map(|&eps| {
            let k = DeltaKernel::new(kind, eps, dim)?;
            Ok((eps, k.weighted_lp_norm(p, weight_power)))
        })
        .collect()
}

/// Slopes of `log value` against `log eps` between consecutive entries.
pub fn log_log_slopes(series: &[(f64, f64)]) -> Vec<f64> {
    series
        .windows(2)
        .map(|w| (w[0].1.ln() - w[1].1.ln()) / (w[0].0.ln() - w[1].0.ln()))
        .collect()
}
