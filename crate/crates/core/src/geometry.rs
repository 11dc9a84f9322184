use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];
pub type Vec2 = [f64; 2];

/// Axis-aligned rectangle `[lo.0, hi.0] x [lo.1, hi.1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Point2,
    pub hi: Point2,
}

impl AxisBox {
    pub fn new(lo: Point2, hi: Point2) -> Result<Self> {
        if !(lo[0] < hi[0] && lo[1] < hi[1]) || lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "box corners must satisfy lo < hi componentwise, got {lo:?} and {hi:?}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// The square `(-1, 1)^2`.
    pub fn symmetric_unit() -> Self {
        Self {
            lo: [-1.0, -1.0],
            hi: [1.0, 1.0],
        }
    }

    pub fn width(&self) -> f64 {
        self.hi[0] - self.lo[0]
    }

    pub fn height(&self) -> f64 {
        self.hi[1] - self.lo[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
        ]
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Distance from an interior point to the boundary of the box.
    /// Negative for points outside.
    pub fn distance_to_boundary(&self, x: Point2) -> f64 {
        let dx = (x[0] - self.lo[0]).min(self.hi[0] - x[0]);
        let dy = (x[1] - self.lo[1]).min(self.hi[1] - x[1]);
        dx.min(dy)
    }
}
