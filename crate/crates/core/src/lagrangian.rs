//! Immersed boundary curves, the midpoint partition of the Lagrangian
//! parameter interval, and force spreading onto Eulerian points.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::{AxisBox, Point2, Vec2};
use crate::kernel::DeltaKernel;

const MIN_JACOBIAN: f64 = 1e-12;

pub type CurveFn = Arc<dyn Fn(f64) -> Point2 + Send + Sync>;

#[derive(Clone)]
enum Parametrization {
    /// `X = c + r (cos t, sin t)` with force `F = kappa X''`.
    Circle {
        center: Point2,
        radius: f64,
        kappa: f64,
    },
    Closure {
        position: CurveFn,
        derivative: Option<CurveFn>,
        force: CurveFn,
    },
    /// Values given only at the partition nodes.
    Sampled {
        theta: Vec<f64>,
        position: Vec<Point2>,
        force: Vec<Vec2>,
    },
}

/// A closed or open curve `theta -> X(theta)` carrying a force density
/// `F(theta)` per unit Lagrangian coordinate.
#[derive(Clone)]
pub struct ImmersedBoundary {
    interval: (f64, f64),
    repr: Parametrization,
}

impl fmt::Debug for ImmersedBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Parametrization::Circle { .. } => "circle",
            Parametrization::Closure { .. } => "closure",
            Parametrization::Sampled { .. } => "sampled",
        };
        f.debug_struct("ImmersedBoundary")
            .field("interval", &self.interval)
            .field("kind", &kind)
            .finish()
    }
}

impl ImmersedBoundary {
    /// Circle of the given radius with the elastic force `kappa X''`,
    /// parametrized over `[0, 2 pi]`.
    pub fn circle(center: Point2, radius: f64, kappa: f64) -> Self {
        Self {
            interval: (0.0, std::f64::consts::TAU),
            repr: Parametrization::Circle {
                center,
                radius,
                kappa,
            },
        }
    }

    /// Radius-1/2 circle at the origin with `kappa = 2`, i.e.
    /// `F = -(cos t, sin t)`.
    pub fn default_circle() -> Self {
        Self::circle([0.0, 0.0], 0.5, 2.0)
    }

    pub fn from_closures(
        interval: (f64, f64),
        position: CurveFn,
        derivative: Option<CurveFn>,
        force: CurveFn,
    ) -> Result<Self> {
        check_interval(interval)?;
        Ok(Self {
            interval,
            repr: Parametrization::Closure {
                position,
                derivative,
                force,
            },
        })
    }

    /// Boundary known only at strictly increasing nodes `theta`.
    pub fn from_samples(theta: Vec<f64>, position: Vec<Point2>, force: Vec<Vec2>) -> Result<Self> {
        if theta.len() < 2 {
            return Err(Error::InvalidArgument(
                "sampled boundary needs at least two nodes".into(),
            ));
        }
        if position.len() != theta.len() || force.len() != theta.len() {
            return Err(Error::InvalidArgument(
                "sampled boundary arrays differ in length".into(),
            ));
        }
        if theta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "sampled boundary nodes must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            interval: (theta[0], theta[theta.len() - 1]),
            repr: Parametrization::Sampled {
                theta,
                position,
                force,
            },
        })
    }

    /// Reads `theta X1 X2 F1 F2` lines. Blank lines and `#` comments are
    /// ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut theta = Vec::new();
        let mut position = Vec::new();
        let mut force = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::BoundaryData {
                    line: k + 1,
                    message: e.to_string(),
                })?;
            if fields.len() != 5 {
                return Err(Error::BoundaryData {
                    line: k + 1,
                    message: format!("expected 5 columns, found {}", fields.len()),
                });
            }
            if let Some(&last) = theta.last() {
                if fields[0] <= last {
                    return Err(Error::BoundaryData {
                        line: k + 1,
                        message: "theta must be strictly increasing".into(),
                    });
                }
            }
            theta.push(fields[0]);
            position.push([fields[1], fields[2]]);
            force.push([fields[3], fields[4]]);
        }
        if theta.len() < 2 {
            return Err(Error::BoundaryData {
                line: 0,
                message: "need at least two samples".into(),
            });
        }
        Self::from_samples(theta, position, force)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.repr, Parametrization::Sampled { .. })
    }

    /// `X(theta)`. Sampled boundaries answer only at their nodes.
    pub fn position(&self, theta: f64) -> Result<Point2> {
        match &self.repr {
            Parametrization::Circle { center, radius, .. } => Ok([
                center[0] + radius * theta.cos(),
                center[1] + radius * theta.sin(),
            ]),
            Parametrization::Closure { position, .. } => Ok(position(theta)),
            Parametrization::Sampled {
                theta: nodes,
                position,
                ..
            } => Ok(position[sample_index(nodes, theta)?]),
        }
    }

    /// `F(theta)`. Sampled boundaries answer only at their nodes.
    pub fn force(&self, theta: f64) -> Result<Vec2> {
        match &self.repr {
            Parametrization::Circle { radius, kappa, .. } => Ok([
                -kappa * radius * theta.cos(),
                -kappa * radius * theta.sin(),
            ]),
            Parametrization::Closure { force, .. } => Ok(force(theta)),
            Parametrization::Sampled {
                theta: nodes,
                force,
                ..
            } => Ok(force[sample_index(nodes, theta)?]),
        }
    }

    /// Length of `X'(theta)`: analytic when available, otherwise central
    /// differences (closures) or neighbouring samples (sampled data).
    pub fn jacobian(&self, theta: f64) -> Result<f64> {
        let (c, d) = self.interval;
        let j = match &self.repr {
            Parametrization::Circle { radius, .. } => radius.abs(),
            Parametrization::Closure {
                derivative: Some(dx),
                ..
            } => {
                let v = dx(theta);
                v[0].hypot(v[1])
            }
            Parametrization::Closure { position, .. } => {
                let step = (d - c) * 1e-6;
                let a = position(theta - step);
                let b = position(theta + step);
                (b[0] - a[0]).hypot(b[1] - a[1]) / (2.0 * step)
            }
            Parametrization::Sampled {
                theta: nodes,
                position,
                ..
            } => {
                let i = sample_index(nodes, theta)?;
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(nodes.len() - 1);
                let a = position[lo];
                let b = position[hi];
                (b[0] - a[0]).hypot(b[1] - a[1]) / (nodes[hi] - nodes[lo])
            }
        };
        if !(j >= MIN_JACOBIAN) {
            return Err(Error::DegenerateParametrization { theta, jacobian: j });
        }
        Ok(j)
    }

    /// Partition used for force spreading: uniform with `m` intervals for
    /// analytic curves, the sample nodes as-is for sampled data.
    pub fn partition(&self, m: usize) -> Result<MidpointPartition> {
        match &self.repr {
            Parametrization::Sampled { theta, .. } => MidpointPartition::from_nodes(theta.clone()),
            _ => MidpointPartition::uniform(self.interval, m),
        }
    }

    /// Positions and forces at the partition nodes; checks the Jacobian at
    /// every node.
    pub fn markers(&self, partition: &MidpointPartition) -> Result<Markers> {
        let mut positions = Vec::with_capacity(partition.nodes.len());
        let mut forces = Vec::with_capacity(partition.nodes.len());
        for &t in &partition.nodes {
            self.jacobian(t)?;
            positions.push(self.position(t)?);
            forces.push(self.force(t)?);
        }
        Ok(Markers {
            positions,
            forces,
            weights: partition.weights.clone(),
        })
    }
}

fn check_interval(interval: (f64, f64)) -> Result<()> {
    if !(interval.0 < interval.1) {
        return Err(Error::InvalidArgument(format!(
            "parameter interval must satisfy c < d, got {interval:?}"
        )));
    }
    Ok(())
}

fn sample_index(nodes: &[f64], theta: f64) -> Result<usize> {
    nodes
        .iter()
        .position(|&t| t == theta)
        .ok_or_else(|| Error::InvalidArgument(format!("theta = {theta} is not a sample node")))
}

/// Nodes `theta_0 < ... < theta_M` with midpoint weights
/// `zeta_i = theta_{i+1/2} - theta_{i-1/2}`, where the half nodes are the
/// interval midpoints and the end half nodes collapse onto the end points.
#[derive(Clone, Debug, PartialEq)]
pub struct MidpointPartition {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub zeta_max: f64,
}

impl MidpointPartition {
    pub fn uniform(interval: (f64, f64), m: usize) -> Result<Self> {
        check_interval(interval)?;
        if m == 0 {
            return Err(Error::InvalidArgument("partition needs M >= 1".into()));
        }
        let (c, d) = interval;
        let step = (d - c) / m as f64;
        let nodes = (0..=m)
            .map(|i| if i == m { d } else { c + i as f64 * step })
            .collect();
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument(
                "partition needs at least two nodes".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "partition nodes must be strictly increasing".into(),
            ));
        }
        let m = nodes.len() - 1;
        let half = |i: usize| -> f64 {
            // theta_{i - 1/2}
            if i == 0 {
                nodes[0]
            } else if i == m + 1 {
                nodes[m]
            } else {
                0.5 * (nodes[i] + nodes[i - 1])
            }
        };
        let weights: Vec<f64> = (0..=m).map(|i| half(i + 1) - half(i)).collect();
        let zeta_max = weights.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            nodes,
            weights,
            zeta_max,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Lagrangian markers: `X(theta_i)`, `F(theta_i)` and `zeta_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Markers {
    pub positions: Vec<Point2>,
    pub forces: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl Markers {
    /// `sum_i F_i zeta_i`.
    pub fn total_force(&self) -> Vec2 {
        let mut s = [0.0; 2];
        for (f, w) in self.forces.iter().zip(&self.weights) {
            s[0] += f[0] * w;
            s[1] += f[1] * w;
        }
        s
    }

    /// Ok iff every marker is farther from the box boundary than the kernel
    /// support radius.
    pub fn validate_separation(&self, domain: &AxisBox, kernel: &DeltaKernel) -> Result<()> {
        let min_distance = self
            .positions
            .iter()
            .map(|&x| domain.distance_to_boundary(x))
            .fold(f64::INFINITY, f64::min);
        let required = kernel.support_radius();
        if min_distance > required {
            Ok(())
        } else {
            Err(Error::BoundaryTooClose {
                min_distance,
                required,
            })
        }
    }
}

#[inline]
fn marker_term(kernel: &DeltaKernel, markers: &Markers, i: usize, x: Point2, acc: &mut Vec2) {
    let p = markers.positions[i];
    let d = kernel.evaluate2(x[0] - p[0], x[1] - p[1]) * markers.weights[i];
    acc[0] += markers.forces[i][0] * d;
    acc[1] += markers.forces[i][1] * d;
}

/// Evaluates the spread force `sum_i F_i delta(x - X_i) zeta_i`.
///
/// Markers are binned on a grid with spacing equal to the kernel box
/// half-width, so each query inspects a 3x3 block of bins. Skipped markers
/// contribute exact zeros and the summation order matches
/// [`ForceSpreader::evaluate_direct`], so both paths agree bitwise.
#[derive(Clone, Debug)]
pub struct ForceSpreader {
    markers: Markers,
    kernel: DeltaKernel,
    origin: Point2,
    cell: f64,
    dims: [usize; 2],
    bin_start: Vec<usize>,
    bin_items: Vec<usize>,
}

impl ForceSpreader {
    pub fn new(markers: Markers, kernel: DeltaKernel) -> Self {
        let cell = kernel.box_halfwidth();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &markers.positions {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if markers.positions.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let dims = [
            ((hi[0] - lo[0]) / cell).floor() as usize + 1,
            ((hi[1] - lo[1]) / cell).floor() as usize + 1,
        ];
        let bin_of = |p: &Point2| -> usize {
            let bx = (((p[0] - lo[0]) / cell).floor() as usize).min(dims[0] - 1);
            let by = (((p[1] - lo[1]) / cell).floor() as usize).min(dims[1] - 1);
            by * dims[0] + bx
        };
        let mut counts = vec![0usize; dims[0] * dims[1] + 1];
        for p in &markers.positions {
            counts[bin_of(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0usize; markers.positions.len()];
        for (i, p) in markers.positions.iter().enumerate() {
            let b = bin_of(p);
            items[fill[b]] = i;
            fill[b] += 1;
        }
        Self {
            markers,
            kernel,
            origin: lo,
            cell,
            dims,
            bin_start: counts,
            bin_items: items,
        }
    }

    pub fn markers(&self) -> &Markers {
        &self.markers
    }

    pub fn kernel(&self) -> &DeltaKernel {
        &self.kernel
    }

    /// Spread force at `x` using the bin grid.
    pub fn evaluate(&self, x: Point2) -> Vec2 {
        let mut candidates: SmallVec<[usize; 64]> = SmallVec::new();
        let fx = ((x[0] - self.origin[0]) / self.cell).floor();
        let fy = ((x[1] - self.origin[1]) / self.cell).floor();
        // bins more than one away hold markers at sup-distance > cell
        if fx < -1.0 || fy < -1.0 || fx > self.dims[0] as f64 || fy > self.dims[1] as f64 {
            return [0.0; 2];
        }
        let (bx, by) = (fx as i64, fy as i64);
        for jy in (by - 1)..=(by + 1) {
            if jy < 0 || jy >= self.dims[1] as i64 {
                continue;
            }
            for jx in (bx - 1)..=(bx + 1) {
                if jx < 0 || jx >= self.dims[0] as i64 {
                    continue;
                }
                let b = jy as usize * self.dims[0] + jx as usize;
                candidates.extend_from_slice(&self.bin_items[self.bin_start[b]..self.bin_start[b + 1]]);
            }
        }
        candidates.sort_unstable();
        let mut acc = [0.0; 2];
        for &i in &candidates {
            marker_term(&self.kernel, &self.markers, i, x, &mut acc);
        }
        acc
    }

    /// Spread force at `x` summing over every marker.
    pub fn evaluate_direct(&self, x: Point2) -> Vec2 {
        let mut acc = [0.0; 2];
        for i in 0..self.markers.positions.len() {
            marker_term(&self.kernel, &self.markers, i, x, &mut acc);
        }
        acc
    }
}
