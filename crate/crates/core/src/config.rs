//! Study configuration: a flat TOML table with every key optional.
//!
//! ```toml
//! box = [-1.0, 1.0, -1.0, 1.0]   # xlo, xhi, ylo, yhi
//! boundary = "circle"            # "circle" | "none" | "file:PATH"
//! kappa = 2.0
//! g = [1.0, 0.0]
//! nu = 1.0
//! profile = "cosine"             # "cosine" | "hat"
//! levels = [10, 20, 40, 80]
//! gamma1 = 1.0                   # epsilon = gamma1 * h
//! markers_per_n = 1.0            # M = markers_per_n * N
//! reference = "fine:160"         # "fine:N" | "analytic"
//! r_list = [1.0, 1.5, 2.0]
//! quad_order = 6
//! solver_tol = 1e-10
//! direct_threshold = 200000
//! jump_radii = [0.35, 0.65]
//! jump_samples = 720
//! parallel_levels = false
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{AxisBox, Vec2};
use crate::kernel::ProfileKind;

#[derive(Clone, Debug, PartialEq)]
pub enum BoundarySpec {
    /// Circle of radius 1/2 at the box centre, `X = c + (cos, sin) / 2`.
    Circle,
    /// No immersed boundary; only the body force `g` acts.
    None,
    /// Sampled `theta X1 X2 F1 F2` rows.
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceSpec {
    FineMesh(usize),
    Analytic,
}

impl std::str::FromStr for ReferenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "analytic" {
            return Ok(Self::Analytic);
        }
        let n = s
            .strip_prefix("fine:")
            .ok_or_else(|| Error::config("reference", format!("expected `analytic` or `fine:N`, got `{s}`")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::config("reference", format!("bad mesh size in `{s}`")))?;
        if n == 0 {
            return Err(Error::config("reference", "fine mesh size must be positive"));
        }
        Ok(Self::FineMesh(n))
    }
}

impl std::fmt::Display for ReferenceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::FineMesh(n) => write!(f, "fine:{n}"),
            Self::Analytic => f.write_str("analytic"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub domain: AxisBox,
    pub boundary: BoundarySpec,
    pub kappa: f64,
    pub g: Vec2,
    pub nu: f64,
    pub profile: ProfileKind,
    pub levels: Vec<usize>,
    pub gamma1: f64,
    pub markers_per_n: f64,
    pub reference: ReferenceSpec,
    pub r_list: Vec<f64>,
    pub quad_order: u32,
    pub solver_tol: f64,
    pub direct_threshold: usize,
    pub jump_radii: (f64, f64),
    pub jump_samples: usize,
    pub parallel_levels: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            domain: AxisBox::symmetric_unit(),
            boundary: BoundarySpec::Circle,
            kappa: 2.0,
            g: [1.0, 0.0],
            nu: 1.0,
            profile: ProfileKind::Cosine,
            levels: vec![10, 20, 40, 80],
            gamma1: 1.0,
            markers_per_n: 1.0,
            reference: ReferenceSpec::FineMesh(160),
            r_list: vec![1.0, 1.5, 2.0],
            quad_order: 6,
            solver_tol: 1e-10,
            direct_threshold: 200_000,
            jump_radii: (0.35, 0.65),
            jump_samples: 720,
            parallel_levels: false,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
struct RawConfig {
    #[serde(rename = "box")]
    domain: Option<[f64; 4]>,
    boundary: Option<String>,
    kappa: Option<f64>,
    g: Option<[f64; 2]>,
    nu: Option<f64>,
    profile: Option<String>,
    levels: Option<Vec<i64>>,
    gamma1: Option<f64>,
    markers_per_n: Option<f64>,
    reference: Option<String>,
    r_list: Option<Vec<f64>>,
    quad_order: Option<i64>,
    solver_tol: Option<f64>,
    direct_threshold: Option<i64>,
    jump_radii: Option<[f64; 2]>,
    jump_samples: Option<i64>,
    parallel_levels: Option<bool>,
}

fn positive_int(field: &str, v: i64) -> Result<usize> {
    if v <= 0 {
        return Err(Error::config(field, format!("must be a positive integer, got {v}")));
    }
    Ok(v as usize)
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::config(field, format!("must be positive and finite, got {v}")));
    }
    Ok(v)
}

pub fn parse_config(text: &str) -> Result<StudyConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.starts_with("unknown field"))
            .unwrap_or("<document>")
            .to_string();
        Error::Config { field, message: msg }
    })?;
    let d = StudyConfig::default();
    let mut cfg = StudyConfig {
        domain: match raw.domain {
            Some([xlo, xhi, ylo, yhi]) => {
                AxisBox::new([xlo, ylo], [xhi, yhi]).map_err(|e| Error::config("box", e.to_string()))?
            }
            None => d.domain,
        },
        boundary: match raw.boundary.as_deref().map(str::trim) {
            None | Some("circle") => BoundarySpec::Circle,
            Some("none") => BoundarySpec::None,
            Some(s) => match s.strip_prefix("file:") {
                Some(p) if !p.trim().is_empty() => BoundarySpec::File(PathBuf::from(p.trim())),
                _ => {
                    return Err(Error::config(
                        "boundary",
                        format!("expected `circle`, `none` or `file:PATH`, got `{s}`"),
                    ))
                }
            },
        },
        kappa: raw.kappa.unwrap_or(d.kappa),
        g: raw.g.unwrap_or(d.g),
        nu: positive("nu", raw.nu.unwrap_or(d.nu))?,
        profile: match raw.profile {
            Some(p) => p.parse().map_err(|_| Error::config("profile", format!("unknown profile `{p}`")))?,
            None => d.profile,
        },
        levels: match raw.levels {
            Some(l) => l
                .iter()
                .enumerate()
                .map(|(i, &n)| positive_int(&format!("levels[{i}]"), n))
                .collect::<Result<_>>()?,
            None => d.levels,
        },
        gamma1: positive("gamma1", raw.gamma1.unwrap_or(d.gamma1))?,
        markers_per_n: positive("markers_per_n", raw.markers_per_n.unwrap_or(d.markers_per_n))?,
        reference: d.reference,
        r_list: raw.r_list.unwrap_or(d.r_list),
        quad_order: match raw.quad_order {
            Some(q) => positive_int("quad_order", q)? as u32,
            None => d.quad_order,
        },
        solver_tol: positive("solver_tol", raw.solver_tol.unwrap_or(d.solver_tol))?,
        direct_threshold: match raw.direct_threshold {
            Some(t) if t >= 0 => t as usize,
            Some(t) => return Err(Error::config("direct_threshold", format!("must be >= 0, got {t}"))),
            None => d.direct_threshold,
        },
        jump_radii: raw.jump_radii.map(|[a, b]| (a, b)).unwrap_or(d.jump_radii),
        jump_samples: match raw.jump_samples {
            Some(s) => positive_int("jump_samples", s)?,
            None => d.jump_samples,
        },
        parallel_levels: raw.parallel_levels.unwrap_or(d.parallel_levels),
    };
    cfg.reference = match raw.reference {
        Some(r) => r.parse()?,
        None => ReferenceSpec::FineMesh(2 * cfg.levels.iter().copied().max().unwrap_or(80)),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<StudyConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::config("levels", "at least one level is required"));
        }
        for (i, w) in self.levels.windows(2).enumerate() {
            if w[1] != 2 * w[0] {
                return Err(Error::config(
                    format!("levels[{}]", i + 1),
                    format!("levels must double, got {} after {}", w[1], w[0]),
                ));
            }
        }
        if self.r_list.is_empty() {
            return Err(Error::config("r_list", "at least one norm order is required"));
        }
        for (i, &r) in self.r_list.iter().enumerate() {
            if !(r >= 1.0 && r.is_finite()) {
                return Err(Error::config(format!("r_list[{i}]"), format!("norm order must be >= 1, got {r}")));
            }
        }
        if !(1..=6).contains(&self.quad_order) {
            return Err(Error::config("quad_order", format!("supported orders are 1..=6, got {}", self.quad_order)));
        }
        positive("gamma1", self.gamma1)?;
        positive("nu", self.nu)?;
        positive("markers_per_n", self.markers_per_n)?;
        if !self.kappa.is_finite() || !self.g.iter().all(|v| v.is_finite()) {
            return Err(Error::config("kappa", "forcing parameters must be finite"));
        }
        let (ri, ro) = self.jump_radii;
        if !(ri >= 0.0 && ro > ri) {
            return Err(Error::config("jump_radii", format!("need 0 <= r_in < r_out, got ({ri}, {ro})")));
        }
        if matches!(self.boundary, BoundarySpec::File(_)) && self.reference == ReferenceSpec::Analytic {
            return Err(Error::config("reference", "analytic reference needs the built-in circle or no boundary"));
        }
        Ok(())
    }

    /// Number of Lagrangian intervals at level `n`.
    pub fn markers_for(&self, n: usize) -> usize {
        ((self.markers_per_n * n as f64).round() as usize).max(1)
    }

    /// Echo of the configuration in its own input format.
    pub fn to_toml(&self) -> String {
        let boundary = match &self.boundary {
            BoundarySpec::Circle => "circle".to_string(),
            BoundarySpec::None => "none".to_string(),
            BoundarySpec::File(p) => format!("file:{}", p.display()),
        };
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let levels = self.levels.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ");
        format!(
            "box = [{:?}, {:?}, {:?}, {:?}]\nboundary = {:?}\nkappa = {:?}\ng = [{}]\nnu = {:?}\nprofile = \"{}\"\n\
             levels = [{levels}]\ngamma1 = {:?}\nmarkers_per_n = {:?}\nreference = \"{}\"\nr_list = [{}]\n\
             quad_order = {}\nsolver_tol = {:e}\ndirect_threshold = {}\njump_radii = [{:?}, {:?}]\n\
             jump_samples = {}\nparallel_levels = {}\n",
            self.domain.lo[0],
            self.domain.hi[0],
            self.domain.lo[1],
            self.domain.hi[1],
            boundary,
            self.kappa,
            list(&self.g),
            self.nu,
            self.profile,
            self.gamma1,
            self.markers_per_n,
            self.reference,
            list(&self.r_list),
            self.quad_order,
            self.solver_tol,
            self.direct_threshold,
            self.jump_radii.0,
            self.jump_radii.1,
            self.jump_samples,
            self.parallel_levels,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(parse_config("").unwrap(), StudyConfig::default());
    }

    #[test]
    fn rejections() {
        let field = |t: &str| match parse_config(t) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field("levels = [10, 30]"), "levels[1]");
        assert_eq!(field("gamma1 = 0.0"), "gamma1");
        assert_eq!(field("profile = \"gauss\""), "profile");
        assert_eq!(field("reference = \"fine:x\""), "reference");
        assert_eq!(field("bogus = 1"), "bogus");
        assert_eq!(field("r_list = [0.5]"), "r_list[0]");
        assert_eq!(field("box = [1.0, -1.0, 0.0, 1.0]"), "box");
    }

    #[test]
    fn default_reference_tracks_levels() {
        let c = parse_config("levels = [4, 8]").unwrap();
        assert_eq!(c.reference, ReferenceSpec::FineMesh(16));
        let c = parse_config("levels = [4, 8]\nreference = \"analytic\"").unwrap();
        assert_eq!(c.reference, ReferenceSpec::Analytic);
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config("boundary = \"none\"\nprofile = \"hat\"\nkappa = 0.5\nlevels = [8]").unwrap();
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
        let d = StudyConfig::default();
        assert_eq!(parse_config(&d.to_toml()).unwrap(), d);
    }
}
