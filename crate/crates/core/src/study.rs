//! Convergence ladder: one IB solve per level, errors against a reference,
//! rates between consecutive levels.

use std::sync::Arc;
use std::time::{Duration, Instant};

use log::info;
use rayon::prelude::*;

use crate::analysis::{
    convergence_rates, error_norms, pressure_jump_probe, CircleJumpSolution, ErrorOptions, RateRow, ReferenceSolution,
};
use crate::config::{BoundarySpec, ReferenceSpec, StudyConfig};
use crate::error::Result;
use crate::kernel::DeltaKernel;
use crate::lagrangian::{ForceSpreader, ImmersedBoundary};
use crate::mesh::Mesh;
use crate::solver::{SolveMethod, SolverOptions};
use crate::stokes::{DiscreteSolution, FemSpaces, StokesSystem};

const CIRCLE_RADIUS: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub assembly: Duration,
    pub solve: Duration,
    pub error: Duration,
}

/// One solved level.
#[derive(Clone, Debug)]
pub struct LevelSolution {
    pub n: usize,
    pub h: f64,
    pub epsilon: f64,
    pub markers: usize,
    pub dofs: usize,
    pub method: SolveMethod,
    pub timings: Timings,
    pub solution: Arc<DiscreteSolution>,
}

#[derive(Clone, Debug)]
pub struct LevelSummary {
    pub n: usize,
    pub h: f64,
    pub epsilon: f64,
    pub markers: usize,
    pub dofs: usize,
    pub method: SolveMethod,
    pub residual: f64,
    pub iterations: usize,
    pub timings: Timings,
}

/// Rate table for one norm order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub r: f64,
    pub rows: Vec<RateRow>,
}

#[derive(Clone, Debug)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub levels: Vec<LevelSummary>,
    pub reference: Option<LevelSummary>,
    pub reports: Vec<ConvergenceReport>,
}

/// The immersed boundary described by the config, if any.
pub fn immersed_boundary(cfg: &StudyConfig) -> Result<Option<ImmersedBoundary>> {
    Ok(match &cfg.boundary {
        BoundarySpec::Circle => Some(ImmersedBoundary::circle(cfg.domain.center(), CIRCLE_RADIUS, cfg.kappa)),
        BoundarySpec::None => None,
        BoundarySpec::File(p) => Some(ImmersedBoundary::from_file(p)?),
    })
}

/// Exact solution for the built-in circle or boundary-free configurations.
pub fn exact_solution(cfg: &StudyConfig) -> Option<CircleJumpSolution> {
    let kappa = match cfg.boundary {
        BoundarySpec::Circle => cfg.kappa,
        BoundarySpec::None => 0.0,
        BoundarySpec::File(_) => return None,
    };
    Some(CircleJumpSolution {
        g: cfg.g,
        kappa,
        center: cfg.domain.center(),
        radius: CIRCLE_RADIUS,
        domain: cfg.domain,
    })
}

pub fn solver_options(cfg: &StudyConfig) -> SolverOptions {
    SolverOptions {
        tol: cfg.solver_tol,
        direct_threshold: cfg.direct_threshold,
        ..SolverOptions::default()
    }
}

/// Assembled IB problem on the `n x n` mesh, with its marker count.
pub fn assemble_level(
    cfg: &StudyConfig,
    boundary: Option<&ImmersedBoundary>,
    n: usize,
) -> Result<(StokesSystem, usize)> {
    let mesh = Arc::new(Mesh::uniform(n, cfg.domain)?);
    let kernel = DeltaKernel::new(cfg.profile, cfg.gamma1 * mesh.h, 2)?;
    let spreader = match boundary {
        Some(ib) => {
            let partition = ib.partition(cfg.markers_for(n))?;
            let markers = ib.markers(&partition)?;
            markers.validate_separation(&cfg.domain, &kernel)?;
            Some(ForceSpreader::new(markers, kernel))
        }
        None => None,
    };
    let markers = spreader.as_ref().map_or(0, |s| s.markers().positions.len());
    let g = cfg.g;
    let force = |x| match &spreader {
        Some(s) => {
            let f = s.evaluate(x);
            [f[0] + g[0], f[1] + g[1]]
        }
        None => g,
    };
    let system = StokesSystem::assemble(FemSpaces::new(mesh), cfg.nu, force, cfg.quad_order)?;
    Ok((system, markers))
}

/// Builds and solves the IB problem on the `n x n` mesh.
pub fn solve_level(cfg: &StudyConfig, boundary: Option<&ImmersedBoundary>, n: usize) -> Result<LevelSolution> {
    let t0 = Instant::now();
    let (system, markers) = assemble_level(cfg, boundary, n)?;
    let h = system.spaces.mesh().h;
    let dofs = system.op.dim();
    let assembly = t0.elapsed();
    let t1 = Instant::now();
    let opts = solver_options(cfg);
    let solution = system.solve(&opts)?;
    let solve = t1.elapsed();
    let method = if dofs <= opts.direct_threshold {
        SolveMethod::Direct
    } else {
        SolveMethod::Minres
    };
    info!(
        "N = {n}: {dofs} unknowns, {markers} markers, residual {:.3e}, assembly {:.2?}, solve {:.2?}",
        solution.residual, assembly, solve
    );
    Ok(LevelSolution {
        n,
        h,
        epsilon: cfg.gamma1 * h,
        markers,
        dofs,
        method,
        timings: Timings {
            assembly,
            solve,
            error: Duration::ZERO,
        },
        solution: Arc::new(solution),
    })
}

impl LevelSolution {
    pub fn summary(&self) -> LevelSummary {
        LevelSummary {
            n: self.n,
            h: self.h,
            epsilon: self.epsilon,
            markers: self.markers,
            dofs: self.dofs,
            method: self.method,
            residual: self.solution.residual,
            iterations: self.solution.iterations,
            timings: self.timings,
        }
    }
}

fn map_levels<T: Send>(cfg: &StudyConfig, ns: &[usize], f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    if cfg.parallel_levels {
        ns.par_iter().map(|&n| f(n)).collect()
    } else {
        ns.iter().map(|&n| f(n)).collect()
    }
}

pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let boundary = immersed_boundary(cfg)?;
    let (reference, ref_level) = match cfg.reference {
        ReferenceSpec::Analytic => {
            let exact = exact_solution(cfg).ok_or_else(|| {
                crate::Error::config("reference", "analytic reference needs the built-in circle or no boundary")
            })?;
            (ReferenceSolution::Analytic(Arc::new(exact)), None)
        }
        ReferenceSpec::FineMesh(n) => {
            let level = solve_level(cfg, boundary.as_ref(), n)?;
            (ReferenceSolution::FineMesh(level.solution.clone()), Some(level.summary()))
        }
    };
    let per_level = map_levels(cfg, &cfg.levels, |n| {
        let mut level = solve_level(cfg, boundary.as_ref(), n)?;
        let t = Instant::now();
        let opts = ErrorOptions {
            quad_order: cfg.quad_order.max(4),
            band_halfwidth: 2.0 * level.epsilon,
            ..ErrorOptions::default()
        };
        let errs = error_norms(&level.solution, &reference, &cfg.r_list, &opts)?;
        level.timings.error = t.elapsed();
        info!("N = {n}: errors in {:.2?}", level.timings.error);
        Ok((level.summary(), errs))
    })?;
    let mut reports = Vec::with_capacity(cfg.r_list.len());
    for (k, &r) in cfg.r_list.iter().enumerate() {
        let series: Vec<_> = per_level.iter().map(|(s, e)| (s.h, e[k].as_array())).collect();
        reports.push(ConvergenceReport {
            r,
            rows: convergence_rates(&series)?,
        });
    }
    Ok(StudyResult {
        config: cfg.clone(),
        levels: per_level.into_iter().map(|(s, _)| s).collect(),
        reference: ref_level,
        reports,
    })
}

/// Pressure jump across the circle at level `n`.
pub fn run_jump(cfg: &StudyConfig, n: usize) -> Result<(LevelSolution, f64)> {
    let boundary = immersed_boundary(cfg)?;
    let level = solve_level(cfg, boundary.as_ref(), n)?;
    let jump = pressure_jump_probe(&level.solution, cfg.domain.center(), cfg.jump_radii, cfg.jump_samples)?;
    Ok((level, jump))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn single_level_has_no_rates() {
        let cfg = parse_config("levels = [10]\nreference = \"fine:20\"").unwrap();
        let res = run_study(&cfg).unwrap();
        assert_eq!(res.levels.len(), 1);
        for rep in &res.reports {
            assert_eq!(rep.rows.len(), 1);
            assert!(rep.rows[0].rates.is_none());
        }
        assert!(res.levels[0].residual <= 1e-10);
    }

    #[test]
    fn separation_guard_propagates() {
        let cfg = parse_config("levels = [10]\ngamma1 = 1.5\nreference = \"analytic\"").unwrap();
        assert!(matches!(run_study(&cfg), Err(crate::Error::BoundaryTooClose { .. })));
    }
}
