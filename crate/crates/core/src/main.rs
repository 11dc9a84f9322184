use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use ibfem::config::{load_config, ReferenceSpec, StudyConfig};
use ibfem::kernel::{log_log_slopes, weighted_lp_scaling, DeltaKernel, ProfileKind};
use ibfem::report::{emit_report, ReportFormat};
use ibfem::study::{assemble_level, immersed_boundary, run_jump, run_study, solver_options};

#[derive(Parser)]
#[command(name = "ibfem", version, about = "Immersed boundary FEM for stationary Stokes flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the convergence ladder and print the rate tables.
    Study {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "csv")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Solve the levels concurrently.
        #[arg(long)]
        parallel_levels: bool,
    },
    /// Solve a single level and print solution statistics.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Mesh parameter N; defaults to the finest configured level.
        #[arg(long)]
        n: Option<usize>,
        /// Write the saddle point matrix in Matrix Market format.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
        /// Write the mesh as plain-text vertex and cell lists.
        #[arg(long)]
        dump_mesh: Option<PathBuf>,
    },
    /// Report kernel moments and weighted L^p scaling slopes.
    KernelCheck {
        #[arg(long, value_enum, default_value = "cosine")]
        profile: ProfileArg,
    },
    /// Probe the pressure jump across the immersed circle.
    Jump {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    quad_order: Option<u32>,
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    /// `analytic` or `fine:N`.
    #[arg(long)]
    reference: Option<String>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ProfileArg {
    Cosine,
    Hat,
}

impl From<ProfileArg> for ProfileKind {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Cosine => ProfileKind::Cosine,
            ProfileArg::Hat => ProfileKind::Hat,
        }
    }
}

impl Common {
    fn resolve(&self) -> ibfem::Result<StudyConfig> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => StudyConfig::default(),
        };
        if let Some(q) = self.quad_order {
            cfg.quad_order = q;
        }
        if let Some(p) = self.profile {
            cfg.profile = p.into();
        }
        if let Some(r) = &self.reference {
            cfg.reference = r.parse::<ReferenceSpec>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(path: Option<&PathBuf>) -> ibfem::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> ibfem::Result<()> {
    match cli.command {
        Command::Study {
            common,
            format,
            out,
            parallel_levels,
        } => {
            let mut cfg = common.resolve()?;
            cfg.parallel_levels |= parallel_levels;
            let result = run_study(&cfg)?;
            for l in &result.levels {
                log::info!(
                    "N = {}: residual {:.3e}, assembly {:.2?}, solve {:.2?}, errors {:.2?}",
                    l.n,
                    l.residual,
                    l.timings.assembly,
                    l.timings.solve,
                    l.timings.error
                );
            }
            let mut w = output(out.as_ref())?;
            w.write_all(emit_report(&result, format).as_bytes())?;
            w.flush()?;
        }
        Command::Solve {
            common,
            n,
            dump_matrix,
            dump_mesh,
        } => {
            let cfg = common.resolve()?;
            let n = n.unwrap_or_else(|| *cfg.levels.last().expect("validated"));
            let boundary = immersed_boundary(&cfg)?;
            let (system, markers) = assemble_level(&cfg, boundary.as_ref(), n)?;
            if let Some(p) = dump_matrix {
                system.op.assemble().write_matrix_market(BufWriter::new(File::create(p)?))?;
            }
            if let Some(p) = dump_mesh {
                system.spaces.mesh().write_text(BufWriter::new(File::create(p)?))?;
            }
            let sol = system.solve(&solver_options(&cfg))?;
            let umax = sol
                .vertex_velocity
                .iter()
                .chain(&sol.bubble_velocity)
                .map(|u| u[0].hypot(u[1]))
                .fold(0.0, f64::max);
            let (pmin, pmax) = sol
                .pressure
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p)));
            println!("N = {n}");
            println!("h = {:.6}", system.spaces.mesh().h);
            println!("markers = {markers}");
            println!("unknowns = {}", system.op.dim());
            println!("relative residual = {:.3e}", sol.residual);
            println!("max |u_h| at nodes = {umax:.6e}");
            println!("pressure range = [{pmin:.6}, {pmax:.6}]");
        }
        Command::KernelCheck { profile } => {
            let kind: ProfileKind = profile.into();
            let eps = [0.2, 0.1, 0.05, 0.025];
            println!("profile = {kind}");
            for &e in &eps {
                println!("eps = {e}: moment = {:.12}", DeltaKernel::new(kind, e, 2)?.moment_zero());
            }
            for (p, w) in [(1.0, 0), (2.0, 0), (1.0, 1), (2.0, 1), (1.5, 1)] {
                let series = weighted_lp_scaling(kind, 2, &eps, p, w)?;
                let slopes = log_log_slopes(&series);
                let expected = w as f64 - 2.0 + 2.0 / p;
                let text: Vec<_> = slopes.iter().map(|s| format!("{s:.4}")).collect();
                println!("p = {p}, weight |y|^{w}: slopes [{}], expected {expected:.4}", text.join(", "));
            }
        }
        Command::Jump { common, n } => {
            let cfg = common.resolve()?;
            let n = n.unwrap_or_else(|| *cfg.levels.last().expect("validated"));
            let (_, jump) = run_jump(&cfg, n)?;
            println!("N = {n}: pressure jump = {jump:.6}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
