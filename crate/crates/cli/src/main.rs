//! `diraclab`: batch checks for Poisson, Dirac and Manin-triple data.
//!
//! Every run prints one JSON report on stdout. Exit status is 0 when all
//! criteria pass, 1 when a check fails and 2 on bad input.

mod commands;
mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::{dirac, flows, manin, poisson, Ctx};
use report::{Outcome, Report};

#[derive(Parser, Debug)]
#[command(name = "diraclab", version, about = "Certify Poisson, Dirac and Manin-triple structures")]
struct Cli {
    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the tolerance of the command's numeric criteria.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Record wall time in the report (makes reports run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Poisson bivectors.
    #[command(subcommand)]
    Poisson(PoissonCmd),
    /// Dirac structures, gauge transformations and Poisson maps.
    #[command(subcommand)]
    Dirac(DiracCmd),
    /// Certify the symplectic realization of the default spray as a dual pair.
    Realize {
        #[arg(long)]
        poisson: PathBuf,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Sample `‖p‖` bound.
        #[arg(long, default_value_t = 0.2)]
        radius: f64,
        /// Half-width of the cube the base points are drawn from.
        #[arg(long = "box", default_value_t = 1.0)]
        q_box: f64,
        /// RK4 step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 8)]
        quadrature: usize,
        /// Trajectories must keep `‖p‖` below this.
        #[arg(long, default_value_t = 1.0)]
        domain: f64,
    },
    /// Check that the Moser flow of a 1-form family trivializes the gauge family.
    Moser {
        #[arg(long)]
        poisson: PathBuf,
        /// 1-form on ℝⁿ, or on ℝⁿ⁺¹ with time as the last coordinate.
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        time: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long = "box", default_value_t = 0.5)]
        q_box: f64,
    },
    /// Linearize an Euler-like vector field and report the conjugation residual.
    Linearize {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Manin triples and the Poisson Lie groups they define.
    #[command(subcommand)]
    Manin(ManinCmd),
}

#[derive(Subcommand, Debug)]
enum PoissonCmd {
    /// Exact Jacobi identity.
    Check {
        #[arg(long)]
        file: PathBuf,
    },
    /// `{f, g}`.
    Bracket {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// The Jacobiator trivector.
    Jacobiator {
        #[arg(long)]
        file: PathBuf,
    },
    /// Rank and leaf symplectic form at a point.
    Leaf {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Subcommand, Debug)]
enum DiracCmd {
    /// Exact Courant integrability of a frame.
    CheckIntegrability {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Gauge transform of a Poisson structure by a closed 2-form.
    Gauge {
        #[arg(long)]
        poisson: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Pullback of a Dirac structure along a polynomial map, at a point.
    Pullback {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Exact check that a polynomial map is (anti-)Poisson.
    PoissonMap {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        anti: bool,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TripleSource {
    /// One of the built-in triples.
    #[arg(long)]
    builtin: Option<String>,
    /// Triple JSON file.
    #[arg(long)]
    triple: Option<PathBuf>,
}

impl TripleSource {
    fn arg(&self) -> manin::TripleArg<'_> {
        manin::TripleArg {
            builtin: self.builtin.as_deref(),
            file: self.triple.as_deref(),
        }
    }
}

#[derive(Subcommand, Debug)]
enum ManinCmd {
    /// Exact Manin-triple axioms for the triple and its dual.
    Check {
        #[command(flatten)]
        src: TripleSource,
    },
    /// The Drinfeld bivector at a chart point.
    Bivector {
        #[command(flatten)]
        src: TripleSource,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// The dressing action of a `𝔡` element at a chart point.
    Dressing {
        #[command(flatten)]
        src: TripleSource,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        zeta: String,
    },
    /// Metric, bracket and Maurer–Cartan identities of the e-map.
    EMap {
        #[command(flatten)]
        src: TripleSource,
        #[arg(long, allow_hyphen_values = true)]
        zeta1: String,
        #[arg(long, allow_hyphen_values = true)]
        zeta2: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long = "box", default_value_t = 1.0)]
        q_box: f64,
    },
    /// Multiplication is a Poisson map, at seeded pairs.
    Multiplicativity {
        #[command(flatten)]
        src: TripleSource,
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long = "box", default_value_t = 1.0)]
        q_box: f64,
    },
    /// Lagrangian-subalgebra data for a Poisson homogeneous space.
    Homspace {
        #[command(flatten)]
        src: TripleSource,
        #[arg(long)]
        data: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<Outcome> {
    let ctx = Ctx {
        seed: cli.seed,
        tol: cli.tol,
    };
    let pt = |s: &str| input::point(s);
    match &cli.command {
        Command::Poisson(c) => match c {
            PoissonCmd::Check { file } => poisson::check(&ctx, file),
            PoissonCmd::Bracket { file, f, g } => poisson::bracket(&ctx, file, f, g),
            PoissonCmd::Jacobiator { file } => poisson::jacobiator(&ctx, file),
            PoissonCmd::Leaf { file, point } => poisson::leaf(&ctx, file, &pt(point)?),
        },
        Command::Dirac(c) => match c {
            DiracCmd::CheckIntegrability { frame } => dirac::check_integrability(&ctx, frame),
            DiracCmd::Gauge { poisson, omega, point } => dirac::gauge(&ctx, poisson, omega, &pt(point)?),
            DiracCmd::Pullback { frame, map, point } => dirac::pullback(&ctx, frame, map, &pt(point)?),
            DiracCmd::PoissonMap {
                map,
                source,
                target,
                anti,
            } => dirac::poisson_map(&ctx, map, source, target, *anti),
        },
        Command::Realize {
            poisson,
            samples,
            radius,
            q_box,
            step,
            quadrature,
            domain,
        } => flows::realize(
            &ctx,
            &flows::RealizeArgs {
                poisson,
                samples: *samples,
                radius: *radius,
                q_box: *q_box,
                step: *step,
                quadrature: *quadrature,
                domain: *domain,
            },
        ),
        Command::Moser {
            poisson,
            family,
            time,
            step,
            samples,
            q_box,
        } => flows::moser(
            &ctx,
            &flows::MoserArgs {
                poisson,
                family,
                time: *time,
                step: *step,
                samples: *samples,
                q_box: *q_box,
            },
        ),
        Command::Linearize {
            field,
            samples,
            radius,
            step,
        } => flows::linearize(&ctx, field, *samples, *radius, *step),
        Command::Manin(c) => match c {
            ManinCmd::Check { src } => manin::check(&ctx, &src.arg()),
            ManinCmd::Bivector { src, point } => manin::bivector(&ctx, &src.arg(), &pt(point)?),
            ManinCmd::Dressing { src, point, zeta } => manin::dressing(&ctx, &src.arg(), &pt(point)?, &pt(zeta)?),
            ManinCmd::EMap {
                src,
                zeta1,
                zeta2,
                samples,
                q_box,
            } => manin::e_map(
                &ctx,
                &src.arg(),
                &manin::EMapArgs {
                    zeta1: &pt(zeta1)?,
                    zeta2: &pt(zeta2)?,
                    samples: *samples,
                    q_box: *q_box,
                },
            ),
            ManinCmd::Multiplicativity { src, pairs, q_box } => {
                manin::multiplicativity(&ctx, &src.arg(), *pairs, *q_box)
            }
            ManinCmd::Homspace { src, data } => manin::homspace(&ctx, &src.arg(), data),
        },
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DIRACLAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("DIRACLAB_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn emit(report: &Report, file: Option<&PathBuf>) -> i32 {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    // a closed pipe (`| head`) is not worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(path) = file {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("diraclab: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    report.exit_code()
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let command: Vec<String> = argv.iter().skip(1).cloned().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let r = Report::finish(command, 0, Err(anyhow::anyhow!("{}", e.render().to_string().trim_end())));
            std::process::exit(emit(&r, None));
        }
    };
    let start = Instant::now();
    let outcome = configure_threads().and_then(|_| run(&cli));
    let mut report = Report::finish(command, cli.seed, outcome);
    if cli.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    std::process::exit(emit(&report, cli.report.as_ref()));
}
