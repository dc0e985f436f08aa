//! `christoffel`: batch computations of Christoffel functions on planar domains.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use christoffel::PrecisionMode;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{DomainSource, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "christoffel", version, about = "Christoffel functions of planar domains")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Domain description file (TOML or JSON).
    #[arg(long, global = true, env = "CHRISTOFFEL_DOMAIN", conflicts_with = "gallery")]
    domain: Option<PathBuf>,

    /// Built-in domain: disc, square, triangle, lens, lens(H), blob, drop, half-disc.
    #[arg(long, global = true, env = "CHRISTOFFEL_GALLERY")]
    gallery: Option<String>,

    /// Comma-separated degrees.
    #[arg(long, global = true, env = "CHRISTOFFEL_N", value_delimiter = ',')]
    n: Vec<usize>,

    /// Point grid, `cart:NX,NY` or `corner:J,K`; repeatable.
    #[arg(long, global = true, env = "CHRISTOFFEL_GRID")]
    grid: Vec<String>,

    /// Quadrature tolerance.
    #[arg(long, global = true, env = "CHRISTOFFEL_TOL", default_value_t = 1e-10)]
    tol: f64,

    #[arg(long, global = true, env = "CHRISTOFFEL_PRECISION", value_enum, default_value_t = Precision::Double)]
    precision: Precision,

    #[arg(long, global = true, env = "CHRISTOFFEL_SEED", default_value_t = 0)]
    seed: u64,

    /// Output directory.
    #[arg(long, global = true, env = "CHRISTOFFEL_OUT", default_value = "christoffel-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Precision {
    Double,
    Extended,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate λ_n and the closed-form profile at grid or file points.
    Lambda {
        /// CSV of `x,y` points, used in addition to any grids.
        #[arg(long, env = "CHRISTOFFEL_POINTS")]
        points: Option<PathBuf>,
    },
    /// Build a needle polynomial and sample it against its decay envelope.
    Needle {
        #[arg(long, value_enum)]
        kind: commands::needle::Kind,
        /// `key=value` pairs: t, r1, r2, lam, h, x, y, zeta.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// Constant that violations are measured against; defaults to the fit.
        #[arg(long)]
        reference: Option<f64>,
        #[arg(long)]
        emit_profile: Option<PathBuf>,
    },
    /// Run a verification suite and write its report.
    Verify {
        /// core, ball, cornered, grain, needles, norm, affine, videnskii.
        #[arg(long, env = "CHRISTOFFEL_SUITE", default_value = "core")]
        suite: String,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        beta: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Render SVGs from a ratio CSV or a needle profile CSV.
    Plot {
        #[arg(long)]
        input: PathBuf,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let c = &cli.common;
    let domain = match (&c.domain, &c.gallery) {
        (Some(p), _) => Some(DomainSource::File(p.clone())),
        (None, Some(g)) => Some(DomainSource::Gallery(g.clone())),
        (None, None) => None,
    };
    let (command, points, extra) = match &cli.command {
        Command::Lambda { points } => ("lambda", points.clone(), vec![]),
        Command::Needle { kind, params, reference, emit_profile } => {
            let name = kind.to_possible_value().expect("no skipped variants").get_name().to_string();
            let mut extra = vec![("kind".to_string(), name)];
            extra.push(("params".into(), params.join(",")));
            if let Some(r) = reference {
                extra.push(("reference".into(), r.to_string()));
            }
            if let Some(p) = emit_profile {
                extra.push(("emit_profile".into(), p.display().to_string()));
            }
            ("needle", None, extra)
        }
        Command::Verify { suite, beta, trials } => (
            "verify",
            None,
            vec![("suite".into(), suite.clone()), ("beta".into(), beta.to_string()), ("trials".into(), trials.to_string())],
        ),
        Command::Plot { input } => ("plot", None, vec![("input".into(), input.display().to_string())]),
    };
    let config = RunConfig {
        command: command.into(),
        domain,
        degrees: c.n.clone(),
        grids: c.grid.clone(),
        points,
        tol: c.tol,
        precision: match c.precision {
            Precision::Double => PrecisionMode::Double,
            Precision::Extended => PrecisionMode::Extended,
        },
        seed: c.seed,
        out: c.out.clone(),
        extra,
    };
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = build_config(&cli)?;
    match &cli.command {
        Command::Lambda { .. } => commands::lambda::run(&config),
        Command::Needle { kind, params, reference, emit_profile } => {
            commands::needle::run(&config, *kind, params, *reference, emit_profile.as_deref())
        }
        Command::Verify { suite, beta, trials } => commands::verify::run(&config, suite, *beta, *trials),
        Command::Plot { input } => commands::plot::run(&config, input),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
