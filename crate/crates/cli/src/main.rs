//! `gashell` command-line front end.

mod config;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gashell::verify::{self, Suite, VerifyOptions};

use config::{CaseConfig, ChartSpec, Format, GridSpec, MaterialSpec, MotionSpec, Output, TermSpec, SCHEMA};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Stack for worker threads; the exact stress divergence nests deep jets.
const STACK: usize = 64 << 20;

#[derive(Parser)]
#[command(name = "gashell", version, about = "Elastic shell kinematics, stresses and balance residuals on parametrized surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a case file over its coordinate grid.
    Run {
        config: PathBuf,
        /// Output file; `.csv` selects CSV, anything else JSON. Defaults to JSON on stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a verification suite: geometry, kinematics, stress, balance, linearized or all.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Replace every absolute tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Grid points per axis.
        #[arg(long, default_value_t = VerifyOptions::default().grid)]
        grid: usize,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
        /// Add 0.1 to S^12 before the angular-momentum checks.
        #[arg(long)]
        inject_asymmetry: bool,
    },
    /// Compare the closed-form pre-strained cylinder tables with the general pipeline.
    Cylinder {
        #[arg(long = "R")]
        radius: f64,
        /// Axial pre-strain.
        #[arg(long)]
        eps: f64,
        /// JSON array of perturbation terms.
        #[arg(long)]
        uprime: PathBuf,
        #[arg(long, default_value_t = MaterialSpec::default().young)]
        young: f64,
        #[arg(long, default_value_t = MaterialSpec::default().poisson)]
        poisson: f64,
        #[arg(long, default_value_t = MaterialSpec::default().thickness)]
        thickness: f64,
        /// Grid points per axis over [-1, 1]^2.
        #[arg(long, default_value_t = 3)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: gashell::ShellError| e.to_string())
}

enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Usage(m) => {
                eprintln!("error: {m}");
                ExitCode::from(EXIT_USAGE)
            }
            Failure::Io(m) => {
                eprintln!("error: {m}");
                ExitCode::from(EXIT_IO)
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().stack_size(STACK).build().expect("thread pool")
}

fn run_case(cfg: CaseConfig, output: Option<&Path>) -> Result<bool, Failure> {
    let prepared = cfg.prepare().map_err(|e| Failure::Usage(e.to_string()))?;
    let bundle = pool().install(|| run::run(&prepared));
    let format = match (cfg.format, output) {
        (Some(f), _) => f,
        (None, Some(p)) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    };
    let bytes = match format {
        Format::Json => run::to_json(&prepared, &bundle).map_err(|e| Failure::Io(e.to_string()))?.into_bytes(),
        Format::Csv => run::to_csv(&bundle).map_err(|e| Failure::Io(e.to_string()))?,
    };
    let summary = run::summary(&bundle);
    match output {
        Some(p) => {
            write(p, &bytes)?;
            print!("{summary}");
        }
        None => {
            print!("{}", String::from_utf8_lossy(&bytes));
            eprint!("{summary}");
        }
    }
    Ok(bundle.passed())
}

fn cylinder_config(radius: f64, eps: f64, terms: Vec<TermSpec>, material: MaterialSpec, grid: usize, tol: f64) -> CaseConfig {
    let mut cfg = CaseConfig {
        schema: SCHEMA.into(),
        chart: ChartSpec::Cylinder { radius },
        motion: MotionSpec::CylinderPrestrain { strain: eps, perturbation: terms, eps: 0.0 },
        material,
        grid: GridSpec { x1: [-1.0, 1.0], x2: [-1.0, 1.0], n1: grid, n2: grid },
        time: 0.0,
        differentiation: Default::default(),
        tolerances: Default::default(),
        body_force: Default::default(),
        body_moment: [0.0; 2],
        outputs: vec![Output::Cylinder],
        format: None,
    };
    cfg.tolerances.cylinder = tol;
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, output } => read(&config).and_then(|text| {
            let cfg = CaseConfig::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
            run_case(cfg, output.as_deref())
        }),
        Command::Verify { suite, tol, grid, seed, inject_asymmetry } => {
            let opts = VerifyOptions { tol, grid, seed, inject_asymmetry };
            let handle = std::thread::Builder::new()
                .stack_size(STACK)
                .spawn(move || verify::run(suite, &opts))
                .expect("verify thread");
            match handle.join().expect("verify thread panicked") {
                Ok(report) => {
                    print!("{report}");
                    Ok(report.passed())
                }
                Err(e) => Err(Failure::Usage(e.to_string())),
            }
        }
        Command::Cylinder { radius, eps, uprime, young, poisson, thickness, grid, tol, output } => {
            read(&uprime).and_then(|text| {
                let terms: Vec<TermSpec> = serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", uprime.display())))?;
                let material = MaterialSpec { young, poisson, thickness, ..MaterialSpec::default() };
                run_case(cylinder_config(radius, eps, terms, material, grid, tol), output.as_deref())
            })
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(f) => f.report(),
    }
}
