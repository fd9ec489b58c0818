//! `nklab`: run verification suites and inspect the surface catalog.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nklab::catalog;
use nklab::config::{nodes_spec, parse_catalog_ids, parse_nodes};
use nklab::{Error, RunConfig, Status, Suite};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "nklab", version, about = "Numerical checks for holomorphic curves in the nearly-Kähler 6-sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a suite and write the JSON report and CSV residual tables.
    Verify(VerifyArgs),
    /// Inspect the shipped surface catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// List entries with their descriptions.
    List,
    /// Print one entry as JSON.
    Dump { id: String },
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    /// algebra, nk-identities, curve, variation, index, cone or all
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    /// Flat key = value configuration file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Interior quadrature nodes per direction (power of two, at least 16).
    #[arg(long, value_parser = parse_nodes)]
    nodes: Option<usize>,
    /// Tolerance tier override, e.g. `fd1=2e-5`; repeatable.
    #[arg(long = "tol-tier", value_name = "TIER=VALUE")]
    tol_tier: Vec<String>,
    /// Comma-separated catalog ids restricting the per-entry checks.
    #[arg(long)]
    catalog: Option<String>,
    /// Report path; the CSV tables are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run suites concurrently; the report is merged in suite order.
    #[arg(long)]
    parallel: bool,
    /// Directory that replaces the directory part of the report path.
    #[arg(long, env = "NKLAB_OUT_DIR", hide_env_values = true)]
    out_dir: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn build_config(a: &VerifyArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::from_file(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => RunConfig::default(),
    };
    cfg.suite = a.suite;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.nodes {
        cfg.quadrature = nodes_spec(n);
    }
    for t in &a.tol_tier {
        cfg.tolerances.apply(t)?;
    }
    if let Some(c) = &a.catalog {
        cfg.catalog_ids = parse_catalog_ids(c)?;
    }
    if let Some(o) = &a.out {
        cfg.output_path = o.clone();
    }
    if let Some(dir) = &a.out_dir {
        let name = cfg.output_path.file_name().map(Path::new).unwrap_or(Path::new("nklab-report.json"));
        cfg.output_path = dir.join(name);
    }
    cfg.parallel |= a.parallel;
    cfg.validate()?;
    Ok(cfg)
}

fn verify(a: &VerifyArgs) -> ExitCode {
    let cfg = match build_config(a) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("nklab: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = match nklab::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("nklab: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let written = match report.write(&cfg.output_path) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("nklab: writing report: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    for r in &report.records {
        let tag = match r.status {
            Status::Pass => "ok  ",
            Status::Fail => "FAIL",
            Status::Vacuous => "vac ",
        };
        let value = match (&r.verdict, r.residual) {
            (Some(v), _) => v.clone(),
            (None, Some(x)) => format!("{x:.3e}"),
            (None, None) => r.detail.clone().unwrap_or_default(),
        };
        let tol = r.tolerance.map(|t| format!(" (tol {t:.0e})")).unwrap_or_default();
        println!("{tag} {:<58} {value}{tol}", r.key());
        if r.status == Status::Fail {
            println!("     checks: {}", r.anchor);
            if let Some(d) = &r.detail {
                println!("     {d}");
            }
        }
    }
    let s = report.summary;
    println!("{} passed, {} failed, {} vacuous of {}", s.passed, s.failed, s.vacuous, s.total);
    for p in written {
        println!("wrote {}", p.display());
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(a) => verify(&a),
        Command::Catalog { action: CatalogAction::List } => {
            print!("{}", catalog::listing());
            ExitCode::SUCCESS
        }
        Command::Catalog { action: CatalogAction::Dump { id } } => match catalog::lookup(&id) {
            Ok(e) => {
                println!("{}", serde_json::to_string_pretty(&e).expect("entry serializes"));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("nklab: {e}");
                ExitCode::from(EXIT_USAGE)
            }
        },
    }
}
