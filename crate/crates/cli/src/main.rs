use std::process::ExitCode;

use aimkit::parallel::configure_threads;
use aimkit_cli::catalog;
use aimkit_cli::oracle::numerov_oracle;
use aimkit_cli::problem::{parse_override, ProblemSpec};
use aimkit_cli::report::{render, Format, Report};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aimkit", version, about = "Eigenvalues by the improved asymptotic iteration method")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file or catalog entry.
    Run(RunArgs),
    /// List catalog problems.
    List,
    /// Print a problem's expressions, parameters and solver settings.
    Show {
        problem: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Lowest eigenvalues from the Numerov finite-difference oracle.
    Oracle {
        problem: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Problem file or catalog name.
    problem: String,
    /// Override a parameter or solver setting.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    nstep: Option<usize>,
    #[arg(long)]
    dprec: Option<u32>,
    /// Convergence tolerance, e.g. 1e-20.
    #[arg(long)]
    tol: Option<String>,
    /// Expansion point as an exact expression, e.g. 1/3.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Root filter: -r, +r, r, +i, -i or c.
    #[arg(long, allow_hyphen_values = true)]
    filter: Option<String>,
    /// Printed fraction digits.
    #[arg(long)]
    digits: Option<usize>,
    #[arg(long, default_value = "table")]
    format: Format,
    /// Also require the root-finder error radius to be below tol.
    #[arg(long)]
    strict_tol: bool,
}

impl RunArgs {
    fn overrides(&self) -> Result<Vec<(String, String)>> {
        let mut out = parse_overrides(&self.set)?;
        let flags = [
            ("nmax", self.nmax.map(|v| v.to_string())),
            ("nstep", self.nstep.map(|v| v.to_string())),
            ("dprec", self.dprec.map(|v| v.to_string())),
            ("tol", self.tol.clone()),
            ("x0", self.x0.clone()),
            ("filter", self.filter.clone()),
            ("digits", self.digits.map(|v| v.to_string())),
            ("tol_mode", self.strict_tol.then(|| "strict".to_string())),
        ];
        out.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
        Ok(out)
    }
}

fn parse_overrides(set: &[String]) -> Result<Vec<(String, String)>> {
    set.iter().map(|s| parse_override(s).map_err(|e| anyhow!(e))).collect()
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let spec = catalog::load(&args.problem)?;
    let resolved = spec.resolve(&args.overrides()?)?;
    let report = Report::solve(&resolved)?;
    print!("{}", render(&report, args.format));
    Ok(if report.trace.converged.is_empty() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn show(name: &str, set: &[String]) -> Result<()> {
    let spec = catalog::load(name)?;
    println!("problem    {}", spec.name);
    if !spec.description.is_empty() {
        println!("           {}", spec.description);
    }
    println!("eigenvalue {}", spec.eigen);
    println!("variable   {}", spec.var);
    println!("lambda0    {}", spec.lambda0);
    println!("s0         {}", spec.s0);
    print_entries("parameters", &spec.parameters);
    print_entries("definitions", &spec.definitions);
    print_entries("required", &spec.required);
    print_entries("solver", &spec.solver);
    match spec.resolve(&parse_overrides(set)?) {
        Ok(r) => {
            println!("\nbound:");
            println!("lambda0 = {}", r.problem.lambda0);
            println!("s0      = {}", r.problem.s0);
            let p = &r.params;
            println!(
                "nmax = {}, nstep = {}, dprec = {}, x0 = {}, filter = {}, digits = {}",
                p.nmax, p.nstep, p.dprec, p.x0, p.filter, p.digits
            );
        }
        Err(e) if !spec.required.is_empty() => println!("\nnot runnable yet: {e}"),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn print_entries(title: &str, entries: &[aimkit_cli::problem::Entry]) {
    if entries.is_empty() {
        return;
    }
    println!("\n[{title}]");
    for e in entries {
        println!("  {} = {}", e.key, e.value);
    }
}

fn oracle(name: &str, count: usize, set: &[String]) -> Result<()> {
    if count == 0 {
        bail!("--count must be at least 1");
    }
    let spec: ProblemSpec = catalog::load(name)?;
    let resolved = spec.resolve(&parse_overrides(set)?)?;
    let o = resolved
        .oracle
        .with_context(|| format!("{} has no [oracle] section", spec.name))?;
    for (k, e) in numerov_oracle(&o, count)?.iter().enumerate() {
        println!("{k:>3} {e:>22.12}");
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Ok(t) = std::env::var("AIMKIT_THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                configure_threads(n);
            }
            _ => {
                eprintln!("error: AIMKIT_THREADS must be a positive integer, found '{t}'");
                return ExitCode::from(1);
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::List => {
            for name in catalog::names() {
                let desc = catalog::load(name).map(|s| s.description).unwrap_or_default();
                println!("{name:<10} {desc}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Show { problem, set } => show(&problem, &set).map(|_| ExitCode::SUCCESS),
        Command::Oracle { problem, count, set } => oracle(&problem, count, &set).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
