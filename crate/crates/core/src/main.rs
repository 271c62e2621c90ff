use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bprk::driver::{convergence_study, run, write_report, RunConfig};
use bprk::problems::{runnable, PROBLEM_NAMES};
use bprk::Error;

const EXIT_CONFIG: u8 = 4;

#[derive(Parser)]
#[command(
    name = "bprk",
    version,
    about = "Bounds-preserving Runge-Kutta solver for periodic conservation laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write report.csv, snapshot.csv and config.txt
    Run(Common),
    /// Run a time-step convergence study (uses the `dts` setting)
    Converge(Common),
    /// List the built-in problems and their defaults
    ListProblems,
}

#[derive(Args)]
struct Common {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a setting, e.g. --set n=256 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, Error> {
        let overrides = self
            .set
            .iter()
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{kv}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut config = RunConfig::load(self.config.as_deref(), &overrides)?;
        if let Some(out) = &self.out {
            config.out_dir = Some(out.clone());
        }
        Ok(config)
    }
}

fn list_problems() {
    println!("name,dims,n,dt,t_end,scheme,bounds");
    for name in PROBLEM_NAMES {
        let s = runnable(name).expect("built-in problem");
        println!(
            "{},{},{},{:e},{},{},{}",
            s.name, s.dims, s.n, s.dt, s.t_end, s.scheme, s.bounds
        );
    }
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::ListProblems => {
            list_problems();
            Ok(0)
        }
        Command::Run(common) => {
            let config = common.load()?;
            let report = run(&config)?;
            let dir = config.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            write_report(&report, &dir)?;
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            eprintln!(
                "{}: {} steps to t={} ({})",
                config.problem,
                report.steps,
                report.final_t,
                report.outcome.label()
            );
            if let bprk::driver::Outcome::Diverged { reason, .. } | bprk::driver::Outcome::Infeasible { reason, .. } =
                &report.outcome
            {
                eprintln!("reason: {reason}");
            }
            Ok(report.outcome.exit_code() as u8)
        }
        Command::Converge(common) => {
            let config = common.load()?;
            if config.dts.is_empty() {
                return Err(Error::Config("set dts=dt1,dt2,... for a convergence study".into()));
            }
            let table = convergence_study(&config, &config.dts)?;
            let csv = table.to_csv();
            match &config.out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                        path: dir.clone(),
                        source,
                    })?;
                    let path = dir.join("convergence.csv");
                    std::fs::write(&path, &csv).map_err(|source| Error::Io { path, source })?;
                }
                None => print!("{csv}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidArgument(_) => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
