use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use pint_gfm::config::{load_config, ConfigError};
use pint_gfm::experiments::{apply_seed_override, builtin, propagator_errors, run_experiment};
use pint_gfm::output::{write_experiment, write_propagator_file, write_svg};
use pint_gfm_core::bounds::{gander_hairer_theta, theta, BoundCoefficients};

#[derive(Parser)]
#[command(name = "pint-gfm", version, about = "Block iterations and GFM convergence bounds for parallel-in-time methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML or JSON config file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Regenerate a figure or table: fig2, fig3, fig4, fig5, fig6, table3.
    Reproduce {
        target: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Evaluate δ·θ_{n+1}^k directly.
    Bound {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Index n of θ_{n+1}^k.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<pint_gfm_core::Error>() {
        Some(
            pint_gfm_core::Error::Parameter(_)
            | pint_gfm_core::Error::MissingOperator { .. }
            | pint_gfm_core::Error::Unsupported(_),
        ) => 2,
        Some(_) => 3,
        None => 1,
    }
}

fn emit(dir: &Path, experiments: &[pint_gfm::config::Experiment], svg: bool) -> Result<()> {
    for exp in experiments {
        let result = run_experiment(exp)?;
        for path in write_experiment(dir, &result)? {
            println!("wrote {}", path.display());
        }
        if svg {
            let path = dir.join(format!("{}.svg", exp.name));
            write_svg(&path, &result)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn reproduce(target: &str, dir: &Path, svg: bool) -> Result<()> {
    let mut experiments = builtin(target)?;
    apply_seed_override(&mut experiments)?;
    let rows = experiments
        .iter()
        .map(|e| Ok((e.name.clone(), propagator_errors(e)?)))
        .collect::<pint_gfm_core::Result<Vec<_>>>()?;
    if target == "table3" {
        let path = write_propagator_file(dir, "table3", &rows)?;
        println!("wrote {}", path.display());
        return Ok(());
    }
    let path = write_propagator_file(dir, &format!("{target}_propagators"), &rows)?;
    println!("wrote {}", path.display());
    emit(dir, &experiments, svg)
}

fn bound(alpha: f64, beta: f64, gamma: f64, delta: f64, n: usize, k: usize) -> Result<()> {
    let c = BoundCoefficients::new(alpha, beta, gamma, delta)?;
    let value = delta * theta(n, k, &c)?;
    println!("gfm_bound = {value:.16e}");
    if gamma == 0.0 {
        let gh = delta * gander_hairer_theta(n, k, alpha, beta)?;
        println!("gander_hairer_bound = {gh:.16e}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, svg } => load_config(&config)
            .map_err(anyhow::Error::from)
            .and_then(|exp| emit(&out, &[exp], svg)),
        Command::Reproduce { target, out, svg } => reproduce(&target, &out, svg),
        Command::Bound {
            alpha,
            beta,
            gamma,
            delta,
            n,
            k,
        } => bound(alpha, beta, gamma, delta, n, k),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
