use clap::{Parser, Subcommand};
use dnls_lab::commands;
use dnls_lab::config::RunConfig;
use dnls_lab::error::{LabError, LabResult};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dnls", version, about = "Transition-layer asymptotics of defocusing NLS on a nonzero background")]
struct Cli {
    /// TOML run configuration; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Restrict to one transition layer.
    #[arg(long, global = true, value_parser = ["minus1", "plus1"])]
    case: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute scattering data and write it as JSON.
    Scatter,
    /// Tabulate the Painlevé II solution with u ~ κ Ai(s) as s → +∞.
    Painleve {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long, allow_negative_numbers = true)]
        s_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        s_max: Option<f64>,
    },
    /// Leading-order predictions in the transition layers.
    Predict {
        /// Scattering file written by `scatter`; defaults to <out>/scattering.json.
        #[arg(long)]
        scattering: Option<PathBuf>,
        /// Extra evaluation point "x,t"; may be repeated.
        #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
        points: Vec<(f64, f64)>,
    },
    /// Evolve the datum and write snapshots at the configured times.
    Evolve,
    /// Evolve, predict and fit the decay of the error.
    Compare,
    /// Sampled audit of the phase-function geometry.
    Signature {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected x,t")?;
    let x = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let t = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((x, t))
}

fn load(cli: &Cli) -> LabResult<(RunConfig, PathBuf)> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &cli.case {
        cfg.cases = vec![c.clone()];
    }
    cfg.validate()?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    Ok((cfg, out))
}

fn run(cli: &Cli) -> LabResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(LabError::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LabError::Validation(format!("thread pool: {e}")))?;
    }
    let (cfg, out) = load(cli)?;
    match &cli.command {
        Command::Scatter => {
            let (data, path) = commands::scatter(&cfg, &out)?;
            println!(
                "{} discrete eigenvalue(s), {} nu panels, r(-1) = {:.6}, r(1) = {:.6}",
                data.discrete.len(),
                data.table.panels.len(),
                data.edges[0].r_limit.norm(),
                data.edges[1].r_limit.norm()
            );
            println!("wrote {}", path.display());
        }
        Command::Painleve { kappa, s_min, s_max } => {
            let path = commands::painleve(&cfg, *kappa, *s_min, *s_max, &out)?;
            println!("wrote {}", path.display());
        }
        Command::Predict { scattering, points } => {
            let src = scattering.clone().unwrap_or_else(|| out.join(commands::SCATTERING_FILE));
            for p in commands::predict(&cfg, &src, points, &out)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Evolve => {
            for p in commands::evolve(&cfg, &out)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Compare => {
            println!("{}", commands::compare_cmd(&cfg, &out)?);
            println!("wrote {}", out.join(commands::COMPARE_REPORT).display());
        }
        Command::Signature { seed } => {
            println!("{}", commands::signature(&cfg, *seed, &out)?);
            println!("wrote {}", out.join(commands::SIGNATURE_REPORT).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dnls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
