use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use fem_dwis::experiment::{load_model, run_prepared, ExperimentConfig, Prepared, SamplerKind};
use fem_dwis::fem::{is_rigid_eigenvalue, modal_analysis};

#[derive(Parser)]
#[command(name = "fem-dwis", version, about = "Bayesian FE model updating from measured frequencies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and print the TME table.
    Run {
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: the config's `output_dir`, else ./out/<config stem>).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Samplers to run, replacing the config list. Repeatable.
        #[arg(long = "sampler", value_parser = parse_sampler)]
        samplers: Vec<SamplerKind>,
    },
    /// Modal analysis of a model at a parameter vector.
    Modal {
        /// Model file or builtin:cantilever / builtin:aircraft_frame.
        #[arg(long)]
        model: String,
        /// Comma-separated parameter values (default: nominal).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Option<Vec<f64>>,
        /// Number of modes, rigid ones included.
        #[arg(long, default_value_t = 10)]
        modes: usize,
        /// Write mode shapes as CSV.
        #[arg(long)]
        shapes: Option<PathBuf>,
    },
    /// Check a config and its inputs without sampling.
    Validate { config: PathBuf },
}

fn parse_sampler(s: &str) -> std::result::Result<SamplerKind, String> {
    SamplerKind::parse(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            output,
            samplers,
        } => run(&config, seed, output, samplers),
        Command::Modal {
            model,
            theta,
            modes,
            shapes,
        } => modal(&model, theta, modes, shapes.as_deref()),
        Command::Validate { config } => validate(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn config_base(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run(path: &Path, seed: Option<u64>, output: Option<PathBuf>, samplers: Vec<SamplerKind>) -> Result<()> {
    let mut config = ExperimentConfig::load(path)?;
    let base = config_base(path);
    if let Some(s) = seed {
        config.seed = s;
    }
    if !samplers.is_empty() {
        config.samplers = samplers;
    }
    let out_dir = match (output, &config.output_dir) {
        (Some(o), _) => o,
        (None, Some(d)) => base.join(d),
        (None, None) => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "experiment".into());
            PathBuf::from("out").join(stem)
        }
    };
    let prepared = Prepared::new(&config, &base)?;
    let summary = run_prepared(&prepared, &out_dir)
        .with_context(|| format!("experiment failed; partial output in {}", out_dir.display()))?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", summary.table());
    println!("output: {}", out_dir.display());
    Ok(())
}

fn modal(source: &str, theta: Option<Vec<f64>>, n_modes: usize, shapes: Option<&Path>) -> Result<()> {
    if n_modes == 0 {
        bail!("--modes must be at least 1");
    }
    let model = load_model(source, Path::new("."))?;
    let theta = theta.unwrap_or_else(|| model.nominal().to_vec());
    model.parameter_space().check(&theta)?;
    let result = modal_analysis(&model, &theta, n_modes)?;
    println!("model: {} ({} nodes, {} free DOFs)", model.name(), model.nodes().len(), model.n_dofs());
    println!("{:>4} {:>14}  kind", "mode", "Hz");
    for (i, (f, l)) in result.frequencies.iter().zip(&result.eigenvalues).enumerate() {
        let kind = if is_rigid_eigenvalue(*l) { "rigid" } else { "elastic" };
        println!("{:>4} {:>14.6}  {kind}", i + 1, f);
    }
    if let Some(path) = shapes {
        let layout = model.dof_layout();
        let mut text = String::from("node,dof");
        for i in 0..result.modes.ncols() {
            write!(text, ",mode_{}", i + 1)?;
        }
        text.push('\n');
        for (g, slot) in layout.index.iter().enumerate() {
            write!(text, "{},{}", g / 6, g % 6)?;
            for j in 0..result.modes.ncols() {
                let v = slot.map_or(0.0, |r| result.modes[(r, j)]);
                write!(text, ",{v}")?;
            }
            text.push('\n');
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("mode shapes: {}", path.display());
    }
    Ok(())
}

fn validate(path: &Path) -> Result<()> {
    let config = ExperimentConfig::load(path)?;
    let p = Prepared::new(&config, &config_base(path))?;
    let space = p.model.parameter_space();
    println!("model: {} ({} nodes, {} elements, {} free DOFs)",
        p.model.name(), p.model.nodes().len(), p.model.elements().len(), p.model.n_dofs());
    println!("parameters: {}", space.names.join(", "));
    println!("measured modes: {}", p.data.len());
    let samplers: Vec<&str> = p.config.samplers.iter().map(|s| s.name()).collect();
    println!("samplers: {}", if samplers.is_empty() { "none".into() } else { samplers.join(", ") });
    println!("ok");
    Ok(())
}
