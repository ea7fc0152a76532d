//! The `latticespec` command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::estimators::{estimate_on_grid, EstimationGrid};
use crate::fields::{simulate, FieldModel};
use crate::harness::{run_experiment, ExperimentConfig};
use crate::io;
use crate::kernels::{validate_kernel, Bandwidth, KernelConfig, KernelFamily};
use crate::lattice::LatticeSpec;
use crate::spectra::periodogram_of;

#[derive(Debug, Parser)]
#[command(name = "latticespec", version, about = "Spectral analysis of random fields on 2-D lattices")]
pub struct Cli {
    /// Worker threads for parallel work.
    #[arg(long, global = true, env = "LATTICESPEC_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a field from a JSON model and write it as CSV.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        /// `d1xd2`, e.g. `64x64`.
        #[arg(long)]
        lattice: LatticeSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the periodogram of a field CSV.
    Transform {
        #[arg(long)]
        field: PathBuf,
        /// Declared lattice; inferred from the indices when absent.
        #[arg(long)]
        lattice: Option<LatticeSpec>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kernel spectral density estimate of a field CSV.
    Estimate {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        lattice: Option<LatticeSpec>,
        #[arg(long, default_value = "epanechnikov")]
        kernel: KernelFamily,
        /// `h`, `h1,h2` or `pow:beta` for `h_k = d_k^-beta`.
        #[arg(long)]
        bandwidth: Bandwidth,
        /// `fourier`, `uniform:m` or `fourier+uniform:m`.
        #[arg(long, default_value = "fourier")]
        grid: EstimationGrid,
        /// Model file whose spectrum adds `f_true` and `abs_err` columns.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a Monte Carlo experiment and write `report.json` and `report.csv`.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Override the number of replications.
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Override the lattices; repeatable.
        #[arg(long)]
        lattice: Vec<LatticeSpec>,
        /// Override the kernel family (keeps the configured bandwidth).
        #[arg(long)]
        kernel: Option<KernelFamily>,
        #[arg(long)]
        bandwidth: Option<Bandwidth>,
    },
    /// Print numerical regularity probes of a kernel as JSON.
    ValidateKernel {
        #[arg(long)]
        kernel: KernelFamily,
        #[arg(long)]
        bandwidth: Bandwidth,
        #[arg(long)]
        lattice: LatticeSpec,
    },
}

fn read_text(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn read_model(path: &PathBuf) -> Result<FieldModel> {
    FieldModel::from_json(&read_text(path)?)
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        // fails only if a pool already exists, as in repeated in-process runs
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Simulate {
            model,
            lattice,
            seed,
            out,
        } => {
            let model = read_model(&model)?;
            let field = simulate(&model, lattice, seed)?;
            io::write_field_file(&field, &out)?;
            println!("mean {:.6}", field.mean());
            println!("variance {:.6}", field.variance());
        }
        Command::Transform { field, lattice, out } => {
            let v = io::read_field_file(&field, lattice)?;
            io::write_periodogram_file(&periodogram_of(&v), &out)?;
            println!("wrote {} ordinates to {}", v.spec().size(), out.display());
        }
        Command::Estimate {
            field,
            lattice,
            kernel,
            bandwidth,
            grid,
            truth,
            out,
        } => {
            let truth = truth.as_ref().map(read_model).transpose()?;
            let v = io::read_field_file(&field, lattice)?;
            let k = KernelConfig {
                family: kernel,
                bandwidth,
            }
            .resolve(v.spec())?;
            let mut est = estimate_on_grid(&periodogram_of(&v), &k, grid)?;
            if let Some(m) = &truth {
                est = est.with_truth(m)?;
            }
            io::write_estimate_file(&est, &out)?;
            println!("sup f_hat {:.6e}", est.sup());
            if let Some(e) = est.sup_abs_error() {
                println!("sup |f_hat - f| {e:.6e}");
            }
        }
        Command::Experiment {
            config,
            out_dir,
            reps,
            seed,
            lattice,
            kernel,
            bandwidth,
        } => {
            let mut cfg = ExperimentConfig::from_json(&read_text(&config)?)?;
            if let Some(r) = reps {
                cfg.replications = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if !lattice.is_empty() {
                cfg.lattices = lattice;
            }
            if kernel.is_some() || bandwidth.is_some() {
                let base = cfg.kernel;
                let family = kernel.or(base.map(|k| k.family));
                let bw = bandwidth.or(base.map(|k| k.bandwidth));
                match (family, bw) {
                    (Some(family), Some(bandwidth)) => cfg.kernel = Some(KernelConfig { family, bandwidth }),
                    _ => {
                        return Err(Error::Config(
                            "--kernel and --bandwidth are both needed when the config has no kernel".into(),
                        ))
                    }
                }
            }
            cfg.validate()?;
            std::fs::create_dir_all(&out_dir)?;
            let report = run_experiment(&cfg)?;
            report.write_json(&out_dir.join("report.json"))?;
            report.write_csv(&out_dir.join("report.csv"))?;
            for r in &report.rows {
                let se = r.se.map(|s| format!("{s:.4e}")).unwrap_or_else(|| "-".into());
                println!("{:<8} {:<30} {:>14.6e} se {se}", r.lattice.to_string(), r.statistic, r.estimate);
            }
            println!("wrote {}", out_dir.display());
        }
        Command::ValidateKernel {
            kernel,
            bandwidth,
            lattice,
        } => {
            let k = KernelConfig {
                family: kernel,
                bandwidth,
            }
            .resolve(lattice)?;
            let report = validate_kernel(&k, lattice);
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

/// Parses arguments, runs and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
