//! `wstar`: command-line front end for the laboratory.
//!
//! Every command prints one JSON object on stdout tagged with
//! `"schema": "wstar/1"`. Exit status is 0 on success, 2 on a usage error,
//! 3 when an input fails validation and 4 when a computation fails.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "wstar", version, about = "Finite-dimensional W*-probability spaces: modular theory, sentences, Powers states and stage sequences")]
pub struct Cli {
    /// Cap on worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Space files: validation of the density
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Modular theory: the modular automorphism group and the KMS condition
    #[command(subcommand)]
    Modular(ModularCmd),
    /// Sentences of continuous logic evaluated by sup/inf search
    #[command(subcommand)]
    Sentence(SentenceCmd),
    /// Powers states and the T-invariant of their tensor sequences
    #[command(subcommand)]
    Powers(PowersCmd),
    /// Stage sequences and the #-norm ideal of the ultraproduct
    #[command(subcommand)]
    Seq(SeqCmd),
}

#[derive(Subcommand, Debug)]
pub enum SpaceCmd {
    /// Check that a space file holds a faithful density (Hermitian, trace 1, invertible)
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Conjugation,
    Coefficient,
}

#[derive(Subcommand, Debug)]
pub enum ModularCmd {
    /// Apply the modular automorphism σ_t(x) = a^{it} x a^{-it}
    Sigma {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value = "coefficient")]
        method: Method,
    },
    /// Check the KMS boundary identities and strip bound for φ at time t
    Kms {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum SentenceCmd {
    /// Evaluate a closed formula (or a library sentence) on a space
    #[command(group(ArgGroup::new("source").required(true).args(["formula", "builtin"])))]
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub space: PathBuf,
    /// Formula text, e.g. `sup x:S1. sharp(comm(x, adj(x)))`
    #[arg(long)]
    pub formula: Option<String>,
    /// Library sentence: chi_factor, theta or phi_t (needs --t)
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Random draws per leaf search
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub ascent_steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum PowersCmd {
    /// Classify a constant-state tensor sequence from the zero set of the T-invariant modulus
    #[command(group(ArgGroup::new("state").required(true).args(["lambda", "eigs", "inf"])))]
    Classify {
        /// Powers parameter λ in (0, 1]
        #[arg(long)]
        lambda: Option<f64>,
        /// Comma-separated density eigenvalues
        #[arg(long)]
        eigs: Option<String>,
        /// `λ,μ` for the three-level state diag(λ, μ, 1)/(1+λ+μ)
        #[arg(long)]
        inf: Option<String>,
        #[arg(long)]
        tmax: f64,
        #[arg(long)]
        steps: usize,
        /// Also write the scan as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the T-invariant modulus of a Powers state on a grid as CSV
    TinvScan {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        tmax: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum SeqCmd {
    /// #-norms along a stage sequence and the ideal-membership proxy
    Decay {
        /// constant_element, tensor_power_diag, twisted, unitary_twist, matrix_unit_power,
        /// random_bounded, block_scalars, scaled_matrix_unit or custom
        #[arg(long)]
        family: String,
        /// JSON object of family parameters, e.g. {"lambda":0.5,"c":0.9,"t":1.0}
        #[arg(long, default_value = "{}")]
        params: String,
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value_t = wstar::ultra::DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Also write `n,sharp_norm` rows as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli.command) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(payload) = &f.payload {
                println!("{payload}");
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
