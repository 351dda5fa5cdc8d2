use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "tame", version, about = "Tame and wild automorphisms of Q[x1,x2,x3]")]
struct Cli {
    /// Largest degree of the products a membership search may form.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    budget: u32,
    /// Largest number of unknowns in a parametric reduction system.
    #[arg(long = "detector-budget", global = true, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..))]
    detector_budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Composition phi then psi: x_i -> psi_i(phi).
    Compose { phi: String, psi: String },
    /// Sum of the component degrees.
    Degree { map: String },
    /// Jacobian determinant.
    Jacobian { map: String },
    /// Evaluate a word of elementary generators.
    EvalWord { word: String },
    /// Decide tameness by repeated reduction.
    DecideTame {
        /// Map as `f1; f2; f3` or `@file`; omit with --random.
        map: Option<String>,
        /// Use seeded random tame maps instead of an input.
        #[arg(long, conflicts_with = "map")]
        random: bool,
        #[arg(long, default_value_t = 1, requires = "random")]
        trials: usize,
    },
    /// Randomized check of the defining relations, the symmetric-group
    /// identities and the Steinberg identities.
    VerifyRelations {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long = "steinberg-trials", default_value_t = 100)]
        steinberg_trials: usize,
    },
    /// Print a seeded random word of elementary generators.
    RandomWord {
        #[arg(long = "max-len", default_value_t = 8)]
        max_len: usize,
        #[arg(long = "max-degree", default_value_t = 24)]
        max_degree: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        config: tame_core::reduction::Config { budget: cli.budget, detector_budget: cli.detector_budget as usize },
        seed: cli.seed,
        format: cli.format,
    };
    let outcome = match cli.command {
        Command::Compose { phi, psi } => commands::compose(&ctx, &phi, &psi),
        Command::Degree { map } => commands::degree(&ctx, &map),
        Command::Jacobian { map } => commands::jacobian(&ctx, &map),
        Command::EvalWord { word } => commands::eval_word(&ctx, &word),
        Command::DecideTame { map: Some(map), .. } => commands::decide_tame(&ctx, &map),
        Command::DecideTame { map: None, random: true, trials } => commands::decide_random(&ctx, trials),
        Command::DecideTame { map: None, random: false, .. } => {
            Err(commands::Failure::usage("decide-tame needs a map or --random"))
        }
        Command::VerifyRelations { trials, steinberg_trials } => commands::verify_relations(&ctx, trials, steinberg_trials),
        Command::RandomWord { max_len, max_degree } => commands::random_word(&ctx, max_len, max_degree),
    };
    match outcome {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
