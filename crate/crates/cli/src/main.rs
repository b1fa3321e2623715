//! `figa`: batch entry points for genomes, similarity, calibration and
//! evolution experiments, plus the HTTP service.
//!
//! Results go to stdout (or `--out`). Failures print
//! `{"error": kind, "message": text}` on stderr and exit with 2 for
//! invalid input, 3 for an unmet precondition and 4 for I/O problems.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "figa", version, about = "Fourier silhouette genomes and interactive evolution")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Model {
    Exp,
    Weighted,
}

#[derive(Subcommand)]
enum Command {
    /// Traced curve JSON -> canonical genome JSON.
    Encode {
        curve: PathBuf,
        #[arg(long, default_value_t = 70)]
        harmonics: usize,
        /// Density of the interpolated curve before encoding.
        #[arg(long, default_value_t = 1500)]
        points: usize,
    },
    /// Genome JSON -> sampled curve JSON.
    Decode {
        genome: PathBuf,
        /// Harmonics used; defaults to all of them.
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long, default_value_t = 1500)]
        samples: usize,
    },
    /// Similarity index (percent) of two genomes.
    Similarity {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        params: PathBuf,
    },
    /// Similarity matrix of every genome file in a directory.
    Matrix {
        dir: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Fit similarity parameters from a judgment log (JSONL).
    Fit {
        #[arg(long)]
        judgments: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
        /// Reference bounds (JSON); alternatively use --reference.
        #[arg(long, conflicts_with = "reference")]
        bounds: Option<PathBuf>,
        /// Directory of genomes to take bounds from.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        gene_span: usize,
        /// Rated pairs (JSONL of {"left", "right", "level"}) for model comparison.
        #[arg(long)]
        holdout: Option<PathBuf>,
    },
    /// Reconstruction error over a grid of precisions and densities.
    Doe {
        curve: PathBuf,
        #[arg(long = "p-list", value_delimiter = ',', default_values_t = [5, 10, 20, 40, 70])]
        p_list: Vec<usize>,
        #[arg(long = "n-list", value_delimiter = ',', default_values_t = [200, 500, 1000, 1500])]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Automated convergence toward a target genome.
    TargetRun {
        #[arg(long)]
        target: PathBuf,
        /// Directory of initial genomes; the bundled corpus when omitted.
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        generations: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Runs seeds seed..seed+repeats, in parallel.
        #[arg(long, default_value_t = 1)]
        repeats: u64,
        /// Similarity params; default constants over the initial bounds when omitted.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        population: usize,
        #[arg(long, default_value_t = 0.7)]
        turnover: f64,
        #[arg(long, default_value_t = 0.3)]
        mutation: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Write the bundled sample corpus as curve (and genome) files.
    Corpus {
        dir: PathBuf,
        #[arg(long, default_value_t = fourier_iga_core::corpus::CORPUS_SEED)]
        seed: u64,
        #[arg(long, default_value_t = fourier_iga_core::corpus::CORPUS_SIZE)]
        size: usize,
        /// Also write canonical genomes next to the curves.
        #[arg(long)]
        genomes: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode { curve, harmonics, points } => commands::encode(&curve, harmonics, points),
        Command::Decode { genome, precision, samples } => commands::decode(&genome, precision, samples),
        Command::Similarity { first, second, params } => commands::similarity(&first, &second, &params),
        Command::Matrix { dir, params, format } => commands::matrix(&dir, &params, format),
        Command::Fit {
            judgments,
            model,
            bounds,
            reference,
            gene_span,
            holdout,
        } => commands::fit(&judgments, model, bounds.as_deref(), reference.as_deref(), gene_span, holdout.as_deref()),
        Command::Doe { curve, p_list, n_list, format } => commands::doe(&curve, &p_list, &n_list, format),
        Command::TargetRun {
            target,
            initial,
            generations,
            seed,
            repeats,
            params,
            population,
            turnover,
            mutation,
            format,
        } => commands::target_run(commands::TargetRunArgs {
            target,
            initial,
            generations,
            seed,
            repeats,
            params,
            population,
            turnover,
            mutation,
            format,
        }),
        Command::Corpus { dir, seed, size, genomes } => commands::corpus(&dir, seed, size, genomes),
        Command::Serve { config } => commands::serve(config.as_deref()),
    };
    match result.and_then(|text| commands::emit(cli.out.as_deref(), &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
