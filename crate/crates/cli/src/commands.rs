use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fourier_iga_core::calibration::{calibrate, HoldoutPair, JudgmentRecord};
use fourier_iga_core::codec::{decode as decode_genome, normalize};
use fourier_iga_core::corpus::{generate, sample_corpus};
use fourier_iga_core::harness::{
    average_off_diagonal, doe_sweep, format_sig, run_target_convergence, similarity_matrix,
};
use fourier_iga_core::similarity::{compute_bounds, genome_distance, index_from_distance, ModelKind};
use fourier_iga_core::{ClosedCurve, CodecConfig, CoefficientBounds, Error, GaConfig, Genome, SimilarityParams};
use fourier_iga_service::ServiceConfig;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use crate::{Format, Model};

#[derive(Debug)]
pub enum Kind {
    Validation,
    Precondition,
    Io,
}

#[derive(Debug)]
pub struct CliError {
    kind: Kind,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Validation,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Io,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Validation => 2,
            Kind::Precondition => 3,
            Kind::Io => 4,
        }
    }

    pub fn to_json(&self) -> String {
        let kind = match self.kind {
            Kind::Validation => "validation",
            Kind::Precondition => "precondition",
            Kind::Io => "io",
        };
        json!({"error": kind, "message": self.message}).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::NoSelectableParent | Error::Precondition(_) => Kind::Precondition,
            _ => Kind::Validation,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CliError::validation(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

/// `*.json` files of a directory, sorted by name.
fn json_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(e.to_string()))?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn read_genome_dir(dir: &Path) -> CliResult<(Vec<String>, Vec<Genome>)> {
    let files = json_files(dir)?;
    let names = files
        .iter()
        .map(|p| p.file_stem().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let genomes = files.iter().map(|p| read_json(p)).collect::<CliResult<Vec<Genome>>>()?;
    Ok((names, genomes))
}

fn corpus_genomes() -> CliResult<Vec<Genome>> {
    let codec = CodecConfig::default();
    Ok(sample_corpus().iter().map(|c| codec.ingest(c)).collect::<Result<Vec<_>, _>>()?)
}

pub fn encode(curve: &Path, harmonics: usize, points: usize) -> CliResult<String> {
    let curve: ClosedCurve = read_json(curve)?;
    let codec = CodecConfig {
        harmonic_count: harmonics,
        interpolated_point_count: points,
        decode_precision: harmonics,
        ..CodecConfig::default()
    };
    codec.validate()?;
    Ok(pretty(&codec.ingest(&curve)?))
}

pub fn decode(genome: &Path, precision: Option<usize>, samples: usize) -> CliResult<String> {
    let genome: Genome = read_json(genome)?;
    let p = precision.unwrap_or(genome.harmonic_count());
    Ok(pretty(&decode_genome(&genome, p, samples)?))
}

pub fn similarity(first: &Path, second: &Path, params: &Path) -> CliResult<String> {
    let params: SimilarityParams = read_json(params)?;
    let (k, l): (Genome, Genome) = (read_json(first)?, read_json(second)?);
    let distance = genome_distance(&k, &l, &params)?;
    Ok(pretty(&json!({"similarity": index_from_distance(distance), "distance": distance})))
}

pub fn matrix(dir: &Path, params: &Path, format: Format) -> CliResult<String> {
    let params: SimilarityParams = read_json(params)?;
    let (names, genomes) = read_genome_dir(dir)?;
    let m = similarity_matrix(&genomes, &params)?;
    Ok(match format {
        Format::Json => pretty(&json!({
            "names": names,
            "matrix": m,
            "average_off_diagonal": average_off_diagonal(&m),
        })),
        Format::Csv => {
            let mut out = String::from("name");
            for n in &names {
                write!(out, ",{n}").unwrap();
            }
            out.push('\n');
            for (n, row) in names.iter().zip(&m) {
                out.push_str(n);
                for v in row {
                    write!(out, ",{}", format_sig(*v)).unwrap();
                }
                out.push('\n');
            }
            out
        }
    })
}

#[derive(Deserialize)]
struct HoldoutLine {
    left: Genome,
    right: Genome,
    level: u8,
}

pub fn fit(
    judgments: &Path,
    model: Model,
    bounds: Option<&Path>,
    reference: Option<&Path>,
    gene_span: usize,
    holdout: Option<&Path>,
) -> CliResult<String> {
    let records: Vec<JudgmentRecord> = read_jsonl(judgments)?;
    let bounds: CoefficientBounds = match (bounds, reference) {
        (Some(path), _) => read_json(path)?,
        (None, Some(dir)) => {
            let (_, genomes) = read_genome_dir(dir)?;
            let canonical = genomes.iter().map(normalize).collect::<Result<Vec<_>, _>>()?;
            compute_bounds(&canonical, gene_span)?
        }
        (None, None) => compute_bounds(&corpus_genomes()?, gene_span)?,
    };
    let holdout: Vec<HoldoutPair> = match holdout {
        Some(path) => read_jsonl::<HoldoutLine>(path)?
            .into_iter()
            .map(|h| (h.left, h.right, h.level))
            .collect(),
        None => Vec::new(),
    };
    let kind = match model {
        Model::Exp => ModelKind::Exponential,
        Model::Weighted => ModelKind::Weighted,
    };
    Ok(pretty(&calibrate(&records, &bounds, gene_span, kind, &holdout)?))
}

pub fn doe(curve: &Path, p_list: &[usize], n_list: &[usize], format: Format) -> CliResult<String> {
    let curve: ClosedCurve = read_json(curve)?;
    let grid = doe_sweep(&curve, p_list, n_list)?;
    Ok(match format {
        Format::Json => pretty(&grid),
        Format::Csv => grid.to_csv(),
    })
}

pub struct TargetRunArgs {
    pub target: PathBuf,
    pub initial: Option<PathBuf>,
    pub generations: u32,
    pub seed: u64,
    pub repeats: u64,
    pub params: Option<PathBuf>,
    pub population: usize,
    pub turnover: f64,
    pub mutation: f64,
    pub format: Format,
}

pub fn target_run(args: TargetRunArgs) -> CliResult<String> {
    if args.repeats == 0 {
        return Err(CliError::validation("--repeats must be at least 1"));
    }
    let target: Genome = read_json(&args.target)?;
    let initial = match &args.initial {
        Some(dir) => read_genome_dir(dir)?.1,
        None => corpus_genomes()?,
    };
    let params = match &args.params {
        Some(path) => read_json(path)?,
        None => SimilarityParams::default_for(&initial)?,
    };
    let base = GaConfig {
        population_size: args.population,
        turnover_rate: args.turnover,
        mutation_probability: args.mutation,
        ..GaConfig::default()
    };
    base.validate()?;

    let seeds: Vec<u64> = (0..args.repeats).map(|k| args.seed + k).collect();
    let runs = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let config = base.clone().with_seed(seed);
                let (target, initial, params) = (&target, &initial, &params);
                scope.spawn(move || run_target_convergence(target, initial, &config, params, args.generations))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;

    Ok(match args.format {
        Format::Csv if runs.len() == 1 => runs[0].trace.to_csv(),
        Format::Csv => {
            let mut out = String::from("seed,generation,avg_fitness,best_fitness,avg_similarity\n");
            for (seed, run) in seeds.iter().zip(&runs) {
                for line in run.trace.to_csv().lines().skip(1) {
                    writeln!(out, "{seed},{line}").unwrap();
                }
            }
            out
        }
        Format::Json => pretty(
            &seeds
                .iter()
                .zip(&runs)
                .map(|(seed, run)| {
                    json!({
                        "seed": seed,
                        "trace": run.trace.entries,
                        "best_similarity": run.best_similarity,
                        "best": {"id": run.best.id, "genome": run.best.genome},
                    })
                })
                .collect::<Vec<_>>(),
        ),
    })
}

pub fn corpus(dir: &Path, seed: u64, size: usize, genomes: bool) -> CliResult<String> {
    if size < 2 {
        return Err(CliError::validation("a corpus needs at least 2 curves"));
    }
    let curves = generate(size, seed);
    let write = |sub: &str, name: String, text: String| -> CliResult<()> {
        let d = dir.join(sub);
        fs::create_dir_all(&d).map_err(|e| CliError::io(format!("{}: {e}", d.display())))?;
        let path = d.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
    };
    let codec = CodecConfig::default();
    for (i, c) in curves.iter().enumerate() {
        write("curves", format!("{i:02}.json"), pretty(c))?;
        if genomes {
            write("genomes", format!("{i:02}.json"), pretty(&codec.ingest(c)?))?;
        }
    }
    Ok(pretty(&json!({
        "curves": curves.len(),
        "genomes": if genomes { curves.len() } else { 0 },
        "dir": dir.display().to_string(),
    })))
}

pub fn serve(config: Option<&Path>) -> CliResult<String> {
    let config = match config {
        Some(path) => ServiceConfig::load(path).map_err(CliError::validation)?,
        None => ServiceConfig::default(),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io(e.to_string()))?;
    runtime.block_on(fourier_iga_service::serve(config)).map_err(CliError::io)?;
    Ok(String::new())
}
