//! `tsdict` command line interface: fit and apply dictionary classifiers,
//! run seeded benchmarks and compare result files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use tsdict::harness::{
    parse_results_csv, results_to_csv, run_experiment, ClassifierSpec, ExperimentConfig,
    MetricKind,
};
use tsdict::stats::mean_ranks_and_cliques;
use tsdict::{
    build_ensemble_with_space, parse_ts_file, Dataset, DatasetPair, Ensemble, EnsembleConfig,
    EnsembleVariant, Error, SpaceOptions,
};

#[derive(Parser)]
#[command(name = "tsdict", version, about = "Dictionary-based time series classification")]
struct Cli {
    /// Worker threads for parallel benchmark cells (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BuildOptions {
    /// Number of parameter combinations to sample (k).
    #[arg(long, default_value_t = 250)]
    k: usize,

    /// Maximum ensemble size (s).
    #[arg(long = "ensemble-size", default_value_t = 50)]
    ensemble_size: usize,

    /// Time contract for model construction, e.g. `30s`, `5m`, `1h`.
    #[arg(long, value_parser = parse_duration)]
    contract: Option<Duration>,

    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Word lengths to search, a comma-separated subset of 8,10,12,14,16.
    #[arg(long = "word-lengths", value_parser = parse_word_lengths)]
    word_lengths: Option<std::vec::Vec<usize>>,

    /// Maximum spatial pyramid height (1..=3).
    #[arg(long = "max-height", default_value_t = 3)]
    max_height: usize,
}

impl BuildOptions {
    fn space(&self) -> Result<SpaceOptions, CliError> {
        if !(1..=3).contains(&self.max_height) {
            return Err(CliError::new("--max-height must be 1, 2 or 3".into()));
        }
        let mut space = SpaceOptions {
            max_height: self.max_height,
            ..SpaceOptions::default()
        };
        if let Some(lengths) = &self.word_lengths {
            space.word_lengths = lengths.clone();
        }
        Ok(space)
    }

    fn ensemble_config(&self, variant: EnsembleVariant) -> EnsembleConfig {
        EnsembleConfig {
            variant,
            parameter_samples: self.k,
            max_ensemble_size: self.ensemble_size,
            time_contract: self.contract,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier and write the model file.
    Fit {
        /// Classifier variant: boss, cboss, sboss, csboss or tde.
        #[arg(long)]
        variant: EnsembleVariant,

        /// Training data in UCR `.ts` format.
        #[arg(long)]
        train: PathBuf,

        /// Output model path.
        #[arg(long)]
        out: PathBuf,

        #[command(flatten)]
        build: BuildOptions,
    },

    /// Predict a test file with a fitted model.
    Predict {
        /// Model file written by `fit`.
        #[arg(long)]
        model: PathBuf,

        /// Test data in UCR `.ts` format.
        #[arg(long)]
        test: PathBuf,

        /// Predictions CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run seeded resample experiments over datasets and variants.
    Benchmark {
        /// Directory holding the datasets.
        #[arg(long)]
        data: PathBuf,

        /// Comma-separated dataset names resolved under --data.
        #[arg(long, value_delimiter = ',')]
        datasets: Vec<String>,

        /// Comma-separated classifiers: ensemble variants and/or ed1nn.
        #[arg(long, value_delimiter = ',')]
        variants: Vec<String>,

        /// Stratified resamples per dataset (id 0 is the original split).
        #[arg(long, default_value_t = 1)]
        resamples: u64,

        /// Output directory for results.csv; defaults to $TSDICT_OUT_DIR or `.`.
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,

        /// Write train_seconds as 0 so reruns are byte-identical.
        #[arg(long = "zero-timing", default_value_t = false)]
        zero_timing: bool,

        #[command(flatten)]
        build: BuildOptions,
    },

    /// Read result CSVs and report mean ranks and cliques.
    Compare {
        /// One or more results CSV files.
        #[arg(long, value_delimiter = ',', required = true)]
        results: Vec<PathBuf>,

        /// Metric column to rank on.
        #[arg(long, default_value = "accuracy")]
        metric: MetricKind,

        /// Family-wise significance level for the Holm-corrected tests.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn new(message: String) -> Self {
        Self { message, code: 2 }
    }

    fn with_code(message: String, code: u8) -> Self {
        Self { message, code }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match &err {
            Error::IncompleteMatrix { .. } => CliError::with_code(err.to_string(), 3),
            _ => CliError::new(err.to_string()),
        }
    }
}

fn parse_duration(text: &str) -> Result<Duration, String> {
    let text = text.trim();
    let (number, unit) = match text.chars().last() {
        Some('s') => (&text[..text.len() - 1], 1.0),
        Some('m') => (&text[..text.len() - 1], 60.0),
        Some('h') => (&text[..text.len() - 1], 3600.0),
        _ => (text, 1.0),
    };
    let value: f64 = number
        .parse()
        .map_err(|_| format!("cannot parse duration '{text}' (use e.g. 30s, 5m, 1h)"))?;
    if value < 0.0 {
        return Err("duration must be non-negative".into());
    }
    Ok(Duration::from_secs_f64(value * unit))
}

fn parse_word_lengths(text: &str) -> Result<Vec<usize>, String> {
    let mut lengths = Vec::new();
    for token in text.split(',') {
        let l: usize = token
            .trim()
            .parse()
            .map_err(|_| format!("bad word length '{token}'"))?;
        if ![8, 10, 12, 14, 16].contains(&l) {
            return Err(format!("word length {l} not in {{8,10,12,14,16}}"));
        }
        lengths.push(l);
    }
    if lengths.is_empty() {
        return Err("need at least one word length".into());
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths.dedup();
    Ok(lengths)
}

fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))?;
    parse_ts_file(&text)
        .map_err(|e| CliError::new(format!("cannot parse {}: {e}", path.display())))
}

/// Resolve `<data>/<name>/<name>_TRAIN.ts` or `<data>/<name>_TRAIN.ts`.
fn resolve_pair(data: &Path, name: &str) -> Result<DatasetPair, CliError> {
    let candidates = [
        (
            data.join(name).join(format!("{name}_TRAIN.ts")),
            data.join(name).join(format!("{name}_TEST.ts")),
        ),
        (
            data.join(format!("{name}_TRAIN.ts")),
            data.join(format!("{name}_TEST.ts")),
        ),
    ];
    for (train_path, test_path) in &candidates {
        if train_path.exists() && test_path.exists() {
            return Ok(DatasetPair {
                name: name.to_string(),
                train: load_dataset(train_path)?,
                test: load_dataset(test_path)?,
            });
        }
    }
    Err(CliError::new(format!(
        "dataset '{name}' not found: looked for {} and {}",
        candidates[0].0.display(),
        candidates[1].0.display()
    )))
}

fn cmd_fit(
    variant: EnsembleVariant,
    train: &Path,
    out: &Path,
    build: &BuildOptions,
) -> Result<(), CliError> {
    let dataset = load_dataset(train)?;
    let space = build.space()?;
    let config = build.ensemble_config(variant);
    let model = build_ensemble_with_space(&dataset, &config, &space)?;
    model.save(out)?;
    eprintln!(
        "fitted {}: members={} train_accuracy_estimate={:.4} build_seconds={:.2} seed={} model={}",
        variant.as_str(),
        model.members.len(),
        model.train_accuracy_estimate(),
        model.build.wall_seconds,
        config.seed,
        out.display()
    );
    Ok(())
}

fn cmd_predict(model_path: &Path, test_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let model = Ensemble::load(model_path)
        .map_err(|e| CliError::new(format!("cannot load {}: {e}", model_path.display())))?;
    let test = load_dataset(test_path)?;
    if test.series_length() != model.series_length {
        return Err(CliError::new(format!(
            "series length mismatch: model expects {}, test has {}",
            model.series_length,
            test.series_length()
        )));
    }
    // The model must know every class appearing in the test file.
    for name in test.class_names() {
        if !model.class_names.contains(name) {
            return Err(CliError::new(format!(
                "test class '{name}' unknown to the model"
            )));
        }
    }

    let mut csv = String::from("index,label");
    for name in &model.class_names {
        csv.push_str(&format!(",p_{name}"));
    }
    csv.push('\n');
    let mut correct = 0usize;
    for i in 0..test.n_cases() {
        let (label, distribution) = model.predict(test.series(i))?;
        if model.class_names[label] == test.class_name(test.label(i)) {
            correct += 1;
        }
        csv.push_str(&format!("{i},{}", model.class_names[label]));
        for p in &distribution {
            csv.push_str(&format!(",{p}"));
        }
        csv.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::new(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    eprintln!(
        "predicted {} cases: accuracy={:.4} seed={}",
        test.n_cases(),
        correct as f64 / test.n_cases() as f64,
        model.config.seed
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_benchmark(
    data: &Path,
    datasets: &[String],
    variants: &[String],
    resamples: u64,
    out_dir: Option<&Path>,
    zero_timing: bool,
    build: &BuildOptions,
) -> Result<(), CliError> {
    if datasets.is_empty() || variants.is_empty() {
        return Err(CliError::new("need at least one dataset and one variant".into()));
    }
    let pairs = datasets
        .iter()
        .map(|name| resolve_pair(data, name))
        .collect::<Result<Vec<_>, _>>()?;
    let specs = variants
        .iter()
        .map(|v| ClassifierSpec::from_name(v))
        .collect::<Result<Vec<_>, _>>()?;
    let config = ExperimentConfig {
        n_resamples: resamples,
        base_seed: build.seed,
        parameter_samples: build.k,
        max_ensemble_size: build.ensemble_size,
        time_contract: build.contract,
        space: build.space()?,
    };

    let mut results = run_experiment(&pairs, &specs, &config);
    if zero_timing {
        for r in &mut results {
            r.train_seconds = 0.0;
        }
    }

    let out_dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("TSDICT_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::new(format!("cannot create {}: {e}", out_dir.display())))?;
    let out_path = out_dir.join("results.csv");
    std::fs::write(&out_path, results_to_csv(&results))
        .map_err(|e| CliError::new(format!("cannot write {}: {e}", out_path.display())))?;
    eprintln!(
        "benchmark complete: {} rows seed={} results={}",
        results.len(),
        build.seed,
        out_path.display()
    );
    Ok(())
}

fn cmd_compare(results: &[PathBuf], metric: MetricKind, alpha: f64) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for path in results {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))?;
        rows.extend(
            parse_results_csv(&text)
                .map_err(|e| CliError::new(format!("cannot parse {}: {e}", path.display())))?,
        );
    }
    let matrix = tsdict::harness::score_matrix(&rows, metric)?;
    let report = mean_ranks_and_cliques(&matrix, alpha)?;
    print!("{}", report.to_text());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fit {
            variant,
            train,
            out,
            build,
        } => cmd_fit(*variant, train, out, build),
        Command::Predict { model, test, out } => cmd_predict(model, test, out.as_deref()),
        Command::Benchmark {
            data,
            datasets,
            variants,
            resamples,
            out_dir,
            zero_timing,
            build,
        } => cmd_benchmark(
            data,
            datasets,
            variants,
            *resamples,
            out_dir.as_deref(),
            *zero_timing,
            build,
        ),
        Command::Compare {
            results,
            metric,
            alpha,
        } => cmd_compare(results, *metric, *alpha),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: could not configure thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
