use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use thiserror::Error;
use trustrisk_core::collector::{load_snapshot, normalize};
use trustrisk_core::dataset::{
    derive_histories, generate_synthetic, parse_corpus, parse_side_table, to_record, write_corpus,
    ActorHistories, GeneratorManifest, HistoryDerivationRule, RowError,
};
use trustrisk_core::pipeline::assess_rows;
use trustrisk_core::report::{emit_breakdowns, emit_row_errors, sweep_grid, Format, GridSpec};
use trustrisk_core::selftest::run_battery;
use trustrisk_core::{
    assess, validate_record, AssessError, AssessmentConfig, ConfigError, CorpusError, GridError,
    SegmentInputs, SnapshotError,
};

use crate::args::{
    AssessArgs, Cli, Command, GenerateArgs, GridArgs, NormalizeArgs, OutputFormat,
    SnapshotAssessArgs, ValidateArgs,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    DataFailure,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Success => ExitCode::SUCCESS,
            Status::DataFailure => ExitCode::from(1),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("{path}: {source}")]
    Corpus { path: PathBuf, source: CorpusError },
    #[error("{path}: {source}")]
    Snapshot {
        path: PathBuf,
        source: SnapshotError,
    },
    #[error("{path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}

impl CliError {
    /// 1 for unusable data, 2 for usage and configuration problems.
    pub fn status(&self) -> u8 {
        match self {
            CliError::Corpus { .. }
            | CliError::Snapshot {
                source: SnapshotError::Parse { .. } | SnapshotError::EmptyIdentifier(_),
                ..
            }
            | CliError::Grid(GridError::Assess(_)) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Assess(a) => run_assess(a),
        Command::Generate(a) => run_generate(a),
        Command::Grid(a) => run_grid(a),
        Command::Validate(a) => run_validate(a),
        Command::Normalize(a) => run_normalize(a),
        Command::SnapshotAssess(a) => run_snapshot_assess(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// `report.csv` -> `report.csv.errors.csv`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn distinct(inputs: &[&Path], output: &Path) -> Result<()> {
    for input in inputs {
        let same = match (fs::canonicalize(input), fs::canonicalize(output)) {
            (Ok(a), Ok(b)) => a == b,
            _ => input == &output,
        };
        if same {
            return Err(CliError::Usage(format!(
                "output {} would overwrite input",
                output.display()
            )));
        }
    }
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<AssessmentConfig> {
    let config = match path {
        Some(p) => AssessmentConfig::from_json(&read(p)?),
        None => {
            let config = AssessmentConfig::default();
            config.validate().map(|()| config)
        }
    };
    config.map_err(|source| CliError::Config {
        path: path.map_or("<default>".into(), |p| p.display().to_string()),
        source,
    })
}

fn load_side_table(path: &Path, histories: &mut ActorHistories) -> Result<()> {
    let text = read(path)?;
    let table = parse_side_table(text.as_bytes()).map_err(|source| CliError::Corpus {
        path: path.to_owned(),
        source,
    })?;
    histories.apply_side_table(table);
    Ok(())
}

fn modified_at(path: &Path) -> Result<DateTime<Utc>> {
    fs::metadata(path)
        .and_then(|m| m.modified())
        .map(DateTime::<Utc>::from)
        .map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })
}

fn format(f: OutputFormat) -> Format {
    match f {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    }
}

fn run_assess(args: AssessArgs) -> Result<Status> {
    let mut inputs = vec![args.input.as_path()];
    inputs.extend(args.config.as_deref());
    inputs.extend(args.histories.as_deref());
    distinct(&inputs, &args.output)?;
    let config = load_config(args.config.as_deref())?;
    let text = read(&args.input)?;
    let rows = parse_corpus(text.as_bytes()).map_err(|source| CliError::Corpus {
        path: args.input.clone(),
        source,
    })?;

    let mut rule = HistoryDerivationRule::default();
    if let Some(year) = args.current_year {
        rule.current_year = year;
    }
    let parsed: Vec<_> = rows
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .cloned()
        .collect();
    let mut histories = derive_histories(&parsed, rule);
    if let Some(path) = &args.histories {
        load_side_table(path, &mut histories)?;
    }
    let at = match args.assessed_at {
        Some(at) => at,
        None => modified_at(&args.input)?,
    };

    let results =
        assess_rows(&rows, &histories, &config, at).map_err(|source| CliError::Config {
            path: "<effective>".into(),
            source,
        })?;
    let (breakdowns, errors): (Vec<_>, Vec<_>) = results.into_iter().partition(|r| r.is_ok());
    let breakdowns: Vec<_> = breakdowns.into_iter().map(|r| r.unwrap()).collect();
    let errors: Vec<RowError> = errors.into_iter().map(|r| r.unwrap_err()).collect();

    write(
        &args.output,
        &emit_breakdowns(&breakdowns, format(args.format)),
    )?;
    write(
        &sidecar(&args.output, ".errors.csv"),
        &emit_row_errors(&errors),
    )?;
    eprintln!(
        "assessed {} of {} rows; {} failed",
        breakdowns.len(),
        rows.len(),
        errors.len()
    );
    Ok(if breakdowns.is_empty() && !errors.is_empty() {
        Status::DataFailure
    } else {
        Status::Success
    })
}

fn run_generate(args: GenerateArgs) -> Result<Status> {
    if args.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let rows = generate_synthetic(args.count, args.seed);
    let mut corpus = Vec::new();
    write_corpus(&rows, &mut corpus).map_err(|source| CliError::Corpus {
        path: args.output.clone(),
        source,
    })?;
    write(&args.output, &corpus)?;
    let manifest = GeneratorManifest::new(args.count, args.seed);
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    write(&sidecar(&args.output, ".manifest.json"), &json)?;
    Ok(Status::Success)
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Json {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn run_grid(args: GridArgs) -> Result<Status> {
    let mut inputs = vec![args.spec.as_path(), args.record.as_path()];
    inputs.extend(args.config.as_deref());
    distinct(&inputs, &args.output)?;
    let config = load_config(args.config.as_deref())?;
    let spec: GridSpec = parse_json(&args.spec)?;
    let base: SegmentInputs = parse_json(&args.record)?;
    let grid = sweep_grid(&spec, &base, &config)?;
    write(&args.output, &grid.to_csv())?;
    Ok(Status::Success)
}

fn run_validate(args: ValidateArgs) -> Result<Status> {
    let config = load_config(args.config.as_deref())?;
    let mut out = String::new();
    let status = if args.self_test {
        let outcomes = run_battery(&config, DateTime::<Utc>::UNIX_EPOCH).map_err(|source| {
            CliError::Config {
                path: "<effective>".into(),
                source,
            }
        })?;
        for o in &outcomes {
            out.push_str(&format!(
                "{} test {}: {} ({})\n",
                if o.passed { "PASS" } else { "FAIL" },
                o.number,
                o.name,
                o.detail
            ));
        }
        if outcomes.iter().all(|o| o.passed) {
            Status::Success
        } else {
            Status::DataFailure
        }
    } else {
        let input = args
            .input
            .expect("clap requires --input without --self-test");
        let text = read(&input)?;
        let rows = parse_corpus(text.as_bytes()).map_err(|source| CliError::Corpus {
            path: input.clone(),
            source,
        })?;
        let mut errors = Vec::new();
        for row in &rows {
            let checked = row.clone().and_then(|row| {
                let record = to_record(&row).map_err(|v| RowError::invalid(&row, v))?;
                let hard: Vec<_> = validate_record(&record, &config).hard().cloned().collect();
                if hard.is_empty() {
                    Ok(())
                } else {
                    Err(RowError::invalid(&row, hard))
                }
            });
            if let Err(e) = checked {
                errors.push(e);
            }
        }
        out = String::from_utf8(emit_row_errors(&errors)).expect("utf-8 csv");
        eprintln!("{} of {} rows have errors", errors.len(), rows.len());
        if errors.is_empty() {
            Status::Success
        } else {
            Status::DataFailure
        }
    };
    match &args.output {
        Some(path) => write(path, out.as_bytes())?,
        None => print!("{out}"),
    }
    Ok(status)
}

fn load_snapshot_file(path: &Path) -> Result<trustrisk_core::collector::HostSnapshot> {
    load_snapshot(&read(path)?).map_err(|source| CliError::Snapshot {
        path: path.to_owned(),
        source,
    })
}

fn run_normalize(args: NormalizeArgs) -> Result<Status> {
    let mut inputs = vec![args.input.as_path()];
    inputs.extend(args.config.as_deref());
    distinct(&inputs, &args.output)?;
    let config = load_config(args.config.as_deref())?;
    let snapshot = load_snapshot_file(&args.input)?;
    let normalized =
        normalize(&snapshot, &args.context, &config.context_table).map_err(|source| {
            CliError::Snapshot {
                path: args.input.clone(),
                source,
            }
        })?;
    let mut json = serde_json::to_vec_pretty(&normalized).expect("record serializes");
    json.push(b'\n');
    write(&args.output, &json)?;
    Ok(Status::Success)
}

fn run_snapshot_assess(args: SnapshotAssessArgs) -> Result<Status> {
    let mut inputs: Vec<&Path> = args.input.iter().map(PathBuf::as_path).collect();
    inputs.extend(args.config.as_deref());
    inputs.extend(args.histories.as_deref());
    distinct(&inputs, &args.output)?;
    let config = load_config(args.config.as_deref())?;
    let mut histories = ActorHistories::default();
    if let Some(path) = &args.histories {
        load_side_table(path, &mut histories)?;
    }

    let mut breakdowns = Vec::new();
    let mut errors = Vec::new();
    for (i, path) in args.input.iter().enumerate() {
        let snapshot = load_snapshot_file(path)?;
        let normalized =
            normalize(&snapshot, &args.context, &config.context_table).map_err(|source| {
                CliError::Snapshot {
                    path: path.clone(),
                    source,
                }
            })?;
        let inputs = histories.inputs_for(&normalized.record);
        match assess(&inputs, &config, snapshot.captured_at) {
            Ok(b) => breakdowns.push(b),
            Err(AssessError::Config(source)) => {
                return Err(CliError::Config {
                    path: "<effective>".into(),
                    source,
                })
            }
            Err(e) => errors.push(RowError {
                line: i as u64 + 1,
                sample: Some(snapshot.identifier.clone()),
                problem: trustrisk_core::dataset::RowProblem::Structure {
                    message: format!("{}: {e}", path.display()),
                },
            }),
        }
    }
    write(
        &args.output,
        &emit_breakdowns(&breakdowns, format(args.format)),
    )?;
    write(
        &sidecar(&args.output, ".errors.csv"),
        &emit_row_errors(&errors),
    )?;
    Ok(if breakdowns.is_empty() {
        Status::DataFailure
    } else {
        Status::Success
    })
}
