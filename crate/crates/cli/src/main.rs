//! `qseg` command line: scenario execution, custom-config execution,
//! sequence generation/ingestion, profile and summary emission, and batch
//! multi-seed statistics.

mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};

use config::{FileConfig, SeedSpec};
use qseg::scenarios::{build_scenario, ScenarioName};
use qseg::segment::{
    estimate_changepoint, segment_recursive, write_profile_csv, SegmentationSummary,
};
use qseg::seqgen::{generate_quantum_sequence, read_sequence, write_sequence};
use qseg::{OutcomeCatalog64, Program64, Schedule64};

#[derive(Parser)]
#[command(
    name = "qseg",
    about = "Simulate measurement outcome sequences from small quantum systems and \
             locate composition changes with the weighted Jensen-Shannon divergence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate sequences, segment them, and write profile/summary artifacts
    Run(RunArgs),
    /// Generate a sequence and write it in the line-oriented text format
    Generate(GenerateArgs),
    /// Segment an existing sequence file
    SegmentFile(SegmentFileArgs),
    /// List the cataloged scenarios
    ListScenarios,
}

#[derive(Args)]
#[command(group = ArgGroup::new("source").required(true).args(["scenario", "config"]))]
struct SourceArgs {
    /// Cataloged scenario name (see list-scenarios)
    #[arg(long)]
    scenario: Option<String>,
    /// JSON config file with an inline spec
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Base seed: integer or "auto" (drawn from entropy, recorded in outputs)
    #[arg(long)]
    seed: Option<String>,
    /// Number of trials; trial t runs with seed + t
    #[arg(long)]
    trials: Option<u32>,
    /// Output directory for CSV/JSON artifacts
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Also run recursive multi-changepoint segmentation
    #[arg(long)]
    recursive: bool,
    /// Acceptance threshold for recursive segmentation, in nats
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    /// Minimum segment length for recursive segmentation
    #[arg(long, default_value_t = 50)]
    min_segment: usize,
    /// Success counts as |estimate - true changepoint| <= tolerance
    #[arg(long, default_value_t = 100)]
    tolerance: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Seed: integer or "auto"
    #[arg(long)]
    seed: Option<String>,
    /// Output directory for the .seq file
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SegmentFileArgs {
    /// Sequence file in the line-oriented text format
    path: PathBuf,
    #[command(flatten)]
    source: SourceArgs,
    /// Optional directory to also write the summary JSON into
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also run recursive multi-changepoint segmentation
    #[arg(long)]
    recursive: bool,
    /// Acceptance threshold for recursive segmentation, in nats
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    /// Minimum segment length for recursive segmentation
    #[arg(long, default_value_t = 50)]
    min_segment: usize,
}

/// Everything needed to run: a validated program/schedule and defaults.
struct Resolved {
    name: String,
    program: Program64,
    schedule: Schedule64,
    config_seed: Option<SeedSpec>,
    config_trials: Option<u32>,
    config_recursive: Option<(f64, usize)>,
    true_changepoint: Option<usize>,
}

fn resolve(source: &SourceArgs) -> Result<Resolved> {
    match (&source.scenario, &source.config) {
        (Some(name), None) => {
            let scenario_name: ScenarioName = name.parse()?;
            let scenario = build_scenario::<f64>(scenario_name)?;
            Ok(Resolved {
                name: scenario_name.as_str().to_string(),
                program: scenario.program,
                schedule: scenario.schedule,
                config_seed: None,
                config_trials: None,
                config_recursive: None,
                true_changepoint: Some(scenario.true_changepoint),
            })
        }
        (None, Some(path)) => {
            let spec = FileConfig::load(path)?.resolve()?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "custom".to_string());
            let true_changepoint = spec.schedule.changing_indices().first().copied();
            Ok(Resolved {
                name,
                config_seed: spec.seed,
                config_trials: spec.trials,
                config_recursive: spec.recursive.map(|r| (r.threshold, r.min_segment)),
                program: spec.program,
                schedule: spec.schedule,
                true_changepoint,
            })
        }
        _ => unreachable!("clap enforces exactly one source"),
    }
}

/// Picks the effective seed: CLI flag over config over "auto". Auto draws
/// from system entropy and is recorded in every output.
fn resolve_seed(flag: &Option<String>, config: Option<SeedSpec>) -> Result<u64> {
    if let Some(text) = flag {
        if text == "auto" {
            return Ok(rand::random());
        }
        return text
            .parse()
            .with_context(|| format!("--seed must be an integer or \"auto\", got {text:?}"));
    }
    Ok(match config {
        Some(SeedSpec::Value(v)) => v,
        Some(SeedSpec::Named(config::SeedName::Auto)) | None => rand::random(),
    })
}

fn median(sorted: &[f64]) -> f64 {
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}

#[derive(serde::Serialize)]
struct Aggregate {
    scenario: String,
    trials: u32,
    base_seed: u64,
    true_changepoint: Option<usize>,
    tolerance: usize,
    median_estimated_changepoint: f64,
    median_abs_error: Option<f64>,
    success_rate: Option<f64>,
    no_signal_rate: f64,
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let resolved = resolve(&args.source)?;
    let base_seed = resolve_seed(&args.seed, resolved.config_seed)?;
    let trials = args.trials.or(resolved.config_trials).unwrap_or(1);
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    let recursive = if args.recursive {
        Some((args.threshold, args.min_segment))
    } else {
        resolved.config_recursive
    };

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let catalog = resolved.program.outcome_catalog();

    let mut estimates = Vec::new();
    let mut no_signal_count = 0u32;
    for trial in 0..trials {
        let seed = base_seed.wrapping_add(trial as u64);
        let seq = generate_quantum_sequence(&resolved.program, &resolved.schedule, seed)?;
        let result = estimate_changepoint(&seq, &catalog)?;

        let csv_path = args
            .out_dir
            .join(format!("{}_seed{}_profile.csv", resolved.name, seed));
        let mut csv = BufWriter::new(File::create(&csv_path)?);
        write_profile_csv(&result.profile, &mut csv)?;
        csv.flush()?;

        let mut summary = SegmentationSummary::new(&result, seed);
        if let Some((threshold, min_segment)) = recursive {
            summary.changepoints = Some(segment_recursive(&seq, &catalog, threshold, min_segment)?);
        }
        let json_path = args
            .out_dir
            .join(format!("{}_seed{}_summary.json", resolved.name, seed));
        std::fs::write(&json_path, summary.to_json())?;

        writeln!(
            std::io::stdout(),
            "trial {trial}: seed={seed} estimate={} jsd_max={:.6} ({})",
            summary.estimated_changepoint,
            summary.argmax_value,
            summary.argmax_observable
        )?;
        estimates.push(summary);
        no_signal_count += u32::from(result.no_signal);
    }

    if trials > 1 {
        let mut sorted: Vec<f64> = estimates
            .iter()
            .map(|s| s.estimated_changepoint as f64)
            .collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (median_abs_error, success_rate) = match resolved.true_changepoint {
            Some(true_changepoint) => {
                let mut errors: Vec<f64> = estimates
                    .iter()
                    .map(|s| (s.estimated_changepoint as f64 - true_changepoint as f64).abs())
                    .collect();
                errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let successes = errors
                    .iter()
                    .filter(|&&e| e <= args.tolerance as f64)
                    .count();
                (
                    Some(median(&errors)),
                    Some(successes as f64 / trials as f64),
                )
            }
            None => (None, None),
        };
        let aggregate = Aggregate {
            scenario: resolved.name.clone(),
            trials,
            base_seed,
            true_changepoint: resolved.true_changepoint,
            tolerance: args.tolerance,
            median_estimated_changepoint: median(&sorted),
            median_abs_error,
            success_rate,
            no_signal_rate: no_signal_count as f64 / trials as f64,
        };
        let path = args
            .out_dir
            .join(format!("{}_aggregate.json", resolved.name));
        let mut text = serde_json::to_string_pretty(&aggregate)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        writeln!(std::io::stdout(), "aggregate written to {}", path.display())?;
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let resolved = resolve(&args.source)?;
    let seed = resolve_seed(&args.seed, resolved.config_seed)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let seq = generate_quantum_sequence(&resolved.program, &resolved.schedule, seed)?;
    let catalog = resolved.program.outcome_catalog();
    let path = args
        .out_dir
        .join(format!("{}_seed{}.seq", resolved.name, seed));
    let mut writer = BufWriter::new(File::create(&path)?);
    write_sequence(&seq, &catalog, &mut writer)?;
    writer.flush()?;
    writeln!(std::io::stdout(), "{}", path.display())?;
    Ok(())
}

fn cmd_segment_file(args: SegmentFileArgs) -> Result<()> {
    let resolved = resolve(&args.source)?;
    let catalog: OutcomeCatalog64 = resolved.program.outcome_catalog();
    let file =
        File::open(&args.path).with_context(|| format!("cannot open {}", args.path.display()))?;
    let seq = read_sequence(BufReader::new(file), &catalog)?;

    let result = estimate_changepoint(&seq, &catalog)?;
    let mut summary = SegmentationSummary::new(&result, seq.seed);
    if args.recursive {
        summary.changepoints = Some(segment_recursive(
            &seq,
            &catalog,
            args.threshold,
            args.min_segment,
        )?);
    }
    let json = summary.to_json();
    write!(std::io::stdout(), "{json}")?;
    if let Some(out_dir) = &args.out_dir {
        std::fs::create_dir_all(out_dir)?;
        let stem = args
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sequence".to_string());
        std::fs::write(out_dir.join(format!("{stem}_summary.json")), json)?;
    }
    Ok(())
}

fn cmd_list_scenarios() -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for name in ScenarioName::all() {
        let scenario = build_scenario::<f64>(name)?;
        let labels = scenario.distinguishing_labels();
        let distinguishing = if labels.is_empty() {
            "none".to_string()
        } else {
            labels.join(",")
        };
        writeln!(
            out,
            "{:<14} {:<7} n={} i_c={} distinguishing: {}",
            name.as_str(),
            name.figure(),
            scenario.program.len(),
            scenario.true_changepoint,
            distinguishing
        )?;
    }
    Ok(())
}

/// Closed pipes on stdout (e.g. `qseg list-scenarios | head`) are a normal
/// way for a consumer to stop reading, not a failure.
fn is_broken_pipe(error: &anyhow::Error) -> bool {
    error.chain().any(|cause| {
        cause
            .downcast_ref::<std::io::Error>()
            .map(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            .unwrap_or(false)
    })
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Generate(args) => cmd_generate(args),
        Command::SegmentFile(args) => cmd_segment_file(args),
        Command::ListScenarios => cmd_list_scenarios(),
    };
    if let Err(error) = outcome {
        if is_broken_pipe(&error) {
            std::process::exit(0);
        }
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_flag_parses_integers_and_auto() {
        assert_eq!(resolve_seed(&Some("42".to_string()), None).unwrap(), 42);
        assert!(resolve_seed(&Some("x".to_string()), None).is_err());
        // auto draws some seed; just check it does not error
        resolve_seed(&Some("auto".to_string()), None).unwrap();
        assert_eq!(resolve_seed(&None, Some(SeedSpec::Value(7))).unwrap(), 7);
    }
}
