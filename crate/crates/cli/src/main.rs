use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use lrd_core::config::{IndicatorConfig, SynthFile, DEFAULT_BETA, DEFAULT_HORIZONS};
use lrd_core::decomposition::admissible_horizons;
use lrd_core::io::{save_csv, ExportFormat};
use lrd_core::report::render_compare;
use lrd_core::synth::GENERATOR;
use lrd_core::{
    decompose, export_field, generate, load_csv, measure_field, run_compare, run_indicator, Error,
    ErrorCategory, MeasureKind,
};

#[derive(Debug, Parser)]
#[command(
    name = "lrd",
    version,
    about = "Local risk decomposition of PnL series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Measure {
    Lsr,
    Lra,
    Return,
    Risk,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose a series and export one measure field as a heatmap matrix.
    Decompose {
        input: PathBuf,
        /// Comma-separated box lengths; defaults to 50,100,250,500,1000 clipped to the series.
        #[arg(long, value_delimiter = ',')]
        horizons: Vec<usize>,
        #[arg(long, value_enum, default_value = "lsr")]
        measure: Measure,
        #[arg(long, default_value_t = DEFAULT_BETA)]
        beta: f64,
        /// Divide the LRA field by its standard deviation over all cells.
        #[arg(long)]
        normalize: bool,
        /// Output format; inferred from the file extension when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the configured indicators for one series as JSON.
    Indicator {
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic PnL series from a TOML spec.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two series side by side.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<IndicatorConfig, Error> {
    match path {
        Some(p) => IndicatorConfig::load(p),
        None => Ok(IndicatorConfig::default()),
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Decompose {
            input,
            horizons,
            measure,
            beta,
            normalize,
            format,
            out,
        } => {
            let series = load_csv(&input)?;
            let horizons = if horizons.is_empty() {
                admissible_horizons(series.len(), &DEFAULT_HORIZONS)
            } else {
                horizons
            };
            let grid = decompose(&series, &horizons)?;
            let kind = match measure {
                Measure::Lsr => MeasureKind::Lsr,
                Measure::Lra => MeasureKind::Lra { beta, normalize },
                Measure::Return => MeasureKind::LocalReturn,
                Measure::Risk => MeasureKind::LocalRisk,
            };
            let field = measure_field(&grid, kind)?;
            let format = match format {
                Some(Format::Csv) => ExportFormat::Csv,
                Some(Format::Json) => ExportFormat::Json,
                None => ExportFormat::from_path(&out),
            };
            export_field(&field, &out, format, None)?;
            info!(
                "wrote {} cells over horizons {:?} to {}",
                grid.cell_count(),
                grid.horizons(),
                out.display()
            );
        }
        Command::Indicator { input, config, out } => {
            let config = load_config(config.as_deref())?;
            let series = load_csv(&input)?;
            let report = run_indicator(&series, &file_stem(&input), &config)?;
            write_text(out.as_deref(), &(report.to_json()? + "\n"))?;
        }
        Command::Synth { spec, seed, out } => {
            let spec = SynthFile::load(&spec)?.to_spec(seed)?;
            let series = generate(&spec)?;
            save_csv(&series, &out)?;
            info!(
                "generated {} samples with {GENERATOR} (seed {seed})",
                series.len()
            );
        }
        Command::Compare { a, b, config, json } => {
            let config = load_config(config.as_deref())?;
            let series_a = load_csv(&a)?;
            let series_b = load_csv(&b)?;
            let report = run_compare(
                &series_a,
                &series_b,
                (&file_stem(&a), &file_stem(&b)),
                &config,
            )?;
            if let Some(path) = json {
                fs::write(path, report.to_json()? + "\n")?;
            }
            write_text(None, &render_compare(&report))?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Usage => 1,
        ErrorCategory::Numerical => 2,
        ErrorCategory::Io => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
