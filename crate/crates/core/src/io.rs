//! CSV ingestion of PnL series and export of measure fields.
//!
//! Input CSV has a header row of either `date,pnl` or `pnl`. Field exports
//! come in two flavours: a flat `h,center_t,value,flag` matrix for heatmap
//! tools, and a JSON [`GridExport`] carrying the full field plus metadata.
//! Flagged cells are written as an empty CSV value or a JSON `null`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{MeasureField, MeasureKind};
use crate::series::PnLSeries;

pub fn load_csv(path: impl AsRef<Path>) -> Result<PnLSeries> {
    read_csv(BufReader::new(File::open(path)?))
}

pub fn read_csv<R: Read>(reader: R) -> Result<PnLSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers().map_err(csv_error)?.clone();
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    let with_dates = match names
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["date", "pnl"] => true,
        ["pnl"] => false,
        [] | [""] => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header row (expected `date,pnl` or `pnl`)".into(),
            })
        }
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "unexpected header {:?}, expected `date,pnl` or `pnl`",
                    names
                ),
            })
        }
    };

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let pnl_cell = if with_dates { &record[1] } else { &record[0] };
        let value: f64 = pnl_cell.parse().map_err(|_| Error::Parse {
            line,
            message: format!("pnl value {pnl_cell:?} is not a number"),
        })?;
        values.push(value);
        if with_dates {
            labels.push(record[0].to_string());
        }
    }
    PnLSeries::new(values, with_dates.then_some(labels))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Write `series` as CSV with full round-trip precision.
pub fn write_csv<W: Write>(series: &PnLSeries, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    };
    match series.labels() {
        Some(labels) => {
            wtr.write_record(["date", "pnl"]).map_err(io)?;
            for (d, v) in labels.iter().zip(series.values()) {
                wtr.write_record([d.as_str(), &v.to_string()]).map_err(io)?;
            }
        }
        None => {
            wtr.write_record(["pnl"]).map_err(io)?;
            for v in series.values() {
                wtr.write_record([v.to_string()]).map_err(io)?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_csv(series: &PnLSeries, path: impl AsRef<Path>) -> Result<()> {
    write_csv(series, BufWriter::new(File::create(path)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    /// Guess from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ExportFormat::Json,
            _ => ExportFormat::Csv,
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::invalid(format!("unknown export format {other:?}"))),
        }
    }
}

/// Where a synthetic series came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportMetadata {
    pub measure: String,
    pub beta: Option<f64>,
    pub normalize: bool,
    pub series_length: usize,
    pub source_checksum: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Serializable snapshot of a [`MeasureField`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridExport {
    pub horizons: Vec<usize>,
    pub time_centers: Vec<Vec<f64>>,
    pub values: Vec<Vec<Option<f64>>>,
    pub flags: Vec<Vec<bool>>,
    pub metadata: ExportMetadata,
}

impl GridExport {
    pub fn from_field(field: &MeasureField, provenance: Option<&Provenance>) -> Self {
        let grid = field.grid();
        let (beta, normalize) = match field.kind() {
            MeasureKind::Lra { beta, normalize } => (Some(beta), normalize),
            _ => (None, false),
        };
        GridExport {
            horizons: grid.horizons().to_vec(),
            time_centers: grid
                .fits()
                .iter()
                .map(|row| row.iter().map(|f| f.center_t).collect())
                .collect(),
            values: field.values().to_vec(),
            flags: field.flags(),
            metadata: ExportMetadata {
                measure: field.kind().name().to_string(),
                beta,
                normalize,
                series_length: grid.n(),
                source_checksum: grid.source_checksum().to_string(),
                generator: provenance.map(|p| p.generator.clone()),
                seed: provenance.map(|p| p.seed),
            },
        }
    }

    pub fn cell_count(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    /// The `h,center_t,value,flag` matrix, one row per cell.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "h,center_t,value,flag")?;
        for (r, &h) in self.horizons.iter().enumerate() {
            for (c, v) in self.time_centers[r].iter().zip(&self.values[r]) {
                match v {
                    Some(v) => writeln!(writer, "{h},{c},{v},0")?,
                    None => writeln!(writer, "{h},{c},,1")?,
                }
            }
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, self)?;
        writeln!(writer)?;
        writer.flush()?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }
}

pub fn export_field(
    field: &MeasureField,
    path: impl AsRef<Path>,
    format: ExportFormat,
    provenance: Option<&Provenance>,
) -> Result<()> {
    let export = GridExport::from_field(field, provenance);
    let out = BufWriter::new(File::create(path)?);
    match format {
        ExportFormat::Csv => export.write_csv(out),
        ExportFormat::Json => export.write_json(out),
    }
}

pub fn import_grid_json(path: impl AsRef<Path>) -> Result<GridExport> {
    GridExport::read_json(BufReader::new(File::open(path)?))
}
