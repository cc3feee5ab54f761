//! Output formatting shared by every subcommand.
//!
//! Each subcommand builds typed rows and hands them to [`emit_rows`], which
//! renders one of three formats:
//!
//! * `human` — an aligned table with shortest-round-trip floats,
//! * `json` — a pretty-printed array of objects (numbers carry full
//!   precision; reading them back yields the same bits),
//! * `csv` — RFC 4180 (header row, CRLF line endings) with floats printed
//!   to 17 significant digits so they round-trip exactly.

use std::io::Write;

use clap::ValueEnum;
use ndtime::ConvergenceTrace;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// One table cell. Optional cells render as `-` in the human table and as
/// empty fields in CSV; JSON output never goes through `Cell` (rows
/// serialize directly, so options become `null`).
pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
    OptFloat(Option<f64>),
    OptText(Option<String>),
}

impl Cell {
    pub fn text(s: &str) -> Self {
        Cell::Text(s.to_string())
    }

    fn human(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v}"),
            Cell::OptFloat(Some(v)) => format!("{v}"),
            Cell::OptFloat(None) => "-".to_string(),
            Cell::OptText(Some(s)) => s.clone(),
            Cell::OptText(None) => "-".to_string(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => csv_float(*v),
            Cell::OptFloat(Some(v)) => csv_float(*v),
            Cell::OptFloat(None) => String::new(),
            Cell::OptText(Some(s)) => s.clone(),
            Cell::OptText(None) => String::new(),
        }
    }

    fn right_aligned(&self) -> bool {
        matches!(self, Cell::Int(_) | Cell::Float(_) | Cell::OptFloat(_))
    }
}

/// 17 significant digits: enough for any `f64` to parse back bit-for-bit.
fn csv_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A row type that knows its column names and how to split itself into
/// cells. JSON field names must match `HEADER` so the three formats agree.
pub trait Tabular {
    const HEADER: &'static [&'static str];

    fn cells(&self) -> Vec<Cell>;
}

pub fn emit_rows<T: Tabular + Serialize>(rows: &[T], format: Format) -> Result<(), String> {
    match format {
        Format::Human => emit_human(rows),
        Format::Json => emit_json(rows),
        Format::Csv => emit_csv(rows),
    }
}

fn emit_human<T: Tabular>(rows: &[T]) -> Result<(), String> {
    let cells: Vec<Vec<Cell>> = rows.iter().map(Tabular::cells).collect();
    let rendered: Vec<Vec<String>> = cells
        .iter()
        .map(|row| row.iter().map(Cell::human).collect())
        .collect();
    let mut widths: Vec<usize> = T::HEADER.iter().map(|h| h.len()).collect();
    for row in &rendered {
        for (width, text) in widths.iter_mut().zip(row) {
            *width = (*width).max(text.len());
        }
    }
    let right: Vec<bool> = match cells.first() {
        Some(row) => row.iter().map(Cell::right_aligned).collect(),
        None => vec![false; T::HEADER.len()],
    };

    let mut out = String::new();
    push_human_line(
        &mut out,
        &widths,
        &right,
        T::HEADER.iter().map(|h| h.to_string()),
    );
    for row in rendered {
        push_human_line(&mut out, &widths, &right, row.into_iter());
    }
    print!("{out}");
    Ok(())
}

fn push_human_line(
    out: &mut String,
    widths: &[usize],
    right: &[bool],
    fields: impl Iterator<Item = String>,
) {
    let mut line = String::new();
    for (index, field) in fields.enumerate() {
        if index > 0 {
            line.push_str("  ");
        }
        let width = widths[index];
        if right[index] {
            line.push_str(&format!("{field:>width$}"));
        } else {
            line.push_str(&format!("{field:<width$}"));
        }
    }
    out.push_str(line.trim_end());
    out.push('\n');
}

fn emit_json<T: Serialize>(rows: &[T]) -> Result<(), String> {
    let text = serde_json::to_string_pretty(rows).map_err(|e| format!("encoding JSON: {e}"))?;
    println!("{text}");
    Ok(())
}

fn emit_csv<T: Tabular>(rows: &[T]) -> Result<(), String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    writer
        .write_record(T::HEADER)
        .map_err(|e| format!("writing CSV: {e}"))?;
    for row in rows {
        writer
            .write_record(row.cells().iter().map(Cell::csv))
            .map_err(|e| format!("writing CSV: {e}"))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| format!("writing CSV: {e}"))?;
    std::io::stdout()
        .write_all(&bytes)
        .map_err(|e| format!("writing CSV: {e}"))?;
    Ok(())
}

#[derive(Serialize)]
struct ConvergenceOutput<'a> {
    node_id: &'a str,
    #[serde(flatten)]
    trace: &'a ConvergenceTrace,
}

/// The convergence trace is one record with a history column, not a row
/// set, so it gets its own renderers: a key/value block for humans, a
/// single object for JSON, and an `iteration,max_deviation` series for CSV.
pub fn emit_convergence(
    node_id: &str,
    trace: &ConvergenceTrace,
    format: Format,
) -> Result<i32, String> {
    match format {
        Format::Human => {
            println!("node_id:       {node_id}");
            println!("iterations:    {}", trace.iterations);
            println!("mean:          {}", trace.mean);
            println!("max_deviation: {}", trace.max_deviation);
            let finals: Vec<String> = trace.final_values.iter().map(|v| format!("{v}")).collect();
            println!("final:         [{}]", finals.join(", "));
        }
        Format::Json => {
            let record = ConvergenceOutput { node_id, trace };
            let text =
                serde_json::to_string_pretty(&record).map_err(|e| format!("encoding JSON: {e}"))?;
            println!("{text}");
        }
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::CRLF)
                .from_writer(Vec::new());
            writer
                .write_record(["iteration", "max_deviation"])
                .map_err(|e| format!("writing CSV: {e}"))?;
            for (iteration, deviation) in trace.history.iter().enumerate() {
                writer
                    .write_record([iteration.to_string(), csv_float(*deviation)])
                    .map_err(|e| format!("writing CSV: {e}"))?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| format!("writing CSV: {e}"))?;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| format!("writing CSV: {e}"))?;
        }
    }
    Ok(0)
}
