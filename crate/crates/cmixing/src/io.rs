//! CSV and JSON-sidecar serialization for series and datasets.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! read-back reproduces the in-memory values exactly.

use crate::error::{Error, Result};
use crate::processes::{Dataset, GeneratorMeta, SampleGrid, Series, Truth};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Sidecar metadata carried next to a CSV: generator, seed, grid, truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub generator: GeneratorMeta,
    pub seed: u64,
    pub grid: SampleGrid,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<Truth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_bound: Option<f64>,
}

/// Write a covariate-only series as `index,x_1`.
pub fn write_series_csv<W: Write>(mut w: W, series: &Series) -> std::io::Result<()> {
    writeln!(w, "index,x_1")?;
    for (i, v) in series.values.iter().enumerate() {
        writeln!(w, "{i},{v}")?;
    }
    Ok(())
}

/// Write a dataset as `index,x_1..x_D,y`.
pub fn write_dataset_csv<W: Write>(mut w: W, data: &Dataset) -> std::io::Result<()> {
    let headers: Vec<String> = (1..=data.dim).map(|k| format!("x_{k}")).collect();
    writeln!(w, "index,{},y", headers.join(","))?;
    for i in 0..data.len() {
        let coords: Vec<String> = data.point(i).iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{i},{},{}", coords.join(","), data.y[i])?;
    }
    Ok(())
}

/// Parsed CSV contents: covariates, dimension, and optional responses.
#[derive(Debug, Clone)]
pub struct CsvData {
    pub x: Vec<f64>,
    pub dim: usize,
    pub y: Option<Vec<f64>>,
}

impl CsvData {
    pub fn into_dataset(self, truth: Option<Truth>, y_bound: Option<f64>) -> Result<Dataset> {
        let n = self.x.len() / self.dim;
        let y = match self.y {
            Some(y) => y,
            None => vec![0.0; n],
        };
        Ok(Dataset { x: self.x, dim: self.dim, y, truth, y_bound })
    }
}

/// Read a `index,x_1..x_D[,y]` CSV produced by this crate (or compatible).
pub fn read_csv<R: BufRead>(r: R) -> Result<CsvData> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or(Error::EmptyInput("csv"))?
        .map_err(|e| Error::invalid(format!("csv read error: {e}")))?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.first() != Some(&"index") {
        return Err(Error::invalid(format!(
            "bad csv header: expected first column `index`, got `{}`",
            cols.first().unwrap_or(&"")
        )));
    }
    let has_y = cols.last() == Some(&"y");
    let x_cols = cols.len() - 1 - usize::from(has_y);
    if x_cols == 0 {
        return Err(Error::invalid("bad csv header: no x_k columns".to_string()));
    }
    for (k, &c) in cols[1..1 + x_cols].iter().enumerate() {
        let expected = format!("x_{}", k + 1);
        if c != expected {
            return Err(Error::invalid(format!(
                "bad csv header: expected column `{expected}`, got `{c}`"
            )));
        }
    }
    let mut x = Vec::new();
    let mut y = if has_y { Some(Vec::new()) } else { None };
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::invalid(format!("csv read error: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::invalid(format!(
                "row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                cols.len()
            )));
        }
        for &f in &fields[1..1 + x_cols] {
            x.push(parse_float(f, lineno + 2)?);
        }
        if let Some(ys) = y.as_mut() {
            ys.push(parse_float(fields[cols.len() - 1], lineno + 2)?);
        }
    }
    Ok(CsvData { x, dim: x_cols, y })
}

fn parse_float(s: &str, row: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::invalid(format!("row {row}: `{s}` is not a number")))
}

/// Serialize sidecar metadata as pretty JSON.
pub fn write_meta<W: Write>(w: W, meta: &SeriesMeta) -> Result<()> {
    serde_json::to_writer_pretty(w, meta)
        .map_err(|e| Error::invalid(format!("metadata write error: {e}")))
}
