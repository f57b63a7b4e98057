//! Tabular CSV / JSON output.
//!
//! Floating-point values are printed with 9 significant digits: plain
//! decimal notation for magnitudes in `[1e-4, 1e9)`, exponent notation
//! otherwise. Output never depends on the execution mode or on timing.

use std::io::Write;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::analysis::{CutCounts, DensityGrid};
use crate::arnoldi::{principal_arg, CoreSpectrum};
use crate::error::Result;
use crate::graph::{LabelTable, NodeId};
use crate::rank::RankVector;
use crate::subspaces::{NodeClass, SpectrumSummary, SubspaceDecomposition};

pub const SIGNIFICANT_DIGITS: usize = 9;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-4..1e9).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// JSON number rounded like [`fmt_sig`]; non-finite values become `null`.
pub fn json_sig(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Rounds every float inside a JSON value.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json_sig(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn to_text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_sig(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json_sig(*x),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let io = |e: csv::Error| std::io::Error::other(e.to_string());
        out.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::to_text)).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// `{"columns": [...], "rows": [[...], ...]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn write<W: Write>(&self, mut w: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                write_json(&mut w, &self.to_json())?;
                Ok(())
            }
        }
    }
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write>(mut w: W, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, v).map_err(std::io::Error::other)?;
    writeln!(w)?;
    Ok(())
}

/// `node_id,class` with class `core` or `s<j>` (1-based `j`).
pub fn subspace_table(decomp: &SubspaceDecomposition) -> Table {
    let mut t = Table::new(["node_id", "class"]);
    for i in 0..decomp.node_count() {
        let class = match decomp.class_of(i) {
            NodeClass::Core => "core".to_string(),
            NodeClass::Subspace(j) => format!("s{}", j + 1),
        };
        t.push(vec![i.into(), class.into()]);
    }
    t
}

fn lambda_cells(z: Complex64) -> [Cell; 4] {
    [z.re.into(), z.im.into(), z.norm().into(), principal_arg(z).into()]
}

/// Subspace eigenvalues: `m,subspace,re_lambda,im_lambda,abs_lambda,phase`
/// with `m` counting within the block.
pub fn subspace_spectrum_table(s: &SpectrumSummary) -> Table {
    let mut t = Table::new(["m", "subspace", "re_lambda", "im_lambda", "abs_lambda", "phase"]);
    for b in &s.blocks {
        for (i, &z) in b.values.iter().enumerate() {
            let mut row: Vec<Cell> = vec![(i + 1).into(), (b.subspace + 1).into()];
            row.extend(lambda_cells(z));
            t.push(row);
        }
    }
    t
}

/// Core Ritz values: `m,re_lambda,im_lambda,abs_lambda,phase,residual`.
/// The residual is the explicit one where an eigenvector was built and the
/// Arnoldi estimate otherwise; `converged` flags the estimate test.
pub fn core_spectrum_table(s: &CoreSpectrum) -> Table {
    let mut t = Table::new(["m", "re_lambda", "im_lambda", "abs_lambda", "phase", "residual", "converged"]);
    for v in &s.values {
        let residual = s
            .pairs
            .iter()
            .find(|p| p.m == v.m)
            .map_or(v.estimate, |p| p.residual);
        let mut row: Vec<Cell> = vec![v.m.into()];
        row.extend(lambda_cells(v.lambda));
        row.push(residual.into());
        row.push(Cell::Int(v.converged as i64));
        t.push(row);
    }
    t
}

/// `node_id,re_psi,im_psi`.
pub fn eigenvector_table(psi: &[Complex64]) -> Table {
    let mut t = Table::new(["node_id", "re_psi", "im_psi"]);
    for (i, z) in psi.iter().enumerate() {
        t.push(vec![i.into(), z.re.into(), z.im.into()]);
    }
    t
}

/// `rank,node_id,probability[,label]`.
pub fn rank_table(rv: &RankVector, labels: Option<&LabelTable>) -> Table {
    let mut cols = vec!["rank", "node_id", "probability"];
    if labels.is_some() {
        cols.push("label");
    }
    let mut t = Table::new(cols);
    for (k, &i) in rv.order.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(k + 1).into(), i.into(), rv.probabilities[i as usize].into()];
        if let Some(l) = labels {
            row.push(l.label_or_id(i as usize).into());
        }
        t.push(row);
    }
    t
}

/// `K,N_AA,N_AB,N_BA,N_BB`.
pub fn cut_table(c: &CutCounts) -> Table {
    let mut t = Table::new(["K", "N_AA", "N_AB", "N_BA", "N_BB"]);
    for r in &c.rows {
        t.push(vec![r.k.into(), r.n_aa.into(), r.n_ab.into(), r.n_ba.into(), r.n_bb.into()]);
    }
    t
}

/// `cell_x,cell_y,weight` for every cell.
pub fn density_table(g: &DensityGrid) -> Table {
    let mut t = Table::new(["cell_x", "cell_y", "weight"]);
    for x in 0..g.cells {
        for y in 0..g.cells {
            t.push(vec![x.into(), y.into(), g.weight(x, y).into()]);
        }
    }
    t
}

/// Header stored next to a density table.
pub fn density_header(g: &DensityGrid) -> Value {
    round_json(json!({
        "scale": g.scale,
        "cells": g.cells,
        "N": g.node_count,
        "edges": g.edges,
    }))
}

/// Mapping written by the remapping loader.
pub fn id_table(original: impl Iterator<Item = (NodeId, u64)>) -> Table {
    let mut t = Table::new(["node_id", "original_id"]);
    for (i, o) in original {
        t.push(vec![i.into(), o.into()]);
    }
    t
}
