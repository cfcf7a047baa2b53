//! CSV data files with JSON header sidecars.
//!
//! A grid function `name.csv` holds one row per node (`x1, x2, re, im,
//! weight`); `name.json` records the grid spec, domain and symmetry tag so the
//! grid can be rebuilt and checked on load.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::heat::HolomorphicGridFunction;
use crate::transform::{GridDomain, GridFunction, GridSpec, QuadratureGrid, Symmetry};
use crate::{Complex64, Error, Result};

pub const GRID_SCHEMA: &str = "ho-heat/grid-function/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub schema: String,
    pub rank: usize,
    pub spec: GridSpec,
    pub domain: GridDomain,
    pub symmetry: Symmetry,
    pub nodes: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    x1: f64,
    x2: f64,
    re: f64,
    im: f64,
    weight: f64,
}

/// `dir/name.json` for `dir/name.csv`.
pub fn header_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn write_grid_function(path: &Path, f: &GridFunction) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for ((x, v), q) in f.grid.nodes.iter().zip(&f.values).zip(&f.grid.weights) {
        w.serialize(Row { x1: x[0], x2: x[1], re: v.re, im: v.im, weight: *q })?;
    }
    w.flush()?;
    let header = GridHeader {
        schema: GRID_SCHEMA.into(),
        rank: f.grid.rank,
        spec: f.grid.spec,
        domain: f.domain,
        symmetry: f.symmetry,
        nodes: f.grid.len(),
    };
    write_json(&header_path(path), &header)
}

/// Reads a grid function and checks the rows against the grid rebuilt from
/// the header.
pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    let header: GridHeader = serde_json::from_str(&fs::read_to_string(header_path(path))?)?;
    if header.schema != GRID_SCHEMA {
        return Err(Error::SchemaMismatch(format!("expected schema {GRID_SCHEMA:?}, found {:?}", header.schema)));
    }
    let grid = QuadratureGrid::new(header.rank, header.spec)?;
    let rows: Vec<Row> = csv::Reader::from_path(path)?.deserialize().collect::<std::result::Result<_, _>>()?;
    if rows.len() != grid.len() || header.nodes != grid.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} rows and header count {} for a grid of {} nodes",
            rows.len(),
            header.nodes,
            grid.len()
        )));
    }
    let tol = 1e-9 * header.spec.radius;
    for (i, (r, x)) in rows.iter().zip(&grid.nodes).enumerate() {
        if (r.x1 - x[0]).abs() > tol || (r.x2 - x[1]).abs() > tol {
            return Err(Error::SchemaMismatch(format!("row {i} is not at grid node ({}, {})", x[0], x[1])));
        }
    }
    let values = rows.iter().map(|r| Complex64::new(r.re, r.im)).collect();
    Ok(GridFunction { grid, domain: header.domain, symmetry: header.symmetry, values })
}

#[derive(Debug, Serialize)]
struct ComplexRow {
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    re: f64,
    im: f64,
    weight: f64,
}

/// Values on `X + iY` with the product quadrature weight (without ω).
pub fn write_holomorphic(path: &Path, f: &HolomorphicGridFunction) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for iy in 0..f.y.len() {
        for ix in 0..f.x.len() {
            let (x, y) = (f.x.nodes[ix], f.y.nodes[iy]);
            let v = f.value(ix, iy);
            w.serialize(ComplexRow {
                x1: x[0],
                x2: x[1],
                y1: y[0],
                y2: y[1],
                re: v.re,
                im: v.im,
                weight: f.x.weights[ix] * f.y.weights[iy],
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows `(columns…, re, im)` for pointwise evaluations.
pub fn write_values(path: &Path, columns: &[&str], rows: &[(Vec<f64>, Complex64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut head: Vec<&str> = columns.to_vec();
    head.extend(["re", "im"]);
    w.write_record(&head)?;
    for (c, v) in rows {
        let mut rec: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        rec.push(v.re.to_string());
        rec.push(v.im.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
