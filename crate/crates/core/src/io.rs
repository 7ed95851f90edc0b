//! File formats: path and solution CSV, boundary-pair JSON.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundaries::{BoundaryFunction, BoundaryPair, Family};
use crate::error::{Error, Result};
use crate::pathkit::{CadlagPath, TimeGrid};
use crate::reflector::SkorokhodSolution;
use crate::Tolerances;

pub const SOLUTION_HEADER: [&str; 9] = ["t", "S", "Phi", "Psi", "K", "X", "Kr", "Kl", "TV"];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

/// Reads a `t,value` CSV with a header row.
pub fn read_path_csv(path: &Path) -> Result<CadlagPath> {
    read_path(open(path)?)
}

pub fn read_path(reader: impl Read) -> Result<CadlagPath> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "t" || &headers[1] != "value" {
        return Err(Error::Input(format!(
            "expected header `t,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        times.push(parse_cell(&record, 0, line)?);
        values.push(parse_cell(&record, 1, line)?);
    }
    CadlagPath::from_points(times, values)
}

fn parse_cell(record: &csv::StringRecord, col: usize, line: usize) -> Result<f64> {
    let cell = record
        .get(col)
        .ok_or_else(|| Error::Input(format!("row {}: missing column {col}", line + 1)))?;
    let v: f64 = cell
        .parse()
        .map_err(|_| Error::Input(format!("row {}: `{cell}` is not a number", line + 1)))?;
    if !v.is_finite() {
        return Err(Error::Input(format!("row {}: non-finite value", line + 1)));
    }
    Ok(v)
}

pub fn write_path_csv(path: &Path, p: &CadlagPath) -> Result<()> {
    write_path(create(path)?, p)
}

pub fn write_path(writer: impl Write, p: &CadlagPath) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "value"])?;
    for (t, v) in p.times().iter().zip(p.values()) {
        w.write_record([fmt_f64(*t), fmt_f64(*v)])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn write_solution_csv(path: &Path, sol: &SkorokhodSolution) -> Result<()> {
    write_solution(create(path)?, sol)
}

pub fn write_solution(writer: impl Write, sol: &SkorokhodSolution) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SOLUTION_HEADER)?;
    let cols = [&sol.s, &sol.phi, &sol.psi, &sol.k, &sol.x, &sol.kr, &sol.kl, &sol.tv];
    for (i, t) in sol.s.times().iter().enumerate() {
        let mut row = vec![fmt_f64(*t)];
        row.extend(cols.iter().map(|c| fmt_f64(c.value(i))));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// Reads every column as written, without recomputing derived paths.
pub fn read_solution_csv(path: &Path) -> Result<SkorokhodSolution> {
    read_solution(open(path)?)
}

pub fn read_solution(reader: impl Read) -> Result<SkorokhodSolution> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(SOLUTION_HEADER.iter().copied()) {
        return Err(Error::Input(format!("expected header `{}`", SOLUTION_HEADER.join(","))));
    }
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); SOLUTION_HEADER.len()];
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        for (c, col) in cols.iter_mut().enumerate() {
            col.push(parse_cell(&record, c, line)?);
        }
    }
    let grid = TimeGrid::new(cols[0].clone())?;
    let mut paths = cols[1..]
        .iter()
        .map(|v| CadlagPath::new(grid.clone(), v.clone()))
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    let mut next = || paths.next().expect("column count fixed by the header");
    Ok(SkorokhodSolution {
        s: next(),
        phi: next(),
        psi: next(),
        k: next(),
        x: next(),
        kr: next(),
        kl: next(),
        tv: next(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OffsetSpec {
    File {
        file: String,
    },
    Const {
        #[serde(rename = "const")]
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub family: String,
    pub offset: OffsetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    #[serde(rename = "L")]
    pub upper: BoundarySpec,
    #[serde(rename = "R")]
    pub lower: BoundarySpec,
}

impl BoundarySpec {
    /// Offset files are resolved relative to `base`.
    pub fn build(&self, base: &Path) -> Result<BoundaryFunction> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Input(format!("family `{}` requires `{name}`", self.family)))
        };
        let family = match self.family.as_str() {
            "linear" => Family::Linear,
            "scaled" => Family::Scaled { a: need(self.a, "a")? },
            "sine" => Family::SinePerturbed {
                eps: need(self.eps, "eps")?,
                omega: need(self.omega, "omega")?,
            },
            other => return Err(Error::Input(format!("unknown boundary family `{other}`"))),
        };
        let offset = match &self.offset {
            OffsetSpec::Const { value } => CadlagPath::constant(*value)?,
            OffsetSpec::File { file } => read_path_csv(&base.join(file))?,
        };
        BoundaryFunction::new(family, offset)
    }
}

impl PairSpec {
    pub fn build(&self, base: &Path, tol: &Tolerances) -> Result<BoundaryPair> {
        BoundaryPair::new(self.upper.build(base)?, self.lower.build(base)?, tol)
    }
}

pub fn read_pair_json(path: &Path, tol: &Tolerances) -> Result<BoundaryPair> {
    let spec: PairSpec = serde_json::from_reader(open(path)?)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    spec.build(base, tol)
}
