//! Tabular output (CSV or JSON) and development CSV input.

use std::io::{Read, Write};

use serde::Serialize;
use serde_json::{json, Value};

use crate::beta::BetaField;
use crate::bishop::{BishopField, NormalDevelopment};
use crate::error::Error;
use crate::frenet::FrenetSample;
use crate::lift::{LiftAnalysis, PolarLift};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

pub const SCHEMA: &str = "framecast/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
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

/// Named columns of optional floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Seventeen significant digits: enough to read back the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn push<S: Scalar>(&mut self, row: impl IntoIterator<Item = Option<S>>) {
        let row: Vec<Option<f64>> = row.into_iter().map(|v| v.map(|v| v.to_f64_lossy())).collect();
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| v.map(fmt_f64).unwrap_or_default()))?;
        }
        out.flush()
    }

    pub fn to_json(&self) -> Value {
        json!({ "schema": SCHEMA, "columns": self.columns, "rows": self.rows })
    }

    pub fn write(&self, format: Format, w: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &self.to_json())?;
                writeln!(w)
            }
        }
    }
}

fn v3<S: Scalar>(v: Vec3<S>) -> [Option<S>; 3] {
    [Some(v.x), Some(v.y), Some(v.z)]
}

fn v3o<S: Scalar>(v: Option<Vec3<S>>) -> [Option<S>; 3] {
    v.map_or([None; 3], v3)
}

pub fn frenet_table<S: Scalar>(f: &[FrenetSample<S>]) -> Table {
    let mut t = Table::new(&["s", "Tx", "Ty", "Tz", "kappa_f", "Nx", "Ny", "Nz", "Bx", "By", "Bz", "tau_f"]);
    for p in f {
        let mut row = vec![Some(p.s)];
        row.extend(v3(p.t));
        row.push(Some(p.kappa_f));
        row.extend(v3o(p.n_f));
        row.extend(v3o(p.b_f));
        row.push(p.tau_f);
        t.push(row);
    }
    t
}

pub fn bishop_table<S: Scalar>(b: &BishopField<S>) -> Table {
    let mut t = Table::new(&["s", "Tx", "Ty", "Tz", "M1x", "M1y", "M1z", "M2x", "M2y", "M2z", "k1", "k2"]);
    for i in 0..b.len() {
        let mut row = vec![Some(b.s[i])];
        row.extend(v3(b.t[i]));
        row.extend(v3(b.m1[i]));
        row.extend(v3(b.m2[i]));
        row.extend([Some(b.k1[i]), Some(b.k2[i])]);
        t.push(row);
    }
    t
}

pub fn development_table<S: Scalar>(nd: &NormalDevelopment<S>) -> Table {
    let mut t = Table::new(&["s", "k1", "k2"]);
    for i in 0..nd.len() {
        t.push([Some(nd.s[i]), Some(nd.k1[i]), Some(nd.k2[i])]);
    }
    t
}

pub fn lift_table<S: Scalar>(l: &PolarLift<S>) -> Table {
    let mut t = Table::new(&["s", "r_tilde", "theta_tilde"]);
    for i in 0..l.len() {
        t.push([Some(l.s[i]), Some(l.r_tilde[i]), Some(l.theta_tilde[i])]);
    }
    t
}

pub fn beta_table<S: Scalar>(b: &BetaField<S>) -> Table {
    let mut t = Table::new(&["s", "Tx", "Ty", "Tz", "Nx", "Ny", "Nz", "Bx", "By", "Bz", "kappa_beta", "tau_beta"]);
    for i in 0..b.len() {
        let mut row = vec![Some(b.s[i])];
        row.extend(v3(b.t[i]));
        row.extend(v3(b.n[i]));
        row.extend(v3(b.b[i]));
        row.extend([Some(b.kappa[i]), b.tau[i]]);
        t.push(row);
    }
    t
}

/// Read a development CSV with header `s,k1,k2`.
pub fn read_development<S: Scalar>(r: impl Read) -> Result<NormalDevelopment<S>, Error> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = rdr.headers().map_err(|e| Error::Input(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["s", "k1", "k2"] {
        return Err(Error::Input(format!("expected header s,k1,k2, got {header:?}")));
    }
    let (mut s, mut k1, mut k2) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.deserialize::<(f64, f64, f64)>() {
        let (a, b, c) = rec.map_err(|e| Error::Input(e.to_string()))?;
        s.push(S::lit(a));
        k1.push(S::lit(b));
        k2.push(S::lit(c));
    }
    if let Some(i) = s.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Input(format!("s must be strictly increasing (row {})", i + 1)));
    }
    Ok(NormalDevelopment::new(s, k1, k2)?)
}

/// Lift verdict and per-zero analysis as JSON.
pub fn lift_report<S: Scalar + Serialize>(name: &str, analysis: &LiftAnalysis<S>, lift: &PolarLift<S>) -> Value {
    json!({
        "schema": SCHEMA,
        "input": name,
        "verdict": lift.verdict,
        "base_index": lift.base_index,
        "c1_flags": lift.c1_flags,
        "zeros": analysis.zeros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn development_csv_round_trips_exactly() {
        let nd = NormalDevelopment::new(vec![0.0, 0.1, 0.30000000000000004], vec![1.0 / 3.0, -2e-300, 0.0], vec![
            std::f64::consts::PI,
            1e10 / 7.0,
            -0.0,
        ])
        .unwrap();
        let mut buf = Vec::new();
        development_table(&nd).write_csv(&mut buf).unwrap();
        let back: NormalDevelopment<f64> = read_development(buf.as_slice()).unwrap();
        assert_eq!(back, nd);
    }

    #[test]
    fn absent_values_are_empty_fields() {
        let mut t = Table::new(&["a", "b"]);
        t.push([Some(1.0_f64), None]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1.0000000000000000e0,\n");
    }
}
