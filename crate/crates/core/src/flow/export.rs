//! CSV traces and the witness sidecar.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::int_vecs;

use super::profile::FlowSample;

/// Default number of significant digits in CSV output.
pub const DEFAULT_DIGITS: usize = 15;

fn fmt(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{:.*e}", digits.max(1) - 1, v)
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn csv_header(d: usize) -> String {
    let mut cols = vec!["s".to_string()];
    for name in ["lambda", "psi", "Psi"] {
        cols.extend((1..=d).map(|p| format!("{name}_{p}")));
    }
    cols.join(",")
}

/// Writes `s,lambda_1..lambda_d,psi_1..psi_d,Psi_1..Psi_d`, one row per sample.
pub fn write_trace_csv<W: Write>(mut w: W, samples: &[FlowSample], digits: usize) -> Result<()> {
    let d = samples.first().map_or(0, FlowSample::d);
    writeln!(w, "{}", csv_header(d))?;
    for x in samples {
        let mut row = vec![fmt(x.s, digits)];
        row.extend(x.lambdas.iter().map(|v| fmt(*v, digits)));
        row.extend(x.psis.iter().map(|v| fmt(*v, digits)));
        row.extend(x.big_psis.iter().map(|v| fmt(*v, digits)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a trace written by [`write_trace_csv`]; witnesses are left empty.
pub fn read_trace_csv<R: BufRead>(r: R) -> Result<Vec<FlowSample>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty trace file".into()))??;
    let cols = header.split(',').count();
    if cols < 4 || (cols - 1) % 3 != 0 || !header.starts_with("s,lambda_1") {
        return Err(Error::Parse(format!("unexpected trace header {header:?}")));
    }
    let d = (cols - 1) / 3;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| match t.trim() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => other.parse::<f64>(),
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("trace row {}: {e}", i + 2)))?;
        if vals.len() != cols {
            return Err(Error::Parse(format!("trace row {} has {} fields", i + 2, vals.len())));
        }
        out.push(FlowSample {
            s: vals[0],
            lambdas: vals[1..=d].to_vec(),
            witnesses: Vec::new(),
            psis: vals[d + 1..=2 * d].to_vec(),
            big_psis: vals[2 * d + 1..].to_vec(),
            exact_lambdas: None,
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct Entry<'a> {
    #[serde(serialize_with = "int_vecs::serialize")]
    witnesses: &'a [Vec<BigInt>],
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_lambdas: Option<&'a [String]>,
}

/// JSON object mapping each formatted `s` to its witnesses.
pub fn witness_sidecar(samples: &[FlowSample], digits: usize) -> Result<String> {
    let mut map = serde_json::Map::new();
    for x in samples {
        let entry = Entry { witnesses: &x.witnesses, exact_lambdas: x.exact_lambdas.as_deref() };
        map.insert(fmt(x.s, digits), serde_json::to_value(entry)?);
    }
    Ok(serde_json::to_string_pretty(&serde_json::Value::Object(map))?)
}
