//! Reader and writer for the explicit full-matrix ATSP subset of TSPLIB.
//!
//! Recognized keywords: `NAME`, `TYPE` (must be `ATSP`), `DIMENSION`,
//! `EDGE_WEIGHT_TYPE` (must be `EXPLICIT`), `EDGE_WEIGHT_FORMAT` (must be
//! `FULL_MATRIX`), `EDGE_WEIGHT_SECTION` and `EOF`. `COMMENT` lines are
//! skipped. Diagonal entries are read and then forced to zero, since many
//! published ATSP files store a large sentinel there.

use crate::error::{Error, Result};
use crate::model::Instance;

pub fn parse_tsplib(text: &str) -> Result<Instance> {
    let mut name = String::from("unnamed");
    let mut dimension: Option<usize> = None;
    let mut saw_type = false;
    let mut saw_weight_type = false;
    let mut saw_format = false;
    let mut weights: Option<Vec<f64>> = None;

    let mut lines = text.lines();
    while let Some(line) = lines.next() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        match key {
            "NAME" => name = value.to_string(),
            "COMMENT" => {}
            "TYPE" => {
                if value != "ATSP" {
                    return Err(Error::Tsplib(format!(
                        "unsupported TYPE '{value}' (only ATSP is accepted)"
                    )));
                }
                saw_type = true;
            }
            "DIMENSION" => {
                dimension = Some(value.parse().map_err(|_| {
                    Error::Tsplib(format!("DIMENSION '{value}' is not an integer"))
                })?)
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EXPLICIT" {
                    return Err(Error::Tsplib(format!(
                        "unsupported EDGE_WEIGHT_TYPE '{value}' (only EXPLICIT is accepted)"
                    )));
                }
                saw_weight_type = true;
            }
            "EDGE_WEIGHT_FORMAT" => {
                if value != "FULL_MATRIX" {
                    return Err(Error::Tsplib(format!(
                        "unsupported EDGE_WEIGHT_FORMAT '{value}' (only FULL_MATRIX is accepted)"
                    )));
                }
                saw_format = true;
            }
            "EDGE_WEIGHT_SECTION" => {
                let n = dimension.ok_or_else(|| {
                    Error::Tsplib("EDGE_WEIGHT_SECTION before DIMENSION".into())
                })?;
                let mut values = Vec::with_capacity(n * n);
                // Values may also follow the keyword on the same line.
                let rest = value.split_whitespace();
                for tok in rest.chain(lines.by_ref().flat_map(str::split_whitespace)) {
                    if values.len() == n * n {
                        if tok == "EOF" {
                            break;
                        }
                        return Err(Error::Tsplib(format!(
                            "unexpected token '{tok}' after {} weights",
                            n * n
                        )));
                    }
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| Error::Tsplib(format!("bad weight token '{tok}'")))?;
                    values.push(v);
                }
                if values.len() != n * n {
                    return Err(Error::Tsplib(format!(
                        "EDGE_WEIGHT_SECTION holds {} values, expected {}",
                        values.len(),
                        n * n
                    )));
                }
                weights = Some(values);
            }
            "EOF" => break,
            other => {
                return Err(Error::Tsplib(format!("unsupported keyword '{other}'")));
            }
        }
    }

    for (seen, field) in [
        (saw_type, "TYPE"),
        (saw_weight_type, "EDGE_WEIGHT_TYPE"),
        (saw_format, "EDGE_WEIGHT_FORMAT"),
    ] {
        if !seen {
            return Err(Error::Tsplib(format!("missing {field}")));
        }
    }
    let n = dimension.ok_or_else(|| Error::Tsplib("missing DIMENSION".into()))?;
    let mut w = weights.ok_or_else(|| Error::Tsplib("missing EDGE_WEIGHT_SECTION".into()))?;
    for i in 0..n {
        w[i * n + i] = 0.0;
    }
    Instance::new(name, n, w)
}

pub fn write_tsplib(inst: &Instance) -> String {
    let n = inst.n();
    let mut out = String::new();
    out.push_str(&format!("NAME: {}\n", inst.name()));
    out.push_str("TYPE: ATSP\n");
    out.push_str(&format!("DIMENSION: {n}\n"));
    out.push_str("EDGE_WEIGHT_TYPE: EXPLICIT\n");
    out.push_str("EDGE_WEIGHT_FORMAT: FULL_MATRIX\n");
    out.push_str("EDGE_WEIGHT_SECTION\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{}", inst.cost(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.push_str("EOF\n");
    out
}
