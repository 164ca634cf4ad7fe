use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::instance::{InstanceError, MilpInstance, RowSense, SparseRow, VarType};
use crate::BOUND_SENTINEL;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: invalid instance: {source}")]
    Invalid {
        line: usize,
        source: InstanceError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn malformed(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// Formats a float with 17 significant digits so that parsing recovers the
/// exact bit pattern.
fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn encode_bound(v: f64) -> f64 {
    if v == f64::INFINITY {
        BOUND_SENTINEL
    } else if v == f64::NEG_INFINITY {
        -BOUND_SENTINEL
    } else {
        v
    }
}

fn decode_bound(v: f64) -> f64 {
    if v >= BOUND_SENTINEL {
        f64::INFINITY
    } else if v <= -BOUND_SENTINEL {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Serializes an instance to the line-oriented text format.
///
/// ```text
/// MILP <name> <num_vars> <num_cons>
/// OBJ v0 v1 ...
/// VAR <idx> <B|I|C> <lb> <ub>          (one line per variable, in order)
/// ROW <G|L|E> <rhs> <nnz> <idx:coef>...(one line per row, in order)
/// ```
pub fn write_instance_string(inst: &MilpInstance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "MILP {} {} {}",
        inst.name,
        inst.num_vars,
        inst.num_cons()
    )
    .unwrap();
    let obj: Vec<String> = inst.objective.iter().map(|&c| fmt_float(c)).collect();
    writeln!(out, "OBJ {}", obj.join(" ")).unwrap();
    for j in 0..inst.num_vars {
        let t = match inst.vtypes[j] {
            VarType::Binary => "B",
            VarType::Integer => "I",
            VarType::Continuous => "C",
        };
        writeln!(
            out,
            "VAR {} {} {} {}",
            j,
            t,
            fmt_float(encode_bound(inst.lower[j])),
            fmt_float(encode_bound(inst.upper[j]))
        )
        .unwrap();
    }
    for (i, row) in inst.rows.iter().enumerate() {
        let s = match inst.senses[i] {
            RowSense::Ge => "G",
            RowSense::Le => "L",
            RowSense::Eq => "E",
        };
        let mut line = format!("ROW {} {} {}", s, fmt_float(inst.rhs[i]), row.nnz());
        for &(j, a) in &row.entries {
            line.push(' ');
            let _ = write!(line, "{}:{}", j, fmt_float(a));
        }
        writeln!(out, "{line}").unwrap();
    }
    out
}

pub fn write_instance(inst: &MilpInstance, path: impl AsRef<Path>) -> std::io::Result<()> {
    fs::write(path, write_instance_string(inst))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<MilpInstance, ParseError> {
    let text = fs::read_to_string(path)?;
    read_instance_str(&text)
}

pub fn read_instance_str(text: &str) -> Result<MilpInstance, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (lno, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty file"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("MILP") {
        return Err(malformed(lno, "expected `MILP` header"));
    }
    let name = parts
        .next()
        .ok_or_else(|| malformed(lno, "missing instance name"))?
        .to_string();
    let num_vars: usize = parse_field(lno, parts.next(), "num_vars")?;
    let num_cons: usize = parse_field(lno, parts.next(), "num_cons")?;

    let (lno, obj_line) = lines
        .next()
        .ok_or_else(|| malformed(lno + 1, "missing OBJ line"))?;
    let mut parts = obj_line.split_whitespace();
    if parts.next() != Some("OBJ") {
        return Err(malformed(lno, "expected `OBJ` line"));
    }
    let objective: Vec<f64> = parts
        .map(|t| parse_float(lno, t))
        .collect::<Result<_, _>>()?;
    if objective.len() != num_vars {
        return Err(malformed(
            lno,
            format!("OBJ has {} values, expected {}", objective.len(), num_vars),
        ));
    }

    let mut lower = vec![0.0; num_vars];
    let mut upper = vec![0.0; num_vars];
    let mut vtypes = vec![VarType::Continuous; num_vars];
    for expect in 0..num_vars {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| malformed(0, format!("missing VAR line for variable {expect}")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some("VAR") {
            return Err(malformed(lno, "expected `VAR` line"));
        }
        let idx: usize = parse_field(lno, parts.next(), "index")?;
        if idx != expect {
            return Err(malformed(
                lno,
                format!("VAR index {idx} out of order, expected {expect}"),
            ));
        }
        vtypes[idx] = match parts.next() {
            Some("B") => VarType::Binary,
            Some("I") => VarType::Integer,
            Some("C") => VarType::Continuous,
            other => {
                return Err(malformed(
                    lno,
                    format!("bad variable type {other:?}, expected B, I, or C"),
                ))
            }
        };
        lower[idx] = decode_bound(parse_field(lno, parts.next(), "lower bound")?);
        upper[idx] = decode_bound(parse_field(lno, parts.next(), "upper bound")?);
    }

    let mut rows = Vec::with_capacity(num_cons);
    let mut senses = Vec::with_capacity(num_cons);
    let mut rhs = Vec::with_capacity(num_cons);
    let mut last_line = 0;
    for r in 0..num_cons {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| malformed(0, format!("missing ROW line for row {r}")))?;
        last_line = lno;
        let mut parts = line.split_whitespace();
        if parts.next() != Some("ROW") {
            return Err(malformed(lno, "expected `ROW` line"));
        }
        senses.push(match parts.next() {
            Some("G") => RowSense::Ge,
            Some("L") => RowSense::Le,
            Some("E") => RowSense::Eq,
            other => {
                return Err(malformed(
                    lno,
                    format!("bad row sense {other:?}, expected G, L, or E"),
                ))
            }
        });
        rhs.push(parse_field(lno, parts.next(), "rhs")?);
        let nnz: usize = parse_field(lno, parts.next(), "nnz")?;
        let mut entries = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let tok = parts
                .next()
                .ok_or_else(|| malformed(lno, "fewer entries than declared nnz"))?;
            let (j, a) = tok
                .split_once(':')
                .ok_or_else(|| malformed(lno, format!("bad entry `{tok}`, expected idx:coef")))?;
            let j: usize = j
                .parse()
                .map_err(|_| malformed(lno, format!("bad column index `{j}`")))?;
            entries.push((j, parse_float(lno, a)?));
        }
        if parts.next().is_some() {
            return Err(malformed(lno, "more entries than declared nnz"));
        }
        rows.push(SparseRow::new(entries));
    }
    if let Some((lno, extra)) = lines.next() {
        if !extra.trim().is_empty() {
            return Err(malformed(lno, "trailing content after last row"));
        }
    }

    MilpInstance::new(
        name, num_vars, objective, rows, senses, rhs, lower, upper, vtypes,
    )
    .map_err(|source| ParseError::Invalid {
        line: last_line,
        source,
    })
}

fn parse_field<T: std::str::FromStr>(
    line: usize,
    tok: Option<&str>,
    what: &str,
) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| malformed(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| malformed(line, format!("bad {what}: `{tok}`")))
}

fn parse_float(line: usize, tok: &str) -> Result<f64, ParseError> {
    tok.parse()
        .map_err(|_| malformed(line, format!("bad float: `{tok}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MilpInstance {
        MilpInstance::new(
            "sample",
            3,
            vec![1.0, -2.5, 0.125],
            vec![
                SparseRow::new(vec![(0, 1.0), (2, -3.5)]),
                SparseRow::new(vec![(1, 2.0)]),
            ],
            vec![RowSense::Ge, RowSense::Eq],
            vec![1.0, 4.0],
            vec![0.0, f64::NEG_INFINITY, -1.0],
            vec![1.0, f64::INFINITY, 1.0],
            vec![VarType::Binary, VarType::Continuous, VarType::Integer],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        let inst = sample();
        let text = write_instance_string(&inst);
        let back = read_instance_str(&text).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn infinities_round_trip_through_sentinel() {
        let inst = sample();
        let back = read_instance_str(&write_instance_string(&inst)).unwrap();
        assert_eq!(back.lower[1], f64::NEG_INFINITY);
        assert_eq!(back.upper[1], f64::INFINITY);
    }

    #[test]
    fn duplicate_row_index_is_rejected_with_line_number() {
        let text = "MILP t 2 1\nOBJ 0 0\nVAR 0 C 0 1\nVAR 1 C 0 1\nROW G 1 2 0:1 0:2\n";
        let err = read_instance_str(text).unwrap_err();
        match err {
            ParseError::Invalid { line, .. } => assert_eq!(line, 5),
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn truncated_row_errors() {
        let text = "MILP t 1 1\nOBJ 0\nVAR 0 C 0 1\nROW G 1 2 0:1\n";
        assert!(read_instance_str(text).is_err());
    }

    #[test]
    fn bad_header_errors() {
        assert!(read_instance_str("NOPE x 1 0\n").is_err());
    }
}
