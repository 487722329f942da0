//! Free-format MPS reader for the files `write_mps` produces.
//!
//! The first `N` row is the objective; `COST 0` placeholder entries are
//! skipped. Columns between `INTORG` and `INTEND` markers are integer with
//! default bounds `[0, inf)`; a `BV` bound makes a column binary.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::mip::{Constraint, LinearModel, Sense, VarKind, Variable};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Rows,
    Columns,
    Rhs,
    Bounds,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::MpsParse { line, msg: msg.into() }
}

fn number(line: usize, text: &str) -> Result<f64> {
    text.parse::<f64>().map_err(|_| err(line, format!("bad number `{text}`")))
}

pub fn read_mps(text: &str) -> Result<LinearModel> {
    read_mps_from(text.as_bytes())
}

/// Line-streaming variant of [`read_mps`]; the text is never held whole.
pub fn read_mps_from<R: BufRead>(reader: R) -> Result<LinearModel> {
    let mut model = LinearModel::default();
    let mut section = Section::Start;
    let mut objective: Option<String> = None;
    let mut rows: HashMap<String, usize> = HashMap::new();
    let mut cols: HashMap<String, usize> = HashMap::new();
    let mut obj_coef: Vec<(usize, f64)> = Vec::new();
    let mut in_int = false;
    let mut ended = false;
    let mut last_line = 0;

    for (idx, raw) in reader.lines().enumerate() {
        let raw = raw?;
        let line = idx + 1;
        last_line = line;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if ended {
            return Err(err(line, "content after ENDATA"));
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            match toks[0] {
                "NAME" => model.name = toks.get(1).unwrap_or(&"").to_string(),
                "ROWS" => section = Section::Rows,
                "COLUMNS" => section = Section::Columns,
                "RHS" => section = Section::Rhs,
                "BOUNDS" => section = Section::Bounds,
                "ENDATA" => ended = true,
                other => return Err(err(line, format!("unsupported section `{other}`"))),
            }
            continue;
        }
        match section {
            Section::Start => return Err(err(line, "data before the first section")),
            Section::Rows => {
                let [kind, name] = toks[..] else {
                    return Err(err(line, "expected `<type> <row>`"));
                };
                let sense = match kind {
                    "N" => {
                        if objective.is_none() {
                            objective = Some(name.to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    _ => return Err(err(line, format!("unknown row type `{kind}`"))),
                };
                if rows.insert(name.to_string(), model.constraints.len()).is_some() {
                    return Err(err(line, format!("duplicate row `{name}`")));
                }
                model.constraints.push(Constraint {
                    name: name.to_string(),
                    coeffs: Vec::new(),
                    sense,
                    rhs: 0.0,
                });
            }
            Section::Columns => {
                if toks.get(1) == Some(&"'MARKER'") {
                    match toks.get(2) {
                        Some(&"'INTORG'") => in_int = true,
                        Some(&"'INTEND'") => in_int = false,
                        _ => return Err(err(line, "unknown marker")),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err(line, "expected `<column> <row> <value> [<row> <value>]`"));
                }
                let name = toks[0];
                let j = match cols.get(name) {
                    Some(&j) => {
                        if j + 1 != model.variables.len() {
                            return Err(err(line, format!("column `{name}` is not contiguous")));
                        }
                        j
                    }
                    None => {
                        let j = model.variables.len();
                        cols.insert(name.to_string(), j);
                        let kind = if in_int { VarKind::Integer } else { VarKind::Continuous };
                        model.variables.push(Variable {
                            name: name.to_string(),
                            lower: 0.0,
                            upper: f64::INFINITY,
                            kind,
                        });
                        j
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let value = number(line, pair[1])?;
                    if Some(pair[0]) == objective.as_deref() {
                        if value != 0.0 {
                            obj_coef.push((j, value));
                        }
                    } else {
                        let r = *rows.get(pair[0]).ok_or_else(|| err(line, format!("unknown row `{}`", pair[0])))?;
                        model.constraints[r].coeffs.push((j, value));
                    }
                }
            }
            Section::Rhs => {
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err(line, "expected `<set> <row> <value> [<row> <value>]`"));
                }
                for pair in toks[1..].chunks(2) {
                    let value = number(line, pair[1])?;
                    if Some(pair[0]) == objective.as_deref() {
                        continue;
                    }
                    let r = *rows.get(pair[0]).ok_or_else(|| err(line, format!("unknown row `{}`", pair[0])))?;
                    model.constraints[r].rhs = value;
                }
            }
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(err(line, "expected `<type> <set> <column> [<value>]`"));
                }
                let j = *cols.get(toks[2]).ok_or_else(|| err(line, format!("unknown column `{}`", toks[2])))?;
                let value = || -> Result<f64> {
                    let t = toks.get(3).ok_or_else(|| err(line, "missing bound value"))?;
                    number(line, t)
                };
                let v = &mut model.variables[j];
                match toks[0] {
                    "BV" => {
                        v.kind = VarKind::Binary;
                        v.lower = 0.0;
                        v.upper = 1.0;
                    }
                    "LO" => v.lower = value()?,
                    "UP" => v.upper = value()?,
                    "FX" => {
                        let x = value()?;
                        v.lower = x;
                        v.upper = x;
                    }
                    "MI" => v.lower = f64::NEG_INFINITY,
                    "PL" => v.upper = f64::INFINITY,
                    "FR" => {
                        v.lower = f64::NEG_INFINITY;
                        v.upper = f64::INFINITY;
                    }
                    other => return Err(err(line, format!("unsupported bound type `{other}`"))),
                }
            }
        }
    }
    if !ended {
        return Err(err(last_line + 1, "missing ENDATA"));
    }
    if objective.is_none() {
        return Err(err(last_line, "no objective row"));
    }
    model.objective = obj_coef;
    Ok(model)
}
