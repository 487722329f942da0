//! MPS export.
//!
//! Fields are laid out at the classic fixed columns, but names longer than
//! eight characters overflow their field, so readers must split on
//! whitespace (free MPS). Names never contain spaces. Numbers use Rust's
//! shortest round-trip `f64` formatting, so a re-parse is bit-exact.
//!
//! Binary columns get a `BV` bound (plus `UP 0` when fixed to zero), other
//! integer columns explicit `LO`/`UP`/`PL` bounds, continuous columns only
//! non-default bounds. A column without any coefficient gets a `COST 0`
//! entry so that it is still declared.

use std::fmt::Write as _;
use std::io::{self, Write as _};

use super::{LinearModel, Sense, VarKind};

fn objective_row_name(model: &LinearModel) -> String {
    let mut name = "COST".to_string();
    while model.constraints.iter().any(|c| c.name == name) {
        name.push('_');
    }
    name
}

pub fn write_mps(model: &LinearModel) -> String {
    let mut out = Vec::new();
    write_mps_to(model, &mut out).expect("writing to memory");
    String::from_utf8(out).expect("ASCII output")
}

/// Stream the MPS text of `model` into `out`.
pub fn write_mps_to<W: io::Write>(model: &LinearModel, out: &mut W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    let obj = objective_row_name(model);
    let name = if model.name.is_empty() { "MODEL" } else { &model.name };
    writeln!(out, "NAME          {name}")?;
    writeln!(out, "ROWS")?;
    writeln!(out, " N  {obj}")?;
    for c in &model.constraints {
        let tag = match c.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        writeln!(out, " {tag}  {}", c.name)?;
    }

    // Column-major view of the rows.
    let n = model.variables.len();
    let mut start = vec![0usize; n + 1];
    for c in &model.constraints {
        for &(j, _) in &c.coeffs {
            start[j + 1] += 1;
        }
    }
    for j in 0..n {
        start[j + 1] += start[j];
    }
    let mut fill = start.clone();
    let mut entries = vec![(0usize, 0.0f64); start[n]];
    for (r, c) in model.constraints.iter().enumerate() {
        for &(j, a) in &c.coeffs {
            entries[fill[j]] = (r, a);
            fill[j] += 1;
        }
    }
    let mut obj_coef = vec![0.0f64; n];
    for &(j, c) in &model.objective {
        obj_coef[j] = c;
    }

    writeln!(out, "COLUMNS")?;
    let mut in_int = false;
    let mut markers = 0usize;
    let mut line = String::new();
    for (j, var) in model.variables.iter().enumerate() {
        let is_int = var.kind != VarKind::Continuous;
        if is_int != in_int {
            let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
            writeln!(out, "    M{markers:07}  'MARKER'                 {tag}")?;
            markers += 1;
            in_int = is_int;
        }
        let col = &var.name;
        let mut any = false;
        if obj_coef[j] != 0.0 {
            line.clear();
            write!(line, "    {col:<8}  {obj:<8}  {:>12}", obj_coef[j]).unwrap();
            writeln!(out, "{line}")?;
            any = true;
        }
        for &(r, a) in &entries[start[j]..start[j + 1]] {
            line.clear();
            write!(line, "    {col:<8}  {:<8}  {a:>12}", model.constraints[r].name).unwrap();
            writeln!(out, "{line}")?;
            any = true;
        }
        if !any {
            writeln!(out, "    {col:<8}  {obj:<8}  {:>12}", 0)?;
        }
    }
    if in_int {
        writeln!(out, "    M{markers:07}  'MARKER'                 'INTEND'")?;
    }

    writeln!(out, "RHS")?;
    for c in &model.constraints {
        if c.rhs != 0.0 {
            writeln!(out, "    RHS       {:<8}  {:>12}", c.name, c.rhs)?;
        }
    }

    writeln!(out, "BOUNDS")?;
    for var in &model.variables {
        let col = &var.name;
        match var.kind {
            VarKind::Binary => {
                writeln!(out, " BV BND       {col}")?;
                if var.lower != 0.0 {
                    writeln!(out, " LO BND       {col:<8}  {:>12}", var.lower)?;
                }
                if var.upper != 1.0 {
                    writeln!(out, " UP BND       {col:<8}  {:>12}", var.upper)?;
                }
            }
            VarKind::Integer | VarKind::Continuous => {
                let explicit = var.kind == VarKind::Integer;
                if var.lower == f64::NEG_INFINITY && var.upper == f64::INFINITY {
                    writeln!(out, " FR BND       {col}")?;
                    continue;
                }
                if var.lower == f64::NEG_INFINITY {
                    writeln!(out, " MI BND       {col}")?;
                } else if var.lower != 0.0 || explicit {
                    writeln!(out, " LO BND       {col:<8}  {:>12}", var.lower)?;
                }
                if var.upper.is_finite() {
                    writeln!(out, " UP BND       {col:<8}  {:>12}", var.upper)?;
                } else if explicit {
                    writeln!(out, " PL BND       {col}")?;
                }
            }
        }
    }
    writeln!(out, "ENDATA")?;
    out.flush()
}
