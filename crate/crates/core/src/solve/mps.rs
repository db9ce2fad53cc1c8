//! MPS writer and a minimal reader used to check it.
//!
//! The writer keeps the fixed-format column layout, but generated names are
//! longer than eight characters, so readers must split fields on
//! whitespace (free MPS). The program maximizes, while MPS minimizes: the
//! objective row carries negated weights.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::milp::{MilpModel, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MpsSense {
    N,
    L,
    G,
    E,
}

/// Structural content of an MPS file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MpsModel {
    pub name: String,
    /// Constraint rows in file order (objective row excluded).
    pub rows: Vec<(String, MpsSense)>,
    pub columns: Vec<String>,
    /// Objective coefficient per column, as written (minimization form).
    pub objective: BTreeMap<String, f64>,
    /// `(row, column) → coefficient`
    pub entries: BTreeMap<(String, String), f64>,
    pub rhs: BTreeMap<String, f64>,
    pub binaries: Vec<String>,
}

impl MpsModel {
    /// What `export_mps` should produce for `model`.
    pub fn from_model(model: &MilpModel) -> Self {
        let mut out = MpsModel {
            name: "DSNSCHED".into(),
            ..Default::default()
        };
        for (r, c) in model.constraints.iter().enumerate() {
            let row = row_name(model, r);
            let sense = match c.sense {
                Sense::Le => MpsSense::L,
                Sense::Ge => MpsSense::G,
                Sense::Eq => MpsSense::E,
            };
            for &(v, coef) in &c.terms {
                *out.entries
                    .entry((row.clone(), model.vars.name(v)))
                    .or_insert(0.0) += coef as f64;
            }
            if c.rhs != 0 {
                out.rhs.insert(row.clone(), c.rhs as f64);
            }
            out.rows.push((row, sense));
        }
        for (i, &w) in model.objective().iter().enumerate() {
            let name = model.vars.name(i);
            if w != 0.0 {
                out.objective.insert(name.clone(), -w);
            }
            out.columns.push(name.clone());
            out.binaries.push(name);
        }
        out.entries.retain(|_, c| *c != 0.0);
        out
    }
}

fn row_name(model: &MilpModel, r: usize) -> String {
    format!("{}_{r}", model.constraints[r].tag.row_prefix())
}

fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

pub fn export_mps(model: &MilpModel) -> Vec<u8> {
    let n = model.vars.len();
    let mut columns: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (r, c) in model.constraints.iter().enumerate() {
        let mut merged: BTreeMap<usize, i64> = BTreeMap::new();
        for &(v, coef) in &c.terms {
            *merged.entry(v).or_insert(0) += coef;
        }
        for (v, coef) in merged {
            if coef != 0 {
                columns[v].push((r, coef));
            }
        }
    }

    let mut s = String::new();
    s.push_str("* objective negated: minimize -(c1'x + c2'X)\n");
    s.push_str("NAME          DSNSCHED\n");
    s.push_str("ROWS\n");
    s.push_str(" N  OBJ\n");
    for (r, c) in model.constraints.iter().enumerate() {
        let sense = match c.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(s, " {sense}  {}", row_name(model, r));
    }
    s.push_str("COLUMNS\n");
    for (v, entries) in columns.iter().enumerate() {
        let name = model.vars.name(v);
        let w = model.objective()[v];
        if w != 0.0 || entries.is_empty() {
            let _ = writeln!(s, "    {name:<8}  {:<8}  {:>12}", "OBJ", num(-w));
        }
        for &(r, coef) in entries {
            let _ = writeln!(s, "    {name:<8}  {:<8}  {:>12}", row_name(model, r), coef);
        }
    }
    s.push_str("RHS\n");
    for (r, c) in model.constraints.iter().enumerate() {
        if c.rhs != 0 {
            let _ = writeln!(s, "    {:<8}  {:<8}  {:>12}", "RHS", row_name(model, r), c.rhs);
        }
    }
    s.push_str("BOUNDS\n");
    for v in 0..n {
        let _ = writeln!(s, " BV {:<8}  {}", "BND", model.vars.name(v));
    }
    s.push_str("ENDATA\n");
    s.into_bytes()
}

/// Reads the subset of MPS that [`export_mps`] writes, in free format.
pub fn read_mps(text: &str) -> Result<MpsModel> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
    }
    let bad = |line: usize, msg: &str| Error::parse(format!("mps line {line}"), msg.to_string());
    let mut out = MpsModel::default();
    let mut objective_row: Option<String> = None;
    let mut senses: BTreeMap<String, MpsSense> = BTreeMap::new();
    let mut section = Section::None;
    let mut ended = false;
    let mut seen: HashSet<String> = HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            section = match fields[0] {
                "NAME" => {
                    out.name = fields.get(1).unwrap_or(&"").to_string();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    ended = true;
                    break;
                }
                other => return Err(bad(line_no, &format!("unknown section {other}"))),
            };
            continue;
        }
        let value = |s: &str| s.parse::<f64>().map_err(|_| bad(line_no, "bad number"));
        match section {
            Section::Rows => {
                let [kind, name] = fields[..] else {
                    return Err(bad(line_no, "row needs a type and a name"));
                };
                let sense = match kind {
                    "N" => MpsSense::N,
                    "L" => MpsSense::L,
                    "G" => MpsSense::G,
                    "E" => MpsSense::E,
                    _ => return Err(bad(line_no, "unknown row type")),
                };
                if sense == MpsSense::N {
                    if objective_row.is_some() {
                        return Err(bad(line_no, "more than one objective row"));
                    }
                    objective_row = Some(name.to_string());
                } else {
                    if senses.insert(name.to_string(), sense).is_some() {
                        return Err(bad(line_no, "duplicate row"));
                    }
                    out.rows.push((name.to_string(), sense));
                }
            }
            Section::Columns => {
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(bad(line_no, "column entry needs 3 or 5 fields"));
                }
                let col = fields[0];
                if out.columns.last().map(String::as_str) != Some(col) {
                    if !seen.insert(col.to_string()) {
                        return Err(bad(line_no, "column entries are not contiguous"));
                    }
                    out.columns.push(col.to_string());
                }
                for pair in fields[1..].chunks(2) {
                    let (row, v) = (pair[0], value(pair[1])?);
                    if Some(row) == objective_row.as_deref() {
                        if v != 0.0 {
                            out.objective.insert(col.to_string(), v);
                        }
                    } else if senses.contains_key(row) {
                        if v != 0.0 {
                            out.entries.insert((row.to_string(), col.to_string()), v);
                        }
                    } else {
                        return Err(bad(line_no, &format!("unknown row {row}")));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(bad(line_no, "rhs entry needs 3 or 5 fields"));
                }
                for pair in fields[1..].chunks(2) {
                    if !senses.contains_key(pair[0]) {
                        return Err(bad(line_no, &format!("unknown row {}", pair[0])));
                    }
                    let v = value(pair[1])?;
                    if v != 0.0 {
                        out.rhs.insert(pair[0].to_string(), v);
                    }
                }
            }
            Section::Bounds => {
                let [kind, _, col] = fields[..] else {
                    return Err(bad(line_no, "bound needs type, set and column"));
                };
                if kind != "BV" {
                    return Err(bad(line_no, "only BV bounds are supported"));
                }
                if !seen.contains(col) {
                    return Err(bad(line_no, &format!("bound on unknown column {col}")));
                }
                out.binaries.push(col.to_string());
            }
            Section::None => return Err(bad(line_no, "data outside a section")),
        }
    }
    if !ended {
        return Err(Error::parse("mps", "missing ENDATA"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{ConstraintTag, LinearConstraint, ModelOptions, VarKey, VarKind, Weights};

    fn one_var_model() -> MilpModel {
        let mut vars = crate::milp::VariableSpace::default();
        vars.push(VarKey {
            kind: VarKind::Complete,
            owner: 0,
            t: 0,
        });
        crate::milp::MilpModel::from_parts(
            vars,
            vec![LinearConstraint::new(
                ConstraintTag::DurationBounds,
                vec![(0, 1)],
                Sense::Le,
                1,
            )],
            Weights {
                c1: vec![1.0],
                c2: vec![],
            },
            ModelOptions::default(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn single_binary_single_row() {
        let text = String::from_utf8(export_mps(&one_var_model())).unwrap();
        assert_eq!(text.matches(" N  ").count(), 1);
        assert_eq!(text.matches("\n L  ").count(), 1);
        assert_eq!(text.matches(" BV ").count(), 1);
        let parsed = read_mps(&text).unwrap();
        assert_eq!(parsed, MpsModel::from_model(&one_var_model()));
        assert_eq!(parsed.objective["x_a0"], -1.0);
    }

    #[test]
    fn export_is_deterministic() {
        assert_eq!(export_mps(&one_var_model()), export_mps(&one_var_model()));
    }

    #[test]
    fn reader_rejects_garbage() {
        assert!(read_mps("NAME x\nROWS\n N  OBJ\n").is_err());
        assert!(read_mps("NAME x\nROWS\n Q  r\nENDATA\n").is_err());
    }
}
