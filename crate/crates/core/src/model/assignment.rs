use std::collections::BTreeMap;

use super::{IlpModel, VarId, VarKind};
use crate::error::{Error, Result};
use crate::geometry::{Placement, Tiling};

/// Integer values by variable; absent variables read as zero.
pub type Assignment = BTreeMap<VarId, i64>;

fn parse_value(token: &str, line: usize) -> Result<i64> {
    if let Ok(v) = token.parse::<i64>() {
        return Ok(v);
    }
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("`{token}` is not a number")))?;
    let rounded = v.round();
    if !v.is_finite() || (v - rounded).abs() > 1e-6 || rounded.abs() > 1e15 {
        return Err(Error::parse(line, format!("`{token}` is not integral")));
    }
    Ok(rounded as i64)
}

/// Reads `<varname> <value>` lines as written by common solvers. Blank
/// lines and `#` comments are skipped; values may be printed as floats
/// but must be integral.
pub fn parse_assignment(text: &str) -> Result<Assignment> {
    let mut out = Assignment::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [name, value] = fields[..] else {
            return Err(Error::parse(lineno, "expected `<variable> <value>`"));
        };
        let id: VarId = name.parse().map_err(|e: String| Error::parse(lineno, e))?;
        let value = parse_value(value, lineno)?;
        if out.insert(id, value).is_some() {
            return Err(Error::parse(lineno, format!("`{name}` assigned twice")));
        }
    }
    Ok(out)
}

/// The assignment a tiling induces on `model`: its corner variables set,
/// and the size counts when the model has them.
pub fn assignment_from_tiling(model: &IlpModel, t: &Tiling) -> Result<Assignment> {
    t.ensure_valid()?;
    if t.n() != model.n() {
        return Err(Error::InvalidParameter(format!(
            "tiling of side {} does not fit a model of side {}",
            t.n(),
            model.n()
        )));
    }
    let mut out = Assignment::new();
    for p in t.placements() {
        out.insert(
            VarId::X {
                i: p.row,
                j: p.col,
                h: p.size,
            },
            1,
        );
    }
    if model.has_y_link() {
        for h in 1..model.n() {
            let count = t.placements().iter().filter(|p| p.size == h).count();
            out.insert(VarId::Y { h }, count as i64);
        }
    }
    Ok(out)
}

/// Checks `assignment` against every bound and constraint of `model`, in
/// model order, and reads off the tiling.
pub fn decode_solution(model: &IlpModel, assignment: &Assignment) -> Result<Tiling> {
    if let Some(id) = assignment.keys().find(|id| model.variable(**id).is_none()) {
        return Err(Error::InvalidParameter(format!(
            "`{id}` is not a variable of this model"
        )));
    }
    let value = |id: VarId| assignment.get(&id).copied().unwrap_or(0);
    for decl in model.variables() {
        let v = value(decl.id);
        if v < decl.lower || v > decl.upper {
            return Err(Error::InfeasibleAssignment(format!("bound on {}", decl.id)));
        }
    }
    for c in model.constraints() {
        let lhs = c.terms.iter().try_fold(0i64, |acc, &(v, k)| {
            acc.checked_add(k.checked_mul(value(v))?)
        });
        if !lhs.is_some_and(|lhs| c.relation.holds(lhs, c.rhs)) {
            return Err(Error::InfeasibleAssignment(c.label.clone()));
        }
    }
    let placements = model
        .variables()
        .iter()
        .filter(|d| d.kind == VarKind::Binary && value(d.id) == 1)
        .filter_map(|d| match d.id {
            VarId::X { i, j, h } => Some(Placement::new(i, j, h)),
            VarId::Y { .. } => None,
        })
        .collect();
    Tiling::checked(model.n(), placements)
}
