//! Solver-neutral text formats. Both writers are deterministic: variables
//! appear in declaration order and constraints in model order.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{IlpModel, Relation, VarId, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Lp,
    Mps,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Lp => "lp",
            ExportFormat::Mps => "mps",
        }
    }
}

pub fn export_model(model: &IlpModel, format: ExportFormat) -> String {
    match format {
        ExportFormat::Lp => write_lp(model),
        ExportFormat::Mps => write_mps(model),
    }
}

const LP_LINE: usize = 240;

/// Appends `terms` as an LP expression, wrapping long lines.
fn lp_expression(out: &mut String, line_start: usize, terms: &[(VarId, i64)]) {
    let mut width = out.len() - line_start;
    for (k, &(id, coef)) in terms.iter().enumerate() {
        let sign = if coef < 0 { "-" } else { "+" };
        let magnitude = coef.unsigned_abs();
        let mut piece = String::new();
        if k > 0 || coef < 0 {
            piece.push_str(sign);
            piece.push(' ');
        }
        if magnitude != 1 {
            write!(piece, "{magnitude} ").unwrap();
        }
        write!(piece, "{id}").unwrap();
        if width + piece.len() + 1 > LP_LINE {
            out.push_str("\n   ");
            width = 3;
        } else if k > 0 {
            out.push(' ');
            width += 1;
        }
        width += piece.len();
        out.push_str(&piece);
    }
}

fn write_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    writeln!(out, "\\ {}", model.file_stem()).unwrap();
    out.push_str("Minimize\n");
    let start = out.len();
    out.push_str(" obj: ");
    lp_expression(&mut out, start, model.objective());
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let start = out.len();
        write!(out, " {}: ", c.label).unwrap();
        lp_expression(&mut out, start, &c.terms);
        let rel = match c.relation {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        };
        writeln!(out, " {rel} {}", c.rhs).unwrap();
    }

    out.push_str("Bounds\n");
    for v in model.variables() {
        if model.is_boundary_fixed(v.id) {
            writeln!(out, " {} = 0", v.id).unwrap();
        } else if v.kind == VarKind::Integer {
            writeln!(out, " {} <= {} <= {}", v.lower, v.id, v.upper).unwrap();
        }
    }
    // Pinned corner variables go to Generals so their zero bound is not
    // overridden by a binary declaration.
    let binaries: Vec<_> = model
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Binary && !model.is_boundary_fixed(v.id))
        .map(|v| v.id)
        .collect();
    let generals: Vec<_> = model
        .variables()
        .iter()
        .filter(|v| v.kind == VarKind::Integer || model.is_boundary_fixed(v.id))
        .map(|v| v.id)
        .collect();
    for (title, ids) in [("Binaries", binaries), ("Generals", generals)] {
        if ids.is_empty() {
            continue;
        }
        writeln!(out, "{title}").unwrap();
        for chunk in ids.chunks(10) {
            let names: Vec<String> = chunk.iter().map(|id| id.to_string()).collect();
            writeln!(out, " {}", names.join(" ")).unwrap();
        }
    }
    out.push_str("End\n");
    out
}

/// Fixed-column MPS layout, with the name fields widened to the longest
/// name so that every field still lines up.
fn write_mps(model: &IlpModel) -> String {
    let col_width = model
        .variables()
        .iter()
        .map(|v| v.id.to_string().len())
        .max()
        .unwrap_or(8)
        .max(8);
    let row_width = model
        .constraints()
        .iter()
        .map(|c| c.label.len())
        .max()
        .unwrap_or(8)
        .max(8);

    let mut out = String::new();
    writeln!(out, "NAME          {}", model.file_stem()).unwrap();
    out.push_str("ROWS\n N  obj\n");
    for c in model.constraints() {
        let kind = match c.relation {
            Relation::Eq => 'E',
            Relation::Le => 'L',
            Relation::Ge => 'G',
        };
        writeln!(out, " {kind}  {}", c.label).unwrap();
    }

    let mut columns: BTreeMap<usize, Vec<(&str, i64)>> = BTreeMap::new();
    for &(id, coef) in model.objective() {
        columns
            .entry(model.position(id).expect("declared"))
            .or_default()
            .push(("obj", coef));
    }
    for c in model.constraints() {
        for &(id, coef) in &c.terms {
            columns
                .entry(model.position(id).expect("declared"))
                .or_default()
                .push((&c.label, coef));
        }
    }

    out.push_str("COLUMNS\n");
    writeln!(
        out,
        "    {:<col_width$}  {:<row_width$}  'INTORG'",
        "MARKER", "'MARKER'"
    )
    .unwrap();
    for (pos, v) in model.variables().iter().enumerate() {
        let name = v.id.to_string();
        match columns.get(&pos) {
            Some(entries) => {
                for &(row, coef) in entries {
                    writeln!(out, "    {name:<col_width$}  {row:<row_width$}  {coef}").unwrap();
                }
            }
            // A column must appear to be declared at all.
            None => writeln!(out, "    {name:<col_width$}  {:<row_width$}  0", "obj").unwrap(),
        }
    }
    writeln!(
        out,
        "    {:<col_width$}  {:<row_width$}  'INTEND'",
        "MARKER", "'MARKER'"
    )
    .unwrap();

    out.push_str("RHS\n");
    for c in model.constraints().iter().filter(|c| c.rhs != 0) {
        writeln!(
            out,
            "    {:<col_width$}  {:<row_width$}  {}",
            "RHS", c.label, c.rhs
        )
        .unwrap();
    }

    out.push_str("BOUNDS\n");
    for v in model.variables() {
        let name = v.id.to_string();
        if model.is_boundary_fixed(v.id) {
            writeln!(out, " UP BND       {name:<col_width$}  0").unwrap();
        } else if v.kind == VarKind::Binary {
            writeln!(out, " BV BND       {name}").unwrap();
        } else {
            writeln!(out, " LI BND       {name:<col_width$}  {}", v.lower).unwrap();
            writeln!(out, " UI BND       {name:<col_width$}  {}", v.upper).unwrap();
        }
    }
    out.push_str("ENDATA\n");
    out
}
