//! The 0-1 program over corner placements.
//!
//! `x_i_j_h` is 1 iff an `h x h` square has its top-left corner in cell
//! `(i, j)`. Each cell is covered exactly once (`packing_i_j`), squares
//! sticking out of the frame are fixed to zero (`boundary_i_j_h`), and the
//! objective counts the squares. Optional `y_h` variables count the squares
//! of each size and carry the variants.

mod assignment;
mod export;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::bounds::is_prime;
use crate::error::{Error, Result};
use crate::geometry::check_side;

pub use assignment::{assignment_from_tiling, decode_solution, parse_assignment, Assignment};
pub use export::{export_model, ExportFormat};

/// Default ceiling on the side length of a generated model. The packing rows
/// hold about `n^5 / 3` terms in total, so memory, not the `n^3` variable
/// count, is what limits larger models.
pub const MODEL_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    X { i: usize, j: usize, h: usize },
    Y { h: usize },
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarId::X { i, j, h } => write!(f, "x_{i}_{j}_{h}"),
            VarId::Y { h } => write!(f, "y_{h}"),
        }
    }
}

impl FromStr for VarId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once('_')
            .ok_or_else(|| format!("`{s}` is not a variable name"))?;
        let parts = rest
            .split('_')
            .map(|p| {
                if !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()) {
                    p.parse::<usize>()
                        .map_err(|_| format!("index `{p}` out of range"))
                } else {
                    Err(format!("`{s}` is not a variable name"))
                }
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        match (kind, &parts[..]) {
            ("x", &[i, j, h]) => Ok(VarId::X { i, j, h }),
            ("y", &[h]) => Ok(VarId::Y { h }),
            _ => Err(format!("`{s}` is not a variable name")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub id: VarId,
    pub kind: VarKind,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(VarId, i64)>,
    pub relation: Relation,
    pub rhs: i64,
    pub label: String,
}

impl LinearConstraint {
    pub fn lhs(&self, value: impl Fn(VarId) -> i64) -> i64 {
        self.terms.iter().map(|&(v, c)| c * value(v)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    n: usize,
    variables: Vec<VarDecl>,
    index: BTreeMap<VarId, usize>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<(VarId, i64)>,
    suffixes: Vec<String>,
}

/// Construction counts for a base model, computed in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelStats {
    pub x_variables: usize,
    pub packing: usize,
    pub boundary: usize,
}

impl ModelStats {
    pub fn expected(n: usize) -> Self {
        // Of the n^2 corners for size h, (n + 1 - h)^2 keep the square inside.
        let boundary = (1..n).map(|h| n * n - (n + 1 - h) * (n + 1 - h)).sum();
        ModelStats {
            x_variables: n * n * (n - 1),
            packing: n * n,
            boundary,
        }
    }
}

/// The plain minimization model for side `n` (capped at [`MODEL_CAP`]).
pub fn build_base_model(n: usize) -> Result<IlpModel> {
    build_base_model_capped(n, MODEL_CAP)
}

pub fn build_base_model_capped(n: usize, cap: usize) -> Result<IlpModel> {
    check_side(n)?;
    if n > cap {
        return Err(Error::InvalidParameter(format!(
            "model side {n} exceeds the cap {cap}"
        )));
    }
    let mut model = IlpModel {
        n,
        variables: Vec::with_capacity(n * n * (n - 1)),
        index: BTreeMap::new(),
        constraints: Vec::new(),
        objective: Vec::new(),
        suffixes: Vec::new(),
    };
    for i in 1..=n {
        for j in 1..=n {
            for h in 1..n {
                model.declare(VarDecl {
                    id: VarId::X { i, j, h },
                    kind: VarKind::Binary,
                    lower: 0,
                    upper: 1,
                });
            }
        }
    }
    model.objective = model.variables.iter().map(|v| (v.id, 1)).collect();

    for i in 1..=n {
        for j in 1..=n {
            let mut terms = Vec::new();
            for h in 1..n {
                for a in 0..=(i - 1).min(h - 1) {
                    for b in 0..=(j - 1).min(h - 1) {
                        terms.push((
                            VarId::X {
                                i: i - a,
                                j: j - b,
                                h,
                            },
                            1,
                        ));
                    }
                }
            }
            model.constraints.push(LinearConstraint {
                terms,
                relation: Relation::Eq,
                rhs: 1,
                label: format!("packing_{i}_{j}"),
            });
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            for h in 1..n {
                if protrudes(n, i, j, h) {
                    model.constraints.push(LinearConstraint {
                        terms: vec![(VarId::X { i, j, h }, 1)],
                        relation: Relation::Eq,
                        rhs: 0,
                        label: format!("boundary_{i}_{j}_{h}"),
                    });
                }
            }
        }
    }
    Ok(model)
}

/// Whether the `h`-square with corner `(i, j)` leaves the `n`-frame.
pub fn protrudes(n: usize, i: usize, j: usize, h: usize) -> bool {
    i + h > n + 1 || j + h > n + 1
}

impl IlpModel {
    fn declare(&mut self, decl: VarDecl) {
        self.index.insert(decl.id, self.variables.len());
        self.variables.push(decl);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variables(&self) -> &[VarDecl] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(VarId, i64)] {
        &self.objective
    }

    pub fn variable(&self, id: VarId) -> Option<&VarDecl> {
        self.index.get(&id).map(|&k| &self.variables[k])
    }

    /// Position of a variable in [`variables`](Self::variables).
    pub fn position(&self, id: VarId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn has_y_link(&self) -> bool {
        self.index.contains_key(&VarId::Y { h: 1 })
    }

    /// Whether the exporter pins this variable to zero.
    pub fn is_boundary_fixed(&self, id: VarId) -> bool {
        matches!(id, VarId::X { i, j, h } if protrudes(self.n, i, j, h))
    }

    /// Conventional file stem, `square_<n>` plus one suffix per variant.
    pub fn file_stem(&self) -> String {
        let mut stem = format!("square_{}", self.n);
        for s in &self.suffixes {
            stem.push('_');
            stem.push_str(s);
        }
        stem
    }

    pub fn stats(&self) -> ModelStats {
        let count = |prefix: &str| {
            self.constraints
                .iter()
                .filter(|c| c.label.starts_with(prefix))
                .count()
        };
        ModelStats {
            x_variables: self
                .variables
                .iter()
                .filter(|v| matches!(v.id, VarId::X { .. }))
                .count(),
            packing: count("packing_"),
            boundary: count("boundary_"),
        }
    }

    fn has_label(&self, label: &str) -> bool {
        self.constraints.iter().any(|c| c.label == label)
    }

    /// Adds `y_h` counting the `h`-squares, one link equation per size.
    pub fn add_y_link(mut self) -> Result<IlpModel> {
        if self.has_y_link() {
            return Err(Error::DuplicateVariant("ylink"));
        }
        let n = self.n;
        for h in 1..n {
            self.declare(VarDecl {
                id: VarId::Y { h },
                kind: VarKind::Integer,
                lower: 0,
                upper: (n * n) as i64,
            });
        }
        for h in 1..n {
            let mut terms: Vec<_> = (1..=n)
                .flat_map(|i| (1..=n).map(move |j| (VarId::X { i, j, h }, 1)))
                .collect();
            terms.push((VarId::Y { h }, -1));
            self.constraints.push(LinearConstraint {
                terms,
                relation: Relation::Eq,
                rhs: 0,
                label: format!("ylink_{h}"),
            });
        }
        self.suffixes.push("ylink".into());
        Ok(self)
    }

    /// Requires exactly `count` squares of side `size`.
    pub fn force_count(mut self, size: usize, count: usize) -> Result<IlpModel> {
        if !self.has_y_link() {
            return Err(Error::MissingYLink);
        }
        if size == 0 || size >= self.n {
            return Err(Error::InvalidParameter(format!(
                "forced size {size} is not a proper sub-square of {}",
                self.n
            )));
        }
        let label = format!("force_{size}");
        if self.has_label(&label) {
            return Err(Error::DuplicateVariant("force"));
        }
        self.constraints.push(LinearConstraint {
            terms: vec![(VarId::Y { h: size }, 1)],
            relation: Relation::Eq,
            rhs: count as i64,
            label,
        });
        self.suffixes.push(format!("force{size}-{count}"));
        Ok(self)
    }

    /// For each prime `p < n`, some used side is not a multiple of `p`.
    pub fn add_gcd_one(mut self) -> Result<IlpModel> {
        if !self.has_y_link() {
            return Err(Error::MissingYLink);
        }
        if self.constraints.iter().any(|c| c.label.starts_with("gcd_"))
            || self.suffixes.iter().any(|s| s == "gcd")
        {
            return Err(Error::DuplicateVariant("gcd"));
        }
        let n = self.n;
        for p in (2..n).filter(|&p| is_prime(p as u64)) {
            self.constraints.push(LinearConstraint {
                terms: (1..n)
                    .filter(|h| h % p != 0)
                    .map(|h| (VarId::Y { h }, 1))
                    .collect(),
                relation: Relation::Ge,
                rhs: 1,
                label: format!("gcd_{p}"),
            });
        }
        self.suffixes.push("gcd".into());
        Ok(self)
    }
}
