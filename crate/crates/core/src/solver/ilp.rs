//! Depth-first 0-1 branch-and-bound over an explicit [`IlpModel`].
//!
//! Bounds propagation runs on every constraint; branching follows the first
//! open covering row (an equality with unit coefficients and right-hand
//! side 1 over binaries), which for the packing model is the row of the
//! topmost-leftmost uncovered cell. Value 1 is tried first, and the most
//! constrained variable of the row, i.e. the largest square, goes first.

use std::time::Instant;

use super::SolveOptions;
use crate::error::{Error, Result};
pub use crate::model::Assignment;
use crate::model::{IlpModel, Relation, VarKind};

struct Row {
    terms: Vec<(usize, i64)>,
    relation: Relation,
    rhs: i64,
}

struct Engine<'a> {
    model: &'a IlpModel,
    lo: Vec<i64>,
    hi: Vec<i64>,
    rows: Vec<Row>,
    var_rows: Vec<Vec<usize>>,
    covering: Vec<usize>,
    degree: Vec<usize>,
    objective: Vec<(usize, i64)>,
    trail: Vec<(usize, i64, i64)>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    nodes: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    stopped: bool,
}

enum Mode<'v> {
    Minimize {
        best: Option<(i64, Vec<i64>)>,
    },
    Enumerate {
        visit: &'v mut dyn FnMut(&Assignment),
        count: usize,
    },
}

impl<'a> Engine<'a> {
    fn new(model: &'a IlpModel, opts: &SolveOptions) -> Self {
        let vars = model.variables();
        let pos = |id| {
            model
                .position(id)
                .expect("constraint uses a declared variable")
        };
        let rows: Vec<Row> = model
            .constraints()
            .iter()
            .map(|c| Row {
                terms: c.terms.iter().map(|&(id, k)| (pos(id), k)).collect(),
                relation: c.relation,
                rhs: c.rhs,
            })
            .collect();
        let mut var_rows = vec![Vec::new(); vars.len()];
        for (r, row) in rows.iter().enumerate() {
            for &(v, _) in &row.terms {
                var_rows[v].push(r);
            }
        }
        let covering = rows
            .iter()
            .enumerate()
            .filter(|(_, row)| {
                row.relation == Relation::Eq
                    && row.rhs == 1
                    && row
                        .terms
                        .iter()
                        .all(|&(v, k)| k == 1 && vars[v].kind == VarKind::Binary)
            })
            .map(|(r, _)| r)
            .collect();
        let degree = var_rows.iter().map(Vec::len).collect();
        let objective = model
            .objective()
            .iter()
            .map(|&(id, k)| (pos(id), k))
            .collect();
        Engine {
            model,
            lo: vars.iter().map(|v| v.lower).collect(),
            hi: vars.iter().map(|v| v.upper).collect(),
            queued: vec![false; rows.len()],
            rows,
            var_rows,
            covering,
            degree,
            objective,
            trail: Vec::new(),
            queue: Vec::new(),
            nodes: 0,
            node_limit: opts.node_limit,
            deadline: opts.time_limit.map(|d| Instant::now() + d),
            stopped: false,
        }
    }

    fn set_bounds(&mut self, v: usize, lo: i64, hi: i64) -> bool {
        if lo > hi {
            return false;
        }
        if lo != self.lo[v] || hi != self.hi[v] {
            self.trail.push((v, self.lo[v], self.hi[v]));
            self.lo[v] = lo;
            self.hi[v] = hi;
            for &r in &self.var_rows[v] {
                if !self.queued[r] {
                    self.queued[r] = true;
                    self.queue.push(r);
                }
            }
        }
        true
    }

    /// Tightens bounds from `sign * terms <= limit`; false on conflict.
    fn tighten_le(&mut self, r: usize, sign: i64, limit: i64) -> bool {
        let min_act: i64 = self.rows[r]
            .terms
            .iter()
            .map(|&(v, k)| {
                let k = sign * k;
                if k > 0 {
                    k * self.lo[v]
                } else {
                    k * self.hi[v]
                }
            })
            .sum();
        let slack = limit - min_act;
        if slack < 0 {
            return false;
        }
        for t in 0..self.rows[r].terms.len() {
            let (v, k) = self.rows[r].terms[t];
            let k = sign * k;
            let (lo, hi) = (self.lo[v], self.hi[v]);
            let ok = if k > 0 {
                self.set_bounds(v, lo, hi.min(lo + slack / k))
            } else {
                self.set_bounds(v, lo.max(hi - slack / -k), hi)
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            self.queued[r] = false;
            let rhs = self.rows[r].rhs;
            let ok = match self.rows[r].relation {
                Relation::Le => self.tighten_le(r, 1, rhs),
                Relation::Ge => self.tighten_le(r, -1, -rhs),
                Relation::Eq => self.tighten_le(r, 1, rhs) && self.tighten_le(r, -1, -rhs),
            };
            if !ok {
                for r in self.queue.drain(..) {
                    self.queued[r] = false;
                }
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, lo, hi) = self.trail.pop().expect("trail length checked");
            self.lo[v] = lo;
            self.hi[v] = hi;
        }
    }

    fn objective_floor(&self) -> i64 {
        self.objective
            .iter()
            .map(|&(v, k)| {
                if k > 0 {
                    k * self.lo[v]
                } else {
                    k * self.hi[v]
                }
            })
            .sum()
    }

    fn branch_variable(&self) -> Option<usize> {
        for &r in &self.covering {
            let terms = &self.rows[r].terms;
            if terms.iter().any(|&(v, _)| self.lo[v] == 1) {
                continue;
            }
            let open = terms
                .iter()
                .map(|&(v, _)| v)
                .filter(|&v| self.lo[v] < self.hi[v])
                .max_by_key(|&v| (self.degree[v], std::cmp::Reverse(v)));
            if open.is_some() {
                return open;
            }
        }
        (0..self.lo.len()).find(|&v| self.lo[v] < self.hi[v])
    }

    fn assignment(&self) -> Assignment {
        self.model
            .variables()
            .iter()
            .zip(&self.lo)
            .map(|(d, &v)| (d.id, v))
            .collect()
    }

    fn search(&mut self, mode: &mut Mode<'_>) {
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes >= l)
            || (self.nodes & 0xff == 0 && self.deadline.is_some_and(|d| Instant::now() >= d))
        {
            self.stopped = true;
        }
        if self.stopped {
            return;
        }
        if let Mode::Minimize {
            best: Some((value, _)),
        } = mode
        {
            if self.objective_floor() >= *value {
                return;
            }
        }
        let Some(v) = self.branch_variable() else {
            match mode {
                Mode::Minimize { best } => {
                    *best = Some((self.objective_floor(), self.lo.clone()));
                }
                Mode::Enumerate { visit, count } => {
                    *count += 1;
                    visit(&self.assignment());
                }
            }
            return;
        };
        let binary_row = self.model.variables()[v].kind == VarKind::Binary
            && self.covering.iter().any(|&r| self.var_rows[v].contains(&r));
        let values: Vec<i64> = if binary_row {
            vec![1, 0]
        } else {
            (self.lo[v]..=self.hi[v]).collect()
        };
        for value in values {
            let mark = self.trail.len();
            if self.set_bounds(v, value, value) && self.propagate() {
                self.search(mode);
            }
            self.undo_to(mark);
            if self.stopped {
                return;
            }
        }
    }

    fn root(&mut self) -> bool {
        for r in 0..self.rows.len() {
            self.queued[r] = true;
            self.queue.push(r);
        }
        self.propagate()
    }
}

/// Provably optimal assignment of a model built by [`crate::model`].
/// Intended for small sides (up to about 6).
pub fn solve_ilp_generic(model: &IlpModel, opts: &SolveOptions) -> Result<(i64, Assignment)> {
    let mut engine = Engine::new(model, opts);
    let mut mode = Mode::Minimize { best: None };
    if engine.root() {
        engine.search(&mut mode);
    }
    if engine.stopped {
        return Err(Error::LimitReached);
    }
    let Mode::Minimize { best } = mode else {
        unreachable!()
    };
    let (value, lo) = best.ok_or(Error::Infeasible)?;
    let assignment = model
        .variables()
        .iter()
        .zip(lo)
        .map(|(d, v)| (d.id, v))
        .collect();
    Ok((value, assignment))
}

/// Visits every feasible assignment of `model`; returns how many there are.
pub fn enumerate_feasible(
    model: &IlpModel,
    opts: &SolveOptions,
    mut visit: impl FnMut(&Assignment),
) -> Result<usize> {
    let mut engine = Engine::new(model, opts);
    let mut mode = Mode::Enumerate {
        visit: &mut visit,
        count: 0,
    };
    if engine.root() {
        engine.search(&mut mode);
    }
    if engine.stopped {
        return Err(Error::LimitReached);
    }
    let Mode::Enumerate { count, .. } = mode else {
        unreachable!()
    };
    Ok(count)
}
