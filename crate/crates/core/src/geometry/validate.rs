use std::collections::BTreeSet;
use std::fmt;

use super::Tiling;

/// One broken tiling invariant. Indices refer to positions in
/// [`Tiling::placements`]; cells are 1-based `(row, col)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    OutOfBounds {
        index: usize,
    },
    Overlap {
        first: usize,
        second: usize,
        row: usize,
        col: usize,
    },
    /// First empty cell of an uncovered run within one row band.
    Gap {
        row: usize,
        col: usize,
    },
    SizeTooLarge {
        index: usize,
        size: usize,
    },
    SizeTooSmall {
        index: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::OutOfBounds { index } => {
                write!(f, "OutOfBounds: placement {index} leaves the frame")
            }
            Violation::Overlap {
                first,
                second,
                row,
                col,
            } => {
                write!(
                    f,
                    "Overlap: placements {first} and {second} share cell ({row}, {col})"
                )
            }
            Violation::Gap { row, col } => write!(f, "Gap: cell ({row}, {col}) is uncovered"),
            Violation::SizeTooLarge { index, size } => {
                write!(
                    f,
                    "SizeTooLarge: placement {index} has size {size}, not a proper sub-square"
                )
            }
            Violation::SizeTooSmall { index } => {
                write!(f, "SizeTooSmall: placement {index} has size 0")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Half-open 0-based cell rectangle, clipped to the frame.
#[derive(Clone, Copy)]
struct Rect {
    index: usize,
    r0: usize,
    r1: usize,
    c0: usize,
    c1: usize,
}

/// Checks every tiling invariant.
///
/// Coverage is checked by sweeping horizontal bands between consecutive
/// square edges: inside a band the set of crossing squares is constant, so
/// one sorted pass over their column intervals finds every gap and overlap.
/// Cost is quadratic in the number of placements and independent of `n`.
pub fn validate(t: &Tiling) -> ValidationReport {
    let n = t.n();
    let mut violations = Vec::new();
    let mut rects = Vec::with_capacity(t.len());

    for (index, p) in t.placements().iter().enumerate() {
        if p.size == 0 {
            violations.push(Violation::SizeTooSmall { index });
            continue;
        }
        if p.size > n - 1 {
            violations.push(Violation::SizeTooLarge {
                index,
                size: p.size,
            });
        }
        let row_end = p.row.saturating_add(p.size - 1);
        let col_end = p.col.saturating_add(p.size - 1);
        if p.row == 0 || p.col == 0 || row_end > n || col_end > n {
            violations.push(Violation::OutOfBounds { index });
        }
        let r0 = p.row.max(1) - 1;
        let c0 = p.col.max(1) - 1;
        let r1 = row_end.min(n);
        let c1 = col_end.min(n);
        if r0 < r1 && c0 < c1 {
            rects.push(Rect {
                index,
                r0,
                r1,
                c0,
                c1,
            });
        }
    }

    let mut cuts: Vec<usize> = rects
        .iter()
        .flat_map(|r| [r.r0, r.r1])
        .chain([0, n])
        .collect();
    cuts.sort_unstable();
    cuts.dedup();

    let mut overlaps = BTreeSet::new();
    let mut active = Vec::new();
    for band in cuts.windows(2) {
        let top = band[0];
        active.clear();
        active.extend(rects.iter().filter(|r| r.r0 <= top && top < r.r1).copied());
        active.sort_unstable_by_key(|r| (r.c0, r.index));

        let mut covered = 0;
        let mut owner = None;
        for r in &active {
            if r.c0 > covered {
                violations.push(Violation::Gap {
                    row: top + 1,
                    col: covered + 1,
                });
            } else if r.c0 < covered {
                let first = owner.expect("covered columns have an owner");
                if overlaps.insert((first, r.index)) {
                    violations.push(Violation::Overlap {
                        first,
                        second: r.index,
                        row: top + 1,
                        col: r.c0 + 1,
                    });
                }
            }
            if r.c1 > covered {
                covered = r.c1;
                owner = Some(r.index);
            }
        }
        if covered < n {
            violations.push(Violation::Gap {
                row: top + 1,
                col: covered + 1,
            });
        }
    }

    ValidationReport { violations }
}
