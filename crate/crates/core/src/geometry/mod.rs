//! Tilings of an `n x n` frame by proper integer sub-squares.
//!
//! Coordinates are 1-based cells with row 1 at the top edge and column 1 at
//! the left edge; a [`Placement`] names the top-left cell of its square.

mod format;
mod symmetry;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use format::{parse_tiling, read_tiling, write_tiling};
pub use symmetry::Symmetry;
pub use validate::{validate, ValidationReport, Violation};

/// Largest accepted outer side length.
pub const MAX_SIDE: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Placement {
    pub row: usize,
    pub col: usize,
    pub size: usize,
}

impl Placement {
    pub const fn new(row: usize, col: usize, size: usize) -> Self {
        Placement { row, col, size }
    }

    /// Whether this square covers cell `(row, col)`.
    pub fn covers(&self, row: usize, col: usize) -> bool {
        (self.row..self.row + self.size).contains(&row)
            && (self.col..self.col + self.size).contains(&col)
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} at ({}, {})",
            self.size, self.size, self.row, self.col
        )
    }
}

/// A candidate dissection: an outer side length and an ordered list of
/// placements. Construction only checks `n`; use [`validate`] (or
/// [`Tiling::checked`]) for the covering invariants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tiling {
    n: usize,
    placements: Vec<Placement>,
}

pub(crate) fn check_side(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "side length {n} admits no proper sub-square (need n >= 2)"
        )));
    }
    if n > MAX_SIDE {
        return Err(Error::InvalidParameter(format!(
            "side length {n} exceeds the supported maximum {MAX_SIDE}"
        )));
    }
    Ok(())
}

impl Tiling {
    pub fn new(n: usize, placements: Vec<Placement>) -> Result<Self> {
        check_side(n)?;
        Ok(Tiling { n, placements })
    }

    /// Builds a tiling and rejects it unless it validates.
    pub fn checked(n: usize, placements: Vec<Placement>) -> Result<Self> {
        let tiling = Tiling::new(n, placements)?;
        tiling.ensure_valid()?;
        Ok(tiling)
    }

    pub(crate) fn from_valid_parts(n: usize, placements: Vec<Placement>) -> Self {
        debug_assert!(validate(&Tiling {
            n,
            placements: placements.clone()
        })
        .ok());
        Tiling { n, placements }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn into_placements(self) -> Vec<Placement> {
        self.placements
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = validate(self);
        if report.ok() {
            Ok(())
        } else {
            Err(Error::InvalidTiling(report.violations))
        }
    }

    /// Same placements, sorted by `(row, col, size)`.
    pub fn sorted(&self) -> Tiling {
        let mut placements = self.placements.clone();
        placements.sort_unstable();
        Tiling {
            n: self.n,
            placements,
        }
    }

    /// Counts of each distinct square size, ascending.
    pub fn multiset(&self) -> Result<SizeMultiset> {
        self.ensure_valid()?;
        Ok(SizeMultiset::from_sizes(
            self.placements.iter().map(|p| p.size),
        ))
    }

    /// The same dissection enlarged by an integer factor `k >= 2`.
    pub fn scale(&self, k: usize) -> Result<Tiling> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "scale factor {k} must be at least 2"
            )));
        }
        self.ensure_valid()?;
        let n = self
            .n
            .checked_mul(k)
            .filter(|&n| n <= MAX_SIDE)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("scaled side {} x {k} too large", self.n))
            })?;
        let placements = self
            .placements
            .iter()
            .map(|p| Placement::new(k * (p.row - 1) + 1, k * (p.col - 1) + 1, k * p.size))
            .collect();
        Ok(Tiling { n, placements })
    }

    /// Image of the tiling under one of the eight symmetries of the square.
    pub fn transformed(&self, symmetry: Symmetry) -> Tiling {
        let placements = self
            .placements
            .iter()
            .map(|&p| symmetry.apply(self.n, p))
            .collect();
        Tiling {
            n: self.n,
            placements,
        }
    }

    /// Lexicographically least sorted image over the dihedral group.
    pub fn canonical_form(&self) -> Result<Tiling> {
        self.ensure_valid()?;
        Ok(Symmetry::ALL
            .iter()
            .map(|&s| self.transformed(s).sorted())
            .min()
            .expect("dihedral group is non-empty"))
    }

    /// Cell grid labelled with the size of the covering square.
    pub fn render_ascii(&self) -> Result<String> {
        self.ensure_valid()?;
        let n = self.n;
        let largest = self.placements.iter().map(|p| p.size).max().unwrap_or(1);
        let width = largest.to_string().len();
        let mut grid = vec![0usize; n * n];
        for p in &self.placements {
            for r in p.row - 1..p.row - 1 + p.size {
                grid[r * n + p.col - 1..r * n + p.col - 1 + p.size].fill(p.size);
            }
        }
        let mut out = String::with_capacity(n * n * (width + 1));
        for row in grid.chunks(n) {
            let line = row
                .iter()
                .map(|s| format!("{s:>width$}"))
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&line);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Size histogram `a1^b1 a2^b2 ...` with strictly increasing sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SizeMultiset {
    entries: Vec<(usize, usize)>,
}

impl SizeMultiset {
    pub fn from_sizes(sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = BTreeMap::new();
        for s in sizes {
            *counts.entry(s).or_insert(0usize) += 1;
        }
        SizeMultiset {
            entries: counts.into_iter().collect(),
        }
    }

    /// `(size, count)` pairs, ascending by size.
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn count_of(&self, size: usize) -> usize {
        self.entries
            .binary_search_by_key(&size, |&(s, _)| s)
            .map_or(0, |i| self.entries[i].1)
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|&(_, c)| c).sum()
    }

    pub fn area(&self) -> usize {
        self.entries.iter().map(|&(s, c)| s * s * c).sum()
    }
}

impl fmt::Display for SizeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (size, count)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{size}^{count}")?;
        }
        Ok(())
    }
}
