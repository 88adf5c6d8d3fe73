use crate::error::{Error, Result};
use crate::geometry::{check_side, Placement};

use super::MAX_SEARCH_SIDE;

/// Partial tiling built by always covering the topmost-leftmost empty cell.
///
/// Under that discipline the covered cells of every column form a prefix
/// from the top, so the whole occupancy state is one height per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    n: usize,
    heights: Vec<u8>,
}

impl Board {
    pub fn new(n: usize) -> Result<Self> {
        check_side(n)?;
        if n > MAX_SEARCH_SIDE {
            return Err(Error::InvalidParameter(format!(
                "board side {n} exceeds {MAX_SEARCH_SIDE}"
            )));
        }
        Ok(Board {
            n,
            heights: vec![0; n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of covered cells in each column, counted from the top.
    pub fn heights(&self) -> &[u8] {
        &self.heights
    }

    /// 0-based column and height of the topmost-leftmost empty cell.
    #[inline]
    pub(crate) fn cursor(&self) -> (usize, usize) {
        let mut col = 0;
        let mut low = self.heights[0];
        for (c, &h) in self.heights.iter().enumerate().skip(1) {
            if h < low {
                low = h;
                col = c;
            }
        }
        (col, low as usize)
    }

    /// 1-based `(row, col)` of the topmost-leftmost empty cell.
    pub fn first_empty(&self) -> Option<(usize, usize)> {
        let (col, height) = self.cursor();
        (height < self.n).then_some((height + 1, col + 1))
    }

    pub fn is_full(&self) -> bool {
        self.heights.iter().all(|&h| h as usize == self.n)
    }

    pub fn empty_area(&self) -> usize {
        self.heights.iter().map(|&h| self.n - h as usize).sum()
    }

    /// Largest proper square that fits at the first empty cell.
    pub fn max_size_at_cursor(&self) -> usize {
        let (col, height) = self.cursor();
        if height == self.n {
            return 0;
        }
        let run = self.heights[col..]
            .iter()
            .take_while(|&&h| h as usize == height)
            .count();
        run.min(self.n - height).min(self.n - 1)
    }

    /// Covers the first empty cell with a square of the given side.
    pub fn place(&mut self, size: usize) -> Result<Placement> {
        if size == 0 || size > self.max_size_at_cursor() {
            return Err(Error::InvalidParameter(format!(
                "a {size}-square does not fit at the first empty cell"
            )));
        }
        let (col, height) = self.cursor();
        Ok(self.place_unchecked(col, height, size))
    }

    #[inline]
    pub(crate) fn place_unchecked(&mut self, col: usize, height: usize, size: usize) -> Placement {
        self.heights[col..col + size].fill((height + size) as u8);
        Placement::new(height + 1, col + 1, size)
    }

    #[inline]
    pub(crate) fn remove(&mut self, p: Placement) {
        self.heights[p.col - 1..p.col - 1 + p.size].fill((p.row - 1) as u8);
    }
}

/// Admissible bound on the squares still needed: the empty area divided by
/// the area of the largest square allowed, rounded up.
pub fn lower_bound(board: &Board, largest_allowed: usize) -> usize {
    let area = board.empty_area();
    if area == 0 {
        return 0;
    }
    let largest = largest_allowed.max(1);
    area.div_ceil(largest * largest)
}
