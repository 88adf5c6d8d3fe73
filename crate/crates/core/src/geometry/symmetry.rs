use super::Placement;

/// An element of the dihedral group of the square, applied as optional row
/// flip, then optional column flip, then optional transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub flip_rows: bool,
    pub flip_cols: bool,
    pub transpose: bool,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry::new(false, false, false);

    pub const ALL: [Symmetry; 8] = [
        Symmetry::new(false, false, false),
        Symmetry::new(true, false, false),
        Symmetry::new(false, true, false),
        Symmetry::new(true, true, false),
        Symmetry::new(false, false, true),
        Symmetry::new(true, false, true),
        Symmetry::new(false, true, true),
        Symmetry::new(true, true, true),
    ];

    pub const fn new(flip_rows: bool, flip_cols: bool, transpose: bool) -> Self {
        Symmetry {
            flip_rows,
            flip_cols,
            transpose,
        }
    }

    /// Image of one square inside an `n x n` frame.
    pub fn apply(self, n: usize, p: Placement) -> Placement {
        let mut row = p.row;
        let mut col = p.col;
        if self.flip_rows {
            row = n + 2 - row - p.size;
        }
        if self.flip_cols {
            col = n + 2 - col - p.size;
        }
        if self.transpose {
            std::mem::swap(&mut row, &mut col);
        }
        Placement::new(row, col, p.size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures::quilt13;
    use crate::geometry::validate;
    use std::collections::HashSet;

    #[test]
    fn images_are_valid_and_distinct() {
        let t = quilt13();
        let images: HashSet<_> = Symmetry::ALL
            .iter()
            .map(|&s| t.transformed(s).sorted())
            .collect();
        assert_eq!(images.len(), 8);
        assert!(images.iter().all(|i| validate(i).ok()));
    }

    #[test]
    fn flips_are_involutions() {
        let p = Placement::new(2, 5, 3);
        for s in Symmetry::ALL.iter().filter(|s| !s.transpose) {
            assert_eq!(s.apply(9, s.apply(9, p)), p);
        }
    }

    #[test]
    fn corner_square_moves_to_opposite_corner() {
        let p = Placement::new(1, 1, 4);
        assert_eq!(
            Symmetry::new(true, true, false).apply(10, p),
            Placement::new(7, 7, 4)
        );
    }
}
