//! Unpruned enumeration of every tiling of a tiny frame, kept deliberately
//! separate from the skyline search: it works on a plain cell grid and
//! tries every size at the first empty cell in row-major order.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{check_side, Placement, Tiling};

/// Largest side accepted by [`brute_force_oracle`].
pub const ORACLE_CAP: usize = 5;
/// Largest side accepted by [`enumerate_tilings`].
pub const ENUMERATION_CAP: usize = 6;

/// Calls `visit` once for every tiling of the `n x n` frame by proper
/// squares, in a fixed order.
pub fn enumerate_tilings(n: usize, mut visit: impl FnMut(&Tiling)) -> Result<usize> {
    check_side(n)?;
    if n > ENUMERATION_CAP {
        return Err(Error::InvalidParameter(format!(
            "exhaustive enumeration is capped at n = {ENUMERATION_CAP}"
        )));
    }
    let mut grid = vec![false; n * n];
    let mut stack = Vec::new();
    let mut count = 0;
    fill(n, &mut grid, &mut stack, &mut |placements| {
        count += 1;
        visit(&Tiling::from_valid_parts(n, placements.to_vec()));
    });
    Ok(count)
}

fn fill(
    n: usize,
    grid: &mut [bool],
    stack: &mut Vec<Placement>,
    emit: &mut dyn FnMut(&[Placement]),
) {
    let Some(first) = grid.iter().position(|&c| !c) else {
        emit(stack);
        return;
    };
    let (r, c) = (first / n, first % n);
    for size in 1..n {
        if r + size > n || c + size > n {
            break;
        }
        let free = (r..r + size).all(|rr| grid[rr * n + c..rr * n + c + size].iter().all(|&x| !x));
        if !free {
            // A blocked cell stays blocked for every larger size.
            break;
        }
        set(n, grid, r, c, size, true);
        stack.push(Placement::new(r + 1, c + 1, size));
        fill(n, grid, stack, emit);
        stack.pop();
        set(n, grid, r, c, size, false);
    }
}

fn set(n: usize, grid: &mut [bool], r: usize, c: usize, size: usize, value: bool) {
    for rr in r..r + size {
        grid[rr * n + c..rr * n + c + size].fill(value);
    }
}

/// Exact minimum square count and the canonical forms of all optimal
/// tilings, by exhaustive enumeration.
pub fn brute_force_oracle(n: usize) -> Result<(usize, BTreeSet<Tiling>)> {
    check_side(n)?;
    if n > ORACLE_CAP {
        return Err(Error::InvalidParameter(format!(
            "oracle is capped at n = {ORACLE_CAP}"
        )));
    }
    let mut best = usize::MAX;
    let mut optimal = Vec::new();
    enumerate_tilings(n, |t| {
        if t.len() < best {
            best = t.len();
            optimal.clear();
        }
        if t.len() == best {
            optimal.push(t.clone());
        }
    })?;
    let canonical = optimal
        .iter()
        .map(|t| t.canonical_form().expect("enumerated tilings are valid"))
        .collect();
    Ok((best, canonical))
}
