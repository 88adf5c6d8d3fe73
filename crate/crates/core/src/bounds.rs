//! Closed-form bounds on the minimum square count and explicit constructions
//! that witness upper bounds.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::geometry::{check_side, Placement, Tiling};
use crate::solver::DEFAULT_SOLVE_CAP;

/// Comparison slack for the real-valued bounds.
pub const TOLERANCE: f64 = 1e-9;

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors, ascending.
pub fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            primes.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

/// Lower bound `log2(p)` on the square count of a prime side `p`.
pub fn conway_lower(p: u64) -> Result<f64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok((p as f64).log2())
}

/// Upper bound `6 log2(3n - 1) - 10`. Below the true value for tiny `n`
/// (it gives 3.93 at `n = 2`), so callers only rely on it for `n >= 5`.
pub fn trustrum_upper(n: usize) -> Result<f64> {
    check_side(n)?;
    Ok(6.0 * (3.0 * n as f64 - 1.0).log2() - 10.0)
}

/// Tiling of the `(2^r - 1)`-square by `3r` squares with sizes
/// `1^3 2^3 ... (2^(r-2))^3 (2^(r-1) - 1)^2 (2^(r-1))^1`.
///
/// A `2^(r-1)` square sits in the top-left corner, two `(2^(r-1) - 1)`
/// squares take the top-right and bottom-left corners, and the remaining
/// `2^(r-1)` block (less the one cell the big square pokes into) is filled
/// by a staircase: the block of side `2s` is the block of side `s` plus three
/// `s`-squares, for `s = 1, 2, ..., 2^(r-2)`.
pub fn mersenne_construction(r: u32) -> Result<Tiling> {
    if !(2..=20).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "Mersenne exponent {r} outside 2..=20"
        )));
    }
    let n = (1usize << r) - 1;
    let half = 1usize << (r - 1);
    let mut placements = vec![
        Placement::new(1, 1, half),
        Placement::new(1, half + 1, half - 1),
        Placement::new(half + 1, 1, half - 1),
    ];
    // The staircase block has its top-left cell at (half, half).
    for i in 0..r - 1 {
        let s = 1usize << i;
        placements.push(Placement::new(half, half + s, s));
        placements.push(Placement::new(half + s, half, s));
        placements.push(Placement::new(half + s, half + s, s));
    }
    Tiling::checked(n, placements)
}

/// Exponent `r` with `n = 2^r - 1`, if any.
pub fn mersenne_exponent(n: usize) -> Option<u32> {
    let m = n.checked_add(1)?;
    (m.is_power_of_two() && m >= 4).then(|| m.trailing_zeros())
}

/// Upper bound for `n` from solved prime divisors: the best solved `p | n`
/// scaled up by `n / p`. Prime divisors above the solver cap may be absent.
pub fn divisor_upper(
    n: usize,
    solved: &BTreeMap<usize, (usize, Tiling)>,
) -> Result<(usize, Tiling)> {
    check_side(n)?;
    let mut best: Option<(usize, usize)> = None;
    for p in prime_divisors(n) {
        match solved.get(&p) {
            Some(&(value, _)) => {
                if best.is_none_or(|(v, _)| value < v) {
                    best = Some((value, p));
                }
            }
            None if p <= DEFAULT_SOLVE_CAP => return Err(Error::MissingDivisorData(p)),
            None => {}
        }
    }
    let (value, p) =
        best.ok_or_else(|| Error::MissingDivisorData(*prime_divisors(n).last().unwrap()))?;
    let tiling = &solved[&p].1;
    if tiling.n() != p || tiling.len() != value {
        return Err(Error::InvalidParameter(format!(
            "solved entry for {p} does not hold a {value}-square tiling of side {p}"
        )));
    }
    let witness = if p == n {
        tiling.clone()
    } else {
        tiling.scale(n / p)?
    };
    Ok((value, witness))
}

/// Repeatedly fills the topmost-leftmost empty cell with the largest square
/// that fits. Always valid, rarely good: `2n` squares for prime `n`.
pub fn greedy_tiling(n: usize) -> Result<Tiling> {
    check_side(n)?;
    let mut heights = vec![0usize; n];
    let mut placements = Vec::new();
    loop {
        let (col, &height) = heights
            .iter()
            .enumerate()
            .min_by_key(|&(_, h)| *h)
            .expect("n >= 2");
        if height == n {
            break;
        }
        let run = heights[col..].iter().take_while(|&&h| h == height).count();
        let size = run.min(n - height).min(n - 1);
        heights[col..col + size].fill(height + size);
        placements.push(Placement::new(height + 1, col + 1, size));
    }
    Tiling::checked(n, placements)
}

/// Fewest-squares tiling among the known constructions: Mersenne, scaled
/// constructions of proper divisors, and the greedy fill.
pub fn best_construction(n: usize) -> Result<Tiling> {
    check_side(n)?;
    let mut memo = HashMap::new();
    best_construction_memo(n, &mut memo)
}

fn best_construction_memo(n: usize, memo: &mut HashMap<usize, Tiling>) -> Result<Tiling> {
    if let Some(t) = memo.get(&n) {
        return Ok(t.clone());
    }
    let mut best = match mersenne_exponent(n) {
        Some(r) if r <= 20 => mersenne_construction(r)?,
        _ => greedy_tiling(n)?,
    };
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            for part in [d, n / d] {
                let candidate = best_construction_memo(part, memo)?.scale(n / part)?;
                if candidate.len() < best.len() {
                    best = candidate;
                }
            }
        }
        d += 1;
    }
    memo.insert(n, best.clone());
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    /// `log2(n)` when `n` is prime, otherwise the trivial bound 1.
    pub lower: f64,
    pub lower_int: usize,
    pub upper_trustrum: f64,
    pub upper_construction: usize,
    pub witness: Option<Tiling>,
}

pub fn bound_report(n: usize) -> Result<BoundReport> {
    check_side(n)?;
    let lower = conway_lower(n as u64).unwrap_or(1.0);
    let witness = best_construction(n)?;
    Ok(BoundReport {
        n,
        lower,
        lower_int: (lower - TOLERANCE).ceil() as usize,
        upper_trustrum: trustrum_upper(n)?,
        upper_construction: witness.len(),
        witness: Some(witness),
    })
}
