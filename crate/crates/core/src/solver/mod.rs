//! Exact minimization of the number of squares.
//!
//! * [`solve_min_squares`]: specialized branch-and-bound over placements on a
//!   skyline board (see [`Board`]).
//! * [`solve_ilp_generic`]: a small 0-1 branch-and-bound that works on an
//!   [`IlpModel`](crate::model::IlpModel) directly; a cross-check engine.
//! * [`brute_force_oracle`]: unpruned enumeration for tiny frames.

mod board;
mod ilp;
mod oracle;
mod search;

use std::collections::BTreeSet;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::geometry::{check_side, Tiling};

pub use board::{lower_bound, Board};
pub use ilp::{enumerate_feasible, solve_ilp_generic, Assignment};
pub use oracle::{brute_force_oracle, enumerate_tilings, ENUMERATION_CAP, ORACLE_CAP};
pub use search::{collect_tilings, Collection};

/// Largest side accepted by [`solve_min_squares`] unless overridden.
pub const DEFAULT_SOLVE_CAP: usize = 40;

/// Hard ceiling for the specialized search; heights are stored as bytes.
pub const MAX_SEARCH_SIDE: usize = 255;

/// Extra constraints on top of the plain minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Base,
    /// Exactly `count` squares of side `size`.
    ForceCount { size: usize, count: usize },
    /// The side lengths used must have greatest common divisor one.
    GcdOne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub variant: Variant,
    /// Stop as soon as a solution with at most this many squares is known.
    pub incumbent_limit: Option<usize>,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub threads: usize,
    /// Largest side accepted; defaults to [`DEFAULT_SOLVE_CAP`].
    pub side_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            variant: Variant::Base,
            incumbent_limit: None,
            node_limit: None,
            time_limit: None,
            threads: 1,
            side_cap: DEFAULT_SOLVE_CAP,
        }
    }
}

impl SolveOptions {
    pub fn with_variant(variant: Variant) -> Self {
        SolveOptions {
            variant,
            ..Default::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::InvalidParameter(
                "thread count must be positive".into(),
            ));
        }
        if self.incumbent_limit == Some(0) || self.node_limit == Some(0) {
            return Err(Error::InvalidParameter("limits must be positive".into()));
        }
        if self.time_limit == Some(Duration::ZERO) {
            return Err(Error::InvalidParameter(
                "time limit must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptResult {
    pub optimum: usize,
    pub witness: Tiling,
    /// Search nodes visited, the root included.
    pub nodes: u64,
    pub elapsed: Duration,
    /// False when a limit cut the search short; `optimum` is then only an
    /// upper bound.
    pub proven: bool,
}

fn check_variant(n: usize, variant: Variant) -> Result<()> {
    if let Variant::ForceCount { size, count } = variant {
        if size == 0 || size >= n {
            return Err(Error::InvalidParameter(format!(
                "forced size {size} is not a proper sub-square of {n}"
            )));
        }
        // Area test, then the per-axis fit test.
        if count * size * size > n * n || count > (n / size) * (n / size) {
            return Err(Error::Infeasible);
        }
    }
    Ok(())
}

/// Minimum number of squares tiling the `n x n` frame under `opts.variant`.
///
/// With a single thread the search is deterministic: the optimum, node count
/// and witness are identical across runs. With more threads only the optimum
/// is guaranteed to be stable.
///
/// A search cut short by a limit still returns `Ok` with `proven == false`
/// when some solution is known; [`Error::LimitReached`] means none was.
pub fn solve_min_squares(n: usize, opts: &SolveOptions) -> Result<OptResult> {
    check_side(n)?;
    opts.check()?;
    let cap = opts.side_cap.min(MAX_SEARCH_SIDE);
    if n > cap {
        return Err(Error::InvalidParameter(format!(
            "side {n} exceeds the solver cap {cap}"
        )));
    }
    check_variant(n, opts.variant)?;
    search::minimize(n, opts)
}

/// Convenience wrapper: all optimal tilings for `n` up to symmetry.
pub fn optimal_canonical_forms(n: usize, opts: &SolveOptions) -> Result<(usize, BTreeSet<Tiling>)> {
    let best = solve_min_squares(n, opts)?;
    if !best.proven {
        return Err(Error::LimitReached);
    }
    let collection = collect_tilings(n, best.optimum, opts)?;
    if !collection.proven {
        return Err(Error::LimitReached);
    }
    Ok((best.optimum, collection.canonical))
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Whether a complete tiling satisfies the variant's extra constraints.
pub fn satisfies_variant(t: &Tiling, variant: Variant) -> bool {
    match variant {
        Variant::Base => true,
        Variant::ForceCount { size, count } => {
            t.placements().iter().filter(|p| p.size == size).count() == count
        }
        Variant::GcdOne => t.placements().iter().fold(0, |g, p| gcd(g, p.size)) == 1,
    }
}
