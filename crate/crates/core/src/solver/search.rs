//! Skyline branch-and-bound.
//!
//! The topmost-leftmost empty cell is always covered next, trying square
//! sizes in descending order. Mirror images are halved by requiring the
//! square in the top-left corner to be at least as large as the one in the
//! top-right corner.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::bounds::best_construction;
use crate::error::{Error, Result};
use crate::geometry::{check_side, Placement, Tiling};

use super::board::Board;
use super::{check_variant, gcd, OptResult, SolveOptions, Variant, MAX_SEARCH_SIDE};

const POLL_MASK: u64 = 0x3ff;

struct Shared {
    best: AtomicUsize,
    witness: Mutex<Option<Vec<Placement>>>,
    stop: AtomicBool,
    limit_hit: AtomicBool,
    flushed_nodes: AtomicU64,
}

impl Shared {
    fn new(best: usize, witness: Option<Vec<Placement>>) -> Self {
        Shared {
            best: AtomicUsize::new(best),
            witness: Mutex::new(witness),
            stop: AtomicBool::new(false),
            limit_hit: AtomicBool::new(false),
            flushed_nodes: AtomicU64::new(0),
        }
    }

    fn offer(&self, placements: &[Placement]) -> bool {
        let mut witness = self.witness.lock().expect("incumbent lock poisoned");
        if placements.len() < self.best.load(Ordering::Acquire) {
            *witness = Some(placements.to_vec());
            self.best.store(placements.len(), Ordering::Release);
            true
        } else {
            false
        }
    }

    fn halt(&self, limit: bool) {
        if limit {
            self.limit_hit.store(true, Ordering::Relaxed);
        }
        self.stop.store(true, Ordering::Relaxed);
    }
}

#[derive(Clone, Copy)]
enum Goal {
    Minimize,
    Collect { target: usize },
}

struct Limits {
    nodes: Option<u64>,
    deadline: Option<Instant>,
    incumbent: Option<usize>,
}

struct Worker<'a> {
    n: usize,
    board: Board,
    stack: Vec<Placement>,
    counts: Vec<usize>,
    corner: usize,
    variant: Variant,
    goal: Goal,
    shared: &'a Shared,
    limits: &'a Limits,
    nodes: u64,
    unflushed: u64,
    stopped: bool,
    found: Vec<Vec<Placement>>,
}

impl<'a> Worker<'a> {
    fn new(n: usize, variant: Variant, goal: Goal, shared: &'a Shared, limits: &'a Limits) -> Self {
        Worker {
            n,
            board: Board::new(n).expect("side checked by caller"),
            stack: Vec::with_capacity(n * n),
            counts: vec![0; n],
            corner: 0,
            variant,
            goal,
            shared,
            limits,
            nodes: 0,
            unflushed: 0,
            stopped: false,
            found: Vec::new(),
        }
    }

    fn flush(&mut self) {
        self.shared
            .flushed_nodes
            .fetch_add(self.unflushed, Ordering::Relaxed);
        self.unflushed = 0;
    }

    fn poll(&mut self) {
        if self.shared.stop.load(Ordering::Relaxed) {
            self.stopped = true;
            return;
        }
        if let Some(deadline) = self.limits.deadline {
            if Instant::now() >= deadline {
                self.shared.halt(true);
                self.stopped = true;
            }
        }
    }

    /// Largest total square count still worth exploring.
    #[inline]
    fn budget(&self) -> usize {
        match self.goal {
            Goal::Minimize => self.shared.best.load(Ordering::Relaxed).saturating_sub(1),
            Goal::Collect { target } => target,
        }
    }

    /// Admissible bound on squares still needed, `usize::MAX` if the
    /// variant can no longer be satisfied.
    fn completion_bound(&self) -> usize {
        let n = self.n;
        let heights = self.board.heights();
        let mut area = 0;
        let mut segments = 0;
        let mut deepest = 0;
        let mut start = 0;
        while start < n {
            let h = heights[start] as usize;
            let mut end = start + 1;
            while end < n && heights[end] as usize == h {
                end += 1;
            }
            if h < n {
                let width = end - start;
                let depth = n - h;
                // Squares resting on this segment are pairwise distinct from
                // those on any other segment and at most `widest` wide.
                let widest = width.min(depth).min(n - 1);
                segments += width.div_ceil(widest);
                area += width * depth;
                deepest = deepest.max(depth);
            }
            start = end;
        }
        if area == 0 {
            return match self.variant {
                Variant::ForceCount { size, count } if self.counts[size] != count => usize::MAX,
                _ => 0,
            };
        }
        let largest = deepest.min(n - 1);
        let mut bound = segments.max(area.div_ceil(largest * largest));

        if let Variant::ForceCount { size, count } = self.variant {
            let need = count - self.counts[size];
            if need > 0 {
                if need * size * size > area || !self.fits_somewhere(size) {
                    return usize::MAX;
                }
                let rest = area - need * size * size;
                bound = bound.max(need + rest.div_ceil(largest * largest));
            }
        }
        bound
    }

    /// Some run of `size` columns still has `size` free rows below it.
    fn fits_somewhere(&self, size: usize) -> bool {
        let limit = self.n - size;
        let mut run = 0;
        for &h in self.board.heights() {
            if h as usize <= limit {
                run += 1;
                if run >= size {
                    return true;
                }
            } else {
                run = 0;
            }
        }
        false
    }

    #[inline]
    fn worth_exploring(&self) -> bool {
        let budget = self.budget();
        let placed = self.stack.len();
        placed <= budget && {
            let bound = self.completion_bound();
            bound != usize::MAX && placed + bound <= budget
        }
    }

    fn complete(&mut self) {
        let ok = match self.variant {
            Variant::Base => true,
            Variant::ForceCount { size, count } => self.counts[size] == count,
            Variant::GcdOne => self.stack.iter().fold(0, |g, p| gcd(g, p.size)) == 1,
        };
        if !ok {
            return;
        }
        match self.goal {
            Goal::Minimize => {
                if self.shared.offer(&self.stack) {
                    if let Some(limit) = self.limits.incumbent {
                        if self.stack.len() <= limit {
                            self.shared.halt(true);
                            self.stopped = true;
                        }
                    }
                }
            }
            Goal::Collect { target } => {
                if self.stack.len() == target {
                    self.found.push(self.stack.clone());
                }
            }
        }
    }

    fn push(&mut self, col: usize, height: usize, size: usize) {
        let p = self.board.place_unchecked(col, height, size);
        self.stack.push(p);
        self.counts[size] += 1;
    }

    fn pop(&mut self) {
        let p = self.stack.pop().expect("pop matches push");
        self.counts[p.size] -= 1;
        self.board.remove(p);
    }

    /// Sizes allowed at the cursor, largest first.
    #[inline]
    fn candidates(&self, col: usize, height: usize) -> impl Iterator<Item = usize> + use<> {
        let n = self.n;
        let heights = self.board.heights();
        let run = heights[col..]
            .iter()
            .take_while(|&&h| h as usize == height)
            .count();
        let max = run.min(n - height).min(n - 1);
        let corner = if height == 0 && col > 0 {
            Some(self.corner)
        } else {
            None
        };
        let forced = match self.variant {
            Variant::ForceCount { size, count } if self.counts[size] == count => Some(size),
            _ => None,
        };
        (1..=max)
            .rev()
            .filter(move |&s| !(corner.is_some_and(|c| col + s == n && s > c) || forced == Some(s)))
    }

    fn dfs(&mut self) {
        self.nodes += 1;
        self.unflushed += 1;
        if let Some(limit) = self.limits.nodes {
            if self.nodes + self.shared.flushed_nodes.load(Ordering::Relaxed) >= limit {
                self.shared.halt(true);
                self.stopped = true;
            }
        }
        if self.nodes & POLL_MASK == 0 {
            self.flush();
            self.poll();
        }
        if self.stopped {
            return;
        }
        let (col, height) = self.board.cursor();
        if height == self.n {
            self.complete();
            return;
        }
        for size in self.candidates(col, height) {
            if height == 0 && col == 0 {
                self.corner = size;
            }
            self.push(col, height, size);
            if self.worth_exploring() {
                self.dfs();
            }
            self.pop();
            if self.stopped {
                return;
            }
        }
    }

    /// Replays a root prefix; false if it is pruned.
    fn enter_prefix(&mut self, sizes: &[usize]) -> bool {
        for &size in sizes {
            let (col, height) = self.board.cursor();
            if !self.candidates(col, height).any(|s| s == size) {
                return false;
            }
            if height == 0 && col == 0 {
                self.corner = size;
            }
            self.push(col, height, size);
            if !self.worth_exploring() {
                return false;
            }
        }
        true
    }

    fn reset(&mut self) {
        while !self.stack.is_empty() {
            self.pop();
        }
    }
}

fn limits_for(opts: &SolveOptions, start: Instant) -> Limits {
    Limits {
        nodes: opts.node_limit,
        deadline: opts.time_limit.map(|d| start + d),
        incumbent: opts.incumbent_limit,
    }
}

/// First two placements of every root branch, in search order.
fn root_prefixes(n: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for first in (1..n).rev() {
        for second in (1..=(n - first).min(n - 1)).rev() {
            if first + second == n && second > first {
                continue;
            }
            out.push([first, second]);
        }
    }
    out
}

fn run_parallel(
    n: usize,
    opts: &SolveOptions,
    goal: Goal,
    shared: &Shared,
    limits: &Limits,
) -> (u64, Vec<Vec<Placement>>) {
    let prefixes = root_prefixes(n);
    let next = AtomicUsize::new(0);
    let results: Vec<(u64, Vec<Vec<Placement>>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..opts.threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut worker = Worker::new(n, opts.variant, goal, shared, limits);
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= prefixes.len() || worker.stopped {
                            break;
                        }
                        worker.nodes += 1;
                        if worker.enter_prefix(&prefixes[i]) {
                            worker.dfs();
                        }
                        worker.reset();
                    }
                    worker.flush();
                    (worker.nodes, worker.found)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    let nodes = 1 + results.iter().map(|r| r.0).sum::<u64>();
    (nodes, results.into_iter().flat_map(|r| r.1).collect())
}

pub(super) fn minimize(n: usize, opts: &SolveOptions) -> Result<OptResult> {
    let start = Instant::now();
    let (best, witness) = match opts.variant {
        Variant::Base => {
            let seed = best_construction(n)?.into_placements();
            (seed.len(), Some(seed))
        }
        _ => (n * n + 1, None),
    };
    let shared = Shared::new(best, witness);
    let limits = limits_for(opts, start);

    let already_good = opts.incumbent_limit.is_some_and(|l| best <= l);
    let nodes = if already_good {
        shared.halt(true);
        1
    } else if opts.threads == 1 {
        let mut worker = Worker::new(n, opts.variant, Goal::Minimize, &shared, &limits);
        worker.dfs();
        worker.nodes
    } else {
        run_parallel(n, opts, Goal::Minimize, &shared, &limits).0
    };

    let proven = !shared.limit_hit.load(Ordering::Relaxed);
    let witness = shared
        .witness
        .into_inner()
        .expect("incumbent lock poisoned");
    match witness {
        Some(placements) => Ok(OptResult {
            optimum: placements.len(),
            witness: Tiling::from_valid_parts(n, placements),
            nodes,
            elapsed: start.elapsed(),
            proven,
        }),
        None if proven => Err(Error::Infeasible),
        None => Err(Error::LimitReached),
    }
}

/// Result of an exhaustive search for all tilings with a given count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collection {
    /// Canonical forms of every tiling found.
    pub canonical: BTreeSet<Tiling>,
    /// Tilings found before symmetry reduction (mirror pairs across the
    /// vertical axis are only visited once).
    pub found: usize,
    pub nodes: u64,
    pub elapsed: Duration,
    pub proven: bool,
}

/// Every tiling of the `n x n` frame by exactly `count` squares satisfying
/// `opts.variant`, reduced to canonical forms. Honours the node and time
/// limits; `proven` is false if one of them stopped the enumeration.
pub fn collect_tilings(n: usize, count: usize, opts: &SolveOptions) -> Result<Collection> {
    check_side(n)?;
    opts.check()?;
    if n > MAX_SEARCH_SIDE.min(opts.side_cap) {
        return Err(Error::InvalidParameter(format!(
            "side {n} exceeds the solver cap"
        )));
    }
    check_variant(n, opts.variant)?;
    let start = Instant::now();
    let shared = Shared::new(usize::MAX, None);
    let limits = Limits {
        incumbent: None,
        ..limits_for(opts, start)
    };
    let goal = Goal::Collect { target: count };
    let (nodes, found) = if opts.threads == 1 {
        let mut worker = Worker::new(n, opts.variant, goal, &shared, &limits);
        worker.dfs();
        (worker.nodes, worker.found)
    } else {
        run_parallel(n, opts, goal, &shared, &limits)
    };
    let canonical = found
        .iter()
        .map(|p| {
            Tiling::from_valid_parts(n, p.clone())
                .canonical_form()
                .expect("search only emits valid tilings")
        })
        .collect();
    Ok(Collection {
        canonical,
        found: found.len(),
        nodes,
        elapsed: start.elapsed(),
        proven: !shared.limit_hit.load(Ordering::Relaxed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate;
    use crate::solver::{satisfies_variant, solve_min_squares};

    fn solve(n: usize) -> OptResult {
        solve_min_squares(n, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn small_optima() {
        for (n, s) in [
            (2, 4),
            (3, 6),
            (4, 4),
            (5, 8),
            (6, 4),
            (7, 9),
            (8, 4),
            (9, 6),
        ] {
            let r = solve(n);
            assert_eq!(r.optimum, s, "n={n}");
            assert!(r.proven);
            assert!(validate(&r.witness).ok());
            assert_eq!(r.witness.len(), s);
        }
    }

    #[test]
    fn deterministic_single_thread() {
        let a = solve(11);
        let b = solve(11);
        assert_eq!(
            (a.optimum, a.nodes, &a.witness),
            (b.optimum, b.nodes, &b.witness)
        );
    }

    #[test]
    fn parallel_agrees() {
        let opts = SolveOptions {
            threads: 3,
            ..Default::default()
        };
        for n in [7, 11] {
            assert_eq!(
                solve_min_squares(n, &opts).unwrap().optimum,
                solve(n).optimum
            );
        }
    }

    #[test]
    fn forced_variants_small() {
        let opts = SolveOptions::with_variant(Variant::ForceCount { size: 4, count: 1 });
        let r = solve_min_squares(5, &opts).unwrap();
        assert_eq!(r.optimum, 10);
        assert!(satisfies_variant(&r.witness, opts.variant));

        let opts = SolveOptions::with_variant(Variant::ForceCount { size: 1, count: 0 });
        assert_eq!(solve_min_squares(3, &opts), Err(Error::Infeasible));

        let opts = SolveOptions::with_variant(Variant::ForceCount { size: 3, count: 2 });
        assert_eq!(solve_min_squares(5, &opts), Err(Error::Infeasible));

        let opts = SolveOptions::with_variant(Variant::ForceCount { size: 5, count: 1 });
        assert!(matches!(
            solve_min_squares(5, &opts),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn gcd_one_variant() {
        let opts = SolveOptions::with_variant(Variant::GcdOne);
        // Four 2-squares are the plain optimum at n = 4; coprime sides force
        // units in, and three 2-squares plus four units is best.
        let r = solve_min_squares(4, &opts).unwrap();
        assert_eq!(r.optimum, 7);
        assert!(satisfies_variant(&r.witness, Variant::GcdOne));
        assert_eq!(solve_min_squares(5, &opts).unwrap().optimum, 8);
    }

    #[test]
    fn limits_produce_unproven_results() {
        let opts = SolveOptions {
            node_limit: Some(5),
            ..Default::default()
        };
        let r = solve_min_squares(13, &opts).unwrap();
        assert!(!r.proven);
        assert!(validate(&r.witness).ok());

        let opts = SolveOptions {
            node_limit: Some(2),
            variant: Variant::ForceCount { size: 1, count: 1 },
            ..Default::default()
        };
        assert_eq!(solve_min_squares(13, &opts), Err(Error::LimitReached));

        let opts = SolveOptions {
            incumbent_limit: Some(20),
            ..Default::default()
        };
        let r = solve_min_squares(13, &opts).unwrap();
        assert!(r.optimum <= 20);
        assert!(!r.proven);
    }

    #[test]
    fn rejects_bad_options() {
        let bad = [
            SolveOptions {
                threads: 0,
                ..Default::default()
            },
            SolveOptions {
                node_limit: Some(0),
                ..Default::default()
            },
            SolveOptions {
                time_limit: Some(Duration::ZERO),
                ..Default::default()
            },
        ];
        for opts in bad {
            assert!(matches!(
                solve_min_squares(5, &opts),
                Err(Error::InvalidParameter(_))
            ));
        }
        assert!(matches!(
            solve_min_squares(41, &SolveOptions::default()),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            solve_min_squares(1, &SolveOptions::default()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn collect_small() {
        let c = collect_tilings(5, 8, &SolveOptions::default()).unwrap();
        assert!(c.proven);
        assert!(!c.canonical.is_empty());
        for t in &c.canonical {
            assert_eq!(t.len(), 8);
            assert_eq!(t.multiset().unwrap().to_string(), "1^4 2^3 3^1");
        }
        assert!(collect_tilings(5, 7, &SolveOptions::default())
            .unwrap()
            .canonical
            .is_empty());
    }

    #[test]
    fn prefixes_cover_root() {
        assert_eq!(root_prefixes(2), vec![[1, 1]]);
        assert_eq!(root_prefixes(3), vec![[2, 1], [1, 1]]);
    }
}
