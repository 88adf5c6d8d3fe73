//! The electrical network of a tiling: horizontal dissectors as vertices,
//! squares as unit resistors carrying a current equal to their side.
//!
//! Square sizes are recovered from the structure alone by solving the
//! Kirchhoff equations exactly.

mod linear;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use linear::{primitive_integer, Equation, LinearSystem, Rational};

use crate::error::{Error, Result};
use crate::geometry::Tiling;

/// A maximal union of collinear square edges at one height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dissector {
    pub id: usize,
    /// Distance from the bottom side of the big square.
    pub height: usize,
    /// Disjoint, sorted half-open x-intervals of the merged segments. Since
    /// touching segments merge, a dissector always has exactly one.
    pub span: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    /// Index into the tiling's placement list.
    pub square: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub vertices: Vec<Dissector>,
    pub edges: Vec<Edge>,
    pub positive_pole: usize,
    pub negative_pole: usize,
}

impl Network {
    pub fn incoming(&self, v: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.to == v)
    }

    pub fn outgoing(&self, v: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == v)
    }

    /// Text form: vertices by id, edges by square index, then the poles.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {}", v.id, v.height);
        }
        for e in &self.edges {
            let _ = writeln!(out, "e {} {} {}", e.square, e.from, e.to);
        }
        let _ = writeln!(out, "poles {} {}", self.positive_pole, self.negative_pole);
        out
    }
}

/// One vertex per dissector, ordered top to bottom and then left to right.
pub fn extract_network(t: &Tiling) -> Result<Network> {
    t.ensure_valid()?;
    let n = t.n();
    // Segments by height: each square contributes its top and its bottom.
    let mut levels: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for p in t.placements() {
        let top = n + 1 - p.row;
        let x = (p.col - 1, p.col - 1 + p.size);
        levels.entry(top).or_default().push(x);
        levels.entry(top - p.size).or_default().push(x);
    }
    let mut vertices = Vec::new();
    for (&height, segments) in levels.iter_mut().rev() {
        segments.sort_unstable();
        let mut merged: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in segments.iter() {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        for span in merged {
            vertices.push(Dissector {
                id: vertices.len(),
                height,
                span: vec![span],
            });
        }
    }
    let locate = |height: usize, x: usize| -> usize {
        vertices
            .iter()
            .position(|d| d.height == height && d.span.iter().any(|&(a, b)| a <= x && x < b))
            .expect("every square edge lies on a dissector")
    };
    let edges = t
        .placements()
        .iter()
        .enumerate()
        .map(|(square, p)| {
            let top = n + 1 - p.row;
            Edge {
                square,
                from: locate(top, p.col - 1),
                to: locate(top - p.size, p.col - 1),
            }
        })
        .collect();
    let positive_pole = 0;
    let negative_pole = vertices.len() - 1;
    debug_assert_eq!(vertices[positive_pole].height, n);
    debug_assert_eq!(vertices[negative_pole].height, 0);
    Ok(Network {
        vertices,
        edges,
        positive_pole,
        negative_pole,
    })
}

/// Flow conservation at every inner vertex, over one variable per square.
pub fn kirchhoff_current_system(net: &Network) -> LinearSystem {
    let mut sys = LinearSystem::new(net.edges.len());
    for v in &net.vertices {
        if v.id == net.positive_pole || v.id == net.negative_pole {
            continue;
        }
        let terms = net
            .incoming(v.id)
            .map(|e| (e.square, 1))
            .chain(net.outgoing(v.id).map(|e| (e.square, -1)));
        sys.push_integer(format!("current_v{}", v.id), terms, 0);
    }
    sys
}

/// Potential drop across each square equals its current. Variables are the
/// squares followed by one potential per vertex.
pub fn kirchhoff_voltage_system(net: &Network) -> LinearSystem {
    let m = net.edges.len();
    let mut sys = LinearSystem::new(m + net.vertices.len());
    for e in &net.edges {
        sys.push_integer(
            format!("voltage_x{}", e.square),
            [(m + e.from, 1), (m + e.to, -1), (e.square, -1)],
            0,
        );
    }
    sys.push_integer("ground", [(m + net.negative_pole, 1)], 0);
    sys
}

/// Both laws over the square and potential variables.
pub fn combined_system(net: &Network) -> LinearSystem {
    let mut sys = kirchhoff_current_system(net).widened(net.edges.len() + net.vertices.len());
    sys.extend(&kirchhoff_voltage_system(net));
    sys
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeRecovery {
    /// Smallest positive integer sizes, indexed like the placements.
    pub sizes: Vec<u64>,
    /// Side of the big square under those sizes.
    pub side: u64,
    pub scale_dimension: usize,
}

pub fn solve_sizes(net: &Network) -> Result<SizeRecovery> {
    let m = net.edges.len();
    let sys = combined_system(net);
    let basis = sys.nullspace();
    if basis.len() != 1 {
        return Err(Error::DegenerateSystem {
            dimension: basis.len(),
        });
    }
    let scaled = primitive_integer(&basis[0]);
    let to_u64 = |x: &BigInt| x.to_u64().filter(|&v| v > 0);
    let sizes: Option<Vec<u64>> = scaled[..m].iter().map(to_u64).collect();
    let side = to_u64(&scaled[m + net.positive_pole]);
    match (sizes, side) {
        (Some(sizes), Some(side)) => Ok(SizeRecovery {
            sizes,
            side,
            scale_dimension: 1,
        }),
        // A one-dimensional space with mixed signs has no physical reading.
        _ => Err(Error::DegenerateSystem { dimension: 1 }),
    }
}

/// Every horizontal and every vertical line through the grid crosses squares
/// whose sizes add up to the side. Rows first, duplicates dropped.
pub fn layout_equations(t: &Tiling) -> Result<LinearSystem> {
    t.ensure_valid()?;
    let n = t.n();
    let mut sys = LinearSystem::new(t.len());
    let mut seen = BTreeSet::new();
    let side = i64::try_from(n).expect("side fits i64");
    for (axis, name) in [(0, "row"), (1, "col")] {
        for line in 1..=n {
            let crossed: Vec<usize> = t
                .placements()
                .iter()
                .enumerate()
                .filter(|(_, p)| {
                    let start = if axis == 0 { p.row } else { p.col };
                    start <= line && line < start + p.size
                })
                .map(|(k, _)| k)
                .collect();
            if seen.insert(crossed.clone()) {
                sys.push_integer(
                    format!("{name}_{line}"),
                    crossed.into_iter().map(|k| (k, 1)),
                    side,
                );
            }
        }
    }
    Ok(sys)
}

fn as_rationals(values: impl IntoIterator<Item = u64>) -> Vec<Rational> {
    values
        .into_iter()
        .map(|v| Rational::from_integer(BigInt::from(v)))
        .collect()
}

/// Recovers sizes from structure and checks them against the tiling.
pub fn recover_and_check(t: &Tiling) -> Result<bool> {
    let net = extract_network(t)?;
    let recovered = solve_sizes(&net)?;
    let actual = as_rationals(t.placements().iter().map(|p| p.size as u64));
    let found = as_rationals(recovered.sizes.iter().copied());
    let ratio = &actual[0] / &found[0];
    let proportional = actual.iter().zip(&found).all(|(a, f)| *a == &ratio * f);
    let layout = layout_equations(t)?;
    Ok(proportional && ratio.is_positive() && layout.is_satisfied_by(&actual))
}

/// Potentials consistent with the given square sizes, or `None` when the
/// sizes violate the voltage law.
pub fn potentials(net: &Network, sizes: &[u64]) -> Option<Vec<Rational>> {
    let m = net.edges.len();
    let mut sys = kirchhoff_voltage_system(net);
    for (k, &s) in sizes.iter().enumerate() {
        sys.push(
            format!("fix_x{k}"),
            [(k, Rational::one())],
            Rational::from_integer(BigInt::from(s)),
        );
    }
    sys.particular_solution().map(|v| v[m..].to_vec())
}

fn is_zero_all(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Verifies both laws for explicit integer sizes.
pub fn satisfies_kirchhoff(net: &Network, sizes: &[u64]) -> bool {
    let current = kirchhoff_current_system(net);
    let values = as_rationals(sizes.iter().copied());
    is_zero_all(&current.residuals(&values)) && potentials(net, sizes).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures::{quilt13, units2};
    use crate::geometry::Placement;

    fn signature(sys: &LinearSystem) -> BTreeSet<(Vec<usize>, BTreeMap<usize, i64>)> {
        sys.rows
            .iter()
            .map(|r| {
                let coeffs: BTreeMap<usize, i64> = r
                    .coefficients
                    .iter()
                    .map(|(&k, q)| (k, q.to_integer().to_i64().unwrap()))
                    .collect();
                (coeffs.keys().copied().collect(), coeffs)
            })
            .collect()
    }

    /// Rank test: does `row` = rhs lie in the row space of `sys`?
    fn implied(sys: &LinearSystem, terms: &[(usize, i64)], rhs: i64) -> bool {
        let mut extended = sys.clone();
        extended.push_integer("probe", terms.iter().copied(), rhs);
        extended.rank() == sys.rank()
            && extended.particular_solution().is_some() == sys.particular_solution().is_some()
    }

    #[test]
    fn quilt_network_shape() {
        let net = extract_network(&quilt13()).unwrap();
        assert_eq!(net.vertices.len(), 7);
        assert_eq!(net.edges.len(), 11);
        let heights: Vec<usize> = net.vertices.iter().map(|v| v.height).collect();
        assert_eq!(heights, vec![13, 7, 6, 5, 4, 3, 0]);
        assert_eq!(net.outgoing(net.negative_pole).count(), 0);
        assert_eq!(net.incoming(net.positive_pole).count(), 0);
        for v in 1..6 {
            assert!(net.incoming(v).count() > 0 && net.outgoing(v).count() > 0);
        }
    }

    #[test]
    fn quilt_sizes_recovered() {
        let net = extract_network(&quilt13()).unwrap();
        let rec = solve_sizes(&net).unwrap();
        assert_eq!(rec.sizes, vec![6, 7, 2, 3, 1, 2, 6, 2, 1, 4, 3]);
        assert_eq!(rec.side, 13);
        assert_eq!(rec.scale_dimension, 1);
        assert!(satisfies_kirchhoff(&net, &rec.sizes));
    }

    #[test]
    fn quilt_current_equations() {
        let net = extract_network(&quilt13()).unwrap();
        let sig = signature(&kirchhoff_current_system(&net));
        // Zero-based squares: x1 = x3 + x4 + x5 and x8 + x9 = x11.
        let a: BTreeMap<usize, i64> = [(0, 1), (2, -1), (3, -1), (4, -1)].into();
        let b: BTreeMap<usize, i64> = [(7, 1), (8, 1), (10, -1)].into();
        let has = |m: &BTreeMap<usize, i64>| {
            let neg: BTreeMap<usize, i64> = m.iter().map(|(&k, &v)| (k, -v)).collect();
            sig.iter().any(|(_, c)| c == m || *c == neg)
        };
        assert!(has(&a) && has(&b));
    }

    #[test]
    fn quilt_circuit_equations_implied() {
        let net = extract_network(&quilt13()).unwrap();
        let sys = combined_system(&net);
        assert!(implied(&sys, &[(0, 1), (4, 1), (1, -1)], 0));
        assert!(implied(&sys, &[(8, 1), (10, 1), (9, -1)], 0));
        assert!(!implied(&sys, &[(0, 1), (1, -1)], 0));
    }

    #[test]
    fn quilt_layout_matches_display() {
        let sys = layout_equations(&quilt13()).unwrap();
        let expected: BTreeSet<Vec<usize>> = [
            vec![1, 2],
            vec![2, 3, 4, 5],
            vec![3, 4, 6, 7],
            vec![4, 6, 7, 8],
            vec![7, 8, 9, 10],
            vec![7, 10, 11],
            vec![1, 3, 8, 11],
            vec![1, 4, 9, 11],
            vec![1, 4, 10],
            vec![1, 5, 6, 10],
            vec![2, 6, 10],
            vec![2, 7],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(|k| k - 1).collect())
        .collect();
        let got: BTreeSet<Vec<usize>> = signature(&sys).into_iter().map(|(k, _)| k).collect();
        assert_eq!(got, expected);
        assert!(sys
            .rows
            .iter()
            .all(|r| r.rhs == Rational::from_integer(13.into())));
        let sizes = as_rationals([6, 7, 2, 3, 1, 2, 6, 2, 1, 4, 3]);
        assert!(sys.is_satisfied_by(&sizes));
    }

    #[test]
    fn units_network() {
        let t = units2();
        let net = extract_network(&t).unwrap();
        assert_eq!(net.vertices.len(), 3);
        assert_eq!(net.vertices[1].height, 1);
        let cur = kirchhoff_current_system(&net);
        assert_eq!(cur.rows.len(), 1);
        assert_eq!(cur.rows[0].coefficients.len(), 4);
        assert_eq!(solve_sizes(&net).unwrap().sizes, vec![1; 4]);
        let layout = layout_equations(&t).unwrap();
        assert_eq!(layout.rows.len(), 4);
        assert!(recover_and_check(&t).unwrap());
    }

    #[test]
    fn scaled_recovers_primitive() {
        for k in [2, 3] {
            let t = quilt13().scale(k).unwrap();
            let rec = solve_sizes(&extract_network(&t).unwrap()).unwrap();
            assert_eq!(rec.sizes, vec![6, 7, 2, 3, 1, 2, 6, 2, 1, 4, 3]);
            assert_eq!(rec.side, 13);
            assert!(recover_and_check(&t).unwrap());
        }
    }

    #[test]
    fn three_by_three_edges() {
        let mut ps = vec![Placement::new(1, 1, 2)];
        ps.extend([(1, 3), (2, 3), (3, 1), (3, 2), (3, 3)].map(|(r, c)| Placement::new(r, c, 1)));
        let t = Tiling::checked(3, ps).unwrap();
        let net = extract_network(&t).unwrap();
        assert_eq!(net.edges.len(), 6);
        assert!(recover_and_check(&t).unwrap());
    }

    #[test]
    fn dump_format() {
        let dump = extract_network(&units2()).unwrap().dump();
        assert!(dump.starts_with("v 0 2\nv 1 1\nv 2 0\n"));
        assert!(dump.ends_with("poles 0 2\n"));
        assert_eq!(dump.lines().filter(|l| l.starts_with("e ")).count(), 4);
    }

    #[test]
    fn rejects_invalid_tiling() {
        let t = Tiling::new(2, vec![Placement::new(1, 1, 1)]).unwrap();
        assert!(matches!(extract_network(&t), Err(Error::InvalidTiling(_))));
        assert!(matches!(layout_equations(&t), Err(Error::InvalidTiling(_))));
    }

    #[test]
    fn degenerate_network_reported() {
        // No inner vertex, so nothing ties the two currents together.
        let net = Network {
            vertices: (0..3)
                .map(|id| Dissector {
                    id,
                    height: 2 - id,
                    span: vec![(0, 1)],
                })
                .collect(),
            edges: vec![
                Edge {
                    square: 0,
                    from: 0,
                    to: 1,
                },
                Edge {
                    square: 1,
                    from: 0,
                    to: 2,
                },
            ],
            positive_pole: 0,
            negative_pole: 2,
        };
        assert!(matches!(
            solve_sizes(&net),
            Err(Error::DegenerateSystem { .. })
        ));
    }
}
