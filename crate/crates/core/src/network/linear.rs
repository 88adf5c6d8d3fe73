//! Sparse linear systems over exact rationals with dense Gauss-Jordan
//! elimination underneath.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    /// Nonzero coefficients by variable index.
    pub coefficients: BTreeMap<usize, Rational>,
    pub rhs: Rational,
    pub label: String,
}

impl Equation {
    pub fn evaluate(&self, values: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .map(|(&v, k)| k * &values[v])
            .fold(Rational::zero(), |acc, t| acc + t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub variable_count: usize,
    pub rows: Vec<Equation>,
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            write!(f, "{}:", row.label)?;
            for (v, k) in &row.coefficients {
                write!(f, " {k:+}*v{v}")?;
            }
            writeln!(f, " = {}", row.rhs)?;
        }
        Ok(())
    }
}

/// Fewer bits first; keeps intermediate fractions small.
fn height(q: &Rational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

impl LinearSystem {
    pub fn new(variable_count: usize) -> Self {
        LinearSystem {
            variable_count,
            rows: Vec::new(),
        }
    }

    /// Adds a row, summing repeated variables and dropping zero entries.
    pub fn push(
        &mut self,
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        rhs: Rational,
    ) {
        let mut coefficients = BTreeMap::new();
        for (v, k) in terms {
            assert!(v < self.variable_count, "variable {v} out of range");
            *coefficients.entry(v).or_insert_with(Rational::zero) += k;
        }
        coefficients.retain(|_, k: &mut Rational| !k.is_zero());
        self.rows.push(Equation {
            coefficients,
            rhs,
            label: label.into(),
        });
    }

    pub fn push_integer(
        &mut self,
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, i64)>,
        rhs: i64,
    ) {
        self.push(
            label,
            terms
                .into_iter()
                .map(|(v, k)| (v, Rational::from_integer(k.into()))),
            Rational::from_integer(rhs.into()),
        );
    }

    /// Same rows over a wider variable range.
    pub fn widened(&self, variable_count: usize) -> LinearSystem {
        assert!(variable_count >= self.variable_count);
        LinearSystem {
            variable_count,
            rows: self.rows.clone(),
        }
    }

    pub fn extend(&mut self, other: &LinearSystem) {
        assert!(other.variable_count <= self.variable_count);
        self.rows.extend(other.rows.iter().cloned());
    }

    pub fn residuals(&self, values: &[Rational]) -> Vec<Rational> {
        assert_eq!(values.len(), self.variable_count);
        self.rows
            .iter()
            .map(|r| r.evaluate(values) - &r.rhs)
            .collect()
    }

    pub fn is_satisfied_by(&self, values: &[Rational]) -> bool {
        self.residuals(values).iter().all(Zero::is_zero)
    }

    /// Reduced row echelon form of the augmented matrix, with pivot columns.
    fn reduce(&self) -> (Vec<Vec<Rational>>, Vec<usize>) {
        let width = self.variable_count + 1;
        let mut m: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .map(|r| {
                let mut dense = vec![Rational::zero(); width];
                for (&v, k) in &r.coefficients {
                    dense[v] = k.clone();
                }
                dense[self.variable_count] = r.rhs.clone();
                dense
            })
            .collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.variable_count {
            let Some(pick) = (next..m.len())
                .filter(|&r| !m[r][col].is_zero())
                .min_by_key(|&r| height(&m[r][col]))
            else {
                continue;
            };
            m.swap(next, pick);
            let inv = m[next][col].recip();
            for x in m[next].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = m[next].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r == next || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= &factor * p;
                    }
                }
            }
            pivots.push(col);
            next += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.reduce().1.len()
    }

    /// Basis of the solutions of the homogeneous system, one vector per
    /// free variable.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (m, pivots) = self.reduce();
        let mut is_pivot = vec![None; self.variable_count];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        (0..self.variable_count)
            .filter(|&free| is_pivot[free].is_none())
            .map(|free| {
                let mut v = vec![Rational::zero(); self.variable_count];
                v[free] = Rational::one();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = -m[r][free].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of the system, or `None` if it is inconsistent.
    pub fn particular_solution(&self) -> Option<Vec<Rational>> {
        let (m, pivots) = self.reduce();
        let inconsistent = m[pivots.len()..]
            .iter()
            .any(|row| !row[self.variable_count].is_zero());
        if inconsistent {
            return None;
        }
        let mut v = vec![Rational::zero(); self.variable_count];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = m[r][self.variable_count].clone();
        }
        Some(v)
    }
}

/// Scales a nonzero rational vector to the primitive integer vector with a
/// positive first nonzero entry.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|q| (q * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return ints;
    }
    let sign = if ints
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    ints.into_iter().map(|x| x / &gcd * &sign).collect()
}
