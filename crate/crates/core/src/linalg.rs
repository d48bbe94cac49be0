//! Exact rational dense matrices.
//!
//! Rank and kernel computations run a fraction-free (Bareiss) elimination on
//! integer-scaled rows, so every answer is exact and can be used as a
//! certificate rather than an approximation.

use std::fmt;
use std::ops::{Index, IndexMut};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix has rank {rank} but {cols} columns; system is not uniquely solvable")]
    RankDeficient { rank: usize, cols: usize },
    #[error("ragged rows: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("invalid rational literal {0:?}")]
    BadLiteral(String),
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact conversion of a finite float. Non-finite input maps to zero.
pub fn from_f64(v: f64) -> Rational {
    Rational::from_float(v).unwrap_or_else(Rational::zero)
}

pub fn to_f64(v: &Rational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let t = s.trim();
    let bad = || LinalgError::BadLiteral(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => t.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Rescales `v` to the primitive integer vector on the same ray.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    len: r.len(),
                    expected: cols,
                });
            }
            data.extend(r.iter().cloned());
        }
        Ok(RationalMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from integer rows. Panics on ragged input; meant for
    /// literals in code and tests.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| int(v)).collect())
            .collect();
        Self::from_rows(rows).expect("ragged integer literal")
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        let rows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::Ragged {
                    row: j,
                    len: c.len(),
                    expected: rows,
                });
            }
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "mul_vec",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn neg(&self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    /// Multiplies column `j` by `s`.
    pub fn scale_column(&mut self, j: usize, s: &Rational) {
        for i in 0..self.rows {
            self[(i, j)] *= s;
        }
    }

    pub fn scale_row(&mut self, i: usize, s: &Rational) {
        for j in 0..self.cols {
            self[(i, j)] *= s;
        }
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> RationalMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out[(i, k)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> RationalMatrix {
        let mut out = Self::zeros(rows.len(), self.cols);
        for (k, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out[(k, j)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(&self[(i, j)]))
    }

    pub fn from_f64(m: &nalgebra::DMatrix<f64>) -> RationalMatrix {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = from_f64(m[(i, j)]);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        Echelon::of(self).pivots.len()
    }

    /// Basis of the right null space. Each vector is primitive-integer with
    /// its defining free coordinate equal to a positive integer.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        Echelon::of(self).kernel_basis()
    }

    /// Solves `self · x = b` when `self` has full column rank. Returns
    /// `Ok(None)` when `b` is outside the image.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "solve",
                left: self.shape(),
                right: (b.len(), 1),
            });
        }
        let rank = self.rank();
        if rank != self.cols {
            return Err(LinalgError::RankDeficient {
                rank,
                cols: self.cols,
            });
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let ech = Echelon::of(&aug);
        if ech.pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols + 1];
        x[self.cols] = -Rational::one();
        ech.back_substitute(&mut x);
        x.truncate(self.cols);
        Ok(Some(x))
    }

    pub fn sign_pattern(&self) -> SignPattern {
        SignPattern {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .data
                .iter()
                .map(|v| if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 })
                .collect(),
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect()
    }

    pub fn from_strings(rows: &[Vec<String>]) -> Result<Self, LinalgError> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(parsed)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.to_strings();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in &cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", line.join("  "))?;
        }
        Ok(())
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        RationalMatrix::from_strings(&rows).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of `"p/q"` strings.
pub mod serde_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Vec<Rational>>`.
pub mod serde_opt_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        match Option::<Vec<String>>::deserialize(d)? {
            None => Ok(None),
            Some(v) => v
                .iter()
                .map(|s| parse_rational(s).map_err(D::Error::custom))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }
}

/// Integer row-echelon form produced by Bareiss elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    cols: usize,
}

impl Echelon {
    fn of(m: &RationalMatrix) -> Echelon {
        // Row scaling by the denominator lcm leaves rank, row space and kernel
        // unchanged, so elimination can run entirely over the integers.
        let mut a: Vec<Vec<BigInt>> = (0..m.rows)
            .map(|i| {
                let row = m.row(i);
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
            })
            .collect();
        let nrows = a.len();
        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == nrows {
                break;
            }
            let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in r + 1..nrows {
                for j in c + 1..m.cols {
                    let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    a[i][j] = v / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        Echelon {
            rows: a,
            pivots,
            cols: m.cols,
        }
    }

    /// Fills the pivot coordinates of `x` given its free coordinates.
    fn back_substitute(&self, x: &mut [Rational]) {
        for (k, &pc) in self.pivots.iter().enumerate().rev() {
            let row = &self.rows[k];
            let mut acc = Rational::zero();
            for j in pc + 1..self.cols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    acc += Rational::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / Rational::from_integer(row[pc].clone());
        }
    }

    fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        (0..self.cols)
            .filter(|c| !self.pivots.contains(c))
            .map(|free| {
                let mut x = vec![Rational::zero(); self.cols];
                x[free] = Rational::one();
                self.back_substitute(&mut x);
                primitive(&x)
            })
            .collect()
    }
}

/// Sign pattern of a matrix, entries in {-1, 0, +1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<i8>,
}

impl SignPattern {
    pub fn from_f64(m: &nalgebra::DMatrix<f64>) -> SignPattern {
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                entries.push(if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 });
            }
        }
        SignPattern {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.cols + j]
    }

    pub fn neg(&self) -> SignPattern {
        SignPattern {
            entries: self.entries.iter().map(|s| -s).collect(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> SignPattern {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        SignPattern {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    fn check_dims(&self, x: &SignPattern) -> Result<(), LinalgError> {
        if (self.rows, self.cols) != (x.rows, x.cols) {
            return Err(LinalgError::DimensionMismatch {
                op: "qualitative class",
                left: (self.rows, self.cols),
                right: (x.rows, x.cols),
            });
        }
        Ok(())
    }

    /// `X ∈ Q(self)`: identical sign pattern.
    pub fn contains_q(&self, x: &SignPattern) -> Result<bool, LinalgError> {
        self.check_dims(x)?;
        Ok(self.entries == x.entries)
    }

    /// `X ∈ Q₀(self)`: signs agree where `X` is nonzero, and pattern zeros
    /// stay zero.
    pub fn contains_q0(&self, x: &SignPattern) -> Result<bool, LinalgError> {
        self.check_dims(x)?;
        Ok(self
            .entries
            .iter()
            .zip(&x.entries)
            .all(|(&p, &s)| s == 0 || s == p))
    }

    /// `X ∈ Q₁(self)`: like Q₀ without the zero-preservation clause.
    pub fn contains_q1(&self, x: &SignPattern) -> Result<bool, LinalgError> {
        self.check_dims(x)?;
        Ok(self
            .entries
            .iter()
            .zip(&x.entries)
            .all(|(&p, &s)| p == 0 || s == 0 || s == p))
    }
}
