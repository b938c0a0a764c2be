//! Exact arithmetic and dense linear algebra over a prime field GF(p).
//!
//! Every [`Fe`] carries its modulus. Combining elements of different fields
//! is a programming error and panics with a descriptive message.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// Largest supported modulus, 2^31 - 1.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not a prime in [2, 2^31 - 1]")]
    NotPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// A prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: 3 }
    }
}

fn is_prime(n: u64) -> bool {
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

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p > MAX_MODULUS || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Number of elements.
    #[inline]
    pub fn order(&self) -> u64 {
        self.p as u64
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        Fe {
            value: 0,
            p: self.p,
        }
    }

    #[inline]
    pub fn one(&self) -> Fe {
        Fe {
            value: 1 % self.p,
            p: self.p,
        }
    }

    /// Reduces an unsigned integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> Fe {
        Fe {
            value: (v % self.p as u64) as u32,
            p: self.p,
        }
    }

    /// Reduces a signed integer into the field.
    #[inline]
    pub fn from_i64(&self, v: i64) -> Fe {
        Fe {
            value: v.rem_euclid(self.p as i64) as u32,
            p: self.p,
        }
    }

    /// All field elements in ascending residue order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.p).map(move |value| Fe { value, p: self.p })
    }

    #[inline]
    pub fn contains(&self, a: Fe) -> bool {
        a.p == self.p
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// An element of GF(p), stored as its canonical residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe {
    value: u32,
    p: u32,
}

impl Fe {
    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn field(self) -> PrimeField {
        PrimeField { p: self.p }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    #[inline]
    fn check(self, other: Fe) {
        assert_eq!(
            self.p, other.p,
            "mixed field elements from GF({}) and GF({})",
            self.p, other.p
        );
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inverse(self) -> Result<Fe, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let (mut old_r, mut r) = (self.value as i64, self.p as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let quot = old_r / r;
            (old_r, r) = (r, old_r - quot * r);
            (old_s, s) = (s, old_s - quot * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(Fe {
            value: old_s.rem_euclid(self.p as i64) as u32,
            p: self.p,
        })
    }

    pub fn pow(self, mut exp: u64) -> Fe {
        let mut base = self;
        let mut acc = self.field().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }
}

/// Inverse of `a` in `field`; errors on zero.
pub fn ff_inverse(a: Fe, field: PrimeField) -> Result<Fe, FieldError> {
    a.check(field.zero());
    a.inverse()
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fe {
    type Output = Fe;
    #[inline]
    fn add(self, rhs: Fe) -> Fe {
        self.check(rhs);
        let s = self.value as u64 + rhs.value as u64;
        Fe {
            value: (s % self.p as u64) as u32,
            p: self.p,
        }
    }
}

impl Sub for Fe {
    type Output = Fe;
    #[inline]
    fn sub(self, rhs: Fe) -> Fe {
        self.check(rhs);
        let s = self.value as u64 + self.p as u64 - rhs.value as u64;
        Fe {
            value: (s % self.p as u64) as u32,
            p: self.p,
        }
    }
}

impl Mul for Fe {
    type Output = Fe;
    #[inline]
    fn mul(self, rhs: Fe) -> Fe {
        self.check(rhs);
        Fe {
            value: ((self.value as u64 * rhs.value as u64) % self.p as u64) as u32,
            p: self.p,
        }
    }
}

impl Neg for Fe {
    type Output = Fe;
    #[inline]
    fn neg(self) -> Fe {
        Fe {
            value: if self.value == 0 {
                0
            } else {
                self.p - self.value
            },
            p: self.p,
        }
    }
}

impl AddAssign for Fe {
    fn add_assign(&mut self, rhs: Fe) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fe {
    fn sub_assign(&mut self, rhs: Fe) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fe {
    fn mul_assign(&mut self, rhs: Fe) {
        *self = *self * rhs;
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows of integer residues (reduced mod p).
    pub fn from_u64_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self, FieldError> {
        let fe_rows: Vec<Vec<Fe>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.elem(v)).collect())
            .collect();
        Matrix::from_rows(field, &fe_rows)
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<Fe>]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(FieldError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for &e in row {
                e.check(field.zero());
                entries.push(e);
            }
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(field: PrimeField, columns: &[Vec<Fe>]) -> Result<Self, FieldError> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(FieldError::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (i, &e) in col.iter().enumerate() {
                e.check(field.zero());
                m.set(i, j, e);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        v.check(self.field.zero());
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, FieldError> {
        if self.cols != rhs.rows {
            return Err(FieldError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = self.field.zero();
                for t in 0..self.cols {
                    acc += self.get(i, t) * rhs.get(t, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Fe]) -> Result<Vec<Fe>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(self.field.zero(), |acc, j| acc + self.get(i, j) * v[j]))
            .collect())
    }

    /// Determinant by Gaussian elimination with row swaps.
    pub fn determinant(&self) -> Result<Fe, FieldError> {
        if !self.is_square() {
            return Err(FieldError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.field.one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(self.field.zero());
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let pv = a.get(col, col);
            det *= pv;
            let inv = pv.inverse()?;
            for r in col + 1..n {
                let factor = a.get(r, col) * inv;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(r, c) - factor * a.get(col, c);
                    a.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    /// Reduced row-echelon form. Returns the rank, the echelon matrix and
    /// the pivot column of each nonzero row.
    pub fn rref(&self) -> (usize, Matrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pivot) = (r..self.rows).find(|&i| !a.get(i, col).is_zero()) else {
                continue;
            };
            a.swap_rows(pivot, r);
            let inv = a.get(r, col).inverse().expect("pivot is nonzero");
            for c in col..self.cols {
                let v = a.get(r, c) * inv;
                a.set(r, c, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = a.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = a.get(i, c) - factor * a.get(r, c);
                    a.set(i, c, v);
                }
            }
            pivots.push(col);
            r += 1;
        }
        (r, a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().0
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Determinant of a square matrix.
pub fn mat_determinant(m: &Matrix) -> Result<Fe, FieldError> {
    m.determinant()
}

/// Rank and reduced row-echelon form.
pub fn row_reduce(m: &Matrix) -> (usize, Matrix) {
    let (rank, echelon, _) = m.rref();
    (rank, echelon)
}

/// Solves `a * x = b` for invertible square `a`.
pub fn solve_unique(a: &Matrix, b: &[Fe]) -> Result<Vec<Fe>, FieldError> {
    if !a.is_square() {
        return Err(FieldError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if b.len() != n {
        return Err(FieldError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut aug = Matrix::zeros(a.field, n, n + 1);
    for (i, &bi) in b.iter().enumerate() {
        for j in 0..n {
            aug.set(i, j, a.get(i, j));
        }
        aug.set(i, n, bi);
    }
    let (_, echelon, pivots) = aug.rref();
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(FieldError::Singular);
    }
    Ok((0..n).map(|i| echelon.get(i, n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn rejects_composite_moduli() {
        assert_eq!(PrimeField::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert!(PrimeField::new(2_147_483_647).is_ok());
        assert!(PrimeField::new(1 << 31).is_err());
    }

    #[test]
    fn inverse_small_cases() {
        let f = gf3();
        assert_eq!(ff_inverse(f.elem(2), f).unwrap(), f.elem(2));
        assert_eq!(ff_inverse(f.elem(1), f).unwrap(), f.elem(1));
        assert_eq!(ff_inverse(f.zero(), f), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn inverse_is_an_involution_over_gf101() {
        let f = PrimeField::new(101).unwrap();
        for a in f.elements().skip(1) {
            let inv = a.inverse().unwrap();
            assert_eq!(a * inv, f.one());
            assert_eq!(inv.inverse().unwrap(), a);
        }
    }

    #[test]
    #[should_panic(expected = "mixed field elements")]
    fn mixing_fields_panics() {
        let a = PrimeField::new(3).unwrap().one();
        let b = PrimeField::new(5).unwrap().one();
        let _ = a + b;
    }

    #[test]
    fn determinant_examples() {
        let f = gf3();
        assert_eq!(Matrix::identity(f, 4).determinant().unwrap(), f.one());
        let dup = Matrix::from_u64_rows(f, &[vec![1, 1, 2], vec![0, 0, 1], vec![2, 2, 1]]).unwrap();
        assert_eq!(dup.determinant().unwrap(), f.zero());
        // Palette matrix for q = 4, alpha = 1: upper triangular, unit diagonal.
        let pal = Matrix::from_u64_rows(
            f,
            &[
                vec![1, 1, 1, 1],
                vec![0, 1, 0, 1],
                vec![0, 0, 1, 1],
                vec![0, 0, 0, 1],
            ],
        )
        .unwrap();
        assert_eq!(pal.determinant().unwrap(), f.one());
        assert_eq!(row_reduce(&pal).0, 4);
        let rect = Matrix::zeros(f, 2, 3);
        assert_eq!(
            rect.determinant(),
            Err(FieldError::NotSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn row_swap_flips_sign() {
        let f = PrimeField::new(5).unwrap();
        let m = Matrix::from_u64_rows(f, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(m.determinant().unwrap(), f.from_i64(-1));
    }

    #[test]
    fn solve_palette_system_q4() {
        let f = gf3();
        let d = Matrix::from_u64_rows(f, &[vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let b = vec![f.one(), f.one(), f.one()];
        let x = solve_unique(&d, &b).unwrap();
        assert_eq!(x, vec![f.elem(2), f.elem(1), f.elem(1)]);
    }

    #[test]
    fn solve_identity_and_singular() {
        let f = gf3();
        let b = vec![f.elem(2), f.elem(0), f.elem(1)];
        assert_eq!(solve_unique(&Matrix::identity(f, 3), &b).unwrap(), b);
        let singular = Matrix::from_u64_rows(f, &[vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(
            solve_unique(&singular, &[f.one(), f.one()]),
            Err(FieldError::Singular)
        );
    }

    #[test]
    fn row_reduce_edge_cases() {
        let f = gf3();
        let (rank, echelon) = row_reduce(&Matrix::zeros(f, 3, 4));
        assert_eq!(rank, 0);
        assert_eq!(echelon, Matrix::zeros(f, 3, 4));
        let dup = Matrix::from_u64_rows(f, &[vec![1, 2, 0], vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let (rank, echelon) = row_reduce(&dup);
        assert_eq!(rank, 2);
        assert_eq!(echelon.row(2), &[f.zero(); 3]);
    }
}
