//! Sparse multivariate polynomials over GF(p) whose variables are the
//! coordinates of per-vertex color vectors, and the determinant-based
//! constraint polynomials built from them.
//!
//! Every modulator vertex `v` owns a vector of `q` variables. Its first
//! coordinate is always substituted by 1, so only coordinates `2..=q`
//! appear as [`VarId`]s.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::field::{Fe, PrimeField};
use crate::palette::Palette;

pub type VertexId = usize;

/// Vertex-to-vector assignment used for evaluation.
pub type Assignment = BTreeMap<VertexId, Vec<Fe>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected {expected} column blocks, got {found}")]
    BlockCountMismatch { expected: usize, found: usize },
    #[error("polynomials over {left} and {right} cannot be combined")]
    FieldMismatch { left: PrimeField, right: PrimeField },
    #[error("vertex {0} has no assigned vector")]
    UnboundVertex(VertexId),
    #[error("vector for vertex {vertex} has {found} entries, coordinate {coordinate} requested")]
    ShortVector {
        vertex: VertexId,
        coordinate: u16,
        found: usize,
    },
}

/// Coordinate `coordinate` (1-based, at least 2) of the vector of `vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub vertex: VertexId,
    pub coordinate: u16,
}

impl VarId {
    pub fn new(vertex: VertexId, coordinate: u16) -> Self {
        debug_assert!(coordinate >= 2, "first coordinates are constant");
        VarId { vertex, coordinate }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}_{}", self.vertex, self.coordinate)
    }
}

/// A power product of variables, factors sorted by [`VarId`].
///
/// Ordered graded-lexicographically: first by total degree, then by the
/// factor sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(VarId, u32)>,
    degree: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VarId) -> Self {
        Monomial {
            factors: vec![(v, 1)],
            degree: 1,
        }
    }

    /// Builds a monomial from arbitrary `(var, exponent)` pairs.
    pub fn from_factors(raw: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut acc: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in raw {
            if e > 0 {
                *acc.entry(v).or_default() += e;
            }
        }
        let degree = acc.values().sum();
        Monomial {
            factors: acc.into_iter().collect(),
            degree,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, ea) = self.factors[i];
            let (b, eb) = other.factors[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Monomial {
            factors: out,
            degree: self.degree + other.degree,
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial: map from monomial to nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    field: PrimeField,
    terms: BTreeMap<Monomial, Fe>,
}

impl Poly {
    pub fn zero(field: PrimeField) -> Self {
        Poly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Fe) -> Self {
        let mut p = Poly::zero(c.field());
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(field: PrimeField, v: VarId) -> Self {
        let mut p = Poly::zero(field);
        p.add_term(Monomial::var(v), field.one());
        p
    }

    pub fn from_terms(field: PrimeField, terms: impl IntoIterator<Item = (Monomial, Fe)>) -> Self {
        let mut p = Poly::zero(field);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, Fe)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> Fe {
        self.terms.get(m).copied().unwrap_or(self.field.zero())
    }

    /// Maximum term degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Largest monomial in the graded-lex order, with its coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, Fe)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    /// Adds `c * m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Fe) {
        assert_eq!(c.field(), self.field, "coefficient from a different field");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = *e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += s * other` in place.
    pub fn add_scaled(&mut self, other: &Poly, s: Fe) -> Result<(), PolyError> {
        self.same_field(other)?;
        if s.is_zero() {
            return Ok(());
        }
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c * s);
        }
        Ok(())
    }

    pub fn scale(&self, s: Fe) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.field);
        }
        Poly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), c * s))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.same_field(other)?;
        let mut out = Poly::zero(self.field);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<Fe, PolyError> {
        let mut acc = self.field.zero();
        for (m, &c) in &self.terms {
            let mut t = c;
            for &(v, e) in m.factors() {
                let vec = assignment
                    .get(&v.vertex)
                    .ok_or(PolyError::UnboundVertex(v.vertex))?;
                let x = *vec
                    .get(v.coordinate as usize - 1)
                    .ok_or(PolyError::ShortVector {
                        vertex: v.vertex,
                        coordinate: v.coordinate,
                        found: vec.len(),
                    })?;
                t *= x.pow(e as u64);
            }
            acc += t;
        }
        Ok(acc)
    }

    fn same_field(&self, other: &Poly) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(PolyError::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let p = self.field.modulus();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            // Print residues above p/2 as negative coefficients.
            let (neg, mag) = if c.value() > p / 2 {
                (true, p - c.value())
            } else {
                (false, c.value())
            };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// `p1 + s * p2`.
pub fn poly_combine(p1: &Poly, p2: &Poly, s: Fe) -> Result<Poly, PolyError> {
    let mut out = p1.clone();
    out.add_scaled(p2, s)?;
    Ok(out)
}

/// Evaluates `p` at a vertex-to-vector assignment.
pub fn poly_eval(p: &Poly, assignment: &Assignment) -> Result<Fe, PolyError> {
    p.eval(assignment)
}

/// A column whose entries are `constant + sum(sign * x_v)`, coordinate-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineColumn {
    pub constant: Vec<Fe>,
    pub blocks: Vec<(VertexId, Fe)>,
}

impl AffineColumn {
    /// `c - x_{v_1} - ... - x_{v_m}` for the palette sum `c`.
    pub fn complement(palette: &Palette, vertices: &[VertexId]) -> Self {
        let minus_one = -palette.field().one();
        AffineColumn {
            constant: palette.sum().0,
            blocks: vertices.iter().map(|&v| (v, minus_one)).collect(),
        }
    }

    /// Value of the column when each block vertex takes its assigned vector.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Vec<Fe>, PolyError> {
        let mut out = self.constant.clone();
        for &(v, sign) in &self.blocks {
            let vec = assignment.get(&v).ok_or(PolyError::UnboundVertex(v))?;
            for (o, &x) in out.iter_mut().zip(vec) {
                *o += sign * x;
            }
        }
        Ok(out)
    }

    fn entry(&self, field: PrimeField, coordinate: u16) -> Poly {
        let mut p = Poly::constant(self.constant[coordinate as usize - 1]);
        for &(v, sign) in &self.blocks {
            p.add_term(Monomial::var(VarId::new(v, coordinate)), sign);
        }
        debug_assert_eq!(p.field(), field);
        p
    }
}

/// One column of a symbolic determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Vertex(VertexId),
    Affine(AffineColumn),
}

impl From<VertexId> for ColumnSpec {
    fn from(v: VertexId) -> Self {
        ColumnSpec::Vertex(v)
    }
}

impl ColumnSpec {
    /// Entry in 0-based `row`; row 0 is the constant 1.
    fn entry(&self, field: PrimeField, row: usize) -> Poly {
        if row == 0 {
            return Poly::constant(field.one());
        }
        let coordinate = row as u16 + 1;
        match self {
            ColumnSpec::Vertex(v) => Poly::var(field, VarId::new(*v, coordinate)),
            ColumnSpec::Affine(a) => a.entry(field, coordinate),
        }
    }
}

/// Determinant of a square matrix of polynomials, expanded over all
/// permutations with shared prefix products.
pub fn symbolic_determinant(field: PrimeField, entries: &[Vec<Poly>]) -> Poly {
    let n = entries.len();
    let mut out = Poly::zero(field);
    let mut used = vec![false; n];
    expand(
        entries,
        0,
        &mut used,
        false,
        Poly::constant(field.one()),
        &mut out,
    );
    out
}

fn expand(
    entries: &[Vec<Poly>],
    row: usize,
    used: &mut [bool],
    odd: bool,
    prefix: Poly,
    out: &mut Poly,
) {
    let n = entries.len();
    if row == n {
        let sign = if odd {
            -out.field.one()
        } else {
            out.field.one()
        };
        out.add_scaled(&prefix, sign).expect("single field");
        return;
    }
    for col in 0..n {
        if used[col] || entries[row][col].is_zero() {
            continue;
        }
        // Inversions added by placing `col` after the columns already used.
        let inversions = used[col + 1..].iter().filter(|&&u| u).count();
        let next = prefix.mul(&entries[row][col]).expect("single field");
        if next.is_zero() {
            continue;
        }
        used[col] = true;
        expand(
            entries,
            row + 1,
            used,
            odd ^ (inversions % 2 == 1),
            next,
            out,
        );
        used[col] = false;
    }
}

fn determinant_of_columns(field: PrimeField, rows: usize, columns: &[ColumnSpec]) -> Poly {
    let entries: Vec<Vec<Poly>> = (0..rows)
        .map(|r| columns.iter().map(|c| c.entry(field, r)).collect())
        .collect();
    symbolic_determinant(field, &entries)
}

/// The degree-`(q - 1)` polynomial: the `q x q` determinant with first row
/// fixed to ones. On palette-colored inputs it vanishes iff two columns agree.
pub fn build_f(palette: &Palette, columns: &[ColumnSpec]) -> Result<Poly, PolyError> {
    let q = palette.q();
    if columns.len() != q {
        return Err(PolyError::BlockCountMismatch {
            expected: q,
            found: columns.len(),
        });
    }
    Ok(determinant_of_columns(palette.field(), q, columns))
}

/// The degree-`(q - 2)` polynomial: the determinant of the first `q - 1`
/// rows of `q - 1` vertex columns, first row fixed to ones.
pub fn build_g(palette: &Palette, vertices: &[VertexId]) -> Result<Poly, PolyError> {
    let q = palette.q();
    if vertices.len() != q - 1 {
        return Err(PolyError::BlockCountMismatch {
            expected: q - 1,
            found: vertices.len(),
        });
    }
    let cols: Vec<ColumnSpec> = vertices.iter().copied().map(ColumnSpec::Vertex).collect();
    Ok(determinant_of_columns(palette.field(), q - 1, &cols))
}

/// The degree-`(2q - 3)` polynomial `g(x) * f(y, c - sum(x))`.
///
/// On palette-colored inputs it vanishes iff the `x` colors repeat or the
/// `x` and `y` color sets differ.
pub fn build_h(palette: &Palette, x: &[VertexId], y: &[VertexId]) -> Result<Poly, PolyError> {
    let q = palette.q();
    for list in [x, y] {
        if list.len() != q - 1 {
            return Err(PolyError::BlockCountMismatch {
                expected: q - 1,
                found: list.len(),
            });
        }
    }
    let g = build_g(palette, x)?;
    if g.is_zero() {
        return Ok(g);
    }
    let mut cols: Vec<ColumnSpec> = y.iter().copied().map(ColumnSpec::Vertex).collect();
    cols.push(ColumnSpec::Affine(AffineColumn::complement(palette, x)));
    let f = build_f(palette, &cols)?;
    g.mul(&f)
}
