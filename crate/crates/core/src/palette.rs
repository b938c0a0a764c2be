//! Color palettes: `q` vectors of `F^q` encoding the `q` colors.
//!
//! A palette must satisfy three properties:
//!
//! 1. every vector has first entry 1;
//! 2. the `q` vectors are linearly independent;
//! 3. any `q - 1` of them, with their last entry dropped, are linearly
//!    independent in `F^(q-1)`.
//!
//! Such a palette exists over `F` iff `q` is even or `|F| >= 3`.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::field::{Fe, Matrix, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PaletteError {
    #[error("palettes need q >= 2, got {0}")]
    QTooSmall(usize),
    #[error("alpha = {alpha} is forbidden; it must avoid 0 and 4 - q = {forbidden}")]
    InvalidAlpha { alpha: Fe, forbidden: Fe },
    #[error("no q-palette exists for q = {q} over {field}")]
    NoValidAlpha { q: usize, field: PrimeField },
    #[error("{field} has {order} elements, fewer than q = {q}")]
    FieldTooSmall {
        q: usize,
        field: PrimeField,
        order: u64,
    },
    #[error("evaluation points must be distinct; {0} repeats")]
    DuplicateAlpha(Fe),
    #[error("expected {expected} vectors of length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exhaustive search over {candidates} candidate sets exceeds the limit {limit}")]
    SearchTooLarge { candidates: u64, limit: u64 },
    #[error("vectors do not form a palette: {0}")]
    NotAPalette(PaletteReport),
}

/// Which palette construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaletteKind {
    /// Upper-triangular construction parametrised by one field element alpha.
    #[default]
    Triangular,
    /// Distinct columns of a Vandermonde matrix; needs `|F| >= q`.
    Vandermonde,
}

/// A single violated palette property, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PaletteDefect {
    /// Property 1: this column does not start with 1.
    FirstEntryNotOne { column: usize },
    /// Property 2: the full column set is linearly dependent.
    ColumnsDependent,
    /// Property 3: the truncations of all columns except `omitted` are dependent.
    TruncationDependent { omitted: usize },
}

impl PaletteDefect {
    /// Property number (1, 2 or 3) the defect violates.
    pub fn item(&self) -> u8 {
        match self {
            PaletteDefect::FirstEntryNotOne { .. } => 1,
            PaletteDefect::ColumnsDependent => 2,
            PaletteDefect::TruncationDependent { .. } => 3,
        }
    }

    /// Column indices involved in the failure.
    pub fn witness(&self, q: usize) -> Vec<usize> {
        match *self {
            PaletteDefect::FirstEntryNotOne { column } => vec![column],
            PaletteDefect::ColumnsDependent => (0..q).collect(),
            PaletteDefect::TruncationDependent { omitted } => {
                (0..q).filter(|&i| i != omitted).collect()
            }
        }
    }
}

/// Per-property verification result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaletteReport {
    pub q: usize,
    pub defects: Vec<PaletteDefect>,
}

impl PaletteReport {
    pub fn passes(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn item_holds(&self, item: u8) -> bool {
        self.defects.iter().all(|d| d.item() != item)
    }
}

impl fmt::Display for PaletteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in 1..=3u8 {
            let failures: Vec<_> = self.defects.iter().filter(|d| d.item() == item).collect();
            if failures.is_empty() {
                writeln!(f, "item {item}: pass")?;
            } else {
                for d in failures {
                    let witness: Vec<String> = d
                        .witness(self.q)
                        .iter()
                        .map(|c| (c + 1).to_string())
                        .collect();
                    writeln!(f, "item {item}: fail (columns {})", witness.join(","))?;
                }
            }
        }
        Ok(())
    }
}

/// Checks the three palette properties for `q` candidate vectors of `F^q`.
pub fn verify_palette(
    field: PrimeField,
    columns: &[Vec<Fe>],
) -> Result<PaletteReport, PaletteError> {
    let q = columns.len();
    if q < 2 {
        return Err(PaletteError::QTooSmall(q));
    }
    if let Some(bad) = columns.iter().find(|c| c.len() != q) {
        return Err(PaletteError::DimensionMismatch {
            expected: q,
            found: bad.len(),
        });
    }
    let mut defects = Vec::new();
    for (i, col) in columns.iter().enumerate() {
        if col[0] != field.one() {
            defects.push(PaletteDefect::FirstEntryNotOne { column: i });
        }
    }
    let full = Matrix::from_columns(field, columns).expect("dimensions checked");
    if full.rank() < q {
        defects.push(PaletteDefect::ColumnsDependent);
    }
    for omitted in 0..q {
        let truncated: Vec<Vec<Fe>> = columns
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != omitted)
            .map(|(_, c)| c[..q - 1].to_vec())
            .collect();
        let m = Matrix::from_columns(field, &truncated).expect("dimensions checked");
        if m.rank() < q - 1 {
            defects.push(PaletteDefect::TruncationDependent { omitted });
        }
    }
    Ok(PaletteReport { q, defects })
}

/// A verified q-palette. Column `i` encodes color `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    q: usize,
    field: PrimeField,
    columns: Vec<Vec<Fe>>,
}

/// The component-wise sum of all palette columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaletteSum(pub Vec<Fe>);

impl Palette {
    /// Wraps `columns` after checking every palette property.
    pub fn from_columns(field: PrimeField, columns: Vec<Vec<Fe>>) -> Result<Self, PaletteError> {
        let report = verify_palette(field, &columns)?;
        if !report.passes() {
            return Err(PaletteError::NotAPalette(report));
        }
        Ok(Palette {
            q: columns.len(),
            field,
            columns,
        })
    }

    /// Builds a palette with the requested construction and default parameters.
    pub fn build(q: usize, field: PrimeField, kind: PaletteKind) -> Result<Self, PaletteError> {
        match kind {
            PaletteKind::Triangular => construct_palette(q, field, None),
            PaletteKind::Vandermonde => {
                let alphas: Vec<Fe> = field.elements().take(q).collect();
                construct_vandermonde(q, field, &alphas)
            }
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn columns(&self) -> &[Vec<Fe>] {
        &self.columns
    }

    pub fn column(&self, color: usize) -> &[Fe] {
        &self.columns[color]
    }

    /// Color whose vector equals `v`, if any.
    pub fn color_of(&self, v: &[Fe]) -> Option<usize> {
        self.columns.iter().position(|c| c.as_slice() == v)
    }

    /// Column `color` without its last entry.
    pub fn truncated(&self, color: usize) -> &[Fe] {
        &self.columns[color][..self.q - 1]
    }

    /// The q x q matrix with the palette vectors as columns.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_columns(self.field, &self.columns).expect("palette is square")
    }

    pub fn sum(&self) -> PaletteSum {
        let mut acc = vec![self.field.zero(); self.q];
        for col in &self.columns {
            for (a, &x) in acc.iter_mut().zip(col) {
                *a += x;
            }
        }
        PaletteSum(acc)
    }
}

impl fmt::Display for Palette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_matrix())
    }
}

pub fn palette_sum(palette: &Palette) -> PaletteSum {
    palette.sum()
}

/// The element `4 - q` that alpha must avoid (besides zero).
pub fn forbidden_alpha(q: usize, field: PrimeField) -> Fe {
    field.from_i64(4 - q as i64)
}

/// Smallest field element outside `{0, 4 - q}`, if one exists.
pub fn default_alpha(q: usize, field: PrimeField) -> Option<Fe> {
    let forbidden = forbidden_alpha(q, field);
    field.elements().find(|&a| !a.is_zero() && a != forbidden)
}

/// The triangular construction: `c_1 = e_1`, `c_i = e_1 + e_i` for
/// `2 <= i <= q - 1`, and `c_q = e_1 + alpha e_2 + e_3 + ... + e_q`.
///
/// `alpha = None` picks [`default_alpha`].
pub fn construct_palette(
    q: usize,
    field: PrimeField,
    alpha: Option<Fe>,
) -> Result<Palette, PaletteError> {
    if q < 2 {
        return Err(PaletteError::QTooSmall(q));
    }
    let forbidden = forbidden_alpha(q, field);
    let alpha = match alpha {
        Some(a) => {
            assert!(field.contains(a), "alpha is not an element of {field}");
            if a.is_zero() || a == forbidden {
                return Err(PaletteError::InvalidAlpha {
                    alpha: a,
                    forbidden,
                });
            }
            a
        }
        None => default_alpha(q, field).ok_or(PaletteError::NoValidAlpha { q, field })?,
    };
    let unit = |i: usize| {
        let mut v = vec![field.zero(); q];
        v[i] = field.one();
        v
    };
    let mut columns = Vec::with_capacity(q);
    columns.push(unit(0));
    for i in 1..q - 1 {
        let mut c = unit(0);
        c[i] = field.one();
        columns.push(c);
    }
    let mut last = vec![field.one(); q];
    last[1] = alpha;
    columns.push(last);
    Palette::from_columns(field, columns)
}

/// Palette from the columns `(1, a, a^2, ..., a^(q-1))` for distinct `a`.
pub fn construct_vandermonde(
    q: usize,
    field: PrimeField,
    alphas: &[Fe],
) -> Result<Palette, PaletteError> {
    if q < 2 {
        return Err(PaletteError::QTooSmall(q));
    }
    if field.order() < q as u64 {
        return Err(PaletteError::FieldTooSmall {
            q,
            field,
            order: field.order(),
        });
    }
    if alphas.len() != q {
        return Err(PaletteError::DimensionMismatch {
            expected: q,
            found: alphas.len(),
        });
    }
    if let Some(dup) = alphas.iter().duplicates().next() {
        return Err(PaletteError::DuplicateAlpha(*dup));
    }
    let columns = alphas
        .iter()
        .map(|&a| (0..q as u64).map(|e| a.pow(e)).collect())
        .collect();
    Palette::from_columns(field, columns)
}

/// Exhaustively searches all sets of `q` vectors of `F^q` with first entry 1
/// for a palette. Returns the first one found in lexicographic order.
///
/// The search space has `C(p^(q-1), q)` candidates; `limit` caps it.
pub fn exhaustive_palette_search(
    q: usize,
    field: PrimeField,
    limit: u64,
) -> Result<Option<Palette>, PaletteError> {
    if q < 2 {
        return Err(PaletteError::QTooSmall(q));
    }
    let p = field.order();
    let pool_size = p.checked_pow(q as u32 - 1).unwrap_or(u64::MAX);
    let candidates = binomial(pool_size, q as u64);
    if candidates > limit {
        return Err(PaletteError::SearchTooLarge { candidates, limit });
    }
    let pool: Vec<Vec<Fe>> = (0..pool_size)
        .map(|mut idx| {
            let mut v = vec![field.one()];
            let mut tail = vec![field.zero(); q - 1];
            for slot in tail.iter_mut().rev() {
                *slot = field.elem(idx % p);
                idx /= p;
            }
            v.extend(tail);
            v
        })
        .collect();
    for combo in pool.iter().combinations(q) {
        let cols: Vec<Vec<Fe>> = combo.into_iter().cloned().collect();
        if verify_palette(field, &cols)?.passes() {
            return Ok(Some(Palette {
                q,
                field,
                columns: cols,
            }));
        }
    }
    Ok(None)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}
