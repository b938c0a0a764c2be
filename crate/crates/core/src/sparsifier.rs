//! Incremental linear-span basis over constraint polynomials.
//!
//! Polynomials arrive one at a time and are reduced against the stored rows.
//! A polynomial that survives reduction is stored together with the tag of
//! the constraint it came from, so the retained tags always form a subset of
//! the inserted constraints that spans all of them.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::field::PrimeField;
use crate::polyring::{Monomial, Poly, PolyError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparsifyError {
    #[error("basis is over {basis}, polynomial over {poly}")]
    FieldMismatch { basis: PrimeField, poly: PrimeField },
}

/// Identifies the graph constraint a polynomial encodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintTag {
    /// Vertex `v` outside the modulator adjacent to the `q` modulator vertices `s`.
    Single { v: VertexId, s: Vec<VertexId> },
    /// Edge `(u1, u2)` outside the modulator; `u1` sees `s1`, `u2` sees `s2`,
    /// each of size `q - 1`.
    Pair {
        u1: VertexId,
        u2: VertexId,
        s1: Vec<VertexId>,
        s2: Vec<VertexId>,
    },
}

impl fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintTag::Single { v, s } => write!(f, "single v={v} S={s:?}"),
            ConstraintTag::Pair { u1, u2, s1, s2 } => {
                write!(f, "pair u1={u1} u2={u2} S1={s1:?} S2={s2:?}")
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Row {
    reduced: Poly,
    pivot: Monomial,
    original: Poly,
    tag: ConstraintTag,
}

/// Row-reduced store of polynomials keyed by pivot monomial.
///
/// Every row is monic at its pivot and has a zero coefficient on every other
/// row's pivot.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    field: PrimeField,
    rows: Vec<Row>,
    pivots: HashMap<Monomial, usize>,
}

impl EchelonBasis {
    pub fn new(field: PrimeField) -> Self {
        EchelonBasis {
            field,
            rows: Vec::new(),
            pivots: HashMap::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Remainder of `p` after eliminating every stored pivot.
    pub fn reduce(&self, p: &Poly) -> Result<Poly, SparsifyError> {
        self.check_field(p)?;
        let mut rem = p.clone();
        let hits: Vec<(usize, _)> = p
            .terms()
            .filter_map(|(m, _)| self.pivots.get(m).map(|&i| (i, m.clone())))
            .collect();
        // Rows carry no other pivot, so each elimination touches one pivot only.
        for (i, m) in hits {
            let c = rem.coefficient(&m);
            if !c.is_zero() {
                rem.add_scaled(&self.rows[i].reduced, -c)
                    .map_err(|e| self.map_err(e))?;
            }
        }
        Ok(rem)
    }

    /// Whether `p` lies in the span of the stored rows.
    pub fn spans(&self, p: &Poly) -> Result<bool, SparsifyError> {
        Ok(self.reduce(p)?.is_zero())
    }

    /// Inserts `p`; returns `true` if it was independent of the stored rows
    /// and has been retained under `tag`.
    pub fn insert(&mut self, p: &Poly, tag: ConstraintTag) -> Result<bool, SparsifyError> {
        let rem = self.reduce(p)?;
        let Some((pivot, lead)) = rem.leading_term() else {
            return Ok(false);
        };
        let pivot = pivot.clone();
        let rem = rem.scale(lead.inverse().expect("leading coefficient is nonzero"));
        for row in &mut self.rows {
            let c = row.reduced.coefficient(&pivot);
            if !c.is_zero() {
                row.reduced.add_scaled(&rem, -c).expect("single field");
            }
        }
        self.pivots.insert(pivot.clone(), self.rows.len());
        self.rows.push(Row {
            reduced: rem,
            pivot,
            original: p.clone(),
            tag,
        });
        Ok(true)
    }

    /// Tags of the retained constraints, in insertion order.
    pub fn members(&self) -> Vec<&ConstraintTag> {
        self.rows.iter().map(|r| &r.tag).collect()
    }

    /// Original (unreduced) polynomials of the retained constraints.
    pub fn member_polys(&self) -> impl Iterator<Item = &Poly> {
        self.rows.iter().map(|r| &r.original)
    }

    pub fn pivots(&self) -> impl Iterator<Item = &Monomial> {
        self.rows.iter().map(|r| &r.pivot)
    }

    fn check_field(&self, p: &Poly) -> Result<(), SparsifyError> {
        if p.field() != self.field {
            return Err(SparsifyError::FieldMismatch {
                basis: self.field,
                poly: p.field(),
            });
        }
        Ok(())
    }

    fn map_err(&self, e: PolyError) -> SparsifyError {
        match e {
            PolyError::FieldMismatch { right, .. } => SparsifyError::FieldMismatch {
                basis: self.field,
                poly: right,
            },
            other => unreachable!("unexpected polynomial error {other}"),
        }
    }
}

/// Inserts `p` under `tag`; see [`EchelonBasis::insert`].
pub fn basis_insert(
    basis: &mut EchelonBasis,
    p: &Poly,
    tag: ConstraintTag,
) -> Result<bool, SparsifyError> {
    basis.insert(p, tag)
}

pub fn basis_members(basis: &EchelonBasis) -> Vec<&ConstraintTag> {
    basis.members()
}
