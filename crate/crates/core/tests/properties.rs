use proptest::prelude::*;

use qcol_kernel::dimacs::{parse_graph, parse_modulator, write_graph, write_modulator};
use qcol_kernel::field::{solve_unique, Fe, Matrix, PrimeField};
use qcol_kernel::polyring::Assignment;
use qcol_kernel::{ConstraintTag, EchelonBasis, Graph, Monomial, Poly, VarId};

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn square(n: usize) -> impl Strategy<Value = (u64, Vec<Vec<u64>>)> {
    (
        prop::sample::select(&PRIMES[..]),
        prop::collection::vec(prop::collection::vec(0u64..7, n), n),
    )
}

/// Laplace expansion along the first row.
fn cofactor_det(field: PrimeField, m: &[Vec<Fe>]) -> Fe {
    let n = m.len();
    if n == 0 {
        return field.one();
    }
    let mut acc = field.zero();
    for j in 0..n {
        let minor: Vec<Vec<Fe>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &e)| e)
                    .collect()
            })
            .collect();
        let term = m[0][j] * cofactor_det(field, &minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn matrix(p: u64, rows: &[Vec<u64>]) -> Matrix {
    Matrix::from_u64_rows(PrimeField::new(p).unwrap(), rows).unwrap()
}

fn entries(m: &Matrix) -> Vec<Vec<Fe>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

proptest! {
    #[test]
    fn determinant_matches_cofactor_expansion((p, rows) in (1usize..=5).prop_flat_map(square)) {
        let m = matrix(p, &rows);
        prop_assert_eq!(m.determinant().unwrap(), cofactor_det(m.field(), &entries(&m)));
    }

    #[test]
    fn determinant_is_multiplicative(n in 1usize..=4, p in prop::sample::select(&PRIMES[..]), seed in any::<u64>()) {
        let mut s = seed;
        let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) % p };
        let a: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
        let b: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
        let (a, b) = (matrix(p, &a), matrix(p, &b));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.determinant().unwrap(), a.determinant().unwrap() * b.determinant().unwrap());
    }

    #[test]
    fn rank_ignores_row_order((p, rows) in (1usize..=5).prop_flat_map(square), shift in 0usize..5) {
        let m = matrix(p, &rows);
        let mut rotated = rows.clone();
        rotated.rotate_left(shift % rows.len());
        prop_assert_eq!(m.rank(), matrix(p, &rotated).rank());
        prop_assert_eq!(m.rank() == rows.len(), !m.determinant().unwrap().is_zero());
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_recovers_solution((p, rows) in (1usize..=5).prop_flat_map(square), xs in prop::collection::vec(0u64..7, 5)) {
        let a = matrix(p, &rows);
        let f = a.field();
        let x: Vec<Fe> = xs[..rows.len()].iter().map(|&v| f.elem(v)).collect();
        let b = a.mul_vec(&x).unwrap();
        match solve_unique(&a, &b) {
            Ok(got) => prop_assert_eq!(got, x),
            Err(_) => prop_assert!(a.determinant().unwrap().is_zero()),
        }
    }

    #[test]
    fn inverse_is_an_involution(p in prop::sample::select(&[3u64, 5, 7, 101, 65521][..]), v in 1u64..65521) {
        let f = PrimeField::new(p).unwrap();
        let a = f.elem(v);
        prop_assume!(!a.is_zero());
        let inv = a.inverse().unwrap();
        prop_assert_eq!(a * inv, f.one());
        prop_assert_eq!(inv.inverse().unwrap(), a);
        prop_assert_eq!(a.pow(p - 1), f.one());
    }
}

fn var(v: usize, c: u16) -> VarId {
    VarId::new(v, c)
}

/// Random polynomial over GF(p) in variables x{0..3}_{2..3} of degree <= 2.
fn poly_strategy(p: u64) -> impl Strategy<Value = Poly> {
    let f = PrimeField::new(p).unwrap();
    prop::collection::vec(
        (0usize..3, 2u16..4, 0usize..3, 2u16..4, 0u32..3, 1u64..7),
        0..6,
    )
    .prop_map(move |terms| {
        Poly::from_terms(
            f,
            terms.into_iter().map(|(v1, c1, v2, c2, shape, coef)| {
                let m = match shape {
                    0 => Monomial::one(),
                    1 => Monomial::var(var(v1, c1)),
                    _ => Monomial::from_factors([(var(v1, c1), 1), (var(v2, c2), 1)]),
                };
                (m, f.elem(coef))
            }),
        )
    })
}

fn point(f: PrimeField, vals: &[u64]) -> Assignment {
    (0..3)
        .map(|v| {
            (
                v,
                vec![f.one(), f.elem(vals[2 * v]), f.elem(vals[2 * v + 1])],
            )
        })
        .collect()
}

/// Rank of the coefficient matrix, one row per polynomial.
fn coefficient_rank(f: PrimeField, polys: &[Poly]) -> usize {
    let monomials: Vec<Monomial> = polys
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if polys.is_empty() || monomials.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Fe>> = polys
        .iter()
        .map(|p| monomials.iter().map(|m| p.coefficient(m)).collect())
        .collect();
    Matrix::from_rows(f, &rows).unwrap().rank()
}

proptest! {
    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly_strategy(5), b in poly_strategy(5), vals in prop::collection::vec(0u64..5, 6)) {
        let f = PrimeField::new(5).unwrap();
        let x = point(f, &vals);
        let mut sum = a.clone();
        sum.add_scaled(&b, f.one()).unwrap();
        prop_assert_eq!(sum.eval(&x).unwrap(), a.eval(&x).unwrap() + b.eval(&x).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().eval(&x).unwrap(), a.eval(&x).unwrap() * b.eval(&x).unwrap());
    }

    #[test]
    fn echelon_basis_spans_every_input(polys in prop::collection::vec(poly_strategy(3), 1..10), coefs in prop::collection::vec(0u64..3, 10)) {
        let f = PrimeField::new(3).unwrap();
        let mut basis = EchelonBasis::new(f);
        let mut kept = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            let tag = ConstraintTag::Single { v: i, s: vec![i] };
            if basis.insert(p, tag).unwrap() {
                kept.push(p.clone());
            }
        }
        prop_assert_eq!(basis.len(), kept.len());
        let members: Vec<usize> = basis.members().iter().map(|t| match t {
            ConstraintTag::Single { v, .. } => *v,
            other => panic!("unexpected tag {other}"),
        }).collect();
        prop_assert!(members.iter().all(|&i| i < polys.len()));
        for p in &polys {
            prop_assert!(basis.spans(p).unwrap());
        }
        let mut combo = Poly::zero(f);
        for (p, &c) in polys.iter().zip(&coefs) {
            combo.add_scaled(p, f.elem(c)).unwrap();
        }
        prop_assert!(basis.spans(&combo).unwrap());
        prop_assert_eq!(coefficient_rank(f, &polys), kept.len());
        prop_assert_eq!(coefficient_rank(f, &kept), kept.len());
        // Retained polynomials are independent: rebuilding from them keeps all.
        let mut again = EchelonBasis::new(f);
        for (i, p) in kept.iter().enumerate() {
            let tag = ConstraintTag::Single { v: i, s: vec![] };
            let fresh = again.insert(p, tag).unwrap();
            prop_assert!(fresh);
        }
    }

    #[test]
    fn dimacs_round_trip(n in 1usize..20, raw in prop::collection::vec((0usize..20, 0usize..20), 0..40), x in prop::collection::btree_set(0usize..20, 0..5)) {
        let mut g = Graph::new(n);
        for (u, v) in raw {
            if u < n && v < n && u != v {
                g.add_edge(u, v).unwrap();
            }
        }
        let text = write_graph(&g, &["round trip".to_string()]);
        prop_assert_eq!(parse_graph(&text).unwrap(), g);
        let x: Vec<usize> = x.into_iter().filter(|&v| v < n).collect();
        prop_assert_eq!(parse_modulator(&write_modulator(&x), n).unwrap(), x);
    }
}
