//! Property-based invariants for the exact kernel and the linear algebra:
//! ring axioms, canonical-form round trips, RREF uniqueness, orthogonal
//! involutions, and the subspace lattice identities.

use dirac_core::linalg::{Matrix, SplitPairing, Subspace};
use dirac_core::scalar::{parse_expr, rat, Point, Poly, Rational, ScalarExpr, Vars};
use proptest::prelude::*;

fn xyz() -> Vars {
    Vars::new(["x", "y", "z"])
}

/// Random polynomial of degree ≤ 2 in three variables, small coefficients.
fn poly_strategy() -> impl Strategy<Value = Poly> {
    let term = (0u32..3, 0u32..3, 0u32..2, -4i64..5);
    proptest::collection::vec(term, 0..5).prop_map(|terms| {
        let v = xyz();
        Poly::from_terms(
            &v,
            terms
                .into_iter()
                .map(|(a, b, c, k)| (vec![a.min(2), b.min(2), c], rat(k)))
                .collect(),
        )
    })
}

fn nonzero_poly_strategy() -> impl Strategy<Value = Poly> {
    poly_strategy().prop_map(|p| {
        if p.is_zero() {
            Poly::one(&xyz())
        } else {
            p
        }
    })
}

fn expr_strategy() -> impl Strategy<Value = ScalarExpr> {
    (poly_strategy(), nonzero_poly_strategy())
        .prop_map(|(n, d)| ScalarExpr::new(n, d).expect("nonzero denominator"))
}

fn point_strategy() -> impl Strategy<Value = Point> {
    proptest::collection::vec((-6i64..7, 1i64..4), 3)
        .prop_map(|cs| Point::new(cs.into_iter().map(|(n, d)| Rational::new(n.into(), d.into())).collect()))
}

proptest! {
    #[test]
    fn poly_ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn expr_field_axioms(a in expr_strategy(), b in expr_strategy()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !b.is_zero() {
            let q = a.div(&b).unwrap();
            prop_assert_eq!(&q * &b, a);
        }
    }

    #[test]
    fn print_parse_roundtrip(e in expr_strategy()) {
        let printed = e.to_string();
        let reparsed = parse_expr(&printed, &xyz()).unwrap();
        prop_assert_eq!(e, reparsed);
    }

    #[test]
    fn mixed_partials_commute(e in expr_strategy()) {
        let dxy = e.partial(0).partial(1);
        let dyx = e.partial(1).partial(0);
        prop_assert_eq!(dxy, dyx);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        f in expr_strategy(),
        g in expr_strategy(),
        p in point_strategy(),
    ) {
        let fp = f.evaluate(&p);
        let gp = g.evaluate(&p);
        if let (Ok(fv), Ok(gv)) = (fp, gp) {
            // Both sides defined: products and sums must match exactly.
            prop_assert_eq!((&f * &g).evaluate(&p).unwrap(), &fv * &gv);
            prop_assert_eq!((&f + &g).evaluate(&p).unwrap(), &fv + &gv);
        }
    }

    #[test]
    fn gcd_divides_and_normalizes(a in nonzero_poly_strategy(), b in nonzero_poly_strategy()) {
        let g = Poly::gcd(&a, &b);
        prop_assert!(!g.is_zero());
        prop_assert!(a.divexact(&g).is_some());
        prop_assert!(b.divexact(&g).is_some());
        // The canonical quotient has trivial gcd afterwards.
        let e = ScalarExpr::new(a, b).unwrap();
        prop_assert!(Poly::gcd(e.num(), e.den()).is_constant());
    }
}

fn small_matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Rational>> {
    proptest::collection::vec(-4i64..5, rows * cols).prop_map(move |data| {
        Matrix::new(rows, cols, data.into_iter().map(rat).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rref_is_invariant_under_row_operations(
        m in small_matrix_strategy(3, 5),
        swap in (0usize..3, 0usize..3),
        scale in 1i64..4,
        add in (0usize..3, 0usize..3, -3i64..4),
    ) {
        // Apply a random invertible row operation; the RREF must not move.
        let mut rows: Vec<Vec<Rational>> = (0..3).map(|r| m.row_vec(r)).collect();
        rows.swap(swap.0, swap.1);
        for e in rows[0].iter_mut() {
            *e = &*e * &rat(scale);
        }
        let (i, j, k) = add;
        if i != j {
            let src = rows[j].clone();
            for (e, s) in rows[i].iter_mut().zip(&src) {
                *e = &*e + &(&rat(k) * s);
            }
        }
        let m2 = Matrix::from_rows(rows);
        prop_assert_eq!(m.rref().0, m2.rref().0);
    }

    #[test]
    fn kernel_dimension_and_membership(m in small_matrix_strategy(3, 5)) {
        let (_, rank) = m.rref();
        let k = m.kernel();
        prop_assert_eq!(k.rows(), 5 - rank);
        for r in 0..k.rows() {
            let image = m.mul_vec(k.row(r));
            prop_assert!(image.iter().all(|v| v == &rat(0)));
        }
    }

    #[test]
    fn double_orthogonal_and_de_morgan(
        a in small_matrix_strategy(2, 6),
        b in small_matrix_strategy(2, 6),
    ) {
        let pairing = SplitPairing::standard(3);
        let sa = Subspace::from_rows(6, a);
        let sb = Subspace::from_rows(6, b);
        let perp = |s: &Subspace<Rational>| pairing.orthogonal(s);

        prop_assert_eq!(perp(&perp(&sa)), sa.clone());
        prop_assert_eq!(sa.dim() + perp(&sa).dim(), 6);

        // (A + B)^⊥ = A^⊥ ∩ B^⊥ and (A ∩ B)^⊥ = A^⊥ + B^⊥.
        prop_assert_eq!(perp(&sa.sum(&sb)), perp(&sa).intersect(&perp(&sb)));
        prop_assert_eq!(perp(&sa.intersect(&sb)), perp(&sa).sum(&perp(&sb)));
    }

    #[test]
    fn grassmann_dimension_formula(
        a in small_matrix_strategy(3, 6),
        b in small_matrix_strategy(2, 6),
    ) {
        let sa = Subspace::from_rows(6, a);
        let sb = Subspace::from_rows(6, b);
        prop_assert_eq!(
            sa.dim() + sb.dim(),
            sa.sum(&sb).dim() + sa.intersect(&sb).dim()
        );
    }
}
