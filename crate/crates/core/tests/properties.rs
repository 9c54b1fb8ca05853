use std::sync::Arc;

use proptest::prelude::*;
use qgaudin::gradedalg::{coproduct_homomorphism_check, graded_kron, GradedMatrix, Parity, SiteSpace};
use qgaudin::linalg::SparseMatrix;
use qgaudin::model::{commutation_audit, Model};
use qgaudin::scalar::{rat, HalfInt, LaurentPoly, RatFunc};
use qgaudin::spectrum::{cluster_sorted, degeneracy_binomial, full_basis};
use qgaudin::superrep::build_irrep;

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    (-3i64..=3, prop::collection::vec(-4i64..=4, 1..4))
        .prop_map(|(low, cs)| LaurentPoly::from_terms(cs.into_iter().enumerate().map(|(i, c)| (low + i as i64, c))))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (laurent(), laurent()).prop_filter_map("zero denominator", |(n, d)| RatFunc::new(n, d).ok())
}

fn nonzero() -> impl Strategy<Value = RatFunc> {
    ratfunc().prop_filter("zero", |r| !r.is_zero())
}

fn spin() -> impl Strategy<Value = HalfInt> {
    (1i64..=3).prop_map(HalfInt::from_twice)
}

/// A graded matrix on `grading` of the given parity with small integer entries.
fn graded(grading: Vec<u8>, parity: Parity, entries: Vec<i64>) -> GradedMatrix<f64> {
    let n = grading.len();
    let trips = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .zip(entries)
        .filter(|&((i, j), _)| (grading[i] + grading[j]) % 2 == parity.bit())
        .map(|((i, j), v)| (i, j, v as f64))
        .collect();
    GradedMatrix::new(SparseMatrix::from_triplets(n, n, trips), Arc::new(grading), parity).unwrap()
}

fn graded_on(g: Vec<u8>) -> impl Strategy<Value = GradedMatrix<f64>> {
    let n = g.len();
    (any::<bool>(), prop::collection::vec(-3i64..=3, n * n))
        .prop_map(move |(odd, e)| graded(g.clone(), if odd { Parity::Odd } else { Parity::Even }, e))
}

fn graded_strategy() -> impl Strategy<Value = GradedMatrix<f64>> {
    prop::collection::vec(0u8..2, 1..4).prop_flat_map(graded_on)
}

/// Two matrices on the same grading.
fn graded_pair() -> impl Strategy<Value = (GradedMatrix<f64>, GradedMatrix<f64>)> {
    prop::collection::vec(0u8..2, 1..4).prop_flat_map(|g| (graded_on(g.clone()), graded_on(g)))
}

proptest! {
    #[test]
    fn ratfunc_field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn ratfunc_inverse(a in nonzero()) {
        prop_assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn ratfunc_display_parses_back(a in ratfunc()) {
        let back: RatFunc = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn ratfunc_evaluation_is_a_homomorphism(a in ratfunc(), b in ratfunc(), s in 0.5f64..2.0) {
        if let (Some(x), Some(y), Some(xy)) = (a.eval_f64(s), b.eval_f64(s), (&a * &b).eval_f64(s)) {
            prop_assert!((xy - x * y).abs() <= 1e-9 * (1.0 + (x * y).abs()));
        }
        if let (Some(x), Some(y), Some(sum)) = (a.eval_f64(s), b.eval_f64(s), (&a + &b).eval_f64(s)) {
            prop_assert!((sum - x - y).abs() <= 1e-9 * (1.0 + x.abs() + y.abs()));
        }
    }

    #[test]
    fn halfint_round_trip(t in -40i64..40) {
        let h = HalfInt::from_twice(t);
        let back: HalfInt = h.to_string().parse().unwrap();
        prop_assert_eq!(back, h);
        prop_assert_eq!(h.to_f64() * 2.0, t as f64);
    }

    #[test]
    fn graded_kron_is_associative(a in graded_strategy(), b in graded_strategy(), c in graded_strategy()) {
        let l = graded_kron(&graded_kron(&a, &b), &c);
        let r = graded_kron(&a, &graded_kron(&b, &c));
        prop_assert_eq!(l.mat().sub(r.mat()).max_abs(), 0.0);
        prop_assert_eq!(l.parity(), r.parity());
    }

    #[test]
    fn graded_kron_sign_rule(
        (a, c) in graded_pair(),
        (b, d) in graded_pair(),
    ) {
        // (A⊗B)(C⊗D) = (-1)^{|B||C|} AC⊗BD
        let lhs = graded_kron(&a, &b).mul(&graded_kron(&c, &d)).unwrap();
        let rhs = graded_kron(&a.mul(&c).unwrap(), &b.mul(&d).unwrap());
        let sign = if b.parity().bit() * c.parity().bit() == 1 { -1.0 } else { 1.0 };
        prop_assert_eq!(lhs.mat().sub(&rhs.mat().scale(&sign)).max_abs(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn coproduct_is_a_homomorphism(n in 1usize..=4, j in spin(), g0 in 0u8..2, z in 0.05f64..1.5) {
        let irrep = build_irrep(j, g0).unwrap().to_float(z).unwrap();
        let space = SiteSpace::new(n, Arc::new(irrep));
        let report = coproduct_homomorphism_check(&space, true);
        prop_assert!(report.all_pass(), "{:?}", report);
    }

    #[test]
    fn casimirs_commute(n in 1usize..=4, j in spin(), g0 in 0u8..2, z in 0.05f64..1.5) {
        let m = Model::float(n, j, g0, z).unwrap();
        let report = commutation_audit(&m.observable_family(), &[]);
        prop_assert!(report.all_commute(), "{}", report.max_residual());
    }

    #[test]
    fn full_basis_vectors_are_joint_eigenvectors(n in 1usize..=4, g0 in 0u8..2, z in 0.1f64..1.2) {
        let m = Model::float(n, HalfInt::HALF, g0, z).unwrap();
        let basis = full_basis(&m, true).unwrap();
        prop_assert_eq!(basis.len(), m.dim());
        for p in &basis {
            for (k, lambda) in (1..=n).zip(&p.eigenvalues) {
                let c = m.casimir(k, true).mat();
                let cv = c.mul_vec(&p.vector);
                let scale = c.max_abs().max(1.0) * p.vector.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                let worst = cv.iter().zip(&p.vector).map(|(a, v)| (a - lambda * v).abs()).fold(0.0, f64::max);
                prop_assert!(worst <= 1e-9 * scale, "{} C{}: {}", p.label, k, worst);
            }
        }
    }

    #[test]
    fn spectrum_does_not_depend_on_grading(n in 1usize..=3, j in spin(), z in 0.05f64..0.5) {
        let tuples = |g0| {
            let m = Model::float(n, j, g0, z).unwrap();
            full_basis(&m, true).unwrap().into_iter().map(|p| p.eigenvalues).collect::<Vec<_>>()
        };
        let (a, mut b) = (tuples(0), tuples(1));
        prop_assert_eq!(a.len(), b.len());
        let close = |x: &Vec<f64>, y: &Vec<f64>| x.iter().zip(y).all(|(u, v)| (u - v).abs() <= 1e-9 * (1.0 + u.abs()));
        for x in &a {
            let i = b.iter().position(|y| close(x, y));
            prop_assert!(i.is_some(), "{:?} has no partner", x);
            b.swap_remove(i.unwrap());
        }
    }
}

proptest! {
    #[test]
    fn degeneracies_fill_the_space(n in 1usize..=12) {
        let total: i128 = (0..=n as i64)
            .map(|two_l| degeneracy_binomial(n, two_l).unwrap() * (2 * two_l + 1) as i128)
            .sum();
        prop_assert_eq!(total, 3i128.pow(n as u32));
    }

    #[test]
    fn clusters_partition_sorted_values(mut v in prop::collection::vec(-1e3f64..1e3, 0..30)) {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if let Ok(runs) = cluster_sorted(&v, 1e-8) {
            let mut next = 0;
            for r in &runs {
                prop_assert_eq!(r.start, next);
                prop_assert!(r.end > r.start);
                next = r.end;
            }
            prop_assert_eq!(next, v.len());
        }
    }

    #[test]
    fn repeated_values_share_a_cluster(x in -1e3f64..1e3, k in 1usize..6) {
        let v = vec![x; k];
        let runs = cluster_sorted(&v, 1e-8).unwrap();
        prop_assert_eq!(runs.len(), 1);
    }
}

#[test]
fn one_site_casimir_value_at_q_one() {
    let m = Model::exact(1, HalfInt::HALF, 1).unwrap();
    let c = m.casimir(1, true).mat().get(0, 0);
    assert_eq!(c.eval_at_one(), Some(rat(9, 4)));
}

#[test]
fn ill_conditioned_float_raising_is_reported() {
    // Twelve and more raisings at z = 1.1 amplify rounding in the kernel vector.
    let m = Model::float(3, HalfInt::from_twice(3), 1, 1.1).unwrap();
    assert!(full_basis(&m, true).is_err());
}
