mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use strong_ellipticity::fixtures::{ex71, ex72, ex74};
use strong_ellipticity::linalg::SymMatrix;
use strong_ellipticity::meigen::smallest_meig;
use strong_ellipticity::poly::*;
use strong_ellipticity::sylvester::*;
use strong_ellipticity::tensor::{PairedTensor4, PairedTensor6, Tensor};
use strong_ellipticity::unfold::{param_matrix4, param_matrix6, Side};
use strong_ellipticity::Verdict;

fn minors(m: &SymMatrix) -> [f64; 3] {
    let d: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m.get(i, j)));
    [d[0][0], d[0][0] * d[1][1] - d[0][1] * d[1][0], det3(d)]
}

#[test]
fn quadratic_block_polynomials() {
    let i = quad_poly(&SymMatrix::identity(3), 3, 0);
    let want = PolyForm::from_terms(3, [(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 1.0), (vec![0, 0, 2], 1.0)]);
    assert_eq!(i, want);
    let b = strong_ellipticity::unfold::blocks4(&ex72());
    let a33 = quad_poly(&b.a[2][2], 3, 0);
    let want = PolyForm::from_terms(
        3,
        [(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 3.0), (vec![0, 1, 1], -2.0), (vec![0, 0, 2], 3.0)],
    );
    assert_eq!(a33, want);
    assert!(quad_poly(&SymMatrix::zeros(3), 3, 0).is_zero());
}

#[test]
fn determinant_of_the_identity_family() {
    let s = quad_poly(&SymMatrix::identity(3), 3, 0);
    let z = || PolyForm::zero(3);
    let m = [[s.clone(), z(), z()], [z(), s.clone(), z()], [z(), z(), s.clone()]];
    let d = det3_polymatrix(&m);
    assert_eq!(d.coeff(&[2, 2, 2]), 6.0);
    assert_eq!(d.coeff(&[6, 0, 0]), 1.0);
    assert_eq!(d.coeff(&[4, 2, 0]), 3.0);
}

#[test]
fn symmetric_tensor_from_polynomial() {
    let t = symmetrize_to_tensor(&PolyForm::monomial(&[4, 0, 0], 1.0), 4).unwrap();
    assert!(t.entries().iter().enumerate().all(|(k, &v)| v == if k == 0 { 1.0 } else { 0.0 }));
    let t = symmetrize_to_tensor(&PolyForm::monomial(&[2, 2, 0], 1.0), 4).unwrap();
    let support: Vec<usize> = (0..81).filter(|&k| t.entries()[k] != 0.0).collect();
    assert_eq!(support.len(), 6);
    for k in support {
        assert!((t.entries()[k] - 1.0 / 6.0).abs() < 1e-15);
        let mut idx: Vec<usize> = tuples(4).nth(k).unwrap();
        idx.sort();
        assert_eq!(idx, vec![0, 0, 1, 1]);
    }
    let mut r = rng(61);
    let s = quad_poly(&SymMatrix::identity(3), 3, 0);
    let t = symmetrize_to_tensor(&s.mul(&s), 4).unwrap();
    for _ in 0..20 {
        assert!((t.form(&unit(&mut r)) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn derived_tensors_match_parameterized_minors() {
    let mut r = rng(62);
    for _ in 0..50 {
        let a = random_paired4(&mut r, false);
        for side in [Side::A, Side::B] {
            let t = sylvester_tensors4(&a, side).unwrap();
            let y = unit(&mut r);
            let m = minors(&param_matrix4(&a, side, &y).unwrap());
            assert!((t.leading_block.quad_form(&y) - m[0]).abs() < 1e-10);
            assert!((t.t1.form(&y) - m[1]).abs() < 1e-10);
            assert!((t.t2.form(&y) - m[2]).abs() < 1e-10);
            assert!((t.minor2.eval(&y) - m[1]).abs() < 1e-10);
            assert!((t.det.eval(&y) - m[2]).abs() < 1e-10);
        }
    }
}

#[test]
fn order6_derived_tensors_match_parameterized_minors() {
    let mut r = rng(63);
    for _ in 0..10 {
        let a = random_paired6(&mut r, false);
        for side in [Side::A, Side::B, Side::C] {
            let t = sylvester_tensors6(&a, side).unwrap();
            let (u, v) = (unit(&mut r), unit(&mut r));
            let m = minors(&param_matrix6(&a, side, &u, &v));
            assert!((t.leading_subtensor.form(&u, &v) - m[0]).abs() < 1e-10);
            assert!((t.t1.form(&u, &v) - m[1]).abs() < 1e-10);
            assert!((t.t2.form(&u, &v) - m[2]).abs() < 1e-10);
        }
    }
    let z = sylvester_tensors6(&PairedTensor6::zero(), Side::A).unwrap();
    assert!(z.det.is_zero() && z.t2.entries().iter().all(|&v| v == 0.0));
}

#[test]
fn fixture_verdicts() {
    let e = sylvester_check4(&PairedTensor4::identity(), Side::A).unwrap();
    assert_eq!(e.overall, Verdict::Pd);
    assert!((e.minor2_check.min_value_estimate - 1.0).abs() < 1e-10);
    assert!((e.det_check.min_value_estimate - 1.0).abs() < 1e-10);
    assert_eq!(sylvester_check4(&ex72(), Side::A).unwrap().overall, Verdict::Pd);
    assert_eq!(sylvester_check4(&ex72(), Side::B).unwrap().overall, Verdict::Pd);
    // det A(y) vanishes at y = e3 for the Choi-type tensor.
    let m = param_matrix4(&ex71(), Side::A, &[0.0, 0.0, 1.0]).unwrap();
    assert!(minors(&m)[2].abs() < 1e-14);
    let v = sylvester_check4(&ex71(), Side::A).unwrap();
    assert_ne!(v.overall, Verdict::Pd);
    assert!(v.det_check.min_value_estimate <= MARGIN);

    let v = sylvester_check6(&ex74(), Side::A).unwrap();
    assert_eq!(v.overall, Verdict::NotPd);
    let w = v.form_witness.unwrap();
    assert!(w.value.abs() < 1e-12);
    let diag = PairedTensor6::from_fn(false, |i| if i[0] == i[1] && i[2] == i[3] && i[4] == i[5] { 1.0 } else { 0.0 });
    assert_eq!(sylvester_check6(&diag, Side::A).unwrap().overall, Verdict::Pd);
    assert_eq!(sylvester_check6(&PairedTensor6::zero(), Side::B).unwrap().overall, Verdict::NotPd);
    assert_eq!(sylvester_check4(&PairedTensor4::zero(), Side::A).unwrap().overall, Verdict::NotPd);
    assert!(sylvester_check4(&ex72(), Side::C).is_err());
}

/// c·identity plus a random paired perturbation, so both verdicts occur.
fn shifted(r: &mut impl Rng, elasticity: bool) -> PairedTensor4 {
    let c = r.gen_range(0.0..2.0);
    random_paired4(r, elasticity).scaled(0.5).add(&PairedTensor4::identity().scaled(c))
}

#[test]
fn verdicts_agree_with_the_smallest_eigenvalue() {
    let mut r = rng(64);
    let mut seen = (0, 0, 0);
    while seen.0 < 50 {
        let a = shifted(&mut r, false);
        let lambda = smallest_meig(&a).lambda_min.unwrap();
        if lambda.abs() < 0.05 {
            continue;
        }
        seen.0 += 1;
        let want = if lambda > 0.0 { Verdict::Pd } else { Verdict::NotPd };
        let v = sylvester_check4(&a, Side::A).unwrap();
        assert_eq!(v.overall, want, "lambda {lambda}");
        if lambda > 0.0 {
            seen.1 += 1;
        } else {
            seen.2 += 1;
            let w = v.form_witness.unwrap();
            assert!(w.value < 0.0 && (form4(a.entries(), &w.vectors[0], &w.vectors[1]) - w.value).abs() < 1e-12);
        }
    }
    assert!(seen.1 >= 10 && seen.2 >= 10, "{seen:?}");
}

proptest! {
    #![proptest_config(config(50, 65))]

    #[test]
    fn sides_agree_for_elasticity_tensors(seed in any::<u64>()) {
        let a = shifted(&mut rng(seed), true);
        let va = sylvester_check4(&a, Side::A).unwrap();
        let vb = sylvester_check4(&a, Side::B).unwrap();
        prop_assert_eq!(va.overall, vb.overall);
        prop_assert!((va.det_check.min_value_estimate - vb.det_check.min_value_estimate).abs() < 1e-8);
    }
}
