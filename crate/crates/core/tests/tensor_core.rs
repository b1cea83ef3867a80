mod common;

use common::*;
use proptest::prelude::*;
use strong_ellipticity::fixtures::{ex71, ex72, ex73, ex74};
use strong_ellipticity::tensor::*;
use strong_ellipticity::Error;

fn e(i: usize) -> Vec3 {
    let mut v = [0.0; 3];
    v[i] = 1.0;
    v
}

#[test]
fn fixtures_satisfy_their_class() {
    for t in [ex71(), ex72(), ex73()] {
        assert!(validate_symmetry(t.entries(), SymmetryClass::Paired4).unwrap().ok);
    }
    assert!(validate_symmetry(ex74().entries(), SymmetryClass::Paired6).unwrap().ok);
    let a = ex71();
    let h = -0.5;
    for idx in [[0, 1, 0, 1], [0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 1, 0]] {
        assert_eq!(a.get(idx[0], idx[1], idx[2], idx[3]), h);
    }
}

#[test]
fn single_asymmetric_entry_is_reported() {
    let mut a = vec![0.0; 81];
    a[off(&[0, 1, 0, 0])] = 1.0;
    let r = validate_symmetry(&a, SymmetryClass::Paired4).unwrap();
    assert!(!r.ok);
    let v = &r.violations[0];
    let pair = [v.index.clone(), v.partner.clone()];
    assert!(pair.contains(&vec![1, 2, 1, 1]) && pair.contains(&vec![2, 1, 1, 1]), "{pair:?}");
}

#[test]
fn identity_tensor_classes_and_norm() {
    let e4 = PairedTensor4::identity();
    assert!(validate_symmetry(e4.entries(), SymmetryClass::Paired4).unwrap().ok);
    assert!(validate_symmetry(e4.entries(), SymmetryClass::Elasticity4).unwrap().ok);
    assert_eq!(hs_norm(&e4), 3.0);
    assert_eq!(hs_inner(&e4, &PairedTensor4::zero()).unwrap(), 0.0);
    let mut r = rng(1);
    for _ in 0..20 {
        let (x, y) = (unit(&mut r), unit(&mut r));
        assert!((eval_form4(&e4, &x, &y) - 1.0).abs() < 1e-14);
    }
    let c = contract4(&e4, &e(0), &unit(&mut r), Slot::X);
    assert!((c[0] - 1.0).abs() < 1e-14 && c[1].abs() < 1e-14 && c[2].abs() < 1e-14);
}

#[test]
fn wrong_length_is_a_dimension_error() {
    assert!(matches!(validate_symmetry(&[0.0; 80], SymmetryClass::Paired4), Err(Error::Dimension { .. })));
    assert!(matches!(symmetrize(&[0.0; 82], SymmetryClass::Paired4), Err(Error::Dimension { .. })));
    assert!(PairedTensor4::new(vec![0.0; 27], false).is_err());
}

#[test]
fn symmetrize_examples() {
    let a = ex71();
    let s = symmetrize(a.entries(), SymmetryClass::Paired4).unwrap();
    assert_eq!(s.entries(), a.entries());

    let mut raw = vec![0.0; 81];
    raw[off(&[0, 1, 0, 0])] = 1.0;
    let s = symmetrize(&raw, SymmetryClass::Paired4).unwrap();
    // The orbit of (1,2,1,1) under the pair swaps is {(1,2,1,1), (2,1,1,1)}.
    let nonzero: Vec<usize> = (0..81).filter(|&k| s.entries()[k] != 0.0).collect();
    assert_eq!(nonzero, vec![off(&[0, 1, 0, 0]), off(&[1, 0, 0, 0])]);
    assert_eq!(s.entries()[off(&[0, 1, 0, 0])], 0.5);

    let z = symmetrize(&[0.0; 729], SymmetryClass::Paired6).unwrap();
    assert!(z.entries().iter().all(|&v| v == 0.0));
}

#[test]
fn symmetrize_matches_explicit_group_average() {
    let mut r = rng(2);
    for (m, pairs, class, major) in [
        (4, 2, SymmetryClass::Paired4, false),
        (4, 2, SymmetryClass::Elasticity4, true),
        (6, 3, SymmetryClass::Paired6, false),
        (6, 3, SymmetryClass::Elasticity6, true),
    ] {
        let a = raw(&mut r, m);
        let s = symmetrize(&a, class).unwrap();
        let o = pair_average(&a, pairs, major);
        for (u, v) in s.entries().iter().zip(&o) {
            assert!((u - v).abs() < 1e-15);
        }
        let again = symmetrize(s.entries(), class).unwrap();
        assert_eq!(again.entries(), s.entries());
    }
}

#[test]
fn fixture_form_values() {
    assert_eq!(eval_form4(&ex71(), &e(0), &e(2)), 0.0);
    assert_eq!(contract4(&ex71(), &e(0), &e(2), Slot::X), [0.0; 3]);
    assert_eq!(eval_form4(&ex72(), &e(0), &e(0)), 1.0);
    assert_eq!(contract4(&ex72(), &e(0), &e(0), Slot::Y), [1.0, 0.0, 0.0]);
    assert_eq!(eval_form6(&ex74(), &e(2), &e(1), &e(0)), 0.0);
    assert_eq!(eval_form6(&ex74(), &e(0), &e(0), &e(0)), 1.0);
    let single = PairedTensor6::from_orbits(false, &[([0; 6], 1.0)]);
    assert_eq!(eval_form6(&single, &e(0), &e(0), &e(0)), 1.0);
    assert_eq!(hs_inner(&ex73(), &ex73()).unwrap(), 14.0);
}

#[test]
fn biblock_rewrap_agrees_with_form4() {
    let mut r = rng(3);
    let a = random_paired4(&mut r, false);
    let b = BiBlockTensor::from_paired4(&a);
    for _ in 0..100 {
        let (x, y) = (unit(&mut r), unit(&mut r));
        assert!((eval_biblock(&b, &x, &y) - eval_form4(&a, &x, &y)).abs() < 1e-12);
        assert!((eval_biblock(&b, &x, &y) - form4(a.entries(), &x, &y)).abs() < 1e-12);
    }
    let zero = BiBlockTensor::symmetrized(6, 2, &[0.0; 729]).unwrap();
    assert_eq!(eval_biblock(&zero, &unit(&mut r), &unit(&mut r)), 0.0);
}

#[test]
fn order8_outer_square_of_identity() {
    // e_{ijkl} e_{mnpq} with i=j, k=l, m=n, p=q, regrouped as x-indices (i j m n) and y-indices (k l p q).
    let mut a = vec![0.0; 3usize.pow(8)];
    for idx in tuples(8) {
        let (x, y) = (&idx[..4], &idx[4..]);
        if x[0] == x[1] && x[2] == x[3] && y[0] == y[1] && y[2] == y[3] {
            a[off(&idx)] = 1.0;
        }
    }
    let t = BiBlockTensor::symmetrized(8, 4, &a).unwrap();
    let mut r = rng(4);
    for _ in 0..20 {
        let x = unit(&mut r).map(|v| 2.0 * v);
        let y = unit(&mut r).map(|v| 0.5 * v);
        let want = 16.0 * 0.0625;
        assert!((t.form(&x, &y) - want).abs() < 1e-12, "{}", t.form(&x, &y));
    }
}

#[test]
fn hs_inner_rejects_order_mismatch() {
    assert!(hs_inner(&PairedTensor4::identity(), &ex74()).is_err());
    assert!(hs_norm(&PairedTensor4::zero()) == 0.0);
}

proptest! {
    #![proptest_config(config(1000, 11))]

    #[test]
    fn form4_contraction_identities(seed in any::<u64>(), x in prop::array::uniform3(-1.0..1.0f64), y in prop::array::uniform3(-1.0..1.0f64)) {
        let a = random_paired4(&mut rng(seed), false);
        let f = eval_form4(&a, &x, &y);
        let oracle = form4(a.entries(), &x, &y);
        prop_assert!(close(f, oracle, 1e-12));
        prop_assert!(close(dot(&x, &contract4(&a, &x, &y, Slot::X)), f, 1e-12));
        prop_assert!(close(dot(&y, &contract4(&a, &x, &y, Slot::Y)), f, 1e-12));
        // Direct contraction: v_i = Σ a_ijkl x_j y_k y_l.
        let cx = contract4(&a, &x, &y, Slot::X);
        for i in 0..3 {
            let mut s = 0.0;
            for idx in tuples(3) {
                s += a.get(i, idx[0], idx[1], idx[2]) * x[idx[0]] * y[idx[1]] * y[idx[2]];
            }
            prop_assert!(close(cx[i], s, 1e-12));
        }
        let (al, be) = (1.7, -0.3);
        let scaled = eval_form4(&a, &x.map(|v| al * v), &y.map(|v| be * v));
        prop_assert!(close(scaled, al * al * be * be * f, 1e-12));
    }

    #[test]
    fn form6_contraction_identities(seed in any::<u64>(), x in prop::array::uniform3(-1.0..1.0f64), y in prop::array::uniform3(-1.0..1.0f64), z in prop::array::uniform3(-1.0..1.0f64)) {
        let a = random_paired6(&mut rng(seed), false);
        let f = eval_form6(&a, &x, &y, &z);
        prop_assert!(close(f, form6(a.entries(), &x, &y, &z), 1e-12));
        for (v, slot) in [(x, Slot::X), (y, Slot::Y), (z, Slot::Z)] {
            prop_assert!(close(dot(&v, &contract6(&a, &x, &y, &z, slot)), f, 1e-12));
        }
    }

    #[test]
    fn symmetrize_is_idempotent(seed in any::<u64>()) {
        let a = raw(&mut rng(seed), 4);
        for class in [SymmetryClass::Paired4, SymmetryClass::Elasticity4] {
            let s = symmetrize(&a, class).unwrap();
            prop_assert!(validate_symmetry(s.entries(), class).unwrap().ok);
            let again = symmetrize(s.entries(), class).unwrap();
            prop_assert_eq!(again.entries(), s.entries());
        }
    }

    #[test]
    fn biblock_contraction_identity(seed in any::<u64>(), x in prop::array::uniform3(-1.0..1.0f64), y in prop::array::uniform3(-1.0..1.0f64)) {
        let a = raw(&mut rng(seed), 6);
        let b = BiBlockTensor::symmetrized(6, 4, &a).unwrap();
        let f = eval_biblock(&b, &x, &y);
        prop_assert!(close(f, multiform(b.entries(), &[0, 0, 0, 0, 1, 1], &[x, y]), 1e-12));
        prop_assert!(close(dot(&x, &contract_biblock(&b, &x, &y, Slot::X)), f, 1e-12));
        prop_assert!(close(dot(&y, &contract_biblock(&b, &x, &y, Slot::Y)), f, 1e-12));
    }
}
