mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use strong_ellipticity::fixtures::{ex71, ex72, ex73, ex74};
use strong_ellipticity::linalg::SymMatrix;
use strong_ellipticity::soscert::{semi_paired_canonical4, semi_paired_canonical6};
use strong_ellipticity::tensor::{PairedTensor4, PairedTensor6, Tensor, Vec3};
use strong_ellipticity::unfold::*;

/// A random valid spec: a random bijection of positions onto index tuples.
fn random_spec(rng: &mut impl Rng, k: usize) -> UnfoldSpec {
    let mut tuples: Vec<Vec<usize>> = tuples(k).collect();
    tuples.shuffle(rng);
    let seqs = (0..k).map(|q| tuples.iter().map(|t| t[q] + 1).collect()).collect();
    UnfoldSpec::new(seqs).unwrap()
}

/// m_st read straight from the definition.
fn entry(a: &[f64], spec: &UnfoldSpec, s: usize, t: usize) -> f64 {
    let mut idx = Vec::new();
    for q in spec.seqs() {
        idx.extend([q[s], q[t]]);
    }
    a[off(&idx)]
}

fn dense(m: &SymMatrix) -> Vec<Vec<f64>> {
    (0..m.n()).map(|i| (0..m.n()).map(|j| m.get(i, j)).collect()).collect()
}

#[test]
fn named_specs() {
    assert_eq!(UnfoldSpec::m1().to_strings(), ["111222333", "123123123"]);
    assert_eq!(UnfoldSpec::m2().to_strings(), ["123123123", "111222333"]);
    assert_eq!(UnfoldSpec::n(1).unwrap().to_strings()[0], "111111111222222222333333333");
    assert_eq!(UnfoldSpec::parse(&["111222333", "123123123"]).unwrap(), UnfoldSpec::m1());
    for v in 1..=6 {
        assert_eq!(UnfoldSpec::n(v).unwrap().len(), 27);
    }
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(UnfoldSpec::parse(&["111222333"]).is_err());
    assert!(UnfoldSpec::parse(&["11122233", "123123123"]).is_err());
    assert!(UnfoldSpec::parse(&["111222334", "123123123"]).is_err());
    assert!(UnfoldSpec::parse(&["11122233x", "123123123"]).is_err());
    // Right symbol counts, but the pair (1,1) appears twice.
    assert!(UnfoldSpec::parse(&["111222333", "113123123"]).is_err());
    assert!(UnfoldSpec::n(0).is_err() && UnfoldSpec::n(7).is_err());
    assert!(unfold4(&ex71(), &UnfoldSpec::n(1).unwrap()).is_err());
    assert!(unfold6(&ex74(), &UnfoldSpec::m1()).is_err());
}

#[test]
fn semi_paired_unfolding_of_the_sos_example() {
    let b = semi_paired_canonical4(&ex73());
    let m = unfold_raw(b.entries(), &UnfoldSpec::m1()).unwrap().matrix;
    let mut want = vec![vec![0.0; 9]; 9];
    for (i, j, v) in [(0, 0, 2.0), (4, 4, 2.0), (8, 8, 2.0), (0, 8, -1.0), (8, 0, -1.0), (4, 8, -1.0), (8, 4, -1.0)] {
        want[i][j] = v;
    }
    assert_eq!(dense(&m), want);
}

#[test]
fn identity_unfolds_to_identity() {
    // e_{i_s i_t j_s j_t} = 1 needs i_s = i_t and j_s = j_t, so only s = t.
    let m = unfold_m1(&PairedTensor4::identity()).matrix;
    assert_eq!(m, SymMatrix::identity(9));
    assert_eq!(unfold_m1(&PairedTensor4::zero()).matrix, SymMatrix::zeros(9));
    assert_eq!(unfold_m1(&ex71()).matrix.get(0, 0), 1.0);
}

#[test]
fn order6_semi_paired_unfolding() {
    let b = semi_paired_canonical6(&ex74());
    let m = unfold_raw(b.entries(), &UnfoldSpec::n(1).unwrap()).unwrap().matrix;
    let mut want = vec![vec![0.0; 27]; 27];
    for d in [1, 6, 10, 14, 20, 27] {
        want[d - 1][d - 1] = 1.0;
    }
    for (i, j) in [(1, 6), (10, 14), (20, 27)] {
        want[i - 1][j - 1] = -1.0;
        want[j - 1][i - 1] = -1.0;
    }
    assert_eq!(dense(&m), want);
    assert_eq!(unfold_n(&PairedTensor6::zero(), 3).unwrap().matrix, SymMatrix::zeros(27));
}

#[test]
fn elasticity_unfoldings_coincide() {
    let mut r = rng(21);
    for _ in 0..50 {
        let a = random_paired4(&mut r, true);
        assert_eq!(unfold_m1(&a).matrix, unfold_m2(&a).matrix);
        let b = random_paired6(&mut r, true);
        let n1 = unfold_n(&b, 1).unwrap().matrix;
        for v in 2..=6 {
            assert_eq!(unfold_n(&b, v).unwrap().matrix, n1, "variant {v}");
        }
        let bl = blocks6(&b);
        assert_eq!(bl.a, bl.b);
        assert_eq!(bl.a, bl.c);
    }
    let e = PairedTensor4::identity();
    assert_eq!(unfold_m1(&e).matrix, unfold_m2(&e).matrix);
}

#[test]
fn block_examples() {
    let b = blocks4(&ex72());
    let a33 = &b.a[2][2];
    assert_eq!(dense(a33), vec![vec![1.0, 0.0, 0.0], vec![0.0, 3.0, -1.0], vec![0.0, -1.0, 3.0]]);
    let e = blocks4(&PairedTensor4::identity());
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { SymMatrix::identity(3) } else { SymMatrix::zeros(3) };
            assert_eq!(e.a[i][j], want);
            assert_eq!(e.b[i][j], want);
        }
    }
    let z = blocks6(&PairedTensor6::zero());
    assert!(z.a.iter().flatten().all(|t| t.entries().iter().all(|&v| v == 0.0)));
}

#[test]
fn parameterized_matrix_examples() {
    assert_eq!(param_matrix4(&ex72(), Side::A, &[1.0, 0.0, 0.0]).unwrap(), SymMatrix::identity(3));
    let mut r = rng(22);
    for _ in 0..20 {
        let y = unit(&mut r);
        let m = param_matrix4(&PairedTensor4::identity(), Side::A, &y).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
    assert!(param_matrix4(&ex72(), Side::C, &[1.0, 0.0, 0.0]).is_err());
    // Substituting e3, e2 into the 6th order example leaves x1², -x1x3 and x3² terms.
    let m = param_matrix6(&ex74(), Side::A, &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]);
    assert_eq!(m.quad_form(&[0.0, 0.0, 1.0]), 0.0);
    let z = param_matrix6(&PairedTensor6::zero(), Side::B, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
    assert_eq!(z, SymMatrix::zeros(3));
}

fn form6_via(a: &PairedTensor6, x: &Vec3, y: &Vec3, z: &Vec3) -> [f64; 3] {
    [
        param_matrix6(a, Side::A, y, z).quad_form(x),
        param_matrix6(a, Side::B, x, z).quad_form(y),
        param_matrix6(a, Side::C, x, y).quad_form(z),
    ]
}

proptest! {
    #![proptest_config(config(1000, 23))]

    #[test]
    fn unfolding_reproduces_the_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_paired4(&mut r, false);
        let spec = random_spec(&mut r, 2);
        let m = unfold4(&a, &spec).unwrap().matrix;
        for s in 0..9 {
            for t in 0..9 {
                prop_assert_eq!(m.get(s, t), entry(a.entries(), &spec, s, t));
            }
        }
        let (x, y) = (unit(&mut r), unit(&mut r));
        let w = spec.w(&[x, y]);
        prop_assert!(close(m.quad_form(&w), form4(a.entries(), &x, &y), 1e-12));
    }

    #[test]
    fn order6_unfolding_reproduces_the_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_paired6(&mut r, false);
        let spec = random_spec(&mut r, 3);
        let m = unfold6(&a, &spec).unwrap().matrix;
        let (x, y, z) = (unit(&mut r), unit(&mut r), unit(&mut r));
        prop_assert!(close(m.quad_form(&spec.w(&[x, y, z])), form6(a.entries(), &x, &y, &z), 1e-12));
    }

    #[test]
    fn parameterized_matrices_reproduce_the_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_paired4(&mut r, false);
        let (x, y) = (unit(&mut r), unit(&mut r));
        let f = form4(a.entries(), &x, &y);
        prop_assert!(close(param_matrix4(&a, Side::A, &y).unwrap().quad_form(&x), f, 1e-12));
        prop_assert!(close(param_matrix4(&a, Side::B, &x).unwrap().quad_form(&y), f, 1e-12));
        let b = random_paired6(&mut r, false);
        let z = unit(&mut r);
        let g = form6(b.entries(), &x, &y, &z);
        for v in form6_via(&b, &x, &y, &z) {
            prop_assert!(close(v, g, 1e-12));
        }
    }
}

/// The 20 fixed specs used by the acceptance suite are all valid and exact.
#[test]
fn twenty_random_specs_at_many_points() {
    let mut r = rng(24);
    let a = random_paired4(&mut r, false);
    for _ in 0..20 {
        let spec = random_spec(&mut r, 2);
        let m = unfold4(&a, &spec).unwrap().matrix;
        for _ in 0..50 {
            let (x, y) = (unit(&mut r), unit(&mut r));
            assert!(close(m.quad_form(&spec.w(&[x, y])), form4(a.entries(), &x, &y), 1e-12));
        }
    }
}
