//! Reference computations written without the library's helpers: direct index
//! sums, explicit group averages, closed-form 3×3 eigenvalues.
#![allow(dead_code)]

use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strong_ellipticity::tensor::{PairedTensor4, PairedTensor6, Vec3};

pub fn config(cases: u32, seed: u64) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn off(idx: &[usize]) -> usize {
    idx.iter().fold(0, |a, &i| 3 * a + i)
}

pub fn tuples(m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..3usize.pow(m as u32)).map(move |mut o| {
        let mut v = vec![0; m];
        for k in (0..m).rev() {
            v[k] = o % 3;
            o /= 3;
        }
        v
    })
}

/// Σ a[idx] Π_k vecs[slot[k]][idx_k].
pub fn multiform(a: &[f64], slots: &[usize], vecs: &[Vec3]) -> f64 {
    tuples(slots.len())
        .map(|idx| a[off(&idx)] * idx.iter().zip(slots).map(|(&i, &s)| vecs[s][i]).product::<f64>())
        .sum()
}

pub fn form4(a: &[f64], x: &Vec3, y: &Vec3) -> f64 {
    multiform(a, &[0, 0, 1, 1], &[*x, *y])
}

pub fn form6(a: &[f64], x: &Vec3, y: &Vec3, z: &Vec3) -> f64 {
    multiform(a, &[0, 0, 1, 1, 2, 2], &[*x, *y, *z])
}

/// Raw random entries in [-1, 1].
pub fn raw(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    (0..3usize.pow(m as u32)).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Average over swaps inside each pair, and over pair permutations if `major`.
pub fn pair_average(a: &[f64], pairs: usize, major: bool) -> Vec<f64> {
    let m = 2 * pairs;
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let orders: Vec<Vec<usize>> = if major { permutations(pairs) } else { vec![(0..pairs).collect()] };
    for order in &orders {
        for flips in 0..(1usize << pairs) {
            let mut p = Vec::with_capacity(m);
            for (k, &q) in order.iter().enumerate() {
                let (u, v) = (2 * q, 2 * q + 1);
                if flips >> k & 1 == 1 {
                    p.extend([v, u]);
                } else {
                    p.extend([u, v]);
                }
            }
            perms.push(p);
        }
    }
    tuples(m)
        .map(|idx| {
            // Summing in offset order makes orbit members bitwise equal.
            let mut offs: Vec<usize> = perms.iter().map(|p| off(&p.iter().map(|&k| idx[k]).collect::<Vec<_>>())).collect();
            offs.sort_unstable();
            offs.iter().map(|&o| a[o]).sum::<f64>() / perms.len() as f64
        })
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn random_paired4(rng: &mut impl Rng, elasticity: bool) -> PairedTensor4 {
    PairedTensor4::new(pair_average(&raw(rng, 4), 2, elasticity), elasticity).expect("averaged entries are paired")
}

pub fn random_paired6(rng: &mut impl Rng, elasticity: bool) -> PairedTensor6 {
    PairedTensor6::new(pair_average(&raw(rng, 6), 3, elasticity), elasticity).expect("averaged entries are paired")
}

/// Eigenvalues of a symmetric 3×3 matrix, ascending (trigonometric formula).
pub fn eig3(m: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    if p1 == 0.0 {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(f64::total_cmp);
        return d;
    }
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b: Vec<Vec<f64>> =
        (0..3).map(|i| (0..3).map(|j| (m[i][j] - if i == j { q } else { 0.0 }) / p).collect()).collect();
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [lo, 3.0 * q - hi - lo, hi]
}

/// Fibonacci points on the sphere.
pub fn sphere_points(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// min over y of the form at fixed x is the bottom eigenvalue of Σ a_ijkl x_i x_j.
pub fn min_over_y4(a: &[f64], x: &Vec3) -> f64 {
    let mut m = [[0.0; 3]; 3];
    for (k, row) in m.iter_mut().enumerate() {
        for (l, v) in row.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    *v += a[off(&[i, j, k, l])] * x[i] * x[j];
                }
            }
        }
    }
    eig3(m)[0]
}

/// An upper bound on min 𝒜x²y² over the spheres (exact in y, sampled in x).
pub fn sampled_min4(a: &[f64], n: usize) -> f64 {
    sphere_points(n).iter().map(|x| min_over_y4(a, x)).fold(f64::INFINITY, f64::min)
}

pub fn sampled_min6(a: &[f64], n: usize) -> f64 {
    let pts = sphere_points(n);
    let mut best = f64::INFINITY;
    for x in &pts {
        for y in &pts {
            let mut m = [[0.0; 3]; 3];
            for (p, row) in m.iter_mut().enumerate() {
                for (q, v) in row.iter_mut().enumerate() {
                    for i in 0..3 {
                        for j in 0..3 {
                            for k in 0..3 {
                                for l in 0..3 {
                                    *v += a[off(&[i, j, k, l, p, q])] * x[i] * x[j] * y[k] * y[l];
                                }
                            }
                        }
                    }
                }
            }
            best = best.min(eig3(m)[0]);
        }
    }
    best
}

pub fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
