//! M-eigenvalues of paired and bi-block tensors, Z-eigenvalues of symmetric tensors.
//!
//! All vectors are Euclidean unit vectors, so every eigenvalue equals the form
//! value at its eigenvectors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::form::BlockPoly;
use crate::linalg::{sym_eigen, SymMatrix};
use crate::tensor::{norm, unflat_index, SymTensor, Tensor, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MEigenPair {
    pub lambda: f64,
    pub vectors: Vec<Vec3>,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Largest,
    Smallest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Power,
    Grid,
    Hybrid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub min_witness: Option<MEigenPair>,
    pub max_witness: Option<MEigenPair>,
    pub method: Method,
    pub resolution: Option<usize>,
    /// Grid extrema before local refinement.
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    /// Total sweeps over all blocks and starts.
    pub iterations: usize,
    /// Every witness reached the residual tolerance.
    pub converged: bool,
    /// |power − grid| for hybrid estimates.
    pub reconciliation_gap: Option<f64>,
}

impl SpectrumEstimate {
    fn empty(method: Method) -> Self {
        SpectrumEstimate {
            lambda_min: None,
            lambda_max: None,
            min_witness: None,
            max_witness: None,
            method,
            resolution: None,
            grid_min: None,
            grid_max: None,
            iterations: 0,
            converged: true,
            reconciliation_gap: None,
        }
    }

    pub fn pd(&self, tol: f64) -> bool {
        self.lambda_min.map_or(false, |l| l > tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerOptions {
    pub starts: usize,
    pub max_iter: usize,
    /// Residual target, scaled by max(1, ‖A‖_HS).
    pub tol: f64,
    /// Offsets the low-discrepancy start sequence.
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions { starts: 30, max_iter: 5000, tol: 1e-10, seed: 0 }
    }
}

pub const DEFAULT_RESOLUTION_2: usize = 64;
pub const DEFAULT_RESOLUTION_3: usize = 16;

fn default_resolution(p: &BlockPoly) -> usize {
    if p.blocks() >= 3 {
        DEFAULT_RESOLUTION_3
    } else {
        DEFAULT_RESOLUTION_2
    }
}

fn residual_of(p: &BlockPoly, v: &[Vec3], lambda: f64) -> f64 {
    (0..p.blocks())
        .map(|b| {
            let c = p.contract(v, b);
            (0..3).fold(0.0f64, |m, i| m.max((c[i] - lambda * v[b][i]).abs()))
        })
        .fold(0.0, f64::max)
}

/// max over blocks of ‖𝒜(…)_b − λ v_b‖∞; vectors must be unit within 1e−9.
pub fn poly_residual(p: &BlockPoly, pair: &MEigenPair) -> Result<f64> {
    if pair.vectors.len() != p.blocks() {
        return Err(Error::InvalidArgument(format!(
            "{} vectors for a form with {} blocks",
            pair.vectors.len(),
            p.blocks()
        )));
    }
    for v in &pair.vectors {
        let n = norm(v);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnit(n));
        }
    }
    Ok(residual_of(p, &pair.vectors, pair.lambda))
}

pub fn meig_residual<T: Tensor + ?Sized>(a: &T, pair: &MEigenPair) -> Result<f64> {
    poly_residual(&a.form_poly(), pair)
}

fn unit(v: Vec3) -> Option<Vec3> {
    let n = norm(&v);
    if n > 0.0 && n.is_finite() {
        Some([v[0] / n, v[1] / n, v[2] / n])
    } else {
        None
    }
}

/// Point on the sphere from the 2D additive recurrence with plastic-number steps.
fn low_discrepancy(k: u64, block: usize) -> Vec3 {
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_3;
    let n = (k + 1) as f64 + 0.381_966_011_250_105_1 * block as f64 * 17.0;
    let u = (0.5 + A1 * n).fract();
    let w = (0.5 + A2 * n).fract();
    let z = 1.0 - 2.0 * u;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = 2.0 * std::f64::consts::PI * w;
    [r * phi.cos(), r * phi.sin(), z]
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    /// v_b ← normalize(𝒜(…)_b + τ v_b).
    Shifted,
    /// Degree-2 blocks jump to the top eigenvector of their 3×3 matrix.
    Exact,
}

struct Ascent {
    v: Vec<Vec3>,
    value: f64,
    residual: f64,
    sweeps: usize,
    converged: bool,
}

/// Monotone block ascent of the form from `start`.
fn ascend(p: &BlockPoly, start: Vec<Vec3>, step: Step, max_sweeps: usize, tol: f64) -> Ascent {
    let scale = p.hs_norm().max(1.0);
    let mut tau: Vec<f64> = p.degrees().iter().map(|&d| 1.0 + (d as f64 - 1.0) * p.hs_norm()).collect();
    let mut v = start;
    let mut value = p.value(&v);
    let mut residual = residual_of(p, &v, value);
    let mut sweeps = 0;
    while residual > tol && sweeps < max_sweeps {
        sweeps += 1;
        for b in 0..p.blocks() {
            if step == Step::Exact && p.degrees()[b] == 2 {
                let s = p.quadratic_in(&v, b);
                let m = SymMatrix::from_lower_fn(3, |i, j| 0.5 * (s[i][j] + s[j][i]));
                let e = sym_eigen(&m).expect("finite block matrix");
                let q = e.vectors.last().unwrap();
                let mut w = v.clone();
                w[b] = [q[0], q[1], q[2]];
                let nv = p.value(&w);
                // The eigenvector maximizes this block exactly; near convergence the
                // gain is below rounding, so only a real decrease is refused.
                if nv >= value - 1e-13 * scale {
                    v = w;
                    value = nv;
                }
                continue;
            }
            loop {
                let c = p.contract(&v, b);
                let cand = unit([c[0] + tau[b] * v[b][0], c[1] + tau[b] * v[b][1], c[2] + tau[b] * v[b][2]]);
                let Some(cand) = cand else { break };
                let mut w = v.clone();
                w[b] = cand;
                let nv = p.value(&w);
                if nv >= value - 1e-15 * scale {
                    v = w;
                    value = nv;
                    break;
                }
                tau[b] *= 2.0;
                if tau[b] > 1e12 * scale {
                    break;
                }
            }
        }
        residual = residual_of(p, &v, value);
    }
    Ascent { converged: residual <= tol, v, value, residual, sweeps }
}

fn trivial_pair(p: &BlockPoly) -> MEigenPair {
    MEigenPair { lambda: 0.0, vectors: vec![[1.0, 0.0, 0.0]; p.blocks()], residual: 0.0 }
}

/// Multi-start search for the largest stationary value of `p`.
fn power_max(p: &BlockPoly, opts: &PowerOptions) -> (MEigenPair, usize, bool) {
    if p.is_zero() {
        return (trivial_pair(p), 0, true);
    }
    let tol = opts.tol * p.hs_norm().max(1.0);
    let mut best: Option<Ascent> = None;
    let mut sweeps = 0;
    for k in 0..opts.starts.max(1) {
        let start: Vec<Vec3> = (0..p.blocks()).map(|b| low_discrepancy(k as u64 + opts.seed * 7919, b)).collect();
        // Cheap shifted phase, then exact block steps to reach the tolerance.
        let a = ascend(p, start, Step::Shifted, opts.max_iter, tol.max(1e-6 * p.hs_norm().max(1.0)));
        let mut rest = opts.max_iter.saturating_sub(a.sweeps);
        sweeps += a.sweeps;
        let a = if a.residual > tol {
            rest = rest.max(1);
            let r = ascend(p, a.v, Step::Exact, rest, tol);
            sweeps += r.sweeps;
            r
        } else {
            a
        };
        if best.as_ref().map_or(true, |b| a.value > b.value) {
            best = Some(a);
        }
    }
    let b = best.unwrap();
    (MEigenPair { lambda: b.value, vectors: b.v, residual: b.residual }, sweeps, b.converged)
}

fn negate_pair(mut pair: MEigenPair) -> MEigenPair {
    pair.lambda = -pair.lambda;
    pair
}

pub fn power_extremal_poly(p: &BlockPoly, which: Which, opts: &PowerOptions) -> SpectrumEstimate {
    let mut est = SpectrumEstimate::empty(Method::Power);
    match which {
        Which::Largest => {
            let (pair, it, conv) = power_max(p, opts);
            est.lambda_max = Some(pair.lambda);
            est.max_witness = Some(pair);
            est.iterations = it;
            est.converged = conv;
        }
        Which::Smallest => {
            let (pair, it, conv) = power_max(&p.negated(), opts);
            let pair = negate_pair(pair);
            est.lambda_min = Some(pair.lambda);
            est.min_witness = Some(pair);
            est.iterations = it;
            est.converged = conv;
        }
    }
    est
}

/// Multi-start shifted alternating power iteration; smallest(A) = −largest(−A).
pub fn power_extremal<T: Tensor + ?Sized>(a: &T, which: Which, opts: &PowerOptions) -> Result<SpectrumEstimate> {
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("starts must be at least 1".into()));
    }
    Ok(power_extremal_poly(&a.form_poly(), which, opts))
}

/// θ_i = πi/res, φ_j = 2πj/res.
pub fn sphere_grid(res: usize) -> Vec<Vec3> {
    let mut pts = Vec::with_capacity(res * res);
    for i in 0..res {
        let theta = std::f64::consts::PI * i as f64 / res as f64;
        for j in 0..res {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / res as f64;
            pts.push([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
        }
    }
    pts
}

struct GridScan {
    min: f64,
    max: f64,
    argmin: Vec<Vec3>,
    argmax: Vec<Vec3>,
}

fn grid_scan(p: &BlockPoly, res: usize) -> GridScan {
    let pts = sphere_grid(res);
    let k = p.blocks();
    let last: Vec<Vec<f64>> = pts.iter().map(|x| p.last_mono_values(x)).collect();
    let mut scan = GridScan {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: vec![pts[0]; k],
        argmax: vec![pts[0]; k],
    };
    let combos = pts.len().pow((k - 1) as u32);
    let mut ids = vec![0; k - 1];
    for c in 0..combos {
        let mut rest = c;
        for slot in ids.iter_mut().rev() {
            *slot = rest % pts.len();
            rest /= pts.len();
        }
        let fixed: Vec<Vec3> = ids.iter().map(|&i| pts[i]).collect();
        let coef = p.last_block_coeffs(&fixed);
        for (j, mv) in last.iter().enumerate() {
            let f: f64 = coef.iter().zip(mv).map(|(a, b)| a * b).sum();
            if f < scan.min {
                scan.min = f;
                scan.argmin = fixed.iter().copied().chain([pts[j]]).collect();
            }
            if f > scan.max {
                scan.max = f;
                scan.argmax = fixed.iter().copied().chain([pts[j]]).collect();
            }
        }
    }
    scan
}

pub fn grid_oracle_poly(p: &BlockPoly, resolution: usize, refine_iters: usize) -> Result<SpectrumEstimate> {
    if resolution < 8 {
        return Err(Error::InvalidArgument(format!("grid resolution {resolution} < 8")));
    }
    let mut est = SpectrumEstimate::empty(Method::Grid);
    est.resolution = Some(resolution);
    if p.is_zero() {
        est.lambda_min = Some(0.0);
        est.lambda_max = Some(0.0);
        est.grid_min = Some(0.0);
        est.grid_max = Some(0.0);
        est.min_witness = Some(trivial_pair(p));
        est.max_witness = Some(trivial_pair(p));
        return Ok(est);
    }
    let scan = grid_scan(p, resolution);
    let tol = 1e-12 * p.hs_norm().max(1.0);
    let hi = ascend(p, scan.argmax, Step::Exact, refine_iters, tol);
    let lo = ascend(&p.negated(), scan.argmin, Step::Exact, refine_iters, tol);
    est.grid_min = Some(scan.min);
    est.grid_max = Some(scan.max);
    est.lambda_max = Some(hi.value.max(scan.max));
    est.lambda_min = Some((-lo.value).min(scan.min));
    est.iterations = hi.sweeps + lo.sweeps;
    est.converged = hi.converged && lo.converged;
    est.max_witness = Some(MEigenPair { lambda: hi.value, vectors: hi.v, residual: hi.residual });
    est.min_witness = Some(MEigenPair { lambda: -lo.value, vectors: lo.v, residual: lo.residual });
    Ok(est)
}

/// Brute-force evaluation over products of (θ, φ) sphere grids, then local refinement.
pub fn grid_oracle<T: Tensor + ?Sized>(a: &T, resolution: usize, refine_iters: usize) -> Result<SpectrumEstimate> {
    grid_oracle_poly(&a.form_poly(), resolution, refine_iters)
}

/// Multi-start power combined with the grid oracle; the better witness is polished.
pub fn extremal_hybrid_poly(p: &BlockPoly, which: Which, opts: &PowerOptions, resolution: usize) -> Result<SpectrumEstimate> {
    let power = power_extremal_poly(p, which, opts);
    let grid = grid_oracle_poly(p, resolution, 500)?;
    let mut est = SpectrumEstimate::empty(Method::Hybrid);
    est.resolution = Some(resolution);
    est.grid_min = grid.grid_min;
    est.grid_max = grid.grid_max;
    est.iterations = power.iterations + grid.iterations;
    let tol = opts.tol * p.hs_norm().max(1.0);
    let (pw, gw) = match which {
        Which::Largest => (power.max_witness.unwrap(), grid.max_witness.unwrap()),
        Which::Smallest => (power.min_witness.unwrap(), grid.min_witness.unwrap()),
    };
    let sign = if which == Which::Largest { 1.0 } else { -1.0 };
    est.reconciliation_gap = Some((pw.lambda - gw.lambda).abs());
    let best = if sign * gw.lambda > sign * pw.lambda { gw } else { pw };
    let best = if best.residual > tol {
        let q = if which == Which::Largest { p.clone() } else { p.negated() };
        let a = ascend(&q, best.vectors.clone(), Step::Exact, opts.max_iter, tol);
        est.iterations += a.sweeps;
        // Ascent is monotone, so the polished point is never worse.
        MEigenPair { lambda: sign * a.value, vectors: a.v, residual: a.residual }
    } else {
        best
    };
    est.converged = best.residual <= tol;
    match which {
        Which::Largest => {
            est.lambda_max = Some(best.lambda);
            est.max_witness = Some(best);
        }
        Which::Smallest => {
            est.lambda_min = Some(best.lambda);
            est.min_witness = Some(best);
        }
    }
    Ok(est)
}

/// Hybrid estimate of the smallest M-eigenvalue; positive iff the form is positive definite.
pub fn smallest_meig<T: Tensor + ?Sized>(a: &T) -> SpectrumEstimate {
    let p = a.form_poly();
    extremal_hybrid_poly(&p, Which::Smallest, &PowerOptions::default(), default_resolution(&p)).expect("default resolution is valid")
}

pub fn largest_meig<T: Tensor + ?Sized>(a: &T) -> SpectrumEstimate {
    let p = a.form_poly();
    extremal_hybrid_poly(&p, Which::Largest, &PowerOptions::default(), default_resolution(&p)).expect("default resolution is valid")
}

pub fn smallest_meig_with<T: Tensor + ?Sized>(a: &T, opts: &PowerOptions, resolution: usize) -> Result<SpectrumEstimate> {
    extremal_hybrid_poly(&a.form_poly(), Which::Smallest, opts, resolution)
}

pub fn largest_meig_with<T: Tensor + ?Sized>(a: &T, opts: &PowerOptions, resolution: usize) -> Result<SpectrumEstimate> {
    extremal_hybrid_poly(&a.form_poly(), Which::Largest, opts, resolution)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankOne {
    pub lambda: f64,
    pub vectors: Vec<Vec3>,
    /// ‖𝒜 − λ x^t y^{…}‖_HS computed entrywise.
    pub approx_error: f64,
}

/// Entry of the rank-one tensor λ ⊗ v_b^{d_b} at a flat offset.
pub fn rank_one_entry(degrees: &[usize], vectors: &[Vec3], idx: &[usize]) -> f64 {
    let mut s = 1.0;
    let mut pos = 0;
    for (b, &d) in degrees.iter().enumerate() {
        for &i in &idx[pos..pos + d] {
            s *= vectors[b][i];
        }
        pos += d;
    }
    s
}

/// Largest-magnitude M-eigenvalue with its rank-one approximation error.
pub fn best_rank_one<T: Tensor + ?Sized>(a: &T) -> RankOne {
    let res = default_resolution(&a.form_poly());
    best_rank_one_with(a, &PowerOptions::default(), res).expect("default resolution is valid")
}

pub fn best_rank_one_with<T: Tensor + ?Sized>(a: &T, opts: &PowerOptions, resolution: usize) -> Result<RankOne> {
    let hi = largest_meig_with(a, opts, resolution)?;
    let lo = smallest_meig_with(a, opts, resolution)?;
    let (lambda, vectors) = if hi.lambda_max.unwrap().abs() >= lo.lambda_min.unwrap().abs() {
        (hi.lambda_max.unwrap(), hi.max_witness.unwrap().vectors)
    } else {
        (lo.lambda_min.unwrap(), lo.min_witness.unwrap().vectors)
    };
    let p = a.form_poly();
    let degrees = p.degrees().to_vec();
    let mut idx = vec![0; a.order()];
    let mut err = 0.0;
    for (off, &v) in a.entries().iter().enumerate() {
        unflat_index(off, &mut idx);
        let r = v - lambda * rank_one_entry(&degrees, &vectors, &idx);
        err += r * r;
    }
    Ok(RankOne { lambda, vectors, approx_error: err.sqrt() })
}

/// ‖𝒮x^{m−1} − λx‖∞ for a symmetric tensor.
pub fn z_residual(s: &SymTensor, lambda: f64, x: &Vec3) -> f64 {
    let m = s.order();
    let mut v = [0.0; 3];
    let mut idx = vec![0; m];
    for (off, &a) in s.entries().iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        unflat_index(off, &mut idx);
        v[idx[0]] += a * idx[1..].iter().map(|&i| x[i]).product::<f64>();
    }
    (0..3).fold(0.0f64, |r, i| r.max((v[i] - lambda * x[i]).abs()))
}

/// Hybrid extremal Z-eigenvalue: symmetric shifted power iteration plus the grid oracle.
pub fn z_eigen_extremal(s: &SymTensor, which: Which, opts: &PowerOptions) -> Result<SpectrumEstimate> {
    if s.order() != 4 && s.order() != 6 {
        return Err(Error::InvalidArgument(format!("symmetric order {} not in {{4, 6}}", s.order())));
    }
    extremal_hybrid_poly(&s.form_poly(), which, opts, DEFAULT_RESOLUTION_2)
}
