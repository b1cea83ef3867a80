//! Dense primal-dual interior point method (HKM direction, Mehrotra predictor-corrector).
//!
//! γ is eliminated through the constraint with the largest |𝒲(G)| coefficient,
//! leaving min ⟨C, X⟩ s.t. ⟨Ã_i, X⟩ = b_i, X ⪰ 0, with dual
//! max bᵀy s.t. Σ y_i Ã_i + Z = C, Z ⪰ 0.

use crate::linalg::{cholesky, cholesky_solve, sym_eigen, SymMatrix};

use super::{SdpProblem, SdpSolution, SdpStatus};

/// Iterations without improvement before giving up.
const STALL: usize = 8;
const DIVERGED: f64 = 1e12;

/// Symmetric sparse matrix as a list of (row, col, value), both triangles present.
type Sparse = Vec<(usize, usize, f64)>;

struct Standard {
    n: usize,
    a: Vec<Sparse>,
    b: Vec<f64>,
    c: Sparse,
    pivot: usize,
}

fn full(entries: &[(usize, usize, f64)]) -> Sparse {
    let mut out = Vec::with_capacity(2 * entries.len());
    for &(p, q, mult) in entries {
        if p == q {
            out.push((p, p, mult));
        } else {
            out.push((p, q, mult / 2.0));
            out.push((q, p, mult / 2.0));
        }
    }
    out
}

fn standard_form(p: &SdpProblem) -> Standard {
    let g = &p.rhs_gamma;
    let pivot = (0..p.m).fold(0, |best, k| if g[k].abs() > g[best].abs() { k } else { best });
    let gp = g[pivot];
    let ap = full(&p.constraints[pivot]);
    let mut a = Vec::with_capacity(p.m - 1);
    let mut b = Vec::with_capacity(p.m - 1);
    for k in 0..p.m {
        if k == pivot {
            continue;
        }
        let mut row = full(&p.constraints[k]);
        let w = g[k] / gp;
        if w != 0.0 {
            row.extend(ap.iter().map(|&(i, j, v)| (i, j, -w * v)));
        }
        a.push(row);
        b.push(p.rhs_base[k] - w * p.rhs_base[pivot]);
    }
    let c = ap.iter().map(|&(i, j, v)| (i, j, v / gp)).collect();
    Standard { n: p.n, a, b, c, pivot }
}

fn apply(a: &Sparse, x: &[f64], n: usize) -> f64 {
    a.iter().map(|&(i, j, v)| v * x[i * n + j]).sum()
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let (row, brow) = (&mut c[i * n..(i + 1) * n], &b[k * n..(k + 1) * n]);
            for j in 0..n {
                row[j] += aik * brow[j];
            }
        }
    }
    c
}

fn sym(a: &[f64], n: usize) -> Vec<f64> {
    let mut s = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            s[i * n + j] = v;
            s[j * n + i] = v;
        }
    }
    s
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inverse_spd(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = a.to_vec();
    cholesky(&mut l, n).ok()?;
    let mut inv = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        cholesky_solve(&l, n, &mut col);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    Some(sym(&inv, n))
}

/// Largest α ≤ `cap` with X + αD ⪰ 0, from the spectrum of L⁻¹DL⁻ᵀ.
fn max_step(x: &[f64], d: &[f64], n: usize, cap: f64) -> Option<f64> {
    let mut l = x.to_vec();
    cholesky(&mut l, n).ok()?;
    // W = L⁻¹ D L⁻ᵀ via two triangular solves.
    let mut w = d.to_vec();
    for j in 0..n {
        for i in 0..n {
            let mut s = w[i * n + j];
            for k in 0..i {
                s -= l[i * n + k] * w[k * n + j];
            }
            w[i * n + j] = s / l[i * n + i];
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut s = w[i * n + j];
            for k in 0..j {
                s -= l[j * n + k] * w[i * n + k];
            }
            w[i * n + j] = s / l[j * n + j];
        }
    }
    let w = SymMatrix::from_lower_fn(n, |i, j| 0.5 * (w[i * n + j] + w[j * n + i]));
    let lmin = sym_eigen(&w).ok()?.lambda_min();
    Some(if lmin >= 0.0 { cap } else { (-1.0 / lmin).min(cap) })
}

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
}

/// Solves the HKM system for complementarity target `rc` (already including −X).
fn direction(s: &Standard, x: &[f64], zinv: &[f64], m_chol: &[f64], rp: &[f64], rd: &[f64], rc: &[f64]) -> Direction {
    let n = s.n;
    let xrz = matmul(&matmul(x, rd, n), zinv, n);
    let t: Vec<f64> = rc.iter().zip(&xrz).map(|(a, b)| a - b).collect();
    let mut dy: Vec<f64> = s.a.iter().zip(rp).map(|(a, r)| r - apply(a, &t, n)).collect();
    cholesky_solve(m_chol, s.a.len(), &mut dy);
    let mut dz = rd.to_vec();
    for (a, &y) in s.a.iter().zip(&dy) {
        for &(i, j, v) in a {
            dz[i * n + j] -= y * v;
        }
    }
    let xdz = matmul(&matmul(x, &dz, n), zinv, n);
    let dx: Vec<f64> = rc.iter().zip(&xdz).map(|(a, b)| a - b).collect();
    Direction { dx: sym(&dx, n), dy, dz }
}

/// Schur complement M_ij = Tr(Ã_i X Ã_j Z⁻¹).
fn schur(s: &Standard, x: &[f64], zinv: &[f64]) -> Vec<f64> {
    let n = s.n;
    let m = s.a.len();
    let mut out = vec![0.0; m * m];
    let mut w = vec![0.0; n * n];
    for i in 0..m {
        // W = Z⁻¹ Ã_i X, then M_ij = Σ_{(r,q,b) ∈ Ã_j} b W_{q r}.
        w.iter_mut().for_each(|v| *v = 0.0);
        for &(p, q, a) in &s.a[i] {
            for r in 0..n {
                let zr = a * zinv[r * n + p];
                if zr == 0.0 {
                    continue;
                }
                let (row, xrow) = (&mut w[r * n..(r + 1) * n], &x[q * n..(q + 1) * n]);
                for c in 0..n {
                    row[c] += zr * xrow[c];
                }
            }
        }
        for j in i..m {
            let v: f64 = s.a[j].iter().map(|&(r, q, b)| b * w[q * n + r]).sum();
            out[i * m + j] = v;
            out[j * m + i] = v;
        }
    }
    out
}

pub fn solve(p: &SdpProblem, tol: f64, max_iter: usize) -> SdpSolution {
    let s = standard_form(p);
    let (n, m) = (s.n, s.a.len());
    let norm_sparse = |a: &Sparse| a.iter().map(|t| t.2 * t.2).sum::<f64>().sqrt();
    let norm_b = s.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_c = norm_sparse(&s.c);
    let sqrt_n = (n as f64).sqrt();
    let xi = s
        .a
        .iter()
        .zip(&s.b)
        .map(|(a, b)| n as f64 * (1.0 + b.abs()) / (1.0 + norm_sparse(a)))
        .fold(10f64.max(sqrt_n), f64::max);
    let eta = s.a.iter().map(norm_sparse).fold(10f64.max(sqrt_n).max(norm_c), f64::max);
    let eye = |c: f64| {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            e[i * n + i] = c;
        }
        e
    };
    let mut x = eye(xi);
    let mut z = eye(eta);
    let mut y = vec![0.0; m];
    let mut cd = vec![0.0; n * n];
    for &(i, j, v) in &s.c {
        cd[i * n + j] += v;
    }

    let mut status = SdpStatus::MaxIter;
    let mut rd = vec![0.0; n * n];
    // Degenerate problems can lose primal feasibility to roundoff once μ is tiny,
    // so the best iterate seen is what gets returned, whatever the status.
    let mut best = (f64::INFINITY, x.clone(), 0.0, 0.0, 0usize);
    for it in 0..=max_iter {
        let rp: Vec<f64> = s.a.iter().zip(&s.b).map(|(a, b)| b - apply(a, &x, n)).collect();
        rd.copy_from_slice(&cd);
        for (a, &yi) in s.a.iter().zip(&y) {
            for &(i, j, v) in a {
                rd[i * n + j] -= yi * v;
            }
        }
        for k in 0..n * n {
            rd[k] -= z[k];
        }
        let pobj = inner(&cd, &x);
        let dobj: f64 = s.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let relp = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_b);
        let reld = rd.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_c);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let merit = relp.max(reld).max(gap);
        if merit < best.0 {
            best = (merit, x.clone(), rd.iter().fold(0.0f64, |a, v| a.max(v.abs())), gap, it);
        }
        if relp <= tol && reld <= tol && gap <= tol {
            status = SdpStatus::Optimal;
            break;
        }
        if it == max_iter || it >= best.4 + STALL {
            break;
        }
        let xtrace: f64 = (0..n).map(|i| x[i * n + i]).sum();
        if xtrace > DIVERGED || y.iter().any(|v| v.abs() > DIVERGED) {
            status = SdpStatus::InfeasibleDetected;
            break;
        }
        let mu = inner(&x, &z) / n as f64;
        let Some(zinv) = inverse_spd(&z, n) else {
            status = SdpStatus::InfeasibleDetected;
            break;
        };
        let base = schur(&s, &x, &zinv);
        let diag_max = (0..m).fold(1.0f64, |a, i| a.max(base[i * m + i]));
        let mut mchol = None;
        for shift in [0.0, 1e-14, 1e-12, 1e-10, 1e-8] {
            let mut f = base.clone();
            for i in 0..m {
                f[i * m + i] += shift * diag_max;
            }
            if cholesky(&mut f, m).is_ok() {
                mchol = Some(f);
                break;
            }
        }
        let Some(mchol) = mchol else {
            status = SdpStatus::InfeasibleDetected;
            break;
        };
        // Predictor: σ = 0.
        let rc_aff: Vec<f64> = x.iter().map(|v| -v).collect();
        let aff = direction(&s, &x, &zinv, &mchol, &rp, &rd, &rc_aff);
        let (Some(ap), Some(ad)) = (max_step(&x, &aff.dx, n, 1.0), max_step(&z, &aff.dz, n, 1.0)) else {
            status = SdpStatus::InfeasibleDetected;
            break;
        };
        let x_aff: Vec<f64> = x.iter().zip(&aff.dx).map(|(a, d)| a + ap * d).collect();
        let z_aff: Vec<f64> = z.iter().zip(&aff.dz).map(|(a, d)| a + ad * d).collect();
        let mu_aff = inner(&x_aff, &z_aff) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        // Corrector: σμZ⁻¹ − X − ΔX_aff ΔZ_aff Z⁻¹.
        let second = matmul(&matmul(&aff.dx, &aff.dz, n), &zinv, n);
        let rc: Vec<f64> = (0..n * n).map(|k| sigma * mu * zinv[k] - x[k] - second[k]).collect();
        let rc = sym(&rc, n);
        let d = direction(&s, &x, &zinv, &mchol, &rp, &rd, &rc);
        let frac = 0.9 + 0.09 * ap.min(ad);
        let (Some(sp), Some(sd)) = (max_step(&x, &d.dx, n, 1e30), max_step(&z, &d.dz, n, 1e30)) else {
            status = SdpStatus::InfeasibleDetected;
            break;
        };
        let sp = (frac * sp).min(1.0);
        let sd = (frac * sd).min(1.0);
        for k in 0..n * n {
            x[k] += sp * d.dx[k];
            z[k] += sd * d.dz[k];
        }
        x = sym(&x, n);
        z = sym(&z, n);
        for (yi, di) in y.iter_mut().zip(&d.dy) {
            *yi += sd * di;
        }
        if !x.iter().chain(&z).all(|v| v.is_finite()) {
            status = SdpStatus::InfeasibleDetected;
            break;
        }
    }
    let (_, x, dual_residual, gap, iterations) = best;
    let q = SymMatrix::from_lower_fn(n, |i, j| x[i * n + j]);
    let gamma = (p.rhs_base[s.pivot] - apply(&full(&p.constraints[s.pivot]), &x, n)) / p.rhs_gamma[s.pivot];
    SdpSolution {
        primal_residual: p.violation(&q, gamma),
        dual_residual,
        gap,
        gamma,
        q,
        iterations,
        status,
    }
}
