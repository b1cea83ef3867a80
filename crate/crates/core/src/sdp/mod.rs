//! Sequential SDP relaxations for the smallest M-eigenvalue of a 4th order tensor.
//!
//! Order (r, s) asks for the largest γ such that
//! (Σx²)^r (Σy²)^s (𝒜x²y² − γ|x|²|y|²) is a sum of squares of bi-forms of
//! bidegree (r+1, s+1), i.e. 𝒱(Q) = 𝒲(F_{r,s}) − γ𝒲(G) with Q ⪰ 0. Every
//! feasible γ is a lower bound on min 𝒜x²y² over the unit spheres.

mod solver;

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::form::monomials3;
use crate::linalg::SymMatrix;
use crate::meigen::{grid_oracle, MEigenPair};
use crate::poly::{form4_poly, PolyForm};
use crate::tensor::PairedTensor4;
use crate::verdict::Verdict;

pub use solver::solve;

type Exp6 = [u8; 6];

fn join(a: [u8; 3], b: [u8; 3]) -> Exp6 {
    [a[0], a[1], a[2], b[0], b[1], b[2]]
}

/// v: monomials x^α y^β with |α| = r+1, |β| = s+1; u: |α| = 2(r+1), |β| = 2(s+1).
/// Both ordered descending lexicographically in α, then in β.
#[derive(Clone, Debug, Serialize)]
pub struct MonomialBasis {
    pub r: usize,
    pub s: usize,
    pub v_list: Vec<Exp6>,
    pub u_list: Vec<Exp6>,
    #[serde(skip)]
    u_index: HashMap<Exp6, usize>,
}

impl MonomialBasis {
    pub fn d_v(&self) -> usize {
        self.v_list.len()
    }

    pub fn d_u(&self) -> usize {
        self.u_list.len()
    }

    pub fn u_position(&self, e: &[u8]) -> Option<usize> {
        let key: Exp6 = e.try_into().ok()?;
        self.u_index.get(&key).copied()
    }
}

fn bilist(dx: usize, dy: usize) -> Vec<Exp6> {
    let ys = monomials3(dy);
    monomials3(dx).into_iter().flat_map(|a| ys.iter().map(move |&b| join(a, b))).collect()
}

pub fn build_basis(r: usize, s: usize) -> MonomialBasis {
    let v_list = bilist(r + 1, s + 1);
    let u_list = bilist(2 * (r + 1), 2 * (s + 1));
    let u_index = u_list.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    MonomialBasis { r, s, v_list, u_list, u_index }
}

/// Coefficients of P over the u-basis.
pub fn op_w(p: &PolyForm, basis: &MonomialBasis) -> Result<Vec<f64>> {
    if p.nvars() != 6 {
        return Err(Error::InvalidArgument(format!("{} variables, expected 6", p.nvars())));
    }
    let mut out = vec![0.0; basis.d_u()];
    for (e, c) in p.terms() {
        let k = basis.u_position(e).ok_or_else(|| Error::OutsideBasis(e.clone()))?;
        out[k] += c;
    }
    Ok(out)
}

/// Coefficients of vᵀHv over the u-basis.
pub fn op_v(h: &SymMatrix, basis: &MonomialBasis) -> Result<Vec<f64>> {
    let n = basis.d_v();
    if h.n() != n {
        return Err(Error::Dimension { expected: n, got: h.n() });
    }
    let mut out = vec![0.0; basis.d_u()];
    for p in 0..n {
        for q in p..n {
            let k = product_index(basis, p, q);
            out[k] += if p == q { h.get(p, p) } else { 2.0 * h.get(p, q) };
        }
    }
    Ok(out)
}

/// 𝒱*(c): the matrix with entry (p, q) equal to c at the u-monomial v_p v_q,
/// so that ⟨𝒱(H), c⟩ = ⟨H, 𝒱*(c)⟩.
pub fn op_v_adjoint(c: &[f64], basis: &MonomialBasis) -> SymMatrix {
    SymMatrix::from_lower_fn(basis.d_v(), |p, q| c[product_index(basis, p, q)])
}

fn product_index(basis: &MonomialBasis, p: usize, q: usize) -> usize {
    let (a, b) = (basis.v_list[p], basis.v_list[q]);
    let e: Exp6 = std::array::from_fn(|i| a[i] + b[i]);
    basis.u_index[&e]
}

#[derive(Clone, Debug, Serialize)]
pub struct SdpProblem {
    pub basis: MonomialBasis,
    pub n: usize,
    pub m: usize,
    /// For each u-monomial: (row, col, multiplicity) with row ≤ col.
    pub constraints: Vec<Vec<(usize, usize, f64)>>,
    pub rhs_base: Vec<f64>,
    pub rhs_gamma: Vec<f64>,
}

impl SdpProblem {
    /// max-norm of 𝒱(Q) − 𝒲(F) + γ𝒲(G).
    pub fn violation(&self, q: &SymMatrix, gamma: f64) -> f64 {
        let v = op_v(q, &self.basis).expect("Q sized to the basis");
        v.iter()
            .zip(&self.rhs_base)
            .zip(&self.rhs_gamma)
            .fold(0.0f64, |m, ((v, f), g)| m.max((v - f + gamma * g).abs()))
    }
}

fn sphere_power(k: usize, offset: usize) -> PolyForm {
    let mut s = PolyForm::zero(6);
    for i in 0..3 {
        let mut e = vec![0u8; 6];
        e[offset + i] = 2;
        s = s.add(&PolyForm::from_terms(6, [(e, 1.0)]));
    }
    let mut p = PolyForm::from_terms(6, [(vec![0u8; 6], 1.0)]);
    for _ in 0..k {
        p = p.mul(&s);
    }
    p
}

/// F_{r,s} = (Σx²)^r (Σy²)^s 𝒜x²y².
pub fn f_rs(a: &PairedTensor4, r: usize, s: usize) -> PolyForm {
    sphere_power(r, 0).mul(&sphere_power(s, 3)).mul(&form4_poly(a))
}

pub fn assemble(a: &PairedTensor4, r: usize, s: usize) -> SdpProblem {
    let basis = build_basis(r, s);
    let (n, m) = (basis.d_v(), basis.d_u());
    let mut constraints = vec![Vec::new(); m];
    for p in 0..n {
        for q in p..n {
            constraints[product_index(&basis, p, q)].push((p, q, if p == q { 1.0 } else { 2.0 }));
        }
    }
    let g = sphere_power(r + 1, 0).mul(&sphere_power(s + 1, 3));
    let rhs_base = op_w(&f_rs(a, r, s), &basis).expect("F lies in the u-basis");
    let rhs_gamma = op_w(&g, &basis).expect("G lies in the u-basis");
    SdpProblem { basis, n, m, constraints, rhs_base, rhs_gamma }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    InfeasibleDetected,
}

#[derive(Clone, Debug, Serialize)]
pub struct SdpSolution {
    pub gamma: f64,
    #[serde(skip)]
    pub q: SymMatrix,
    /// max-norm of the coefficient-matching residual.
    pub primal_residual: f64,
    /// max-norm of the dual slack residual.
    pub dual_residual: f64,
    /// Relative duality gap.
    pub gap: f64,
    pub iterations: usize,
    pub status: SdpStatus,
}

/// Relaxation orders in schedule order.
pub const SCHEDULE: [(usize, usize); 7] = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)];

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Clone, Debug, Serialize)]
pub struct HierarchyRow {
    pub r: usize,
    pub s: usize,
    pub d_v: usize,
    pub d_u: usize,
    pub gamma: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub status: SdpStatus,
    /// Seconds; kept out of machine-readable output.
    #[serde(skip)]
    pub cpu_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HierarchyResult {
    pub rows: Vec<HierarchyRow>,
    /// Largest bound among rows that converged.
    pub best_gamma: Option<f64>,
    pub verdict: Verdict,
    /// Point with a negative form value when the verdict is not-PD.
    pub negative_witness: Option<MEigenPair>,
}

pub fn solve_order(a: &PairedTensor4, r: usize, s: usize) -> (HierarchyRow, SdpSolution) {
    let t0 = Instant::now();
    let p = assemble(a, r, s);
    let sol = solve(&p, DEFAULT_TOL, DEFAULT_MAX_ITER);
    let row = HierarchyRow {
        r,
        s,
        d_v: p.n,
        d_u: p.m,
        gamma: sol.gamma,
        iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        status: sol.status,
        cpu_seconds: t0.elapsed().as_secs_f64(),
    };
    (row, sol)
}

/// Solves the given orders; PD iff the best bound exceeds `tol`, not-PD iff
/// the grid finds a form value below −tol.
pub fn hierarchy_orders(a: &PairedTensor4, orders: &[(usize, usize)], tol: f64) -> Result<HierarchyResult> {
    let rows: Vec<HierarchyRow> = orders.iter().map(|&(r, s)| solve_order(a, r, s).0).collect();
    let best_gamma = rows
        .iter()
        .filter(|r| r.status == SdpStatus::Optimal)
        .map(|r| r.gamma)
        .reduce(f64::max);
    let mut negative_witness = None;
    let verdict = if best_gamma.is_some_and(|g| g > tol) {
        Verdict::Pd
    } else {
        let g = grid_oracle(a, 64, 200)?;
        if g.lambda_min.unwrap() < -tol {
            negative_witness = g.min_witness;
            Verdict::NotPd
        } else {
            Verdict::Undetermined
        }
    };
    Ok(HierarchyResult { rows, best_gamma, verdict, negative_witness })
}

/// Runs the schedule up to total order `max_total_order` (default 2 stops at (1, 1)).
pub fn hierarchy(a: &PairedTensor4, max_total_order: usize, tol: f64) -> Result<HierarchyResult> {
    let orders: Vec<(usize, usize)> = SCHEDULE.iter().copied().filter(|(r, s)| r + s <= max_total_order).collect();
    hierarchy_orders(a, &orders, tol)
}
