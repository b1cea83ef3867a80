//! Sparse homogeneous polynomials in 3 or 6 real variables.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::tensor::{unflat_index, BiBlockTensor, PairedTensor4, SymTensor};

/// Exponent vector → coefficient, with exact zeros never stored.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyForm {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, f64>,
}

impl PolyForm {
    pub fn zero(nvars: usize) -> Self {
        PolyForm { nvars, terms: BTreeMap::new() }
    }

    pub fn monomial(exps: &[u8], coef: f64) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps.to_vec(), coef);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u8>, f64)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u8>, c: f64) {
        if c == 0.0 {
            return;
        }
        let v = self.coeff(&e) + c;
        if v == 0.0 {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u8]) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    /// Total degree when homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|e| e.iter().map(|&v| v as usize).sum::<usize>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    /// Homogeneous of degree `d` (the zero form counts).
    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|e| e.iter().map(|&v| v as usize).sum::<usize>() == d)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), *c);
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c * s)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut p = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }
}

pub fn poly_mul(p: &PolyForm, q: &PolyForm) -> PolyForm {
    p.mul(q)
}

pub fn poly_sub(p: &PolyForm, q: &PolyForm) -> PolyForm {
    p.sub(q)
}

/// Cofactor expansion along the first row.
pub fn det3_polymatrix(m: &[[PolyForm; 3]; 3]) -> PolyForm {
    let minor = |a: usize, b: usize| m[1][a].mul(&m[2][b]).sub(&m[1][b].mul(&m[2][a]));
    m[0][0]
        .mul(&minor(1, 2))
        .sub(&m[0][1].mul(&minor(0, 2)))
        .add(&m[0][2].mul(&minor(0, 1)))
}

/// vᵀMv in variables `offset..offset+3` of an `nvars`-variable ring.
pub fn quad_poly(m: &SymMatrix, nvars: usize, offset: usize) -> PolyForm {
    let mut p = PolyForm::zero(nvars);
    for k in 0..3 {
        for l in 0..3 {
            let mut e = vec![0u8; nvars];
            e[offset + k] += 1;
            e[offset + l] += 1;
            p.add_term(e, m.get(k, l));
        }
    }
    p
}

/// yᵀ M_ij y for a 3×3 family of blocks.
pub fn quad_poly_of_block(blocks: &[Vec<SymMatrix>], i: usize, j: usize) -> PolyForm {
    quad_poly(&blocks[i][j], 3, 0)
}

/// Σ a_klpq u_k u_l v_p v_q as a polynomial in the 6 variables (u, v).
pub fn form4_poly(t: &PairedTensor4) -> PolyForm {
    let mut p = PolyForm::zero(6);
    for k in 0..3 {
        for l in 0..3 {
            for q in 0..3 {
                for r in 0..3 {
                    let mut e = vec![0u8; 6];
                    e[k] += 1;
                    e[l] += 1;
                    e[3 + q] += 1;
                    e[3 + r] += 1;
                    p.add_term(e, t.get(k, l, q, r));
                }
            }
        }
    }
    p
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(|k| k as f64).product()
}

/// The unique symmetric tensor 𝒯 with 𝒯y^m = P(y).
pub fn symmetrize_to_tensor(p: &PolyForm, m: usize) -> Result<SymTensor> {
    if p.nvars() != 3 || !p.is_homogeneous_of(m) {
        return Err(Error::Degree(m));
    }
    let len = 3usize.pow(m as u32);
    let mut a = vec![0.0; len];
    let mut idx = vec![0; m];
    let mf = factorial(m as u8);
    for (off, v) in a.iter_mut().enumerate() {
        unflat_index(off, &mut idx);
        let mut e = vec![0u8; 3];
        for &i in &idx {
            e[i] += 1;
        }
        let c = p.coeff(&e);
        if c != 0.0 {
            *v = c * e.iter().map(|&k| factorial(k)).product::<f64>() / mf;
        }
    }
    SymTensor::symmetrized(m, &a)
}

/// The bi-block tensor of order dy+dz, split dy, whose form in (y, z) is P.
pub fn symmetrize_to_biblock(p: &PolyForm, dy: usize, dz: usize) -> Result<BiBlockTensor> {
    let ok = p.nvars() == 6
        && p.terms().all(|(e, _)| {
            e[..3].iter().map(|&v| v as usize).sum::<usize>() == dy && e[3..].iter().map(|&v| v as usize).sum::<usize>() == dz
        });
    if !ok {
        return Err(Error::Degree(dy + dz));
    }
    let order = dy + dz;
    let mut a = vec![0.0; 3usize.pow(order as u32)];
    let mut idx = vec![0; order];
    let denom = factorial(dy as u8) * factorial(dz as u8);
    for (off, v) in a.iter_mut().enumerate() {
        unflat_index(off, &mut idx);
        let mut e = vec![0u8; 6];
        for (pos, &i) in idx.iter().enumerate() {
            e[if pos < dy { i } else { 3 + i }] += 1;
        }
        let c = p.coeff(&e);
        if c != 0.0 {
            *v = c * e.iter().map(|&k| factorial(k)).product::<f64>() / denom;
        }
    }
    BiBlockTensor::symmetrized(order, dy, &a)
}
