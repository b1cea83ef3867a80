//! Multi-block polynomial view of a tensor form, used by the eigen-solvers.
//!
//! A form with block degrees (d₁, …, d_k) is stored as Σ c · Π_b v_b^{α_b},
//! with one monomial list per block.

use crate::tensor::{unflat_index, Vec3};

/// Exponent vectors of degree `d` in 3 variables, descending lexicographic.
pub fn monomials3(d: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a as u8, b as u8, (d - a - b) as u8]);
        }
    }
    out
}

/// Position of `e` within [`monomials3`] of its degree.
pub fn monomial_index(e: [u8; 3]) -> usize {
    let d = (e[0] + e[1] + e[2]) as usize;
    let r = d - e[0] as usize;
    r * (r + 1) / 2 + (r - e[1] as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockPoly {
    degrees: Vec<usize>,
    monos: Vec<Vec<[u8; 3]>>,
    /// (monomial index per block, coefficient).
    terms: Vec<(Vec<usize>, f64)>,
    hs_norm: f64,
}

fn powers(v: &Vec3, d: usize) -> [[f64; 13]; 3] {
    let mut p = [[0.0; 13]; 3];
    for i in 0..3 {
        p[i][0] = 1.0;
        for k in 1..=d {
            p[i][k] = p[i][k - 1] * v[i];
        }
    }
    p
}

fn mono_value(p: &[[f64; 13]; 3], e: [u8; 3]) -> f64 {
    p[0][e[0] as usize] * p[1][e[1] as usize] * p[2][e[2] as usize]
}

impl BlockPoly {
    /// Collects a dense tensor whose consecutive index blocks have sizes `degrees`.
    pub fn from_dense(a: &[f64], degrees: &[usize]) -> Self {
        let order: usize = degrees.iter().sum();
        assert_eq!(a.len(), 3usize.pow(order as u32));
        let monos: Vec<Vec<[u8; 3]>> = degrees.iter().map(|&d| monomials3(d)).collect();
        let sizes: Vec<usize> = monos.iter().map(|m| m.len()).collect();
        let total: usize = sizes.iter().product();
        let mut coef = vec![0.0; total];
        let mut idx = vec![0; order];
        for (off, &v) in a.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            unflat_index(off, &mut idx);
            let mut pos = 0;
            let mut start = 0;
            for (b, &d) in degrees.iter().enumerate() {
                let mut e = [0u8; 3];
                for &i in &idx[start..start + d] {
                    e[i] += 1;
                }
                start += d;
                pos = pos * sizes[b] + monomial_index(e);
            }
            coef[pos] += v;
        }
        let terms = coef
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(mut pos, &c)| {
                let mut ids = vec![0; degrees.len()];
                for b in (0..degrees.len()).rev() {
                    ids[b] = pos % sizes[b];
                    pos /= sizes[b];
                }
                (ids, c)
            })
            .collect();
        let hs_norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        BlockPoly { degrees: degrees.to_vec(), monos, terms, hs_norm }
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn blocks(&self) -> usize {
        self.degrees.len()
    }

    /// Hilbert-Schmidt norm of the tensor this form came from.
    pub fn hs_norm(&self) -> f64 {
        self.hs_norm
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        for t in &mut p.terms {
            t.1 = -t.1;
        }
        p
    }

    fn mono_values(&self, v: &[Vec3]) -> Vec<Vec<f64>> {
        self.degrees
            .iter()
            .enumerate()
            .map(|(b, &d)| {
                let p = powers(&v[b], d);
                self.monos[b].iter().map(|&e| mono_value(&p, e)).collect()
            })
            .collect()
    }

    pub fn value(&self, v: &[Vec3]) -> f64 {
        let mv = self.mono_values(v);
        self.terms
            .iter()
            .map(|(ids, c)| c * ids.iter().enumerate().map(|(b, &m)| mv[b][m]).product::<f64>())
            .sum()
    }

    /// (1/d_b)·∇_{v_b} of the form, so that ⟨v_b, contract⟩ equals the value.
    pub fn contract(&self, v: &[Vec3], block: usize) -> Vec3 {
        let mv = self.mono_values(v);
        let d = self.degrees[block];
        let p = powers(&v[block], d);
        let grads: Vec<Vec3> = self.monos[block]
            .iter()
            .map(|&e| {
                let mut g = [0.0; 3];
                for i in 0..3 {
                    if e[i] > 0 {
                        let mut f = e;
                        f[i] -= 1;
                        g[i] = e[i] as f64 * mono_value(&p, f);
                    }
                }
                g
            })
            .collect();
        let mut out = [0.0; 3];
        for (ids, c) in &self.terms {
            let mut w = *c;
            for (b, &m) in ids.iter().enumerate() {
                if b != block {
                    w *= mv[b][m];
                }
            }
            let g = &grads[ids[block]];
            for i in 0..3 {
                out[i] += w * g[i];
            }
        }
        let s = 1.0 / d as f64;
        [out[0] * s, out[1] * s, out[2] * s]
    }

    /// Monomials of the last block.
    pub fn last_monomials(&self) -> &[[u8; 3]] {
        self.monos.last().unwrap()
    }

    /// Coefficients over [`Self::last_monomials`] with all earlier blocks fixed.
    pub fn last_block_coeffs(&self, fixed: &[Vec3]) -> Vec<f64> {
        let k = self.blocks() - 1;
        let mv: Vec<Vec<f64>> = (0..k)
            .map(|b| {
                let p = powers(&fixed[b], self.degrees[b]);
                self.monos[b].iter().map(|&e| mono_value(&p, e)).collect()
            })
            .collect();
        let mut out = vec![0.0; self.monos[k].len()];
        for (ids, c) in &self.terms {
            let mut w = *c;
            for b in 0..k {
                w *= mv[b][ids[b]];
            }
            out[ids[k]] += w;
        }
        out
    }

    /// Values of the last block's monomials at `v`.
    pub fn last_mono_values(&self, v: &Vec3) -> Vec<f64> {
        let k = self.blocks() - 1;
        let p = powers(v, self.degrees[k]);
        self.monos[k].iter().map(|&e| mono_value(&p, e)).collect()
    }

    /// The 3×3 matrix S with vᵀSv equal to the form when `block` has degree 2.
    pub fn quadratic_in(&self, v: &[Vec3], block: usize) -> [[f64; 3]; 3] {
        debug_assert_eq!(self.degrees[block], 2);
        let mut s = [[0.0; 3]; 3];
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            let mut w = v.to_vec();
            w[block] = e;
            let c = self.contract(&w, block);
            for j in 0..3 {
                s[j][i] = c[j];
            }
        }
        s
    }
}
