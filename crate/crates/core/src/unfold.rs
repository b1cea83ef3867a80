//! Unfolded matrices, block decompositions and parameterized matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::tensor::{flat_index, PairedTensor4, PairedTensor6, Tensor, Vec3};

/// Index sequences (i_s), (j_s)[, (k_s)] defining m_st = a_{i_s i_t j_s j_t [k_s k_t]}.
///
/// Stored 0-based. The tuples (i_s, j_s[, k_s]) must enumerate every index tuple
/// exactly once, which is what makes wᵀMw reproduce the form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnfoldSpec {
    seqs: Vec<Vec<usize>>,
}

impl UnfoldSpec {
    /// Sequences of 1-based indices.
    pub fn new(seqs: Vec<Vec<usize>>) -> Result<Self> {
        let k = seqs.len();
        if k != 2 && k != 3 {
            return Err(Error::InvalidSpec(format!("{k} sequences, expected 2 or 3")));
        }
        let len = 3usize.pow(k as u32);
        let mut seen = vec![false; len];
        for s in &seqs {
            if s.len() != len {
                return Err(Error::InvalidSpec(format!("sequence length {}, expected {len}", s.len())));
            }
            if s.iter().any(|&v| !(1..=3).contains(&v)) {
                return Err(Error::InvalidSpec("symbols must be 1, 2 or 3".into()));
            }
            for sym in 1..=3 {
                if s.iter().filter(|&&v| v == sym).count() != len / 3 {
                    return Err(Error::InvalidSpec(format!("symbol {sym} count differs from {}", len / 3)));
                }
            }
        }
        for pos in 0..len {
            let tuple: Vec<usize> = seqs.iter().map(|s| s[pos] - 1).collect();
            let f = flat_index(&tuple);
            if seen[f] {
                return Err(Error::InvalidSpec(format!("index tuple at position {} repeats", pos + 1)));
            }
            seen[f] = true;
        }
        Ok(UnfoldSpec { seqs: seqs.into_iter().map(|s| s.into_iter().map(|v| v - 1).collect()).collect() })
    }

    /// Digit strings such as `("111222333", "123123123")`.
    pub fn parse(seqs: &[&str]) -> Result<Self> {
        let parsed = seqs
            .iter()
            .map(|s| {
                s.chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::InvalidSpec(format!("bad symbol {c:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    /// Spec whose tuple at position s is the base-3 digits of s, assigned to
    /// sequences in the given major-to-minor order.
    fn from_digit_order(order: &[usize]) -> Self {
        let k = order.len();
        let len = 3usize.pow(k as u32);
        let mut seqs = vec![vec![0; len]; k];
        for s in 0..len {
            let mut rest = s;
            for d in (0..k).rev() {
                seqs[order[d]][s] = rest % 3;
                rest /= 3;
            }
        }
        UnfoldSpec { seqs }
    }

    /// (111222333, 123123123): m_{3(i−1)+k, 3(j−1)+l} = a_ijkl.
    pub fn m1() -> Self {
        Self::from_digit_order(&[0, 1])
    }

    /// (123123123, 111222333): m_{3(k−1)+i, 3(l−1)+j} = a_ijkl.
    pub fn m2() -> Self {
        Self::from_digit_order(&[1, 0])
    }

    /// The six 27×27 variants; `variant` in 1..=6.
    pub fn n(variant: usize) -> Result<Self> {
        let order: &[usize] = match variant {
            1 => &[0, 1, 2],
            2 => &[1, 0, 2],
            3 => &[2, 1, 0],
            4 => &[0, 2, 1],
            5 => &[1, 2, 0],
            6 => &[2, 0, 1],
            _ => return Err(Error::InvalidSpec(format!("variant {variant} not in 1..=6"))),
        };
        Ok(Self::from_digit_order(order))
    }

    pub fn order(&self) -> usize {
        2 * self.seqs.len()
    }

    pub fn len(&self) -> usize {
        self.seqs[0].len()
    }

    /// 0-based sequences.
    pub fn seqs(&self) -> &[Vec<usize>] {
        &self.seqs
    }

    /// 1-based digit strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.seqs.iter().map(|s| s.iter().map(|v| char::from(b'1' + *v as u8)).collect()).collect()
    }

    /// w_s = x_{i_s} y_{j_s} [z_{k_s}].
    pub fn w(&self, v: &[Vec3]) -> Vec<f64> {
        (0..self.len())
            .map(|s| self.seqs.iter().zip(v).map(|(q, x)| x[q[s]]).product())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnfoldedMatrix {
    pub matrix: SymMatrix,
    pub spec: UnfoldSpec,
    /// FNV-1a hash of the source entries' bit patterns.
    pub source_hash: u64,
}

pub fn entries_hash(a: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for v in a {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Unfolds raw entries of length 3^{order}. The result is read from the lower
/// triangle, so `a` must make the unfolding symmetric (paired or semi-paired).
pub fn unfold_raw(a: &[f64], spec: &UnfoldSpec) -> Result<UnfoldedMatrix> {
    let order = spec.order();
    if a.len() != 3usize.pow(order as u32) {
        return Err(Error::InvalidSpec(format!("spec of order {order} for {} entries", a.len())));
    }
    let q = spec.seqs();
    let mut idx = vec![0; order];
    let matrix = SymMatrix::from_lower_fn(spec.len(), |s, t| {
        for (p, seq) in q.iter().enumerate() {
            idx[2 * p] = seq[s];
            idx[2 * p + 1] = seq[t];
        }
        a[flat_index(&idx)]
    });
    Ok(UnfoldedMatrix { matrix, spec: spec.clone(), source_hash: entries_hash(a) })
}

pub fn unfold4(a: &PairedTensor4, spec: &UnfoldSpec) -> Result<UnfoldedMatrix> {
    if spec.order() != 4 {
        return Err(Error::InvalidSpec("expected a 4th order spec".into()));
    }
    unfold_raw(a.entries(), spec)
}

pub fn unfold_m1(a: &PairedTensor4) -> UnfoldedMatrix {
    unfold_raw(a.entries(), &UnfoldSpec::m1()).unwrap()
}

pub fn unfold_m2(a: &PairedTensor4) -> UnfoldedMatrix {
    unfold_raw(a.entries(), &UnfoldSpec::m2()).unwrap()
}

pub fn unfold6(a: &PairedTensor6, spec: &UnfoldSpec) -> Result<UnfoldedMatrix> {
    if spec.order() != 6 {
        return Err(Error::InvalidSpec("expected a 6th order spec".into()));
    }
    unfold_raw(a.entries(), spec)
}

pub fn unfold_n(a: &PairedTensor6, variant: usize) -> Result<UnfoldedMatrix> {
    unfold_raw(a.entries(), &UnfoldSpec::n(variant)?)
}

/// Which index pair is kept as the matrix index of a parameterized matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
    C,
}

/// A_ij = (a_ijkl)_kl and B_kl = (a_ijkl)_ij, indexed `a[i][j]`, `b[k][l]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Blocks4 {
    pub a: Vec<Vec<SymMatrix>>,
    pub b: Vec<Vec<SymMatrix>>,
}

pub fn blocks4(t: &PairedTensor4) -> Blocks4 {
    let grid = |f: &dyn Fn(usize, usize) -> SymMatrix| -> Vec<Vec<SymMatrix>> {
        (0..3).map(|i| (0..3).map(|j| f(i, j)).collect()).collect()
    };
    Blocks4 {
        a: grid(&|i, j| SymMatrix::from_lower_fn(3, |k, l| t.get(i, j, k, l))),
        b: grid(&|k, l| SymMatrix::from_lower_fn(3, |i, j| t.get(i, j, k, l))),
    }
}

/// A(y) with A(y)_ij = yᵀA_ij y (side A) or B(x) with B(x)_kl = xᵀB_kl x (side B).
pub fn param_matrix4(t: &PairedTensor4, side: Side, v: &Vec3) -> Result<SymMatrix> {
    let f = |i: usize, j: usize| -> f64 {
        let mut s = 0.0;
        for p in 0..3 {
            for q in 0..3 {
                s += v[p] * v[q]
                    * match side {
                        Side::A => t.get(i, j, p, q),
                        _ => t.get(p, q, i, j),
                    };
            }
        }
        s
    };
    if side == Side::C {
        return Err(Error::InvalidArgument("4th order tensors have sides A and B".into()));
    }
    Ok(SymMatrix::from_lower_fn(3, f))
}

/// Sub-tensors 𝒜_ij = (a_ijklpq)_klpq, ℬ_kl = (a_ijklpq)_ijpq, 𝒞_pq = (a_ijklpq)_ijkl.
#[derive(Clone, Debug, PartialEq)]
pub struct Blocks6 {
    pub a: Vec<Vec<PairedTensor4>>,
    pub b: Vec<Vec<PairedTensor4>>,
    pub c: Vec<Vec<PairedTensor4>>,
}

/// Sub-tensor keeping pair `side` fixed at (s, t).
pub fn subtensor6(t: &PairedTensor6, side: Side, s: usize, u: usize) -> PairedTensor4 {
    let mut a = vec![0.0; 81];
    for (off, v) in a.iter_mut().enumerate() {
        let (w, x, y, z) = (off / 27, (off / 9) % 3, (off / 3) % 3, off % 3);
        *v = t.get(match side {
            Side::A => [s, u, w, x, y, z],
            Side::B => [w, x, s, u, y, z],
            Side::C => [w, x, y, z, s, u],
        });
    }
    PairedTensor4::new(a.clone(), t.is_elasticity())
        .or_else(|_| PairedTensor4::new(a, false))
        .expect("sub-tensors of a paired tensor are paired")
}

pub fn blocks6(t: &PairedTensor6) -> Blocks6 {
    let grid = |side| -> Vec<Vec<PairedTensor4>> {
        (0..3).map(|i| (0..3).map(|j| subtensor6(t, side, i, j)).collect()).collect()
    };
    Blocks6 { a: grid(Side::A), b: grid(Side::B), c: grid(Side::C) }
}

/// A(y,z), B(x,z) or C(x,y): entry (s,t) is the sub-tensor form at (u, v).
pub fn param_matrix6(t: &PairedTensor6, side: Side, u: &Vec3, v: &Vec3) -> SymMatrix {
    SymMatrix::from_lower_fn(3, |s, w| subtensor6(t, side, s, w).form(u, v))
}
