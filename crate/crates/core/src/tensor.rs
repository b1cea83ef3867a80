//! Dense tensors of dimension 3 with paired, elasticity, bi-block or full symmetry.
//!
//! Indices are 0-based in the API; tensor files use 1-based indices.

use std::borrow::Cow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::form::BlockPoly;

pub type Vec3 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    Paired4,
    Elasticity4,
    Paired6,
    Elasticity6,
    BiBlock { order: usize, split: usize },
    Symmetric { order: usize },
}

impl SymmetryClass {
    pub fn order(&self) -> usize {
        match *self {
            SymmetryClass::Paired4 | SymmetryClass::Elasticity4 => 4,
            SymmetryClass::Paired6 | SymmetryClass::Elasticity6 => 6,
            SymmetryClass::BiBlock { order, .. } | SymmetryClass::Symmetric { order } => order,
        }
    }

    pub fn len(&self) -> usize {
        3usize.pow(self.order() as u32)
    }

    fn check(&self) -> Result<()> {
        match *self {
            SymmetryClass::BiBlock { order, split } => {
                if order % 2 != 0 || !(4..=12).contains(&order) {
                    return Err(Error::InvalidArgument(format!("bi-block order {order}")));
                }
                if split % 2 != 0 || split < 2 || split > order - 2 {
                    return Err(Error::InvalidArgument(format!("bi-block split {split}")));
                }
            }
            SymmetryClass::Symmetric { order } => {
                if order == 0 || order > 12 {
                    return Err(Error::InvalidArgument(format!("symmetric order {order}")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Rewrites `idx` as the lexicographically smallest member of its orbit.
    pub fn canonical(&self, idx: &mut [usize]) {
        let sort_pairs = |idx: &mut [usize]| {
            for p in idx.chunks_mut(2) {
                if p[0] > p[1] {
                    p.swap(0, 1);
                }
            }
        };
        match *self {
            SymmetryClass::Paired4 | SymmetryClass::Paired6 => sort_pairs(idx),
            SymmetryClass::Elasticity4 | SymmetryClass::Elasticity6 => {
                sort_pairs(idx);
                let mut pairs: Vec<[usize; 2]> = idx.chunks(2).map(|p| [p[0], p[1]]).collect();
                pairs.sort();
                for (k, p) in pairs.iter().enumerate() {
                    idx[2 * k] = p[0];
                    idx[2 * k + 1] = p[1];
                }
            }
            SymmetryClass::BiBlock { split, .. } => {
                idx[..split].sort();
                idx[split..].sort();
            }
            SymmetryClass::Symmetric { .. } => idx.sort(),
        }
    }
}

pub fn flat_index(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 3 + i)
}

pub fn unflat_index(mut off: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = off % 3;
        off /= 3;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// 1-based index tuple.
    pub index: Vec<usize>,
    /// 1-based orbit representative the entry should equal.
    pub partner: Vec<usize>,
    pub value: f64,
    pub partner_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

fn check_len(t: &[f64], class: SymmetryClass) -> Result<()> {
    class.check()?;
    if t.len() != class.len() {
        return Err(Error::Dimension { expected: class.len(), got: t.len() });
    }
    Ok(())
}

/// Exact check of every identity of `class`.
pub fn validate_symmetry(t: &[f64], class: SymmetryClass) -> Result<SymmetryReport> {
    validate_symmetry_tol(t, class, 0.0)
}

/// Like [`validate_symmetry`] with entries compared to `rel_tol·max(1, max|t|)`.
pub fn validate_symmetry_tol(t: &[f64], class: SymmetryClass, rel_tol: f64) -> Result<SymmetryReport> {
    check_len(t, class)?;
    let scale = t.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let m = class.order();
    let mut idx = vec![0; m];
    let mut can = vec![0; m];
    let mut violations = Vec::new();
    for off in 0..t.len() {
        unflat_index(off, &mut idx);
        can.copy_from_slice(&idx);
        class.canonical(&mut can);
        let c = flat_index(&can);
        if c != off && !((t[off] - t[c]).abs() <= rel_tol * scale) {
            violations.push(Violation {
                index: idx.iter().map(|i| i + 1).collect(),
                partner: can.iter().map(|i| i + 1).collect(),
                value: t[off],
                partner_value: t[c],
            });
        }
    }
    Ok(SymmetryReport { ok: violations.is_empty(), violations })
}

/// Group average over the symmetry class, computed as an orbit average.
pub fn symmetrize_raw(t: &[f64], class: SymmetryClass) -> Result<Vec<f64>> {
    check_len(t, class)?;
    let m = class.order();
    let mut idx = vec![0; m];
    let mut rep = vec![0usize; t.len()];
    let mut sum = vec![0.0; t.len()];
    let mut count = vec![0u32; t.len()];
    let mut uniform = vec![true; t.len()];
    for off in 0..t.len() {
        unflat_index(off, &mut idx);
        class.canonical(&mut idx);
        let c = flat_index(&idx);
        rep[off] = c;
        sum[c] += t[off];
        count[c] += 1;
        uniform[c] &= t[off] == t[c];
    }
    // An orbit that is already constant keeps its value; k·v/k can round.
    Ok((0..t.len())
        .map(|off| {
            let c = rep[off];
            if uniform[c] { t[c] } else { sum[c] / count[c] as f64 }
        })
        .collect())
}

/// Any of the tensor types, as produced by [`symmetrize`] or the file loader.
#[derive(Clone, Debug)]
pub enum AnyTensor {
    Paired4(PairedTensor4),
    Paired6(PairedTensor6),
    BiBlock(BiBlockTensor),
    Symmetric(SymTensor),
}

impl AnyTensor {
    pub fn entries(&self) -> &[f64] {
        match self {
            AnyTensor::Paired4(t) => t.entries(),
            AnyTensor::Paired6(t) => t.entries(),
            AnyTensor::BiBlock(t) => t.entries(),
            AnyTensor::Symmetric(t) => t.entries(),
        }
    }

    pub fn class(&self) -> SymmetryClass {
        match self {
            AnyTensor::Paired4(t) => t.class(),
            AnyTensor::Paired6(t) => t.class(),
            AnyTensor::BiBlock(t) => t.class(),
            AnyTensor::Symmetric(t) => t.class(),
        }
    }
}

pub fn symmetrize(t: &[f64], class: SymmetryClass) -> Result<AnyTensor> {
    let data = symmetrize_raw(t, class)?;
    Ok(match class {
        SymmetryClass::Paired4 => AnyTensor::Paired4(PairedTensor4 { a: data, elasticity: false }),
        SymmetryClass::Elasticity4 => AnyTensor::Paired4(PairedTensor4 { a: data, elasticity: true }),
        SymmetryClass::Paired6 => AnyTensor::Paired6(PairedTensor6 { a: data, elasticity: false }),
        SymmetryClass::Elasticity6 => AnyTensor::Paired6(PairedTensor6 { a: data, elasticity: true }),
        SymmetryClass::BiBlock { order, split } => {
            AnyTensor::BiBlock(BiBlockTensor::from_valid(order, split, data))
        }
        SymmetryClass::Symmetric { order } => AnyTensor::Symmetric(SymTensor { order, a: data }),
    })
}

/// Validates with `rel_tol` (0 for exact) and stores the data unchanged.
pub fn from_entries(t: Vec<f64>, class: SymmetryClass, rel_tol: f64) -> Result<AnyTensor> {
    let report = validate_symmetry_tol(&t, class, rel_tol)?;
    if !report.ok {
        return Err(Error::Symmetry(report.violations.len()));
    }
    Ok(match class {
        SymmetryClass::Paired4 => AnyTensor::Paired4(PairedTensor4 { a: t, elasticity: false }),
        SymmetryClass::Elasticity4 => AnyTensor::Paired4(PairedTensor4 { a: t, elasticity: true }),
        SymmetryClass::Paired6 => AnyTensor::Paired6(PairedTensor6 { a: t, elasticity: false }),
        SymmetryClass::Elasticity6 => AnyTensor::Paired6(PairedTensor6 { a: t, elasticity: true }),
        SymmetryClass::BiBlock { order, split } => {
            AnyTensor::BiBlock(BiBlockTensor::from_valid(order, split, t))
        }
        SymmetryClass::Symmetric { order } => AnyTensor::Symmetric(SymTensor { order, a: t }),
    })
}

/// Which vector of a multi-form is left free in a contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    X,
    Y,
    Z,
}

impl Slot {
    fn block(self) -> usize {
        match self {
            Slot::X => 0,
            Slot::Y => 1,
            Slot::Z => 2,
        }
    }
}

/// Common read access used by norms, forms and eigen-solvers.
pub trait Tensor {
    fn entries(&self) -> &[f64];
    fn class(&self) -> SymmetryClass;
    /// Multi-block polynomial view of the form.
    fn form_poly(&self) -> Cow<'_, BlockPoly>;

    fn order(&self) -> usize {
        self.class().order()
    }
}

pub fn hs_inner<A: Tensor + ?Sized, B: Tensor + ?Sized>(a: &A, b: &B) -> Result<f64> {
    if a.order() != b.order() {
        return Err(Error::InvalidArgument(format!(
            "order mismatch {} vs {}",
            a.order(),
            b.order()
        )));
    }
    Ok(a.entries().iter().zip(b.entries()).map(|(x, y)| x * y).sum())
}

pub fn hs_norm<A: Tensor + ?Sized>(a: &A) -> f64 {
    a.entries().iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// 4th order tensor with a_ijkl = a_jikl = a_ijlk, optionally a_ijkl = a_klij.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedTensor4 {
    a: Vec<f64>,
    elasticity: bool,
}

fn class4(elasticity: bool) -> SymmetryClass {
    if elasticity {
        SymmetryClass::Elasticity4
    } else {
        SymmetryClass::Paired4
    }
}

fn class6(elasticity: bool) -> SymmetryClass {
    if elasticity {
        SymmetryClass::Elasticity6
    } else {
        SymmetryClass::Paired6
    }
}

impl PairedTensor4 {
    pub fn zero() -> Self {
        PairedTensor4 { a: vec![0.0; 81], elasticity: true }
    }

    /// The tensor with e_ijkl = 1 iff i = j and k = l, whose form is |x|²|y|².
    pub fn identity() -> Self {
        Self::from_fn(true, |i, j, k, l| if i == j && k == l { 1.0 } else { 0.0 })
    }

    /// Exact validation of the class identities.
    pub fn new(a: Vec<f64>, elasticity: bool) -> Result<Self> {
        match from_entries(a, class4(elasticity), 0.0)? {
            AnyTensor::Paired4(t) => Ok(t),
            _ => unreachable!(),
        }
    }

    /// Projects arbitrary entries onto the class.
    pub fn symmetrized(a: &[f64], elasticity: bool) -> Result<Self> {
        Ok(PairedTensor4 { a: symmetrize_raw(a, class4(elasticity))?, elasticity })
    }

    pub fn from_fn(elasticity: bool, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut a = vec![0.0; 81];
        let mut idx = [0; 4];
        for (off, v) in a.iter_mut().enumerate() {
            unflat_index(off, &mut idx);
            *v = f(idx[0], idx[1], idx[2], idx[3]);
        }
        Self::symmetrized(&a, elasticity).unwrap()
    }

    /// Sets each listed entry and its whole orbit; indices are 0-based.
    pub fn from_orbits(elasticity: bool, entries: &[([usize; 4], f64)]) -> Self {
        let class = class4(elasticity);
        let mut reps = std::collections::BTreeMap::new();
        for (idx, v) in entries {
            let mut c = *idx;
            class.canonical(&mut c);
            reps.insert(flat_index(&c), *v);
        }
        let mut a = vec![0.0; 81];
        let mut idx = [0; 4];
        for (off, v) in a.iter_mut().enumerate() {
            unflat_index(off, &mut idx);
            class.canonical(&mut idx);
            *v = reps.get(&flat_index(&idx)).copied().unwrap_or(0.0);
        }
        PairedTensor4 { a, elasticity }
    }

    pub fn is_elasticity(&self) -> bool {
        self.elasticity
    }

    /// Reports whether the entries also satisfy a_ijkl = a_klij.
    pub fn has_major_symmetry(&self) -> bool {
        validate_symmetry(&self.a, SymmetryClass::Elasticity4).map(|r| r.ok).unwrap_or(false)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.a[((i * 3 + j) * 3 + k) * 3 + l]
    }

    pub fn scaled(&self, c: f64) -> Self {
        PairedTensor4 { a: self.a.iter().map(|v| c * v).collect(), elasticity: self.elasticity }
    }

    pub fn add(&self, other: &Self) -> Self {
        PairedTensor4 {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            elasticity: self.elasticity && other.elasticity,
        }
    }

    /// 𝒜x²y² = Σ a_ijkl x_i x_j y_k y_l.
    pub fn form(&self, x: &Vec3, y: &Vec3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let xx = x[i] * x[j];
                for k in 0..3 {
                    for l in 0..3 {
                        s += self.get(i, j, k, l) * xx * y[k] * y[l];
                    }
                }
            }
        }
        s
    }

    /// 𝒜xy² (free x-slot) or 𝒜x²y (free y-slot).
    pub fn contract(&self, x: &Vec3, y: &Vec3, free: Slot) -> Vec3 {
        let mut v = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let a = self.get(i, j, k, l);
                        match free {
                            Slot::X => v[i] += a * x[j] * y[k] * y[l],
                            _ => v[k] += a * x[i] * x[j] * y[l],
                        }
                    }
                }
            }
        }
        v
    }
}

impl Tensor for PairedTensor4 {
    fn entries(&self) -> &[f64] {
        &self.a
    }

    fn class(&self) -> SymmetryClass {
        class4(self.elasticity)
    }

    fn form_poly(&self) -> Cow<'_, BlockPoly> {
        Cow::Owned(BlockPoly::from_dense(&self.a, &[2, 2]))
    }
}

/// 6th order tensor with pairwise symmetry in (ij), (kl), (pq), optionally pair-block symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedTensor6 {
    a: Vec<f64>,
    elasticity: bool,
}

impl PairedTensor6 {
    pub fn zero() -> Self {
        PairedTensor6 { a: vec![0.0; 729], elasticity: true }
    }

    pub fn new(a: Vec<f64>, elasticity: bool) -> Result<Self> {
        match from_entries(a, class6(elasticity), 0.0)? {
            AnyTensor::Paired6(t) => Ok(t),
            _ => unreachable!(),
        }
    }

    pub fn symmetrized(a: &[f64], elasticity: bool) -> Result<Self> {
        Ok(PairedTensor6 { a: symmetrize_raw(a, class6(elasticity))?, elasticity })
    }

    pub fn from_fn(elasticity: bool, f: impl Fn(&[usize; 6]) -> f64) -> Self {
        let mut a = vec![0.0; 729];
        let mut idx = [0; 6];
        for (off, v) in a.iter_mut().enumerate() {
            unflat_index(off, &mut idx);
            *v = f(&idx);
        }
        Self::symmetrized(&a, elasticity).unwrap()
    }

    /// Sets each listed entry and its whole orbit; indices are 0-based.
    pub fn from_orbits(elasticity: bool, entries: &[([usize; 6], f64)]) -> Self {
        let class = class6(elasticity);
        let mut reps = std::collections::BTreeMap::new();
        for (idx, v) in entries {
            let mut c = *idx;
            class.canonical(&mut c);
            reps.insert(flat_index(&c), *v);
        }
        let mut a = vec![0.0; 729];
        let mut idx = [0; 6];
        for (off, v) in a.iter_mut().enumerate() {
            unflat_index(off, &mut idx);
            class.canonical(&mut idx);
            *v = reps.get(&flat_index(&idx)).copied().unwrap_or(0.0);
        }
        PairedTensor6 { a, elasticity }
    }

    pub fn is_elasticity(&self) -> bool {
        self.elasticity
    }

    #[inline]
    pub fn get(&self, idx: [usize; 6]) -> f64 {
        self.a[flat_index(&idx)]
    }

    pub fn scaled(&self, c: f64) -> Self {
        PairedTensor6 { a: self.a.iter().map(|v| c * v).collect(), elasticity: self.elasticity }
    }

    /// 𝒜x²y²z².
    pub fn form(&self, x: &Vec3, y: &Vec3, z: &Vec3) -> f64 {
        let mut s = 0.0;
        let mut idx = [0; 6];
        for (off, &a) in self.a.iter().enumerate() {
            if a != 0.0 {
                unflat_index(off, &mut idx);
                s += a * x[idx[0]] * x[idx[1]] * y[idx[2]] * y[idx[3]] * z[idx[4]] * z[idx[5]];
            }
        }
        s
    }

    /// 𝒜xy²z², 𝒜x²yz² or 𝒜x²y²z depending on the free slot.
    pub fn contract(&self, x: &Vec3, y: &Vec3, z: &Vec3, free: Slot) -> Vec3 {
        let mut v = [0.0; 3];
        let mut idx = [0; 6];
        for (off, &a) in self.a.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            unflat_index(off, &mut idx);
            let [i, j, k, l, p, q] = idx;
            match free {
                Slot::X => v[i] += a * x[j] * y[k] * y[l] * z[p] * z[q],
                Slot::Y => v[k] += a * x[i] * x[j] * y[l] * z[p] * z[q],
                Slot::Z => v[p] += a * x[i] * x[j] * y[k] * y[l] * z[q],
            }
        }
        v
    }
}

impl Tensor for PairedTensor6 {
    fn entries(&self) -> &[f64] {
        &self.a
    }

    fn class(&self) -> SymmetryClass {
        class6(self.elasticity)
    }

    fn form_poly(&self) -> Cow<'_, BlockPoly> {
        Cow::Owned(BlockPoly::from_dense(&self.a, &[2, 2, 2]))
    }
}

/// Order 2m tensor symmetric within its first `split` indices and within the rest.
#[derive(Clone, Debug)]
pub struct BiBlockTensor {
    order: usize,
    split: usize,
    a: Vec<f64>,
    poly: BlockPoly,
}

impl BiBlockTensor {
    fn from_valid(order: usize, split: usize, a: Vec<f64>) -> Self {
        let poly = BlockPoly::from_dense(&a, &[split, order - split]);
        BiBlockTensor { order, split, a, poly }
    }

    pub fn new(order: usize, split: usize, a: Vec<f64>) -> Result<Self> {
        match from_entries(a, SymmetryClass::BiBlock { order, split }, 0.0)? {
            AnyTensor::BiBlock(t) => Ok(t),
            _ => unreachable!(),
        }
    }

    pub fn symmetrized(order: usize, split: usize, a: &[f64]) -> Result<Self> {
        let data = symmetrize_raw(a, SymmetryClass::BiBlock { order, split })?;
        Ok(Self::from_valid(order, split, data))
    }

    pub fn from_paired4(t: &PairedTensor4) -> Self {
        Self::from_valid(4, 2, t.a.clone())
    }

    pub fn split(&self) -> usize {
        self.split
    }

    /// 𝒜xᵗy^{2m−t}.
    pub fn form(&self, x: &Vec3, y: &Vec3) -> f64 {
        self.poly.value(&[*x, *y])
    }

    /// 𝒜x^{t−1}y^{2m−t} or 𝒜xᵗy^{2m−t−1}.
    pub fn contract(&self, x: &Vec3, y: &Vec3, free: Slot) -> Vec3 {
        self.poly.contract(&[*x, *y], free.block())
    }
}

impl Tensor for BiBlockTensor {
    fn entries(&self) -> &[f64] {
        &self.a
    }

    fn class(&self) -> SymmetryClass {
        SymmetryClass::BiBlock { order: self.order, split: self.split }
    }

    fn form_poly(&self) -> Cow<'_, BlockPoly> {
        Cow::Borrowed(&self.poly)
    }
}

/// Fully symmetric tensor of order 4 or 6.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    order: usize,
    a: Vec<f64>,
}

impl SymTensor {
    pub fn new(order: usize, a: Vec<f64>) -> Result<Self> {
        match from_entries(a, SymmetryClass::Symmetric { order }, 0.0)? {
            AnyTensor::Symmetric(t) => Ok(t),
            _ => unreachable!(),
        }
    }

    pub fn symmetrized(order: usize, a: &[f64]) -> Result<Self> {
        Ok(SymTensor { order, a: symmetrize_raw(a, SymmetryClass::Symmetric { order })? })
    }

    pub fn zero(order: usize) -> Self {
        SymTensor { order, a: vec![0.0; 3usize.pow(order as u32)] }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.a[flat_index(idx)]
    }

    /// 𝒮x^m.
    pub fn form(&self, x: &Vec3) -> f64 {
        self.form_poly().value(&[*x])
    }
}

impl Tensor for SymTensor {
    fn entries(&self) -> &[f64] {
        &self.a
    }

    fn class(&self) -> SymmetryClass {
        SymmetryClass::Symmetric { order: self.order }
    }

    fn form_poly(&self) -> Cow<'_, BlockPoly> {
        Cow::Owned(BlockPoly::from_dense(&self.a, &[self.order]))
    }
}

pub fn eval_form4(a: &PairedTensor4, x: &Vec3, y: &Vec3) -> f64 {
    a.form(x, y)
}

pub fn contract4(a: &PairedTensor4, x: &Vec3, y: &Vec3, free: Slot) -> Vec3 {
    a.contract(x, y, free)
}

pub fn eval_form6(a: &PairedTensor6, x: &Vec3, y: &Vec3, z: &Vec3) -> f64 {
    a.form(x, y, z)
}

pub fn contract6(a: &PairedTensor6, x: &Vec3, y: &Vec3, z: &Vec3, free: Slot) -> Vec3 {
    a.contract(x, y, z, free)
}

pub fn eval_biblock(a: &BiBlockTensor, x: &Vec3, y: &Vec3) -> f64 {
    a.form(x, y)
}

pub fn contract_biblock(a: &BiBlockTensor, x: &Vec3, y: &Vec3, free: Slot) -> Vec3 {
    a.contract(x, y, free)
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: &Vec3) -> Vec3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}
