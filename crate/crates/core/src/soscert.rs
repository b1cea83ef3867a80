//! Semi-paired tensors and SOS / positive definiteness certificates from unfoldings.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{default_tol, psd_factor, sym_eigen};
use crate::tensor::{flat_index, unflat_index, PairedTensor4, PairedTensor6, Tensor, Vec3};
use crate::unfold::{unfold_raw, UnfoldSpec, UnfoldedMatrix};

/// Tensor with the parent's form and the cross-pair symmetries that make
/// every unfolding symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiPaired {
    order: usize,
    b: Vec<f64>,
}

impl SemiPaired {
    pub fn entries(&self) -> &[f64] {
        &self.b
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.b[flat_index(idx)]
    }

    /// Wraps raw entries; use [`is_semi_paired_of`] to check them against a parent.
    pub fn from_entries(order: usize, b: Vec<f64>) -> Self {
        assert_eq!(b.len(), 3usize.pow(order as u32));
        SemiPaired { order, b }
    }

    pub fn form(&self, v: &[Vec3]) -> f64 {
        let mut idx = vec![0; self.order];
        let mut s = 0.0;
        for (off, &b) in self.b.iter().enumerate() {
            if b != 0.0 {
                unflat_index(off, &mut idx);
                s += b * idx.iter().enumerate().map(|(p, &i)| v[p / 2][i]).product::<f64>();
            }
        }
        s
    }
}

pub type SemiPairedTensor4 = SemiPaired;
pub type SemiPairedTensor6 = SemiPaired;

/// Weight of a_idx in the canonical construction: pairs with distinct indices
/// all pointing the same way get 2^{d−1}, mixed directions get 0.
fn canonical_weight(idx: &[usize]) -> f64 {
    let mut d = 0;
    let mut up = 0;
    for p in idx.chunks(2) {
        if p[0] != p[1] {
            d += 1;
            if p[0] < p[1] {
                up += 1;
            }
        }
    }
    if d <= 1 {
        1.0
    } else if up == 0 || up == d {
        (1u32 << (d - 1)) as f64
    } else {
        0.0
    }
}

fn canonical_raw(a: &[f64], order: usize) -> SemiPaired {
    let mut idx = vec![0; order];
    let b = a
        .iter()
        .enumerate()
        .map(|(off, &v)| {
            unflat_index(off, &mut idx);
            canonical_weight(&idx) * v
        })
        .collect();
    SemiPaired { order, b }
}

pub fn semi_paired_canonical4(a: &PairedTensor4) -> SemiPairedTensor4 {
    canonical_raw(a.entries(), 4)
}

pub fn semi_paired_canonical6(a: &PairedTensor6) -> SemiPairedTensor6 {
    canonical_raw(a.entries(), 6)
}

fn swapped(idx: &[usize], pairs: &[usize]) -> Vec<usize> {
    let mut out = idx.to_vec();
    for &p in pairs {
        out.swap(2 * p, 2 * p + 1);
    }
    out
}

/// Checks the semi-paired identities against `parent` to `rel_tol·max(1, max|a|)`.
pub fn is_semi_paired_of_tol<T: Tensor>(b: &SemiPaired, parent: &T, rel_tol: f64) -> bool {
    let a = parent.entries();
    if a.len() != b.b.len() {
        return false;
    }
    let order = b.order;
    let scale = a.iter().chain(&b.b).fold(1.0f64, |m, v| m.max(v.abs()));
    let close = |x: f64, y: f64| (x - y).abs() <= rel_tol * scale;
    let all: Vec<usize> = (0..order / 2).collect();
    let mut idx = vec![0; order];
    for off in 0..a.len() {
        unflat_index(off, &mut idx);
        let g = |pairs: &[usize]| b.b[flat_index(&swapped(&idx, pairs))];
        // Flipping every pair, and flipping the complement of a single pair.
        if !close(g(&[]), g(&all)) {
            return false;
        }
        for p in 0..order / 2 {
            let rest: Vec<usize> = all.iter().copied().filter(|&q| q != p).collect();
            if !close(g(&[p]), g(&rest)) {
                return false;
            }
        }
        let sum = if order == 4 {
            g(&[]) + g(&[0]) + g(&[1]) + g(&[0, 1])
        } else {
            g(&[]) + g(&[0]) + g(&[1]) + g(&[2])
        };
        if !close(sum, 4.0 * a[off]) {
            return false;
        }
    }
    true
}

pub fn is_semi_paired_of<T: Tensor>(b: &SemiPaired, parent: &T) -> bool {
    is_semi_paired_of_tol(b, parent, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessaryCheck {
    pub passed: bool,
    /// Smallest a_iikk (a_iikkpp).
    pub min_diagonal: f64,
    /// 1-based (i, k[, p]) of the first negative diagonal entry.
    pub violation: Option<Vec<usize>>,
}

fn necessary_raw(a: &[f64], pairs: usize) -> NecessaryCheck {
    let mut min = f64::INFINITY;
    let mut violation = None;
    for off in 0..3usize.pow(pairs as u32) {
        let mut d = vec![0; pairs];
        unflat_index(off, &mut d);
        let idx: Vec<usize> = d.iter().flat_map(|&i| [i, i]).collect();
        let v = a[flat_index(&idx)];
        min = min.min(v);
        if v < 0.0 && violation.is_none() {
            violation = Some(d.iter().map(|i| i + 1).collect());
        }
    }
    NecessaryCheck { passed: violation.is_none(), min_diagonal: min, violation }
}

/// a_iikk ≥ 0 for all i, k.
pub fn necessary_check4(a: &PairedTensor4) -> NecessaryCheck {
    necessary_raw(a.entries(), 2)
}

/// a_iikkpp ≥ 0 for all i, k, p.
pub fn necessary_check6(a: &PairedTensor6) -> NecessaryCheck {
    necessary_raw(a.entries(), 3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertStatus {
    #[serde(rename = "PD-certified")]
    PdCertified,
    #[serde(rename = "SOS-certified")]
    SosCertified,
    #[serde(rename = "refuted-not-SOS")]
    RefutedNotSos,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

/// Where an unfolded matrix came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Candidate {
    Canonical,
    Parent,
    Spec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnfoldingWitness {
    pub from: Candidate,
    pub unfolded: UnfoldedMatrix,
    /// Ascending eigenvalues.
    pub spectrum: Vec<f64>,
    pub lambda_min: f64,
    pub tol: f64,
}

/// coefficient · (Σ array[flat(i,j[,k])] x_i y_j [z_k])².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SosTerm {
    pub coefficient: f64,
    pub array: Vec<f64>,
}

impl SosTerm {
    pub fn value(&self, v: &[Vec3]) -> f64 {
        let mut idx = vec![0; v.len()];
        let mut s = 0.0;
        for (off, &c) in self.array.iter().enumerate() {
            unflat_index(off, &mut idx);
            s += c * idx.iter().zip(v).map(|(&i, x)| x[i]).product::<f64>();
        }
        self.coefficient * s * s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub status: CertStatus,
    pub necessary: NecessaryCheck,
    /// Best unfolding found (largest smallest eigenvalue); absent when refuted.
    pub witness: Option<UnfoldingWitness>,
    pub sos_terms: Option<Vec<SosTerm>>,
}

impl Certificate {
    /// Σ terms at `v`, when a decomposition is present.
    pub fn sos_value(&self, v: &[Vec3]) -> Option<f64> {
        self.sos_terms.as_ref().map(|t| t.iter().map(|t| t.value(v)).sum())
    }
}

/// Which unfoldings to try.
#[derive(Clone, Debug, PartialEq)]
pub struct SosSearch {
    /// The canonical semi-paired tensor under the canonical map.
    pub canonical: bool,
    /// The parent tensor itself under the canonical specs (M¹, M² or N¹…N⁶).
    pub parent: bool,
    /// Extra specs applied to the canonical semi-paired tensor.
    pub specs: Vec<UnfoldSpec>,
}

impl Default for SosSearch {
    fn default() -> Self {
        SosSearch { canonical: true, parent: true, specs: Vec::new() }
    }
}

impl SosSearch {
    pub fn canonical_only() -> Self {
        SosSearch { canonical: true, parent: false, specs: Vec::new() }
    }

    pub fn with_specs(specs: Vec<UnfoldSpec>) -> Self {
        SosSearch { canonical: false, parent: false, specs }
    }
}

fn certify_raw(
    parent: &[f64],
    necessary: NecessaryCheck,
    semi: &SemiPaired,
    canonical_spec: UnfoldSpec,
    parent_specs: Vec<UnfoldSpec>,
    search: &SosSearch,
) -> Result<Certificate> {
    if !necessary.passed {
        return Ok(Certificate { status: CertStatus::RefutedNotSos, necessary, witness: None, sos_terms: None });
    }
    let mut candidates: Vec<(Candidate, UnfoldedMatrix)> = Vec::new();
    if search.canonical {
        candidates.push((Candidate::Canonical, unfold_raw(semi.entries(), &canonical_spec)?));
    }
    if search.parent {
        for s in &parent_specs {
            candidates.push((Candidate::Parent, unfold_raw(parent, s)?));
        }
    }
    for s in &search.specs {
        candidates.push((Candidate::Spec, unfold_raw(semi.entries(), s)?));
    }
    let mut best: Option<UnfoldingWitness> = None;
    for (from, u) in candidates {
        let e = sym_eigen(&u.matrix)?;
        let w = UnfoldingWitness {
            from,
            tol: default_tol(&u.matrix),
            lambda_min: e.lambda_min(),
            spectrum: e.values,
            unfolded: u,
        };
        if best.as_ref().map_or(true, |b| w.lambda_min - w.tol > b.lambda_min - b.tol) {
            best = Some(w);
        }
    }
    let Some(w) = best else {
        return Ok(Certificate { status: CertStatus::Inconclusive, necessary, witness: None, sos_terms: None });
    };
    let status = if w.lambda_min > w.tol {
        CertStatus::PdCertified
    } else if w.lambda_min >= -w.tol {
        CertStatus::SosCertified
    } else {
        CertStatus::Inconclusive
    };
    let sos_terms = if status == CertStatus::Inconclusive {
        None
    } else {
        let seqs = w.unfolded.spec.seqs();
        let terms = psd_factor(&w.unfolded.matrix, w.tol)?
            .into_iter()
            .map(|f| {
                let sq: f64 = f.iter().map(|v| v * v).sum();
                let mut array = vec![0.0; f.len()];
                for (s, v) in f.iter().enumerate() {
                    let tuple: Vec<usize> = seqs.iter().map(|q| q[s]).collect();
                    array[flat_index(&tuple)] = v / sq.sqrt();
                }
                SosTerm { coefficient: sq, array }
            })
            .collect();
        Some(terms)
    };
    Ok(Certificate { status, necessary, witness: Some(w), sos_terms })
}

pub fn certify4(a: &PairedTensor4, search: &SosSearch) -> Result<Certificate> {
    let semi = semi_paired_canonical4(a);
    certify_raw(a.entries(), necessary_check4(a), &semi, UnfoldSpec::m1(), vec![UnfoldSpec::m1(), UnfoldSpec::m2()], search)
}

pub fn certify6(a: &PairedTensor6, search: &SosSearch) -> Result<Certificate> {
    let semi = semi_paired_canonical6(a);
    let parents = (1..=6).map(|v| UnfoldSpec::n(v).unwrap()).collect();
    certify_raw(a.entries(), necessary_check6(a), &semi, UnfoldSpec::n(1).unwrap(), parents, search)
}
