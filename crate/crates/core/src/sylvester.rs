//! Sylvester-criterion reductions: the parameterized matrix A(y) (or A(y,z)) is
//! positive definite for every unit parameter iff its three leading principal
//! minors stay positive on the sphere(s).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{is_psd, sym_eigen, SymMatrix};
use crate::meigen::{smallest_meig, z_eigen_extremal, PowerOptions, Which};
use crate::poly::{det3_polymatrix, form4_poly, quad_poly, symmetrize_to_biblock, symmetrize_to_tensor, PolyForm};
use crate::tensor::{hs_norm, BiBlockTensor, PairedTensor4, PairedTensor6, SymTensor, Vec3};
use crate::unfold::{blocks4, param_matrix4, param_matrix6, subtensor6, Side};
use crate::verdict::Verdict;

/// Positivity margin for every minor.
pub const MARGIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SylvesterTensors4 {
    pub leading_block: SymMatrix,
    /// 𝒯¹y⁴ = P₁₁P₂₂ − P₁₂P₂₁.
    pub t1: SymTensor,
    /// 𝒯²y⁶ = det P.
    pub t2: SymTensor,
    pub minor2: PolyForm,
    pub det: PolyForm,
}

fn poly_matrix4(a: &PairedTensor4, side: Side) -> Result<[[PolyForm; 3]; 3]> {
    let b = blocks4(a);
    let fam = match side {
        Side::A => &b.a,
        Side::B => &b.b,
        Side::C => return Err(Error::InvalidArgument("4th order tensors have sides A and B".into())),
    };
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| quad_poly(&fam[i][j], 3, 0))))
}

fn minor2(m: &[[PolyForm; 3]; 3]) -> PolyForm {
    m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))
}

pub fn sylvester_tensors4(a: &PairedTensor4, side: Side) -> Result<SylvesterTensors4> {
    let m = poly_matrix4(a, side)?;
    let minor2 = minor2(&m);
    let det = det3_polymatrix(&m);
    let b = blocks4(a);
    let leading_block = if side == Side::A { b.a[0][0].clone() } else { b.b[0][0].clone() };
    Ok(SylvesterTensors4 {
        leading_block,
        t1: symmetrize_to_tensor(&minor2, 4)?,
        t2: symmetrize_to_tensor(&det, 6)?,
        minor2,
        det,
    })
}

#[derive(Clone, Debug)]
pub struct SylvesterTensors6 {
    pub leading_subtensor: PairedTensor4,
    /// Order 8, split (4, 4).
    pub t1: BiBlockTensor,
    /// Order 12, split (6, 6).
    pub t2: BiBlockTensor,
    pub minor2: PolyForm,
    pub det: PolyForm,
}

fn poly_matrix6(a: &PairedTensor6, side: Side) -> [[PolyForm; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| form4_poly(&subtensor6(a, side, i, j))))
}

pub fn sylvester_tensors6(a: &PairedTensor6, side: Side) -> Result<SylvesterTensors6> {
    let m = poly_matrix6(a, side);
    let minor2 = minor2(&m);
    let det = det3_polymatrix(&m);
    Ok(SylvesterTensors6 {
        leading_subtensor: subtensor6(a, side, 0, 0),
        t1: symmetrize_to_biblock(&minor2, 4, 4)?,
        t2: symmetrize_to_biblock(&det, 6, 6)?,
        minor2,
        det,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinorCheck {
    /// Minimum of the minor over the unit sphere(s), as found.
    pub min_value_estimate: f64,
    /// A bound known to hold exactly (only for the leading 3×3 block).
    pub certified_bound: Option<f64>,
    /// Parameter vector(s) attaining the estimate.
    pub witness: Vec<Vec3>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormWitness {
    pub vectors: Vec<Vec3>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SylvesterVerdict {
    pub side: Side,
    pub leading_block_check: MinorCheck,
    pub minor2_check: MinorCheck,
    pub det_check: MinorCheck,
    pub overall: Verdict,
    /// Point of the original form at which positivity fails or is borderline.
    pub form_witness: Option<FormWitness>,
}

/// x minimizing xᵀMx on the sphere.
fn bottom_vector(m: &SymMatrix) -> Vec3 {
    let e = sym_eigen(m).expect("finite parameterized matrix");
    [e.vectors[0][0], e.vectors[0][1], e.vectors[0][2]]
}

fn decide(checks: [&MinorCheck; 3], witness: impl Fn(&[Vec3]) -> FormWitness, scale: f64) -> (Verdict, Option<FormWitness>) {
    let mins: Vec<f64> = checks.iter().map(|c| c.min_value_estimate).collect();
    if mins.iter().all(|&m| m > MARGIN) {
        return (Verdict::Pd, None);
    }
    if let Some(c) = checks.iter().find(|c| c.min_value_estimate < -MARGIN) {
        return (Verdict::NotPd, Some(witness(&c.witness)));
    }
    let c = checks.iter().find(|c| c.min_value_estimate <= MARGIN).unwrap();
    let w = witness(&c.witness);
    // A boundary minor whose witness makes the form vanish shows the form is not
    // strictly positive; otherwise the strict criterion cannot decide.
    if w.value <= 1e-12 * scale.max(1.0) {
        (Verdict::NotPd, Some(w))
    } else {
        (Verdict::Undetermined, Some(w))
    }
}

pub fn sylvester_check4(a: &PairedTensor4, side: Side) -> Result<SylvesterVerdict> {
    let t = sylvester_tensors4(a, side)?;
    let lead = sym_eigen(&t.leading_block)?;
    let lead_check = MinorCheck {
        min_value_estimate: is_psd(&t.leading_block, 0.0)?.lambda_min,
        certified_bound: Some(lead.lambda_min()),
        witness: vec![[lead.vectors[0][0], lead.vectors[0][1], lead.vectors[0][2]]],
    };
    let opts = PowerOptions::default();
    let z = |s: &SymTensor| -> Result<MinorCheck> {
        let e = z_eigen_extremal(s, Which::Smallest, &opts)?;
        Ok(MinorCheck {
            min_value_estimate: e.lambda_min.unwrap(),
            certified_bound: None,
            witness: e.min_witness.unwrap().vectors,
        })
    };
    let minor2_check = z(&t.t1)?;
    let det_check = z(&t.t2)?;
    let witness = |p: &[Vec3]| {
        let m = param_matrix4(a, side, &p[0]).unwrap();
        let v = bottom_vector(&m);
        let (x, y) = if side == Side::A { (v, p[0]) } else { (p[0], v) };
        FormWitness { value: a.form(&x, &y), vectors: vec![x, y] }
    };
    let (overall, form_witness) = decide([&lead_check, &minor2_check, &det_check], witness, hs_norm(a));
    Ok(SylvesterVerdict { side, leading_block_check: lead_check, minor2_check, det_check, overall, form_witness })
}

pub fn sylvester_check6(a: &PairedTensor6, side: Side) -> Result<SylvesterVerdict> {
    let t = sylvester_tensors6(a, side)?;
    let m = |e: crate::meigen::SpectrumEstimate| MinorCheck {
        min_value_estimate: e.lambda_min.unwrap(),
        certified_bound: None,
        witness: e.min_witness.unwrap().vectors,
    };
    let lead_check = m(smallest_meig(&t.leading_subtensor));
    let minor2_check = m(smallest_meig(&t.t1));
    let det_check = m(smallest_meig(&t.t2));
    let witness = |p: &[Vec3]| {
        let v = bottom_vector(&param_matrix6(a, side, &p[0], &p[1]));
        let vectors = match side {
            Side::A => vec![v, p[0], p[1]],
            Side::B => vec![p[0], v, p[1]],
            Side::C => vec![p[0], p[1], v],
        };
        FormWitness { value: a.form(&vectors[0], &vectors[1], &vectors[2]), vectors }
    };
    let (overall, form_witness) = decide([&lead_check, &minor2_check, &det_check], witness, hs_norm(a));
    Ok(SylvesterVerdict { side, leading_block_check: lead_check, minor2_check, det_check, overall, form_witness })
}
