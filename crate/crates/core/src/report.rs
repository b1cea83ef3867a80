//! The staged check pipeline and its report.
//!
//! Stages run in a fixed order and the first conclusive one decides. A stage
//! may only claim PD through a sound certificate, and may only claim not-PD
//! with a point where the form is strictly negative.

use std::fmt::{self, Write as _};
use std::time::Instant;

use serde::Serialize;

use crate::meigen::{smallest_meig_with, PowerOptions, DEFAULT_RESOLUTION_2, DEFAULT_RESOLUTION_3};
use crate::sdp::{solve_order, SdpStatus, SCHEDULE};
use crate::soscert::{certify4, certify6, CertStatus, Certificate, NecessaryCheck, SosSearch};
use crate::sylvester::{sylvester_check4, sylvester_check6, SylvesterVerdict};
use crate::tensor::{AnyTensor, Tensor, Vec3};
use crate::unfold::Side;
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Necessary,
    Sos,
    Sylvester,
    Sdp,
    Meig,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Necessary => "necessary",
            Stage::Sos => "sos",
            Stage::Sylvester => "sylvester",
            Stage::Sdp => "sdp",
            Stage::Meig => "meig",
        })
    }
}

/// What `--method` selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Sos,
    Sylvester,
    Sdp,
    Meig,
}

impl Method {
    fn stages(self) -> &'static [Stage] {
        match self {
            Method::Auto => &[Stage::Necessary, Stage::Sos, Stage::Sylvester, Stage::Sdp, Stage::Meig],
            Method::Sos => &[Stage::Necessary, Stage::Sos],
            Method::Sylvester => &[Stage::Sylvester],
            Method::Sdp => &[Stage::Sdp],
            Method::Meig => &[Stage::Meig],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Unit vectors and the form value there.
    Point { vectors: Vec<Vec3>, value: f64 },
    /// An unfolded matrix whose smallest eigenvalue is `lambda_min`.
    Unfolding { spec: Vec<String>, lambda_min: f64 },
    /// A feasible relaxation bound.
    SdpBound { r: usize, s: usize, gamma: f64, violation: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub stage: Stage,
    pub verdict: Verdict,
    /// Signed distance from the decision threshold, where one exists.
    pub margin: Option<f64>,
    pub witness: Option<Witness>,
    pub iterations: Option<usize>,
    pub note: String,
    /// Seconds; not serialized so machine reports stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub order: usize,
    pub class: String,
    pub tol: f64,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub overall: Verdict,
    /// Stage that produced the overall verdict.
    pub decided_by: Option<Stage>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.overall.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub method: Method,
    pub tol: f64,
    /// Highest r + s in the relaxation schedule.
    pub max_order: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { method: Method::Auto, tol: 1e-8, max_order: 2, seed: 0 }
    }
}

fn record(stage: Stage, verdict: Verdict, note: impl Into<String>) -> CheckRecord {
    CheckRecord { stage, verdict, margin: None, witness: None, iterations: None, note: note.into(), wall_time: 0.0 }
}

fn necessary_record(n: &NecessaryCheck, a: &AnyTensor) -> CheckRecord {
    let mut r = record(Stage::Necessary, Verdict::Undetermined, "all a_ii..kk nonnegative");
    r.margin = Some(n.min_diagonal);
    if let Some(idx) = &n.violation {
        // a_iikk < 0 is the form at the coordinate vectors e_i, e_k.
        let vectors: Vec<Vec3> = idx
            .iter()
            .map(|&i| {
                let mut e = [0.0; 3];
                e[i - 1] = 1.0;
                e
            })
            .collect();
        let value = a.entries()[crate::tensor::flat_index(&idx.iter().flat_map(|&i| [i - 1, i - 1]).collect::<Vec<_>>())];
        r.verdict = Verdict::NotPd;
        r.note = format!("negative diagonal entry at {idx:?}");
        r.witness = Some(Witness::Point { vectors, value });
    }
    r
}

fn sos_record(c: &Certificate) -> CheckRecord {
    let (verdict, note) = match c.status {
        CertStatus::PdCertified => (Verdict::Pd, "positive definite unfolded matrix"),
        CertStatus::SosCertified => (Verdict::Undetermined, "sum of squares, positive semidefinite only"),
        CertStatus::RefutedNotSos => (Verdict::Undetermined, "necessary condition fails"),
        CertStatus::Inconclusive => (Verdict::Undetermined, "no PSD unfolding found"),
    };
    let mut r = record(Stage::Sos, verdict, note);
    if let Some(w) = &c.witness {
        r.margin = Some(w.lambda_min - w.tol);
        r.witness = Some(Witness::Unfolding { spec: w.unfolded.spec.to_strings(), lambda_min: w.lambda_min });
    }
    r
}

pub fn sylvester_record(v: &SylvesterVerdict, tol: f64) -> CheckRecord {
    let margin = [&v.leading_block_check, &v.minor2_check, &v.det_check]
        .iter()
        .map(|c| c.min_value_estimate)
        .fold(f64::INFINITY, f64::min);
    let mut r = record(Stage::Sylvester, v.overall, format!("side {:?}", v.side));
    r.margin = Some(margin);
    if let Some(w) = &v.form_witness {
        r.witness = Some(Witness::Point { vectors: w.vectors.clone(), value: w.value });
        if v.overall == Verdict::NotPd && w.value >= -tol {
            r.verdict = Verdict::Undetermined;
            r.note = format!("side {:?}: form vanishes at the witness, boundary case", v.side);
        }
    }
    r
}

fn meig_record(t: &AnyTensor, seed: u64, tol: f64) -> CheckRecord {
    let opts = PowerOptions { seed, ..PowerOptions::default() };
    let est = match t {
        AnyTensor::Paired4(a) => smallest_meig_with(a, &opts, DEFAULT_RESOLUTION_2),
        AnyTensor::Paired6(a) => smallest_meig_with(a, &opts, DEFAULT_RESOLUTION_3),
        AnyTensor::BiBlock(a) => smallest_meig_with(a, &opts, resolution(a)),
        AnyTensor::Symmetric(a) => smallest_meig_with(a, &opts, resolution(a)),
    };
    let est = match est {
        Ok(e) => e,
        Err(e) => return record(Stage::Meig, Verdict::Undetermined, e.to_string()),
    };
    let mut r = record(Stage::Meig, Verdict::Undetermined, "search found no negative value");
    r.iterations = Some(est.iterations);
    if let (Some(l), Some(w)) = (est.lambda_min, &est.min_witness) {
        r.margin = Some(l);
        r.witness = Some(Witness::Point { vectors: w.vectors.clone(), value: l });
        if l < -tol {
            r.verdict = Verdict::NotPd;
            r.note = format!("M-eigenpair with residual {:.1e}", w.residual);
        } else if l > tol {
            r.note = "smallest value found is positive, but search is not a certificate".into();
        }
    }
    r
}

fn resolution<T: Tensor>(a: &T) -> usize {
    if a.form_poly().blocks() > 2 {
        DEFAULT_RESOLUTION_3
    } else {
        DEFAULT_RESOLUTION_2
    }
}

fn sdp_record(t: &AnyTensor, opts: &CheckOptions) -> CheckRecord {
    let AnyTensor::Paired4(a) = t else {
        return record(Stage::Sdp, Verdict::Undetermined, "relaxation implemented for 4th order only");
    };
    let orders: Vec<(usize, usize)> = SCHEDULE.iter().copied().filter(|(r, s)| r + s <= opts.max_order).collect();
    // Refutation belongs to the meig stage, so the bound alone decides here.
    let rows = orders.iter().map(|&(r, s)| solve_order(a, r, s).0);
    let mut r = record(Stage::Sdp, Verdict::Undetermined, "no positive bound");
    let mut best: Option<(f64, Witness)> = None;
    let mut iterations = 0;
    for row in rows {
        iterations += row.iterations;
        if row.status != SdpStatus::Optimal {
            continue;
        }
        if best.as_ref().map_or(true, |b| row.gamma > b.0) {
            let w = Witness::SdpBound { r: row.r, s: row.s, gamma: row.gamma, violation: row.primal_residual };
            best = Some((row.gamma, w));
        }
        if row.gamma > opts.tol {
            break;
        }
    }
    r.iterations = Some(iterations);
    if let Some((g, w)) = best {
        r.margin = Some(g);
        r.witness = Some(w);
        if g > opts.tol {
            r.verdict = Verdict::Pd;
            r.note = "positive lower bound on the smallest M-eigenvalue".into();
        }
    }
    r
}

fn class_name(t: &AnyTensor) -> String {
    use crate::tensor::SymmetryClass::*;
    match t.class() {
        Paired4 => "paired4".into(),
        Elasticity4 => "elasticity4".into(),
        Paired6 => "paired6".into(),
        Elasticity6 => "elasticity6".into(),
        BiBlock { split, .. } => format!("biblock{split}"),
        Symmetric { .. } => "symmetric".into(),
    }
}

fn run_stage(stage: Stage, t: &AnyTensor, opts: &CheckOptions) -> Option<CheckRecord> {
    let na = |s: Stage| record(s, Verdict::Undetermined, "not applicable to this class");
    Some(match (stage, t) {
        (Stage::Necessary, AnyTensor::Paired4(a)) => necessary_record(&crate::soscert::necessary_check4(a), t),
        (Stage::Necessary, AnyTensor::Paired6(a)) => necessary_record(&crate::soscert::necessary_check6(a), t),
        (Stage::Sos, AnyTensor::Paired4(a)) => match certify4(a, &SosSearch::default()) {
            Ok(c) => sos_record(&c),
            Err(e) => record(stage, Verdict::Undetermined, e.to_string()),
        },
        (Stage::Sos, AnyTensor::Paired6(a)) => match certify6(a, &SosSearch::default()) {
            Ok(c) => sos_record(&c),
            Err(e) => record(stage, Verdict::Undetermined, e.to_string()),
        },
        (Stage::Sylvester, AnyTensor::Paired4(a)) => match sylvester_check4(a, Side::A) {
            Ok(v) => sylvester_record(&v, opts.tol),
            Err(e) => record(stage, Verdict::Undetermined, e.to_string()),
        },
        (Stage::Sylvester, AnyTensor::Paired6(a)) => match sylvester_check6(a, Side::A) {
            Ok(v) => sylvester_record(&v, opts.tol),
            Err(e) => record(stage, Verdict::Undetermined, e.to_string()),
        },
        (Stage::Sdp, _) => sdp_record(t, opts),
        (Stage::Meig, _) => meig_record(t, opts.seed, opts.tol),
        (Stage::Necessary | Stage::Sos | Stage::Sylvester, _) => {
            if opts.method == Method::Auto {
                return None;
            }
            na(stage)
        }
    })
}

/// Runs the selected stages, stopping at the first conclusive one.
pub fn check(t: &AnyTensor, opts: &CheckOptions) -> Report {
    let mut checks = Vec::new();
    let mut overall = Verdict::Undetermined;
    let mut decided_by = None;
    for &stage in opts.method.stages() {
        let t0 = Instant::now();
        let Some(mut rec) = run_stage(stage, t, opts) else { continue };
        rec.wall_time = t0.elapsed().as_secs_f64();
        let v = rec.verdict;
        checks.push(rec);
        if v != Verdict::Undetermined {
            overall = v;
            decided_by = Some(stage);
            break;
        }
    }
    Report { order: t.class().order(), class: class_name(t), tol: opts.tol, seed: opts.seed, checks, overall, decided_by }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.6e}"))
}

fn fmt_vec(v: &Vec3) -> String {
    format!("({:.6}, {:.6}, {:.6})", v[0], v[1], v[2])
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tensor: order {} ({})", self.order, self.class)?;
        writeln!(f, "{:<10} {:<13} {:>14} {:>6} {:>9}  note", "stage", "verdict", "margin", "iter", "time(s)")?;
        for c in &self.checks {
            let iter = c.iterations.map_or_else(|| "-".into(), |i| i.to_string());
            writeln!(
                f,
                "{:<10} {:<13} {:>14} {:>6} {:>9.3}  {}",
                c.stage.to_string(),
                c.verdict.to_string(),
                fmt_opt(c.margin),
                iter,
                c.wall_time,
                c.note
            )?;
        }
        let by = self.decided_by.map_or_else(String::new, |s| format!(" (by {s})"));
        writeln!(f, "overall: {}{by}", self.overall)?;
        if let Some(w) = self.checks.last().and_then(|c| c.witness.as_ref()) {
            writeln!(f, "witness: {}", describe(w))?;
        }
        Ok(())
    }
}

pub fn describe(w: &Witness) -> String {
    match w {
        Witness::Point { vectors, value } => {
            let mut s = String::new();
            for (name, v) in ["x", "y", "z"].iter().zip(vectors) {
                write!(s, "{name} = {}, ", fmt_vec(v)).unwrap();
            }
            write!(s, "form = {value:.6e}").unwrap();
            s
        }
        Witness::Unfolding { spec, lambda_min } => format!("unfolding ({}) lambda_min = {lambda_min:.6e}", spec.join(", ")),
        Witness::SdpBound { r, s, gamma, violation } => format!("order ({r},{s}) gamma = {gamma:.10e}, violation {violation:.1e}"),
    }
}
