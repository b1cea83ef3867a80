//! Plain-text tensor files.
//!
//! ```text
//! # comment
//! order 4
//! class paired4
//! symmetrize false
//! 1 1 2 2  2
//! 1 2 1 2  -1/2
//! ```
//!
//! Header keys are `order`, `class` (paired4, elasticity4, paired6, elasticity6,
//! biblock, symmetric), `split` (bi-block only) and `symmetrize`. Entry lines hold
//! 1-based indices followed by a decimal or fraction; unlisted entries are zero.
//! With `symmetrize true` the entries are projected onto the class, otherwise the
//! class identities are validated to a relative tolerance of 1e-12.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{flat_index, symmetrize, unflat_index, validate_symmetry_tol, AnyTensor, SymmetryClass};

#[derive(Clone, Debug, PartialEq)]
pub struct FileEntry {
    /// 1-based.
    pub idx: Vec<usize>,
    pub val: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorFile {
    pub class: SymmetryClass,
    pub symmetrize: bool,
    pub entries: Vec<FileEntry>,
}

fn parse_value(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            (d != 0.0).then(|| n / d)
        }
        None => s.parse().ok(),
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

impl TensorFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut order = None;
        let mut class_name: Option<String> = None;
        let mut split = None;
        let mut symmetrize = false;
        let mut raw: Vec<(usize, Vec<&str>)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: String| Error::Parse { line: line_no, msg };
            if words[0].chars().all(|c| c.is_ascii_digit()) {
                raw.push((line_no, words));
                continue;
            }
            let key = words[0].trim_end_matches(':');
            let val = match words.get(1..) {
                Some(rest) if rest.len() == 1 => rest[0],
                _ => return Err(err(format!("expected `{key} <value>`"))),
            };
            match key {
                "order" => order = Some(val.parse::<usize>().map_err(|_| err(format!("bad order {val:?}")))?),
                "split" => split = Some(val.parse::<usize>().map_err(|_| err(format!("bad split {val:?}")))?),
                "class" => class_name = Some(val.to_string()),
                "symmetrize" => symmetrize = parse_bool(val).ok_or_else(|| err(format!("bad boolean {val:?}")))?,
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        let order = order.ok_or(Error::Parse { line: 0, msg: "missing `order`".into() })?;
        let class = match class_name.as_deref() {
            Some("paired4") | None if order == 4 => SymmetryClass::Paired4,
            Some("elasticity4") => SymmetryClass::Elasticity4,
            Some("paired6") | None if order == 6 => SymmetryClass::Paired6,
            Some("elasticity6") => SymmetryClass::Elasticity6,
            Some("biblock") => SymmetryClass::BiBlock {
                order,
                split: split.ok_or(Error::Parse { line: 0, msg: "bi-block class needs `split`".into() })?,
            },
            Some("symmetric") => SymmetryClass::Symmetric { order },
            Some(c) => return Err(Error::Parse { line: 0, msg: format!("unknown class {c:?} for order {order}") }),
            None => return Err(Error::Parse { line: 0, msg: format!("missing `class` for order {order}") }),
        };
        if class.order() != order {
            return Err(Error::Parse { line: 0, msg: format!("class {class:?} has order {}, header says {order}", class.order()) });
        }
        let mut seen = std::collections::HashSet::new();
        let mut entries = Vec::with_capacity(raw.len());
        for (line, words) in raw {
            let err = |msg: String| Error::Parse { line, msg };
            if words.len() != order + 1 {
                return Err(err(format!("expected {order} indices and a value")));
            }
            let idx = words[..order]
                .iter()
                .map(|w| match w.parse::<usize>() {
                    Ok(i @ 1..=3) => Ok(i),
                    _ => Err(err(format!("index {w:?} not in 1..=3"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let val = parse_value(words[order]).ok_or_else(|| err(format!("bad value {:?}", words[order])))?;
            if !val.is_finite() {
                return Err(err("non-finite value".into()));
            }
            if !seen.insert(idx.clone()) {
                return Err(err("duplicate entry".into()));
            }
            entries.push(FileEntry { idx, val });
        }
        Ok(TensorFile { class, symmetrize, entries })
    }

    pub fn order(&self) -> usize {
        self.class.order()
    }

    pub fn dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.class.len()];
        for e in &self.entries {
            let idx: Vec<usize> = e.idx.iter().map(|i| i - 1).collect();
            a[flat_index(&idx)] = e.val;
        }
        a
    }

    pub fn to_tensor(&self) -> Result<AnyTensor> {
        let a = self.dense();
        if self.symmetrize {
            return symmetrize(&a, self.class);
        }
        let report = validate_symmetry_tol(&a, self.class, 1e-12)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "{} symmetry violations, e.g. a{:?} = {} but a{:?} = {} (set `symmetrize true` to project)",
                    report.violations.len(),
                    v.index,
                    v.value,
                    v.partner,
                    v.partner_value
                ),
            });
        }
        // Snap tolerance-level differences so the exact invariants hold.
        symmetrize(&a, self.class)
    }

    /// All nonzero entries, lexicographic order.
    pub fn from_tensor(t: &AnyTensor) -> Self {
        let class = t.class();
        let mut idx = vec![0; class.order()];
        let entries = t
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(off, &val)| {
                unflat_index(off, &mut idx);
                FileEntry { idx: idx.iter().map(|i| i + 1).collect(), val }
            })
            .collect();
        TensorFile { class, symmetrize: false, entries }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let (name, split) = match self.class {
            SymmetryClass::Paired4 => ("paired4", None),
            SymmetryClass::Elasticity4 => ("elasticity4", None),
            SymmetryClass::Paired6 => ("paired6", None),
            SymmetryClass::Elasticity6 => ("elasticity6", None),
            SymmetryClass::BiBlock { split, .. } => ("biblock", Some(split)),
            SymmetryClass::Symmetric { .. } => ("symmetric", None),
        };
        writeln!(s, "order {}", self.order()).unwrap();
        writeln!(s, "class {name}").unwrap();
        if let Some(t) = split {
            writeln!(s, "split {t}").unwrap();
        }
        writeln!(s, "symmetrize {}", self.symmetrize).unwrap();
        s.push('\n');
        for e in &self.entries {
            let idx: Vec<String> = e.idx.iter().map(|i| i.to_string()).collect();
            writeln!(s, "{}  {}", idx.join(" "), e.val).unwrap();
        }
        s
    }
}

pub fn load(path: &Path) -> Result<AnyTensor> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
    TensorFile::parse(&text)?.to_tensor()
}
