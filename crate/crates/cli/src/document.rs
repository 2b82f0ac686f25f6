//! JSON input documents: sparse curvature components, completed under the
//! Riemann symmetries.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wickgit_core::curvature::{symmetry_residual, CurvatureBundle, RealTensor, SYMMETRY_TOL};
use wickgit_core::Signature;

use crate::CliError;

/// Two representatives of one component may differ by at most this much
/// (relative to the larger of 1 and the value).
pub const CONFLICT_TOL: f64 = 1e-12;
/// Inputs whose first Bianchi residual exceeds this are rejected.
pub const BIANCHI_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub idx: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub dimension: usize,
    pub signature: [usize; 2],
    pub riemann: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derivatives: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Images of a rank-`r` index under the Riemann symmetries of its first
/// four slots, with signs.
fn orbit(idx: &[usize]) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::with_capacity(8);
    for exchange in [false, true] {
        for s1 in [false, true] {
            for s2 in [false, true] {
                let mut head = [idx[0], idx[1], idx[2], idx[3]];
                if s1 {
                    head.swap(0, 1);
                }
                if s2 {
                    head.swap(2, 3);
                }
                if exchange {
                    head = [head[2], head[3], head[0], head[1]];
                }
                let mut full = head.to_vec();
                full.extend_from_slice(&idx[4..]);
                out.push((full, if s1 ^ s2 { -1.0 } else { 1.0 }));
            }
        }
    }
    out
}

fn complete(entries: &[Entry], n: usize, rank: usize, what: &str) -> Result<RealTensor, CliError> {
    let mut t = RealTensor::zeros(n, rank);
    let mut set = vec![false; n.pow(rank as u32)];
    for e in entries {
        if e.idx.len() != rank {
            return Err(CliError::Input(format!("{what}: index {:?} must have {rank} entries", e.idx)));
        }
        if let Some(&bad) = e.idx.iter().find(|&&i| i >= n) {
            return Err(CliError::Input(format!("{what}: index {:?} has {bad} out of range for dimension {n}", e.idx)));
        }
        if !e.re.is_finite() || !e.im.is_finite() {
            return Err(CliError::Input(format!("{what}: component {:?} is not finite", e.idx)));
        }
        if e.im != 0.0 {
            return Err(CliError::Input(format!(
                "{what}: component {:?} has imaginary part {}; real-slice data must be real",
                e.idx, e.im
            )));
        }
        if e.idx[0] == e.idx[1] || e.idx[2] == e.idx[3] {
            if e.re.abs() > CONFLICT_TOL {
                return Err(CliError::Input(format!(
                    "{what}: component {:?} = {} contradicts antisymmetry in an index pair",
                    e.idx, e.re
                )));
            }
            continue;
        }
        for (image, sign) in orbit(&e.idx) {
            let k = t.offset(&image);
            let value = sign * e.re;
            if set[k] && (t.data()[k] - value).abs() > CONFLICT_TOL * value.abs().max(1.0) {
                return Err(CliError::Input(format!(
                    "{what}: component {:?} conflicts with an earlier entry ({} vs {})",
                    e.idx,
                    value,
                    t.data()[k]
                )));
            }
            set[k] = true;
            t.set(&image, value);
        }
    }
    Ok(t)
}

/// Remove the totally antisymmetric part, which is what the first Bianchi
/// identity forbids.
fn project_bianchi(r: &RealTensor) -> RealTensor {
    let mut out = r.clone();
    for idx in r.indices().collect::<Vec<_>>() {
        let [a, b, c, d] = [idx[0], idx[1], idx[2], idx[3]];
        let cyclic = r.get(&[a, b, c, d]) + r.get(&[a, c, d, b]) + r.get(&[a, d, b, c]);
        out.set(&idx, r.get(&idx) - cyclic / 3.0);
    }
    out
}

impl InputDocument {
    pub fn into_bundle(self) -> Result<CurvatureBundle, CliError> {
        let [p, q] = self.signature;
        if p + q != self.dimension {
            return Err(CliError::Input(format!("signature [{p},{q}] does not match dimension {}", self.dimension)));
        }
        let sig = Signature::new(p, q)?;
        let n = sig.n();
        let mut riemann = complete(&self.riemann, n, 4, "riemann")?;
        let residual = symmetry_residual(&riemann);
        let scale = riemann.norm_inf().max(1.0);
        if residual.bianchi > BIANCHI_TOL * scale {
            return Err(CliError::Input(format!(
                "riemann: first Bianchi identity violated by {:.3e} at {:?}",
                residual.bianchi, residual.bianchi_at
            )));
        }
        if residual.bianchi > SYMMETRY_TOL * scale {
            riemann = project_bianchi(&riemann);
        }
        let derivatives = self
            .derivatives
            .iter()
            .enumerate()
            .map(|(l, entries)| complete(entries, n, 5 + l, &format!("derivative {}", l + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        let bundle = CurvatureBundle::new(sig, riemann, derivatives)?;
        Ok(match self.label {
            Some(l) => bundle.with_label(l),
            None => bundle,
        })
    }

    /// One entry per non-zero symmetry class: the lexicographically
    /// smallest index of the class.
    pub fn from_bundle(bundle: &CurvatureBundle) -> Self {
        let sparse = |t: &RealTensor| -> Vec<Entry> {
            let mut out = BTreeMap::new();
            for idx in t.indices() {
                let v = t.get(&idx);
                if v == 0.0 {
                    continue;
                }
                let rep = orbit(&idx).into_iter().map(|(i, _)| i).min().expect("non-empty orbit");
                if rep == idx {
                    out.insert(idx, v);
                }
            }
            out.into_iter().map(|(idx, re)| Entry { idx, re, im: 0.0 }).collect()
        };
        let sig = bundle.signature();
        Self {
            dimension: sig.n(),
            signature: [sig.p(), sig.q()],
            riemann: sparse(bundle.riemann()),
            derivatives: bundle.derivatives().iter().map(sparse).collect(),
            label: bundle.label().map(str::to_string),
        }
    }
}

pub fn parse_document(text: &str) -> Result<CurvatureBundle, CliError> {
    let doc: InputDocument = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed document: {e}")))?;
    doc.into_bundle()
}

pub fn parse_input(path: &Path) -> Result<CurvatureBundle, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_document(&text)
}

pub fn emit_document(bundle: &CurvatureBundle) -> String {
    serde_json::to_string_pretty(&InputDocument::from_bundle(bundle)).expect("documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use wickgit_core::curvature::catalog_metric;

    #[test]
    fn single_entry_sphere() {
        let b = parse_document(r#"{"dimension":2,"signature":[2,0],"riemann":[{"idx":[0,1,0,1],"re":1,"im":0}]}"#).unwrap();
        let nonzero = b.riemann().data().iter().filter(|x| **x != 0.0).count();
        assert_eq!(nonzero, 4);
        assert_eq!(b.riemann().get(&[1, 0, 0, 1]), -1.0);
    }

    #[test]
    fn empty_is_flat() {
        let b = parse_document(r#"{"dimension":3,"signature":[2,1],"riemann":[]}"#).unwrap();
        assert_eq!(b.riemann().norm_inf(), 0.0);
    }

    #[test]
    fn rejections() {
        let bad = [
            r#"{"dimension":2,"signature":[2,0],"riemann":[{"idx":[0,1,0,1],"re":1},{"idx":[1,0,0,1],"re":1}]}"#,
            r#"{"dimension":2,"signature":[2,0],"riemann":[{"idx":[0,0,0,1],"re":1}]}"#,
            r#"{"dimension":2,"signature":[2,0],"riemann":[{"idx":[0,1,0,1],"re":1,"im":0.5}]}"#,
            r#"{"dimension":2,"signature":[2,0],"riemann":[{"idx":[0,1,0,2],"re":1}]}"#,
            r#"{"dimension":3,"signature":[2,0],"riemann":[]}"#,
            r#"{"dimension":2,"signature":[2,0]}"#,
        ];
        for doc in bad {
            assert!(matches!(parse_document(doc), Err(CliError::Input(_))), "{doc}");
        }
    }

    #[test]
    fn bianchi_violation_names_the_quadruple() {
        let doc = r#"{"dimension":4,"signature":[4,0],"riemann":[{"idx":[0,1,2,3],"re":1}]}"#;
        let err = parse_document(doc).unwrap_err().to_string();
        assert!(err.contains("Bianchi") && err.contains("[0, 1, 2, 3]"), "{err}");
    }

    #[test]
    fn catalog_round_trip_is_exact() {
        for name in ["s2xs2", "lorentz_L", "neutral_N", "ppwave_vsi", "flat(2,2)"] {
            let b = catalog_metric(name).unwrap();
            assert_eq!(parse_document(&emit_document(&b)).unwrap(), b, "{name}");
        }
    }
}
