use serde::{Deserialize, Serialize};

use super::PathMeasure;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub path: Vec<Vec<f64>>,
    pub weight: f64,
}

/// On-disk layout: `{"d": .., "T": .., "atoms": [{"path": [[..]; T], "weight": ..}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub d: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub atoms: Vec<AtomJson>,
}

impl MeasureJson {
    pub fn into_measure<S: Scalar>(self) -> Result<PathMeasure<S>> {
        let (d, t) = (self.d, self.t);
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (i, a) in self.atoms.into_iter().enumerate() {
            if a.path.len() != t {
                return Err(Error::Dimension(format!(
                    "atoms[{i}].path has {} time steps, expected T = {t}",
                    a.path.len()
                )));
            }
            let mut flat = Vec::with_capacity(d * t);
            for (s, x) in a.path.iter().enumerate() {
                if x.len() != d {
                    return Err(Error::Dimension(format!(
                        "atoms[{i}].path[{s}] has {} entries, expected d = {d}",
                        x.len()
                    )));
                }
                flat.extend(x.iter().map(|&v| S::of(v)));
            }
            atoms.push((flat, S::of(a.weight)));
        }
        PathMeasure::new(d, t, atoms)
    }
}

pub fn from_json<S: Scalar>(text: &str) -> Result<PathMeasure<S>> {
    let raw: MeasureJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.into_measure()
}

pub fn to_json_value<S: Scalar>(mu: &PathMeasure<S>) -> MeasureJson {
    let d = mu.dim();
    MeasureJson {
        d,
        t: mu.horizon(),
        atoms: mu
            .atoms()
            .map(|(p, w)| AtomJson {
                path: p.chunks(d).map(|x| x.iter().map(|v| v.f64()).collect()).collect(),
                weight: w.f64(),
            })
            .collect(),
    }
}

pub fn to_json<S: Scalar>(mu: &PathMeasure<S>) -> String {
    serde_json::to_string(&to_json_value(mu)).expect("measure serializes")
}
