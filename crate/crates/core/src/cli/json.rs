//! JSON shapes shared by the CLI reports.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::CMatrix;
use crate::multiport::Basis;
use crate::state::{EnsembleState, ModeLabel, PhotonState};

#[derive(Serialize)]
pub struct PhotonEntry {
    pub mode: ModeLabel,
    #[serde(with = "crate::state::complex_pair")]
    pub amplitude: Complex64,
}

#[derive(Serialize)]
pub struct EnsembleEntry {
    pub modes: Vec<ModeLabel>,
    #[serde(with = "crate::state::complex_pair")]
    pub amplitude: Complex64,
}

pub fn photon(state: &PhotonState) -> Vec<PhotonEntry> {
    state
        .iter()
        .map(|(m, a)| PhotonEntry {
            mode: *m,
            amplitude: *a,
        })
        .collect()
}

pub fn ensemble(state: &EnsembleState) -> Vec<EnsembleEntry> {
    state
        .iter()
        .map(|(m, a)| EnsembleEntry {
            modes: m.clone(),
            amplitude: *a,
        })
        .collect()
}

pub fn path_weights(state: &PhotonState) -> BTreeMap<String, f64> {
    state
        .path_probabilities()
        .into_iter()
        .map(|(p, w)| (p.to_string(), w))
        .collect()
}

/// Row-major matrix dump over a fixed basis; entries are `[re, im]`.
#[derive(Serialize)]
pub struct MatrixDump {
    pub basis: Vec<ModeLabel>,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl MatrixDump {
    pub fn new(basis: &Basis, m: &CMatrix) -> Self {
        MatrixDump {
            basis: basis.modes().to_vec(),
            rows: m
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}
