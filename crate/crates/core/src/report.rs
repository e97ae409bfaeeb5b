//! Structured experiment outcomes.
//!
//! Field order is fixed by the struct definitions and parameters live in a
//! `BTreeMap`, so serializing the same report twice gives identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::CertifiedBound;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Num(f64),
    Text(String),
    List(Vec<f64>),
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Num(v)
    }
}

impl From<usize> for Param {
    fn from(v: usize) -> Self {
        Param::Int(v as i64)
    }
}

impl From<u64> for Param {
    fn from(v: u64) -> Self {
        Param::Int(v as i64)
    }
}

impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_string())
    }
}

impl From<Vec<f64>> for Param {
    fn from(v: Vec<f64>) -> Self {
        Param::List(v)
    }
}

/// One checked quantity: an enclosure `[lower, upper]` and whether it met
/// its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
    pub tol: f64,
    pub witness: Vec<f64>,
    pub pass: bool,
}

impl ResultEntry {
    /// An exactly computed value.
    pub fn value(label: impl Into<String>, v: f64, pass: bool) -> Self {
        ResultEntry { label: label.into(), lower: v, upper: v, tol: 0.0, witness: Vec::new(), pass }
    }

    pub fn bound(label: impl Into<String>, b: &CertifiedBound, pass: bool) -> Self {
        ResultEntry {
            label: label.into(),
            lower: b.lower,
            upper: b.upper,
            tol: b.tol,
            witness: b.witness.map(|(x, y)| vec![x, y]).unwrap_or_default(),
            pass,
        }
    }

    pub fn with_witness(mut self, points: Vec<f64>) -> Self {
        self.witness = points;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub experiment: String,
    pub alpha: f64,
    pub parameters: BTreeMap<String, Param>,
    pub seed: Option<u64>,
    pub results: Vec<ResultEntry>,
    pub pass: bool,
}

impl CertificateReport {
    pub fn new(experiment: impl Into<String>, alpha: f64) -> Self {
        CertificateReport {
            experiment: experiment.into(),
            alpha,
            parameters: BTreeMap::new(),
            seed: None,
            results: Vec::new(),
            pass: true,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Param>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<Param>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, entry: ResultEntry) {
        self.pass &= entry.pass;
        self.results.push(entry);
    }

    pub fn extend(&mut self, other: CertificateReport) {
        for e in other.results {
            self.push(e);
        }
    }

    pub fn entry(&self, label: &str) -> Option<&ResultEntry> {
        self.results.iter().find(|e| e.label == label)
    }
}
