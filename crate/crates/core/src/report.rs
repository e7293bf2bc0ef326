//! Residual reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::expr::EvalPoint;
use crate::sampling::point_map;

const WORST_KEPT: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    pub point: BTreeMap<String, f64>,
    pub residual: f64,
}

/// Sampled residual magnitudes of one check.
///
/// `pass` holds exactly when every residual is finite and `max <= tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check: String,
    pub seed: u64,
    pub samples: usize,
    pub max: f64,
    pub mean: f64,
    pub tol: f64,
    pub pass: bool,
    pub worst_points: Vec<WorstPoint>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub resampled: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl ResidualReport {
    pub fn failed_parts(&self) -> Option<&str> {
        self.note.as_deref()
    }
}

pub struct ReportBuilder {
    check: String,
    seed: u64,
    tol: f64,
    residuals: Vec<f64>,
    worst: Vec<WorstPoint>,
    resampled: usize,
    note: Option<String>,
}

impl ReportBuilder {
    pub fn new(check: impl Into<String>, seed: u64, tol: f64) -> Self {
        ReportBuilder {
            check: check.into(),
            seed,
            tol,
            residuals: Vec::new(),
            worst: Vec::new(),
            resampled: 0,
            note: None,
        }
    }

    pub fn push(&mut self, point: &EvalPoint, residual: f64) {
        self.push_map(point_map(point), residual);
    }

    pub fn push_map(&mut self, point: BTreeMap<String, f64>, residual: f64) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        self.residuals.push(r);
        let pos = self.worst.iter().position(|w| w.residual < r).unwrap_or(self.worst.len());
        if pos < WORST_KEPT {
            self.worst.insert(pos, WorstPoint { point, residual: r });
            self.worst.truncate(WORST_KEPT);
        }
    }

    pub fn add_resampled(&mut self, n: usize) {
        self.resampled += n;
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub fn finish(self) -> ResidualReport {
        let n = self.residuals.len();
        let max = self.residuals.iter().copied().fold(0.0, f64::max);
        let mean = if n == 0 {
            0.0
        } else {
            self.residuals.iter().sum::<f64>() / n as f64
        };
        if self.resampled > 0 {
            log::info!("{}: {} jet samples resampled", self.check, self.resampled);
        }
        ResidualReport {
            pass: n > 0 && max.is_finite() && max <= self.tol,
            check: self.check,
            seed: self.seed,
            samples: n,
            max,
            mean,
            tol: self.tol,
            worst_points: self.worst,
            resampled: self.resampled,
            note: self.note,
            residuals: self.residuals,
        }
    }
}

/// Combine several reports into one: residuals concatenated, worst points
/// merged, pass only if all parts pass.
pub fn merge(check: impl Into<String>, seed: u64, tol: f64, parts: &[ResidualReport]) -> ResidualReport {
    let mut b = ReportBuilder::new(check, seed, tol);
    let mut failing = Vec::new();
    for p in parts {
        for r in &p.residuals {
            b.residuals.push(*r);
        }
        b.worst.extend(p.worst_points.iter().cloned());
        b.resampled += p.resampled;
        if !p.pass {
            failing.push(p.check.clone());
        }
    }
    b.worst.sort_by(|a, c| c.residual.total_cmp(&a.residual));
    b.worst.truncate(WORST_KEPT);
    if !failing.is_empty() {
        b.note(format!("failing: {}", failing.join(", ")));
    }
    let mut r = b.finish();
    r.pass = r.pass && parts.iter().all(|p| p.pass);
    r
}

/// `|sum of terms| / (1 + max |term|)`.
pub fn scaled_residual(terms: &[num_complex::Complex64]) -> f64 {
    let mut sum = num_complex::Complex64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for t in terms {
        sum += t;
        scale = scale.max(t.norm());
    }
    sum.norm() / (1.0 + scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_five_worst_in_order() {
        let mut b = ReportBuilder::new("demo", 1, 0.5);
        for (k, r) in [0.1, 0.7, 0.3, 0.9, 0.2, 0.05, 0.8].iter().enumerate() {
            b.push(&EvalPoint::from_reals(&[("x", k as f64)]), *r);
        }
        let r = b.finish();
        assert_eq!(r.samples, 7);
        assert!(!r.pass);
        let worst: Vec<f64> = r.worst_points.iter().map(|w| w.residual).collect();
        assert_eq!(worst, vec![0.9, 0.8, 0.7, 0.3, 0.2]);
        assert_eq!(r.max, 0.9);
    }

    #[test]
    fn nan_fails_and_json_shape() {
        let mut b = ReportBuilder::new("nan", 3, 1.0);
        b.push(&EvalPoint::new(), f64::NAN);
        let r = b.finish();
        assert!(!r.pass);
        let mut b = ReportBuilder::new("ok", 3, 1.0);
        b.push(&EvalPoint::from_reals(&[("x", 0.5)]), 0.0);
        let json = serde_json::to_string(&b.finish()).unwrap();
        assert_eq!(
            json,
            r#"{"check":"ok","seed":3,"samples":1,"max":0.0,"mean":0.0,"tol":1.0,"pass":true,"worst_points":[{"point":{"x":0.5},"residual":0.0}]}"#
        );
    }
}
