//! Per-iteration run records and their CSV / JSON export.
//!
//! The CSV schema is one header row followed by one row per iterate with
//! columns `n, alpha, gamma, residual_1..residual_N, error,
//! inner_iters_1..inner_iters_N, omega, envelope_bound`, floats printed with
//! 17 significant digits so reruns are byte-identical. Metadata travels in
//! leading `#` comment lines (problem hash, method, the stopping-index
//! marker for noisy Newton runs). The JSON variant additionally carries the
//! full iterate and sub-iterate vectors when the dimension is at most 50.

use std::io::{self, Write};

use serde::Serialize;

use crate::space::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Implicit,
    ImplicitNoisy,
    Explicit,
    Newton,
    NewtonNoisy,
}

impl MethodKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodKind::Implicit => "implicit",
            MethodKind::ImplicitNoisy => "implicit_noisy",
            MethodKind::Explicit => "explicit",
            MethodKind::Newton => "newton",
            MethodKind::NewtonNoisy => "newton_noisy",
        }
    }
}

/// State at iterate n plus the statistics of the step that consumed it (the
/// sub-iterates computed *from* this iterate; empty on the final record).
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub n: usize,
    pub iterate: Vector,
    pub sub_iterates: Vec<Vector>,
    pub alpha: f64,
    pub gamma: Option<f64>,
    pub residuals: Vec<f64>,
    pub error: Option<f64>,
    pub inner_iterations: Vec<usize>,
    pub inner_residuals: Vec<f64>,
    pub collapse_deviation: Option<f64>,
    pub omega: Option<f64>,
    pub envelope_bound: Option<f64>,
}

/// Full run history: one record per iterate, in order.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub method: MethodKind,
    pub n_equations: usize,
    pub records: Vec<IterationRecord>,
    /// Stopping index marker for noisy Newton runs.
    pub n_star: Option<usize>,
    pub notes: Vec<String>,
}

impl RunTrace {
    pub fn new(method: MethodKind, n_equations: usize) -> Self {
        RunTrace {
            method,
            n_equations,
            records: Vec::new(),
            n_star: None,
            notes: Vec::new(),
        }
    }

    pub fn final_iterate(&self) -> &Vector {
        &self
            .records
            .last()
            .expect("trace holds at least the initial record")
            .iterate
    }

    pub fn final_error(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.error)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.error).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.alpha).collect()
    }

    pub fn max_error(&self) -> Option<f64> {
        let errs = self.errors();
        if errs.len() == self.records.len() {
            Some(errs.into_iter().fold(0.0, f64::max))
        } else {
            None
        }
    }

    /// Writes the deterministic CSV form. `problem_hash` goes into a leading
    /// comment so comparisons can refuse cross-problem tables.
    pub fn write_csv<W: Write>(&self, problem_hash: &str, mut w: W) -> io::Result<()> {
        writeln!(w, "# problem_hash={problem_hash}")?;
        writeln!(w, "# method={}", self.method.as_str())?;
        if let Some(n_star) = self.n_star {
            writeln!(w, "# n_star={n_star}")?;
        }
        write!(w, "n,alpha,gamma")?;
        for i in 1..=self.n_equations {
            write!(w, ",residual_{i}")?;
        }
        write!(w, ",error")?;
        for i in 1..=self.n_equations {
            write!(w, ",inner_iters_{i}")?;
        }
        writeln!(w, ",omega,envelope_bound")?;
        for rec in &self.records {
            write!(w, "{},{}", rec.n, fmt_float(rec.alpha))?;
            match rec.gamma {
                Some(g) => write!(w, ",{}", fmt_float(g))?,
                None => write!(w, ",")?,
            }
            for i in 0..self.n_equations {
                match rec.residuals.get(i) {
                    Some(r) => write!(w, ",{}", fmt_float(*r))?,
                    None => write!(w, ",")?,
                }
            }
            match rec.error {
                Some(e) => write!(w, ",{}", fmt_float(e))?,
                None => write!(w, ",")?,
            }
            for i in 0..self.n_equations {
                match rec.inner_iterations.get(i) {
                    Some(it) => write!(w, ",{it}")?,
                    None => write!(w, ",")?,
                }
            }
            match rec.omega {
                Some(o) => write!(w, ",{}", fmt_float(o))?,
                None => write!(w, ",")?,
            }
            match rec.envelope_bound {
                Some(b) => writeln!(w, ",{}", fmt_float(b))?,
                None => writeln!(w, ",")?,
            }
        }
        Ok(())
    }

    /// JSON form; iterate vectors are included only when the dimension is at
    /// most 50.
    pub fn to_json(&self, problem_hash: &str) -> serde_json::Value {
        let dim = self.records.first().map_or(0, |r| r.iterate.len());
        let include_vectors = dim <= 50;
        let records: Vec<JsonRecord> = self
            .records
            .iter()
            .map(|r| JsonRecord {
                n: r.n,
                alpha: r.alpha,
                gamma: r.gamma,
                residuals: r.residuals.clone(),
                error: r.error,
                inner_iterations: r.inner_iterations.clone(),
                inner_residuals: r.inner_residuals.clone(),
                collapse_deviation: r.collapse_deviation,
                omega: r.omega,
                envelope_bound: r.envelope_bound,
                iterate: include_vectors.then(|| r.iterate.iter().cloned().collect()),
                sub_iterates: include_vectors.then(|| {
                    r.sub_iterates
                        .iter()
                        .map(|s| s.iter().cloned().collect())
                        .collect()
                }),
            })
            .collect();
        serde_json::json!({
            "problem_hash": problem_hash,
            "method": self.method.as_str(),
            "n_equations": self.n_equations,
            "n_star": self.n_star,
            "notes": self.notes,
            "records": records,
        })
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct JsonRecord {
    n: usize,
    alpha: f64,
    gamma: Option<f64>,
    residuals: Vec<f64>,
    error: Option<f64>,
    inner_iterations: Vec<usize>,
    inner_residuals: Vec<f64>,
    collapse_deviation: Option<f64>,
    omega: Option<f64>,
    envelope_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterate: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sub_iterates: Option<Vec<Vec<f64>>>,
}
