use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::ExprError;
use crate::fdsolver::SolverError;
use crate::solutions::SolutionError;
use crate::transforms::TransformError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("evaluation failed at x = {x}, t = {t}: {source}")]
    Domain { x: f64, t: f64, source: ExprError },
    #[error("trajectory from x = {x}, t = {t} left the domain")]
    Escape { x: f64, t: f64 },
    #[error("no target node has enough neighbours for reconstruction")]
    Coverage,
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("{0} needs a uniform spatial grid")]
    NonUniformGrid(&'static str),
    #[error("empty sample")]
    Empty,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub const ERRATUM_CANDIDATE: &str = "erratum-candidate";

/// Outcome of one check, serialisable as a single JSON record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub case: String,
    pub n: usize,
    pub max: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded: Option<String>,
    /// `erratum-candidate` when a printed formula fails its own check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    /// Symbolic residual attached to an erratum candidate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Negative control: passes when `max` exceeds `tol`.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub must_exceed: bool,
}

impl Report {
    /// `pass` is `max < tol`; a NaN maximum fails.
    pub fn new(check: &str, case: &str, n: usize, max: f64, tol: f64) -> Self {
        Report {
            check: check.into(),
            case: case.into(),
            n,
            max,
            tol,
            pass: max < tol,
            argmax: None,
            excluded: None,
            status: None,
            residual: None,
            note: None,
            must_exceed: false,
        }
    }

    /// A negative control: passes when `max > threshold`.
    pub fn exceeding(check: &str, case: &str, n: usize, max: f64, threshold: f64) -> Self {
        Report {
            pass: max > threshold,
            must_exceed: true,
            ..Report::new(check, case, n, max, threshold)
        }
    }

    pub fn with_case(mut self, case: &str) -> Self {
        self.case = case.into();
        self
    }

    /// Turns an ordinary check into a negative control.
    pub fn negated(self) -> Self {
        Report {
            pass: self.max > self.tol,
            must_exceed: true,
            ..self
        }
    }

    /// Failing records that should fail a run; erratum candidates do not.
    pub fn is_blocking(&self) -> bool {
        !self.pass && self.status.as_deref() != Some(ERRATUM_CANDIDATE)
    }

    pub fn with_argmax(mut self, at: (f64, f64)) -> Self {
        self.argmax = Some(at);
        self
    }

    pub fn with_excluded(mut self, loci: &str) -> Self {
        self.excluded = Some(loci.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Same measurement judged at another tolerance.
    pub fn at_tolerance(&self, tol: f64) -> Self {
        Report {
            tol,
            pass: if self.must_exceed {
                self.max > tol
            } else {
                self.max < tol
            },
            ..self.clone()
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports contain only plain data")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<22} {:<13} n={:<5} max={:.3e} {}={:.0e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            self.case,
            self.n,
            self.max,
            if self.must_exceed { "floor" } else { "tol" },
            self.tol
        )?;
        if let Some(s) = &self.status {
            write!(f, " [{s}]")?;
        }
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        Ok(())
    }
}

/// Running maximum of `|value|` with its location; NaN wins.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Worst {
    pub max: f64,
    pub at: (f64, f64),
    pub n: usize,
}

impl Worst {
    pub fn new() -> Self {
        Worst {
            max: 0.0,
            at: (f64::NAN, f64::NAN),
            n: 0,
        }
    }

    pub fn push(&mut self, value: f64, at: (f64, f64)) {
        self.n += 1;
        let v = value.abs();
        if v > self.max || (v.is_nan() && !self.max.is_nan()) {
            self.max = v;
            self.at = at;
        }
    }

    pub fn report(&self, check: &str, case: &str, tol: f64) -> Report {
        Report::new(check, case, self.n, self.max, tol).with_argmax(self.at)
    }
}
