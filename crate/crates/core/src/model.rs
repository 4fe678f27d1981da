//! The semi-linear bond-pricing class, its case split and residual operator.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{self, Expr, ExprError, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("rho must be non-zero")]
    RhoZero,
    #[error("delta = {0} is excluded from the class (delta must differ from 0 and 1)")]
    DeltaExcluded(f64),
    #[error("source term must not depend on t")]
    SourceDependsOnTime,
    #[error("unbound symbol `{0}` in expression")]
    UnboundSymbol(String),
    #[error("unknown classical model `{0}`")]
    UnknownModel(String),
    #[error("constraint `{0}` violated")]
    Violated(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// The six real coefficients of the class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
    pub rho: f64,
}

/// Whether `delta ∈ {0, 1}` is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaMode {
    Strict,
    /// Allows `delta ∈ {0, 1}`; several catalogued solutions need `delta = 0`.
    #[default]
    Relaxed,
}

impl Params {
    pub const NAMES: [&'static str; 6] = ["alpha", "beta", "gamma", "delta", "lambda", "rho"];

    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, lambda: f64, rho: f64) -> Self {
        Params {
            alpha,
            beta,
            gamma,
            delta,
            lambda,
            rho,
        }
    }

    pub fn validate(&self, mode: DeltaMode) -> Result<(), ModelError> {
        if self.rho == 0.0 {
            return Err(ModelError::RhoZero);
        }
        if mode == DeltaMode::Strict && (self.delta == 0.0 || self.delta == 1.0) {
            return Err(ModelError::DeltaExcluded(self.delta));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "delta" => self.delta,
            "lambda" => self.lambda,
            "rho" => self.rho,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "delta" => &mut self.delta,
            "lambda" => &mut self.lambda,
            "rho" => &mut self.rho,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub fn bindings(&self) -> BTreeMap<String, f64> {
        Self::NAMES
            .iter()
            .map(|n| (n.to_string(), self.get(n).expect("known name")))
            .collect()
    }

    /// Diffusion coefficient `½ρ²x^{2γ}`.
    pub fn diffusion(&self, x: f64) -> f64 {
        0.5 * self.rho * self.rho * x.powf(2.0 * self.gamma)
    }

    /// Drift coefficient `α + βx − λρx^δ`.
    pub fn drift(&self, x: f64) -> f64 {
        self.alpha + self.beta * x - self.lambda * self.rho * x.powf(self.delta)
    }
}

impl Default for Params {
    fn default() -> Self {
        Params::new(0.0, 0.0, 0.0, 0.5, 0.0, 1.0)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={} beta={} gamma={} delta={} lambda={} rho={}",
            self.alpha, self.beta, self.gamma, self.delta, self.lambda, self.rho
        )
    }
}

/// Which equivalence-transformation branch applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Generic,
    GammaOne,
    GammaHalf,
    /// `delta = 2 gamma − 1`.
    DeltaChain,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::Generic => "Generic",
            CaseTag::GammaOne => "GammaOne",
            CaseTag::GammaHalf => "GammaHalf",
            CaseTag::DeltaChain => "DeltaChain",
        })
    }
}

pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-12;

/// Precedence: `GammaOne > GammaHalf > DeltaChain > Generic`.
pub fn classify(p: &Params, tol: f64) -> CaseTag {
    if (p.gamma - 1.0).abs() <= tol {
        CaseTag::GammaOne
    } else if (p.gamma - 0.5).abs() <= tol {
        CaseTag::GammaHalf
    } else if (p.delta - (2.0 * p.gamma - 1.0)).abs() <= tol {
        CaseTag::DeltaChain
    } else {
        CaseTag::Generic
    }
}

/// Bond-pricing equation with a concrete source `f(x, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeProblem {
    pub params: Params,
    pub source: Expr,
}

fn check_source(source: &Expr) -> Result<(), ModelError> {
    for v in source.variables() {
        match v.as_str() {
            "x" | "u" => {}
            "t" => return Err(ModelError::SourceDependsOnTime),
            other => return Err(ModelError::UnboundSymbol(other.to_string())),
        }
    }
    Ok(())
}

impl PdeProblem {
    pub fn new(params: Params, source: Expr) -> Result<Self, ModelError> {
        params.validate(DeltaMode::Relaxed)?;
        check_source(&source)?;
        Ok(PdeProblem { params, source })
    }

    /// Residual of `u(x, t)` at one point, with exact symbolic derivatives.
    pub fn residual(&self, u: &Expr, x: f64, t: f64) -> Result<f64, ExprError> {
        Equation::Bond(self.clone()).operator(u)?.eval(x, t)
    }
}

/// An equation in one of the frames the transformation chain visits.
#[derive(Debug, Clone, PartialEq)]
pub enum Equation {
    /// `u_t + ½ρ²x^{2γ}u_xx + (α+βx−λρx^δ)u_x − f = 0`.
    Bond(PdeProblem),
    /// `u_t − u_xx − f = 0`, the heat equation with a nonlinear source.
    Heat { source: Expr },
}

impl Equation {
    pub fn heat(source: Expr) -> Result<Self, ModelError> {
        check_source(&source)?;
        Ok(Equation::Heat { source })
    }

    pub fn source(&self) -> &Expr {
        match self {
            Equation::Bond(p) => &p.source,
            Equation::Heat { source } => source,
        }
    }

    /// `(time coefficient, diffusion, drift)` at `x`.
    pub fn coefficients(&self, x: f64) -> (f64, f64, f64) {
        match self {
            Equation::Bond(p) => (1.0, p.params.diffusion(x), p.params.drift(x)),
            Equation::Heat { .. } => (1.0, -1.0, 0.0),
        }
    }

    /// Precomputes the derivatives of `u` needed for repeated residual evaluation.
    pub fn operator(&self, u: &Expr) -> Result<ResidualOperator, ExprError> {
        for v in u.variables() {
            if v != "x" && v != "t" {
                return Err(ExprError::Unbound(v));
            }
        }
        let u_x = u.differentiate("x");
        Ok(ResidualOperator {
            equation: self.clone(),
            u: u.clone(),
            u_t: u.differentiate("t"),
            u_xx: u_x.differentiate("x"),
            u_x,
        })
    }

    /// Residual given the value and derivatives of a candidate solution.
    pub fn residual_from_jet(
        &self,
        x: f64,
        u: f64,
        u_t: f64,
        u_x: f64,
        u_xx: f64,
    ) -> Result<f64, ExprError> {
        let (a_t, diff, drift) = self.coefficients(x);
        let f = self.source().eval(&Point::new(x, 0.0, u))?;
        Ok(a_t * u_t + diff * u_xx + drift * u_x - f)
    }
}

/// Residual evaluator for a fixed candidate `u(x, t)`.
#[derive(Debug, Clone)]
pub struct ResidualOperator {
    equation: Equation,
    u: Expr,
    u_t: Expr,
    u_x: Expr,
    u_xx: Expr,
}

impl ResidualOperator {
    pub fn eval(&self, x: f64, t: f64) -> Result<f64, ExprError> {
        let p = Point::new(x, t, 0.0);
        let u = self.u.eval(&p)?;
        self.equation.residual_from_jet(
            x,
            u,
            self.u_t.eval(&p)?,
            self.u_x.eval(&p)?,
            self.u_xx.eval(&p)?,
        )
    }

    /// The residual as an expression in `(x, t)`.
    pub fn symbolic(&self) -> Expr {
        let x = Expr::x();
        let (time, diffusion, drift) = match &self.equation {
            Equation::Bond(p) => {
                let q = &p.params;
                let diffusion = (0.5 * q.rho * q.rho) * x.powf(2.0 * q.gamma);
                let drift = Expr::constant(q.alpha) + q.beta * &x
                    - (q.lambda * q.rho) * x.powf(q.delta);
                (Expr::one(), diffusion, drift)
            }
            Equation::Heat { .. } => (Expr::one(), Expr::constant(-1.0), Expr::zero()),
        };
        let f = self.equation.source().subst("u", &self.u);
        time * &self.u_t + diffusion * &self.u_xx + drift * &self.u_x - f
    }
}

/// Comparison used by [`Constraint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Gt,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }

    fn negated_symbol(self) -> &'static str {
        match self {
            Relation::Eq => "!=",
            Relation::Ne => "=",
            Relation::Lt => ">=",
            Relation::Gt => "<=",
        }
    }
}

/// An equality or inequality between two expressions over parameter and
/// constant names, e.g. `alpha = lambda*rho` or `a < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub lhs: Expr,
    pub relation: Relation,
    pub rhs: Expr,
}

impl Constraint {
    /// Parses `lhs <op> rhs` with `<op>` one of `=`, `!=`, `<`, `>`.
    pub fn parse(text: &str, declared: &[&str]) -> Result<Self, ExprError> {
        let (at, relation, width) = ["!=", "=", "<", ">"]
            .iter()
            .find_map(|op| {
                text.find(op).map(|i| {
                    let rel = match *op {
                        "!=" => Relation::Ne,
                        "=" => Relation::Eq,
                        "<" => Relation::Lt,
                        _ => Relation::Gt,
                    };
                    (i, rel, op.len())
                })
            })
            .ok_or_else(|| ExprError::Syntax {
                offset: 0,
                message: format!("constraint `{text}` has no relation"),
            })?;
        let lhs = expr::parse(&text[..at], declared)?;
        let rhs = expr::parse(&text[at + width..], declared).map_err(|e| match e {
            ExprError::Syntax { offset, message } => ExprError::Syntax {
                offset: offset + at + width,
                message,
            },
            other => other,
        })?;
        Ok(Constraint { lhs, relation, rhs })
    }

    pub fn holds<E: expr::Env + ?Sized>(&self, env: &E, tol: f64) -> Result<bool, ExprError> {
        let l = self.lhs.eval(env)?;
        let r = self.rhs.eval(env)?;
        Ok(match self.relation {
            Relation::Eq => (l - r).abs() <= tol,
            Relation::Ne => (l - r).abs() > tol,
            Relation::Lt => l < r,
            Relation::Gt => l > r,
        })
    }

    /// For `name = rhs`, the target name.
    pub fn assigned_name(&self) -> Option<&str> {
        match (self.relation, self.lhs.node()) {
            (Relation::Eq, expr::Node::Var(n)) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.relation.symbol(), self.rhs)
    }
}

/// Evaluates every constraint and returns the violated ones, rendered.
pub fn violations<E: expr::Env + ?Sized>(
    constraints: &[Constraint],
    env: &E,
    tol: f64,
) -> Vec<String> {
    constraints
        .iter()
        .filter_map(|c| match c.holds(env, tol) {
            Ok(true) => None,
            Ok(false) => Some(format!(
                "{} {} {}",
                c.lhs,
                c.relation.negated_symbol(),
                c.rhs
            )),
            Err(e) => Some(format!("cannot evaluate {c}: {e}")),
        })
        .collect()
}

/// Classical models contained in the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classical {
    BlackScholesMerton,
    Vasicek,
    CoxIngersollRoss,
    Longstaff,
}

impl FromStr for Classical {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s.to_ascii_lowercase().as_str() {
            "bsm" | "black-scholes-merton" | "black-scholes" => Ok(Classical::BlackScholesMerton),
            "vasicek" => Ok(Classical::Vasicek),
            "cir" | "cox-ingersoll-ross" => Ok(Classical::CoxIngersollRoss),
            "longstaff" => Ok(Classical::Longstaff),
            _ => Err(ModelError::UnknownModel(s.to_string())),
        }
    }
}

/// Parameter constraints plus source of a classical model.
#[derive(Debug, Clone)]
pub struct ClassicalModel {
    pub model: Classical,
    pub constraints: Vec<Constraint>,
    /// May reference parameter names, e.g. `beta*u`.
    pub source: Expr,
}

impl ClassicalModel {
    /// Overwrites the constrained parameters of `free`, checks the remaining
    /// constraints and binds the source.
    pub fn instantiate(&self, free: Params) -> Result<PdeProblem, ModelError> {
        let mut p = free;
        for c in &self.constraints {
            if let Some(name) = c.assigned_name() {
                let v = c.rhs.eval(&p.bindings())?;
                p.set(name, v);
            }
        }
        if let Some(v) = violations(&self.constraints, &p.bindings(), 1e-12).into_iter().next() {
            return Err(ModelError::Violated(v));
        }
        PdeProblem::new(p, self.source.bind(&p.bindings()))
    }
}

pub fn classical_reduction(model: Classical) -> ClassicalModel {
    let c = |s: &str| Constraint::parse(s, &Params::NAMES).expect("static constraint");
    let (constraints, source) = match model {
        Classical::BlackScholesMerton => (
            vec![c("gamma = 1"), c("alpha = 0"), c("lambda = 0")],
            "beta*u",
        ),
        Classical::Vasicek => (
            vec![c("gamma = 0"), c("delta = 0"), c("beta != 0")],
            "x*u",
        ),
        Classical::CoxIngersollRoss => (
            vec![c("gamma = 0.5"), c("delta = 0.5"), c("lambda = 0")],
            "x*u",
        ),
        Classical::Longstaff => (
            vec![c("gamma = 0.5"), c("delta = 0.5"), c("alpha = rho^2/4")],
            "x*u",
        ),
    };
    ClassicalModel {
        model,
        constraints,
        source: expr::parse(source, &Params::NAMES).expect("static source"),
    }
}
