//! The eight closed-form similarity solutions: four under the terminal
//! condition `u(x, T) = 1` and four under a moving barrier `u(H(t), t) = R(t)`.
//!
//! Every formula is stored as text over the parameter names and the case's
//! free constants, and bound to numbers on instantiation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::expr::{self, Expr, ExprError};
use crate::model::{self, CaseTag, Constraint, Params, PdeProblem};
use crate::sampling::Region;
use crate::verify::{Chart, Generator, GeneratorSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("{0} is a terminal case and has no barrier")]
    NotBarrier(CaseId),
    #[error("constraints of {case} violated: {}", .violations.join(", "))]
    Violated {
        case: CaseId,
        violations: Vec<String>,
    },
    #[error("unknown constant `{name}` for {case}")]
    UnknownConstant { case: CaseId, name: String },
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    TGeneric,
    TGammaOne,
    TGammaHalf,
    TDeltaChain,
    BGeneric,
    BGammaOne,
    BGammaHalf,
    BDeltaChain,
}

impl CaseId {
    pub const ALL: [CaseId; 8] = [
        CaseId::TGeneric,
        CaseId::TGammaOne,
        CaseId::TGammaHalf,
        CaseId::TDeltaChain,
        CaseId::BGeneric,
        CaseId::BGammaOne,
        CaseId::BGammaHalf,
        CaseId::BDeltaChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::TGeneric => "T-Generic",
            CaseId::TGammaOne => "T-GammaOne",
            CaseId::TGammaHalf => "T-GammaHalf",
            CaseId::TDeltaChain => "T-DeltaChain",
            CaseId::BGeneric => "B-Generic",
            CaseId::BGammaOne => "B-GammaOne",
            CaseId::BGammaHalf => "B-GammaHalf",
            CaseId::BDeltaChain => "B-DeltaChain",
        }
    }

    pub fn is_barrier(self) -> bool {
        matches!(
            self,
            CaseId::BGeneric | CaseId::BGammaOne | CaseId::BGammaHalf | CaseId::BDeltaChain
        )
    }

    /// The parameter case the solution belongs to.
    pub fn tag(self) -> CaseTag {
        match self {
            CaseId::TGeneric | CaseId::BGeneric => CaseTag::Generic,
            CaseId::TGammaOne | CaseId::BGammaOne => CaseTag::GammaOne,
            CaseId::TGammaHalf | CaseId::BGammaHalf => CaseTag::GammaHalf,
            CaseId::TDeltaChain | CaseId::BDeltaChain => CaseTag::DeltaChain,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = SolutionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SolutionError::UnknownCase(s.to_string()))
    }
}

/// `u(x, T) = value(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalSpec {
    pub t_end: f64,
    pub value: Expr,
}

/// `u(H(t), t) = R(t)` with `H(t) = bK·e^{−a(t−T)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSpec {
    pub h: Expr,
    pub r: Expr,
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub t_end: f64,
}

impl BarrierSpec {
    /// The exponential barrier with the given rebate.
    pub fn exponential(a: f64, b: f64, k: f64, t_end: f64, r: Expr) -> Self {
        let h = (b * k) * (Expr::constant(-a) * (Expr::t() - t_end)).exp();
        BarrierSpec {
            h,
            r,
            a,
            b,
            k,
            t_end,
        }
    }

    pub fn h_at(&self, t: f64) -> Result<f64, ExprError> {
        self.h.eval(&[("t", t)])
    }

    pub fn h_prime(&self) -> Expr {
        self.h.differentiate("t")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Terminal(TerminalSpec),
    Barrier(BarrierSpec),
}

/// One catalogued similarity solution with every number bound.
#[derive(Debug, Clone)]
pub struct ClosedFormCase {
    pub id: CaseId,
    pub params: Params,
    pub solution: Expr,
    pub source: Expr,
    pub constraints: Vec<Constraint>,
    pub constants: BTreeMap<String, f64>,
    pub boundary: Boundary,
    pub generators: GeneratorSet,
    /// Default sampling rectangle, clear of the singular loci.
    pub region: Region,
    pub excluded_loci: &'static str,
}

impl ClosedFormCase {
    pub fn problem(&self) -> PdeProblem {
        PdeProblem::new(self.params, self.source.clone())
            .expect("catalogued sources depend on x and u only")
    }

    pub fn terminal_time(&self) -> f64 {
        self.constants["T"]
    }

    pub fn barrier(&self) -> Option<&BarrierSpec> {
        match &self.boundary {
            Boundary::Barrier(b) => Some(b),
            Boundary::Terminal(_) => None,
        }
    }

    /// Parameters and constants as one environment.
    pub fn env(&self) -> BTreeMap<String, f64> {
        let mut env = self.params.bindings();
        env.extend(self.constants.iter().map(|(k, v)| (k.clone(), *v)));
        env
    }
}

struct Entry {
    params: Params,
    constants: &'static [(&'static str, f64)],
    helpers: &'static [(&'static str, &'static str)],
    solution: &'static str,
    source: &'static str,
    constraints: &'static [&'static str],
    barrier: Option<(&'static str, &'static str)>,
    generators: &'static [[&'static str; 3]],
    chart: Chart,
    region: ((f64, f64), (f64, f64)),
    excluded: &'static str,
}

const CONSTANT_NAMES: [&str; 9] = ["A", "B", "T", "a", "b", "K", "c", "Gamma", "Delta"];
const HELPER_NAMES: [&str; 4] = ["CA", "E", "P", "EE"];

fn entry(id: CaseId) -> Entry {
    let p = Params::new;
    match id {
        CaseId::TGeneric => Entry {
            params: p(0.5, 0.5, 0.0, 0.5, 0.0, 1.0),
            constants: &[("B", 1.0), ("T", 1.0)],
            helpers: &[],
            solution: "exp((rho^2*(beta^2*B^2*rho^6*(t-T)^2 - 2*B^2*rho^6*(exp(beta*(t-T))-1) \
                + 2*beta*B^2*rho^6*(t-T) - 4*beta^3*(exp(beta*(t-T)) + B*rho^2*x*(t-T) - 1)) \
                - 4*alpha^2*beta^2*(exp(beta*(t-T))-1) \
                - 4*alpha*beta*B*rho^4*(beta*(t-T) - exp(beta*(t-T)) + 1))/(8*beta^3*rho^2))",
            source: "-u/(2*rho^2)*(alpha^2 + beta*rho^2 + B*rho^4*x - 2*beta*rho^2*log(abs(u)))",
            constraints: &[
                "gamma = 0",
                "lambda = 0",
                "beta != 0",
                "(gamma-1)*(gamma-1/2)*(delta-2*gamma+1) != 0",
                "A = -2*beta/rho^2",
            ],
            barrier: None,
            generators: &[
                ["0", "1", "0"],
                ["0", "0", "exp(-2*beta/rho^2*t)*u"],
                ["2*beta/rho^2", "0", "B*u"],
                [
                    "2*exp(-2*beta/rho^2*t)",
                    "0",
                    "exp(-2*beta/rho^2*t)*(2*beta/rho^2*x + 2*B*t)*u",
                ],
            ],
            chart: Chart::Reduced,
            region: ((0.5, 2.0), (0.0, 1.0)),
            excluded: "none",
        },
        CaseId::TGammaOne => Entry {
            params: p(0.3, 1.125, 1.0, 0.0, 0.2, 1.5),
            constants: &[("T", 1.0)],
            helpers: &[],
            solution: "exp(log(x)^2/(2*rho^2*(t-T)))",
            source: "rho^2*u*log(abs(u))/log(x)^2",
            constraints: &[
                "gamma = 1",
                "alpha = lambda*rho",
                "beta = rho^2/2",
                "delta = 0",
                "A = 1/2",
                "Gamma = 0",
            ],
            barrier: None,
            generators: &[
                ["0", "1", "0"],
                ["2*x", "4*t", "0"],
                ["4*x*t", "4*t^2", "-1*x^2*u"],
            ],
            chart: Chart::Reduced,
            region: ((1.2, 3.0), (0.0, 0.9)),
            excluded: "x = 1 (log^2 x = 0) and t = T",
        },
        CaseId::TGammaHalf => Entry {
            params: p(1.0, 2.0, 0.5, 0.5, 0.0, 2.0),
            constants: &[("T", 1.0)],
            helpers: &[],
            solution: "exp(-2*x*(t-T)/(rho^2*T*t))",
            source: "rho^2*u*log(abs(u))/(4*x) - 2*x*u/(rho^2*T^2)",
            constraints: &[
                "gamma = 1/2",
                "alpha = rho^2/4",
                "beta = 2/T",
                "lambda = 0",
                "A = 2*alpha/rho^2",
                "B = 0",
                "Gamma = 0",
            ],
            barrier: None,
            generators: &[
                ["0", "1", "0"],
                ["2*x", "4*t", "(4*alpha-rho^2)*u/rho^2"],
                ["4*x*t", "4*t^2", "-1*(x^2 + 2*(rho^2-4*alpha)*t/rho^2)*u"],
            ],
            chart: Chart::Reduced,
            region: ((0.5, 2.0), (0.5, 0.99)),
            excluded: "t = 0",
        },
        CaseId::TDeltaChain => Entry {
            params: p(0.0, 0.0, 0.7, 0.4, -0.35, 1.0),
            constants: &[("A", 1.0), ("B", 1.0), ("T", 1.0)],
            helpers: &[],
            solution: "exp(B/A^3*(B*exp(A*(gamma-1)^2*rho^2*(T-t)) - A^2*x^(1-gamma) \
                + A*x^(-gamma)*exp(1/2*A*(gamma-1)^2*rho^2*(T-t))\
                *(A*x + B*(gamma-1)^2*rho^2*(t-T)*x^gamma) - B))",
            source: "-1/2*(gamma-1)^2*rho^2*u*(A*log(abs(u)) + B*x^(1-gamma))",
            constraints: &[
                "alpha = 0",
                "beta = 0",
                "lambda = -gamma*rho/2",
                "delta = 2*gamma - 1",
            ],
            barrier: None,
            generators: &[
                ["0", "1", "0"],
                ["0", "0", "exp(A*t)*u"],
                ["A", "0", "-1*B*u"],
                ["2*exp(A*t)", "0", "exp(A*t)*(2*B*t - A*x)*u"],
            ],
            chart: Chart::Reduced,
            region: ((0.5, 2.0), (0.0, 1.0)),
            excluded: "none",
        },
        CaseId::BGeneric => Entry {
            params: p(0.2, 0.1, 0.3, 0.5, 0.1, 1.0),
            constants: &[("c", 1.0), ("b", 0.5), ("K", 1.0), ("T", 1.0)],
            helpers: &[(
                "CA",
                "exp(1/8*x^(1-2*gamma)*(4*(2*alpha/(1-2*gamma) \
                 - 2*lambda*rho*x^delta/(-2*gamma+delta+1) - beta*x/(gamma-1))/rho^2 + x))",
            )],
            solution: "sqrt(x)/CA*log(abs(x^(8*(gamma-1))*exp(-2*(gamma-1)^2*rho^2*t)/(256*c) \
                + c*x^(8*(1-gamma))*exp(2*(gamma-1)^2*rho^2*t)))",
            source: "x^(-2*gamma-5/2)/(32*rho^2)*(16*(gamma-1)^2*rho^4*x^(4*gamma+1)/CA\
                *exp(-2*CA*u/sqrt(x)) + u*(32*alpha*gamma*rho^2*x^(2*gamma+3/2) \
                + 32*alpha*lambda*rho*x^(delta+5/2) - 16*alpha^2*x^(5/2) - 32*alpha*beta*x^(7/2) \
                + 32*beta*lambda*rho*x^(delta+7/2) + x^(9/2)*((gamma-1)^2*rho^4 - 16*beta^2) \
                - 8*rho^2*x^(2*gamma+5/2)*(beta*(2-4*gamma) + (gamma-1)^2*rho^2) \
                - 16*lambda*rho^3*(2*gamma-delta)*x^(2*gamma+delta+3/2) \
                - 4*rho^4*x^(4*gamma+1/2) - 16*lambda^2*rho^2*x^(2*delta+5/2)))",
            constraints: &["c != 0", "(gamma-1)*(gamma-1/2)*(delta-2*gamma+1) != 0"],
            barrier: Some((
                "b*K*exp(1/4*(gamma-1)*rho^2*(t-T))",
                "-1/4*(gamma-1)*rho^2",
            )),
            generators: &[
                ["0", "1", "0"],
                ["exp(t)*x", "2*exp(t)", "-1*exp(t)/4*(x^2-2)*u"],
            ],
            chart: Chart::Ambiguous,
            region: ((0.7, 2.5), (0.0, 1.0)),
            excluded: "x < H(t)",
        },
        CaseId::BGammaOne => Entry {
            params: p(0.2, 0.1, 1.0, 0.5, 0.1, 1.0),
            constants: &[("a", -1.0), ("b", 0.5), ("K", 1.0), ("T", 1.0)],
            helpers: &[("E", "exp((alpha + lambda*rho*x^delta/(delta-1))/(rho^2*x))")],
            solution: "x^((a-beta)/rho^2 + 1/2)*(a^4*t^2 + a^2*(log(x) - 2*a*t)*log(x) \
                + 12*rho^4)*E/(2*rho^4*(log(x) - a*t)^2)",
            source: "1/8*(a^4*x^(a/rho^2 - beta/rho^2 + 1/2)\
                *exp((alpha*(delta-1) + lambda*rho*x^delta)/((delta-1)*rho^2*x))/rho^6 \
                + 4*rho^2*u^2*x^(-a/rho^2 + beta/rho^2 - 1/2)\
                *exp((-alpha*delta + alpha - lambda*rho*x^delta)/((delta-1)*rho^2*x)) \
                - u/(rho^2*x^2)*(4*alpha^2 - 4*lambda*rho*x^(delta+1)*(2*beta + (delta-2)*rho^2) \
                + 4*lambda^2*rho^2*x^(2*delta) - 8*alpha*(lambda*rho*x^delta + x*(rho^2-beta)) \
                + x^2*(rho^2 - 2*beta)^2))",
            constraints: &["gamma = 1", "a < 0", "delta != 1", "B = -a/rho^2"],
            barrier: Some(("b*K*exp(a*(t-T))", "-a")),
            generators: &[
                ["0", "1", "0"],
                ["1", "0", "a/rho^2*u"],
                [
                    "x - 2*a/rho^2*t",
                    "2*t",
                    "-1*((2 - a/rho^2*x + 2*a^2/rho^4*t)*u - a^2/rho^4*exp(-B*x))",
                ],
            ],
            chart: Chart::Reduced,
            region: ((1.4, 3.0), (0.0, 1.0)),
            excluded: "log x = a t and x < H(t)",
        },
        CaseId::BGammaHalf => Entry {
            params: p(0.2, 0.1, 0.5, 0.5, 0.1, 1.0),
            constants: &[
                ("a", 1.0),
                ("b", 0.5),
                ("K", 1.0),
                ("T", 1.0),
                ("c", 1.0),
                ("Gamma", 1.0),
                ("Delta", 1.0),
            ],
            helpers: &[
                ("P", "exp((lambda*rho*x^delta - beta*delta*x)/(delta*rho^2))"),
                ("EE", "exp(lambda*x^delta/(delta*rho) - beta*x/rho^2 - Gamma*x/2)"),
            ],
            solution: "x^(1/4 - alpha/rho^2)*P*(x^(1/8*(4*a*t - c*rho^2/a + 2))\
                *exp(1/64*(c^2*rho^4/a^2 + 16*a^2*t^2 - 64*a*x/rho^2 - 16*Gamma - 8*c*rho^2*t \
                + 16*log(x)^2 + 28)) - x^(1/4)*Delta*exp(-Gamma*x/2))",
            source: "1/(32*rho^2)*(16*a^2*(u*x + Delta*x^(3/2 - alpha/rho^2)*EE) \
                - 32*alpha*beta*u - 8*Gamma*rho^4*u + 32*alpha*lambda*rho*u*x^(delta-1) \
                - 16*lambda^2*rho^2*u*x^(2*delta-1) - 16*lambda*rho^3*u*x^(delta-1) \
                + 16*delta*lambda*rho^3*u*x^(delta-1) + 32*beta*lambda*rho*u*x^delta \
                + 16*rho^4*(u/x + Delta*x^(-alpha/rho^2 - 1/2)*EE)\
                *log(abs(x^(alpha/rho^2 - 1/2)*exp(-lambda*x^delta/(delta*rho) + beta*x/rho^2 \
                + Gamma*x/2)*u + Delta)) \
                - 16*alpha^2*u/x + 16*alpha*rho^2*u/x - 16*beta^2*u*x + 4*Gamma*rho^4*u/x \
                - 3*rho^4*u/x + 4*Gamma*rho^4*Delta*x^(-alpha/rho^2 - 1/2)*EE \
                - 4*Gamma^2*rho^4*Delta*x^(3/2 - alpha/rho^2)*EE \
                + rho^4*Delta*x^(-alpha/rho^2 - 1/2)*EE)",
            constraints: &[
                "gamma = 1/2",
                "a > 0",
                "delta != 0",
                "A = 1",
                "B = -16*a^2/rho^4",
            ],
            barrier: Some(("b*K*exp(-a*(t-T))", "a")),
            generators: &[
                ["0", "1", "0"],
                [
                    "4*a/rho^2*exp(-8*a/rho^2*t)*x",
                    "-1*exp(-8*a/rho^2*t)",
                    "2*a/rho^2*exp(-8*a/rho^2*t)*(2*(2*a/rho^2 + Gamma)*Delta\
                     *exp(-1/2*Gamma*x^2)*x^(5/2) + (4*a/rho^2*x^2 + 1)*u)",
                ],
                [
                    "4*a/rho^2*exp(8*a/rho^2*t)*x",
                    "exp(8*a/rho^2*t)",
                    "-2*a/rho^2*exp(8*a/rho^2*t)*(2*(2*a/rho^2 - Gamma)*Delta\
                     *exp(-1/2*Gamma*x^2)*x^(5/2) + (4*a/rho^2*x^2 - 1)*u)",
                ],
            ],
            chart: Chart::Ambiguous,
            region: ((1.4, 3.0), (0.0, 1.0)),
            excluded: "x < H(t)",
        },
        CaseId::BDeltaChain => Entry {
            params: p(0.2, 0.1, 0.7, 0.4, 0.1, 1.0),
            constants: &[("a", 1.0), ("b", 0.5), ("K", 1.0), ("T", 1.0), ("B", 1.0)],
            helpers: &[],
            solution: "x^(gamma/2 + lambda/rho)*exp(1/(8*rho^2)*(B^2*(gamma-1)^3*rho^8/a^3 \
                + 4*B*(gamma-1)*rho^4*x^(1-gamma)/a \
                - 4*B*(gamma-1)^2*rho^4*b^(1-gamma)*K^(1-gamma)*t*exp(a*(gamma-1)*(t-T)) \
                + 4*x^(1-2*gamma)*(2*alpha/(2*gamma-1) + beta*x/(gamma-1)) \
                + 4*a*b^(1-2*gamma)*K^(1-2*gamma)*x^(-gamma)*exp(a*(gamma-1)*(t-T))\
                *(2*x*b^gamma*K^gamma - b*K*x^gamma*exp(a*(gamma-1)*(t-T)))/(gamma-1)))",
            source: "x^(-2*(gamma+1))*u/(8*(2*gamma-1)*rho^2)\
                *(4*a*x^3*(2*alpha - 2*gamma*(alpha+beta*x) + beta*x) \
                - 4*a*(gamma-1)*(2*gamma-1)*rho*x^(2*gamma+2)\
                *((gamma*rho + 2*lambda)*log(x) - 2*rho*log(abs(u))) \
                + (2*gamma-1)*(4*rho*x^(2*gamma+1)*(2*alpha*(gamma*rho+lambda) \
                + beta*x*((2*gamma-1)*rho + 2*lambda)) - 4*B*(gamma-1)^2*rho^4*x^(gamma+3) \
                + rho^2*x^(4*gamma)*((gamma-2)*gamma*rho^2 - 4*lambda^2 - 4*lambda*rho) \
                - 4*x^2*(alpha+beta*x)^2))",
            constraints: &["delta = 2*gamma - 1", "a > 0", "A = 2*a/((1-gamma)*rho^2)"],
            barrier: Some(("b*K*exp(-a*(t-T))", "a")),
            generators: &[
                ["0", "1", "0"],
                ["0", "0", "exp(A*t)*u"],
                ["A", "0", "-1*B*u"],
                ["2*exp(A*t)", "0", "-1*exp(A*t)*(A*x - 2*B*t)*u"],
            ],
            chart: Chart::Ambiguous,
            region: ((1.4, 3.0), (0.0, 1.0)),
            excluded: "x < H(t)",
        },
    }
}

fn declared() -> Vec<&'static str> {
    let mut names: Vec<&str> = Params::NAMES.to_vec();
    names.extend(CONSTANT_NAMES);
    names.extend(HELPER_NAMES);
    names
}

fn parse_bound(text: &str, env: &BTreeMap<String, f64>, helpers: &[(&str, Expr)]) -> Expr {
    let e = expr::parse(text, &declared())
        .unwrap_or_else(|err| panic!("catalogue formula `{text}` failed to parse: {err}"));
    let mut map: HashMap<&str, Expr> = helpers.iter().cloned().collect();
    for (k, v) in env {
        map.insert(k.as_str(), Expr::constant(*v));
    }
    e.substitute(&map)
}

fn parse_constraints(e: &Entry) -> Vec<Constraint> {
    e.constraints
        .iter()
        .map(|c| Constraint::parse(c, &declared()).expect("catalogue constraint parses"))
        .collect()
}

fn is_constant_name(name: &str) -> bool {
    Params::NAMES.iter().all(|n| *n != name)
}

/// Default parameters for a case.
pub fn default_params(id: CaseId) -> Params {
    entry(id).params
}

/// Default values of the free constants, with constants tied to parameters
/// by the case's constraints derived from them.
pub fn default_constants(id: CaseId, params: &Params) -> BTreeMap<String, f64> {
    complete_constants(&entry(id), params, &BTreeMap::new())
}

fn complete_constants(
    e: &Entry,
    params: &Params,
    given: &BTreeMap<String, f64>,
) -> BTreeMap<String, f64> {
    let mut constants: BTreeMap<String, f64> = e
        .constants
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    constants.extend(given.iter().map(|(k, v)| (k.clone(), *v)));
    for c in parse_constraints(e) {
        if let Some(name) = c.assigned_name() {
            if is_constant_name(name) && !given.contains_key(name) {
                let mut env = params.bindings();
                env.extend(constants.iter().map(|(k, v)| (k.clone(), *v)));
                if let Ok(v) = c.rhs.eval(&env) {
                    constants.insert(name.to_string(), v);
                }
            }
        }
    }
    constants
}

/// Applies the case's parameter assignments (`gamma = 1`, `alpha = lambda*rho`, ...)
/// to otherwise free parameters, in the printed order.
pub fn fit_params(id: CaseId, free: Params, constants: &BTreeMap<String, f64>) -> Params {
    let e = entry(id);
    let mut p = free;
    for c in parse_constraints(&e) {
        if let Some(name) = c.assigned_name() {
            if !is_constant_name(name) {
                let mut env = p.bindings();
                env.extend(constants.iter().map(|(k, v)| (k.clone(), *v)));
                if let Ok(v) = c.rhs.eval(&env) {
                    p.set(name, v);
                }
            }
        }
    }
    p
}

/// Violated constraints of a case, rendered; empty when all hold within 1e-12.
pub fn validate_constraints(
    id: CaseId,
    p: &Params,
    constants: &BTreeMap<String, f64>,
) -> Vec<String> {
    let e = entry(id);
    let constants = complete_constants(&e, p, constants);
    let mut env = p.bindings();
    env.extend(constants);
    model::violations(&parse_constraints(&e), &env, 1e-12)
}

/// The case with default parameters and constants.
pub fn get_case(id: CaseId) -> ClosedFormCase {
    let e = entry(id);
    instantiate(id, e.params, &BTreeMap::new()).expect("catalogue defaults satisfy constraints")
}

/// All eight cases with defaults.
pub fn catalog() -> Vec<ClosedFormCase> {
    CaseId::ALL.into_iter().map(get_case).collect()
}

/// The case bound to the given parameters; missing constants take their defaults.
pub fn instantiate(
    id: CaseId,
    params: Params,
    constants: &BTreeMap<String, f64>,
) -> Result<ClosedFormCase, SolutionError> {
    let e = entry(id);
    for name in constants.keys() {
        if !CONSTANT_NAMES.contains(&name.as_str()) {
            return Err(SolutionError::UnknownConstant {
                case: id,
                name: name.clone(),
            });
        }
    }
    params.validate(model::DeltaMode::Relaxed)?;
    let constants = complete_constants(&e, &params, constants);
    let mut env = params.bindings();
    env.extend(constants.iter().map(|(k, v)| (k.clone(), *v)));
    let constraints = parse_constraints(&e);
    let violations = model::violations(&constraints, &env, 1e-12);
    if !violations.is_empty() {
        return Err(SolutionError::Violated {
            case: id,
            violations,
        });
    }
    let helpers: Vec<(&str, Expr)> = e
        .helpers
        .iter()
        .map(|(n, text)| (*n, parse_bound(text, &env, &[])))
        .collect();
    let solution = parse_bound(e.solution, &env, &helpers);
    let source = parse_bound(e.source, &env, &helpers);
    let t_end = constants["T"];
    let boundary = match e.barrier {
        None => Boundary::Terminal(TerminalSpec {
            t_end,
            value: Expr::one(),
        }),
        Some((h_text, rate_text)) => {
            let h = parse_bound(h_text, &env, &[]);
            let r = solution.subst("x", &h);
            Boundary::Barrier(BarrierSpec {
                h,
                r,
                a: parse_bound(rate_text, &env, &[])
                    .as_const()
                    .expect("barrier rate is a number"),
                b: constants["b"],
                k: constants["K"],
                t_end,
            })
        }
    };
    let generators = e
        .generators
        .iter()
        .map(|[a, b, c]| {
            Generator::new(
                parse_bound(a, &env, &[]),
                parse_bound(b, &env, &[]),
                parse_bound(c, &env, &[]),
                e.chart,
            )
        })
        .collect();
    Ok(ClosedFormCase {
        id,
        params,
        solution,
        source,
        constraints,
        constants,
        boundary,
        generators: GeneratorSet {
            generators,
            frame: e.chart,
        },
        region: Region::new(e.region.0, e.region.1),
        excluded_loci: e.excluded,
    })
}

/// The printed barrier `H(t)` of a barrier case. `a` is the case's own
/// constant (unused by B-Generic, whose rate is fixed by `γ` and `ρ`).
pub fn barrier_h(
    id: CaseId,
    a: f64,
    b: f64,
    k: f64,
    t_end: f64,
    p: &Params,
) -> Result<Expr, SolutionError> {
    let e = entry(id);
    let (h_text, _) = e.barrier.ok_or(SolutionError::NotBarrier(id))?;
    let mut env = p.bindings();
    env.extend([
        ("a".to_string(), a),
        ("b".to_string(), b),
        ("K".to_string(), k),
        ("T".to_string(), t_end),
    ]);
    Ok(parse_bound(h_text, &env, &[]))
}

/// `R(t) = u(H(t), t)`.
pub fn induced_r(case: &ClosedFormCase) -> Result<Expr, SolutionError> {
    match &case.boundary {
        Boundary::Barrier(b) => Ok(case.solution.subst("x", &b.h)),
        Boundary::Terminal(_) => Err(SolutionError::NotBarrier(case.id)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in CaseId::ALL {
            assert_eq!(id.name().parse::<CaseId>().unwrap(), id);
        }
        assert!("T-Nothing".parse::<CaseId>().is_err());
    }

    #[test]
    fn defaults_instantiate_and_classify() {
        for case in catalog() {
            assert_eq!(
                model::classify(&case.params, 1e-12),
                case.id.tag(),
                "{}",
                case.id
            );
            assert!(case.solution.variables().iter().all(|v| v == "x" || v == "t"));
            assert!(case.source.variables().iter().all(|v| v == "x" || v == "u"));
        }
    }

    #[test]
    fn terminal_values_at_maturity() {
        let c = get_case(CaseId::TGammaHalf);
        for x in [0.3, 1.0, 2.7] {
            let v = c.solution.eval(&[("x", x), ("t", 1.0)]).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
        let c = get_case(CaseId::TDeltaChain);
        let v = c.solution.eval(&[("x", 1.7), ("t", 1.0)]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constraint_examples() {
        let c = BTreeMap::new();
        let ok = Params::new(0.6, 2.0, 1.0, 0.0, 0.3, 2.0);
        assert!(validate_constraints(CaseId::TGammaOne, &ok, &c).is_empty());
        let bad = Params { beta: 1.0, ..ok };
        let v = validate_constraints(CaseId::TGammaOne, &bad, &c);
        assert_eq!(v, vec!["beta != rho^2/2".to_string()]);
        let dc = Params::new(0.0, 0.0, 0.7, 0.4, -0.7, 2.0);
        assert!(validate_constraints(CaseId::TDeltaChain, &dc, &c).is_empty());
        let fitted = fit_params(CaseId::TGammaOne, Params::new(9.0, 9.0, 0.2, 0.4, 0.3, 2.0), &c);
        assert_eq!(fitted, ok);
    }

    #[test]
    fn barrier_examples() {
        let p = Params::new(0.0, 0.0, 0.0, 0.5, 0.0, 2.0);
        let h = barrier_h(CaseId::BGeneric, 0.0, 1.0, 10.0, 1.0, &p).unwrap();
        assert_eq!(h.eval(&[("t", 1.0)]).unwrap(), 10.0);
        assert!(matches!(
            barrier_h(CaseId::TGeneric, 0.0, 1.0, 1.0, 1.0, &p),
            Err(SolutionError::NotBarrier(_))
        ));
        let c = get_case(CaseId::BGammaOne);
        let b = c.barrier().unwrap();
        assert_eq!(b.a, 1.0);
        let r = induced_r(&c).unwrap();
        for t in [0.0, 0.4, 0.9] {
            let h = b.h_at(t).unwrap();
            let direct = c.solution.eval(&[("x", h), ("t", t)]).unwrap();
            assert_eq!(r.eval(&[("t", t)]).unwrap(), direct);
        }
    }

    #[test]
    fn derived_constants_follow_params() {
        let c = get_case(CaseId::BGammaHalf);
        assert_eq!(c.constants["B"], -16.0);
        let c = get_case(CaseId::BGammaOne);
        assert_eq!(c.constants["B"], 1.0);
    }

    #[test]
    fn violations_reject_instantiation() {
        let p = Params::new(0.0, 0.0, 0.5, 0.5, 0.0, 1.0);
        let err = instantiate(CaseId::TGammaOne, p, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, SolutionError::Violated { .. }));
    }
}
