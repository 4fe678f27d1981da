//! Point transformations linking the bond-pricing class to the heat equation
//! with a nonlinear source.
//!
//! Every stage maps `(x, t, u) → (x̄, τ, φ)` with `x̄ = X(x)`, `τ = Ψ(t)` and
//! `φ = Φ(x, u)` affine in `u`. Both frames name their coordinates `x`, `t`,
//! `u`, so forward maps are expressions in the source frame and inverse maps
//! are expressions in the target frame. Source terms move through a stage
//! via a template over `(x, u, f)` in source coordinates; the image source is
//! then rewritten in target coordinates.
//!
//! The usual reduction is
//!
//! ```text
//! bond PDE (α,β,γ,δ,λ,ρ)  --trivial-->  tilde form (ρ̃ = √2)
//!                         --zeroing-->  α̃ = β̃ = λ̃ = 0
//!                         --gamma_zero--> φ_τ − φ_x̄x̄ − f̄(x̄, φ) = 0
//! ```
//!
//! The tilde form `u_t + x^{2γ}u_xx + (α̃ + β̃x − √2λ̃x^δ)u_x − f̃ = 0` is the
//! original equation with `ρ = √2`, so it is represented as a [`Frame::Bond`]
//! with `rho = √2`.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::fmt;

use thiserror::Error;

use crate::expr::{self, Expr, ExprError, Point};
use crate::model::{classify, CaseTag, Equation, Params, PdeProblem, DEFAULT_CLASSIFY_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("case mismatch: parameters classify as {found}, {expected} requested")]
    CaseMismatch { expected: CaseTag, found: CaseTag },
    #[error("parameters are not in tilde form (rho = {0}, expected sqrt 2)")]
    NotTildeForm(f64),
    #[error("alpha, beta and lambda must be zero before the gamma-zeroing map")]
    NotZeroed,
    #[error("incompatible frames at junction {junction}: {left} then {right}")]
    Incompatible {
        junction: usize,
        left: String,
        right: String,
    },
    #[error("group element needs zeta1*zeta2 != 0")]
    DegenerateGroupElement,
    #[error("cannot compose an empty chain")]
    EmptyChain,
    #[error("rho must be non-zero")]
    RhoZero,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// The equation a frame carries, minus its source term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    Bond(Params),
    Heat,
}

impl Frame {
    fn compatible(&self, other: &Frame) -> bool {
        match (self, other) {
            (Frame::Heat, Frame::Heat) => true,
            (Frame::Bond(a), Frame::Bond(b)) => Params::NAMES.iter().all(|n| {
                let (x, y) = (a.get(n).unwrap(), b.get(n).unwrap());
                (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0)
            }),
            _ => false,
        }
    }

    pub fn params(&self) -> Option<&Params> {
        match self {
            Frame::Bond(p) => Some(p),
            Frame::Heat => None,
        }
    }

    /// The frame's equation with the given source.
    pub fn equation(&self, source: Expr) -> Result<Equation, crate::model::ModelError> {
        match self {
            Frame::Bond(p) => Ok(Equation::Bond(PdeProblem::new(*p, source)?)),
            Frame::Heat => Equation::heat(source),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Bond(p) => write!(f, "bond[{p}]"),
            Frame::Heat => f.write_str("heat"),
        }
    }
}

/// `(X(x), Ψ(t), Φ(x, u))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMap {
    pub space: Expr,
    pub time: Expr,
    pub dependent: Expr,
}

impl PointMap {
    pub fn identity() -> Self {
        PointMap {
            space: Expr::x(),
            time: Expr::t(),
            dependent: Expr::u(),
        }
    }

    pub fn apply(&self, x: f64, t: f64, u: f64) -> Result<(f64, f64, f64), ExprError> {
        let p = Point::new(x, t, u);
        Ok((
            self.space.eval(&p)?,
            self.time.eval(&p)?,
            self.dependent.eval(&p)?,
        ))
    }
}

impl fmt::Display for PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x -> {}\n  t -> {}\n  u -> {}",
            self.space, self.time, self.dependent
        )
    }
}

/// One invertible point transformation with its source-term rule.
#[derive(Debug, Clone)]
pub struct Stage {
    pub name: String,
    pub forward: PointMap,
    /// Inverse map written in target-frame coordinates.
    pub inverse: PointMap,
    /// `f̄` as an expression over source-frame `x`, `u` and the source value `f`.
    pub source_rule: Expr,
    pub from: Frame,
    pub to: Frame,
}

impl Stage {
    /// Image source `f̄(x̄, φ)` of `f(x, u)`.
    pub fn transform_source(&self, f: &Expr) -> Expr {
        let in_source = self.source_rule.subst("f", f);
        let mut to_target = HashMap::new();
        to_target.insert("x", self.inverse.space.clone());
        to_target.insert("u", self.inverse.dependent.clone());
        in_source.substitute(&to_target)
    }

    /// Image `φ(x̄, τ)` of a solution `u(x, t)`.
    pub fn push_solution(&self, u: &Expr) -> Expr {
        let mut coords = HashMap::new();
        coords.insert("x", self.inverse.space.clone());
        coords.insert("t", self.inverse.time.clone());
        let u_in_target = u.substitute(&coords);
        let mut dep = HashMap::new();
        dep.insert("x", self.inverse.space.clone());
        dep.insert("u", u_in_target);
        self.forward.dependent.substitute(&dep)
    }

    /// Preimage `u(x, t)` of `φ(x̄, τ)`.
    pub fn pull_solution(&self, phi: &Expr) -> Expr {
        let mut coords = HashMap::new();
        coords.insert("x", self.forward.space.clone());
        coords.insert("t", self.forward.time.clone());
        let phi_in_source = phi.substitute(&coords);
        let mut dep = HashMap::new();
        dep.insert("x", self.forward.space.clone());
        dep.insert("u", phi_in_source);
        self.inverse.dependent.substitute(&dep)
    }

    /// Swaps the roles of the two frames. The source rule is inverted using
    /// the fact that every rule is affine in `f`.
    pub fn inverse(&self) -> Stage {
        let offset = self.source_rule.subst("f", &Expr::zero());
        let slope = self.source_rule.subst("f", &Expr::one()).sub(&offset);
        let solved = Expr::var("f").sub(&offset).div(&slope);
        let mut to_new_source = HashMap::new();
        to_new_source.insert("x", self.inverse.space.clone());
        to_new_source.insert("u", self.inverse.dependent.clone());
        Stage {
            name: format!("inverse {}", self.name),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            source_rule: solved.substitute(&to_new_source),
            from: self.to,
            to: self.from,
        }
    }
}

/// A chain of stages applied left to right.
#[derive(Debug, Clone)]
pub struct Transform {
    stages: Vec<Stage>,
}

impl Transform {
    pub fn from_stage(stage: Stage) -> Self {
        Transform {
            stages: vec![stage],
        }
    }

    pub fn identity(frame: Frame) -> Self {
        Transform::from_stage(Stage {
            name: "identity".into(),
            forward: PointMap::identity(),
            inverse: PointMap::identity(),
            source_rule: Expr::var("f"),
            from: frame,
            to: frame,
        })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn from_frame(&self) -> Frame {
        self.stages[0].from
    }

    pub fn to_frame(&self) -> Frame {
        self.stages[self.stages.len() - 1].to
    }

    /// Parameters before and after, when both ends are bond frames.
    pub fn param_map(&self) -> (Option<Params>, Option<Params>) {
        (
            self.from_frame().params().copied(),
            self.to_frame().params().copied(),
        )
    }

    pub fn inverse(&self) -> Transform {
        Transform {
            stages: self.stages.iter().rev().map(Stage::inverse).collect(),
        }
    }

    pub fn push_point(&self, x: f64, t: f64, u: f64) -> Result<(f64, f64, f64), ExprError> {
        self.stages
            .iter()
            .try_fold((x, t, u), |(x, t, u), s| s.forward.apply(x, t, u))
    }

    pub fn pull_point(&self, x: f64, t: f64, u: f64) -> Result<(f64, f64, f64), ExprError> {
        self.stages
            .iter()
            .rev()
            .try_fold((x, t, u), |(x, t, u), s| s.inverse.apply(x, t, u))
    }

    pub fn transform_source(&self, f: &Expr) -> Expr {
        self.stages
            .iter()
            .fold(f.clone(), |acc, s| s.transform_source(&acc))
    }

    pub fn push_solution(&self, u: &Expr) -> Expr {
        self.stages.iter().fold(u.clone(), |acc, s| s.push_solution(&acc))
    }

    pub fn pull_solution(&self, phi: &Expr) -> Expr {
        self.stages
            .iter()
            .rev()
            .fold(phi.clone(), |acc, s| s.pull_solution(&acc))
    }

    /// Image of an equation whose frame matches this transform's source frame.
    pub fn transport(&self, eq: &Equation) -> Result<Equation, TransformError> {
        let from = match eq {
            Equation::Bond(p) => Frame::Bond(p.params),
            Equation::Heat { .. } => Frame::Heat,
        };
        if !from.compatible(&self.from_frame()) {
            return Err(TransformError::Incompatible {
                junction: 0,
                left: from.to_string(),
                right: self.from_frame().to_string(),
            });
        }
        let source = self.transform_source(eq.source());
        self.to_frame().equation(source).map_err(|e| match e {
            crate::model::ModelError::Expr(e) => TransformError::Expr(e),
            other => TransformError::Expr(ExprError::Domain(other.to_string())),
        })
    }

    /// The composed forward maps, built by substitution on demand.
    pub fn composed_forward(&self) -> PointMap {
        self.stages.iter().fold(PointMap::identity(), |acc, s| {
            let mut m = HashMap::new();
            m.insert("x", acc.space.clone());
            m.insert("u", acc.dependent.clone());
            PointMap {
                space: s.forward.space.subst("x", &acc.space),
                time: s.forward.time.subst("t", &acc.time),
                dependent: s.forward.dependent.substitute(&m),
            }
        })
    }

    /// The composed inverse maps, in final-frame coordinates.
    pub fn composed_inverse(&self) -> PointMap {
        self.inverse().composed_forward()
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.stages.iter().enumerate() {
            writeln!(f, "[{i}] {}: {} => {}", s.name, s.from, s.to)?;
            writeln!(f, "  {}", s.forward)?;
        }
        Ok(())
    }
}

/// Concatenates transforms, checking that adjacent frames agree.
pub fn compose(chain: Vec<Transform>) -> Result<Transform, TransformError> {
    let mut stages: Vec<Stage> = Vec::new();
    for (i, t) in chain.into_iter().enumerate() {
        if let Some(last) = stages.last() {
            if !last.to.compatible(&t.from_frame()) {
                return Err(TransformError::Incompatible {
                    junction: i,
                    left: last.to.to_string(),
                    right: t.from_frame().to_string(),
                });
            }
        }
        stages.extend(t.stages);
    }
    if stages.is_empty() {
        return Err(TransformError::EmptyChain);
    }
    Ok(Transform { stages })
}

const PARAM_NAMES: [&str; 6] = Params::NAMES;

/// Parses a printed formula, binds the parameters and substitutes helper
/// expressions (the multiplier `A`, arbitrary functions, ...).
fn formula(text: &str, params: &Params, extra: &[(&str, Expr)]) -> Expr {
    let mut declared: Vec<&str> = PARAM_NAMES.to_vec();
    declared.push("f");
    declared.extend(extra.iter().map(|(n, _)| *n));
    let e = expr::parse(text, &declared)
        .unwrap_or_else(|err| panic!("built-in formula `{text}` failed to parse: {err}"));
    let mut map: HashMap<&str, Expr> = extra.iter().cloned().collect();
    for n in PARAM_NAMES {
        map.insert(n, Expr::constant(params.get(n).unwrap()));
    }
    e.substitute(&map)
}

/// Parameter map of the trivial rescaling.
pub fn trivial_params(p: &Params) -> Params {
    let r2 = p.rho * p.rho;
    Params {
        alpha: 2.0 * p.alpha / r2,
        beta: 2.0 * p.beta / r2,
        gamma: p.gamma,
        delta: p.delta,
        lambda: SQRT_2 * p.lambda / p.rho,
        rho: SQRT_2,
    }
}

/// `x̃ = x, t̃ = (ρ²/2)t, ũ = u, f̃ = (2/ρ²)f`.
pub fn trivial(p: &Params) -> Result<(Transform, Params), TransformError> {
    if p.rho == 0.0 {
        return Err(TransformError::RhoZero);
    }
    let half_r2 = 0.5 * p.rho * p.rho;
    let tilde = trivial_params(p);
    let stage = Stage {
        name: "trivial".into(),
        forward: PointMap {
            space: Expr::x(),
            time: half_r2 * Expr::t(),
            dependent: Expr::u(),
        },
        inverse: PointMap {
            space: Expr::x(),
            time: Expr::t() / half_r2,
            dependent: Expr::u(),
        },
        source_rule: Expr::var("f") / half_r2,
        from: Frame::Bond(*p),
        to: Frame::Bond(tilde),
    };
    Ok((Transform::from_stage(stage), tilde))
}

/// The multiplier `A_k(x)` for a case, with tilde parameters bound.
pub fn multiplier(p_tilde: &Params, case: CaseTag) -> Expr {
    let text = match case {
        CaseTag::Generic => {
            "exp(1/4*x^(1-2*gamma)*(2*alpha/(1-2*gamma) \
             - 2*sqrt(2)*lambda/(delta-2*gamma+1)*x^delta - beta/(gamma-1)*x))"
        }
        CaseTag::GammaOne => "x^(beta/2)*exp(-(alpha + sqrt(2)*lambda/(delta-1)*x^delta)/(2*x))",
        CaseTag::GammaHalf => "x^(alpha/2)*exp(beta/2*x - lambda/(sqrt(2)*delta)*x^delta)",
        CaseTag::DeltaChain => {
            "x^(-lambda/sqrt(2))*exp(-1/4*x^(1-2*gamma)*(2*alpha/(2*gamma-1) + beta*x/(gamma-1)))"
        }
    };
    formula(text, p_tilde, &[])
}

fn zeroing_source_rule(p_tilde: &Params, case: CaseTag, a: &Expr) -> Expr {
    let text = match case {
        CaseTag::Generic => {
            "1/4*x^(-2*gamma-1)*A*(4*x^(2*gamma+1)*f + (2*beta*x^(2*gamma+1) \
             - 4*alpha*gamma*x^(2*gamma) - 4*beta*gamma*x^(2*gamma+1) + 2*lambda^2*x^(2*delta+1) \
             + beta^2*x^3 + 2*alpha*beta*x^2 \
             - 2*sqrt(2)*lambda*x^delta*((delta-2*gamma)*x^(2*gamma) + x*(alpha+beta*x)) \
             + alpha^2*x)*u)"
        }
        CaseTag::GammaOne => {
            "A/(4*x^2)*(4*x^2*f + (alpha^2 + 2*lambda^2*x^(2*delta) \
             - 2*sqrt(2)*lambda*x^delta*(alpha+(beta+delta-2)*x) + beta^2*x^2 - 2*beta*x^2 \
             + 2*alpha*beta*x - 4*alpha*x)*u)"
        }
        CaseTag::GammaHalf => {
            "A/(4*x)*(4*x*f + (alpha-2)*alpha*u + u*(2*lambda^2*x^(2*delta) \
             - 2*sqrt(2)*lambda*x^delta*(alpha+delta-1+beta*x) + beta*x*(2*alpha+beta*x)))"
        }
        CaseTag::DeltaChain => {
            "1/4*x^(-2*gamma-2)*A*(4*x^(2*gamma+2)*f + (2*lambda*(lambda+sqrt(2))*x^(4*gamma) \
             + x^2*(alpha+beta*x)^2 \
             - 2*x^(2*gamma+1)*(alpha*(2*gamma+sqrt(2)*lambda) + beta*(2*gamma+sqrt(2)*lambda-1)*x))*u)"
        }
    };
    formula(text, p_tilde, &[("A", a.clone())])
}

/// `û = A_k ũ` with the printed `f̂`; sends `(α̃, β̃, λ̃)` to zero.
pub fn zeroing(p_tilde: &Params, case: CaseTag) -> Result<(Transform, Params), TransformError> {
    if (p_tilde.rho - SQRT_2).abs() > 1e-12 {
        return Err(TransformError::NotTildeForm(p_tilde.rho));
    }
    let found = classify(p_tilde, DEFAULT_CLASSIFY_TOL);
    if found != case {
        return Err(TransformError::CaseMismatch {
            expected: case,
            found,
        });
    }
    let a = multiplier(p_tilde, case);
    let hat = Params {
        alpha: 0.0,
        beta: 0.0,
        lambda: 0.0,
        ..*p_tilde
    };
    let stage = Stage {
        name: format!("zeroing ({case})"),
        forward: PointMap {
            space: Expr::x(),
            time: Expr::t(),
            dependent: &a * Expr::u(),
        },
        inverse: PointMap {
            space: Expr::x(),
            time: Expr::t(),
            dependent: Expr::u() / &a,
        },
        source_rule: zeroing_source_rule(p_tilde, case, &a),
        from: Frame::Bond(*p_tilde),
        to: Frame::Bond(hat),
    };
    Ok((Transform::from_stage(stage), hat))
}

/// Map to the heat equation with nonlinear source, including the time flip
/// `t → −t, f → −f`.
pub fn gamma_zero(p_hat: &Params, case: CaseTag) -> Result<Transform, TransformError> {
    if p_hat.alpha != 0.0 || p_hat.beta != 0.0 || p_hat.lambda != 0.0 {
        return Err(TransformError::NotZeroed);
    }
    if (p_hat.rho - SQRT_2).abs() > 1e-12 {
        return Err(TransformError::NotTildeForm(p_hat.rho));
    }
    let found = classify(p_hat, DEFAULT_CLASSIFY_TOL);
    if found != case {
        return Err(TransformError::CaseMismatch {
            expected: case,
            found,
        });
    }
    let f = |s: &str| formula(s, p_hat, &[]);
    let (name, forward, inverse, rule) = match case {
        CaseTag::GammaOne => (
            "gamma-zero (log map)",
            PointMap {
                space: f("log(x)"),
                time: f("-t"),
                dependent: f("x^(-1/2)*u"),
            },
            PointMap {
                space: f("exp(x)"),
                time: f("-t"),
                dependent: f("exp(x/2)*u"),
            },
            f("-1/sqrt(x)*(1/4*u + f)"),
        ),
        CaseTag::GammaHalf => (
            "gamma-zero (square-root map)",
            PointMap {
                space: f("sqrt(x)"),
                time: f("-t/4"),
                dependent: f("x^(-1/4)*u"),
            },
            PointMap {
                space: f("x^2"),
                time: f("-4*t"),
                dependent: f("sqrt(x)*u"),
            },
            f("-1*x^(-5/4)*(3/4*u + 4*x*f)"),
        ),
        CaseTag::Generic | CaseTag::DeltaChain => return Ok(Transform::from_stage(power_stage(p_hat))),
    };
    Ok(Transform::from_stage(Stage {
        name: name.into(),
        forward,
        inverse,
        source_rule: rule,
        from: Frame::Bond(*p_hat),
        to: Frame::Heat,
    }))
}

fn power_stage(p_hat: &Params) -> Stage {
    let f = |s: &str| formula(s, p_hat, &[]);
    Stage {
        name: "gamma-zero (power map)".into(),
        forward: PointMap {
            space: f("x^(1-gamma)"),
            time: f("-1*(gamma-1)^2*t"),
            dependent: f("x^(-gamma/2)*u"),
        },
        inverse: PointMap {
            space: f("x^(1/(1-gamma))"),
            time: f("-t/(gamma-1)^2"),
            dependent: f("x^(gamma/(2*(1-gamma)))*u"),
        },
        source_rule: f(
            "-1/(4*(gamma-1)^2)*x^(-(gamma+4)/2)*(gamma*(2-gamma)*x^(2*gamma)*u + 4*x^2*f)",
        ),
        from: Frame::Bond(*p_hat),
        to: Frame::Heat,
    }
}

/// The generic power map `x̄ = x^{1−γ}` for any `γ ≠ 1`, without reference to
/// the case a specialised map would be chosen for.
pub fn power_map(p_hat: &Params) -> Result<Transform, TransformError> {
    if p_hat.alpha != 0.0 || p_hat.beta != 0.0 || p_hat.lambda != 0.0 {
        return Err(TransformError::NotZeroed);
    }
    if (p_hat.rho - SQRT_2).abs() > 1e-12 {
        return Err(TransformError::NotTildeForm(p_hat.rho));
    }
    if (p_hat.gamma - 1.0).abs() <= DEFAULT_CLASSIFY_TOL {
        return Err(TransformError::CaseMismatch {
            expected: CaseTag::Generic,
            found: CaseTag::GammaOne,
        });
    }
    Ok(Transform::from_stage(power_stage(p_hat)))
}

/// `trivial`, `zeroing` and `gamma_zero` composed for the parameters' case.
pub fn reduction_chain(p: &Params) -> Result<Transform, TransformError> {
    let (t1, tilde) = trivial(p)?;
    let case = classify(&tilde, DEFAULT_CLASSIFY_TOL);
    let (t2, hat) = zeroing(&tilde, case)?;
    let t3 = gamma_zero(&hat, case)?;
    compose(vec![t1, t2, t3])
}

/// An element of the continuous equivalence group of the drift-free equation
/// `û_t + x^{2γ}û_xx − f̂ = 0`.
#[derive(Debug, Clone)]
pub struct EquivalenceGroupElement {
    pub zeta0: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    /// Arbitrary function of the source-frame `x`.
    pub shift: Expr,
}

impl EquivalenceGroupElement {
    pub fn new(zeta0: f64, zeta1: f64, zeta2: f64, shift: Expr) -> Self {
        EquivalenceGroupElement {
            zeta0,
            zeta1,
            zeta2,
            shift,
        }
    }

    pub fn identity() -> Self {
        EquivalenceGroupElement::new(0.0, 1.0, 1.0, Expr::zero())
    }

    /// `γ̄ = 1 + ζ₂²(γ − 1)`.
    pub fn image_gamma(&self, gamma: f64) -> f64 {
        gamma + (self.zeta2 * self.zeta2 - 1.0) * (gamma - 1.0)
    }
}

/// The group element acting on the drift-free frame with exponent `gamma`.
pub fn group_element(
    e: &EquivalenceGroupElement,
    gamma: f64,
    delta: f64,
) -> Result<Transform, TransformError> {
    if e.zeta1 * e.zeta2 == 0.0 {
        return Err(TransformError::DegenerateGroupElement);
    }
    let from = Params::new(0.0, 0.0, gamma, delta, 0.0, SQRT_2);
    let to = Params {
        gamma: e.image_gamma(gamma),
        ..from
    };
    let consts = [
        ("z0", Expr::constant(e.zeta0)),
        ("z1", Expr::constant(e.zeta1)),
        ("z2", Expr::constant(e.zeta2)),
        ("F", e.shift.clone()),
        ("F2", e.shift.differentiate("x").differentiate("x")),
    ];
    let f = |s: &str| formula(s, &from, &consts);
    let back_x = f("x^(z2^2)");
    let inverse_dependent = f("(x^(-(1/z2^2-1)/2)*u - F)/z1").subst("x", &back_x);
    let stage = Stage {
        name: "equivalence group element".into(),
        forward: PointMap {
            space: f("x^(1/z2^2)"),
            time: f("z0 + t/z2^4"),
            dependent: f("x^((1/z2^2-1)/2)*(z1*u + F)"),
        },
        inverse: PointMap {
            space: back_x,
            time: f("z2^4*(t - z0)"),
            dependent: inverse_dependent,
        },
        source_rule: f(
            "1/4*x^((1/z2^2-5)/2)*((z2^4-1)*x^(2*gamma)*(z1*u + F) \
             + 4*z2^4*x^2*(z1*f + x^(2*gamma)*F2))",
        ),
        from: Frame::Bond(from),
        to: Frame::Bond(to),
    };
    Ok(Transform::from_stage(stage))
}
