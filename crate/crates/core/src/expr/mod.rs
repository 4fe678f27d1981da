//! Expression trees over the variables `x`, `t`, `u` and named constants.
//!
//! Every closed form, source term, multiplier and generator coefficient in the
//! crate is an [`Expr`]. Trees are immutable and share subtrees through `Arc`,
//! so cloning is cheap and values can be shared across threads.
//!
//! Construction goes through smart constructors that fold constants and apply
//! the `0`/`1` identities; there is no canonical simplifier.

mod diff;
mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops;
use std::sync::Arc;

use thiserror::Error;

pub use parse::parse;

/// The three coordinate names every frame uses.
pub const COORDINATES: [&str; 3] = ["x", "t", "u"];

/// Unary functions understood by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Arc<str>),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Call(Func, Expr),
}

/// Shared, immutable expression tree.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared identifier `{name}` at byte {offset}")]
    Undeclared { name: String, offset: usize },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Variable lookup used by [`Expr::eval`].
pub trait Env {
    fn lookup(&self, name: &str) -> Option<f64>;
}

impl Env for HashMap<String, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Env for BTreeMap<String, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Env for [(&str, f64)] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

impl<const N: usize> Env for [(&str, f64); N] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.as_slice().lookup(name)
    }
}

/// A point in `(x, t, u)`; the common case when all constants are already bound.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub t: f64,
    pub u: f64,
}

impl Point {
    pub fn new(x: f64, t: f64, u: f64) -> Self {
        Point { x, t, u }
    }
}

impl Env for Point {
    fn lookup(&self, name: &str) -> Option<f64> {
        match name {
            "x" => Some(self.x),
            "t" => Some(self.t),
            "u" => Some(self.u),
            _ => None,
        }
    }
}

/// Looks names up in `first`, then in `second`.
pub struct Chain<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: Env + ?Sized, B: Env + ?Sized> Env for Chain<'_, A, B> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.0.lookup(name).or_else(|| self.1.lookup(name))
    }
}

fn domain(msg: impl Into<String>) -> ExprError {
    ExprError::Domain(msg.into())
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(value: f64) -> Expr {
        Expr::from_node(Node::Const(value))
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_node(Node::Var(Arc::from(name)))
    }

    pub fn x() -> Expr {
        Expr::var("x")
    }

    pub fn t() -> Expr {
        Expr::var("t")
    }

    pub fn u() -> Expr {
        Expr::var("u")
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_const(&self, value: f64) -> bool {
        self.as_const() == Some(value)
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Const(v) => Expr::constant(-v),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            (Some(0.0), _) => rhs.clone(),
            (_, Some(0.0)) => self.clone(),
            _ => Expr::from_node(Node::Add(self.clone(), rhs.clone())),
        }
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a - b),
            (Some(0.0), _) => rhs.neg(),
            (_, Some(0.0)) => self.clone(),
            _ => Expr::from_node(Node::Sub(self.clone(), rhs.clone())),
        }
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(0.0), _) | (_, Some(0.0)) => Expr::zero(),
            (Some(1.0), _) => rhs.clone(),
            (_, Some(1.0)) => self.clone(),
            (Some(-1.0), _) => rhs.neg(),
            (_, Some(-1.0)) => self.neg(),
            _ => Expr::from_node(Node::Mul(self.clone(), rhs.clone())),
        }
    }

    pub fn div(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::constant(a / b),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(1.0)) => self.clone(),
            _ => Expr::from_node(Node::Div(self.clone(), rhs.clone())),
        }
    }

    pub fn pow(&self, exponent: &Expr) -> Expr {
        match (self.as_const(), exponent.as_const()) {
            (Some(a), Some(b)) => match pow_checked(a, b) {
                Ok(v) if v.is_finite() => Expr::constant(v),
                _ => Expr::from_node(Node::Pow(self.clone(), exponent.clone())),
            },
            (_, Some(0.0)) => Expr::one(),
            (_, Some(1.0)) => self.clone(),
            (Some(1.0), _) => Expr::one(),
            _ => Expr::from_node(Node::Pow(self.clone(), exponent.clone())),
        }
    }

    pub fn powf(&self, exponent: f64) -> Expr {
        self.pow(&Expr::constant(exponent))
    }

    pub fn call(func: Func, arg: &Expr) -> Expr {
        if let Some(v) = arg.as_const() {
            if let Ok(r) = apply_func(func, v) {
                if r.is_finite() {
                    return Expr::constant(r);
                }
            }
        }
        Expr::from_node(Node::Call(func, arg.clone()))
    }

    pub fn exp(&self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn log(&self) -> Expr {
        Expr::call(Func::Log, self)
    }

    pub fn sqrt(&self) -> Expr {
        Expr::call(Func::Sqrt, self)
    }

    pub fn abs(&self) -> Expr {
        Expr::call(Func::Abs, self)
    }

    pub fn scale(&self, factor: f64) -> Expr {
        Expr::constant(factor).mul(self)
    }

    /// Evaluates in IEEE double precision.
    pub fn eval<E: Env + ?Sized>(&self, env: &E) -> Result<f64, ExprError> {
        match self.node() {
            Node::Const(v) => Ok(*v),
            Node::Var(name) => env
                .lookup(name)
                .ok_or_else(|| ExprError::Unbound(name.to_string())),
            Node::Neg(a) => Ok(-a.eval(env)?),
            Node::Add(a, b) => Ok(a.eval(env)? + b.eval(env)?),
            Node::Sub(a, b) => Ok(a.eval(env)? - b.eval(env)?),
            Node::Mul(a, b) => Ok(a.eval(env)? * b.eval(env)?),
            Node::Div(a, b) => {
                let num = a.eval(env)?;
                let den = b.eval(env)?;
                if den == 0.0 {
                    return Err(domain("division by zero"));
                }
                Ok(num / den)
            }
            Node::Pow(a, b) => pow_checked(a.eval(env)?, b.eval(env)?),
            Node::Call(f, a) => apply_func(*f, a.eval(env)?),
        }
    }

    /// Free variable names (coordinates and unbound constants).
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(n) => {
                out.insert(n.to_string());
            }
            Node::Neg(a) | Node::Call(_, a) => a.collect_vars(out),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Var(n) => &**n == name,
            Node::Neg(a) | Node::Call(_, a) => a.contains_var(name),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => a.contains_var(name) || b.contains_var(name),
        }
    }

    /// Simultaneous substitution of variables by expressions.
    pub fn substitute(&self, map: &HashMap<&str, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        self.subst_inner(map)
    }

    fn subst_inner(&self, map: &HashMap<&str, Expr>) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(n) => map.get(&**n).cloned().unwrap_or_else(|| self.clone()),
            Node::Neg(a) => a.subst_inner(map).neg(),
            Node::Add(a, b) => a.subst_inner(map).add(&b.subst_inner(map)),
            Node::Sub(a, b) => a.subst_inner(map).sub(&b.subst_inner(map)),
            Node::Mul(a, b) => a.subst_inner(map).mul(&b.subst_inner(map)),
            Node::Div(a, b) => a.subst_inner(map).div(&b.subst_inner(map)),
            Node::Pow(a, b) => a.subst_inner(map).pow(&b.subst_inner(map)),
            Node::Call(f, a) => Expr::call(*f, &a.subst_inner(map)),
        }
    }

    /// Substitutes a single variable.
    pub fn subst(&self, name: &str, with: &Expr) -> Expr {
        let mut map = HashMap::new();
        map.insert(name, with.clone());
        self.substitute(&map)
    }

    /// Replaces named constants by their numeric values.
    pub fn bind(&self, values: &BTreeMap<String, f64>) -> Expr {
        let map: HashMap<&str, Expr> = values
            .iter()
            .map(|(k, v)| (k.as_str(), Expr::constant(*v)))
            .collect();
        self.substitute(&map)
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Call(_, a) => 1 + a.size(),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => 1 + a.size() + b.size(),
        }
    }
}

pub(crate) fn pow_checked(base: f64, exponent: f64) -> Result<f64, ExprError> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(domain(format!(
            "negative base {base} raised to non-integer power {exponent}"
        )));
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(domain("division by zero (zero base, negative exponent)"));
    }
    Ok(base.powf(exponent))
}

pub(crate) fn apply_func(func: Func, v: f64) -> Result<f64, ExprError> {
    match func {
        Func::Exp => Ok(v.exp()),
        Func::Log => {
            if v <= 0.0 {
                Err(domain(format!("log of non-positive value {v}")))
            } else {
                Ok(v.ln())
            }
        }
        Func::Sqrt => {
            if v < 0.0 {
                Err(domain(format!("sqrt of negative value {v}")))
            } else {
                Ok(v.sqrt())
            }
        }
        Func::Abs => Ok(v.abs()),
    }
}

// Binding strength used by the printer.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Pow(..) => 3,
        Node::Neg(..) => 0,
        Node::Const(v) if *v < 0.0 => 0,
        _ => 5,
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) {
        write!(f, "{v}")
    } else {
        write!(f, "{v:e}")
    }
}

impl Expr {
    fn write_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if precedence(self.node()) < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(v) if *v < 0.0 => {
                f.write_str("-")?;
                write_number(f, -v)
            }
            Node::Const(v) => write_number(f, *v),
            Node::Var(n) => f.write_str(n),
            Node::Neg(a) => {
                f.write_str("-")?;
                // unary minus binds tighter than `^`, so anything compound is wrapped
                a.write_child(f, 5)
            }
            Node::Add(a, b) => {
                a.write_child(f, 1)?;
                f.write_str(" + ")?;
                b.write_child(f, 2)
            }
            Node::Sub(a, b) => {
                a.write_child(f, 1)?;
                f.write_str(" - ")?;
                b.write_child(f, 2)
            }
            Node::Mul(a, b) => {
                a.write_child(f, 2)?;
                f.write_str("*")?;
                b.write_child(f, 3)
            }
            Node::Div(a, b) => {
                a.write_child(f, 2)?;
                f.write_str("/")?;
                b.write_child(f, 3)
            }
            Node::Pow(a, b) => {
                a.write_child(f, 4)?;
                f.write_str("^")?;
                b.write_child(f, 3)
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inherent:ident) => {
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inherent(self, rhs)
            }
        }
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inherent(&self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inherent(&self, rhs)
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inherent(self, &rhs)
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$inherent(&self, &Expr::constant(rhs))
            }
        }
        impl ops::$trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$inherent(self, &Expr::constant(rhs))
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inherent(&Expr::constant(self), &rhs)
            }
        }
        impl ops::$trait<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inherent(&Expr::constant(self), rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Expr {
        Expr::constant(v)
    }
}
