use super::{Expr, Func, Node};

impl Expr {
    /// Symbolic partial derivative with respect to `var`.
    ///
    /// `d|w| = (w/|w|) dw`, so evaluating the derivative where `w = 0` is a
    /// division-by-zero domain error.
    pub fn differentiate(&self, var: &str) -> Expr {
        if !self.contains_var(var) {
            return Expr::zero();
        }
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(n) => {
                if &**n == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Neg(a) => a.differentiate(var).neg(),
            Node::Add(a, b) => a.differentiate(var).add(&b.differentiate(var)),
            Node::Sub(a, b) => a.differentiate(var).sub(&b.differentiate(var)),
            Node::Mul(a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                da.mul(b).add(&a.mul(&db))
            }
            Node::Div(a, b) => {
                let da = a.differentiate(var);
                if !b.contains_var(var) {
                    return da.div(b);
                }
                let db = b.differentiate(var);
                da.mul(b).sub(&a.mul(&db)).div(&b.powf(2.0))
            }
            Node::Pow(base, exponent) => {
                let base_dep = base.contains_var(var);
                let exp_dep = exponent.contains_var(var);
                match (base_dep, exp_dep) {
                    (true, false) => {
                        let reduced = match exponent.as_const() {
                            Some(c) => Expr::constant(c - 1.0),
                            None => exponent.sub(&Expr::one()),
                        };
                        exponent
                            .mul(&base.pow(&reduced))
                            .mul(&base.differentiate(var))
                    }
                    (false, true) => self.mul(&base.log()).mul(&exponent.differentiate(var)),
                    _ => {
                        let de = exponent.differentiate(var);
                        let db = base.differentiate(var);
                        self.mul(&de.mul(&base.log()).add(&exponent.mul(&db).div(base)))
                    }
                }
            }
            Node::Call(func, a) => {
                let da = a.differentiate(var);
                let outer = match func {
                    Func::Exp => self.clone(),
                    Func::Log => Expr::one().div(a),
                    Func::Sqrt => Expr::constant(0.5).div(self),
                    Func::Abs => a.div(self),
                };
                outer.mul(&da)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Expr};

    #[test]
    fn power_rule() {
        let d = parse("x^2", &[]).unwrap().differentiate("x");
        assert_eq!(d.to_string(), "2*x");
        assert!(parse("x^2", &[]).unwrap().differentiate("t").is_const(0.0));
    }

    #[test]
    fn abs_derivative_is_sign() {
        let d = Expr::u().abs().differentiate("u");
        assert_eq!(d.eval(&[("u", -3.0)]).unwrap(), -1.0);
        assert_eq!(d.eval(&[("u", 2.0)]).unwrap(), 1.0);
        assert!(d.eval(&[("u", 0.0)]).is_err());
    }

    #[test]
    fn exponent_and_mixed_powers() {
        let e = parse("x^x", &[]).unwrap();
        let d = e.differentiate("x");
        let x: f64 = 1.7;
        let expected = x.powf(x) * (x.ln() + 1.0);
        assert!((d.eval(&[("x", x)]).unwrap() - expected).abs() < 1e-13);
        let e = parse("2^t", &[]).unwrap();
        let d = e.differentiate("t");
        assert!((d.eval(&[("t", 1.0)]).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
    }
}
