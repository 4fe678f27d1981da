use std::collections::HashMap;
use std::fmt;

use crate::expr::{Expr, ExprError, Point};
use crate::transforms::{Frame, Transform};

/// Which chart a generator's coefficients are written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    /// The bond-pricing variables `(x, t, u)`.
    Original,
    /// The heat-frame variables `(x̄, τ, φ)`.
    Reduced,
    /// Printed with a mix of symbols from both charts.
    Ambiguous,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Original => "original",
            Chart::Reduced => "reduced",
            Chart::Ambiguous => "ambiguous",
        })
    }
}

/// `ξ¹∂_x + ξ²∂_t + η∂_u`, coefficients over `x`, `t`, `u` of its chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub xi1: Expr,
    pub xi2: Expr,
    pub eta: Expr,
    pub frame: Chart,
}

impl Generator {
    pub fn new(xi1: Expr, xi2: Expr, eta: Expr, frame: Chart) -> Self {
        Generator {
            xi1,
            xi2,
            eta,
            frame,
        }
    }

    /// `∂_t`.
    pub fn time_translation(frame: Chart) -> Self {
        Generator::new(Expr::zero(), Expr::one(), Expr::zero(), frame)
    }

    pub fn eval(&self, x: f64, t: f64, u: f64) -> Result<[f64; 3], ExprError> {
        let p = Point::new(x, t, u);
        Ok([self.xi1.eval(&p)?, self.xi2.eval(&p)?, self.eta.eval(&p)?])
    }

    /// `Σ c_k g_k`; all generators must share a chart.
    pub fn combine(gens: &[Generator], coefficients: &[f64]) -> Generator {
        assert_eq!(gens.len(), coefficients.len(), "one coefficient per generator");
        let frame = gens.first().map_or(Chart::Reduced, |g| g.frame);
        gens.iter().zip(coefficients).fold(
            Generator::new(Expr::zero(), Expr::zero(), Expr::zero(), frame),
            |acc, (g, &c)| Generator {
                xi1: acc.xi1 + c * &g.xi1,
                xi2: acc.xi2 + c * &g.xi2,
                eta: acc.eta + c * &g.eta,
                frame,
            },
        )
    }

    /// The generator of the conjugated flow `T ∘ exp(εg) ∘ T⁻¹`.
    pub fn push(&self, transform: &Transform) -> Generator {
        let mut g = self.clone();
        for stage in transform.stages() {
            let fwd = &stage.forward;
            let xi1 = fwd.space.differentiate("x") * &g.xi1;
            let xi2 = fwd.time.differentiate("t") * &g.xi2;
            let eta = fwd.dependent.differentiate("x") * &g.xi1
                + fwd.dependent.differentiate("u") * &g.eta;
            let mut back = HashMap::new();
            back.insert("x", stage.inverse.space.clone());
            back.insert("t", stage.inverse.time.clone());
            back.insert("u", stage.inverse.dependent.clone());
            g = Generator {
                xi1: xi1.substitute(&back),
                xi2: xi2.substitute(&back),
                eta: eta.substitute(&back),
                frame: g.frame,
            };
        }
        g.frame = match (g.frame, transform.to_frame()) {
            (Chart::Ambiguous, _) => Chart::Ambiguous,
            (_, Frame::Heat) => Chart::Reduced,
            (_, Frame::Bond(_)) => Chart::Original,
        };
        g
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})∂x + ({})∂t + ({})∂u [{}]",
            self.xi1, self.xi2, self.eta, self.frame
        )
    }
}

/// A spanning set printed for one similarity solution.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub generators: Vec<Generator>,
    pub frame: Chart,
}
