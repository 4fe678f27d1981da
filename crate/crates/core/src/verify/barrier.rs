use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::expr::{Expr, Point};
use crate::solutions::BarrierSpec;
use crate::transforms::Transform;

use super::generator::{Chart, Generator};
use super::report::{Report, VerifyError, Worst};

/// The barrier manifold `x = H(t), u = R(t)` of one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierCurve {
    pub h: Expr,
    pub r: Expr,
    pub frame: Chart,
}

impl BarrierCurve {
    pub fn from_spec(spec: &BarrierSpec) -> Self {
        BarrierCurve {
            h: spec.h.clone(),
            r: spec.r.clone(),
            frame: Chart::Original,
        }
    }

    /// Image of the curve, reparametrised by the new time.
    pub fn push(&self, transform: &Transform) -> BarrierCurve {
        let mut h = self.h.clone();
        let mut r = self.r.clone();
        for stage in transform.stages() {
            let on_curve = |e: &Expr, h: &Expr, r: &Expr| {
                let mut m = HashMap::new();
                m.insert("x", h.clone());
                m.insert("u", r.clone());
                e.substitute(&m).subst("t", &stage.inverse.time)
            };
            let (h2, r2) = (
                on_curve(&stage.forward.space, &h, &r),
                on_curve(&stage.forward.dependent, &h, &r),
            );
            h = h2;
            r = r2;
        }
        BarrierCurve {
            h,
            r,
            frame: Chart::Reduced,
        }
    }

    /// `(ξ¹ − H′ξ², η − R′ξ²)` on the curve at time `t`.
    pub fn conditions(&self, g: &Generator, t: f64) -> Result<[f64; 2], VerifyError> {
        let p = Point::new(f64::NAN, t, f64::NAN);
        let domain = |source| VerifyError::Domain { x: f64::NAN, t, source };
        let h = self.h.eval(&p).map_err(domain)?;
        let r = self.r.eval(&p).map_err(domain)?;
        let hp = self.h.differentiate("t").eval(&p).map_err(domain)?;
        let rp = self.r.differentiate("t").eval(&p).map_err(domain)?;
        let [xi1, xi2, eta] = g
            .eval(h, t, r)
            .map_err(|source| VerifyError::Domain { x: h, t, source })?;
        Ok([xi1 - hp * xi2, eta - rp * xi2])
    }
}

fn check_frames(g: &Generator, curve: &BarrierCurve) -> Result<(), VerifyError> {
    if g.frame != curve.frame && g.frame != Chart::Ambiguous && curve.frame != Chart::Ambiguous {
        return Err(VerifyError::FrameMismatch(format!(
            "generator in {} chart, barrier in {}",
            g.frame, curve.frame
        )));
    }
    Ok(())
}

/// Largest violation of the infinitesimal invariance of the barrier manifold
/// by `g` over `ts`.
pub fn boundary_invariance_check(
    g: &Generator,
    curve: &BarrierCurve,
    ts: &[f64],
    tol: f64,
) -> Result<Report, VerifyError> {
    check_frames(g, curve)?;
    if ts.is_empty() {
        return Err(VerifyError::Empty);
    }
    let mut worst = Worst::new();
    for &t in ts {
        let [a, b] = curve.conditions(g, t)?;
        worst.push(a.abs().max(b.abs()), (f64::NAN, t));
    }
    Ok(worst.report("boundary-invariance", "", tol))
}

/// A generator combination found by [`find_combination`].
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    /// Coefficients over the span, scaled so the first nonzero entry is one.
    pub coefficients: Vec<f64>,
    /// `max |A c|` over all sampled conditions, for `c` scaled to `max |c_k| = 1`.
    pub residual: f64,
    pub exists: bool,
    /// No constant combination works, yet one does at every sampled time.
    pub time_dependent: bool,
}

fn condition_matrix(
    gens: &[Generator],
    curve: &BarrierCurve,
    ts: &[f64],
) -> Result<DMatrix<f64>, VerifyError> {
    let mut a = DMatrix::zeros(2 * ts.len(), gens.len());
    for (k, g) in gens.iter().enumerate() {
        for (i, &t) in ts.iter().enumerate() {
            let [p, v] = curve.conditions(g, t)?;
            a[(2 * i, k)] = p;
            a[(2 * i + 1, k)] = v;
        }
    }
    Ok(a)
}

/// Unit right-singular vector of the smallest singular value, normalised.
fn null_direction(a: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let n = a.ncols();
    // pad to at least n rows so the thin SVD exposes every right vector
    let mut m = DMatrix::zeros(a.nrows().max(n), n);
    m.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let k = (0..n)
        .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .expect("non-empty span");
    let mut c: Vec<f64> = v_t.row(k).iter().copied().collect();
    // residual measured with the largest coefficient of unit size
    let big = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let resid = (a * nalgebra::DVector::from_column_slice(&c)).amax() / big;
    let lead = c.iter().copied().find(|v| v.abs() > 1e-8 * big).unwrap_or(1.0);
    for v in &mut c {
        *v /= lead;
    }
    (c, resid)
}

/// Least-squares search for `c` with `Σ c_k g_k` leaving the barrier
/// manifold invariant at every sampled time.
pub fn find_combination(
    gens: &[Generator],
    curve: &BarrierCurve,
    ts: &[f64],
    threshold: f64,
) -> Result<Combination, VerifyError> {
    if gens.is_empty() || ts.is_empty() {
        return Err(VerifyError::Empty);
    }
    for g in gens {
        check_frames(g, curve)?;
    }
    let a = condition_matrix(gens, curve, ts)?;
    let (coefficients, residual) = null_direction(&a);
    let exists = residual < threshold;
    let time_dependent = !exists
        && ts.iter().try_fold(true, |all, &t| {
            let a = condition_matrix(gens, curve, &[t])?;
            Ok::<_, VerifyError>(all && null_direction(&a).1 < threshold)
        })?;
    Ok(Combination {
        coefficients,
        residual,
        exists,
        time_dependent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn curve(h: &str, r: &str) -> BarrierCurve {
        BarrierCurve {
            h: parse(h, &[]).unwrap(),
            r: parse(r, &[]).unwrap(),
            frame: Chart::Original,
        }
    }

    #[test]
    fn constant_barrier_is_time_invariant() {
        let c = curve("0.5", "2");
        let g = Generator::time_translation(Chart::Original);
        let r = boundary_invariance_check(&g, &c, &[0.0, 0.5, 1.0], 1e-12).unwrap();
        assert_eq!(r.max, 0.0);
    }

    #[test]
    fn frames_must_agree() {
        let c = curve("0.5", "2");
        let g = Generator::time_translation(Chart::Reduced);
        assert!(matches!(
            boundary_invariance_check(&g, &c, &[0.0], 1e-12),
            Err(VerifyError::FrameMismatch(_))
        ));
    }

    #[test]
    fn combination_for_moving_barrier() {
        // x = e^t, u = 0: ∂_t alone fails, x∂_x + ∂_t preserves it
        let c = curve("exp(t)", "0");
        let gens = [
            Generator::time_translation(Chart::Original),
            Generator::new(Expr::x(), Expr::zero(), Expr::zero(), Chart::Original),
            Generator::new(Expr::zero(), Expr::zero(), Expr::one(), Chart::Original),
        ];
        let single = boundary_invariance_check(&gens[0], &c, &[0.0, 0.5], 1e-8).unwrap();
        assert!(!single.pass);
        let comb = find_combination(&gens, &c, &[0.0, 0.4, 0.8], 1e-8).unwrap();
        assert!(comb.exists && !comb.time_dependent);
        let expect = [1.0, 1.0, 0.0];
        for (a, b) in comb.coefficients.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{:?}", comb.coefficients);
        }
    }

    #[test]
    fn pointwise_only_combination_is_time_dependent() {
        // x = t², u = 0 with ∂_t and ∂_x: c₁ − 2t c₀ = 0 depends on t
        let c = curve("t^2", "0");
        let gens = [
            Generator::time_translation(Chart::Original),
            Generator::new(Expr::one(), Expr::zero(), Expr::zero(), Chart::Original),
        ];
        let comb = find_combination(&gens, &c, &[0.2, 0.5, 0.9], 1e-8).unwrap();
        assert!(!comb.exists && comb.time_dependent);
    }
}
