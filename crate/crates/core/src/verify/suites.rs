//! Named groups of checks over the catalog, as run by `bondsym verify`.

use crate::expr::{Expr, Point};
use crate::fdsolver::{self, Grid, SolverConfig};
use crate::model::{Equation, Params, PdeProblem};
use crate::sampling::{self, linspace, Region};
use crate::solutions::{self, CaseId, ClosedFormCase};
use crate::transforms::{self, EquivalenceGroupElement};

use super::report::{Report, VerifyError, ERRATUM_CANDIDATE};
use super::{
    barrier_check, exponential_family_check, find_combination, flow_map, pde_residual_sweep,
    residual_sweep, roundtrip_check, solution_to_solution_check, terminal_check, BarrierCurve,
    Chart, FlowInput, FlowOptions, Generator,
};

pub const SUITES: [&str; 9] = [
    "catalog-residuals",
    "negative-controls",
    "terminal",
    "transport",
    "special-cases",
    "barrier",
    "flow",
    "fd",
    "derivatives",
];

/// Cases whose residuals were confirmed by hand; only these may fail a suite.
const HAND_VERIFIED: [CaseId; 2] = [CaseId::TGammaOne, CaseId::TGammaHalf];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Restricts per-case suites to one case.
    pub case: Option<CaseId>,
    /// Overrides every default tolerance.
    pub tol: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: sampling::DEFAULT_SEED,
            case: None,
            tol: None,
        }
    }
}

impl SuiteOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn cases(&self, filter: impl Fn(CaseId) -> bool) -> Vec<ClosedFormCase> {
        solutions::catalog()
            .into_iter()
            .filter(|c| filter(c.id) && self.case.is_none_or(|id| id == c.id))
            .collect()
    }
}

/// Runs one named suite. Unknown names give `None`.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Option<Vec<Report>> {
    let reports = match name {
        "catalog-residuals" => catalog_residuals(opts),
        "negative-controls" => negative_controls(opts),
        "terminal" => terminal(opts),
        "transport" => transport(opts),
        "special-cases" => special_cases(opts),
        "barrier" => barrier(opts),
        "flow" => flow(opts),
        "fd" => fd(opts),
        "derivatives" => derivatives(opts),
        _ => return None,
    };
    Some(reports)
}

/// A failed evaluation becomes a failing record rather than aborting the suite.
fn record(check: &str, case: &str, tol: f64, r: Result<Report, VerifyError>) -> Report {
    match r {
        Ok(r) => Report {
            check: check.into(),
            case: case.into(),
            ..r
        },
        Err(e) => Report::new(check, case, 0, f64::NAN, tol).with_note(e.to_string()),
    }
}

pub fn catalog_residuals(opts: &SuiteOptions) -> Vec<Report> {
    let tol = opts.tol(1e-8);
    let mut out = Vec::new();
    for c in opts.cases(|_| true) {
        let prob = c.problem();
        let name = c.id.name();
        let mut r = record(
            "catalog-residual",
            name,
            tol,
            pde_residual_sweep(&prob, &c.solution, &c.region, 200, tol, opts.seed),
        )
        .with_excluded(c.excluded_loci);
        if !r.pass && !HAND_VERIFIED.contains(&c.id) {
            r.status = Some(ERRATUM_CANDIDATE.into());
            r.residual = Equation::Bond(prob.clone())
                .operator(&c.solution)
                .ok()
                .map(|op| op.symbolic().to_string());
        }
        out.push(r);
    }
    out
}

/// Each catalog solution plus `1e-3·x` must leave a residual above a hundred
/// times the sweep tolerance.
pub fn negative_controls(opts: &SuiteOptions) -> Vec<Report> {
    let floor = 100.0 * opts.tol(1e-8);
    opts.cases(|_| true)
        .into_iter()
        .map(|c| {
            let bumped = &c.solution + 1e-3 * Expr::x();
            let r = pde_residual_sweep(&c.problem(), &bumped, &c.region, 200, floor, opts.seed);
            record("perturbed-residual", c.id.name(), floor, r.map(Report::negated))
        })
        .collect()
}

pub fn terminal(opts: &SuiteOptions) -> Vec<Report> {
    let tol = opts.tol(1e-12);
    // T-GammaOne's printed solution vanishes at t = T
    let wanted = [CaseId::TGeneric, CaseId::TGammaHalf, CaseId::TDeltaChain];
    opts.cases(|id| wanted.contains(&id))
        .into_iter()
        .map(|c| {
            let xs = linspace(c.region.x.0, c.region.x.1, 50);
            record(
                "terminal",
                c.id.name(),
                tol,
                terminal_check(&c.solution, c.terminal_time(), &xs, tol),
            )
        })
        .collect()
}

/// Heat-frame residual of a catalog solution pushed through its reduction chain.
pub fn transport_residual(
    c: &ClosedFormCase,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<Report, VerifyError> {
    let chain = transforms::reduction_chain(&c.params)?;
    let heat = chain.transport(&Equation::Bond(c.problem()))?;
    let phi = chain.push_solution(&c.solution);
    let mut pts = Vec::with_capacity(n);
    for (x, t) in c.region.sample(n, seed) {
        let u = c
            .solution
            .eval(&Point::new(x, t, 0.0))
            .map_err(|source| VerifyError::Domain { x, t, source })?;
        let (xb, tb, _) = chain
            .push_point(x, t, u)
            .map_err(|source| VerifyError::Domain { x, t, source })?;
        pts.push((xb, tb));
    }
    residual_sweep(&heat, &phi, &pts, tol)
}

/// Round trip of the reduction chain at points on the solution's graph.
pub fn transport_roundtrip(
    c: &ClosedFormCase,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<Report, VerifyError> {
    let chain = transforms::reduction_chain(&c.params)?;
    let pts = c
        .region
        .sample(n, seed)
        .into_iter()
        .map(|(x, t)| {
            c.solution
                .eval(&Point::new(x, t, 0.0))
                .map(|u| (x, t, u))
                .map_err(|source| VerifyError::Domain { x, t, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    roundtrip_check(&chain, &pts, tol)
}

pub fn transport(opts: &SuiteOptions) -> Vec<Report> {
    let (tol_res, tol_rt) = (opts.tol(1e-7), opts.tol(1e-12));
    let mut out = Vec::new();
    for c in opts.cases(|_| true) {
        let name = c.id.name();
        out.push(record(
            "transport-residual",
            name,
            tol_res,
            transport_residual(&c, 100, opts.seed, tol_res),
        ));
        out.push(record(
            "transport-roundtrip",
            name,
            tol_rt,
            transport_roundtrip(&c, 100, opts.seed, tol_rt),
        ));
    }
    out
}

fn drift_free(gamma: f64, delta: f64) -> Params {
    Params::new(0.0, 0.0, gamma, delta, 0.0, std::f64::consts::SQRT_2)
}

fn graph_points(n: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    Region::new((0.3, 3.0), (-1.0, 1.0))
        .sample(n, seed)
        .into_iter()
        .enumerate()
        .map(|(k, (x, t))| (x, t, 0.5 + 0.01 * k as f64))
        .collect()
}

/// Group element with `ζ₂² = 1/(1−γ)` against the power map:
/// equal space and dependent components, opposite times.
pub fn group_vs_power_map(gamma: f64, n: usize, seed: u64) -> Result<Report, VerifyError> {
    let z2 = (1.0 / (1.0 - gamma)).sqrt();
    let e = EquivalenceGroupElement::new(0.0, 1.0, z2, Expr::zero());
    let group = transforms::group_element(&e, gamma, 0.5)?;
    let power = transforms::power_map(&drift_free(gamma, 0.5))?;
    let mut worst = 0.0f64;
    for (x, t, u) in graph_points(n, seed) {
        let domain = |source| VerifyError::Domain { x, t, source };
        let a = group.push_point(x, t, u).map_err(domain)?;
        let b = power.push_point(x, t, u).map_err(domain)?;
        worst = worst
            .max((a.0 - b.0).abs())
            .max((a.1 + b.1).abs())
            .max((a.2 - b.2).abs());
    }
    Ok(Report::new("group-vs-gamma-zero", "", n, worst, 1e-12)
        .with_note(format!("gamma={gamma}, time flipped")))
}

/// The printed square-root map against the power map at `γ = 1/2`,
/// coordinates and source rule.
pub fn gamma_half_vs_power_map(n: usize, seed: u64) -> Result<Report, VerifyError> {
    let p = drift_free(0.5, 0.3);
    let printed = transforms::gamma_zero(&p, crate::model::CaseTag::GammaHalf)?;
    let power = transforms::power_map(&p)?;
    let (ra, rb) = (&printed.stages()[0].source_rule, &power.stages()[0].source_rule);
    let mut worst = 0.0f64;
    for (k, (x, t, u)) in graph_points(n, seed).into_iter().enumerate() {
        let domain = |source| VerifyError::Domain { x, t, source };
        let a = printed.push_point(x, t, u).map_err(domain)?;
        let b = power.push_point(x, t, u).map_err(domain)?;
        let f = -1.0 + 0.02 * k as f64;
        let env = [("x", x), ("u", u), ("f", f)];
        let rule = (ra.eval(&env).map_err(domain)? - rb.eval(&env).map_err(domain)?).abs();
        worst = worst
            .max((a.0 - b.0).abs())
            .max((a.1 - b.1).abs())
            .max((a.2 - b.2).abs())
            .max(rule);
    }
    Ok(Report::new("gamma-half-vs-generic", "", n, worst, 1e-12))
}

pub fn special_cases(opts: &SuiteOptions) -> Vec<Report> {
    let tol = opts.tol(1e-12);
    let mut out: Vec<Report> = [0.0, 0.3, 0.7, -0.5]
        .into_iter()
        .map(|g| {
            record(
                "group-vs-gamma-zero",
                "",
                tol,
                group_vs_power_map(g, 100, opts.seed).map(|r| r.at_tolerance(tol)),
            )
        })
        .collect();
    out.push(record(
        "gamma-half-vs-generic",
        "",
        tol,
        gamma_half_vs_power_map(100, opts.seed).map(|r| r.at_tolerance(tol)),
    ));
    out
}

/// Barrier curve and generators of a barrier case in the heat frame, with
/// the images of `ts`.
pub fn heat_frame_barrier(
    c: &ClosedFormCase,
    ts: &[f64],
) -> Result<(BarrierCurve, Vec<Generator>, Vec<f64>), VerifyError> {
    let spec = c
        .barrier()
        .ok_or(VerifyError::FrameMismatch(format!("{} has no barrier", c.id)))?;
    let chain = transforms::reduction_chain(&c.params)?;
    let curve = BarrierCurve::from_spec(spec).push(&chain);
    let taus = ts
        .iter()
        .map(|&t| {
            let h = spec.h_at(t)?;
            let r = spec.r.eval(&Point::new(h, t, 0.0))?;
            Ok(chain.push_point(h, t, r)?.1)
        })
        .collect::<Result<Vec<_>, crate::expr::ExprError>>()?;
    Ok((curve, c.generators.generators.clone(), taus))
}

pub fn barrier(opts: &SuiteOptions) -> Vec<Report> {
    let tol_exact = opts.tol(1e-12);
    let tol_comb = opts.tol(1e-8);
    let mut out = Vec::new();
    for c in opts.cases(CaseId::is_barrier) {
        let name = c.id.name();
        let spec = c.barrier().expect("barrier case");
        let ts = linspace(0.0, c.terminal_time(), 50);
        out.push(record(
            "exponential-family",
            name,
            tol_exact,
            exponential_family_check(spec, &ts, tol_exact),
        ));
        out.push(record(
            "barrier",
            name,
            tol_exact,
            barrier_check(&c.solution, spec, &ts, tol_exact),
        ));
        let t_end = c.terminal_time();
        let combination = heat_frame_barrier(&c, &[0.0, 0.5 * t_end, t_end]).and_then(
            |(curve, gens, taus)| {
                let comb = find_combination(&gens, &curve, &taus, tol_comb)?;
                let coeffs: Vec<String> =
                    comb.coefficients.iter().map(|v| format!("{v:.6}")).collect();
                Ok(Report::new("barrier-combination", name, taus.len(), comb.residual, tol_comb)
                    .with_note(format!(
                        "c = [{}], time-dependent: {}",
                        coeffs.join(", "),
                        comb.time_dependent
                    )))
            },
        );
        out.push(record("barrier-combination", name, tol_comb, combination));
    }
    out
}

/// `∂_t` flow of T-GammaHalf by 0.3 against `u(x, t − 0.3)`.
pub fn flow_translation(tol: f64) -> Result<Report, VerifyError> {
    let c = solutions::get_case(CaseId::TGammaHalf);
    let grid = Grid::uniform((0.5, 2.0), 61, (0.35, 0.95), 61)?;
    let g = Generator::time_translation(Chart::Original);
    let s = flow_map(&g, FlowInput::Expr(&c.solution), 0.3, &grid, &FlowOptions::default())?;
    let shifted = c.solution.subst("t", &(Expr::t() - 0.3));
    let (max, at) = s.max_abs_error(&shifted)?;
    Ok(Report::new("flow-translation", c.id.name(), s.valid_count(), max, tol).with_argmax(at))
}

/// T-GammaOne in the heat frame: solution, equation and grid for flows.
pub fn gamma_one_heat_frame() -> Result<(Expr, Equation, Vec<Generator>), VerifyError> {
    let c = solutions::get_case(CaseId::TGammaOne);
    let chain = transforms::reduction_chain(&c.params)?;
    let heat = chain.transport(&Equation::Bond(c.problem()))?;
    Ok((chain.push_solution(&c.solution), heat, c.generators.generators))
}

/// Scaling generator `2x∂_x + 4t∂_t` on the heat-frame T-GammaOne solution.
pub fn flow_scaling(opts: &FlowOptions, n: usize, tol: f64) -> Result<Report, VerifyError> {
    let (phi, heat, gens) = gamma_one_heat_frame()?;
    let grid = Grid::uniform((0.3, 1.0), n, (-0.8, -0.1), n)?;
    let r = solution_to_solution_check(&gens[1], &|_| Ok(heat.clone()), &phi, &[0.1], &grid, opts, tol)?;
    Ok(r.with_case("T-GammaOne"))
}

fn gamma_half_flow_grid() -> Result<Grid, VerifyError> {
    Ok(Grid::uniform((0.5, 2.0), 61, (0.5, 0.99), 50)?)
}

/// `(x², 1, 0)` is not a symmetry; its flow must break the equation.
pub fn flow_negative_control(floor: f64) -> Result<Report, VerifyError> {
    let c = solutions::get_case(CaseId::TGammaHalf);
    let g = Generator::new(Expr::x() * Expr::x(), Expr::one(), Expr::zero(), Chart::Original);
    let eq = Equation::Bond(c.problem());
    let r = solution_to_solution_check(
        &g,
        &|_| Ok(eq.clone()),
        &c.solution,
        &[0.1],
        &gamma_half_flow_grid()?,
        &FlowOptions::default(),
        floor,
    )?;
    Ok(r.with_case(c.id.name()).negated())
}

/// `∂_t` on T-GammaHalf with `T` fixed, or co-translated to `T + ε` (which
/// changes `β = 2/T` and the source with it).
pub fn flow_time_coupling(co_translate: bool, tol: f64) -> Result<Report, VerifyError> {
    let c = solutions::get_case(CaseId::TGammaHalf);
    let g = Generator::time_translation(Chart::Original);
    let fixed = Equation::Bond(c.problem());
    let equation = |eps: f64| -> Result<Equation, VerifyError> {
        if !co_translate {
            return Ok(fixed.clone());
        }
        let mut k = c.constants.clone();
        k.insert("T".into(), c.terminal_time() + eps);
        let p = solutions::fit_params(c.id, c.params, &k);
        Ok(Equation::Bond(solutions::instantiate(c.id, p, &k)?.problem()))
    };
    let r = solution_to_solution_check(
        &g,
        &equation,
        &c.solution,
        &[-0.1, -0.05, 0.05, 0.1],
        &gamma_half_flow_grid()?,
        &FlowOptions::default(),
        tol,
    )?;
    Ok(r.with_case(c.id.name()))
}

pub fn flow(opts: &SuiteOptions) -> Vec<Report> {
    let tol_interp = opts.tol(1e-6);
    let tol_flow = opts.tol(1e-4);
    vec![
        record("flow-translation", "T-GammaHalf", tol_interp, flow_translation(tol_interp)),
        record(
            "flow-scaling",
            "T-GammaOne",
            tol_flow,
            flow_scaling(&FlowOptions::pullback(), 71, tol_flow)
                .map(|r| r.with_note("base-flow pullback")),
        ),
        record("flow-negative", "T-GammaHalf", 1e-1, flow_negative_control(1e-1)),
        record("flow-fixed-T", "T-GammaHalf", tol_flow, flow_time_coupling(false, tol_flow)),
        record(
            "flow-co-translated-T",
            "T-GammaHalf",
            tol_flow,
            flow_time_coupling(true, tol_flow).map(Report::negated),
        ),
    ]
}

fn bsm() -> (PdeProblem, Expr) {
    let beta = 0.05;
    let prob = PdeProblem::new(Params::new(0.0, beta, 1.0, 0.5, 0.0, 0.3), Expr::u().scale(beta))
        .expect("valid problem");
    let exact = (beta * (Expr::t() - 1.0)).exp();
    (prob, exact)
}

/// Largest nodal error of the BSM constant solution.
pub fn fd_bsm(tol: f64) -> Result<Report, VerifyError> {
    let (prob, exact) = bsm();
    let grid = Grid::log_uniform((0.5, 2.0), 101, (0.0, 1.0), 101)?;
    let s = fdsolver::solve_terminal(&prob, &grid, &Expr::one(), &SolverConfig::default())?;
    let (max, at) = s.max_abs_error(&exact)?;
    Ok(Report::new("fd-bsm", "BSM", s.valid_count(), max, tol).with_argmax(at))
}

/// Observed order on T-GammaHalf; `max` is the distance from 2.
pub fn fd_order(resolutions: &[(usize, usize)], theta: f64, tol: f64) -> Result<Report, VerifyError> {
    let c = solutions::get_case(CaseId::TGammaHalf);
    let t_end = c.terminal_time();
    let cfg = SolverConfig {
        theta,
        ..SolverConfig::default()
    }
    .validation(&c.solution);
    let cv = fdsolver::convergence_order(
        &c.problem(),
        &c.solution,
        (0.25, 4.0),
        (t_end / 2.0, t_end),
        resolutions,
        &cfg,
    )?;
    let expected = if theta == 0.5 { 2.0 } else { 1.0 };
    let errors: Vec<String> = cv.errors.iter().map(|e| format!("{e:.3e}")).collect();
    let mut r = Report::new("fd-order", c.id.name(), resolutions.len(), (cv.order - expected).abs(), tol)
        .with_note(format!("order {:.3}, errors [{}]", cv.order, errors.join(", ")));
    r.pass &= cv.monotone;
    Ok(r)
}

/// B-Generic on 200×200 over `x ∈ [0.45, 1.5]`: L∞ error and the largest
/// deviation of the barrier node from `R(t)`.
pub fn fd_barrier(tol: f64) -> Result<[Report; 2], VerifyError> {
    let c = solutions::get_case(CaseId::BGeneric);
    let spec = c.barrier().expect("barrier case");
    let t_end = c.terminal_time();
    let grid = Grid::for_gamma(c.params.gamma, (0.45, 1.5), 200, (0.0, t_end), 200)?;
    let payoff = c.solution.subst("t", &Expr::constant(t_end));
    let cfg = SolverConfig::default().validation(&c.solution);
    let s = fdsolver::solve_barrier(&c.problem(), &grid, spec, &payoff, &cfg)?;
    let (max, at) = s.max_abs_error(&c.solution)?;
    let mut edge = 0.0f64;
    for (n, &t) in s.front_fixed.grid.t().iter().enumerate().take(grid.nt() - 1) {
        let v = s.front_fixed.get(0, n).unwrap_or(f64::NAN);
        edge = edge.max((v - spec.r.eval(&[("t", t)])?).abs());
    }
    let name = c.id.name();
    Ok([
        Report::new("fd-barrier", name, s.front_fixed.valid_count(), max, tol).with_argmax(at),
        Report::new("fd-barrier-edge", name, grid.nt() - 1, edge, f64::EPSILON),
    ])
}

pub fn fd(opts: &SuiteOptions) -> Vec<Report> {
    let mut out = vec![
        record("fd-bsm", "BSM", opts.tol(1e-8), fd_bsm(opts.tol(1e-8))),
        record(
            "fd-order",
            "T-GammaHalf",
            0.3,
            fd_order(&[(50, 50), (100, 100), (200, 200)], 0.5, 0.3),
        ),
        record(
            "fd-order-theta1",
            "T-GammaHalf",
            0.3,
            fd_order(&[(400, 25), (400, 50), (400, 100)], 1.0, 0.3),
        ),
    ];
    match fd_barrier(opts.tol(1e-3)) {
        Ok(rs) => out.extend(rs),
        Err(e) => out.push(record("fd-barrier", "B-Generic", 1e-3, Err(e))),
    }
    out
}

/// Symbolic against central differences over `count` random expressions
/// of depth 6, three random bindings each, with `h = 1e-6·max(1, |v|)`;
/// `max` is the worst `|d − fd| / max(1, |fd|)`.
pub fn derivative_agreement(count: usize, seed: u64, tol: f64) -> Result<Report, VerifyError> {
    use rand::Rng;
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let e = sampling::random_expression(&mut rng, 6);
        for _ in 0..3 {
            let p = Point::new(
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.5..1.5),
            );
            for var in ["x", "t", "u"] {
                let shifted = |s: f64| {
                    let mut q = p;
                    match var {
                        "x" => q.x += s,
                        "t" => q.t += s,
                        _ => q.u += s,
                    }
                    e.eval(&q)
                };
                let v = match var {
                    "x" => p.x,
                    "t" => p.t,
                    _ => p.u,
                };
                let h = 1e-6 * v.abs().max(1.0);
                let fd = (shifted(h)? - shifted(-h)?) / (2.0 * h);
                let exact = e.differentiate(var).eval(&p)?;
                let rel = (exact - fd).abs() / fd.abs().max(1.0);
                worst = if rel.is_nan() || worst.is_nan() { f64::NAN } else { worst.max(rel) };
            }
        }
    }
    Ok(Report::new("derivatives", "", count, worst, tol))
}

pub fn derivatives(opts: &SuiteOptions) -> Vec<Report> {
    let tol = opts.tol(1e-5);
    vec![record("derivatives", "", tol, derivative_agreement(100, opts.seed, tol))]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nothing", &SuiteOptions::default()).is_none());
    }

    #[test]
    fn case_filter() {
        let opts = SuiteOptions {
            case: Some(CaseId::TGammaHalf),
            ..SuiteOptions::default()
        };
        let rs = terminal(&opts);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].case, "T-GammaHalf");
        assert!(rs[0].pass);
    }

    #[test]
    fn derivative_reports_are_deterministic() {
        let a = derivative_agreement(20, 9, 1e-5).unwrap();
        let b = derivative_agreement(20, 9, 1e-5).unwrap();
        assert_eq!(a, b);
        assert!(a.pass, "{a}");
    }
}
