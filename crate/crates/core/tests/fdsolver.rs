use bondsym::fdsolver::*;
use bondsym::solutions::{get_case, BarrierSpec, CaseId};
use bondsym::{parse, Expr, Params, PdeProblem};
use proptest::prelude::*;

fn bsm(beta: f64, rho: f64) -> PdeProblem {
    PdeProblem::new(Params::new(0.0, beta, 1.0, 0.5, 0.0, rho), Expr::u().scale(beta)).unwrap()
}

#[test]
fn bsm_constant_solution_and_order() {
    let prob = bsm(0.05, 0.3);
    let exact = parse("exp(0.05*(t-1))", &[]).unwrap();
    let cv = convergence_order(
        &prob,
        &exact,
        (0.5, 2.0),
        (0.0, 1.0),
        &[(26, 101), (51, 201), (101, 401)],
        &SolverConfig::default(),
    )
    .unwrap();
    // Crank–Nicolson on u' = βu leaves only the O(β³Δt²) amplification error
    assert!(cv.errors.iter().all(|e| *e < 1e-8), "{cv:?}");
    assert!(cv.exact || cv.order >= 2.0 - 0.3, "{cv:?}");
}

#[test]
fn gamma_half_second_order() {
    let c = get_case(CaseId::TGammaHalf);
    let t_end = c.terminal_time();
    let cfg = SolverConfig::default().validation(&c.solution);
    let cv = convergence_order(
        &c.problem(),
        &c.solution,
        (0.25, 4.0),
        (t_end / 2.0, t_end),
        &[(50, 50), (100, 100), (200, 200)],
        &cfg,
    )
    .unwrap();
    assert!(cv.errors[2] < 5e-4, "{cv:?}");
    assert!(cv.monotone);
    assert!((cv.order - 2.0).abs() < 0.3, "{cv:?}");
}

#[test]
fn gamma_half_one_sided_lower_row() {
    let c = get_case(CaseId::TGammaHalf);
    let t_end = c.terminal_time();
    let cfg = SolverConfig {
        far_field: FarField::Dirichlet(c.solution.clone()),
        ..SolverConfig::default()
    };
    let cv = convergence_order(
        &c.problem(),
        &c.solution,
        (0.25, 4.0),
        (t_end / 2.0, t_end),
        &[(50, 50), (100, 100), (200, 200)],
        &cfg,
    )
    .unwrap();
    assert!(cv.errors[2] < 5e-4, "{cv:?}");
    assert!(cv.order > 1.7, "{cv:?}");
}

#[test]
fn implicit_euler_first_order_in_time() {
    let c = get_case(CaseId::TGammaHalf);
    let t_end = c.terminal_time();
    let cfg = SolverConfig {
        theta: 1.0,
        ..SolverConfig::default()
    }
    .validation(&c.solution);
    let cv = convergence_order(
        &c.problem(),
        &c.solution,
        (0.25, 4.0),
        (t_end / 2.0, t_end),
        &[(400, 25), (400, 50), (400, 100)],
        &cfg,
    )
    .unwrap();
    assert!((cv.order - 1.0).abs() < 0.3, "{cv:?}");
}

#[test]
fn full_newton_agrees_with_one_correction() {
    let c = get_case(CaseId::TGammaHalf);
    let t_end = c.terminal_time();
    let grid = Grid::for_gamma(0.5, (0.25, 4.0), 80, (t_end / 2.0, t_end), 80).unwrap();
    let payoff = c.solution.subst("t", &Expr::constant(t_end));
    let one = SolverConfig::default().validation(&c.solution);
    let full = one.clone().full_newton(20);
    let fixed = SolverConfig {
        source: SourceUpdate::FixedPoint,
        ..full.clone()
    };
    let a = solve_terminal(&c.problem(), &grid, &payoff, &one).unwrap();
    let b = solve_terminal(&c.problem(), &grid, &payoff, &full).unwrap();
    let f = solve_terminal(&c.problem(), &grid, &payoff, &fixed).unwrap();
    let (ea, _) = a.max_abs_error(&c.solution).unwrap();
    let (eb, _) = b.max_abs_error(&c.solution).unwrap();
    let (ef, _) = f.max_abs_error(&c.solution).unwrap();
    assert!((ea - eb).abs() < 0.1 * ea, "{ea} {eb}");
    assert!((ef - eb).abs() < 1e-8, "{ef} {eb}");
}

#[test]
fn generic_barrier_against_closed_form() {
    let c = get_case(CaseId::BGeneric);
    let spec = c.barrier().unwrap();
    let t_end = c.terminal_time();
    let grid = Grid::for_gamma(c.params.gamma, (0.45, 1.5), 200, (0.0, t_end), 200).unwrap();
    let payoff = c.solution.subst("t", &Expr::constant(t_end));
    let cfg = SolverConfig::default().validation(&c.solution);
    let s = solve_barrier(&c.problem(), &grid, spec, &payoff, &cfg).unwrap();
    let (e, at) = s.max_abs_error(&c.solution).unwrap();
    assert!(e < 1e-3, "error {e} at {at:?}");
    // the Dirichlet row holds exactly at every step
    for (n, &t) in s.front_fixed.grid.t().iter().enumerate().take(grid.nt() - 1) {
        let r = spec.r.eval(&[("t", t)]).unwrap();
        assert_eq!(s.front_fixed.get(0, n).unwrap(), r);
    }
    // nodes below the barrier are masked in the physical surface
    for n in 0..grid.nt() {
        for (i, &x) in grid.x().iter().enumerate() {
            assert_eq!(s.physical.is_valid(i, n), x >= s.barrier[n] - 1e-12);
        }
    }
}

#[test]
fn constant_barrier_with_x_independent_solution() {
    let prob = bsm(0.05, 0.3);
    let exact = parse("exp(0.05*(t-1))", &[]).unwrap();
    let spec = BarrierSpec::exponential(0.0, 0.5, 1.0, 1.0, exact.clone());
    let grid = Grid::log_uniform((0.25, 3.0), 101, (0.0, 1.0), 101).unwrap();
    let s = solve_barrier(&prob, &grid, &spec, &Expr::one(), &SolverConfig::default()).unwrap();
    let (e, _) = s.max_abs_error(&exact).unwrap();
    assert!(e < 5e-4, "{e}");
}

#[test]
fn constant_barrier_matches_terminal_solve() {
    let c = get_case(CaseId::TGammaHalf);
    let t_end = c.terminal_time();
    let prob = c.problem();
    let payoff = c.solution.subst("t", &Expr::constant(t_end));
    let cfg = SolverConfig::default().validation(&c.solution);
    let nx = 121;
    let grid = Grid::log_uniform((0.25, 4.0), nx, (t_end / 2.0, t_end), 101).unwrap();
    let whole = solve_terminal(&prob, &grid, &payoff, &cfg).unwrap();
    // barrier on a grid node, rebate from the terminal solve's trace there
    let k = 30;
    let h = grid.x()[k];
    let trace: Vec<f64> = (0..grid.nt()).map(|n| whole.get(k, n).unwrap()).collect();
    let dt = grid.dt();
    let t0 = grid.t()[0];
    let mut rebate = Expr::zero();
    // piecewise-linear interpolant of the trace, as a sum of hat functions
    for (n, v) in trace.iter().enumerate() {
        let tn = t0 + n as f64 * dt;
        let dist = (Expr::t() - Expr::constant(tn)).abs().scale(1.0 / dt);
        let hat = (Expr::one() - dist.clone() + (Expr::one() - dist).abs()).scale(0.5);
        rebate = rebate + hat.scale(*v);
    }
    let spec = BarrierSpec::exponential(0.0, h, 1.0, t_end, rebate);
    let sub = Grid::log_uniform((0.2, 4.0), nx - k, (t_end / 2.0, t_end), 101).unwrap();
    let b = solve_barrier(&prob, &sub, &spec, &payoff, &cfg).unwrap();
    let (disc, _) = whole.max_abs_error(&c.solution).unwrap();
    let mut diff: f64 = 0.0;
    for n in 0..sub.nt() {
        for i in 0..sub.nx() {
            let v = b.front_fixed.get(i, n).unwrap();
            diff = diff.max((v - whole.get(i + k, n).unwrap()).abs());
        }
    }
    assert!(diff <= 2.0 * disc, "diff {diff} vs discretisation {disc}");
}

#[test]
fn barrier_outside_grid_is_rejected() {
    let prob = bsm(0.05, 0.3);
    let spec = BarrierSpec::exponential(0.0, 0.1, 1.0, 1.0, Expr::one());
    let grid = Grid::log_uniform((0.25, 3.0), 11, (0.0, 1.0), 11).unwrap();
    assert!(matches!(
        solve_barrier(&prob, &grid, &spec, &Expr::one(), &SolverConfig::default()),
        Err(SolverError::BarrierExitsGrid { .. })
    ));
}

#[test]
fn bad_grids_are_rejected() {
    let prob = bsm(0.05, 0.3);
    let grid = Grid::uniform((0.0, 1.0), 11, (0.0, 1.0), 11).unwrap();
    assert!(matches!(
        solve_terminal(&prob, &grid, &Expr::one(), &SolverConfig::default()),
        Err(SolverError::Grid(_))
    ));
}

#[test]
fn surface_csv_has_one_row_per_node() {
    let prob = bsm(0.05, 0.3);
    let grid = Grid::log_uniform((0.5, 2.0), 5, (0.0, 1.0), 4).unwrap();
    let s = solve_terminal(&prob, &grid, &Expr::one(), &SolverConfig::default()).unwrap();
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 1 + 5 * 4);
    let first = text.lines().nth(1).unwrap();
    let fields: Vec<f64> = first.split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[1], 0.0);
    assert!((fields[2] - (-0.05f64).exp()).abs() < 1e-5);
}

fn dense_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = diag[i];
        if i > 0 {
            a[(i, i - 1)] = sub[i];
        }
        if i + 1 < n {
            a[(i, i + 1)] = sup[i];
        }
    }
    let b = nalgebra::DVector::from_column_slice(rhs);
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tridiagonal_matches_dense(
        rows in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -5.0f64..5.0), 2..40),
    ) {
        let n = rows.len();
        let sub: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let sup: Vec<f64> = rows.iter().map(|r| r.1).collect();
        // strictly diagonally dominant
        let diag: Vec<f64> = (0..n).map(|i| 2.5 + sub[i].abs() + sup[i].abs()).collect();
        let rhs: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
        let y = dense_solve(&sub, &diag, &sup, &rhs);
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn implicit_euler_maximum_principle(
        gamma in 0.0f64..1.0,
        rho in 0.2f64..2.0,
        c in prop::collection::vec(-2.0f64..2.0, 4),
        kink in 0.6f64..1.8,
    ) {
        let prob = PdeProblem::new(Params::new(0.0, 0.0, gamma, 0.5, 0.0, rho), Expr::zero()).unwrap();
        let x = Expr::x();
        let payoff = Expr::constant(c[0])
            + x.scale(c[1])
            + (x.clone() - Expr::constant(kink)).abs().scale(c[2])
            + (x.clone() * x).scale(c[3]);
        // boundary data frozen at the payoff keeps every row an M-matrix row
        let cfg = SolverConfig {
            theta: 1.0,
            far_field: FarField::Dirichlet(payoff.clone()),
            near_field: NearField::Dirichlet(payoff.clone()),
            ..SolverConfig::default()
        };
        let grid = Grid::for_gamma(gamma, (0.5, 2.0), 41, (0.0, 1.0), 21).unwrap();
        let s = solve_terminal(&prob, &grid, &payoff, &cfg).unwrap();
        let pay: Vec<f64> = grid.x().iter().map(|&x| payoff.eval(&[("x", x)]).unwrap()).collect();
        let lo = pay.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = pay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for n in 0..grid.nt() {
            for i in 0..grid.nx() {
                let v = s.get(i, n).unwrap();
                prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn terminal_slice_equals_payoff(c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, theta in 0.0f64..=1.0) {
        let prob = PdeProblem::new(Params::new(0.1, 0.2, 0.5, 0.5, 0.0, 0.4), Expr::u().scale(0.1)).unwrap();
        let payoff = Expr::constant(c0) + Expr::x().scale(c1);
        let cfg = SolverConfig { theta, ..SolverConfig::default() };
        let grid = Grid::log_uniform((0.5, 2.0), 21, (0.0, 1.0), 6).unwrap();
        let s = solve_terminal(&prob, &grid, &payoff, &cfg).unwrap();
        for (i, &x) in grid.x().iter().enumerate() {
            prop_assert_eq!(s.get(i, 5).unwrap(), payoff.eval(&[("x", x)]).unwrap());
        }
    }
}
