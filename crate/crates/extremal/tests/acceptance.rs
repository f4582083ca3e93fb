//! Acceptance gate: one test per headline claim, each printing a single
//! PASS/FAIL verdict line. Run with
//! `cargo test -p extremal --test acceptance -- --nocapture` to see them.

mod common;

use std::time::{Duration, Instant};

use extremal::{
    angle_grid_oracle_2d, boundary_sample_oracle, compare, continuity_probe, kkt_verify,
    lambda_grid_oracle, linear_grid, smoothness_probe, solve_extremal, sweep_direction,
    sweep_epsilon, sweep_ray, Operator, Problem, SolverConfig,
};
use nalgebra::{dvector, DMatrix};
use rand::Rng;

fn verdict(name: &str, ok: bool, detail: &str) {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

/// The distance-to-a-ball counterexample: on the identity with
/// `x0 = (2, -2)`, `u = (0, 2)`, `eps = 1`, the extremal norm along
/// `x0 + t u` is `2 sqrt((t - 1)^2 + 1) - 1`, with an interior minimum at
/// `t = 1` of value `1`.
#[test]
fn direction_sweep_counterexample_curve() {
    let start = Instant::now();
    let op = Operator::new(DMatrix::<f64>::identity(2, 2)).unwrap();
    let x0 = dvector![2.0, -2.0];
    let u = dvector![0.0, 2.0];
    let grid = linear_grid(0.0, 3.0, 61).unwrap();
    let curve = sweep_direction(&op, &x0, &u, 1.0, &grid, &SolverConfig::default()).unwrap();

    let mut max_dev: f64 = 0.0;
    for s in &curve.samples {
        let reference = 2.0 * ((s.param - 1.0).powi(2) + 1.0).sqrt() - 1.0;
        max_dev = max_dev.max((s.y_norm - reference).abs());
    }
    let min_sample = curve
        .samples
        .iter()
        .min_by(|a, b| a.y_norm.partial_cmp(&b.y_norm).unwrap())
        .unwrap();
    let elapsed = start.elapsed();

    let ok = max_dev <= 1e-8
        && (min_sample.param - 1.0).abs() <= 1e-9
        && (min_sample.y_norm - 1.0).abs() <= 1e-8
        && elapsed < Duration::from_secs(1);
    verdict(
        "counterexample curve",
        ok,
        &format!(
            "max deviation {max_dev:.2e} over 61 points (tol 1e-8), \
             minimum {:.12} at t = {:.4}, {elapsed:?} (limit 1s)",
            min_sample.y_norm, min_sample.param
        ),
    );
}

/// Identity closed forms: `y = (1 - eps/||x0||) x0` and
/// `r = -eps / (||x0|| - eps)`.
#[test]
fn identity_family_closed_forms() {
    let mut rng = common::rng(2);
    let config = SolverConfig::default();
    let mut worst_y: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    for &n in &[2usize, 5, 20] {
        let op = Operator::new(DMatrix::<f64>::identity(n, n)).unwrap();
        for _ in 0..5 {
            let x0 = common::random_unit(&mut rng, n) * rng.random_range(0.5..3.0);
            let x0n = x0.norm();
            let eps = rng.random_range(0.05..0.95) * x0n;
            let problem = Problem::new(op.clone(), x0.clone(), eps).unwrap();
            let got = solve_extremal(&problem, &config).unwrap();

            let y_exact = &x0 * (1.0 - eps / x0n);
            let r_exact = -eps / (x0n - eps);
            worst_y = worst_y.max((&got.y - &y_exact).norm() / y_exact.norm());
            worst_r = worst_r.max((got.r - r_exact).abs() / r_exact.abs());
        }
    }
    let ok = worst_y <= 1e-10 && worst_r <= 1e-10;
    verdict(
        "identity family",
        ok,
        &format!(
            "worst relative error y {worst_y:.2e}, r {worst_r:.2e} (tol 1e-10) \
             over 15 draws, n in {{2, 5, 20}}"
        ),
    );
}

/// Stationarity identities on 100 seeded instances, dims 2 through 8,
/// condition number at most 1e3.
#[test]
fn stationarity_identities_on_random_instances() {
    let start = Instant::now();
    let mut rng = common::rng(3);
    let config = SolverConfig::default();
    let mut worst_collinearity: f64 = 0.0;
    let mut worst_boundary: f64 = 0.0;
    let mut worst_cap: f64 = f64::NEG_INFINITY;
    for i in 0..100 {
        let n = 2 + (i % 7);
        let problem = common::random_problem(&mut rng, n, 1e3);
        let res = solve_extremal(&problem, &config).unwrap();
        let k = &res.kkt;
        assert!(
            res.r < 0.0 && k.multiplier_sign_ok && k.obtuse_pairing < 0.0,
            "instance {i}: multiplier sign"
        );
        worst_collinearity = worst_collinearity.max(k.collinearity_residual);
        worst_boundary = worst_boundary.max(k.boundary_gap / problem.epsilon().max(1.0));
        worst_cap = worst_cap.max(-k.cap_slack / problem.x0_norm().powi(2));
    }
    let elapsed = start.elapsed();
    let ok = worst_collinearity <= 1e-8
        && worst_boundary <= 1e-10
        && worst_cap <= 1e-8
        && elapsed < Duration::from_secs(10);
    verdict(
        "stationarity identities",
        ok,
        &format!(
            "100 instances: collinearity {worst_collinearity:.2e} (tol 1e-8), \
             boundary gap {worst_boundary:.2e} of max(eps, 1) (tol 1e-10), \
             cap violation {worst_cap:.2e} of ||x0||^2 (tol 1e-8), \
             {elapsed:?} (limit 10s)"
        ),
    );
}

/// The solver agrees with three independent oracles: the secular-grid
/// bisection everywhere, the angle scan in dimension two, and it is never
/// beaten by boundary sampling.
#[test]
fn solver_matches_independent_oracles() {
    let start = Instant::now();
    let mut rng = common::rng(4);
    let config = SolverConfig::default();

    let mut worst_lambda_gap: f64 = 0.0;
    let mut worst_angle_gap: f64 = 0.0;
    let mut angle_checked = 0usize;
    for i in 0..30 {
        let n = 2 + (i % 5);
        // Mild conditioning keeps the grid oracle's 1e-12 boundary target
        // reachable at f64 evaluation noise.
        let problem = common::random_problem(&mut rng, n, 30.0);
        let res = solve_extremal(&problem, &config).unwrap();

        let grid = lambda_grid_oracle(problem.op(), problem.x0(), problem.epsilon(), 12).unwrap();
        let rep = compare(&res, &grid, 1e-6);
        assert!(rep.pass, "instance {i}: lambda grid gap {:.3e}", rep.norm_gap);
        worst_lambda_gap = worst_lambda_gap.max(rep.norm_gap);

        if n == 2 {
            let angle =
                angle_grid_oracle_2d(problem.op(), problem.x0(), problem.epsilon(), 3600).unwrap();
            let rep = compare(&res, &angle, 1e-6);
            assert!(rep.pass, "instance {i}: angle gap {:.3e}", rep.norm_gap);
            worst_angle_gap = worst_angle_gap.max(rep.norm_gap);
            angle_checked += 1;
        }
    }

    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..50 {
        let n = 2 + (i % 3);
        let problem = common::random_problem(&mut rng, n, 1e3);
        let res = solve_extremal(&problem, &config).unwrap();
        let sampled = boundary_sample_oracle(
            problem.op(),
            problem.x0(),
            problem.epsilon(),
            100_000,
            1000 + i as u64,
        )
        .unwrap();
        let rep = compare(&res, &sampled, 1e-9);
        assert!(
            rep.pass,
            "instance {i}: solver {:.17e} above sampled {:.17e}",
            rep.y_norm_solver, rep.y_norm_oracle
        );
        worst_excess = worst_excess.max(rep.y_norm_solver - rep.y_norm_oracle);
    }
    let elapsed = start.elapsed();

    let ok = worst_lambda_gap <= 1e-6
        && worst_angle_gap <= 1e-6
        && angle_checked >= 6
        && worst_excess <= 1e-9
        && elapsed < Duration::from_secs(60);
    verdict(
        "oracle agreement",
        ok,
        &format!(
            "lambda grid gap {worst_lambda_gap:.2e} on 30, angle gap \
             {worst_angle_gap:.2e} on {angle_checked} (tol 1e-6); solver minus \
             best of 1e5 boundary samples {worst_excess:.2e} on 50 (tol 1e-9); \
             {elapsed:?} (limit 60s)"
        ),
    );
}

/// Monotone parameter response: `||y_eps||` strictly decreases and `lambda`
/// strictly increases along an epsilon sweep; `||y||` is non-decreasing as
/// the center moves out along a ray.
#[test]
fn parameter_sweeps_are_monotone() {
    let mut rng = common::rng(5);
    let config = SolverConfig::default();
    let mut worst_eps_rise = f64::NEG_INFINITY;
    let mut worst_lambda_drop = f64::NEG_INFINITY;
    let mut worst_ray_drop = f64::NEG_INFINITY;
    for i in 0..50 {
        let n = 2 + (i % 7);
        let problem = common::random_problem(&mut rng, n, 1e3);
        let (op, x0) = (problem.op(), problem.x0());
        let x0n = problem.x0_norm();

        let eps_grid = linear_grid(0.05 * x0n, 0.95 * x0n, 20).unwrap();
        let curve = sweep_epsilon(op, x0, &eps_grid, &config).unwrap();
        for w in curve.samples.windows(2) {
            worst_eps_rise = worst_eps_rise.max(w[1].y_norm - w[0].y_norm);
            // lambda = -r, so a lambda drop is r[i+1] - r[i].
            worst_lambda_drop = worst_lambda_drop.max(w[1].r - w[0].r);
        }
        if i < 5 {
            // Every emitted sample independently re-passes verification.
            for s in &curve.samples {
                let y = s.y.as_ref().expect("sweep stores y");
                let k = kkt_verify(op, x0, s.param, y).unwrap();
                assert!(
                    k.collinearity_residual <= 1e-8
                        && k.boundary_gap <= 1e-10 * s.param.max(1.0),
                    "instance {i}: sample at eps = {} fails re-verification",
                    s.param
                );
            }
        }

        let eps = problem.epsilon();
        let t_grid = linear_grid(1.001 * eps / x0n, 5.0, 20).unwrap();
        let ray = sweep_ray(op, x0, eps, &t_grid, &config).unwrap();
        for w in ray.samples.windows(2) {
            worst_ray_drop = worst_ray_drop.max(w[0].y_norm - w[1].y_norm);
        }
    }
    let ok = worst_eps_rise < 1e-12 && worst_lambda_drop < 1e-12 && worst_ray_drop <= 1e-10;
    verdict(
        "parameter monotonicity",
        ok,
        &format!(
            "50 instances, 20-point grids: worst y_norm rise {worst_eps_rise:.2e} \
             and lambda drop {worst_lambda_drop:.2e} along eps (slack 1e-12); \
             worst y_norm drop {worst_ray_drop:.2e} along rays (slack 1e-10)"
        ),
    );
}

/// Center continuity: shrinking the center perturbation by 1e3 shrinks the
/// response `||y(x0 + delta u) - y(x0)||` by at least 1e2.
#[test]
fn center_perturbations_contract() {
    let mut rng = common::rng(6);
    let config = SolverConfig::default();
    let deltas = [1e-1, 1e-2, 1e-3, 1e-4];
    let mut worst_ratio: f64 = 0.0;
    for i in 0..20 {
        let n = 2 + (i % 5);
        // Margins keep x0 + delta u outside the closed ball for every delta.
        let problem = common::random_problem_in(&mut rng, n, 1e3, (1.2, 2.0), (0.1, 0.85));
        let u = common::random_unit(&mut rng, n);
        let report =
            continuity_probe(problem.op(), problem.x0(), &u, problem.epsilon(), &deltas, &config)
                .unwrap();
        let first = report.rows[0].measurement;
        let last = report.rows[3].measurement;
        assert!(first > 0.0, "instance {i}: flat response at delta = 1e-1");
        worst_ratio = worst_ratio.max(last / first);
    }
    let ok = worst_ratio <= 1e-2;
    verdict(
        "center continuity",
        ok,
        &format!(
            "worst ||dy||(1e-4) / ||dy||(1e-1) = {worst_ratio:.2e} \
             (need <= 1e-2) over 20 instances"
        ),
    );
}

/// Smoothness in epsilon: central differences of `||y_eps||` converge at
/// second order (Richardson ratio near 4), and the identity slope is -1.
#[test]
fn epsilon_dependence_is_smooth() {
    let mut rng = common::rng(7);
    let config = SolverConfig::default();
    let ladder = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = f64::NEG_INFINITY;
    for i in 0..10 {
        let n = 2 + (i % 5);
        // Mid-range epsilon keeps eps +/- h inside (0, ||x0||); mild
        // conditioning keeps the pinned h-ladder inside the asymptotic
        // regime where the h^4 term is negligible.
        let problem = common::random_problem_in(&mut rng, n, 10.0, (1.0, 2.0), (0.3, 0.7));
        let report =
            smoothness_probe(problem.op(), problem.x0(), problem.epsilon(), &ladder, &config)
                .unwrap();
        for row in &report.rows {
            assert!(row.measurement < 0.0, "instance {i}: slope sign at h = {}", row.step);
        }
        for row in report.rows.iter().take(2) {
            let ratio = row.derived.expect("Richardson ratio");
            ratio_lo = ratio_lo.min(ratio);
            ratio_hi = ratio_hi.max(ratio);
        }
    }

    let op = Operator::new(DMatrix::<f64>::identity(2, 2)).unwrap();
    let x0 = dvector![2.0, -2.0];
    let report = smoothness_probe(&op, &x0, 1.0, &ladder, &config).unwrap();
    let worst_identity = report
        .rows
        .iter()
        .map(|r| (r.measurement + 1.0).abs())
        .fold(0.0, f64::max);

    let ok = ratio_lo >= 3.5 && ratio_hi <= 4.5 && worst_identity <= 1e-12;
    verdict(
        "epsilon smoothness",
        ok,
        &format!(
            "Richardson ratios in [{ratio_lo:.3}, {ratio_hi:.3}] (need [3.5, 4.5]) \
             over 10 instances; identity slope error {worst_identity:.2e} (tol 1e-12)"
        ),
    );
}
