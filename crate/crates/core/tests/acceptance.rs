//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::Instant;

use horizon_limit::analysis::{
    alpha_limit_sweep, growth_rates, monotonicity_class, sampled_monotonicity, saving_ratio,
    steady_state, Monotonicity,
};
use horizon_limit::criteria::{
    appendix_c_report, liminf_estimate, log_consumption_gaps, make_challenger, overtakes,
    sum_criterion_def2, sum_criterion_def3, terminal_term_limit, theorem_condition_ratio,
    zero_trend, CriteriaConfig, Strategy, ZeroTrend,
};
use horizon_limit::finite_solver::{
    compare_methods, objective_value, solve_dp_oracle, solve_policy_recursion,
};
use horizon_limit::limit_engine::{limit_closed_form, ClosedFormLimit};
use horizon_limit::model::{make_growth_model, GrowthParams};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn params(alpha: f64, beta: f64, k0: f64) -> GrowthParams {
    GrowthParams::new(alpha, beta, k0).expect("suite parameters are valid")
}

fn suite() -> Vec<GrowthParams> {
    let mut out = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        for beta in [0.5, 0.9, 1.0] {
            out.push(params(alpha, beta, 0.3));
        }
    }
    out
}

fn method_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in suite() {
        for horizon in 0..=200 {
            let m = compare_methods(&p, horizon).expect("closed form evaluates");
            worst = worst.max(m.max_rel_capital).max(m.max_rel_consumption);
        }
    }
    (
        worst <= 1e-10,
        format!("max relative gap {worst:.3e} (tol 1e-10)"),
    )
}

fn dp_oracle() -> Outcome {
    let grid = 4001;
    let cell = 1.0 / (grid as f64 + 1.0);
    let (mut worst_k, mut worst_obj) = (0.0f64, f64::NEG_INFINITY);
    for beta in [0.9, 1.0] {
        let p = params(0.5, beta, 0.25);
        let spec = make_growth_model(&p);
        for horizon in 1..=10 {
            let dp = solve_dp_oracle(&spec, horizon, grid).expect("grid is feasible");
            let exact = solve_policy_recursion(&p, horizon);
            for (a, b) in dp.path.capitals().zip(exact.path.capitals()) {
                worst_k = worst_k.max((a - b).abs());
            }
            let obj_dp = objective_value(&spec, &dp.path, horizon).unwrap();
            let obj = objective_value(&spec, &exact.path, horizon).unwrap();
            worst_obj = worst_obj.max(obj_dp - obj);
        }
    }
    (
        worst_k <= cell && worst_obj <= 1e-4,
        format!(
            "max capital gap {worst_k:.3e} (cell {cell:.3e}), max objective excess {worst_obj:.3e} (tol 1e-4)"
        ),
    )
}

/// Grid scan of the two-period objective, refined by bisection on its slope.
fn two_period_oracle(alpha: f64, beta: f64, k0: f64) -> f64 {
    let y = k0.powf(alpha);
    let f = |c: f64| c.ln() + beta * alpha * (y - c).ln();
    let n = 100_000;
    let best = (1..n)
        .map(|i| y * i as f64 / n as f64)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    let slope = |c: f64| 1.0 / c - beta * alpha / (y - c);
    let (mut lo, mut hi) = (best - y / n as f64, best + y / n as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn exact_point() -> Outcome {
    let p = params(0.5, 1.0, 0.25);
    let sol = solve_policy_recursion(&p, 1);
    let c0 = sol.path.consumption(0).unwrap();
    let k1 = sol.path.capital(1).unwrap();
    let oracle_c0 = two_period_oracle(0.5, 1.0, 0.25);
    let oracle_k1 = 0.25f64.sqrt() - oracle_c0;
    let err = (c0 - 1.0 / 3.0).abs()
        + (k1 - 1.0 / 6.0).abs()
        + (c0 - oracle_c0).abs()
        + (k1 - oracle_k1).abs();
    (
        (c0 - oracle_c0).abs() <= 1e-9
            && (k1 - 1.0 / 6.0).abs() <= 1e-9
            && (c0 - 1.0 / 3.0).abs() <= 1e-9,
        format!("c(0) = {c0}, k(1) = {k1}, oracle c(0) = {oracle_c0}, total error {err:.3e}"),
    )
}

fn result_one() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in suite() {
        let limit = limit_closed_form(&p);
        for t in 0..=100 {
            worst = worst.max((saving_ratio(&limit, t).unwrap() - p.ab()).abs());
        }
    }
    (
        worst <= 1e-12,
        format!("max |r(t) - ab| {worst:.3e} (tol 1e-12)"),
    )
}

fn prop_one() -> Outcome {
    let s = steady_state(&params(0.5, 1.0, 0.3));
    let exact = (s.k_inf - 0.25).abs() <= 1e-12
        && (s.c_inf - 0.25).abs() <= 1e-12
        && (s.lambda_inf - 4.0).abs() <= 1e-12;
    let expected = [
        (0.1, Monotonicity::Increasing),
        (0.25, Monotonicity::Steady),
        (0.5, Monotonicity::Decreasing),
    ];
    let classes = expected.iter().all(|&(k0, class)| {
        let p = params(0.5, 1.0, k0);
        monotonicity_class(&p) == class && sampled_monotonicity(&p, 50) == Some(class)
    });
    let mut worst: f64 = 0.0;
    for p in suite() {
        if monotonicity_class(&p) == Monotonicity::Steady {
            continue;
        }
        for t in 0..30 {
            let (r, next) = (growth_rates(&p, t), growth_rates(&p, t + 1));
            worst = worst
                .max((next.capital.continuous / r.capital.continuous - p.alpha()).abs())
                .max((next.consumption.continuous / r.consumption.continuous - p.alpha()).abs());
        }
    }
    (
        exact && classes && worst <= 1e-9,
        format!(
            "steady state ({}, {}, {}), classes match: {classes}, growth-ratio error {worst:.3e}",
            s.k_inf, s.c_inf, s.lambda_inf
        ),
    )
}

fn prop_two() -> Outcome {
    let one = alpha_limit_sweep(1.0, &[0.999], 0.3).unwrap().cells[0];
    let near_e = (one.steady.k_inf - (-1f64).exp()).abs();
    let down = alpha_limit_sweep(0.95, &[0.9, 0.99, 0.999], 0.3).unwrap();
    let ks: Vec<f64> = down.cells.iter().map(|c| c.steady.k_inf).collect();
    let decreasing = ks.windows(2).all(|w| w[1] < w[0]) && ks[2] < 0.01;
    let over = alpha_limit_sweep(1.05, &[0.99, 0.999], 0.3).unwrap();
    let flagged = over.cells.iter().all(|c| !c.feasible && c.formula_level);
    (
        near_e <= 1e-3 && decreasing && flagged,
        format!(
            "|k_inf - 1/e| {near_e:.3e}, k_inf at beta 0.95 {ks:?}, beta 1.05 flagged infeasible: {flagged}"
        ),
    )
}

fn log_gap_convergence() -> Outcome {
    let cfg = CriteriaConfig::default();
    let discounted = appendix_c_report(&params(0.5, 0.9, 0.3), 300, &cfg).unwrap();
    let tail = &discounted.series.values[cfg.burn_in..];
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    let d300 = discounted.estimate;

    let flat = appendix_c_report(&params(0.5, 1.0, 0.3), 2000, &cfg).unwrap();
    let l = flat.liminf.expect("long series");

    // Termwise positivity, from the recursion paths directly.
    let mut min_gap = f64::INFINITY;
    for beta in [0.9, 1.0] {
        let p = params(0.5, beta, 0.3);
        let limit = ClosedFormLimit::new(p);
        for horizon in (1..=300).chain((350..=2000).step_by(50)) {
            let sol = solve_policy_recursion(&p, horizon);
            for (t, c) in sol.path.consumptions().enumerate() {
                min_gap = min_gap.min(c.ln() - limit.ln_consumption(t));
            }
            let exact = log_consumption_gaps(&p, horizon).unwrap();
            min_gap = min_gap.min(exact.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    (
        decreasing && d300.abs() <= 1e-6 && l.cauchy_gap <= 1e-8 && flat.estimate > 0.0 && min_gap >= -1e-12,
        format!(
            "beta 0.9: tail decreasing {decreasing}, Δ(300) = {d300:.3e}; beta 1: gap {:.3e}, limit {:.12}; min termwise gap {min_gap:.3e}",
            l.cauchy_gap, flat.estimate
        ),
    )
}

fn theorem() -> Outcome {
    let cfg = CriteriaConfig::default();
    let discounted = theorem_condition_ratio(&params(0.5, 0.9, 0.3), 300, &cfg).unwrap();
    let flat = theorem_condition_ratio(&params(0.5, 1.0, 0.3), 2000, &cfg).unwrap();
    let (trend, _) = zero_trend(&flat.series, &cfg);
    (
        discounted.estimate.abs() <= 1e-6 && trend == ZeroTrend::ConvergingToZero,
        format!(
            "|R(300)| = {:.3e} at beta 0.9; beta 1 trend {trend:?} with R(2000) = {:.3e}",
            discounted.estimate.abs(),
            flat.estimate
        ),
    )
}

fn challengers(ab: f64) -> Vec<Strategy> {
    vec![
        Strategy::ConstantSaving(0.5 * ab),
        Strategy::ConstantSaving(0.8 * ab),
        Strategy::ConstantSaving(1.2 * ab),
        Strategy::Greedy(1e-6),
        Strategy::PerturbLimit {
            delta: 0.01,
            t_star: 3,
        },
    ]
}

fn terminal_and_sums() -> Outcome {
    let strict = CriteriaConfig::default().with_zero_tol(1e-10);
    let p = params(0.5, 0.95, 0.3);
    let limit = limit_closed_form(&p).to_path(501).unwrap();
    let term = terminal_term_limit(&p, &limit, 500, &strict).unwrap();

    let cfg = CriteriaConfig::default();
    let (mut compared, mut agree) = (0, true);
    for beta in [0.9, 0.95] {
        let p = params(0.5, beta, 0.3);
        let spec = make_growth_model(&p);
        let limit = limit_closed_form(&p).to_path(501).unwrap();
        let limit_term = terminal_term_limit(&p, &limit, 500, &cfg).unwrap();
        for s in challengers(p.ab()) {
            let ch = make_challenger(&spec, &s, 500, Some(&limit)).unwrap();
            let ch_term = terminal_term_limit(&p, &ch, 500, &cfg).unwrap();
            if !(limit_term.pass && ch_term.pass) {
                continue;
            }
            compared += 1;
            let d2 = sum_criterion_def2(&spec, &ch, &limit, 500, &cfg).unwrap();
            let d3 = sum_criterion_def3(&spec, &ch, &limit, 500, &cfg).unwrap();
            agree &= d2.pass == d3.pass;
        }
    }
    (
        term.pass && term.estimate <= 1e-10 && compared > 0 && agree,
        format!(
            "terminal term {:.3e} at T = 500 (tol 1e-10); converted and raw sum verdicts agree on {compared} comparisons: {agree}",
            term.estimate
        ),
    )
}

fn overtaking_suite() -> Outcome {
    let cfg = CriteriaConfig::default();
    let t_max = 200;
    let mut ok = true;
    let mut worst_liminf = f64::NEG_INFINITY;
    let mut worst_rise = f64::NEG_INFINITY;
    let mut reproduce: f64 = 0.0;
    for beta in [0.9, 1.0] {
        let p = params(0.5, beta, 0.3);
        let spec = make_growth_model(&p);
        let limit = limit_closed_form(&p).to_path(t_max + 1).unwrap();
        for s in challengers(p.ab()) {
            let ch = make_challenger(&spec, &s, t_max, Some(&limit)).unwrap();
            let r = overtakes(&spec, &ch, &limit, t_max, &cfg).unwrap();
            let est = liminf_estimate(&r.series, cfg.burn_in).unwrap();
            let n = r.series.len();
            let rise = r.series.values[n - n / 4..]
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max);
            worst_liminf = worst_liminf.max(est.estimate);
            worst_rise = worst_rise.max(rise);
            ok &= est.estimate <= 0.0 && rise <= cfg.cauchy_tol && r.pass;
        }
        let same = make_challenger(&spec, &Strategy::ConstantSaving(p.ab()), t_max, None).unwrap();
        for (a, b) in same.points().iter().zip(limit.points()) {
            reproduce = reproduce.max((a.k - b.k).abs()).max((a.c - b.c).abs());
        }
    }
    (
        ok && reproduce <= 1e-12,
        format!(
            "largest liminf estimate {worst_liminf:.3e}, largest tail increment {worst_rise:.3e}, saving-ab reproduction error {reproduce:.3e}"
        ),
    )
}

fn run_cli(args: &[&str], out: &std::path::Path) -> (i32, Vec<u8>) {
    let status = Command::new(env!("CARGO_BIN_EXE_horizon"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (
        status.status.code().unwrap_or(-1),
        std::fs::read(out).unwrap_or_default(),
    )
}

fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], i32); 3] = [
        (
            &[
                "verify", "--alpha", "0.5", "--beta", "0.9", "--k0", "0.3", "--t-max", "300",
            ],
            0,
        ),
        (
            &[
                "solve", "--alpha", "0.5", "--beta", "1", "--k0", "0.25", "--T", "1", "--format",
                "csv",
            ],
            0,
        ),
        (
            &[
                "solve", "--alpha", "1.5", "--beta", "0.5", "--k0", "0.3", "--T", "1",
            ],
            2,
        ),
    ];
    let mut ok = true;
    let mut codes = Vec::new();
    for (i, (args, expected)) in cases.iter().enumerate() {
        let a = run_cli(args, &dir.path().join(format!("{i}-a")));
        let b = run_cli(args, &dir.path().join(format!("{i}-b")));
        ok &= a.0 == *expected && b.0 == *expected && a.1 == b.1;
        codes.push(a.0);
    }
    let solve = std::fs::read(dir.path().join("1-a")).unwrap_or_default();
    let rows = horizon_limit::cli::read_path_csv(solve.as_slice()).unwrap_or_default();
    let rows_ok = rows.len() == 2
        && (rows[0].c - 1.0 / 3.0).abs() < 1e-12
        && (rows[1].k - 1.0 / 6.0).abs() < 1e-12
        && (rows[1].c - (1.0f64 / 6.0).sqrt()).abs() < 1e-12;
    (
        ok && rows_ok,
        format!("exit codes {codes:?} (expected [0, 0, 2]), byte-stable: {ok}, solve rows match: {rows_ok}"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("method agreement", method_agreement),
        ("DP oracle", dp_oracle),
        ("exact analytic point", exact_point),
        ("constant saving ratio", result_one),
        ("steady state and monotonicity", prop_one),
        ("elasticity limits", prop_two),
        ("log-consumption differences", log_gap_convergence),
        ("theorem condition", theorem),
        ("terminal term and sum criteria", terminal_and_sums),
        ("overtaking suite", overtaking_suite),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check();
        let tag = if pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {:>2} {name}: {detail} ({:.2}s)",
            i + 1,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!pass);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
