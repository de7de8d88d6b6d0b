//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use vecmkit::diagnostics::{adf_test, lag_table_from_loglik, normality_from_moments, vecm_stability, Deterministic};
use vecmkit::irf::orthogonalized_irfs;
use vecmkit::numerics::{chi_square_sf, Vector};
use vecmkit::shock::{run_three_stage, run_unshocked, ShockScenario};
use vecmkit::timeseries::{load_frame, parse_quarter, summary_stats, DEFAULT_COLUMNS};
use vecmkit::var::{forecast_var, SampleRange, VarFit};
use vecmkit::vecm::{fit_vecm, forecast_vecm, johansen_trace, select_rank, trace_from_eigenvalues, vecm_to_levels_var, TraceCriticalValues};
use vecmkit::{Frame, Matrix, Series};
use vecmkit_cli::{execute, parse_config, Command, Overrides};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn frame_from(names: &[&str], m: &Matrix) -> Frame {
    Frame::from_matrix(parse_quarter("1950Q1").unwrap(), names, m).unwrap()
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

// 1
fn trace_consistency() -> Verdict {
    let eigs = [0.743, 0.454, 0.283, 0.128, 0.121, 0.002];
    let want = [171.843, 80.713, 40.169, 17.907, 8.761, 0.137];
    let cv = TraceCriticalValues::five_percent();
    let started = Instant::now();
    let trace = trace_from_eigenvalues(&eigs, 67);
    let rank = select_rank(&trace, &cv);
    let elapsed = started.elapsed();
    let worst = trace.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    let values: Vec<f64> = (1..=6).rev().map(|m| cv.get(m).unwrap()).collect();
    let table_ok = values == [94.15, 68.52, 47.21, 29.68, 15.41, 3.76];
    verdict(
        worst <= 0.25 && rank.as_ref().is_ok_and(|r| *r == 2) && table_ok && elapsed < Duration::from_millis(1),
        format!("max |trace − ref| = {worst:.4}, rank = {rank:?}, {elapsed:?}"),
    )
}

// 2
fn criteria_reproduction() -> Verdict {
    let ll = [-1223.9, -919.13, -850.65, -805.93, -699.43];
    let rep = match lag_table_from_loglik(&ll, 65, 6) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let r4 = &rep.rows[4].criteria;
    let lr4 = rep.rows[4].lr.unwrap_or(f64::NAN);
    let checks = [
        ("AIC(4)", (r4.aic - 26.14).abs() <= 0.01),
        ("HQIC(4)", (r4.hqic - 28.12).abs() <= 0.01),
        ("SBIC(1)", (rep.rows[1].criteria.sbic - 30.98).abs() <= 0.01),
        ("FPE(4)", (r4.fpe / 11_604.2 - 1.0).abs() <= 0.005),
        ("LR(4)", (lr4 - 213.00).abs() <= 0.01 && rep.rows[4].df == Some(36)),
        ("selection", {
            let s = rep.selected;
            (s.aic, s.fpe, s.lr, s.sbic) == (4, 4, 4, 1)
        }),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    verdict(
        failed.is_empty(),
        format!(
            "AIC {:.4} HQIC {:.4} SBIC(1) {:.4} FPE {:.2} LR {:.3}; selected {:?}{}",
            r4.aic,
            r4.hqic,
            rep.rows[1].criteria.sbic,
            r4.fpe,
            lr4,
            rep.selected,
            if failed.is_empty() { String::new() } else { format!("; off: {failed:?}") }
        ),
    )
}

// 3
#[allow(clippy::approx_constant)] // 6.280 is a published statistic
fn normality_reproduction() -> Verdict {
    // (name, S, κ, skew χ², skew p, kurt χ², kurt p, JB, JB p)
    let rows = [
        ("D_output", -0.508, 4.523, 2.796, 0.095, 6.280, 0.012, 9.075, 0.011),
        ("D_price", -0.374, 4.205, 1.514, 0.218, 3.931, 0.047, 5.445, 0.066),
        ("D_employment", -0.553, 4.955, 3.308, 0.069, 10.346, 0.001, 13.654, 0.001),
        ("D_wages", 0.133, 3.618, 0.191, 0.662, 1.035, 0.309, 1.226, 0.542),
        ("D_exchangeRate", -0.007, 2.952, 0.001, 0.982, 0.006, 0.937, 0.007, 0.997),
        ("D_numFirms", -0.308, 3.687, 1.030, 0.310, 1.278, 0.258, 2.308, 0.315),
    ];
    let joint = (8.839, 0.183, 22.875, 0.001, 31.715, 0.002);
    let names: Vec<&str> = rows.iter().map(|r| r.0).collect();
    let moments: Vec<(f64, f64)> = rows.iter().map(|r| (r.1, r.2)).collect();
    let rep = match normality_from_moments(&names, &moments, 65) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let mut off = Vec::new();
    let mut check = |label: String, got: f64, want: f64, tol: f64| {
        if (got - want).abs() > tol {
            off.push(format!("{label} {got:.4} vs {want}"));
        }
    };
    for (row, r) in rep.rows.iter().zip(rows) {
        check(format!("{} skew", r.0), row.skewness_chi2, r.3, 0.005);
        check(format!("{} skew p", r.0), row.skewness_p, r.4, 0.002);
        check(format!("{} kurt", r.0), row.kurtosis_chi2, r.5, 0.005);
        check(format!("{} kurt p", r.0), row.kurtosis_p, r.6, 0.002);
        check(format!("{} JB", r.0), row.jarque_bera, r.7, 0.005);
        check(format!("{} JB p", r.0), row.jarque_bera_p, r.8, 0.002);
    }
    let j = &rep.joint;
    check("ALL skew".into(), j.skewness_chi2, joint.0, 0.005);
    check("ALL skew p".into(), j.skewness_p, joint.1, 0.002);
    check("ALL kurt".into(), j.kurtosis_chi2, joint.2, 0.005);
    check("ALL kurt p".into(), j.kurtosis_p, joint.3, 0.002);
    check("ALL JB".into(), j.jarque_bera, joint.4, 0.005);
    check("ALL JB p".into(), j.jarque_bera_p, joint.5, 0.002);
    let detail = if off.is_empty() {
        "all rows within tolerance".to_string()
    } else {
        // the moment inputs are published to 3 decimals, which bounds the achievable accuracy
        format!("{} values outside tolerance: {}", off.len(), off.join("; "))
    };
    verdict(off.is_empty(), detail)
}

// 4
fn p_value_layer() -> Verdict {
    let a = chi_square_sf(33.8489, 36).unwrap_or(f64::NAN);
    let b = chi_square_sf(46.3709, 36).unwrap_or(f64::NAN);
    verdict(
        (a - 0.5713).abs() <= 5e-4 && (b - 0.1154).abs() <= 5e-4,
        format!("sf(33.8489, 36) = {a:.6}, sf(46.3709, 36) = {b:.6}"),
    )
}

/// Drifting random walk `x` with either `y = x + AR(1)` or an independent drifting walk `y`.
///
/// The drift matches the unrestricted-constant case the critical values are tabulated for.
fn bivariate(t: usize, seed: u64, cointegrated: bool) -> Frame {
    const DRIFT: f64 = 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut x, mut y, mut u) = (0.0, 0.0, 0.0);
    let mut m = Matrix::zeros(t, 2);
    for i in 0..t {
        x += DRIFT + normal(&mut rng);
        if cointegrated {
            u = 0.5 * u + normal(&mut rng);
            y = x + u;
        } else {
            y += DRIFT + normal(&mut rng);
        }
        m[(i, 0)] = x;
        m[(i, 1)] = y;
    }
    frame_from(&["x", "y"], &m)
}

// 5
fn rank_recovery() -> Verdict {
    let started = Instant::now();
    let rank_of = |f: &Frame| johansen_trace(f, 2).ok().and_then(|r| r.selected_rank);
    let ones = (0..100).filter(|&s| rank_of(&bivariate(500, 10_000 + s, true)) == Some(1)).count();
    let zeros = (0..100).filter(|&s| rank_of(&bivariate(500, 20_000 + s, false)) == Some(0)).count();
    let elapsed = started.elapsed();
    verdict(
        ones >= 90 && zeros >= 85 && elapsed < Duration::from_secs(30),
        format!("r=1 recovered {ones}/100, random walks r=0 {zeros}/100, {elapsed:.2?}"),
    )
}

fn var_fit(coefficients: Vec<Matrix>, sigma: Matrix) -> VarFit {
    let k = sigma.nrows();
    let p = coefficients.len();
    let q = parse_quarter("2000Q1").unwrap();
    VarFit {
        names: (0..k).map(|i| format!("y{i}")).collect(),
        lag_order: p,
        coefficients,
        constant: Vector::zeros(k),
        exog_names: vec![],
        exog_lags: 0,
        exog_coefficients: Matrix::zeros(k, 0),
        residuals: Matrix::zeros(1, k),
        sigma,
        sample: SampleRange {
            first: q,
            last: q,
            observations: 1,
        },
        history: Matrix::zeros(p, k),
        exog_history: Matrix::zeros(0, 0),
        log_likelihood: None,
    }
}

// 6
fn irf_oracle() -> Verdict {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = loop {
            let a = Matrix::from_fn(2, 2, |_, _| rng.random_range(-0.9..0.9));
            if a.complex_eigenvalues().iter().all(|z| z.norm() < 0.95) {
                break a;
            }
        };
        let g = Matrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
        let sigma = &g * g.transpose() + Matrix::identity(2, 2) * 0.1;
        let p = sigma.clone().cholesky().expect("positive definite").l();
        let set = match orthogonalized_irfs(&var_fit(vec![a.clone()], sigma), 40) {
            Ok(s) => s,
            Err(e) => return Verdict::Fail(format!("seed {seed}: {e}")),
        };
        for j in 0..2 {
            // noise-free path after an impact of P e_j
            let mut x = p.column(j).into_owned();
            for h in 0..=40 {
                for i in 0..2 {
                    worst = worst.max((set.matrices[h][(i, j)] - x[i]).abs());
                }
                x = &a * x;
            }
        }
    }
    verdict(worst <= 1e-10, format!("max deviation {worst:.2e} over 50 systems, h ≤ 40"))
}

fn random_vecm_sample(rng: &mut ChaCha8Rng, k: usize, rank: usize, lags: usize, t: usize) -> Frame {
    // β = [I_r; B], α with negative loadings on the normalized rows
    let mut beta = Matrix::zeros(k, rank);
    let mut alpha = Matrix::zeros(k, rank);
    for c in 0..rank {
        beta[(c, c)] = 1.0;
        for r in rank..k {
            beta[(r, c)] = rng.random_range(-1.0..1.0);
        }
        alpha[(c, c)] = -rng.random_range(0.2..0.5);
    }
    let gamma: Vec<Matrix> = (1..lags)
        .map(|_| Matrix::from_fn(k, k, |i, j| if i == j { rng.random_range(0.0..0.3) } else { 0.0 }))
        .collect();
    let mu = Vector::from_fn(k, |_, _| rng.random_range(-0.1..0.1));
    let mut xs: Vec<Vector> = vec![Vector::zeros(k); lags];
    for _ in 0..t {
        let n = xs.len();
        let mut dx = &mu + &alpha * (beta.transpose() * &xs[n - 1]);
        for (i, g) in gamma.iter().enumerate() {
            dx += g * (&xs[n - 1 - i] - &xs[n - 2 - i]);
        }
        dx += Vector::from_fn(k, |_, _| normal(rng));
        let next = &xs[n - 1] + dx;
        xs.push(next);
    }
    let m = Matrix::from_fn(t, k, |i, j| xs[lags + i][j]);
    let names: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
    Frame::from_matrix(parse_quarter("1960Q1").unwrap(), &names, &m).unwrap()
}

// 7
fn vecm_var_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut bad_units = Vec::new();
    for case in 0..50 {
        let k = rng.random_range(2..=4);
        let rank = rng.random_range(1..k);
        let lags = rng.random_range(1..=3);
        let frame = random_vecm_sample(&mut rng, k, rank, lags, 300);
        let fit = match fit_vecm(&frame, lags, rank) {
            Ok(f) => f,
            Err(e) => return Verdict::Fail(format!("case {case}: {e}")),
        };
        let direct = forecast_vecm(&fit, 20).map(|f| f.to_matrix());
        let via_var = forecast_var(&vecm_to_levels_var(&fit), 20, None).map(|f| f.to_matrix());
        match (direct, via_var) {
            (Ok(a), Ok(b)) => worst = worst.max((a - b).amax()),
            (a, b) => return Verdict::Fail(format!("case {case}: {:?} / {:?}", a.err(), b.err())),
        }
        match vecm_stability(&fit) {
            Ok(s) if s.pass => {}
            Ok(s) => bad_units.push(format!("case {case}: {} unit vs {}", s.unit_count, s.expected_unit_count)),
            Err(e) => bad_units.push(format!("case {case}: {e}")),
        }
    }
    verdict(
        worst <= 1e-10 && bad_units.is_empty(),
        format!("max forecast gap {worst:.2e}; unit-root mismatches: {}", if bad_units.is_empty() { "none".into() } else { bad_units.join(", ") }),
    )
}

fn panel() -> Frame {
    let path = workspace_root().join("data/synthetic_panel.csv");
    load_frame(&path, &DEFAULT_COLUMNS).expect("synthetic panel is part of the repository")
}

// 8
fn shock_identity() -> Verdict {
    let frame = panel();
    let base = ShockScenario::new("exchange_rate", 1.0, frame.end().succ(), 20, 2, 2);
    let (a, b) = match (run_three_stage(&frame, &base), run_unshocked(&frame, &base)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return Verdict::Fail(format!("{:?} / {:?}", a.err(), b.err())),
    };
    let mut worst: f64 = 0.0;
    for (x, y) in a.irfs.iter().zip(&b.irfs) {
        for (u, v) in x.responses.iter().zip(&y.responses) {
            worst = worst.max((u - v).abs());
        }
    }
    let mut shocked = base.clone();
    shocked.factor = 1.15;
    shocked.start = frame.end().offset(5);
    let s = match run_three_stage(&frame, &shocked) {
        Ok(s) => s,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let before = 4;
    let local = (0..before).all(|i| s.shocked_path.values()[i] == b.shocked_path.values()[i])
        && (0..before).all(|i| s.stage2_forecast.row(i) == b.stage2_forecast.row(i))
        && s.shocked_path.values()[before..]
            .iter()
            .zip(&b.shocked_path.values()[before..])
            .all(|(x, y)| (x - 1.15 * y).abs() <= 1e-12 * y.abs().max(1.0));
    verdict(
        worst <= 1e-10 && local,
        format!("max IRF gap at factor 1.0 = {worst:.2e}; pre-start values untouched: {local}"),
    )
}

fn ar_series(phi: f64, t: usize, seed: u64) -> Series {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = vec![0.0; t];
    for i in 1..t {
        y[i] = phi * y[i - 1] + normal(&mut rng);
    }
    Series::new("y", parse_quarter("1900Q1").unwrap(), y).unwrap()
}

// 9
fn adf_size_power() -> Verdict {
    let rejects = |phi: f64, base: u64| {
        (0..100)
            .filter(|&s| adf_test(&ar_series(phi, 500, base + s), 1, Deterministic::Constant).is_ok_and(|r| r.reject))
            .count()
    };
    let rw_kept = 100 - rejects(1.0, 30_000);
    let ar_rejected = rejects(0.5, 40_000);
    verdict(
        rw_kept >= 85 && ar_rejected >= 90,
        format!("random walks not rejected {rw_kept}/100, AR(0.5) rejected {ar_rejected}/100"),
    )
}

// 10
fn end_to_end_runtime() -> Verdict {
    let out = tempfile::tempdir().expect("temp dir");
    let overrides = Overrides {
        dataset: Some(workspace_root().join("data/synthetic_panel.csv")),
        output_dir: Some(out.path().to_path_buf()),
        lags: Some(2),
        rank: Some(2),
        horizon: Some(20),
        adf_lags: Some(1),
        target: Some("exchange_rate".into()),
        factor: Some(1.15),
        ..Overrides::default()
    };
    let started = Instant::now();
    let cfg = match parse_config(&overrides) {
        Ok(c) => c,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let steps = [
        Command::Describe,
        Command::Lagselect,
        Command::Johansen,
        Command::FitVec,
        Command::Diagnose,
        Command::Irf,
        Command::Forecast,
        Command::Shock,
    ];
    for c in steps {
        if let Err(e) = execute(&cfg, c) {
            return Verdict::Fail(format!("{}: {e}", c.name()));
        }
    }
    let elapsed = started.elapsed();
    let frame = panel();
    verdict(
        elapsed < Duration::from_secs(1) && frame.len() == 69 && frame.width() == 6,
        format!("{} rows × {} variables, 8 commands in {elapsed:.2?}", frame.len(), frame.width()),
    )
}

// 11
fn reference_dataset() -> Verdict {
    let path = std::env::var_os("VECMKIT_REFERENCE_PANEL")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace_root().join("data/reference_panel.csv"));
    if !path.is_file() {
        return Verdict::Skip(format!("no reconstructed dataset at {}", path.display()));
    }
    let frame = match load_frame(&path, &DEFAULT_COLUMNS) {
        Ok(f) => f,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let stats = match summary_stats(&frame) {
        Ok(s) => s,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    // (mean, sd, min, max), N = 69
    let reference = [
        ("employment", [2.513, 0.164, 2.067, 2.800]),
        ("wages", [22817.350, 4246.641, 13490.000, 28600.000]),
        ("exchange_rate", [1.207, 0.183, 0.968, 1.595]),
        ("num_firms", [467.652, 31.011, 420.000, 539.000]),
        ("price", [0.852, 0.096, 0.665, 1.078]),
        ("output", [13408.380, 397.173, 12354.850, 14258.370]),
    ];
    let mut off = Vec::new();
    for (name, want) in reference {
        let Some(c) = stats.get(name) else {
            off.push(format!("{name} missing"));
            continue;
        };
        for (label, got, w) in [("mean", c.mean, want[0]), ("sd", c.sd, want[1]), ("min", c.min, want[2]), ("max", c.max, want[3])] {
            if ((got - w) / w).abs() > 0.005 {
                off.push(format!("{name} {label} {got:.4} vs {w}"));
            }
        }
        if c.count != 69 {
            off.push(format!("{name} N {}", c.count));
        }
    }
    verdict(off.is_empty(), if off.is_empty() { "all statistics within 0.5%".into() } else { off.join("; ") })
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("trace statistics and rank from rounded eigenvalues", trace_consistency),
        ("information criteria from log-likelihoods", criteria_reproduction),
        ("normality statistics from skewness and kurtosis", normality_reproduction),
        ("chi-square p-values of the LM statistics", p_value_layer),
        ("Johansen rank recovery on simulated pairs", rank_recovery),
        ("orthogonalized IRFs against noise-free paths", irf_oracle),
        ("VECM forecasts against converted levels VAR", vecm_var_equivalence),
        ("shock identity and locality", shock_identity),
        ("ADF size and power", adf_size_power),
        ("end-to-end workflow runtime", end_to_end_runtime),
        ("summary statistics of a reconstructed dataset", reference_dataset),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failures += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("{tag} [{:>2}] {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed or skipped, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
