//! Acceptance suite: one PASS/FAIL line per criterion and a failure count.
//! Failures only change the exit status with `SPINDIFF_ACCEPTANCE_STRICT=1`.
//! Runs the full-size default grid, so expect several minutes.

mod common;
#[path = "../../core/tests/common/mod.rs"]
mod oracles;

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use common::{out_file, printed, round_trips, run_with_config, spindiff, COMPACT};
use spindiff_cli::{MeasuredData, Table};
use spindiff_core::fit::fit_exponential_decay;
use spindiff_core::observables::{exciton_zeeman_splitting, ohs_max, polarization_degree};
use spindiff_core::protocol::sample_times;
use spindiff_core::{
    simulate_decay_curve_with, DecaySeries, DotGeometry, Grid, Helicity, MaterialParams, PolarizationField, Resolution,
    RunDiagnostics, Simulation, SolverConfig, YKind, BOHR_MAGNETON_UEV_PER_T,
};
use tempfile::tempdir;

const T_PUMP: f64 = 10.0;
/// With this set to 1, any failed criterion makes the target exit non-zero.
const STRICT_ENV: &str = "SPINDIFF_ACCEPTANCE_STRICT";

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} [{id}] {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures += 1;
        }
    }
}

fn default_grid(res: f64) -> Grid {
    Grid::around_dot(&DotGeometry::default(), Resolution { dr: res, dz: res }, 20.0).unwrap()
}

/// Normalized decay on the default grid, plus wall-clock seconds.
fn decay(d_cm2s: f64, dt: Option<f64>, res: f64, t_max: f64, every: f64) -> (DecaySeries, f64) {
    let mut cfg = SolverConfig::from_cm2_per_s(d_cm2s).unwrap();
    cfg.dt = dt;
    let start = Instant::now();
    let s = simulate_decay_curve_with(&cfg, T_PUMP, t_max, every, &DotGeometry::default(), &default_grid(res)).unwrap();
    (s, start.elapsed().as_secs_f64())
}

/// Dot decay after pumping, starting from `initial` rather than S ≡ 0.
fn decay_from(initial: PolarizationField, cfg: SolverConfig, delays: &[f64]) -> (Vec<f64>, RunDiagnostics) {
    let dot = DotGeometry::default();
    let mut sim = Simulation::from_field(initial, cfg, dot).unwrap();
    sim.pump(T_PUMP).unwrap();
    let p0 = sim.dot_average().unwrap();
    let p = sim
        .dark_sampled(delays)
        .unwrap()
        .into_iter()
        .map(|(_, p)| p / p0)
        .collect();
    (p, sim.diagnostics())
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let mut all_runs = RunDiagnostics::default();
    let dot = DotGeometry::default();

    // 1. Mid-D anchor.
    let (mid, secs) = decay(1e-13, None, 0.5, 20.0, 0.05);
    all_runs.merge(&mid.diagnostics.unwrap());
    let p5 = mid.interpolate(5.0);
    report.check(
        "1",
        (p5 - 0.30).abs() <= 0.05 && secs < 60.0,
        format!("D=1e-13: p(5 s) = {p5:.4} (target 0.30 +/- 0.05); 20 s curve in {secs:.1} s (target < 60 s)"),
    );

    // 2. High-D anchor.
    let (high, _) = decay(1e-12, None, 0.5, 20.0, 0.05);
    all_runs.merge(&high.diagnostics.unwrap());
    let t_e = high.crossing_time((-1.0f64).exp()).unwrap_or(f64::NAN);
    let below = high
        .points()
        .iter()
        .zip(mid.points())
        .skip(1)
        .all(|(h, m)| h.0 == m.0 && h.1 < m.1);
    report.check(
        "2",
        (t_e - 1.0).abs() <= 0.3 && below,
        format!("D=1e-12: 1/e time {t_e:.3} s (target 1 +/- 0.3); below the D=1e-13 curve on (0, 20] s: {below}"),
    );

    // 3. Fitted-D anchor; the same dark phase is the dot-only reference for 8.
    let delays = sample_times(120.0, 0.5).unwrap();
    let cfg_slow = SolverConfig::from_cm2_per_s(2e-15).unwrap();
    let (slow, diag) = decay_from(PolarizationField::zeros(&default_grid(0.5)), cfg_slow, &delays);
    all_runs.merge(&diag);
    let slow = DecaySeries::new(
        delays.iter().copied().zip(slow.iter().copied()).collect(),
        YKind::DotAveragePolarization,
    )
    .unwrap();
    let tau = fit_exponential_decay(&slow).map(|f| f.tau).unwrap_or(f64::NAN);
    report.check(
        "3",
        (40.0..=90.0).contains(&tau),
        format!("D=2e-15: single-exponential tau over 0-120 s = {tau:.1} s (target [40, 90])"),
    );

    // 4. Speed ratio.
    let t30_mid = mid.crossing_time(0.30).unwrap_or(f64::NAN);
    let t30_slow = slow.crossing_time(0.30).unwrap_or(f64::NAN);
    let ratio = t30_slow / t30_mid;
    report.check(
        "4",
        (ratio - 12.0).abs() <= 6.0,
        format!("time to 0.30: {t30_slow:.1} s / {t30_mid:.2} s = {ratio:.1} (target 12 +/- 6)"),
    );

    // 5. Observables.
    let m = MaterialParams::default().with_g_factors(0.5, 1.5);
    let max = ohs_max(&m);
    let p38 = polarization_degree(38.0, &m).unwrap();
    let b_n = 1.7;
    let diff = exciton_zeeman_splitting(&m, b_n, Helicity::SigmaPlus).unwrap()
        - exciton_zeeman_splitting(&m, b_n, Helicity::SigmaMinus).unwrap();
    let expect = 2.0 * 0.5 * BOHR_MAGNETON_UEV_PER_T * b_n;
    let rel = ((diff - expect) / expect).abs();
    report.check(
        "5",
        max == 132.0 && (0.287..=0.289).contains(&p38) && rel <= 1e-12,
        format!("ohs_max = {max} ueV; P(38 ueV) = {p38:.4}; splitting difference rel. error {rel:.1e}"),
    );

    // 6. Solver oracles and convergence.
    let gauss = oracles::gaussian_kernel_error(10.0, 1.0);
    let (slab, series) = oracles::slab_comparison(10.0, 5.0);
    let slab_err = ((slab - series) / series).abs();
    let drift = oracles::conservation_drift(1000);
    let (fine, _) = decay(1e-13, Some(0.005), 0.25, 5.0, 0.05);
    all_runs.merge(&fine.diagnostics.unwrap());
    let shift_pp = 100.0 * (fine.interpolate(5.0) - p5).abs();

    // 8. Dot plus a coplanar 5 nm annulus out to 50 nm, both at 1 when the pump starts.
    let grid = default_grid(0.5);
    let annulus = PolarizationField::from_fn(&grid, |r, z| {
        if dot.contains(r, z) || (r < 50.0 && z.abs() < dot.height / 2.0) {
            1.0
        } else {
            0.0
        }
    });
    let (with_annulus, diag) = decay_from(annulus, cfg_slow, &delays);
    all_runs.merge(&diag);
    let worst = slow
        .values()
        .iter()
        .zip(&with_annulus)
        .map(|(a, b)| ((b - a) / a).abs())
        .fold(0.0, f64::max);

    let max_ok = all_runs.within_unit_interval();
    report.check(
        "6",
        gauss < 0.01 && slab_err < 0.01 && drift < 1e-6 && max_ok && shift_pp < 0.5,
        format!(
            "heat kernel L2 {gauss:.2e}; slab {slab_err:.2e}; conservation {drift:.1e}; \
             field range [{:.3e}, {:.12}] over {} steps; halving dr, dz, dt moves p(5 s) by {shift_pp:.3} pp",
            all_runs.min_value, all_runs.max_value, all_runs.steps
        ),
    );

    // 7. Fit round trips.
    let rise_clean = [0.4, 1.3, 3.4].map(|tau| oracles::rise_round_trip(tau, 0.0, 1).abs());
    let rise_noisy = [0.4, 1.3, 3.4]
        .iter()
        .enumerate()
        .map(|(k, &tau)| oracles::rise_round_trip(tau, 0.05, 11 + k as u64).abs());
    let rise_noisy: Vec<f64> = rise_noisy.collect();
    let mut model = oracles::fit_model();
    let (d0, s0, o0) = oracles::diffusion_round_trip(&mut model, 0.0, 0);
    let (d1, _, _) = oracles::diffusion_round_trip(&mut model, 1.0, 7);
    report.check(
        "7",
        rise_clean.iter().all(|e| *e < 1e-3)
            && rise_noisy.iter().all(|e| *e < 0.1)
            && d0.abs() < 0.05
            && s0.abs() < 0.01
            && o0.abs() < 0.01
            && d1.abs() < 0.25,
        format!(
            "rise tau errors clean {:.1e}, noisy {:.3}/{:.3}/{:.3}; D error clean {:.4} (scale {:.1e}, offset {:.1e}), 1 ueV noise {:.3}",
            rise_clean.iter().cloned().fold(0.0, f64::max),
            rise_noisy[0],
            rise_noisy[1],
            rise_noisy[2],
            d0,
            s0,
            o0,
            d1
        ),
    );

    report.check(
        "8",
        worst < 0.10,
        format!(
            "annulus changes the D=2e-15 curve by at most {:.2}% over 0-120 s",
            100.0 * worst
        ),
    );

    // 9. CLI contract.
    let (ok, detail) = cli_contract();
    report.check("9", ok, detail);

    if report.failures == 0 {
        println!("all acceptance criteria passed");
        return ExitCode::SUCCESS;
    }
    println!("{} acceptance criteria failed", report.failures);
    if std::env::var_os(STRICT_ENV).is_some_and(|v| v == "1") {
        ExitCode::FAILURE
    } else {
        println!("(set {STRICT_ENV}=1 to turn failures into a non-zero exit)");
        ExitCode::SUCCESS
    }
}

/// Every subcommand's documented examples; returns the verdict and a summary.
fn cli_contract() -> (bool, String) {
    let dir = tempdir().unwrap();
    let dir = dir.path();
    let mut problems: Vec<String> = Vec::new();
    let mut csvs = 0;

    // simulate
    let cfg = format!("{COMPACT}d_cm2s = 2e-15\n[protocol]\npreset = \"paper-decay\"\nt_dark_s = 120.0\n[output]\nsample_every_s = 2.0\nsnapshot_times_s = [60.0]\n");
    let out = run_with_config(dir, &cfg, &["simulate"]);
    if out.code != 0 {
        problems.push(format!("simulate D=2e-15 exit {}", out.code));
    }
    let mut tau = None;
    for name in ["decay.csv", "field_snapshots.csv"] {
        match round_trips(&out_file(dir, name)) {
            Ok(t) => {
                csvs += 1;
                if let (Some(ts), Some(ps)) = (t.column("t_s"), t.column("dot_average")) {
                    let series = DecaySeries::new(ts.into_iter().zip(ps).collect(), YKind::DotAveragePolarization);
                    tau = series.ok().and_then(|s| fit_exponential_decay(&s).ok()).map(|f| f.tau);
                }
            }
            Err(e) => problems.push(e),
        }
    }
    if !tau.is_some_and(|t| (40.0..=90.0).contains(&t)) {
        problems.push(format!("simulate D=2e-15 tau {tau:?} outside [40, 90]"));
    }
    let out = run_with_config(
        dir,
        &format!("{COMPACT}d_cm2s = 0.0\n[protocol]\nt_dark_s = 10.0\n"),
        &["simulate"],
    );
    let constant = Table::read(&out_file(dir, "decay.csv"))
        .ok()
        .and_then(|t| t.column("dot_average"))
        .is_some_and(|c| c.iter().all(|&p| (p - 1.0).abs() < 1e-12));
    if out.code != 0 || !constant {
        problems.push("simulate D=0 constant column".into());
    }
    if run_with_config(dir, "[geometry]\nradius_nm = 10.0\n", &["simulate"]).code != 2 {
        problems.push("simulate missing geometry key exit 2".into());
    }
    let blowup =
        "[geometry]\nradius_nm = 10.0\nheight_nm = 5.0\n[solver]\nd_cm2s = 1e294\ndt_s = 1.0\nextent_factor = 5.0\n";
    if run_with_config(dir, blowup, &["simulate"]).code != 3 {
        problems.push("simulate solver failure exit 3".into());
    }

    // sweep
    let cfg = format!(
        "{COMPACT}d_list_cm2s = [2e-15, 1e-13, 1e-12]\n[protocol]\nt_dark_s = 30.0\n[output]\nsample_every_s = 0.5\n"
    );
    // The 1e-12 curve needs the stable automatic step.
    let cfg = cfg.replace("dt_s = 0.05\n", "");
    let out = run_with_config(dir, &cfg, &["sweep"]);
    match (out.code, round_trips(&out_file(dir, "sweep.csv"))) {
        (0, Ok(t)) => {
            csvs += 1;
            let curves: Vec<Vec<f64>> = [2e-15, 1e-13, 1e-12]
                .iter()
                .map(|&d| t.rows.iter().filter(|r| r[0] == d).map(|r| r[2]).collect())
                .collect();
            let ordered = (1..curves[0].len()).all(|k| curves[0][k] > curves[1][k] && curves[1][k] > curves[2][k]);
            if !ordered {
                problems.push("sweep curves not ordered by D".into());
            }
        }
        (code, r) => problems.push(format!("sweep exit {code}: {r:?}", r = r.err())),
    }
    let single = format!("{COMPACT}d_cm2s = 1e-14\nd_list_cm2s = [1e-14]\n[protocol]\nt_dark_s = 5.0\n");
    run_with_config(dir, &single, &["simulate"]);
    run_with_config(dir, &single, &["sweep"]);
    let same = match (
        Table::read(&out_file(dir, "decay.csv")),
        Table::read(&out_file(dir, "sweep.csv")),
    ) {
        (Ok(a), Ok(b)) => a
            .rows
            .iter()
            .zip(&b.rows)
            .all(|(a, b)| a[0] == b[1] && (a[1] - b[2]).abs() < 1e-12),
        _ => false,
    };
    if !same {
        problems.push("sweep with one D differs from simulate".into());
    }
    if run_with_config(dir, &format!("{COMPACT}d_list_cm2s = []\n"), &["sweep"]).code != 2 {
        problems.push("sweep empty list exit 2".into());
    }

    // fit-d on data from the forward model, written and read back through the CSV path.
    let mut model = oracles::fit_model();
    let synthetic = oracles::synthetic_zeeman(&mut model, 0.0, 0);
    let measured = MeasuredData {
        sigma: vec![Some(0.5); synthetic.len()],
        series: synthetic,
    };
    let data = dir.join("measured.csv");
    measured.to_table().write(&data).unwrap();
    match MeasuredData::read(&data) {
        Ok(back) if back.series.points() == measured.series.points() => csvs += 1,
        _ => problems.push("measured CSV does not read back identically".into()),
    }
    let fit_cfg = format!("{COMPACT}d_min_cm2s = 1e-16\nd_max_cm2s = 1e-14\n");
    let out = run_with_config(dir, &fit_cfg, &["fit-d", data.to_str().unwrap()]);
    let d = printed(&out.stdout, "d_qd_cm2s");
    let json_ok = fs::read_to_string(out_file(dir, "fit.json"))
        .ok()
        .and_then(|s| serde_json::from_str::<serde_json::Value>(&s).ok())
        .is_some_and(|v| {
            ["d_qd_cm2s", "scale_uev", "offset_uev", "sse", "warnings", "d_grid_cm2s"]
                .iter()
                .all(|k| v.get(k).is_some())
        });
    if out.code != 0 || !d.is_some_and(|d| (d / 2e-15 - 1.0).abs() < 0.05) || !json_ok {
        problems.push(format!(
            "fit-d round trip: exit {}, d {d:?}, report ok {json_ok}",
            out.code
        ));
    }
    if round_trips(&out_file(dir, "fit_overlay.csv")).is_ok() {
        csvs += 1;
    } else {
        problems.push("fit_overlay.csv round trip".into());
    }
    fs::write(
        &data,
        "delay_s,value,sigma\n0,80,\n10,80,\n20,80,\n30,80,\n40,80,\n60,80,\n",
    )
    .unwrap();
    if run_with_config(dir, &fit_cfg, &["fit-d", data.to_str().unwrap()]).code != 4 {
        problems.push("fit-d constant CSV exit 4".into());
    }
    fs::write(&data, "delay_s,value,sigma\n0,90,\n20,80,\n10,70,\n30,60,\n40,50,\n").unwrap();
    if run_with_config(dir, &fit_cfg, &["fit-d", data.to_str().unwrap()]).code != 2 {
        problems.push("fit-d non-monotonic exit 2".into());
    }

    // fit-rise
    let out_dir = dir.join("out");
    for tau in [0.4, 3.4] {
        let series = oracles::synthetic_rise(tau, 0.0, 0);
        let table = MeasuredData {
            sigma: vec![None; series.len()],
            series,
        }
        .to_table();
        let path = dir.join("rise.csv");
        table.write(&path).unwrap();
        let out = spindiff(&["--out", out_dir.to_str().unwrap(), "fit-rise", path.to_str().unwrap()]);
        let fitted = printed(&out.stdout, "tau_s");
        if out.code != 0 || !fitted.is_some_and(|f| (f / tau - 1.0).abs() < 1e-3) {
            problems.push(format!("fit-rise tau {tau}: exit {}, got {fitted:?}", out.code));
        }
        if round_trips(&out_dir.join("rise_overlay.csv")).is_ok() {
            csvs += 1;
        }
        let mut short = table.clone();
        short.rows.truncate(3);
        short.write(&path).unwrap();
        if spindiff(&["--out", out_dir.to_str().unwrap(), "fit-rise", path.to_str().unwrap()]).code != 2 {
            problems.push("fit-rise 3-row CSV exit 2".into());
        }
    }

    // convert
    let conv = |v: &str| spindiff(&["convert", v, "--from", "ohs", "--to", "polarization"]);
    let p38 = conv("38").stdout.trim().parse::<f64>().ok();
    let p132 = conv("132").stdout.trim().parse::<f64>().ok();
    if !p38.is_some_and(|p| (p - 0.2879).abs() < 5e-5) || p132 != Some(1.0) || conv("200").code != 2 {
        problems.push(format!("convert: 38 -> {p38:?}, 132 -> {p132:?}"));
    }

    let ok = problems.is_empty();
    let detail = if ok {
        format!("simulate, sweep, fit-d, fit-rise and convert exit codes as documented; {csvs} emitted CSVs round-trip exactly")
    } else {
        format!("CLI problems: {}", problems.join("; "))
    };
    (ok, detail)
}
