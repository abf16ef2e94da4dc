use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spindiff_core::fit::FitOptions;
use spindiff_core::observables::{
    exciton_zeeman_splitting, overhauser_field, overhauser_shift, polarization_degree, polarization_from_field,
};
use spindiff_core::protocol::{sample_times, simulate_pump};
use spindiff_core::{
    fit_exponential_rise, run_sequence, simulate_decay_curve_with, ForwardModel, MaterialParams, RunDiagnostics,
    Simulation,
};

use crate::config::{Protocol, RunConfig};
use crate::data::{fmt_num, MeasuredData, Table};
use crate::error::{CliError, Result};
use crate::{Cli, Command, Quantity};

pub const DECAY_CSV: &str = "decay.csv";
pub const SNAPSHOTS_CSV: &str = "field_snapshots.csv";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const FIT_JSON: &str = "fit.json";
pub const FIT_OVERLAY_CSV: &str = "fit_overlay.csv";
pub const RISE_OVERLAY_CSV: &str = "rise_overlay.csv";

struct Ctx<'a> {
    cli: &'a Cli,
    config: Option<RunConfig>,
}

impl Ctx<'_> {
    fn config(&self) -> Result<&RunConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs --config PATH".into()))
    }

    fn out_dir(&self) -> Result<PathBuf> {
        let dir = self
            .cli
            .out
            .clone()
            .or_else(|| self.config.as_ref().and_then(|c| c.output.dir.clone()))
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(dir)
    }

    fn say(&self, msg: impl AsRef<str>) {
        if !self.cli.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn warn(&self, msg: impl AsRef<str>) {
        if !self.cli.quiet {
            eprintln!("warning: {}", msg.as_ref());
        }
    }
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let config = cli.config.as_deref().map(RunConfig::load).transpose()?;
    let ctx = Ctx { cli, config };
    match &cli.command {
        Command::Simulate { d } => simulate(&ctx, *d),
        Command::Sweep { d } => sweep(&ctx, d.clone()),
        Command::FitD { data } => fit_d(&ctx, data),
        Command::FitRise { data } => fit_rise(&ctx, data),
        Command::Convert { value, from, to } => convert(&ctx, *value, *from, *to),
    }
}

fn report_diagnostics(ctx: &Ctx, d: &RunDiagnostics) {
    if !d.within_unit_interval() {
        ctx.warn(format!("field left [0, 1]: min {} max {}", d.min_value, d.max_value));
    }
}

fn simulate(ctx: &Ctx, d_override: Option<f64>) -> Result<()> {
    let cfg = ctx.config()?;
    let d = d_override
        .or(cfg.solver.d_cm2s)
        .ok_or_else(|| CliError::Config("solver.d_cm2s: simulate needs a diffusion coefficient".into()))?;
    let solver = cfg.solver_for(d)?;
    let (geometry, grid, material) = (cfg.geometry()?, cfg.grid()?, cfg.material()?);
    let every = cfg.output.sample_every_s;
    let zeeman = material.g_e_abs.is_some() && material.g_h_abs.is_some();
    let mut columns = vec!["t_s", "dot_average"];
    if zeeman {
        columns.push("zeeman_splitting_uev");
    }
    let mut decay = Table::new(&columns).with_metadata("d_cm2s", fmt_num(d));
    let mut snapshots = Table::new(&["r_nm", "z_nm", "t_s", "s"]);

    let (points, diagnostics) = match cfg.protocol()? {
        Protocol::PaperDecay { t_pump, t_dark } => {
            let field = simulate_pump(&geometry, &solver, t_pump, &grid)?;
            let mut sim = Simulation::from_field(field, solver, geometry)?;
            let samples = sample_times(t_dark, every)?;
            let mut stops: Vec<f64> = samples.iter().chain(&cfg.output.snapshot_times_s).copied().collect();
            stops.sort_by(f64::total_cmp);
            stops.dedup();
            let mut points = Vec::with_capacity(samples.len());
            for &t in &stops {
                let (_, avg) = sim.dark_sampled(&[(t - sim.time()).max(0.0)])?[0];
                if samples.contains(&t) {
                    points.push((t, avg));
                }
                if cfg.output.snapshot_times_s.contains(&t) {
                    push_snapshot(&mut snapshots, sim.field().values(), sim.field().grid(), t);
                }
            }
            decay = decay.with_metadata("t_pump_s", format!("{t_pump}"));
            (points, sim.diagnostics())
        }
        Protocol::Custom(seq) => {
            if !cfg.output.snapshot_times_s.is_empty() {
                return Err(CliError::Config(
                    "output.snapshot_times_s: only supported with the paper-decay preset".into(),
                ));
            }
            let series = run_sequence(&seq, &solver, &geometry, &grid, Some(every))?;
            let diagnostics = series.diagnostics.unwrap_or_default();
            (series.points().to_vec(), diagnostics)
        }
    };

    let helicity = cfg.helicity()?;
    for &(t, avg) in &points {
        let mut row = vec![t, avg];
        if zeeman {
            let p = avg * cfg.protocol.pump_polarization;
            row.push(zeeman_for(&material, p, helicity)?);
        }
        decay.push(row);
    }
    if zeeman {
        decay = decay.with_metadata("helicity", cfg.protocol.helicity.clone());
    }
    report_diagnostics(ctx, &diagnostics);
    let dir = ctx.out_dir()?;
    decay.write(&dir.join(DECAY_CSV))?;
    snapshots.write(&dir.join(SNAPSHOTS_CSV))?;
    if let Some(&(t, p)) = points.last() {
        ctx.say(format!("d_cm2s = {d:e}\ndot_average({t} s) = {p}"));
    }
    ctx.say(format!(
        "wrote {} and {}",
        dir.join(DECAY_CSV).display(),
        dir.join(SNAPSHOTS_CSV).display()
    ));
    Ok(())
}

/// Exciton Zeeman splitting for a signed polarization `p`; the helicity
/// sets the direction of the Overhauser field.
fn zeeman_for(m: &MaterialParams, p: f64, helicity: spindiff_core::Helicity) -> Result<f64> {
    let b_n = overhauser_field(p, m)?.abs();
    Ok(exciton_zeeman_splitting(m, b_n, helicity)?)
}

fn push_snapshot(table: &mut Table, values: &[f64], grid: &spindiff_core::Grid, t: f64) {
    for i in 0..grid.nr() {
        for j in 0..grid.nz() {
            table.push(vec![grid.r(i), grid.z(j), t, values[grid.index(i, j)]]);
        }
    }
}

fn sweep(ctx: &Ctx, d_override: Option<Vec<f64>>) -> Result<()> {
    let cfg = ctx.config()?;
    let list = d_override
        .or_else(|| cfg.solver.d_list_cm2s.clone())
        .ok_or_else(|| CliError::Config("solver.d_list_cm2s: sweep needs a list of diffusion coefficients".into()))?;
    if list.is_empty() {
        return Err(CliError::Config("solver.d_list_cm2s: list is empty".into()));
    }
    let Protocol::PaperDecay { t_pump, t_dark } = cfg.protocol()? else {
        return Err(CliError::Config("protocol: sweep needs the paper-decay preset".into()));
    };
    let (geometry, grid) = (cfg.geometry()?, cfg.grid()?);
    let mut table = Table::new(&["d_cm2s", "t_s", "p"]).with_metadata("t_pump_s", format!("{t_pump}"));
    for &d in &list {
        let solver = cfg.solver_for(d)?;
        let series = simulate_decay_curve_with(&solver, t_pump, t_dark, cfg.output.sample_every_s, &geometry, &grid)?;
        if let Some(diag) = &series.diagnostics {
            report_diagnostics(ctx, diag);
        }
        for &(t, p) in series.points() {
            table.push(vec![d, t, p]);
        }
        ctx.say(format!(
            "d_cm2s = {d:e}: p({t_dark} s) = {}",
            series.interpolate(t_dark)
        ));
    }
    let path = ctx.out_dir()?.join(SWEEP_CSV);
    table.write(&path)?;
    ctx.say(format!("wrote {}", path.display()));
    Ok(())
}

#[derive(Debug, Serialize)]
struct FitReport {
    d_qd_cm2s: f64,
    scale_uev: f64,
    offset_uev: f64,
    sse: f64,
    d_grid_cm2s: Vec<f64>,
    grid_sse: Vec<f64>,
    warnings: Vec<&'static str>,
    y_kind: &'static str,
    t_pump_s: f64,
}

fn fit_d(ctx: &Ctx, data: &Path) -> Result<()> {
    let cfg = ctx.config()?;
    let measured = MeasuredData::read(data)?;
    let Protocol::PaperDecay { t_pump, .. } = cfg.protocol()? else {
        return Err(CliError::Config("protocol: fit-d needs the paper-decay preset".into()));
    };
    let mut model = ForwardModel::new(cfg.geometry()?, cfg.grid()?, t_pump)?.with_solver(cfg.solver_template()?);
    let opts = FitOptions {
        points_per_decade: cfg.solver.points_per_decade,
        ..Default::default()
    };
    let series = &measured.series;
    let fit = model.fit(series, (cfg.solver.d_min_cm2s, cfg.solver.d_max_cm2s), opts)?;

    let report = FitReport {
        d_qd_cm2s: fit.d_qd,
        scale_uev: fit.scale,
        offset_uev: fit.offset,
        sse: fit.sse,
        d_grid_cm2s: fit.d_grid.clone(),
        grid_sse: fit.grid_sse.clone(),
        warnings: fit.warnings.iter().map(|w| w.as_str()).collect(),
        y_kind: series.y_kind.as_str(),
        t_pump_s: t_pump,
    };
    let curve = model.curve(fit.d_qd, &series.times())?;
    let mut overlay = Table::new(&["t_s", "measured", "model"]).with_metadata("d_cm2s", fmt_num(fit.d_qd));
    for (&(t, y), p) in series.points().iter().zip(curve) {
        overlay.push(vec![t, y, fit.offset + fit.scale * p]);
    }
    let dir = ctx.out_dir()?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let json_path = dir.join(FIT_JSON);
    fs::write(&json_path, json + "\n").map_err(|e| CliError::io(&json_path, e))?;
    overlay.write(&dir.join(FIT_OVERLAY_CSV))?;

    if fit.at_boundary() {
        ctx.warn("minimum lies on a search bound; widen d_min_cm2s/d_max_cm2s");
    }
    ctx.say(format!("d_qd_cm2s = {:e}", fit.d_qd));
    ctx.say(format!(
        "scale = {}\noffset = {}\nsse = {}",
        fit.scale, fit.offset, fit.sse
    ));
    Ok(())
}

fn fit_rise(ctx: &Ctx, data: &Path) -> Result<()> {
    let measured = MeasuredData::read(data)?;
    if measured.series.len() < 4 {
        return Err(CliError::Data {
            path: data.to_path_buf(),
            message: format!("rise fit needs at least 4 rows, got {}", measured.series.len()),
        });
    }
    let fit = fit_exponential_rise(&measured.series)?;
    let mut overlay = Table::new(&["t_s", "measured", "model"]).with_metadata("tau_s", fmt_num(fit.tau));
    for &(t, y) in measured.series.points() {
        overlay.push(vec![t, y, fit.eval(t)]);
    }
    let path = ctx.out_dir()?.join(RISE_OVERLAY_CSV);
    overlay.write(&path)?;
    ctx.say(format!(
        "amplitude = {}\ntau_s = {}\noffset = {}\nresidual_rms = {}",
        fit.amplitude, fit.tau, fit.offset, fit.residual_rms
    ));
    Ok(())
}

fn convert(ctx: &Ctx, value: f64, from: Quantity, to: Quantity) -> Result<()> {
    let m = match &ctx.config {
        Some(c) => c.material()?,
        None => MaterialParams::default(),
    };
    let p = match from {
        Quantity::Ohs => polarization_degree(value, &m)?,
        Quantity::Polarization => {
            overhauser_shift(value, &m)?;
            value
        }
        Quantity::Field => polarization_from_field(value, &m)?,
    };
    let out = match to {
        Quantity::Ohs => overhauser_shift(p, &m)?,
        Quantity::Polarization => p,
        Quantity::Field => overhauser_field(p, &m)?,
    };
    // The result is the command's output, so it prints even with --quiet.
    println!("{out}");
    Ok(())
}
