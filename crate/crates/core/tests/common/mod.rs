//! Independent reference solutions and round-trip drivers. Each function
//! returns the measured discrepancy so callers can apply their own tolerance.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use spindiff_core::{
    fit_exponential_rise, Boundaries, Boundary, DecaySeries, DiffusionSolver, DotGeometry, FitOptions, ForwardModel,
    Grid, PolarizationField, Resolution, SolverConfig, YKind,
};

/// Relative L2 distance between the solver and the free-space heat kernel
/// for a Gaussian blob on the axis: each axis variance grows by `2Dt` and
/// the peak falls as `(σ0²/σ²)^{3/2}`.
pub fn gaussian_kernel_error(d_nm2s: f64, t: f64) -> f64 {
    let sigma0_sq: f64 = 9.0;
    let grid = Grid::new(80, 160, 0.5, 0.5, -40.0).unwrap();
    let gauss = |r: f64, z: f64, s2: f64, amp: f64| amp * (-(r * r + z * z) / (2.0 * s2)).exp();
    let mut field = PolarizationField::from_fn(&grid, |r, z| gauss(r, z, sigma0_sq, 1.0));
    let mut solver = DiffusionSolver::new(&grid, SolverConfig::new(d_nm2s)).unwrap();
    solver.evolve(&mut field, t, None).unwrap();

    let s2 = sigma0_sq + 2.0 * d_nm2s * t;
    let amp = (sigma0_sq / s2).powf(1.5);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..grid.nr() {
        let w = grid.cell_volume(i);
        for j in 0..grid.nz() {
            let exact = gauss(grid.r(i), grid.z(j), s2, amp);
            num += w * (field.at(i, j) - exact).powi(2);
            den += w * exact * exact;
        }
    }
    (num / den).sqrt()
}

/// Mean of `S` over `|z| < a` for a slab initially at 1, between absorbing
/// planes at `±l`, from the cosine series of the 1D problem.
pub fn slab_series_average(d: f64, t: f64, a: f64, l: f64) -> f64 {
    (0..20_000)
        .map(|n| {
            let k = (2 * n + 1) as f64 * PI / (2.0 * l);
            let b = 2.0 * (k * a).sin() / (k * l);
            b * (k * a).sin() / (k * a) * (-d * k * k * t).exp()
        })
        .sum()
}

/// Solver versus [`slab_series_average`]: a wide disk with a reflective
/// outer wall behaves as a 1D slab. Returns `(solver, series)`.
pub fn slab_comparison(d_nm2s: f64, t: f64) -> (f64, f64) {
    let (a, l, h): (f64, f64, f64) = (2.5, 20.0, 0.5);
    let nz = (2.0 * l / h).round() as usize;
    // Radius well beyond ten times the slab thickness.
    let grid = Grid::new(120, nz, h, h, -l).unwrap();
    let mut field = PolarizationField::from_fn(&grid, |_, z| if z.abs() < a { 1.0 } else { 0.0 });
    let cfg = SolverConfig::new(d_nm2s).with_boundaries(Boundaries {
        radial: Boundary::Reflective,
        axial: Boundary::DirichletZero,
    });
    let mut solver = DiffusionSolver::new(&grid, cfg).unwrap();
    solver.evolve(&mut field, t, None).unwrap();
    let slab = DotGeometry::new(grid.r_max() - 1e-9, 2.0 * a, 0.0).unwrap();
    (field.dot_average(&slab).unwrap(), slab_series_average(d_nm2s, t, a, l))
}

/// Relative change of total spin over `steps` steps with reflective walls,
/// starting from a pumped dot.
pub fn conservation_drift(steps: usize) -> f64 {
    let dot = DotGeometry::default();
    let grid = Grid::around_dot(&dot, Resolution::default(), 5.0).unwrap();
    let mut field = PolarizationField::dot_indicator(&grid, &dot);
    let cfg = SolverConfig::new(10.0)
        .with_dt(0.01)
        .with_boundaries(Boundaries::REFLECTIVE);
    let mut solver = DiffusionSolver::new(&grid, cfg).unwrap();
    let before = field.total_spin();
    for _ in 0..steps {
        solver.advance(&mut field, 0.01, None).unwrap();
    }
    (field.total_spin() - before).abs() / before
}

/// `38 (1 - exp(-t/τ))` at 31 points spaced `0.2 s · τ/1.3 s`, i.e. the
/// 1.3 s curve on `0, 0.2, …, 6 s` and the others on the same scaled grid,
/// with optional relative Gaussian noise.
pub fn synthetic_rise(tau: f64, noise_rel: f64, seed: u64) -> DecaySeries {
    let amplitude = 38.0;
    let step = 0.2 * tau / 1.3;
    let mut rng = StdRng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let points = (0..=30)
        .map(|k| {
            let t = step * k as f64;
            let y = amplitude * (1.0 - (-t / tau).exp());
            let eps = if noise_rel > 0.0 {
                noise_rel * noise.sample(&mut rng)
            } else {
                0.0
            };
            (t, y * (1.0 + eps))
        })
        .collect();
    DecaySeries::new(points, YKind::ZeemanSplitting).unwrap()
}

/// Fitted τ over the true τ minus one.
pub fn rise_round_trip(tau: f64, noise_rel: f64, seed: u64) -> f64 {
    let fit = fit_exponential_rise(&synthetic_rise(tau, noise_rel, seed)).unwrap();
    fit.tau / tau - 1.0
}

/// Grid, time step and sampling shared by the diffusion-fit round trips.
/// The compact domain and 50 ms step keep a full fit to a few dozen
/// forward runs of about a second each.
pub fn fit_model() -> ForwardModel {
    let dot = DotGeometry::default();
    let grid = Grid::around_dot(&dot, Resolution::default(), 5.0).unwrap();
    ForwardModel::new(dot, grid, 10.0)
        .unwrap()
        .with_solver(SolverConfig::new(0.0).with_dt(0.05))
}

pub const FIT_TRUE_D: f64 = 2e-15;
pub const FIT_SCALE: f64 = 38.0;
pub const FIT_OFFSET: f64 = 60.0;
pub const FIT_BOUNDS: (f64, f64) = (1e-16, 1e-14);

/// `offset + scale·P(t; D)` at 0, 2, …, 120 s plus absolute Gaussian noise in µeV.
pub fn synthetic_zeeman(model: &mut ForwardModel, noise_uev: f64, seed: u64) -> DecaySeries {
    let t: Vec<f64> = (0..=60).map(|k| 2.0 * k as f64).collect();
    let p = model.curve(FIT_TRUE_D, &t).unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let points = t
        .iter()
        .zip(p)
        .map(|(&t, p)| {
            let eps = if noise_uev > 0.0 {
                noise_uev * noise.sample(&mut rng)
            } else {
                0.0
            };
            (t, FIT_OFFSET + FIT_SCALE * p + eps)
        })
        .collect();
    DecaySeries::new(points, YKind::ZeemanSplitting).unwrap()
}

/// Relative errors `(d, scale, offset)` of a diffusion fit to synthetic data.
pub fn diffusion_round_trip(model: &mut ForwardModel, noise_uev: f64, seed: u64) -> (f64, f64, f64) {
    let data = synthetic_zeeman(model, noise_uev, seed);
    let fit = model.fit(&data, FIT_BOUNDS, FitOptions::default()).unwrap();
    assert!(!fit.at_boundary(), "{fit:?}");
    (
        fit.d_qd / FIT_TRUE_D - 1.0,
        fit.scale / FIT_SCALE - 1.0,
        fit.offset / FIT_OFFSET - 1.0,
    )
}
