//! Least-squares fitting: exponential rise/decay times and the diffusion
//! coefficient behind a measured decay.

mod diffusion;
mod exponential;
mod golden;

pub use diffusion::{fit_diffusion_coefficient, DiffusionFit, FitOptions, FitWarning, ForwardModel};
pub use exponential::{fit_exponential_decay, fit_exponential_rise, DecayFit, RiseFit};
pub use golden::golden_section_min;

/// Least-squares `y ≈ offset + scale·x`, returning `(scale, offset, sse)`.
/// A constant `x` leaves only the offset.
pub fn affine_least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let scale = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let offset = my - scale * mx;
    let sse = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - offset - scale * xi).powi(2))
        .sum();
    (scale, offset, sse)
}

/// True if all values agree to within `rel` of their largest magnitude.
pub(crate) fn is_flat(y: &[f64], rel: f64) -> bool {
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let scale = lo.abs().max(hi.abs());
    hi - lo <= rel * scale
}
