//! Empirical global order from a step-size scan against the exact propagator.

use super::Method;
use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::potentials::Problem;
use crate::solver::{itp_fixed_from, state_error, RunOptions, SpectralOracle};

/// Largest local-slope deviation that still counts as asymptotic.
pub const ASYMPTOTIC_RESIDUAL: f64 = 0.3;

/// Shortest window, as a ratio of step sizes, accepted when no clean decade exists.
pub const MIN_WINDOW_RATIO: f64 = 4.0;

/// Step sizes `h = T / M` for the scan.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderScan {
    pub t_final: f64,
    pub step_counts: Vec<usize>,
    /// Errors below this are treated as roundoff.
    pub error_floor: f64,
    /// Errors above this are treated as pre-asymptotic.
    pub error_ceiling: f64,
}

impl Default for OrderScan {
    fn default() -> Self {
        Self::geometric(10.0, 10, 30)
    }
}

impl OrderScan {
    /// `count + 1` step counts from `m0` upward, three per octave.
    pub fn geometric(t_final: f64, m0: usize, count: usize) -> Self {
        let mut step_counts: Vec<usize> =
            (0..=count).map(|j| (m0 as f64 * 2f64.powf(j as f64 / 3.0)).round() as usize).collect();
        step_counts.dedup();
        Self { t_final, step_counts, error_floor: 1e-12, error_ceiling: 1e-1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderMeasurement {
    pub slope: f64,
    /// Largest deviation of a local slope inside the window from `slope`.
    pub residual: f64,
    /// Set when no clean decade was found or the residual is too large.
    pub warning: bool,
    /// `(h_min, h_max)` of the fitted window.
    pub window: (f64, f64),
    /// Every `(h, error)` of the scan, `h` decreasing.
    pub points: Vec<(f64, f64)>,
}

fn initial_state(problem: &Problem) -> WaveFunction {
    let mut w = WaveFunction::from_fn(problem.grid().clone(), |x| (-(x - 0.5) * (x - 0.5)).exp());
    w.normalize().expect("a Gaussian is not zero");
    w
}

fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    // local slopes over roughly a factor of two in h
    let stride = 3.min(points.len() - 1);
    let residual = (0..points.len() - stride)
        .map(|i| ((ys[i] - ys[i + stride]) / (xs[i] - xs[i + stride]) - slope).abs())
        .fold(0.0, f64::max);
    (slope, residual)
}

/// Least-squares slope of log(error) against log(h).
///
/// The window is the smallest-`h` decade whose errors lie between the roundoff
/// floor and the ceiling and whose local slopes agree. High orders run into
/// roundoff before such a decade appears; the shortest accepted window is then
/// [`MIN_WINDOW_RATIO`] and the result carries a warning.
pub fn empirical_order(method: &Method, problem: &Problem, scan: &OrderScan) -> Result<OrderMeasurement> {
    empirical_order_from(method, problem, scan, initial_state(problem))
}

pub fn empirical_order_from(
    method: &Method,
    problem: &Problem,
    scan: &OrderScan,
    initial: WaveFunction,
) -> Result<OrderMeasurement> {
    let oracle = SpectralOracle::new(problem);
    let reference = oracle.propagate_normalized(&initial, scan.t_final)?;
    let options = RunOptions::default();
    let mut points = Vec::with_capacity(scan.step_counts.len());
    for &m in &scan.step_counts {
        let h = scan.t_final / m as f64;
        let report = itp_fixed_from(method, problem, h, scan.t_final, initial.clone(), &options)?;
        let err = state_error(&reference, &report.final_state);
        if err.is_finite() {
            points.push((h, err));
        }
    }

    let usable = |p: &(f64, f64)| p.1 > scan.error_floor && p.1 < scan.error_ceiling;
    // Smallest-h window spanning at least `ratio` in h whose local slopes agree.
    let clean_window = |ratio: f64| -> Option<(usize, usize)> {
        for end in (0..points.len()).rev() {
            let mut start = end;
            while start > 0 && points[start].0 < ratio * points[end].0 * (1.0 - 1e-9) {
                start -= 1;
            }
            if points[start].0 < ratio * points[end].0 * (1.0 - 1e-9) {
                return None;
            }
            if points[start..=end].iter().all(usable) && fit(&points[start..=end]).1 <= ASYMPTOTIC_RESIDUAL {
                return Some((start, end));
            }
        }
        None
    };
    let (warning, (start, end)) = if let Some(w) = clean_window(10.0) {
        (false, w)
    } else if let Some(w) = clean_window(MIN_WINDOW_RATIO) {
        (true, w)
    } else {
        // Nothing clean: fall back to the longest usable run.
        let mut longest = None::<(usize, usize)>;
        let mut i = 0;
        while i < points.len() {
            if usable(&points[i]) {
                let mut j = i;
                while j + 1 < points.len() && usable(&points[j + 1]) {
                    j += 1;
                }
                if longest.is_none_or(|(s, e)| j - i > e - s) {
                    longest = Some((i, j));
                }
                i = j + 1;
            } else {
                i += 1;
            }
        }
        match longest {
            Some(w) if w.1 > w.0 => (true, w),
            _ => {
                return Err(Error::Degenerate(format!(
                    "{}: no two scan points with errors between {:e} and {:e}",
                    method.name(),
                    scan.error_floor,
                    scan.error_ceiling
                )))
            }
        }
    };
    let (slope, residual) = fit(&points[start..=end]);
    let warning = warning || residual > ASYMPTOTIC_RESIDUAL;
    if warning {
        log::warn!("{}: order measurement may be pre-asymptotic (residual {residual:.3})", method.name());
    }
    Ok(OrderMeasurement { slope, residual, warning, window: (points[end].0, points[start].0), points })
}
