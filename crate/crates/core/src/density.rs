//! Per-point density through the heat-diffusion view of kernel density
//! estimation.
//!
//! Each feature is min-max normalized to `[0, 1]` and binned onto a grid of
//! `N` cells. The binned sample gives the cosine coefficients
//! `a_k = (1/n) Σ cos(kπ x_i)` through one DCT-II. Diffusing for time `t`
//! damps mode `k` by `exp(-k²π²t/2)`, and a DCT-III brings the damped series
//! back onto the grid:
//!
//! ```text
//! f(x; t) = a_0 + 2 Σ_{k≥1} a_k exp(-k²π²t/2) cos(kπx)
//! ```
//!
//! The diffusion time `t` is chosen by the improved Sheather–Jones fixed
//! point `t = ξ γ^[l](t)` with `l = 7` stages.
//!
//! A point's density is the product over features of the 1-D estimates at
//! its coordinates, each with its own bandwidth.

use std::f64::consts::PI;

use rustdct::DctPlanner;

use crate::dataset::Dataset;
use crate::error::{Error, Result, Warning};

/// Default number of grid cells and cosine modes per feature.
pub const DEFAULT_GRID_SIZE: usize = 1 << 14;

/// Bracket of the fixed-point search, in normalized units.
pub const T_MIN: f64 = 1e-12;
pub const T_MAX: f64 = 0.5;

/// Largest accepted `|t − ξγ(t)|` at the returned root.
pub const SOLVER_TOLERANCE: f64 = 1e-9;

const STAGES: i32 = 7;
const MAX_BISECTIONS: usize = 200;

/// Squared bandwidth in the unit-normalized domain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BandwidthSolution {
    pub t: f64,
    pub iterations: usize,
    /// `|t − ξγ(t)|` at termination; zero-valued when `fallback` is set.
    pub residual: f64,
    /// True when the fixed point could not be bracketed and the
    /// Gaussian-reference rule supplied `t`.
    pub fallback: bool,
}

/// Density values on the cell centers `(m + 0.5) / N` of a uniform grid over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeGrid {
    values: Vec<f64>,
}

impl KdeGrid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid abscissa of cell `m`.
    pub fn center(&self, m: usize) -> f64 {
        (m as f64 + 0.5) / self.values.len() as f64
    }

    /// Linear interpolation between cell centers, constant beyond the outer
    /// centers.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let pos = x * n as f64 - 0.5;
        if pos <= 0.0 {
            return self.values[0];
        }
        let lo = pos.floor() as usize;
        if lo >= n - 1 {
            return self.values[n - 1];
        }
        let frac = pos - lo as f64;
        self.values[lo] * (1.0 - frac) + self.values[lo + 1] * frac
    }
}

/// Cosine coefficients `a_k`, `k = 0..N`, of a sample in `[0, 1]` after
/// binning it onto `N` cells.
pub fn cosine_coefficients(samples: &[f64], grid_size: usize) -> Vec<f64> {
    let mut weights = histogram(samples, grid_size);
    DctPlanner::new()
        .plan_dct2(grid_size)
        .process_dct2(&mut weights);
    weights
}

/// Relative frequency of each of `grid_size` equal cells over `[0, 1]`.
pub fn histogram(samples: &[f64], grid_size: usize) -> Vec<f64> {
    let mut weights = vec![0.0; grid_size];
    let scale = grid_size as f64;
    for &x in samples {
        let cell = ((x * scale) as usize).min(grid_size - 1);
        weights[cell] += 1.0;
    }
    let n = samples.len() as f64;
    weights.iter_mut().for_each(|w| *w /= n);
    weights
}

/// Min-max normalization to `[0, 1]`; `None` when the range is zero.
pub fn unit_normalize(samples: &[f64]) -> Option<Vec<f64>> {
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let range = hi - lo;
    if range.is_nan() || range <= 0.0 {
        return None;
    }
    Some(
        samples
            .iter()
            .map(|&x| ((x - lo) / range).clamp(0.0, 1.0))
            .collect(),
    )
}

/// Improved Sheather–Jones bandwidth of a 1-D sample.
///
/// The sample is min-max normalized first, so the returned `t` is invariant
/// under affine rescaling of the input.
pub fn sj_bandwidth(samples: &[f64]) -> Result<BandwidthSolution> {
    sj_bandwidth_with_grid(samples, DEFAULT_GRID_SIZE)
}

pub fn sj_bandwidth_with_grid(samples: &[f64], grid_size: usize) -> Result<BandwidthSolution> {
    check_grid(grid_size)?;
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    let unit = unit_normalize(samples)
        .ok_or_else(|| Error::DegenerateData("all samples identical".into()))?;
    let coeffs = cosine_coefficients(&unit, grid_size);
    Ok(solve_bandwidth(&unit, &coeffs))
}

fn solve_bandwidth(unit: &[f64], coeffs: &[f64]) -> BandwidthSolution {
    let distinct = distinct_count(unit) as f64;
    let a2: Vec<f64> = coeffs[1..].iter().map(|a| a * a).collect();
    let g = |t: f64| t - fixed_point_map(t, distinct, &a2);

    if let Some((mut lo, mut hi)) = first_bracket(&g) {
        let mut iterations = 0;
        while iterations < MAX_BISECTIONS && hi - lo > f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            let g_mid = g(mid);
            iterations += 1;
            if !g_mid.is_finite() {
                break;
            }
            if g_mid < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let residual = g(t).abs();
        if residual <= SOLVER_TOLERANCE {
            return BandwidthSolution {
                t,
                iterations,
                residual,
                fallback: false,
            };
        }
    }
    BandwidthSolution {
        t: silverman_t(unit),
        iterations: 0,
        residual: 0.0,
        fallback: true,
    }
}

/// Smallest interval `[lo, hi]` of a log-spaced scan of `[T_MIN, T_MAX]`
/// where `g` changes sign from negative to positive. At large `t` the
/// functionals underflow and `g` stops being finite, so the scan only
/// accepts finite endpoints.
fn first_bracket(g: &impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    const STEPS: i32 = 96;
    let ratio = (T_MAX / T_MIN).powf(1.0 / f64::from(STEPS));
    let mut lo = T_MIN;
    let mut g_lo = g(lo);
    for j in 1..=STEPS {
        let hi = if j == STEPS { T_MAX } else { T_MIN * ratio.powi(j) };
        let g_hi = g(hi);
        if g_lo.is_finite() && g_hi.is_finite() && g_lo < 0.0 && g_hi > 0.0 {
            return Some((lo, hi));
        }
        lo = hi;
        g_lo = g_hi;
    }
    None
}

/// `ξ γ^[l](t)`: the stage-`l` plug-in estimate of the optimal squared
/// bandwidth, given squared cosine coefficients `a2[k-1] = a_k²`.
fn fixed_point_map(t: f64, n: f64, a2: &[f64]) -> f64 {
    let functional = |s: i32, time: f64| -> f64 {
        let sum: f64 = a2
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let i = ((k + 1) * (k + 1)) as f64;
                i.powi(s) * a * (-i * PI * PI * time).exp()
            })
            .sum();
        2.0 * PI.powi(2 * s) * sum
    };
    let mut f = functional(STAGES, t);
    for s in (2..STAGES).rev() {
        let k0 = (1..2 * s).step_by(2).map(f64::from).product::<f64>() / (2.0 * PI).sqrt();
        let c = (1.0 + 0.5f64.powf(f64::from(s) + 0.5)) / 3.0;
        let time = (2.0 * c * k0 / n / f).powf(2.0 / (3.0 + 2.0 * f64::from(s)));
        f = functional(s, time);
    }
    (2.0 * n * PI.sqrt() * f).powf(-0.4)
}

/// Gaussian-reference (Silverman) squared bandwidth.
pub fn silverman_t(unit: &[f64]) -> f64 {
    let n = unit.len() as f64;
    let mean = unit.iter().sum::<f64>() / n;
    let var = unit.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let sd = var.sqrt();
    let mut sorted = unit.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * n.powf(-0.2);
    (h * h).max(T_MIN)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn distinct_count(values: &[f64]) -> usize {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 2 || !grid_size.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "grid size {grid_size} must be a power of two >= 2"
        )));
    }
    Ok(())
}

/// Diffusion KDE of a sample already normalized to `[0, 1]`, evaluated on
/// `grid_size` cell centers. Negative values from series truncation are
/// clamped to zero.
pub fn diffusion_kde_1d(samples: &[f64], t: f64, grid_size: usize) -> Result<KdeGrid> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "diffusion time must be positive, got {t}"
        )));
    }
    check_grid(grid_size)?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    if samples.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidInput("samples must lie in [0, 1]".into()));
    }
    let coeffs = cosine_coefficients(samples, grid_size);
    Ok(kde_from_coefficients(&coeffs, t))
}

fn kde_from_coefficients(coeffs: &[f64], t: f64) -> KdeGrid {
    // DCT-III halves its first input, so every mode enters with weight 2.
    let mut series: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let k = k as f64;
            2.0 * a * (-k * k * PI * PI * t / 2.0).exp()
        })
        .collect();
    DctPlanner::new()
        .plan_dct3(series.len())
        .process_dct3(&mut series);
    series.iter_mut().for_each(|v| *v = v.max(0.0));
    KdeGrid { values: series }
}

/// Densities `ρ` and their descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    rho: Vec<f64>,
    rho_sorted: Vec<f64>,
    sort_perm: Vec<usize>,
    bandwidths: Vec<Option<BandwidthSolution>>,
    warnings: Vec<Warning>,
}

impl DensityProfile {
    /// Wraps precomputed densities. Ties in the descending order are broken
    /// by point index.
    pub fn from_rho(rho: Vec<f64>) -> Result<Self> {
        if rho.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidInput(
                "densities must be finite and non-negative".into(),
            ));
        }
        let mut sort_perm: Vec<usize> = (0..rho.len()).collect();
        sort_perm.sort_by(|&a, &b| rho[b].total_cmp(&rho[a]).then(a.cmp(&b)));
        let rho_sorted = sort_perm.iter().map(|&i| rho[i]).collect();
        Ok(Self {
            rho,
            rho_sorted,
            sort_perm,
            bandwidths: Vec::new(),
            warnings: Vec::new(),
        })
    }

    /// `ρ_i` per point.
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// `ρ′`: densities in non-increasing order.
    pub fn rho_sorted(&self) -> &[f64] {
        &self.rho_sorted
    }

    /// `sort_perm[rank]` is the point holding the `rank`-th largest density.
    pub fn sort_perm(&self) -> &[usize] {
        &self.sort_perm
    }

    /// Per-feature bandwidths; `None` for zero-range features.
    pub fn bandwidths(&self) -> &[Option<BandwidthSolution>] {
        &self.bandwidths
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

/// Product-of-marginals diffusion density at every point.
pub fn point_densities(dataset: &Dataset) -> Result<DensityProfile> {
    point_densities_with_grid(dataset, DEFAULT_GRID_SIZE)
}

pub fn point_densities_with_grid(dataset: &Dataset, grid_size: usize) -> Result<DensityProfile> {
    check_grid(grid_size)?;
    let n = dataset.len();
    let mut rho = vec![1.0; n];
    let mut bandwidths = Vec::with_capacity(dataset.dim());
    let mut warnings = Vec::new();
    for dim in 0..dataset.dim() {
        let Some(unit) = unit_normalize(&dataset.column(dim)) else {
            warnings.push(Warning::ZeroRangeDimension { dim });
            bandwidths.push(None);
            continue;
        };
        let coeffs = cosine_coefficients(&unit, grid_size);
        let bw = solve_bandwidth(&unit, &coeffs);
        if bw.fallback {
            warnings.push(Warning::BandwidthFallback { dim, t: bw.t });
        }
        let grid = kde_from_coefficients(&coeffs, bw.t);
        for (r, &x) in rho.iter_mut().zip(&unit) {
            *r *= grid.eval(x);
        }
        bandwidths.push(Some(bw));
    }
    let mut profile = DensityProfile::from_rho(rho)?;
    profile.bandwidths = bandwidths;
    profile.warnings = warnings;
    Ok(profile)
}
