//! Self-adaptive split of the points into a dense subset and border points.
//!
//! The descending densities `ρ′` are smoothed with a trailing window of five
//! (`V`). A two-piece linear regression over `V` locates the head/tail trend
//! change `p_r` by minimizing the sum of absolute residuals. The threshold
//! itself is the largest turning angle of the `V` curve at or after `p_r`.
//!
//! All positions reported here (`p_r`, `p_max`, the SoAR candidates and the
//! turning-angle vertices) use 1-based ranks into `ρ′`, so `V` starts at
//! rank 5.

use std::fmt::Write as _;

use crate::density::DensityProfile;
use crate::error::{Error, Result, Warning};
use crate::format::sig6;

/// Width of the trailing mean window.
pub const WINDOW: usize = 5;

/// Points kept on each side of the regression split.
pub const BOUNDARY: usize = 5;

/// Smallest `n` for which the regression candidate range is non-empty.
pub const MIN_POINTS: usize = WINDOW + 2 * BOUNDARY;

/// Relative tolerance under which two SoAR values count as tied.
pub const SOAR_TIE_RTOL: f64 = 1e-9;

/// `V = {v_i : 5 ≤ i ≤ n}`, the window-5 trailing means of `ρ′`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedSequence {
    v: Vec<f64>,
}

impl SmoothedSequence {
    /// Wraps an already-smoothed sequence; `v[0]` is `v_5`.
    pub fn from_values(v: Vec<f64>) -> Self {
        Self { v }
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    /// Rank of the first element of `V`.
    pub fn offset(&self) -> usize {
        WINDOW
    }

    /// Rank `n` of the last element of `V`.
    pub fn last_rank(&self) -> usize {
        self.v.len() + WINDOW - 1
    }

    /// `v_i` for a 1-based rank `i ≥ 5`.
    pub fn at(&self, rank: usize) -> f64 {
        self.v[rank - WINDOW]
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

pub fn smooth_density(profile: &DensityProfile) -> Result<SmoothedSequence> {
    smooth_sorted(profile.rho_sorted())
}

/// Trailing window-5 means of a sequence.
pub fn smooth_sorted(rho_sorted: &[f64]) -> Result<SmoothedSequence> {
    if rho_sorted.len() < WINDOW {
        return Err(Error::DatasetTooSmall {
            needed: WINDOW,
            got: rho_sorted.len(),
        });
    }
    let v = rho_sorted
        .windows(WINDOW)
        .map(|w| w.iter().rev().sum::<f64>() / WINDOW as f64)
        .collect();
    Ok(SmoothedSequence { v })
}

/// Result of the two-piece regression scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SoarSplit {
    pub p_r: usize,
    /// `(p, R_p)` for every candidate `p`, ascending in `p`.
    pub curve: Vec<(usize, f64)>,
}

/// Scans every split `p ∈ [10, n − 5]`, fitting least-squares lines to
/// `(i, v_i)` on `5 ≤ i ≤ p` and on `p < i ≤ n`, and returns the `p` with the
/// smallest sum of absolute residuals (smallest `p` among ties).
pub fn soar_split(v: &SmoothedSequence) -> Result<SoarSplit> {
    let (first, last) = candidate_range(v)?;
    let values = v.values();
    let m = values.len();
    // Prefix sums over positions t = 0..m, abscissa x_t = t + 5.
    let mut sx = vec![0.0; m + 1];
    let mut sxx = vec![0.0; m + 1];
    let mut sy = vec![0.0; m + 1];
    let mut sxy = vec![0.0; m + 1];
    for (t, &y) in values.iter().enumerate() {
        let x = (t + WINDOW) as f64;
        sx[t + 1] = sx[t] + x;
        sxx[t + 1] = sxx[t] + x * x;
        sy[t + 1] = sy[t] + y;
        sxy[t + 1] = sxy[t] + x * y;
    }
    let fit = |a: usize, b: usize| -> (f64, f64) {
        let len = (b - a) as f64;
        let mx = (sx[b] - sx[a]) / len;
        let my = (sy[b] - sy[a]) / len;
        let cxx = (sxx[b] - sxx[a]) - len * mx * mx;
        let cxy = (sxy[b] - sxy[a]) - len * mx * my;
        let slope = if cxx > 0.0 { cxy / cxx } else { 0.0 };
        (my - slope * mx, slope)
    };
    let abs_residuals = |a: usize, b: usize, (icpt, slope): (f64, f64)| -> f64 {
        values[a..b]
            .iter()
            .enumerate()
            .map(|(off, &y)| (icpt + slope * (a + off + WINDOW) as f64 - y).abs())
            .sum()
    };
    let curve: Vec<(usize, f64)> = (first..=last)
        .map(|p| {
            let split = p - WINDOW + 1;
            let r = abs_residuals(0, split, fit(0, split)) + abs_residuals(split, m, fit(split, m));
            (p, r)
        })
        .collect();
    let p_r = argmin_with_ties(&curve, values);
    Ok(SoarSplit { p_r, curve })
}

/// Legal SoAR candidates `[10, n − 5]` in rank units.
pub fn candidate_range(v: &SmoothedSequence) -> Result<(usize, usize)> {
    let n = v.last_rank();
    let first = WINDOW + BOUNDARY;
    if v.is_empty() || n < first + BOUNDARY {
        return Err(Error::DatasetTooSmall {
            needed: MIN_POINTS,
            got: n.max(v.len()),
        });
    }
    Ok((first, n - BOUNDARY))
}

/// Smallest candidate whose score is within [`SOAR_TIE_RTOL`] of the minimum,
/// relative to the total absolute deviation of `v`.
pub fn argmin_with_ties(curve: &[(usize, f64)], v: &[f64]) -> usize {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let scale = v.iter().map(|y| (y - mean).abs()).sum::<f64>();
    let best = curve
        .iter()
        .map(|&(_, r)| r)
        .fold(f64::INFINITY, f64::min);
    let slack = SOAR_TIE_RTOL * scale;
    curve
        .iter()
        .find(|&&(_, r)| r <= best + slack)
        .map(|&(p, _)| p)
        .expect("non-empty candidate range")
}

/// Tangents of the turning angles of the `V` curve with unit abscissa step.
///
/// Entry `j` belongs to the vertex at rank `j + 6`:
/// `k_i = v_{i+1} − v_i` and `tan α_i = |(k_i − k_{i−1}) / (1 + k_i k_{i−1})|`.
/// Perpendicular chords yield `+∞`.
pub fn turning_angles(v: &SmoothedSequence) -> Result<Vec<f64>> {
    let values = v.values();
    if values.len() < 3 {
        return Err(Error::DatasetTooSmall {
            needed: WINDOW + 2,
            got: v.last_rank(),
        });
    }
    let slopes: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(slopes
        .windows(2)
        .map(|k| {
            let (prev, cur) = (k[0], k[1]);
            let den = 1.0 + cur * prev;
            if den == 0.0 {
                f64::INFINITY
            } else {
                ((cur - prev) / den).abs()
            }
        })
        .collect())
}

/// Rank of the vertex behind `tan_alpha[0]`.
pub const FIRST_ANGLE_RANK: usize = WINDOW + 1;

/// Outcome of the maximal-turning-angle search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PmaxSearch {
    pub p_max: usize,
    /// Argmax evaluations performed, including the accepted one.
    pub iterations: usize,
    /// True when every tangent at or after `p_r` was zero and `p_r` was
    /// returned as is.
    pub flat: bool,
}

/// Repeatedly takes the largest tangent (smallest rank among ties), discarding
/// it while its rank lies before `p_r`. The first maximum at rank `≥ p_r` is
/// accepted.
pub fn find_pmax(tan_alpha: &[f64], p_r: usize) -> Result<PmaxSearch> {
    if tan_alpha.is_empty() {
        return Err(Error::InvalidInput("empty tangent sequence".into()));
    }
    if tan_alpha.iter().any(|t| t.is_nan()) {
        return Err(Error::InvalidInput("NaN tangent".into()));
    }
    let mut order: Vec<usize> = (0..tan_alpha.len()).collect();
    order.sort_by(|&a, &b| tan_alpha[b].total_cmp(&tan_alpha[a]).then(a.cmp(&b)));
    for (step, &j) in order.iter().enumerate() {
        if tan_alpha[j] <= 0.0 {
            break;
        }
        let rank = j + FIRST_ANGLE_RANK;
        if rank >= p_r {
            return Ok(PmaxSearch {
                p_max: rank,
                iterations: step + 1,
                flat: false,
            });
        }
    }
    Ok(PmaxSearch {
        p_max: p_r,
        iterations: tan_alpha.len(),
        flat: true,
    })
}

/// Points whose density reaches `ρ′_{p_max}`, ascending by index.
pub fn dense_subset(profile: &DensityProfile, p_max: usize) -> Result<Vec<usize>> {
    let n = profile.len();
    if p_max == 0 || p_max > n {
        return Err(Error::InvalidParameter(format!(
            "p_max = {p_max} outside 1..={n}"
        )));
    }
    let threshold = profile.rho_sorted()[p_max - 1];
    Ok(profile
        .rho()
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r >= threshold)
        .map(|(i, _)| i)
        .collect())
}

/// Everything the dense/border split computed, for reporting and plots.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SplitDiagnostics {
    pub p_r: usize,
    pub p_max: usize,
    pub pmax_iterations: usize,
    pub rho_sorted: Vec<f64>,
    pub smoothed: Vec<f64>,
    pub soar_curve: Vec<(usize, f64)>,
    pub tan_alpha: Vec<f64>,
    /// True when noise identification was skipped and every point kept.
    pub skipped: bool,
}

impl SplitDiagnostics {
    pub fn rho_sorted_csv(&self) -> String {
        rank_csv("rank,rho_sorted", 1, &self.rho_sorted)
    }

    pub fn smoothed_csv(&self) -> String {
        rank_csv("rank,v", WINDOW, &self.smoothed)
    }

    pub fn tan_alpha_csv(&self) -> String {
        rank_csv("rank,tan_alpha", FIRST_ANGLE_RANK, &self.tan_alpha)
    }

    pub fn soar_csv(&self) -> String {
        let mut out = String::from("p,soar\n");
        for &(p, r) in &self.soar_curve {
            let _ = writeln!(out, "{p},{}", sig6(r));
        }
        out
    }
}

fn rank_csv(header: &str, first_rank: usize, values: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for (j, &v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", j + first_rank, sig6(v));
    }
    out
}

/// Runs the full dense/border split on a density profile.
pub fn identify_dense(
    profile: &DensityProfile,
) -> Result<(Vec<usize>, SplitDiagnostics, Vec<Warning>)> {
    let v = smooth_density(profile)?;
    let split = soar_split(&v)?;
    let tan_alpha = turning_angles(&v)?;
    let search = find_pmax(&tan_alpha, split.p_r)?;
    let mut warnings = Vec::new();
    if search.flat {
        warnings.push(Warning::FlatTurningAngles { p_r: split.p_r });
    }
    let dense = dense_subset(profile, search.p_max)?;
    let diagnostics = SplitDiagnostics {
        p_r: split.p_r,
        p_max: search.p_max,
        pmax_iterations: search.iterations,
        rho_sorted: profile.rho_sorted().to_vec(),
        smoothed: v.values().to_vec(),
        soar_curve: split.curve,
        tan_alpha,
        skipped: false,
    };
    Ok((dense, diagnostics, warnings))
}
