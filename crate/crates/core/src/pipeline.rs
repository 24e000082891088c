//! End-to-end clustering: dense subset, fission on it, then border assignment.

use std::time::{Duration, Instant};

use crate::dataset::{ClusterAssignment, Dataset};
use crate::density::{point_densities_with_grid, DEFAULT_GRID_SIZE};
use crate::distance::{pairwise_distances, DistanceMode, DistanceView};
use crate::error::{Error, Result, Warning};
use crate::fission::{rfc, FissionParams, TraceEvent};
use crate::noise::{identify_dense, SplitDiagnostics, MIN_POINTS};

/// Below this many points every point is treated as dense.
pub const NOISE_ID_MIN_POINTS: usize = MIN_POINTS + 1;

/// Gives every unlabeled point a cluster by repeatedly absorbing the
/// globally closest (labeled, unlabeled) pair into the labeled set.
///
/// Points labeled on entry keep their ids. Ties go to the smaller distance,
/// then the smaller labeled index, then the smaller unlabeled index.
pub fn assign_border(labels: &[Option<usize>], dv: &DistanceView<'_>) -> Result<ClusterAssignment> {
    let n = labels.len();
    if n != dv.len() {
        return Err(Error::InvalidInput(format!(
            "{n} labels for a view of {} points",
            dv.len()
        )));
    }
    let assigned: Vec<usize> = (0..n).filter(|&i| labels[i].is_some()).collect();
    if assigned.is_empty() {
        return Err(Error::InvalidInput("no labeled point to grow from".into()));
    }
    let mut out: Vec<usize> = labels.iter().map(|l| l.unwrap_or(usize::MAX)).collect();
    let dense_mask: Vec<bool> = labels.iter().map(Option::is_some).collect();
    let mut open: Vec<usize> = (0..n).filter(|&i| labels[i].is_none()).collect();

    // Closest labeled point of every open point, as (distance, labeled index).
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(open.len());
    let mut row = Vec::new();
    for &u in &open {
        dv.row_into(u, &assigned, &mut row);
        let mut b = (f64::INFINITY, usize::MAX);
        for (&a, &d) in assigned.iter().zip(&row) {
            if d < b.0 || (d == b.0 && a < b.1) {
                b = (d, a);
            }
        }
        best.push(b);
    }

    while !open.is_empty() {
        let mut pick = 0;
        for t in 1..open.len() {
            let (d, a) = best[t];
            let (pd, pa) = best[pick];
            if d < pd || (d == pd && (a < pa || (a == pa && open[t] < open[pick]))) {
                pick = t;
            }
        }
        let u = open.swap_remove(pick);
        let (_, a) = best.swap_remove(pick);
        out[u] = out[a];
        dv.row_into(u, &open, &mut row);
        for (t, &d) in row.iter().enumerate() {
            let b = &mut best[t];
            if d < b.0 || (d == b.0 && u < b.1) {
                *b = (d, u);
            }
        }
    }

    let k = {
        let mut ids = out.clone();
        ids.sort_unstable();
        ids.dedup();
        if ids.last().is_some_and(|&m| m >= ids.len()) {
            // Ids are not contiguous; renumber by first appearance.
            return ClusterAssignment::from_raw(&out, dense_mask);
        }
        ids.len()
    };
    ClusterAssignment::from_parts(out, k, dense_mask)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SarfcOptions {
    pub distance_mode: DistanceMode,
    /// Robustness order override; `None` picks it from the dense-subset size.
    pub r: Option<usize>,
    /// When false, every point is clustered by fission directly.
    pub noise_id: bool,
    pub grid_size: usize,
}

impl Default for SarfcOptions {
    fn default() -> Self {
        Self {
            distance_mode: DistanceMode::Auto,
            r: None,
            noise_id: true,
            grid_size: DEFAULT_GRID_SIZE,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub density: Duration,
    pub noise_id: Duration,
    pub distances: Duration,
    pub fission: Duration,
    pub border: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.density + self.noise_id + self.distances + self.fission + self.border
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub assignment: ClusterAssignment,
    pub diagnostics: SplitDiagnostics,
    pub dense_count: usize,
    pub border_count: usize,
    pub params: FissionParams,
    pub fission_trace: Vec<TraceEvent>,
    pub timings: Timings,
    pub warnings: Vec<Warning>,
    pub distances_materialized: bool,
}

impl PipelineReport {
    pub fn k(&self) -> usize {
        self.assignment.k()
    }
}

/// Clusters `dataset` with default options.
pub fn sarfc(dataset: &Dataset) -> Result<PipelineReport> {
    sarfc_with(dataset, &SarfcOptions::default())
}

pub fn sarfc_with(dataset: &Dataset, opts: &SarfcOptions) -> Result<PipelineReport> {
    let n = dataset.len();
    let mut timings = Timings::default();
    let mut warnings = Vec::new();

    let (dense, diagnostics) = if opts.noise_id && n >= NOISE_ID_MIN_POINTS {
        let t = Instant::now();
        let profile =
            point_densities_with_grid(dataset, opts.grid_size).map_err(Error::at_stage("density"))?;
        timings.density = t.elapsed();
        warnings.extend_from_slice(profile.warnings());
        let t = Instant::now();
        let (dense, diag, w) = identify_dense(&profile).map_err(Error::at_stage("noise_id"))?;
        timings.noise_id = t.elapsed();
        warnings.extend(w);
        (dense, diag)
    } else {
        if opts.noise_id {
            warnings.push(Warning::NoiseIdSkipped { n });
        }
        let diag = SplitDiagnostics {
            skipped: true,
            ..SplitDiagnostics::default()
        };
        ((0..n).collect(), diag)
    };

    let t = Instant::now();
    let dv = pairwise_distances(dataset, opts.distance_mode).map_err(Error::at_stage("distances"))?;
    timings.distances = t.elapsed();

    let t = Instant::now();
    let outcome = rfc(&dense, &dv, opts.r, None).map_err(Error::at_stage("fission"))?;
    timings.fission = t.elapsed();

    let t = Instant::now();
    let mut partial = vec![None; n];
    for (&p, &l) in outcome.members.iter().zip(&outcome.labels) {
        partial[p] = Some(l);
    }
    let bordered = assign_border(&partial, &dv).map_err(Error::at_stage("border"))?;
    timings.border = t.elapsed();
    let assignment = ClusterAssignment::from_raw(bordered.labels(), bordered.dense_mask().to_vec())?;

    let dense_count = outcome.members.len();
    Ok(PipelineReport {
        assignment,
        diagnostics,
        dense_count,
        border_count: n - dense_count,
        params: outcome.params,
        fission_trace: outcome.trace,
        timings,
        warnings,
        distances_materialized: dv.is_materialized(),
    })
}
