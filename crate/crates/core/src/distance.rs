//! Pairwise distance access.
//!
//! A [`DistanceView`] answers `f(x_i, x_j)` either from a materialized
//! symmetric matrix or by recomputing rows from coordinates on demand. Every
//! consumer in this crate reads distances one row at a time, so the streamed
//! form never holds more than a single row block.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Largest point count for which a full matrix may be materialized.
pub const FULL_MATRIX_LIMIT: usize = 20_000;

/// [`DistanceMode::Auto`] materializes the matrix up to this many points.
pub const AUTO_FULL_LIMIT: usize = 4_096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    #[inline]
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let t = x - y;
                    t * t
                })
                .sum::<f64>()
                .sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    Full,
    Streamed,
    #[default]
    Auto,
}

#[derive(Debug, Clone)]
enum Storage {
    Full(Vec<f64>),
    Streamed,
}

/// Symmetric distance access over the points of one dataset.
#[derive(Debug, Clone)]
pub struct DistanceView<'a> {
    data: &'a Dataset,
    metric: Metric,
    storage: Storage,
}

/// Builds a distance view over `dataset`.
///
/// `Full` is refused above [`FULL_MATRIX_LIMIT`] points.
pub fn pairwise_distances(dataset: &Dataset, mode: DistanceMode) -> Result<DistanceView<'_>> {
    DistanceView::new(dataset, Metric::Euclidean, mode)
}

impl<'a> DistanceView<'a> {
    pub fn new(data: &'a Dataset, metric: Metric, mode: DistanceMode) -> Result<Self> {
        if data.coords().iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        let n = data.len();
        let full = match mode {
            DistanceMode::Full if n > FULL_MATRIX_LIMIT => {
                return Err(Error::InvalidParameter(format!(
                    "full distance matrix refused for n = {n} > {FULL_MATRIX_LIMIT}; use streamed mode"
                )))
            }
            DistanceMode::Full => true,
            DistanceMode::Streamed => false,
            DistanceMode::Auto => n <= AUTO_FULL_LIMIT,
        };
        let storage = if full {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                let pi = data.point(i);
                for j in (i + 1)..n {
                    let v = metric.eval(pi, data.point(j));
                    m[i * n + j] = v;
                    m[j * n + i] = v;
                }
            }
            Storage::Full(m)
        } else {
            Storage::Streamed
        };
        Ok(Self {
            data,
            metric,
            storage,
        })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.data
    }

    /// True when the full `n × n` matrix is held in memory.
    pub fn is_materialized(&self) -> bool {
        matches!(self.storage, Storage::Full(_))
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Full(m) => m[i * self.data.len() + j],
            Storage::Streamed => {
                if i == j {
                    0.0
                } else {
                    self.metric.eval(self.data.point(i), self.data.point(j))
                }
            }
        }
    }

    /// Writes `f(x_row, x_c)` for every `c` in `cols` into `out`.
    pub fn row_into(&self, row: usize, cols: &[usize], out: &mut Vec<f64>) {
        out.clear();
        match &self.storage {
            Storage::Full(m) => {
                let n = self.data.len();
                let r = &m[row * n..(row + 1) * n];
                out.extend(cols.iter().map(|&c| r[c]));
            }
            Storage::Streamed => self.stream_row(row, cols.iter().copied(), out),
        }
    }

    fn stream_row(&self, row: usize, cols: impl Iterator<Item = usize>, out: &mut Vec<f64>) {
        let Metric::Euclidean = self.metric;
        let coords = self.data.coords();
        let d = self.data.dim();
        let p = self.data.point(row);
        if d == 2 {
            // The common planar case, without the per-pair slice loop.
            let (x, y) = (p[0], p[1]);
            out.extend(cols.map(|c| {
                let (dx, dy) = (coords[2 * c] - x, coords[2 * c + 1] - y);
                (dx * dx + dy * dy).sqrt()
            }));
        } else {
            out.extend(cols.map(|c| self.metric.eval(p, &coords[c * d..(c + 1) * d])));
        }
    }

    /// Writes the whole row `f(x_row, ·)` into `out`.
    pub fn full_row_into(&self, row: usize, out: &mut Vec<f64>) {
        out.clear();
        match &self.storage {
            Storage::Full(m) => {
                let n = self.data.len();
                out.extend_from_slice(&m[row * n..(row + 1) * n]);
            }
            Storage::Streamed => self.stream_row(row, 0..self.data.len(), out),
        }
    }
}

/// Distance from each point to its `r`-th nearest neighbor (self excluded).
pub fn rth_neighbor_distance(dv: &DistanceView<'_>, r: usize) -> Result<Vec<f64>> {
    let all: Vec<usize> = (0..dv.len()).collect();
    rth_neighbor_distance_within(dv, &all, r)
}

/// [`rth_neighbor_distance`] restricted to the points of `subset`; entry `t`
/// belongs to `subset[t]`.
pub fn rth_neighbor_distance_within(
    dv: &DistanceView<'_>,
    subset: &[usize],
    r: usize,
) -> Result<Vec<f64>> {
    let m = subset.len();
    if r == 0 || r >= m {
        return Err(Error::InvalidParameter(format!(
            "neighbor order r = {r} must satisfy 1 <= r <= {}",
            m.saturating_sub(1)
        )));
    }
    let mut row = Vec::with_capacity(m);
    let mut smallest: Vec<f64> = Vec::with_capacity(r + 1);
    let mut out = Vec::with_capacity(m);
    for (t, &i) in subset.iter().enumerate() {
        dv.row_into(i, subset, &mut row);
        smallest.clear();
        for (u, &v) in row.iter().enumerate() {
            if u == t {
                continue;
            }
            if smallest.len() == r && v >= smallest[r - 1] {
                continue;
            }
            let pos = smallest.partition_point(|&s| s <= v);
            smallest.insert(pos, v);
            smallest.truncate(r);
        }
        out.push(smallest[r - 1]);
    }
    Ok(out)
}
