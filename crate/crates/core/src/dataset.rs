//! Points, ground-truth labels and cluster assignments.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// `n` points in `d`-dimensional space, stored row-major, with optional
/// ground-truth class ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    n: usize,
    d: usize,
    coords: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Builds a dataset from a row-major coordinate buffer.
    pub fn from_flat(
        name: impl Into<String>,
        d: usize,
        coords: Vec<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(d) {
            return Err(Error::InvalidInput(format!(
                "coordinate buffer of length {} does not hold whole {d}-dimensional points",
                coords.len()
            )));
        }
        let n = coords.len() / d;
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite coordinate at point {}, dimension {}",
                pos / d,
                pos % d
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::InvalidInput(format!(
                    "{} labels for {n} points",
                    labels.len()
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            d,
            coords,
            labels,
        })
    }

    /// Builds a dataset from one vector per point.
    pub fn from_rows(
        name: impl Into<String>,
        rows: &[Vec<f64>],
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::InvalidInput(format!(
                "row {bad} has {} coordinates, expected {d}",
                rows[bad].len()
            )));
        }
        let coords = rows.iter().flatten().copied().collect();
        Self::from_flat(name, d, coords, labels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of features per point.
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// Row-major coordinate buffer.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Values of one feature across all points.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.points().map(|p| p[j]).collect()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Number of distinct ground-truth classes, if labels are present.
    pub fn true_k(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| distinct_count(l))
    }

    /// Returns a copy with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_flat(
            self.name.clone(),
            self.d,
            self.coords.iter().map(|c| c * factor).collect(),
            self.labels.clone(),
        )
    }

    /// Returns the points reordered so that new point `i` is old point `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        let coords = order
            .iter()
            .flat_map(|&i| self.point(i).iter().copied())
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| order.iter().map(|&i| l[i]).collect());
        Self::from_flat(self.name.clone(), self.d, coords, labels)
    }
}

fn distinct_count(labels: &[usize]) -> usize {
    let mut seen = labels.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Per-point cluster labels in `0..k` plus the dense-subset membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
    dense_mask: Vec<bool>,
}

impl ClusterAssignment {
    /// Canonicalizes arbitrary cluster ids: clusters are numbered in order of
    /// their smallest member index.
    pub fn from_raw(raw: &[usize], dense_mask: Vec<bool>) -> Result<Self> {
        if raw.len() != dense_mask.len() {
            return Err(Error::InvalidInput("label and mask length mismatch".into()));
        }
        let mut remap = HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|&l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        Ok(Self {
            k: remap.len(),
            labels,
            dense_mask,
        })
    }

    /// Wraps labels already in `0..k`, every id used.
    pub fn from_parts(labels: Vec<usize>, k: usize, dense_mask: Vec<bool>) -> Result<Self> {
        if labels.len() != dense_mask.len() {
            return Err(Error::InvalidInput("label and mask length mismatch".into()));
        }
        let mut used = vec![false; k];
        for &l in &labels {
            match used.get_mut(l) {
                Some(u) => *u = true,
                None => return Err(Error::InvalidInput(format!("label {l} outside 0..{k}"))),
            }
        }
        if used.iter().any(|u| !u) {
            return Err(Error::InvalidInput(format!("not every label in 0..{k} is used")));
        }
        Ok(Self {
            labels,
            k,
            dense_mask,
        })
    }

    /// Every point dense, labels canonicalized.
    pub fn all_dense(raw: &[usize]) -> Self {
        Self::from_raw(raw, vec![true; raw.len()]).expect("lengths match")
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dense_mask(&self) -> &[bool] {
        &self.dense_mask
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Members of each cluster, in cluster-id order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_coordinates() {
        let err = Dataset::from_rows("x", &[vec![0.0, f64::NAN]], None).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        assert!(Dataset::from_rows("x", &[vec![f64::INFINITY]], None).is_err());
    }

    #[test]
    fn rejects_ragged_rows_and_bad_labels() {
        assert!(Dataset::from_rows("x", &[vec![0.0, 1.0], vec![2.0]], None).is_err());
        assert!(Dataset::from_rows("x", &[vec![0.0]], Some(vec![0, 1])).is_err());
        assert!(Dataset::from_rows("x", &[], None).is_err());
    }

    #[test]
    fn canonical_labels_follow_first_appearance() {
        let a = ClusterAssignment::all_dense(&[7, 7, 3, 9, 3]);
        assert_eq!(a.labels(), &[0, 0, 1, 2, 1]);
        assert_eq!(a.k(), 3);
        assert_eq!(a.clusters(), vec![vec![0, 1], vec![2, 4], vec![3]]);
    }

    #[test]
    fn true_k_counts_distinct_labels() {
        let ds = Dataset::from_rows("x", &[vec![0.0], vec![1.0], vec![2.0]], Some(vec![4, 1, 4]))
            .unwrap();
        assert_eq!(ds.true_k(), Some(2));
    }
}
