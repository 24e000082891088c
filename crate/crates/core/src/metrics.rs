//! External evaluation against ground truth: matched accuracy, macro F1,
//! adjusted Rand index and normalized mutual information.

use std::collections::HashMap;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::percent1;

/// Co-occurrence counts of predicted (rows) and true (columns) clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    n: u64,
}

impl ContingencyTable {
    pub fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::InvalidInput(format!(
                "{} predicted labels for {} true labels",
                pred.len(),
                truth.len()
            )));
        }
        let rows = dense_ids(pred);
        let cols = dense_ids(truth);
        let kp = rows.iter().max().map_or(0, |m| m + 1);
        let kt = cols.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![vec![0u64; kt]; kp];
        for (&r, &c) in rows.iter().zip(&cols) {
            counts[r][c] += 1;
        }
        Ok(Self {
            counts,
            n: pred.len() as u64,
        })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k_pred(&self) -> usize {
        self.counts.len()
    }

    pub fn k_true(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut s = vec![0u64; self.k_true()];
        for r in &self.counts {
            for (c, &v) in r.iter().enumerate() {
                s[c] += v;
            }
        }
        s
    }

    /// One-to-one matching with the most co-occurring points; among those,
    /// the one with the largest summed pair F1, so that the choice never
    /// depends on how clusters are numbered. Entry `p` is the true class
    /// paired with predicted cluster `p`, if any.
    pub fn matching(&self) -> Vec<Option<usize>> {
        let (kp, kt) = (self.k_pred(), self.k_true());
        if kp == 0 || kt == 0 {
            return vec![None; kp];
        }
        // weight = count * big + round(f1 * scale), where the F1 part of any
        // matching sums to less than `big`.
        let pairs = kp.min(kt) as f64;
        let scale = (4e18 / ((self.n as f64 + 1.0) * (pairs + 1.0))).min(2f64.powi(52)).floor();
        let big = (scale * (pairs + 1.0)) as i64;
        let rows = self.row_sums();
        let cols = self.col_sums();
        let w = |p: usize, t: usize| {
            let c = self.counts[p][t];
            let f1 = 2.0 * c as f64 / (rows[p] + cols[t]) as f64;
            c as i64 * big + (f1 * scale).round() as i64
        };
        if kp <= kt {
            let m = Matrix::from_fn(kp, kt, |(p, t)| w(p, t));
            let (_, assign) = kuhn_munkres(&m);
            assign.into_iter().map(Some).collect()
        } else {
            let m = Matrix::from_fn(kt, kp, |(t, p)| w(p, t));
            let (_, assign) = kuhn_munkres(&m);
            let mut out = vec![None; kp];
            for (t, p) in assign.into_iter().enumerate() {
                out[p] = Some(t);
            }
            out
        }
    }
}

/// Maps arbitrary ids to `0..k` in ascending id order.
fn dense_ids(labels: &[usize]) -> Vec<usize> {
    let mut ids = labels.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let pos: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    labels.iter().map(|l| pos[l]).collect()
}

fn comb2(x: u64) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Fraction of points whose cluster is matched to their true class.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    Ok(accuracy_from(&table))
}

fn accuracy_from(table: &ContingencyTable) -> f64 {
    if table.n == 0 {
        return 1.0;
    }
    let hit: u64 = table
        .matching()
        .iter()
        .enumerate()
        .filter_map(|(p, t)| t.map(|t| table.counts[p][t]))
        .sum();
    hit as f64 / table.n as f64
}

/// Mean over true classes of the F1 of each class against its matched
/// cluster; unmatched classes score 0.
pub fn f1_score(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    Ok(f1_from(&table))
}

fn f1_from(table: &ContingencyTable) -> f64 {
    let kt = table.k_true();
    if kt == 0 {
        return 1.0;
    }
    let rows = table.row_sums();
    let cols = table.col_sums();
    let mut total = 0.0;
    for (p, t) in table.matching().into_iter().enumerate() {
        let Some(t) = t else { continue };
        let hit = table.counts[p][t] as f64;
        if hit == 0.0 {
            continue;
        }
        let precision = hit / rows[p] as f64;
        let recall = hit / cols[t] as f64;
        total += 2.0 * precision * recall / (precision + recall);
    }
    total / kt as f64
}

/// Adjusted Rand index.
pub fn ari(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    Ok(ari_from(&table))
}

fn ari_from(table: &ContingencyTable) -> f64 {
    let index: f64 = table.counts.iter().flatten().map(|&c| comb2(c)).sum();
    let a: f64 = table.row_sums().into_iter().map(comb2).sum();
    let b: f64 = table.col_sums().into_iter().map(comb2).sum();
    let pairs = comb2(table.n);
    if pairs == 0.0 {
        return 1.0;
    }
    let expected = a * b / pairs;
    let max = (a + b) / 2.0;
    if max == expected {
        // Both partitions trivial in the same way.
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// Mutual information normalized by the geometric mean of the entropies.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    Ok(nmi_from(&table))
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn nmi_from(table: &ContingencyTable) -> f64 {
    if table.n == 0 {
        return 1.0;
    }
    let n = table.n as f64;
    let rows = table.row_sums();
    let cols = table.col_sums();
    let hp = entropy(&rows, n);
    let ht = entropy(&cols, n);
    if hp == 0.0 && ht == 0.0 {
        return 1.0;
    }
    if hp == 0.0 || ht == 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for (p, row) in table.counts.iter().enumerate() {
        for (t, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            mi += c / n * (n * c / (rows[p] as f64 * cols[t] as f64)).ln();
        }
    }
    (mi / (hp * ht).sqrt()).clamp(0.0, 1.0)
}

/// One results row: counts plus the four scores as fractions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub dataset: String,
    pub k_true: usize,
    pub k_pred: usize,
    pub acc: f64,
    pub f1: f64,
    pub ari: f64,
    pub nmi: f64,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "dataset,k_true,k_pred,acc,f1,ari,nmi";

    pub fn evaluate(dataset: impl Into<String>, pred: &[usize], truth: &[usize]) -> Result<Self> {
        let table = ContingencyTable::new(pred, truth)?;
        Ok(Self {
            dataset: dataset.into(),
            k_true: table.k_true(),
            k_pred: table.k_pred(),
            acc: accuracy_from(&table),
            f1: f1_from(&table),
            ari: ari_from(&table),
            nmi: nmi_from(&table),
        })
    }

    /// Scores as percentages with one decimal.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.dataset,
            self.k_true,
            self.k_pred,
            percent1(self.acc),
            percent1(self.f1),
            percent1(self.ari),
            percent1(self.nmi)
        )
    }
}
