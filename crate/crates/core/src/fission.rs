//! Robust fission clustering.
//!
//! A set is split at its largest *crack*: over every point `x_i` of the set,
//! sort the distances `f(x_i, ·)` ascending and look at the gap spanned by
//! `r` consecutive steps, `S₁(i, k + r) − S₁(i, k)`. The largest such gap is
//! `MC^(r)`. Points at distance at most `S₁(i, k)` from `x_i` form one side,
//! the rest the other. Splitting repeats until no subset has
//! `MC^(r) > d₀^(r)`, where `d₀^(r)` is the largest `r`-th-nearest-neighbor
//! distance of the input set.
//!
//! With `r = 1` this is plain fission clustering. Larger `r` keeps groups of
//! up to `r` straggling points attached to their cluster.

use std::collections::BinaryHeap;
use std::cmp::{Ordering, Reverse};

use serde::Serialize;

use crate::dataset::ClusterAssignment;
use crate::distance::{rth_neighbor_distance_within, DistanceView};
use crate::error::{Error, Result};

/// Robustness order and the global stopping threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FissionParams {
    pub r: usize,
    pub d0_r: f64,
}

/// The point row and the sorted positions realizing `MC^(r)` of a set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrackWitness {
    /// Point whose sorted distance row holds the crack.
    pub row: usize,
    /// Point at sorted position `position` of that row.
    pub lo: usize,
    /// Point at sorted position `position + r`.
    pub hi: usize,
    /// 0-based sorted position of `lo` (position 0 is the row point itself).
    pub position: usize,
    /// `f(row, lo)`; the split threshold.
    pub lo_distance: f64,
    /// `f(row, hi) − f(row, lo)`.
    pub gap: f64,
}

/// Relative rounding allowance when comparing a crack with `d₀`.
///
/// A crack is the difference of two rounded distances, so on a set where
/// the crack equals `d₀` exactly it can come out a few ulps above it.
pub const CRACK_RTOL: f64 = 1e-12;

impl CrackWitness {
    /// True when the crack is wider than `d0` beyond rounding error.
    pub fn exceeds(&self, d0: f64) -> bool {
        self.gap > d0 + CRACK_RTOL * (self.lo_distance + self.gap)
    }
}

/// Robustness order by set size: 1 up to 1000 points, 2 up to 2000, else 3.
/// Never more than `n − 1`.
pub fn select_r(n: usize) -> usize {
    let r = match n {
        0..=1000 => 1,
        1001..=2000 => 2,
        _ => 3,
    };
    r.min(n.saturating_sub(1)).max(1)
}

/// `d₀^(r)` of a set: the largest distance from a member to its `r`-th
/// nearest neighbor within the set.
pub fn d0_r(subset: &[usize], dv: &DistanceView<'_>, r: usize) -> Result<f64> {
    Ok(rth_neighbor_distance_within(dv, subset, r)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Reusable buffers for scanning one sorted distance row without sorting it.
///
/// The row values lie in `[0, M]`. They are dropped into `m` equal buckets
/// of width `M / m`. The largest `r`-span gap is at least the largest
/// consecutive gap, which is at least `M / (m − 1)`, so it always straddles
/// a bucket boundary. Such a span starts among the last `r` entries of a
/// bucket and ends among the first `r` entries of a later one. Keeping only
/// those entries per bucket gives every candidate span with its exact sorted
/// position in `O(m·r)`.
struct RowScanner {
    r: usize,
    counts: Vec<u32>,
    // Per bucket, `r` slots for the smallest keys followed by `r` for the largest.
    slots: Vec<(f64, u32)>,
    known: Vec<(usize, f64, u32)>,
    reach: Vec<u32>,
    near: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, Copy)]
struct RowCrack {
    gap: f64,
    position: usize,
    lo: u32,
    hi: u32,
    lo_distance: f64,
}

#[inline]
fn key_lt(a: (f64, u32), b: (f64, u32)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

impl RowScanner {
    fn new(r: usize) -> Self {
        Self {
            r,
            counts: Vec::new(),
            slots: Vec::new(),
            known: Vec::new(),
            reach: Vec::new(),
            near: Vec::new(),
        }
    }

    /// True when no `r`-span gap of `row` exceeds `gap`.
    ///
    /// With buckets of width `w < gap / 2`, a span starting in bucket `b`
    /// ends no later than bucket `b + 1` whenever that bucket holds at least
    /// `r` values, so it is shorter than `2w`. Only spans starting in a
    /// bucket followed by a thin one need their exact length; those are
    /// measured on the few values of the buckets they can reach.
    fn cannot_exceed(&mut self, row: &[f64], gap: f64) -> bool {
        let max = row.iter().copied().fold(0.0, f64::max);
        if max <= gap {
            return true;
        }
        if gap <= 0.0 {
            return false;
        }
        let inv_width = 2.0 / (gap * (1.0 - 1e-9));
        let buckets = (max * inv_width) as usize + 1;
        if buckets > 4 * row.len() {
            return false;
        }
        let bucket = |d: f64| ((d * inv_width) as usize).min(buckets - 1);
        self.counts.clear();
        self.counts.resize(buckets, 0);
        for &d in row {
            self.counts[bucket(d)] += 1;
        }

        // reach[b]: last bucket a span starting in b can end in, for thin b.
        let need = self.r as u32;
        self.reach.clear();
        self.reach.resize(buckets, u32::MAX);
        let mut gathered = 0usize;
        let mut b = 0;
        while b + 1 < buckets {
            if self.counts[b] == 0 || self.counts[b + 1] >= need {
                b += 1;
                continue;
            }
            let mut e = b + 1;
            let mut after = self.counts[e];
            while after < need && e + 1 < buckets {
                e += 1;
                after += self.counts[e];
            }
            self.reach[b] = e as u32;
            gathered += (b..=e).map(|j| self.counts[j] as usize).sum::<usize>();
            b += 1;
        }
        if gathered == 0 {
            return true;
        }
        if gathered > row.len() / 4 {
            return false;
        }
        let mut marked = vec![false; buckets];
        for (b, &e) in self.reach.iter().enumerate() {
            if e != u32::MAX {
                marked[b..=e as usize].iter_mut().for_each(|m| *m = true);
            }
        }
        self.near.clear();
        self.near.extend(
            row.iter()
                .map(|&d| (d, bucket(d)))
                .filter(|&(_, b)| marked[b]),
        );
        self.near.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let r = self.r;
        self.near.iter().enumerate().all(|(i, &(d, b))| {
            let e = self.reach[b];
            match self.near.get(i + r) {
                Some(&(dn, bn)) if e != u32::MAX && bn <= e as usize => dn - d <= gap,
                _ => true,
            }
        })
    }

    /// Largest `r`-span gap of `row`, sorted by `(distance, position in row)`;
    /// smallest sorted position among equal gaps.
    fn scan(&mut self, row: &[f64]) -> RowCrack {
        let r = self.r;
        let m = row.len();
        debug_assert!(m > r);
        let max = row.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return RowCrack {
                gap: 0.0,
                position: 0,
                lo: 0,
                hi: r as u32,
                lo_distance: 0.0,
            };
        }
        let buckets = m;
        let inv_width = buckets as f64 / max;
        self.counts.clear();
        self.counts.resize(buckets, 0);
        self.slots.resize(buckets * 2 * r, (0.0, 0));

        for (t, &d) in row.iter().enumerate() {
            let key = (d, t as u32);
            let b = ((d * inv_width) as usize).min(buckets - 1);
            let c = self.counts[b] as usize;
            self.counts[b] += 1;
            let base = b * 2 * r;
            let filled = c.min(r);
            // Smallest r, ascending.
            let low = &mut self.slots[base..base + r];
            if filled < r {
                insert_sorted(&mut low[..=filled], filled, key);
            } else if key_lt(key, low[r - 1]) {
                insert_sorted(low, r - 1, key);
            }
            // Largest r, ascending.
            let high = &mut self.slots[base + r..base + 2 * r];
            if filled < r {
                insert_sorted(&mut high[..=filled], filled, key);
            } else if key_lt(high[0], key) {
                high.copy_within(1.., 0);
                insert_sorted(high, r - 1, key);
            }
        }

        self.known.clear();
        let mut rank = 0usize;
        for b in 0..buckets {
            let c = self.counts[b] as usize;
            if c == 0 {
                continue;
            }
            let base = b * 2 * r;
            let held = c.min(r);
            let low = &self.slots[base..base + held];
            let high = &self.slots[base + r..base + r + held];
            for (j, &(d, t)) in low.iter().enumerate() {
                self.known.push((rank + j, d, t));
            }
            // high[j] sits at bucket rank c - held + j; skip what low covered.
            for (j, &(d, t)) in high.iter().enumerate() {
                let within = c - held + j;
                if within >= held {
                    self.known.push((rank + within, d, t));
                }
            }
            rank += c;
        }

        let mut best: Option<RowCrack> = None;
        let mut ahead = 0usize;
        for e in 0..self.known.len() {
            let (q, dq, tq) = self.known[e];
            let target = q + r;
            if ahead <= e {
                ahead = e + 1;
            }
            while ahead < self.known.len() && self.known[ahead].0 < target {
                ahead += 1;
            }
            if ahead >= self.known.len() {
                break;
            }
            let (qa, da, ta) = self.known[ahead];
            if qa != target {
                continue;
            }
            let gap = da - dq;
            if best.is_none_or(|b| gap > b.gap) {
                best = Some(RowCrack {
                    gap,
                    position: q,
                    lo: tq,
                    hi: ta,
                    lo_distance: dq,
                });
            }
        }
        best.expect("a row longer than r has at least one cross-bucket span")
    }
}

/// Inserts `key` into the ascending slice `s[..=last]`, whose last slot is free.
#[inline]
fn insert_sorted(s: &mut [(f64, u32)], last: usize, key: (f64, u32)) {
    let mut j = last;
    while j > 0 && key_lt(key, s[j - 1]) {
        s[j] = s[j - 1];
        j -= 1;
    }
    s[j] = key;
}

/// `MC^(r)` of `subset` with its witness, or `None` when the set has at most
/// `r` points and cannot be split. Ties go to the smallest row point, then
/// the smallest sorted position.
pub fn mc_r(subset: &[usize], dv: &DistanceView<'_>, r: usize) -> Option<CrackWitness> {
    let mut members = subset.to_vec();
    members.sort_unstable();
    members.dedup();
    mc_r_sorted(&members, dv, r)
}

fn mc_r_sorted(members: &[usize], dv: &DistanceView<'_>, r: usize) -> Option<CrackWitness> {
    if r == 0 || members.len() <= r {
        return None;
    }
    let mut scanner = RowScanner::new(r);
    let mut row = Vec::with_capacity(members.len());
    let mut best: Option<CrackWitness> = None;
    for &i in members {
        dv.row_into(i, members, &mut row);
        if let Some(b) = &best {
            if scanner.cannot_exceed(&row, b.gap) {
                continue;
            }
        }
        let c = scanner.scan(&row);
        if best.is_none_or(|b| c.gap > b.gap) {
            best = Some(CrackWitness {
                row: i,
                lo: members[c.lo as usize],
                hi: members[c.hi as usize],
                position: c.position,
                lo_distance: c.lo_distance,
                gap: c.gap,
            });
        }
    }
    best
}

/// Splits `subset` at a crack: `C_a` holds every point no farther from the
/// witness row than `min(f(row, lo), f(row, hi))`, `C_b` the rest.
pub fn split_subset(
    subset: &[usize],
    witness: &CrackWitness,
    dv: &DistanceView<'_>,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let threshold = dv.dist(witness.row, witness.lo).min(dv.dist(witness.row, witness.hi));
    let (a, b): (Vec<usize>, Vec<usize>) = subset
        .iter()
        .partition(|&&t| dv.dist(witness.row, t) <= threshold);
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvariantViolation(format!(
            "crack at row {} produced an empty side ({} / {})",
            witness.row,
            a.len(),
            b.len()
        )));
    }
    Ok((a, b))
}

/// One examined subset in the fission loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub size: usize,
    pub mc: Option<f64>,
    pub d0: f64,
    pub witness: Option<CrackWitness>,
    /// Sizes of the two halves when the subset was split.
    pub split: Option<(usize, usize)>,
}

/// Output of [`rfc`] over an input set.
#[derive(Debug, Clone, PartialEq)]
pub struct RfcOutcome {
    /// The clustered points, ascending.
    pub members: Vec<usize>,
    /// Cluster of `members[t]`, numbered by smallest member.
    pub labels: Vec<usize>,
    pub k: usize,
    pub params: FissionParams,
    pub splits: usize,
    pub trace: Vec<TraceEvent>,
}

impl RfcOutcome {
    pub fn assignment(&self) -> ClusterAssignment {
        ClusterAssignment::all_dense(&self.labels)
    }
}

#[derive(PartialEq, Eq)]
struct Pending(Vec<usize>);

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest first; equal sizes by smallest first member.
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| Reverse(self.0.first()).cmp(&Reverse(other.0.first())))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Robust fission clustering of `set`.
///
/// `r` defaults to [`select_r`] of the set size. `d₀^(r)` is computed once
/// over the whole input set unless overridden, and stays fixed for every
/// subset.
pub fn rfc(
    set: &[usize],
    dv: &DistanceView<'_>,
    r: Option<usize>,
    d0_override: Option<f64>,
) -> Result<RfcOutcome> {
    let mut members = set.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::InvalidInput("cannot cluster an empty set".into()));
    }
    if let Some(&last) = members.last() {
        if last >= dv.len() {
            return Err(Error::InvalidInput(format!(
                "point {last} outside a view of {} points",
                dv.len()
            )));
        }
    }
    let m = members.len();
    let r = r.unwrap_or_else(|| select_r(m));
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let d0 = match d0_override {
        Some(d) if d.is_finite() && d >= 0.0 => d,
        Some(d) => {
            return Err(Error::InvalidParameter(format!(
                "d0 override must be finite and non-negative, got {d}"
            )))
        }
        None if m > r => d0_r(&members, dv, r)?,
        None => 0.0,
    };

    let mut pending = BinaryHeap::new();
    pending.push(Pending(members.clone()));
    let mut finished: Vec<Vec<usize>> = Vec::new();
    let mut trace = Vec::new();
    let mut splits = 0;
    while let Some(Pending(subset)) = pending.pop() {
        let witness = mc_r_sorted(&subset, dv, r);
        let mut event = TraceEvent {
            size: subset.len(),
            mc: witness.map(|w| w.gap),
            d0,
            witness,
            split: None,
        };
        match witness {
            Some(w) if w.exceeds(d0) => {
                let (a, b) = split_subset(&subset, &w, dv)?;
                event.split = Some((a.len(), b.len()));
                splits += 1;
                pending.push(Pending(a));
                pending.push(Pending(b));
            }
            _ => finished.push(subset),
        }
        trace.push(event);
    }

    let mut position = vec![usize::MAX; dv.len()];
    for (t, &p) in members.iter().enumerate() {
        position[p] = t;
    }
    let mut raw = vec![0usize; m];
    for (c, cluster) in finished.iter().enumerate() {
        for &p in cluster {
            raw[position[p]] = c;
        }
    }
    let assignment = ClusterAssignment::all_dense(&raw);
    Ok(RfcOutcome {
        labels: assignment.labels().to_vec(),
        k: assignment.k(),
        members,
        params: FissionParams { r, d0_r: d0 },
        splits,
        trace,
    })
}
