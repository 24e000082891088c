//! Naive reference implementations used as test oracles. Each one recomputes
//! a quantity from its definition, sharing no code with the library.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use sarfc::Dataset;

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Sorted distances from `row` to every member, self included, ordered by
/// (distance, index).
fn sorted_row(ds: &Dataset, subset: &[usize], row: usize) -> Vec<(f64, usize)> {
    let mut d: Vec<(f64, usize)> = subset
        .iter()
        .map(|&j| (euclid(ds.point(row), ds.point(j)), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d
}

/// Largest r-span gap over every sorted row: (gap, row, lo point, hi point).
pub fn naive_mc(ds: &Dataset, subset: &[usize], r: usize) -> Option<(f64, usize, usize, usize)> {
    let mut members = subset.to_vec();
    members.sort_unstable();
    if members.len() <= r {
        return None;
    }
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for &i in &members {
        let s = sorted_row(ds, &members, i);
        for q in 0..s.len() - r {
            let gap = s[q + r].0 - s[q].0;
            if best.is_none_or(|b| gap > b.0) {
                best = Some((gap, i, s[q].1, s[q + r].1));
            }
        }
    }
    best
}

/// Largest distance from a member to its r-th nearest other member.
pub fn naive_d0(ds: &Dataset, subset: &[usize], r: usize) -> f64 {
    subset
        .iter()
        .map(|&i| {
            let mut d: Vec<f64> = subset
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| euclid(ds.point(i), ds.point(j)))
                .collect();
            d.sort_by(f64::total_cmp);
            d[r - 1]
        })
        .fold(0.0, f64::max)
}

/// Fission by recursion: split while the r-span crack exceeds `d0`.
/// The final partition does not depend on the order subsets are visited.
pub fn naive_fission(ds: &Dataset, subset: &[usize], r: usize, d0: f64) -> Partition {
    let mut out = Partition::new();
    let mut stack = vec![subset.to_vec()];
    while let Some(s) = stack.pop() {
        match naive_mc(ds, &s, r) {
            // Same rounding allowance as the library's split test.
            Some((gap, row, lo, hi)) if gap > d0 + 1e-12 * euclid(ds.point(row), ds.point(hi)) => {
                let t = euclid(ds.point(row), ds.point(lo)).min(euclid(ds.point(row), ds.point(hi)));
                let (a, b): (Vec<usize>, Vec<usize>) = s
                    .iter()
                    .partition(|&&j| euclid(ds.point(row), ds.point(j)) <= t);
                stack.push(a);
                stack.push(b);
            }
            _ => {
                out.insert(s.into_iter().collect());
            }
        }
    }
    out
}

pub type Partition = BTreeSet<BTreeSet<usize>>;

/// Groups point indices by label.
pub fn partition_of(labels: &[usize]) -> Partition {
    let mut groups: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().insert(i);
    }
    groups.into_values().collect()
}

pub fn partition(groups: &[&[usize]]) -> Partition {
    groups.iter().map(|g| g.iter().copied().collect()).collect()
}

/// Damped cosine series of a binned sample summed term by term at the cell
/// centers listed in `cells`, negatives clamped.
pub fn direct_series(samples: &[f64], t: f64, grid: usize, cells: &[usize]) -> Vec<f64> {
    let mut weight: HashMap<usize, f64> = HashMap::new();
    for &x in samples {
        let c = ((x * grid as f64) as usize).min(grid - 1);
        *weight.entry(c).or_default() += 1.0 / samples.len() as f64;
    }
    let center = |m: usize| (m as f64 + 0.5) / grid as f64;
    let coeffs: Vec<f64> = (0..grid)
        .map(|k| {
            weight
                .iter()
                .map(|(&m, &w)| w * (k as f64 * PI * center(m)).cos())
                .sum()
        })
        .collect();
    cells
        .iter()
        .map(|&m| {
            let x = center(m);
            let mut f = coeffs[0];
            for (k, &a) in coeffs.iter().enumerate().skip(1) {
                let k = k as f64;
                f += 2.0 * a * (-k * k * PI * PI * t / 2.0).exp() * (k * PI * x).cos();
            }
            f.max(0.0)
        })
        .collect()
}

/// Ordinary least squares on (x, y) pairs, computed from centered sums.
fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Two-line split of a smoothed sequence whose first element has rank 5:
/// every `p` in `[10, n − 5]` is fitted from scratch and the smallest
/// summed absolute residual wins, first `p` on ties.
pub fn naive_soar(v: &[f64]) -> usize {
    let n = v.len() + 4;
    let rank = |t: usize| (t + 5) as f64;
    let score = |range: std::ops::Range<usize>| {
        let xs: Vec<f64> = range.clone().map(rank).collect();
        let ys = &v[range];
        let (a, b) = ols(&xs, ys);
        xs.iter().zip(ys).map(|(x, y)| (a + b * x - y).abs()).sum::<f64>()
    };
    let mut best = (f64::INFINITY, 0);
    for p in 10..=n - 5 {
        let cut = p - 4;
        let s = score(0..cut) + score(cut..v.len());
        if s < best.0 {
            best = (s, p);
        }
    }
    best.1
}

/// Adjusted Rand index by counting agreements over all point pairs.
pub fn brute_ari(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut in_a, mut in_b) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            both += f64::from(u8::from(sa && sb));
            in_a += f64::from(u8::from(sa));
            in_b += f64::from(u8::from(sb));
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let expected = in_a * in_b / pairs;
    let max = (in_a + in_b) / 2.0;
    if max == expected {
        return 1.0;
    }
    (both - expected) / (max - expected)
}

/// Normalized mutual information with the geometric-mean normalization,
/// from explicit joint and marginal frequencies.
pub fn brute_nmi(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut ca: HashMap<usize, usize> = HashMap::new();
    let mut cb: HashMap<usize, usize> = HashMap::new();
    let mut cab: HashMap<(usize, usize), usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
        *cab.entry((x, y)).or_default() += 1;
    }
    let h = |c: &HashMap<usize, usize>| {
        -c.values()
            .map(|&k| {
                let q = k as f64 / n;
                q * q.ln()
            })
            .sum::<f64>()
    };
    let (ha, hb) = (h(&ca), h(&cb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    let mi: f64 = cab
        .iter()
        .map(|(&(x, y), &k)| {
            let p = k as f64 / n;
            p * (p * n * n / (ca[&x] * cb[&y]) as f64).ln()
        })
        .sum();
    mi / (ha * hb).sqrt()
}

/// Regular grid of `side × side` points with unit spacing, offset by `origin`.
pub fn grid(origin: (f64, f64), side: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..side {
        for j in 0..side {
            out.push(vec![origin.0 + i as f64, origin.1 + j as f64]);
        }
    }
    out
}

/// Two 5×5 unit grids 16 apart, plus `stragglers` points in a short column
/// just right of the left grid: 3 units from its edge, 0.5 apart.
pub fn straggler_set(stragglers: usize) -> Dataset {
    let mut rows = grid((0.0, 0.0), 5);
    rows.extend(grid((20.0, 0.0), 5));
    for s in 0..stragglers {
        rows.push(vec![7.0, 1.5 + 0.5 * s as f64]);
    }
    Dataset::from_rows("stragglers", &rows, None).unwrap()
}

/// The pinned r = 1 fixtures: (name, points, expected partition).
pub fn fc_fixtures() -> Vec<(&'static str, Dataset, Partition)> {
    let line = |xs: &[f64]| {
        Dataset::from_rows("line", &xs.iter().map(|&x| vec![x]).collect::<Vec<_>>(), None).unwrap()
    };
    let mut three = grid((0.0, 0.0), 3);
    three.extend(grid((10.0, 0.0), 3));
    three.extend(grid((5.0, 10.0), 3));
    vec![
        (
            "two 1-D triples",
            line(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]),
            partition(&[&[0, 1, 2], &[3, 4, 5]]),
        ),
        (
            // The isolated 20 sets d0 = 12, so nothing splits.
            "far outlier holds d0 open",
            line(&[0.0, 1.0, 2.0, 3.0, 7.0, 8.0, 20.0]),
            partition(&[&[0, 1, 2, 3, 4, 5, 6]]),
        ),
        (
            "four 1-D pairs",
            line(&[0.0, 1.0, 3.0, 4.0, 9.0, 10.0, 12.0, 13.0]),
            partition(&[&[0, 1], &[2, 3], &[4, 5], &[6, 7]]),
        ),
        (
            "uniform 2-D grid",
            Dataset::from_rows("grid", &grid((0.0, 0.0), 4), None).unwrap(),
            partition(&[&(0..16).collect::<Vec<_>>()]),
        ),
        (
            "three 2-D squares",
            Dataset::from_rows("squares", &three, None).unwrap(),
            partition(&[
                &(0..9).collect::<Vec<_>>(),
                &(9..18).collect::<Vec<_>>(),
                &(18..27).collect::<Vec<_>>(),
            ]),
        ),
    ]
}
