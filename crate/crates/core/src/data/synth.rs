//! Seeded synthetic datasets.
//!
//! Every generator draws from a ChaCha8 stream seeded with the given seed,
//! so the same parameters and seed always give the same points.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::Dataset;
use crate::distance::{pairwise_distances, rth_neighbor_distance, DistanceMode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Isotropic Gaussian blobs on a grid of centers.
    Blobs,
    /// Two rings with an S-shaped curve threaded through both.
    RingS,
    /// A large tight blob next to a small diffuse one.
    Imbalance,
    /// A disk beside a thin vertical bar.
    SupoleLike,
    /// A filled square beside a filled disk.
    SquCirLike,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Blobs,
        GeneratorKind::RingS,
        GeneratorKind::Imbalance,
        GeneratorKind::SupoleLike,
        GeneratorKind::SquCirLike,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::Blobs => "blobs",
            GeneratorKind::RingS => "ring_s",
            GeneratorKind::Imbalance => "imbalance",
            GeneratorKind::SupoleLike => "supole_like",
            GeneratorKind::SquCirLike => "squcir_like",
        }
    }

    pub fn default_n(self) -> usize {
        match self {
            GeneratorKind::Blobs => 200,
            GeneratorKind::RingS => 1200,
            GeneratorKind::Imbalance => 1050,
            GeneratorKind::SupoleLike => 513,
            GeneratorKind::SquCirLike => 50_000,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown generator {s:?}")))
    }
}

/// Generator settings. Unset values take per-kind defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    /// Total points; for `imbalance`, the dense blob size.
    pub n: Option<usize>,
    /// Number of blobs (`blobs` only).
    pub k: Option<usize>,
    /// Sparse blob size (`imbalance` only).
    pub n_sparse: Option<usize>,
    /// Distance between neighboring blob centers (`blobs` only).
    pub separation: f64,
    /// Standard deviation of each blob (`blobs` only).
    pub spread: f64,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            n: None,
            k: None,
            n_sparse: None,
            separation: 10.0,
            spread: 1.0,
            seed: 0,
        }
    }
}

fn invalid(message: impl Into<String>, kind: GeneratorKind) -> Error {
    Error::Validation {
        dataset: kind.to_string(),
        message: message.into(),
    }
}

pub fn generate_synthetic(kind: GeneratorKind, params: &GeneratorParams) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n.unwrap_or_else(|| kind.default_n());
    if n == 0 {
        return Err(invalid("n must be positive", kind));
    }
    let (rows, labels) = match kind {
        GeneratorKind::Blobs => {
            let k = params.k.unwrap_or(2);
            if k == 0 || k > n {
                return Err(invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}"), kind));
            }
            if !(params.spread > 0.0 && params.spread.is_finite())
                || !(params.separation > 0.0 && params.separation.is_finite())
            {
                return Err(invalid("spread and separation must be positive", kind));
            }
            blobs(&mut rng, n, k, params.separation, params.spread)
        }
        GeneratorKind::Imbalance => {
            let sparse = params.n_sparse.unwrap_or(50);
            let dense = params.n.unwrap_or(1000);
            if sparse == 0 {
                return Err(invalid("n_sparse must be positive", kind));
            }
            imbalance(&mut rng, dense, sparse)
        }
        GeneratorKind::RingS => {
            if n < 3 {
                return Err(invalid("ring_s needs at least 3 points", kind));
            }
            ring_s(&mut rng, n)
        }
        GeneratorKind::SupoleLike => {
            if n < 2 {
                return Err(invalid("supole_like needs at least 2 points", kind));
            }
            supole(&mut rng, n)
        }
        GeneratorKind::SquCirLike => {
            if n < 2 {
                return Err(invalid("squcir_like needs at least 2 points", kind));
            }
            squcir(&mut rng, n)
        }
    };
    let name = format!("{kind}-s{}", params.seed);
    Dataset::from_rows(name, &rows, Some(labels))
}

type Points = (Vec<Vec<f64>>, Vec<usize>);

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn in_disk(rng: &mut ChaCha8Rng, cx: f64, cy: f64, radius: f64) -> Vec<f64> {
    let r = radius * rng.random::<f64>().sqrt();
    let a = uniform(rng, 0.0, TAU);
    vec![cx + r * a.cos(), cy + r * a.sin()]
}

fn in_annulus(rng: &mut ChaCha8Rng, cx: f64, cy: f64, inner: f64, outer: f64) -> Vec<f64> {
    let r = (uniform(rng, inner * inner, outer * outer)).sqrt();
    let a = uniform(rng, 0.0, TAU);
    vec![cx + r * a.cos(), cy + r * a.sin()]
}

/// Splits `n` into `k` sizes differing by at most one, larger ones first.
fn split_even(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|j| n / k + usize::from(j < n % k)).collect()
}

fn blobs(rng: &mut ChaCha8Rng, n: usize, k: usize, sep: f64, spread: f64) -> Points {
    let cols = (k as f64).sqrt().ceil() as usize;
    let noise = Normal::new(0.0, spread).expect("positive spread");
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (j, size) in split_even(n, k).into_iter().enumerate() {
        let (cx, cy) = (sep * (j % cols) as f64, sep * (j / cols) as f64);
        for _ in 0..size {
            rows.push(vec![cx + noise.sample(rng), cy + noise.sample(rng)]);
            labels.push(j);
        }
    }
    (rows, labels)
}

fn imbalance(rng: &mut ChaCha8Rng, dense: usize, sparse: usize) -> Points {
    let tight = Normal::new(0.0, 1.0).expect("valid");
    let mut rows = Vec::with_capacity(dense + sparse);
    let mut labels = Vec::with_capacity(dense + sparse);
    for _ in 0..dense {
        rows.push(vec![tight.sample(rng), tight.sample(rng)]);
        labels.push(0);
    }
    for _ in 0..sparse {
        rows.push(in_disk(rng, 30.0, 0.0, 6.0));
        labels.push(1);
    }
    (rows, labels)
}

fn ring_s(rng: &mut ChaCha8Rng, n: usize) -> Points {
    // Rings of radius 3 around (±4, 0); the curve y = 2.2·sin(πx/4) passes
    // through both centers and crosses each ring twice. Ring points near a
    // crossing are redrawn so the curve stays separated from the rings.
    let sizes = split_even(n, 3);
    let curve_y = |x: f64| 2.2 * (PI * x / 4.0).sin();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (label, cx) in [(0usize, -4.0), (1, 4.0)] {
        let mut made = 0;
        while made < sizes[label] {
            let p = in_annulus(rng, cx, 0.0, 2.7, 3.3);
            if (p[1] - curve_y(p[0])).abs() < 1.0 {
                continue;
            }
            rows.push(p);
            labels.push(label);
            made += 1;
        }
    }
    let wiggle = Normal::new(0.0, 0.12).expect("valid");
    for _ in 0..sizes[2] {
        let x = uniform(rng, -8.5, 8.5);
        rows.push(vec![x, curve_y(x) + wiggle.sample(rng)]);
        labels.push(2);
    }
    (rows, labels)
}

fn supole(rng: &mut ChaCha8Rng, n: usize) -> Points {
    let disk = (2 * n).div_ceil(3);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        if i < disk {
            rows.push(in_disk(rng, 0.0, 0.0, 1.0));
            labels.push(0);
        } else {
            rows.push(vec![uniform(rng, 1.8, 2.1), uniform(rng, -1.5, 1.5)]);
            labels.push(1);
        }
    }
    (rows, labels)
}

fn squcir(rng: &mut ChaCha8Rng, n: usize) -> Points {
    let square = n / 2;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        if i < square {
            rows.push(vec![uniform(rng, 0.0, 2.0), uniform(rng, 0.0, 2.0)]);
            labels.push(0);
        } else {
            rows.push(in_disk(rng, 4.0, 1.0, 1.0));
            labels.push(1);
        }
    }
    (rows, labels)
}

/// Settings of a random polygonal chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub n: usize,
    pub r: usize,
    pub dim: usize,
    /// Standard deviation of the per-step direction change.
    pub curvature: f64,
}

/// A random chain whose every `r`-step span `|x_{i+r} − x_i|` is at most
/// `d₀^(r)` of the chain's own point set.
///
/// Steps have random lengths in `[0.3, 1]`, except that the first and last
/// `r` steps have length 1; drafts violating the span bound are redrawn.
pub fn d0_connected_chain(params: &ChainParams, seed: u64) -> Result<Dataset> {
    let ChainParams { n, r, dim, curvature } = *params;
    if r == 0 || n <= 2 * r || dim == 0 || !(curvature >= 0.0 && curvature.is_finite()) {
        return Err(Error::Validation {
            dataset: "chain".into(),
            message: format!("invalid chain parameters {params:?}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("valid");
    let turn = Normal::new(0.0, curvature.max(f64::MIN_POSITIVE)).expect("valid");
    for _ in 0..1000 {
        let mut dir: Vec<f64> = (0..dim).map(|_| unit.sample(&mut rng)).collect();
        normalize(&mut dir);
        let mut pts = vec![vec![0.0; dim]];
        for i in 0..n - 1 {
            let len = if i < r || i >= n - 1 - r {
                1.0
            } else {
                uniform(&mut rng, 0.3, 1.0)
            };
            for c in dir.iter_mut() {
                *c += if curvature > 0.0 { turn.sample(&mut rng) } else { 0.0 };
            }
            normalize(&mut dir);
            let last = pts.last().expect("non-empty");
            let next = last.iter().zip(&dir).map(|(p, u)| p + len * u).collect();
            pts.push(next);
        }
        let ds = Dataset::from_rows(format!("chain-s{seed}"), &pts, None)?;
        let dv = pairwise_distances(&ds, DistanceMode::Full)?;
        let d0 = rth_neighbor_distance(&dv, r)?.into_iter().fold(0.0, f64::max);
        if (0..n - r).all(|i| dv.dist(i, i + r) <= d0) {
            return Ok(ds);
        }
    }
    Err(Error::Validation {
        dataset: "chain".into(),
        message: "no valid chain within 1000 drafts".into(),
    })
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    } else {
        v[0] = 1.0;
    }
}
