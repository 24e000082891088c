//! The library against naive reference implementations.

mod common;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use sarfc::density::{diffusion_kde_1d, unit_normalize};
use sarfc::distance::rth_neighbor_distance;
use sarfc::fission::{d0_r, mc_r, rfc};
use sarfc::metrics::{ari, nmi};
use sarfc::noise::{smooth_sorted, soar_split};
use sarfc::{pairwise_distances, Dataset, DistanceMode};

use common::*;

fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let blobs = rng.random_range(1..4);
    let centers: Vec<Vec<f64>> = (0..blobs)
        .map(|_| (0..d).map(|_| rng.random_range(-8.0..8.0)).collect())
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let c = &centers[rng.random_range(0..blobs)];
            c.iter().map(|&m| m + normal.sample(rng)).collect()
        })
        .collect();
    Dataset::from_rows("random", &rows, None).unwrap()
}

#[test]
fn kde_matches_direct_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let normal = Normal::new(0.0, 1.0).unwrap();
    for case in 0..6 {
        let n = rng.random_range(20..=1000);
        let raw: Vec<f64> = (0..n)
            .map(|_| normal.sample(&mut rng) + if rng.random_bool(0.3) { 4.0 } else { 0.0 })
            .collect();
        let unit = unit_normalize(&raw).unwrap();
        let t = 10f64.powf(rng.random_range(-5.0..-2.0));
        let grid = if case % 2 == 0 { 1024 } else { 1 << 14 };
        let cells: Vec<usize> = (0..32).map(|_| rng.random_range(0..grid)).collect();
        let kde = diffusion_kde_1d(&unit, t, grid).unwrap();
        let want = direct_series(&unit, t, grid, &cells);
        for (&m, w) in cells.iter().zip(want) {
            let got = kde.values()[m];
            assert!((got - w).abs() <= 1e-8, "case {case}, cell {m}: {got} vs {w}");
        }
    }
}

#[test]
fn soar_matches_naive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let n = rng.random_range(16..=400);
        let exp = Exp::new(rng.random_range(0.2..5.0)).unwrap();
        let mut rho: Vec<f64> = (0..n).map(|_| exp.sample(&mut rng)).collect();
        rho.sort_by(|a, b| b.total_cmp(a));
        let v = smooth_sorted(&rho).unwrap();
        assert_eq!(soar_split(&v).unwrap().p_r, naive_soar(v.values()));
    }
}

#[test]
fn ari_and_nmi_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let n = rng.random_range(2..=50);
        let ka = rng.random_range(1..=6);
        let kb = rng.random_range(1..=6);
        let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..ka)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..kb)).collect();
        assert!((ari(&a, &b).unwrap() - brute_ari(&a, &b)).abs() <= 1e-12);
        let (x, y) = (nmi(&a, &b).unwrap(), brute_nmi(&a, &b));
        assert!((x - y).abs() <= 1e-12, "{x} vs {y} for {a:?} {b:?}");
    }
}

#[test]
fn streamed_and_full_views_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..8 {
        let n = rng.random_range(10..=500);
        let d = rng.random_range(1..=5);
        let ds = random_points(&mut rng, n, d);
        let full = pairwise_distances(&ds, DistanceMode::Full).unwrap();
        let streamed = pairwise_distances(&ds, DistanceMode::Streamed).unwrap();
        assert!(full.is_materialized() && !streamed.is_materialized());
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for i in 0..n {
            full.full_row_into(i, &mut a);
            streamed.full_row_into(i, &mut b);
            assert_eq!(a, b);
        }
        let all: Vec<usize> = (0..n).collect();
        assert_eq!(rfc(&all, &full, None, None).unwrap(), rfc(&all, &streamed, None, None).unwrap());
    }
}

#[test]
fn distances_are_symmetric_with_zero_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..5 {
        let ds = random_points(&mut rng, 120, 3);
        let dv = pairwise_distances(&ds, DistanceMode::Full).unwrap();
        for i in 0..ds.len() {
            assert_eq!(dv.dist(i, i), 0.0);
            for j in 0..ds.len() {
                assert_eq!(dv.dist(i, j), dv.dist(j, i));
                assert!((dv.dist(i, j) - euclid(ds.point(i), ds.point(j))).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn neighbor_distance_grows_with_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let ds = random_points(&mut rng, 150, 2);
    let dv = pairwise_distances(&ds, DistanceMode::Streamed).unwrap();
    let orders: Vec<Vec<f64>> = (1..=5).map(|r| rth_neighbor_distance(&dv, r).unwrap()).collect();
    for w in orders.windows(2) {
        assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
    }
}

#[test]
fn crack_and_d0_match_sorted_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..40 {
        let n = rng.random_range(5..=150);
        let d = rng.random_range(1..=3);
        let mut ds = random_points(&mut rng, n, d);
        if case % 4 == 0 {
            // Rounded coordinates create tied distances.
            let rows: Vec<Vec<f64>> = ds.points().map(|p| p.iter().map(|x| x.round()).collect()).collect();
            ds = Dataset::from_rows("rounded", &rows, None).unwrap();
        }
        let dv = pairwise_distances(&ds, DistanceMode::Streamed).unwrap();
        let subset: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.8)).collect();
        for r in 1..=3 {
            let got = mc_r(&subset, &dv, r);
            let want = naive_mc(&ds, &subset, r);
            match (got, want) {
                (None, None) => {}
                (Some(g), Some(w)) => {
                    assert!((g.gap - w.0).abs() <= 1e-9, "case {case}, r {r}: {} vs {}", g.gap, w.0);
                    let lo = dv.dist(g.row, g.lo);
                    let hi = dv.dist(g.row, g.hi);
                    assert!((hi - lo - g.gap).abs() <= 1e-9);
                }
                (g, w) => panic!("case {case}, r {r}: {g:?} vs {w:?}"),
            }
            if subset.len() > r {
                let d0 = d0_r(&subset, &dv, r).unwrap();
                assert!((d0 - naive_d0(&ds, &subset, r)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn fission_matches_naive_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..25 {
        let n = rng.random_range(8..=120);
        let ds = random_points(&mut rng, n, 2);
        let dv = pairwise_distances(&ds, DistanceMode::Full).unwrap();
        let all: Vec<usize> = (0..n).collect();
        for r in 1..=3 {
            let out = rfc(&all, &dv, Some(r), None).unwrap();
            let want = naive_fission(&ds, &all, r, naive_d0(&ds, &all, r));
            assert_eq!(partition_of(&out.labels), want, "n {n}, r {r}");
        }
    }
}
