use std::process::ExitCode;

use sarfc::data::{d0_connected_chain, generate_synthetic, ChainParams, GeneratorKind, GeneratorParams};
use sarfc::fission::{d0_r, mc_r};
use sarfc::{pairwise_distances, sarfc_with, DistanceMode, SarfcOptions};

use crate::{CheckArgs, Failure};

/// Chain `i` of the sweep: r cycles through 1..=3, sizes through 10..=300.
fn chain_params(i: usize) -> ChainParams {
    ChainParams {
        n: 10 + (i * 97) % 291,
        r: 1 + i % 3,
        dim: 1 + (i / 3) % 3,
        curvature: 0.6 * ((i * 37) % 100) as f64 / 100.0,
    }
}

pub fn check(args: &CheckArgs) -> Result<ExitCode, Failure> {
    let fail = |e: sarfc::Error| Failure::new(Failure::PIPELINE, e);
    let mut ok = true;

    let mut violations = 0;
    for i in 0..args.chains {
        let p = chain_params(i);
        let ds = d0_connected_chain(&p, args.seed.wrapping_add(i as u64)).map_err(fail)?;
        let dv = pairwise_distances(&ds, DistanceMode::Full).map_err(fail)?;
        let all: Vec<usize> = (0..ds.len()).collect();
        let d0 = d0_r(&all, &dv, p.r).map_err(fail)?;
        let crack = mc_r(&all, &dv, p.r);
        if crack.is_some_and(|w| w.exceeds(d0)) {
            let mc = crack.map_or(0.0, |w| w.gap);
            violations += 1;
            eprintln!("chain {i} ({p:?}): MC = {mc} > d0 = {d0}");
        }
    }
    ok &= report(
        "crack bound on connected chains",
        violations == 0,
        format!("{violations} violations in {} chains", args.chains),
    );

    let mut mismatches = 0;
    for seed in 0..5 {
        let params = GeneratorParams {
            n: Some(300),
            k: Some(3),
            seed: args.seed.wrapping_add(seed),
            ..GeneratorParams::default()
        };
        let ds = generate_synthetic(GeneratorKind::Blobs, &params).map_err(fail)?;
        let run = |mode| {
            sarfc_with(
                &ds,
                &SarfcOptions {
                    distance_mode: mode,
                    ..SarfcOptions::default()
                },
            )
        };
        let full = run(DistanceMode::Full).map_err(fail)?;
        let streamed = run(DistanceMode::Streamed).map_err(fail)?;
        let again = run(DistanceMode::Full).map_err(fail)?;
        if full.assignment != streamed.assignment || full.assignment != again.assignment {
            mismatches += 1;
        }
    }
    ok &= report(
        "determinism and distance-mode equivalence",
        mismatches == 0,
        format!("{mismatches} of 5 datasets differ"),
    );

    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn report(name: &str, pass: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
