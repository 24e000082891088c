use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use sarfc::data::{
    builtin_manifest, data_dir, find, generate_synthetic, load_csv, load_manifest, DatasetManifest,
    GeneratorKind, GeneratorParams, LabelColumn,
};
use sarfc::format::sig6;
use sarfc::{Dataset, MetricsReport, PipelineReport};

use crate::{Failure, RunArgs};

pub fn manifests(path: Option<&Path>) -> Result<Vec<DatasetManifest>, Failure> {
    match path {
        Some(p) => load_manifest(p).map_err(|e| Failure::new(Failure::RESOLVE, e)),
        None => Ok(builtin_manifest()),
    }
}

fn resolve(args: &RunArgs) -> Result<Dataset, Failure> {
    let fail = |e| Failure::new(Failure::RESOLVE, e);
    if let Some(kind) = &args.generate {
        let kind: GeneratorKind = kind.parse().map_err(|e: sarfc::Error| fail(e.into()))?;
        let params = GeneratorParams {
            n: args.n,
            k: args.k,
            n_sparse: args.n_sparse,
            seed: args.seed,
            ..GeneratorParams::default()
        };
        return generate_synthetic(kind, &params).map_err(|e| fail(e.into()));
    }
    let key = args.dataset.as_deref().expect("clap requires a dataset");
    let list = manifests(args.manifest.as_deref())?;
    if let Some(m) = find(&list, key) {
        return m
            .load(&data_dir())
            .with_context(|| format!("loading {}", m.name))
            .map_err(fail);
    }
    let path = Path::new(key);
    if !path.is_file() {
        return Err(fail(anyhow!(
            "{key:?} is neither a manifest dataset nor a readable file"
        )));
    }
    let label = if args.no_labels {
        None
    } else {
        Some(args.label_col.map_or(LabelColumn::Last, LabelColumn::Index))
    };
    load_csv(path, label).map_err(|e| fail(e.into()))
}

pub fn results_row(ds: &Dataset, rep: &PipelineReport) -> anyhow::Result<String> {
    Ok(match ds.labels() {
        Some(truth) => MetricsReport::evaluate(ds.name(), rep.assignment.labels(), truth)?.csv_row(),
        None => format!("{},,{},,,,", ds.name(), rep.k()),
    })
}

pub fn run(args: &RunArgs) -> Result<ExitCode, Failure> {
    let ds = resolve(args)?;
    let report = sarfc::sarfc_with(&ds, &args.pipeline.options())
        .map_err(|e| Failure::new(Failure::PIPELINE, e))?;
    let row = results_row(&ds, &report).map_err(|e| Failure::new(Failure::PIPELINE, e))?;

    print!("{}", summary(&ds, &report));
    if let Some(out) = &args.out {
        write_artifacts(out, args, &ds, &report, &row)
            .map_err(|e| Failure::new(Failure::IO, e))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn summary(ds: &Dataset, rep: &PipelineReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dataset   {}", ds.name());
    let _ = writeln!(
        s,
        "points    {} in {} dims (dense {}, border {})",
        ds.len(),
        ds.dim(),
        rep.dense_count,
        rep.border_count
    );
    if !rep.diagnostics.skipped {
        let _ = writeln!(
            s,
            "split     p_r = {}, p_max = {}",
            rep.diagnostics.p_r, rep.diagnostics.p_max
        );
    }
    let _ = writeln!(s, "fission   r = {}, d0 = {}", rep.params.r, sig6(rep.params.d0_r));
    let _ = writeln!(s, "k         {}", rep.k());
    if let Some(truth) = ds.labels() {
        if let Ok(m) = MetricsReport::evaluate(ds.name(), rep.assignment.labels(), truth) {
            let _ = writeln!(
                s,
                "k_true    {}\nacc {:.1}  f1 {:.1}  ari {:.1}  nmi {:.1}",
                m.k_true,
                m.acc * 100.0,
                m.f1 * 100.0,
                m.ari * 100.0,
                m.nmi * 100.0
            );
        }
    }
    let t = &rep.timings;
    let _ = writeln!(
        s,
        "time      {:.3} s (density {:.3}, noise {:.3}, distances {:.3}, fission {:.3}, border {:.3})",
        t.total().as_secs_f64(),
        t.density.as_secs_f64(),
        t.noise_id.as_secs_f64(),
        t.distances.as_secs_f64(),
        t.fission.as_secs_f64(),
        t.border.as_secs_f64()
    );
    for w in &rep.warnings {
        let _ = writeln!(s, "warning   {w:?}");
    }
    s
}

fn write_artifacts(
    out: &Path,
    args: &RunArgs,
    ds: &Dataset,
    rep: &PipelineReport,
    row: &str,
) -> anyhow::Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let write = |name: &str, body: String| {
        let p = out.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
    };
    write("results.csv", format!("{}\n{row}\n", MetricsReport::CSV_HEADER))?;

    let mut labels = String::from("index,label,dense\n");
    for (i, (&l, &d)) in rep
        .assignment
        .labels()
        .iter()
        .zip(rep.assignment.dense_mask())
        .enumerate()
    {
        let _ = writeln!(labels, "{i},{l},{}", u8::from(d));
    }
    write("labels.csv", labels)?;

    if args.diagnostics {
        let d = &rep.diagnostics;
        write("rho_sorted.csv", d.rho_sorted_csv())?;
        write("smoothed.csv", d.smoothed_csv())?;
        write("tan_alpha.csv", d.tan_alpha_csv())?;
        write("soar.csv", d.soar_csv())?;
        write(
            "split.csv",
            format!(
                "n,p_r,p_max,dense,border,r,d0\n{},{},{},{},{},{},{}\n",
                ds.len(),
                d.p_r,
                d.p_max,
                rep.dense_count,
                rep.border_count,
                rep.params.r,
                sig6(rep.params.d0_r)
            ),
        )?;
    }
    if args.trace {
        let mut body = String::new();
        for ev in &rep.fission_trace {
            body.push_str(&serde_json::to_string(ev)?);
            body.push('\n');
        }
        write("trace.jsonl", body)?;
    }
    Ok(())
}
