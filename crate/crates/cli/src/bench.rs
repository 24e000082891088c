use std::fs;
use std::process::ExitCode;

use anyhow::Context;
use sarfc::data::data_dir;
use sarfc::MetricsReport;

use crate::run::{manifests, results_row};
use crate::{BenchArgs, Failure};

pub fn bench(args: &BenchArgs) -> Result<ExitCode, Failure> {
    let mut list = manifests(args.manifest.as_deref())?;
    if !args.only.is_empty() {
        list.retain(|m| args.only.iter().any(|k| m.matches(k)));
    }
    let opts = args.pipeline.options();
    let dir = data_dir();

    let mut rows = Vec::with_capacity(list.len());
    let mut failures = 0;
    for m in &list {
        let outcome = m
            .load(&dir)
            .map_err(anyhow::Error::from)
            .and_then(|ds| {
                let rep = sarfc::sarfc_with(&ds, &opts)?;
                results_row(&ds, &rep)
            });
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => {
                failures += 1;
                eprintln!("{}: {e:#}", m.name);
                rows.push(format!("{},ERROR,,,,,", m.name));
            }
        }
    }

    let mut csv = format!("{}\n", MetricsReport::CSV_HEADER);
    for r in &rows {
        csv.push_str(r);
        csv.push('\n');
    }
    print!("{}", aligned(&csv));
    if let Some(out) = &args.out {
        fs::create_dir_all(out)
            .and_then(|_| fs::write(out.join("bench.csv"), &csv))
            .with_context(|| format!("writing {}", out.join("bench.csv").display()))
            .map_err(|e| Failure::new(Failure::IO, e))?;
    }
    if !list.is_empty() && failures == list.len() {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

/// Pads CSV columns to a common width; the first column left-aligned, the
/// rest right-aligned.
fn aligned(csv: &str) -> String {
    let table: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| table.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::aligned;

    #[test]
    fn columns_line_up() {
        let t = aligned("dataset,k\nIris,3\nSquCir,12\n");
        assert_eq!(t, "dataset   k\nIris      3\nSquCir   12\n");
    }
}
