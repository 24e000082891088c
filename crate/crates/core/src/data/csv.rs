//! Plain delimited text: numeric fields, one point per line.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Which column holds the ground-truth label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    /// 0-based column index.
    Index(usize),
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Comma,
    Semicolon,
    Whitespace,
}

impl Delimiter {
    /// Picks the delimiter from a sample line: comma, then semicolon, else whitespace.
    pub fn detect(line: &str) -> Self {
        if line.contains(',') {
            Delimiter::Comma
        } else if line.contains(';') {
            Delimiter::Semicolon
        } else {
            Delimiter::Whitespace
        }
    }

    fn split(self, line: &str) -> Vec<&str> {
        match self {
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Semicolon => line.split(';').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Reads a dataset from `path`. The dataset is named after the file stem.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<LabelColumn>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv(&text, label_column).map(|d| d.with_name(name))
}

/// Parses delimited text. A first line made only of non-numeric fields is
/// taken as a header and skipped. Lines starting with `#` are ignored.
///
/// Labels that are all non-negative integers are kept as they are; any
/// other label tokens are numbered in order of first appearance.
pub fn parse_csv(text: &str, label_column: Option<LabelColumn>) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !is_skipped(l))
        .peekable();
    let Some(&(_, first)) = lines.peek() else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no data rows".into(),
        });
    };
    let delim = Delimiter::detect(first);
    if delim.split(first).iter().all(|f| f.parse::<f64>().is_err()) {
        lines.next();
    }

    let mut width = None;
    let mut coords = Vec::new();
    let mut label_tokens: Vec<String> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields = delim.split(line);
        let w = *width.get_or_insert(fields.len());
        if fields.len() != w {
            return Err(Error::Parse {
                line: lineno,
                column: fields.len().min(w) + 1,
                message: format!("expected {w} fields, found {}", fields.len()),
            });
        }
        let label_at = match label_column {
            Some(LabelColumn::Index(c)) if c >= w => {
                return Err(Error::Parse {
                    line: lineno,
                    column: c + 1,
                    message: format!("label column {c} outside {w} fields"),
                })
            }
            Some(LabelColumn::Index(c)) => Some(c),
            Some(LabelColumn::Last) => Some(w - 1),
            None => None,
        };
        for (c, f) in fields.iter().enumerate() {
            if Some(c) == label_at {
                label_tokens.push((*f).to_string());
                continue;
            }
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                line: lineno,
                column: c + 1,
                message: format!("non-numeric field {f:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    column: c + 1,
                    message: format!("non-finite value {f:?}"),
                });
            }
            coords.push(v);
        }
    }
    let Some(w) = width else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no data rows".into(),
        });
    };
    let d = if label_column.is_some() { w - 1 } else { w };
    if d == 0 {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no feature columns".into(),
        });
    }
    let labels = label_column.map(|_| labels_from_tokens(&label_tokens));
    Dataset::from_flat("", d, coords, labels)
}

/// Integer labels kept verbatim; otherwise numbered by first appearance.
pub fn labels_from_tokens(tokens: &[String]) -> Vec<usize> {
    let ints: Option<Vec<usize>> = tokens.iter().map(|t| t.parse::<usize>().ok()).collect();
    if let Some(ints) = ints {
        return ints;
    }
    let mut ids: HashMap<&str, usize> = HashMap::new();
    tokens
        .iter()
        .map(|t| {
            let next = ids.len();
            *ids.entry(t.as_str()).or_insert(next)
        })
        .collect()
}

/// Reads a label file holding one label per line, after any header lines
/// that do not parse as a label (the layout of `.pa` partition files).
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let start = rows
        .iter()
        .rposition(|l| l.parse::<usize>().is_err())
        .map_or(0, |p| p + 1);
    let tokens: Vec<String> = rows[start..].iter().map(|s| s.to_string()).collect();
    if tokens.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("no labels in {}", path.display()),
        });
    }
    Ok(labels_from_tokens(&tokens))
}

/// Comma-separated text, label (if any) as the last column. Values are
/// written with the shortest representation that parses back exactly.
pub fn to_csv(dataset: &Dataset) -> String {
    let mut out = String::new();
    for (i, p) in dataset.points().enumerate() {
        for (j, v) in p.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:?}");
        }
        if let Some(l) = dataset.labels() {
            let _ = write!(out, ",{}", l[i]);
        }
        out.push('\n');
    }
    out
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_csv(dataset)).map_err(|e| Error::io(path, e))
}
