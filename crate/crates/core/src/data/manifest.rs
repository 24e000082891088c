//! Benchmark dataset manifests.
//!
//! A manifest is a TOML file listing datasets in order:
//!
//! ```toml
//! [[dataset]]
//! name = "R15"
//! file = "R15.txt"
//! label_column = "last"
//! expected_n = 600
//! expected_d = 2
//! expected_k = 15
//! ```
//!
//! A dataset comes either from `file` (relative paths resolve against the
//! data directory), optionally with a `labels` sidecar, or from `generator`
//! with `n`, `k` and `seed`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::csv::{load_csv, load_labels, LabelColumn};
use super::synth::{generate_synthetic, GeneratorKind, GeneratorParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

const TABLE1: &str = include_str!("../../manifests/table1.toml");

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    File {
        path: PathBuf,
        label_column: Option<LabelColumn>,
        labels: Option<PathBuf>,
    },
    Generator {
        kind: GeneratorKind,
        params: GeneratorParams,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub name: String,
    pub aliases: Vec<String>,
    pub source: DatasetSource,
    pub expected_n: Option<usize>,
    pub expected_d: Option<usize>,
    pub expected_k: Option<usize>,
    pub has_labels: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    dataset: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    #[serde(default)]
    aliases: Vec<String>,
    file: Option<PathBuf>,
    label_column: Option<toml::Value>,
    labels: Option<PathBuf>,
    generator: Option<String>,
    n: Option<usize>,
    k: Option<usize>,
    seed: Option<u64>,
    expected_n: Option<usize>,
    expected_d: Option<usize>,
    expected_k: Option<usize>,
    has_labels: Option<bool>,
}

fn manifest_error(name: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        dataset: name.to_string(),
        message: message.into(),
    }
}

impl DatasetManifest {
    /// Whether `key` names this dataset, ignoring ASCII case.
    pub fn matches(&self, key: &str) -> bool {
        self.name.eq_ignore_ascii_case(key) || self.aliases.iter().any(|a| a.eq_ignore_ascii_case(key))
    }

    /// Loads the dataset and checks it against the expected shape.
    pub fn load(&self, data_dir: &Path) -> Result<Dataset> {
        let ds = match &self.source {
            DatasetSource::File {
                path,
                label_column,
                labels,
            } => {
                let path = data_dir.join(path);
                let mut ds = load_csv(&path, *label_column)?;
                if let Some(sidecar) = labels {
                    let l = load_labels(data_dir.join(sidecar))?;
                    ds = Dataset::from_flat("", ds.dim(), ds.coords().to_vec(), Some(l))
                        .map_err(|e| manifest_error(&self.name, e.to_string()))?;
                }
                ds
            }
            DatasetSource::Generator { kind, params } => generate_synthetic(*kind, params)?,
        }
        .with_name(self.name.clone());
        self.validate(&ds)?;
        Ok(ds)
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        let check = |what: &str, expected: Option<usize>, got: usize| match expected {
            Some(e) if e != got => Err(manifest_error(
                &self.name,
                format!("expected {what} = {e}, found {got}"),
            )),
            _ => Ok(()),
        };
        check("n", self.expected_n, ds.len())?;
        check("d", self.expected_d, ds.dim())?;
        match ds.true_k() {
            Some(k) => check("k", self.expected_k, k)?,
            None if self.has_labels => {
                return Err(manifest_error(&self.name, "labels expected but none loaded"))
            }
            None => {}
        }
        Ok(())
    }
}

fn convert(raw: RawEntry) -> Result<DatasetManifest> {
    let name = raw.name;
    let source = match (raw.file, raw.generator) {
        (Some(_), Some(_)) => {
            return Err(manifest_error(&name, "give either file or generator, not both"))
        }
        (None, None) => return Err(manifest_error(&name, "missing file or generator")),
        (Some(path), None) => {
            let label_column = match raw.label_column {
                None => None,
                Some(toml::Value::String(s)) if s == "last" => Some(LabelColumn::Last),
                Some(toml::Value::String(s)) if s == "none" => None,
                Some(toml::Value::Integer(i)) if i >= 0 => Some(LabelColumn::Index(i as usize)),
                Some(other) => {
                    return Err(manifest_error(
                        &name,
                        format!("label_column must be \"last\", \"none\" or an index, got {other}"),
                    ))
                }
            };
            DatasetSource::File {
                path,
                label_column,
                labels: raw.labels,
            }
        }
        (None, Some(g)) => DatasetSource::Generator {
            kind: g.parse()?,
            params: GeneratorParams {
                n: raw.n,
                k: raw.k,
                seed: raw.seed.unwrap_or(0),
                ..GeneratorParams::default()
            },
        },
    };
    let has_labels = raw.has_labels.unwrap_or(match &source {
        DatasetSource::File {
            label_column,
            labels,
            ..
        } => label_column.is_some() || labels.is_some(),
        DatasetSource::Generator { .. } => true,
    });
    Ok(DatasetManifest {
        name,
        aliases: raw.aliases,
        source,
        expected_n: raw.expected_n,
        expected_d: raw.expected_d,
        expected_k: raw.expected_k,
        has_labels,
    })
}

/// Parses manifest text, keeping entry order.
pub fn parse_manifest(text: &str) -> Result<Vec<DatasetManifest>> {
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| line_col(text, s.start))
            .unwrap_or((1, 1));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    raw.dataset.into_iter().map(convert).collect()
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, column)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<DatasetManifest>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text)
}

/// The ten benchmark datasets, in table order.
pub fn builtin_manifest() -> Vec<DatasetManifest> {
    parse_manifest(TABLE1).expect("bundled manifest parses")
}

/// Finds a dataset by name or alias.
pub fn find<'a>(manifests: &'a [DatasetManifest], key: &str) -> Option<&'a DatasetManifest> {
    manifests.iter().find(|m| m.matches(key))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_ten_rows() {
        let m = builtin_manifest();
        assert_eq!(m.len(), 10);
        assert!(find(&m, "aggregation").is_some());
        assert_eq!(find(&m, "wine").unwrap().expected_d, Some(13));
        assert_eq!(find(&m, "r15").unwrap().expected_k, Some(15));
    }

    #[test]
    fn entries_keep_order_and_validate() {
        let text = r#"
[[dataset]]
name = "b"
generator = "blobs"
n = 40
k = 2
seed = 3
expected_n = 40
expected_k = 2

[[dataset]]
name = "a"
file = "a.csv"
label_column = 0
"#;
        let m = parse_manifest(text).unwrap();
        assert_eq!(m[0].name, "b");
        assert_eq!(m[1].name, "a");
        assert!(matches!(
            m[1].source,
            DatasetSource::File {
                label_column: Some(LabelColumn::Index(0)),
                ..
            }
        ));
        let ds = m[0].load(Path::new(".")).unwrap();
        assert_eq!(ds.len(), 40);
    }

    #[test]
    fn shape_mismatch_is_a_validation_error() {
        let m = parse_manifest(
            "[[dataset]]\nname = \"x\"\ngenerator = \"blobs\"\nn = 10\nexpected_n = 11\n",
        )
        .unwrap();
        assert!(matches!(m[0].load(Path::new(".")), Err(Error::Validation { .. })));
    }

    #[test]
    fn syntax_errors_report_a_line() {
        match parse_manifest("[[dataset]]\nname = \n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_manifest("[[dataset]]\nname = \"x\"\n").is_err());
    }
}
