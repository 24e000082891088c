//! Loading, saving, normalizing and generating datasets.

mod csv;
mod manifest;
mod synth;

use std::path::{Path, PathBuf};

pub use self::csv::{
    labels_from_tokens, load_csv, load_labels, parse_csv, save_csv, to_csv, Delimiter, LabelColumn,
};
pub use self::manifest::{
    builtin_manifest, find, load_manifest, parse_manifest, DatasetManifest, DatasetSource,
};
pub use self::synth::{
    d0_connected_chain, generate_synthetic, ChainParams, GeneratorKind, GeneratorParams,
};

use crate::dataset::Dataset;

/// Environment variable naming the dataset cache directory.
pub const DATA_DIR_ENV: &str = "SARFC_DATA_DIR";

/// The dataset cache directory: `$SARFC_DATA_DIR`, else `./data`.
pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// Result of [`min_max_normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub dataset: Dataset,
    /// Dimensions with zero range, set to 0.5.
    pub constant_dims: Vec<usize>,
}

/// Maps each dimension affinely onto `[0, 1]`.
pub fn min_max_normalize(dataset: &Dataset) -> Normalized {
    let d = dataset.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in dataset.points() {
        for j in 0..d {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    let constant_dims: Vec<usize> = (0..d).filter(|&j| hi[j] - lo[j] <= 0.0).collect();
    let coords = dataset
        .coords()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let j = i % d;
            let range = hi[j] - lo[j];
            if range > 0.0 {
                ((x - lo[j]) / range).clamp(0.0, 1.0)
            } else {
                0.5
            }
        })
        .collect();
    let labels = dataset.labels().map(<[usize]>::to_vec);
    let dataset = Dataset::from_flat(dataset.name(), d, coords, labels)
        .expect("normalized coordinates are finite");
    Normalized {
        dataset,
        constant_dims,
    }
}

/// Resolves `key` as a manifest name or alias, else as a file path with the
/// label in the last column.
pub fn resolve(
    key: &str,
    manifests: &[DatasetManifest],
    data_dir: &Path,
) -> crate::error::Result<Dataset> {
    if let Some(m) = find(manifests, key) {
        return m.load(data_dir);
    }
    let path = Path::new(key);
    if path.is_file() {
        return load_csv(path, Some(LabelColumn::Last));
    }
    Err(crate::error::Error::InvalidInput(format!(
        "{key:?} is neither a known dataset nor a readable file"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_map_to_unit_interval() {
        let ds = Dataset::from_rows("x", &[vec![0.0, 3.0], vec![5.0, 3.0], vec![10.0, 3.0]], None)
            .unwrap();
        let out = min_max_normalize(&ds);
        assert_eq!(out.dataset.column(0), vec![0.0, 0.5, 1.0]);
        assert_eq!(out.dataset.column(1), vec![0.5; 3]);
        assert_eq!(out.constant_dims, vec![1]);
    }

    #[test]
    fn unit_data_is_unchanged() {
        let ds = Dataset::from_rows("x", &[vec![0.0], vec![0.25], vec![0.7], vec![1.0]], None)
            .unwrap();
        let out = min_max_normalize(&ds).dataset;
        for (a, b) in out.coords().iter().zip(ds.coords()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }
}
