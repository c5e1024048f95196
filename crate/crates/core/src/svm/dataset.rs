use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::RngStream;

const BCW_FEATURES: [&str; 9] = [
    "clump_thickness",
    "uniformity_cell_size",
    "uniformity_cell_shape",
    "marginal_adhesion",
    "single_epithelial_cell_size",
    "bare_nuclei",
    "bland_chromatin",
    "normal_nucleoli",
    "mitoses",
];

/// Image segmentation class names in alphabetical order; the position is the
/// class index.
pub const IS_CLASSES: [&str; 7] = ["BRICKFACE", "CEMENT", "FOLIAGE", "GRASS", "PATH", "SKY", "WINDOW"];

const IS_ATTRIBUTES: usize = 19;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatasetFormat {
    /// Breast Cancer Wisconsin (original): id, 9 attributes, class 2 or 4.
    Bcw,
    /// Image segmentation: class name followed by 19 attributes.
    ImageSegmentation,
}

impl DatasetFormat {
    pub fn name(self) -> &'static str {
        match self {
            DatasetFormat::Bcw => "bcw",
            DatasetFormat::ImageSegmentation => "image_segmentation",
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bcw" | "breast-cancer-wisconsin" => Ok(DatasetFormat::Bcw),
            "is" | "image_segmentation" | "image-segmentation" | "segmentation" => {
                Ok(DatasetFormat::ImageSegmentation)
            }
            other => Err(Error::Config(format!("unknown dataset format '{other}'"))),
        }
    }
}

/// Per-column standardization fitted on one dataset and applied to others.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub mean: Vec<f64>,
    /// Column standard deviation; constant columns store 1.
    pub std: Vec<f64>,
}

impl Normalization {
    pub fn fit(data: &Dataset) -> Result<Self> {
        let n = data.len();
        if n == 0 {
            return Err(Error::Config("cannot fit normalization on an empty dataset".into()));
        }
        let d = data.dimension();
        let mut mean = vec![0.0; d];
        for row in data.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut var = vec![0.0; d];
        for row in data.rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n as f64).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, data: &mut Dataset) -> Result<()> {
        if data.dimension() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                found: data.dimension(),
            });
        }
        let d = data.dimension();
        for row in data.features.chunks_exact_mut(d) {
            for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = (*v - m) / s;
            }
        }
        data.normalization = Some(self.clone());
        Ok(())
    }
}

/// A labelled feature matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    dimension: usize,
    class_names: Vec<String>,
    feature_names: Vec<String>,
    normalization: Option<Normalization>,
}

impl Dataset {
    /// Builds a dataset from rows; `class_names.len()` is the class count.
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        if class_names.len() < 2 {
            return Err(Error::Config("a classification dataset needs at least two classes".into()));
        }
        let dimension = feature_names.len();
        let mut features = Vec::with_capacity(rows.len() * dimension);
        for row in &rows {
            if row.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parameter("dataset features must be finite".into()));
            }
            features.extend_from_slice(row);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::Parameter(format!(
                "label {bad} is outside 0..{}",
                class_names.len()
            )));
        }
        Ok(Self {
            features,
            labels,
            dimension,
            class_names,
            feature_names,
            normalization: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.normalization.as_ref()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.features.chunks_exact(self.dimension.max(1))
    }

    /// Number of rows carrying each label.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// The rows at `indices`, in that order, without normalization.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.dimension);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self {
            features,
            labels,
            dimension: self.dimension,
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
            normalization: None,
        }
    }
}

/// Reads a dataset file in the layout of `format`.
pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<Dataset> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_dataset(&text, format)
}

/// Parses dataset text in the layout of `format`.
pub fn parse_dataset(text: &str, format: DatasetFormat) -> Result<Dataset> {
    match format {
        DatasetFormat::Bcw => parse_bcw(text),
        DatasetFormat::ImageSegmentation => parse_segmentation(text),
    }
}

fn parse_bcw(text: &str) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 11 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 11 fields, found {}", fields.len()),
            });
        }
        if fields[1..10].contains(&"?") {
            continue;
        }
        let row = fields[1..10]
            .iter()
            .map(|f| parse_number(f, line_no))
            .collect::<Result<Vec<f64>>>()?;
        let label = match fields[10] {
            "2" => 0,
            "4" => 1,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown class label '{other}'"),
                })
            }
        };
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: last_line,
            message: "no data rows".into(),
        });
    }
    Dataset::new(
        rows,
        labels,
        vec!["benign".into(), "malignant".into()],
        BCW_FEATURES.iter().map(|s| s.to_string()).collect(),
    )
}

fn parse_segmentation(text: &str) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut feature_names: Option<Vec<String>> = None;
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = parse_segmentation_row(&fields, line_no);
        match parsed {
            Ok((label, row)) => {
                rows.push(row);
                labels.push(label);
            }
            Err(err) if rows.is_empty() => {
                if fields.len() == IS_ATTRIBUTES && fields.iter().all(|f| f.parse::<f64>().is_err()) {
                    feature_names = Some(fields.iter().map(|f| f.to_ascii_lowercase()).collect());
                } else if fields.len() == IS_ATTRIBUTES + 1 && !is_header_like(&fields) {
                    return Err(err);
                }
            }
            Err(err) => return Err(err),
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: last_line,
            message: "no data rows".into(),
        });
    }
    let feature_names =
        feature_names.unwrap_or_else(|| (1..=IS_ATTRIBUTES).map(|i| format!("attribute_{i}")).collect());
    Dataset::new(
        rows,
        labels,
        IS_CLASSES.iter().map(|s| s.to_string()).collect(),
        feature_names,
    )
}

fn is_header_like(fields: &[&str]) -> bool {
    fields[1..].iter().all(|f| f.parse::<f64>().is_err())
}

fn parse_segmentation_row(fields: &[&str], line_no: usize) -> Result<(usize, Vec<f64>)> {
    if fields.len() != IS_ATTRIBUTES + 1 {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected {} fields, found {}", IS_ATTRIBUTES + 1, fields.len()),
        });
    }
    let name = fields[0].to_ascii_uppercase();
    let label = IS_CLASSES.iter().position(|c| *c == name).ok_or_else(|| Error::Parse {
        line: line_no,
        message: format!("unknown class label '{}'", fields[0]),
    })?;
    let row = fields[1..]
        .iter()
        .map(|f| parse_number(f, line_no))
        .collect::<Result<Vec<f64>>>()?;
    Ok((label, row))
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("'{field}' is not a finite number"),
        }),
    }
}

/// Train, validation and test partitions of one dataset, standardized with
/// statistics fitted on the training partition.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSplit {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

/// Partition sizes for `n` rows: 60 % and 20 % rounded down, remainder to test.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = n * 3 / 5;
    let validation = n / 5;
    (train, validation, n - train - validation)
}

/// Shuffles the rows with `seed`, partitions them 60/20/20 and standardizes
/// every partition with the training statistics.
pub fn split_dataset(data: &Dataset, seed: u64) -> Result<DataSplit> {
    if data.len() < 5 {
        return Err(Error::Config(format!(
            "a 60/20/20 split needs at least 5 rows, found {}",
            data.len()
        )));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    RngStream::new(seed).shuffle(&mut order);
    let (n_train, n_val, _) = split_sizes(data.len());
    let mut train = data.subset(&order[..n_train]);
    let mut validation = data.subset(&order[n_train..n_train + n_val]);
    let mut test = data.subset(&order[n_train + n_val..]);
    let norm = Normalization::fit(&train)?;
    norm.apply(&mut train)?;
    norm.apply(&mut validation)?;
    norm.apply(&mut test)?;
    Ok(DataSplit { train, validation, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> Dataset {
        let rows = (0..n).map(|i| vec![i as f64, 2.0 * i as f64 + 1.0, 5.0]).collect();
        let labels = (0..n).map(|i| i % 2).collect();
        Dataset::new(
            rows,
            labels,
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into(), "c".into()],
        )
        .unwrap()
    }

    #[test]
    fn bcw_rows_parse_and_missing_rows_drop() {
        let text = "1000025,5,1,1,1,2,1,3,1,1,2\n1057013,8,4,5,1,2,?,7,3,1,4\n\n1002945,5,4,4,5,7,10,3,2,1,4\n";
        let data = parse_dataset(text, DatasetFormat::Bcw).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.dimension(), 9);
        assert_eq!(data.labels(), &[0, 1]);
        assert_eq!(data.row(1)[5], 10.0);
    }

    #[test]
    fn bcw_errors_carry_line_numbers() {
        let bad_label = "1000025,5,1,1,1,2,1,3,1,1,2\n1000026,5,1,1,1,2,1,3,1,1,3\n";
        assert_eq!(
            parse_dataset(bad_label, DatasetFormat::Bcw).unwrap_err(),
            Error::Parse {
                line: 2,
                message: "unknown class label '3'".into()
            }
        );
        let short = "1000025,5,1,1\n";
        assert!(matches!(
            parse_dataset(short, DatasetFormat::Bcw),
            Err(Error::Parse { line: 1, .. })
        ));
        let not_number = "1000025,5,x,1,1,2,1,3,1,1,2\n";
        assert!(matches!(
            parse_dataset(not_number, DatasetFormat::Bcw),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_input_is_a_parse_error() {
        for format in [DatasetFormat::Bcw, DatasetFormat::ImageSegmentation] {
            assert!(matches!(parse_dataset("", format), Err(Error::Parse { .. })));
            assert!(matches!(parse_dataset("\n\n", format), Err(Error::Parse { .. })));
        }
    }

    #[test]
    fn segmentation_skips_headers_and_maps_classes_alphabetically() {
        let attrs = (0..19).map(|i| format!("A{i}")).collect::<Vec<_>>().join(",");
        let values = (0..19).map(|i| format!("{i}.5")).collect::<Vec<_>>().join(",");
        let text = format!("Image Segmentation data\n\n{attrs}\n\nSKY,{values}\nbrickface,{values}\nWINDOW,{values}\n");
        let data = parse_dataset(&text, DatasetFormat::ImageSegmentation).unwrap();
        assert_eq!(data.len(), 3);
        assert_eq!(data.dimension(), 19);
        assert_eq!(data.class_count(), 7);
        assert_eq!(data.labels(), &[5, 0, 6]);
        assert_eq!(data.feature_names()[0], "a0");
        assert_eq!(data.row(0)[18], 18.5);
    }

    #[test]
    fn segmentation_rejects_unknown_class_and_bad_rows_after_data() {
        let values = (0..19).map(|i| format!("{i}")).collect::<Vec<_>>().join(",");
        let unknown = format!("SKY,{values}\nROAD,{values}\n");
        assert!(matches!(
            parse_dataset(&unknown, DatasetFormat::ImageSegmentation),
            Err(Error::Parse { line: 2, .. })
        ));
        let unknown_first = format!("ROAD,{values}\n");
        assert!(matches!(
            parse_dataset(&unknown_first, DatasetFormat::ImageSegmentation),
            Err(Error::Parse { line: 1, .. })
        ));
        let short = format!("SKY,{values}\nSKY,1,2\n");
        assert!(matches!(
            parse_dataset(&short, DatasetFormat::ImageSegmentation),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn split_sizes_follow_rounding_rule() {
        assert_eq!(split_sizes(100), (60, 20, 20));
        assert_eq!(split_sizes(683), (409, 136, 138));
        assert_eq!(split_sizes(2310), (1386, 462, 462));
        assert_eq!(split_sizes(5), (3, 1, 1));
    }

    #[test]
    fn split_is_a_disjoint_cover_and_deterministic() {
        let data = toy(100);
        let a = split_dataset(&data, 3).unwrap();
        let b = split_dataset(&data, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.train.len(), a.validation.len(), a.test.len()), (60, 20, 20));
        // Column 0 of the raw data is the row index; invert the normalization
        // to recover which rows landed where.
        let norm = a.train.normalization().unwrap().clone();
        let mut seen = [false; 100];
        for part in [&a.train, &a.validation, &a.test] {
            for row in part.rows() {
                let i = (row[0] * norm.std[0] + norm.mean[0]).round() as usize;
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert_ne!(split_dataset(&data, 4).unwrap(), a);
    }

    #[test]
    fn split_needs_five_rows() {
        assert!(matches!(split_dataset(&toy(4), 0), Err(Error::Config(_))));
        assert!(split_dataset(&toy(5), 0).is_ok());
    }

    #[test]
    fn training_partition_is_standardized_and_constant_columns_vanish() {
        let split = split_dataset(&toy(50), 1).unwrap();
        let n = split.train.len() as f64;
        for c in 0..2 {
            let col: Vec<f64> = split.train.rows().map(|r| r[c]).collect();
            let mean = col.iter().sum::<f64>() / n;
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            assert!(mean.abs() < 1e-9);
            assert!((sd - 1.0).abs() < 1e-9);
        }
        for part in [&split.train, &split.validation, &split.test] {
            assert!(part.rows().all(|r| r[2] == 0.0));
        }
    }
}
