//! Tabular classification data: loading, cross-validation splits, bootstrap
//! resampling and the two-line synthetic problem.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{self, stream};

/// Index into [`Schema::class_names`].
pub type ClassId = usize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical { categories: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

impl Column {
    pub fn numeric(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Numeric,
        }
    }

    pub fn categorical(name: impl Into<String>, categories: Vec<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Categorical { categories },
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, ColumnKind::Numeric)
    }

    /// Number of categories, `None` for numeric columns.
    pub fn cardinality(&self) -> Option<usize> {
        match &self.kind {
            ColumnKind::Numeric => None,
            ColumnKind::Categorical { categories } => Some(categories.len()),
        }
    }

    pub fn category_name(&self, index: u32) -> Option<&str> {
        match &self.kind {
            ColumnKind::Numeric => None,
            ColumnKind::Categorical { categories } => {
                categories.get(index as usize).map(String::as_str)
            }
        }
    }
}

/// Column layout and class vocabulary shared by a dataset and every model
/// trained on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<Column>,
    pub label: String,
    pub class_names: Vec<String>,
}

impl Schema {
    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_id(&self, name: &str) -> Option<ClassId> {
        self.class_names.iter().position(|c| c == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureValue {
    Numeric(f64),
    Category(u32),
}

impl FeatureValue {
    pub fn as_numeric(self) -> Option<f64> {
        match self {
            FeatureValue::Numeric(v) => Some(v),
            FeatureValue::Category(_) => None,
        }
    }

    pub fn as_category(self) -> Option<u32> {
        match self {
            FeatureValue::Category(c) => Some(c),
            FeatureValue::Numeric(_) => None,
        }
    }
}

/// One row of feature values, one per schema column.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    values: Vec<FeatureValue>,
}

impl Instance {
    pub fn new(values: Vec<FeatureValue>) -> Self {
        Instance { values }
    }

    pub fn numeric(values: &[f64]) -> Self {
        Instance::new(values.iter().map(|&v| FeatureValue::Numeric(v)).collect())
    }

    pub fn values(&self) -> &[FeatureValue] {
        &self.values
    }

    #[inline]
    pub fn get(&self, column: usize) -> FeatureValue {
        self.values[column]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A labelled, weighted classification dataset.
///
/// Rows, labels and weights always have the same non-zero length, labels are
/// valid class ids and weights are non-negative.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    schema: Schema,
    rows: Vec<Instance>,
    labels: Vec<ClassId>,
    weights: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset, checking every invariant. `weights` defaults to 1.0
    /// per row.
    pub fn new(
        schema: Schema,
        rows: Vec<Instance>,
        labels: Vec<ClassId>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let weights = weights.unwrap_or_else(|| vec![1.0; rows.len()]);
        if rows.is_empty() {
            return Err(Error::InvalidDataset("dataset has no rows".into()));
        }
        if rows.len() != labels.len() || rows.len() != weights.len() {
            return Err(Error::InvalidDataset(format!(
                "{} rows, {} labels, {} weights",
                rows.len(),
                labels.len(),
                weights.len()
            )));
        }
        if schema.columns.is_empty() {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.n_columns() {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: schema.n_columns(),
                    found: row.len(),
                });
            }
            for (value, column) in row.values().iter().zip(&schema.columns) {
                let ok = match (value, &column.kind) {
                    (FeatureValue::Numeric(v), ColumnKind::Numeric) => v.is_finite(),
                    (FeatureValue::Category(c), ColumnKind::Categorical { categories }) => {
                        (*c as usize) < categories.len()
                    }
                    _ => false,
                };
                if !ok {
                    return Err(Error::BadCell {
                        row: i,
                        column: column.name.clone(),
                        message: format!("value {value:?} does not fit the column"),
                    });
                }
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= schema.n_classes()) {
            return Err(Error::InvalidDataset(format!(
                "label {bad} out of range for {} classes",
                schema.n_classes()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDataset(format!("invalid weight {w}")));
        }
        Ok(Dataset {
            schema,
            rows,
            labels,
            weights,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Instance] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> &Instance {
        &self.rows[index]
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.schema.n_columns()
    }

    pub fn n_classes(&self) -> usize {
        self.schema.n_classes()
    }

    /// Unweighted per-class row counts.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Unweighted class frequencies; they sum to one.
    pub fn class_priors(&self) -> Vec<f64> {
        let n = self.n_rows() as f64;
        self.class_counts()
            .into_iter()
            .map(|c| c as f64 / n)
            .collect()
    }

    /// Rows at `indices` (duplicates allowed), sharing this dataset's schema.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        assert!(!indices.is_empty(), "subset must not be empty");
        Dataset {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            weights: indices.iter().map(|&i| self.weights[i]).collect(),
        }
    }

    /// Writes the dataset as CSV with the label in the last column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.schema.columns.iter().map(|c| c.name.as_str()).collect();
        header.push(&self.schema.label);
        out.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for (row, &label) in self.rows.iter().zip(&self.labels) {
            record.clear();
            for (value, column) in row.values().iter().zip(&self.schema.columns) {
                record.push(match value {
                    FeatureValue::Numeric(v) => v.to_string(),
                    FeatureValue::Category(c) => column.category_name(*c).unwrap_or("").to_string(),
                });
            }
            record.push(self.schema.class_names[label].clone());
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(file)
    }
}

/// Loads a CSV file. The label column is chosen by name, or the last column
/// when `label` is `None`.
pub fn load_csv(path: impl AsRef<Path>, label: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, label)
}

/// Loads a CSV file, encoding it with an existing schema (for test files
/// scored by a model trained elsewhere). Columns are matched by name.
pub fn load_csv_with_schema(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv_with_schema(file, schema)
}

struct RawTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_raw<R: Read>(reader: R) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(Error::InvalidDataset(
            "need at least one feature column and a label column".into(),
        ));
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i,
                expected: header.len(),
                found: record.len(),
            });
        }
        let cells: Vec<String> = record.iter().map(str::to_string).collect();
        if let Some(j) = cells.iter().position(String::is_empty) {
            return Err(Error::MissingValue {
                row: i,
                column: header[j].clone(),
            });
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(Error::InvalidDataset("no data rows".into()));
    }
    Ok(RawTable { header, rows })
}

fn parse_real(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// CSV reader behind [`load_csv`].
pub fn read_csv<R: Read>(reader: R, label: Option<&str>) -> Result<Dataset> {
    let raw = read_raw(reader)?;
    let label_col = match label {
        Some(name) => raw
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownLabelColumn(name.to_string()))?,
        None => raw.header.len() - 1,
    };

    let mut columns = Vec::new();
    let mut encoders: Vec<Option<HashMap<&str, u32>>> = Vec::new();
    for (j, name) in raw.header.iter().enumerate() {
        if j == label_col {
            continue;
        }
        if raw.rows.iter().all(|r| parse_real(&r[j]).is_some()) {
            columns.push(Column::numeric(name.clone()));
            encoders.push(None);
        } else {
            let mut categories: Vec<String> = Vec::new();
            let mut index = HashMap::new();
            for r in &raw.rows {
                let cell = r[j].as_str();
                if !index.contains_key(cell) {
                    index.insert(cell, categories.len() as u32);
                    categories.push(cell.to_string());
                }
            }
            columns.push(Column::categorical(name.clone(), categories));
            encoders.push(Some(index));
        }
    }

    let mut class_names: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(raw.rows.len());
    let mut rows = Vec::with_capacity(raw.rows.len());
    for r in &raw.rows {
        let cell = &r[label_col];
        let id = match class_names.iter().position(|c| c == cell) {
            Some(id) => id,
            None => {
                class_names.push(cell.clone());
                class_names.len() - 1
            }
        };
        labels.push(id);
        let values = r
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != label_col)
            .zip(&encoders)
            .map(|((_, cell), enc)| match enc {
                None => FeatureValue::Numeric(parse_real(cell).expect("checked numeric")),
                Some(map) => FeatureValue::Category(map[cell.as_str()]),
            })
            .collect();
        rows.push(Instance::new(values));
    }
    if class_names.len() < 2 {
        return Err(Error::SingleClass(class_names.len()));
    }
    let schema = Schema {
        columns,
        label: raw.header[label_col].clone(),
        class_names,
    };
    Dataset::new(schema, rows, labels, None)
}

/// CSV reader behind [`load_csv_with_schema`].
pub fn read_csv_with_schema<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    let raw = read_raw(reader)?;
    let position = |name: &str| {
        raw.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Format(format!("column '{name}' missing from file")))
    };
    let label_col = position(&schema.label)?;
    let feature_cols = schema
        .columns
        .iter()
        .map(|c| position(&c.name))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(raw.rows.len());
    let mut labels = Vec::with_capacity(raw.rows.len());
    for (i, r) in raw.rows.iter().enumerate() {
        let label = &r[label_col];
        labels.push(schema.class_id(label).ok_or_else(|| Error::BadCell {
            row: i,
            column: schema.label.clone(),
            message: format!("unknown class '{label}'"),
        })?);
        let mut values = Vec::with_capacity(schema.n_columns());
        for (column, &j) in schema.columns.iter().zip(&feature_cols) {
            let cell = &r[j];
            let value = match &column.kind {
                ColumnKind::Numeric => {
                    FeatureValue::Numeric(parse_real(cell).ok_or_else(|| Error::BadCell {
                        row: i,
                        column: column.name.clone(),
                        message: format!("'{cell}' is not a number"),
                    })?)
                }
                ColumnKind::Categorical { categories } => FeatureValue::Category(
                    categories
                        .iter()
                        .position(|c| c == cell)
                        .ok_or_else(|| Error::BadCell {
                            row: i,
                            column: column.name.clone(),
                            message: format!("category '{cell}' not seen in training data"),
                        })? as u32,
                ),
            };
            values.push(value);
        }
        rows.push(Instance::new(values));
    }
    Dataset::new(schema.clone(), rows, labels, None)
}

/// One cross-validation fold. Index sets refer to rows of the source dataset.
#[derive(Clone, Debug)]
pub struct FoldSplit {
    pub fold_index: usize,
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Stratified k-fold split. Falls back to plain shuffled folds (with a
/// warning) when some class has fewer than `k` members.
pub fn stratified_kfold(data: &Dataset, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    let n = data.n_rows();
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the {n} available rows"
        )));
    }
    let mut rng = seeding::rng_for(seed, stream::FOLDS, 0);
    let counts = data.class_counts();
    let stratify = counts.iter().all(|&c| c == 0 || c >= k);

    // Rows are laid out class by class (each class shuffled), then dealt
    // round-robin, so every class lands in each fold floor or ceil times.
    let order: Vec<usize> = if stratify {
        let mut order = Vec::with_capacity(n);
        for class in 0..data.n_classes() {
            let mut members: Vec<usize> = (0..n).filter(|&i| data.labels()[i] == class).collect();
            members.shuffle(&mut rng);
            order.extend(members);
        }
        order
    } else {
        log::warn!("some class has fewer than {k} members; using unstratified folds");
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        order
    };

    let mut fold_of = vec![0usize; n];
    for (position, &row) in order.iter().enumerate() {
        fold_of[row] = position % k;
    }
    Ok((0..k)
        .map(|fold| {
            let (test_indices, train_indices): (Vec<usize>, Vec<usize>) =
                (0..n).partition(|&i| fold_of[i] == fold);
            FoldSplit {
                fold_index: fold,
                train: data.subset(&train_indices),
                test: data.subset(&test_indices),
                train_indices,
                test_indices,
            }
        })
        .collect())
}

/// Row indices of a bootstrap sample: `n` uniform draws with replacement.
pub fn bootstrap_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// A bootstrap resample of `data` of the same size. Weights are copied.
pub fn bootstrap_sample<R: Rng + ?Sized>(data: &Dataset, rng: &mut R) -> Dataset {
    data.subset(&bootstrap_indices(data.n_rows(), rng))
}

/// Class id of the red (majority) points of [`generate_synthetic`].
pub const RED: ClassId = 0;
/// Class id of the blue points of [`generate_synthetic`].
pub const BLUE: ClassId = 1;

/// Two-class points in the unit square scattered around two parallel
/// segments: red around `y = x - 0.2`, blue around `y = x + 0.2`. Noise is
/// Gaussian and perpendicular to the segments; coordinates are clipped to
/// `[0, 1]`. The ideal boundary is the diagonal `y = x`.
pub fn generate_synthetic(n_red: usize, n_blue: usize, noise_sd: f64, seed: u64) -> Result<Dataset> {
    if n_red == 0 || n_blue == 0 {
        return Err(Error::InvalidParameter("both classes need at least one point".into()));
    }
    if !noise_sd.is_finite() || noise_sd <= 0.0 {
        return Err(Error::InvalidParameter(format!("noise_sd must be positive, got {noise_sd}")));
    }
    let mut rng = seeding::rng_for(seed, stream::SYNTHETIC, 0);
    let noise = Normal::new(0.0, noise_sd).expect("positive sd");
    let offset = 0.2;
    let mut rows = Vec::with_capacity(n_red + n_blue);
    let mut labels = Vec::with_capacity(n_red + n_blue);
    for (class, count, shift) in [(RED, n_red, -offset), (BLUE, n_blue, offset)] {
        // Segment of y = x + shift that lies inside the unit square.
        let (lo, hi) = if shift < 0.0 { (-shift, 1.0) } else { (0.0, 1.0 - shift) };
        for _ in 0..count {
            let t = rng.gen_range(lo..=hi);
            let e = noise.sample(&mut rng) * std::f64::consts::FRAC_1_SQRT_2;
            let x = (t - e).clamp(0.0, 1.0);
            let y = (t + shift + e).clamp(0.0, 1.0);
            rows.push(Instance::numeric(&[x, y]));
            labels.push(class);
        }
    }
    let schema = Schema {
        columns: vec![Column::numeric("x"), Column::numeric("y")],
        label: "class".into(),
        class_names: vec!["red".into(), "blue".into()],
    };
    Dataset::new(schema, rows, labels, None)
}
