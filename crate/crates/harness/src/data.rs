//! Data sources: CSV files, seeded synthetic generators, and the decision
//! stump hypothesis set built over classification data.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mirrorboost::{Matrix, MinmaxProblem, RegressionProblem, TrainingSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    Separable,
    Nonseparable,
    Regression,
    Game,
}

impl SyntheticKind {
    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::Separable => "separable",
            SyntheticKind::Nonseparable => "nonseparable",
            SyntheticKind::Regression => "regression",
            SyntheticKind::Game => "game",
        }
    }

    /// Size keys accepted in a spec string, for rows and columns.
    fn size_keys(self) -> (&'static str, &'static str) {
        match self {
            SyntheticKind::Separable | SyntheticKind::Nonseparable => ("m", "d"),
            SyntheticKind::Regression => ("n", "p"),
            SyntheticKind::Game => ("m", "n"),
        }
    }

    fn default_size(self) -> (usize, usize) {
        match self {
            SyntheticKind::Separable | SyntheticKind::Nonseparable => (40, 4),
            SyntheticKind::Regression => (50, 20),
            SyntheticKind::Game => (6, 6),
        }
    }

    fn min_rows(self) -> usize {
        match self {
            SyntheticKind::Nonseparable => 3,
            SyntheticKind::Separable => 2,
            _ => 1,
        }
    }
}

impl FromStr for SyntheticKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separable" => Ok(SyntheticKind::Separable),
            "nonseparable" => Ok(SyntheticKind::Nonseparable),
            "regression" => Ok(SyntheticKind::Regression),
            "game" => Ok(SyntheticKind::Game),
            other => Err(HarnessError::Usage(format!(
                "unknown synthetic kind '{other}' (expected separable, nonseparable, regression or game)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub seed: u64,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            rows: None,
            cols: None,
        }
    }

    /// `(rows, cols)` with defaults filled in.
    pub fn size(&self) -> (usize, usize) {
        let (r, c) = self.kind.default_size();
        (self.rows.unwrap_or(r), self.cols.unwrap_or(c))
    }

    pub fn validate(&self) -> Result<()> {
        let (rows, cols) = self.size();
        if rows < self.kind.min_rows() || cols == 0 {
            let (rk, ck) = self.kind.size_keys();
            return Err(HarnessError::Usage(format!(
                "synthetic {} needs {rk} >= {} and {ck} >= 1",
                self.kind.name(),
                self.kind.min_rows()
            )));
        }
        Ok(())
    }
}

/// Where an experiment's data comes from.
///
/// Written as `synthetic:<kind>:seed=N[,key=value]*` or as a CSV path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DataSource {
    Csv(PathBuf),
    Synthetic(SyntheticSpec),
}

impl FromStr for DataSource {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("synthetic:") else {
            if s.is_empty() {
                return Err(HarnessError::Usage("empty data source".into()));
            }
            return Ok(DataSource::Csv(PathBuf::from(s)));
        };
        let (kind, params) = match rest.split_once(':') {
            Some((k, p)) => (k, p),
            None => (rest, ""),
        };
        let mut spec = SyntheticSpec::new(kind.parse()?, 0);
        let (rk, ck) = spec.kind.size_keys();
        for pair in params.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                HarnessError::Usage(format!("expected key=value in data source, got '{pair}'"))
            })?;
            let bad = || HarnessError::Usage(format!("invalid value for '{key}': '{value}'"));
            match key {
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                k if k == rk => spec.rows = Some(value.parse().map_err(|_| bad())?),
                k if k == ck => spec.cols = Some(value.parse().map_err(|_| bad())?),
                _ => {
                    return Err(HarnessError::Usage(format!(
                        "unknown key '{key}' for synthetic {} (expected seed, {rk}, {ck})",
                        spec.kind.name()
                    )))
                }
            }
        }
        spec.validate()?;
        Ok(DataSource::Synthetic(spec))
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::Csv(p) => write!(f, "{}", p.display()),
            DataSource::Synthetic(s) => {
                let (rk, ck) = s.kind.size_keys();
                write!(f, "synthetic:{}:seed={}", s.kind.name(), s.seed)?;
                if let Some(r) = s.rows {
                    write!(f, ",{rk}={r}")?;
                }
                if let Some(c) = s.cols {
                    write!(f, ",{ck}={c}")?;
                }
                Ok(())
            }
        }
    }
}

impl TryFrom<String> for DataSource {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DataSource> for String {
    fn from(d: DataSource) -> String {
        d.to_string()
    }
}

/// Labelled examples, one feature row per example, labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledData {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl LabeledData {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub design: Vec<Vec<f64>>,
    pub response: Vec<f64>,
}

impl RegressionData {
    /// Centers every column and the response, then (optionally) scales each
    /// column to unit ℓ2 norm.
    pub fn preprocess(&mut self, center: bool, scale: bool) -> Result<()> {
        let n = self.response.len();
        let p = self.design.first().map_or(0, Vec::len);
        if center {
            for j in 0..p {
                let mean = self.design.iter().map(|r| r[j]).sum::<f64>() / n as f64;
                self.design.iter_mut().for_each(|r| r[j] -= mean);
            }
            let mean = self.response.iter().sum::<f64>() / n as f64;
            self.response.iter_mut().for_each(|y| *y -= mean);
        }
        if scale {
            for j in 0..p {
                let norm = self.design.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(HarnessError::Data(format!(
                        "column {j} is zero and cannot be scaled"
                    )));
                }
                self.design.iter_mut().for_each(|r| r[j] /= norm);
            }
        }
        Ok(())
    }

    pub fn into_problem(self) -> Result<RegressionProblem> {
        let design = Matrix::from_rows(&self.design).map_err(data_error)?;
        RegressionProblem::new(design, self.response).map_err(data_error)
    }
}

fn data_error(e: mirrorboost::Error) -> HarnessError {
    HarnessError::Data(e.to_string())
}

/// Optional header and numeric rows of a CSV file.
pub type NumericCsv = (Option<Vec<String>>, Vec<Vec<f64>>);

/// Reads a [`NumericCsv`].
///
/// The first row is taken as a header when none of its cells parse as a
/// number. Every other cell must be a finite number.
pub fn read_numeric_csv(path: &Path) -> Result<NumericCsv> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut header = None;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => HarnessError::io(path, std::io::Error::other(e.to_string())),
            _ => HarnessError::Data(format!("{}: {e}", path.display())),
        })?;
        if line == 0 && record.iter().all(|c| c.parse::<f64>().is_err()) {
            header = Some(record.iter().map(str::to_owned).collect());
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(HarnessError::Data(format!(
                    "{}: line {}, column {}: '{cell}' is not a finite number",
                    path.display(),
                    line + 1,
                    col + 1
                ))),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Numeric feature columns followed by a final label column in `{−1, +1}`.
pub fn load_classification_csv(path: &Path) -> Result<LabeledData> {
    let (_, rows) = read_numeric_csv(path)?;
    if rows.len() < 2 {
        return Err(HarnessError::Data(format!(
            "{}: need at least 2 examples, found {}",
            path.display(),
            rows.len()
        )));
    }
    if rows[0].len() < 2 {
        return Err(HarnessError::Data(format!(
            "{}: need at least one feature column and a label column",
            path.display()
        )));
    }
    let mut features = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (i, mut row) in rows.into_iter().enumerate() {
        let y = row.pop().expect("non-empty row");
        if y != 1.0 && y != -1.0 {
            return Err(HarnessError::Data(format!(
                "{}: example {}: label {y} is not -1 or +1",
                path.display(),
                i + 1
            )));
        }
        labels.push(y);
        features.push(row);
    }
    Ok(LabeledData { features, labels })
}

/// Numeric predictor columns followed by the response column.
pub fn load_regression_csv(path: &Path) -> Result<RegressionData> {
    let (_, mut rows) = read_numeric_csv(path)?;
    if rows.is_empty() || rows[0].len() < 2 {
        return Err(HarnessError::Data(format!(
            "{}: need at least one row with a predictor and a response",
            path.display()
        )));
    }
    let response = rows
        .iter_mut()
        .map(|r| r.pop().expect("non-empty row"))
        .collect();
    Ok(RegressionData {
        design: rows,
        response,
    })
}

/// A payoff matrix, one row per primal coordinate.
pub fn load_game_csv(path: &Path) -> Result<Matrix> {
    let (_, rows) = read_numeric_csv(path)?;
    if rows.is_empty() {
        return Err(HarnessError::Data(format!(
            "{}: empty payoff matrix",
            path.display()
        )));
    }
    Matrix::from_rows(&rows).map_err(data_error)
}

/// A base classifier over raw feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseClassifier {
    Constant {
        sign: f64,
    },
    /// `sign` if `x[feature] > threshold`, else `−sign`.
    Stump {
        feature: usize,
        threshold: f64,
        sign: f64,
    },
}

impl BaseClassifier {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match *self {
            BaseClassifier::Constant { sign } => sign,
            BaseClassifier::Stump {
                feature,
                threshold,
                sign,
            } => {
                if x[feature] > threshold {
                    sign
                } else {
                    -sign
                }
            }
        }
    }
}

/// The stump hypothesis set and the boosting instance it induces.
#[derive(Debug, Clone)]
pub struct StumpSet {
    /// `classifiers[j]` generates column `j` of the feature matrix.
    pub classifiers: Vec<BaseClassifier>,
    pub training: TrainingSet,
}

/// Decision stumps with thresholds at midpoints of consecutive distinct
/// sorted feature values, both orientations, plus the constants `±1`.
/// Classifiers that agree on every training example are kept once, first
/// occurrence wins.
pub fn build_stumps(data: &LabeledData) -> Result<StumpSet> {
    if data.len() < 2 {
        return Err(HarnessError::Data(format!(
            "need at least 2 examples, found {}",
            data.len()
        )));
    }
    let mut candidates = vec![
        BaseClassifier::Constant { sign: 1.0 },
        BaseClassifier::Constant { sign: -1.0 },
    ];
    for feature in 0..data.dim() {
        let mut values: Vec<f64> = data.features.iter().map(|x| x[feature]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let threshold = pair[0] + 0.5 * (pair[1] - pair[0]);
            for sign in [1.0, -1.0] {
                candidates.push(BaseClassifier::Stump {
                    feature,
                    threshold,
                    sign,
                });
            }
        }
    }

    let mut seen = HashSet::new();
    let mut classifiers = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for h in candidates {
        let column: Vec<f64> = data.features.iter().map(|x| h.predict(x)).collect();
        let key: Vec<bool> = column.iter().map(|v| *v > 0.0).collect();
        if seen.insert(key) {
            classifiers.push(h);
            columns.push(column);
        }
    }
    let predictions = Matrix::from_columns(&columns).map_err(data_error)?;
    let training = TrainingSet::from_predictions(&data.labels, &predictions).map_err(data_error)?;
    debug_assert_eq!(training.n(), classifiers.len());
    Ok(StumpSet {
        classifiers,
        training,
    })
}

/// Separable classification: feature 0 carries the label with a gap of 0.2
/// around 0.5, so a stump on it has margin 1 on every example. Examples 0
/// and 1 are forced to opposite classes.
pub fn synthetic_separable(m: usize, d: usize, seed: u64) -> LabeledData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for i in 0..m {
        let y: f64 = match i {
            0 => 1.0,
            1 => -1.0,
            _ if rng.random_bool(0.5) => 1.0,
            _ => -1.0,
        };
        let mut x: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        x[0] = if y > 0.0 {
            rng.random_range(0.6..1.0)
        } else {
            rng.random_range(0.0..0.4)
        };
        features.push(x);
        labels.push(y);
    }
    LabeledData { features, labels }
}

/// Separable data on `m − 1` examples plus a copy of example 0 with the
/// opposite label, so no hypothesis has a positive margin on both.
pub fn synthetic_nonseparable(m: usize, d: usize, seed: u64) -> LabeledData {
    let mut data = synthetic_separable(m - 1, d, seed);
    let x0 = data.features[0].clone();
    let y0 = data.labels[0];
    data.features.push(x0);
    data.labels.push(-y0);
    data
}

/// Dense Gaussian design, sparse planted coefficients
/// `β*_j = 1/(j+1)` for `j < 5`, and Gaussian noise with σ = 0.5.
pub fn synthetic_regression(n: usize, p: usize, seed: u64) -> RegressionData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let design: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| normal.sample(&mut rng)).collect())
        .collect();
    let response = design
        .iter()
        .map(|x| {
            let signal: f64 = x
                .iter()
                .take(5)
                .enumerate()
                .map(|(j, v)| v / (j as f64 + 1.0))
                .sum();
            signal + 0.5 * normal.sample(&mut rng)
        })
        .collect();
    RegressionData { design, response }
}

/// Payoff entries uniform on `[−1, 1]`.
pub fn synthetic_game(m: usize, n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..m * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Matrix::new(m, n, data).expect("positive sizes")
}

/// Generated data in the shape a CSV loader would produce.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Classification(LabeledData),
    Regression(RegressionData),
    Game(Matrix),
}

pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let (rows, cols) = spec.size();
    Ok(match spec.kind {
        SyntheticKind::Separable => {
            Dataset::Classification(synthetic_separable(rows, cols, spec.seed))
        }
        SyntheticKind::Nonseparable => {
            Dataset::Classification(synthetic_nonseparable(rows, cols, spec.seed))
        }
        SyntheticKind::Regression => {
            Dataset::Regression(synthetic_regression(rows, cols, spec.seed))
        }
        SyntheticKind::Game => Dataset::Game(synthetic_game(rows, cols, spec.seed)),
    })
}

/// Writes a dataset as CSV with a header row. Values use Rust's shortest
/// round-trip formatting, so reading the file back gives identical floats.
pub fn write_csv<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| HarnessError::io("<csv output>", std::io::Error::other(e.to_string()));
    let (header, rows): (Vec<String>, Vec<Vec<f64>>) = match dataset {
        Dataset::Classification(d) => {
            let mut h: Vec<String> = (0..d.dim()).map(|j| format!("x{j}")).collect();
            h.push("label".into());
            let rows = d
                .features
                .iter()
                .zip(&d.labels)
                .map(|(x, y)| x.iter().copied().chain([*y]).collect())
                .collect();
            (h, rows)
        }
        Dataset::Regression(d) => {
            let p = d.design.first().map_or(0, Vec::len);
            let mut h: Vec<String> = (0..p).map(|j| format!("x{j}")).collect();
            h.push("y".into());
            let rows = d
                .design
                .iter()
                .zip(&d.response)
                .map(|(x, y)| x.iter().copied().chain([*y]).collect())
                .collect();
            (h, rows)
        }
        Dataset::Game(a) => (
            (0..a.cols()).map(|j| format!("c{j}")).collect(),
            (0..a.rows()).map(|i| a.row(i).to_vec()).collect(),
        ),
    };
    w.write_record(&header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv output>", e))?;
    Ok(())
}

/// Wraps a payoff matrix as a game over the simplex pair.
pub fn game_problem(payoff: Matrix) -> MinmaxProblem {
    MinmaxProblem::new(
        payoff,
        mirrorboost::PrimalDomain::Simplex,
        mirrorboost::DualDomain::Simplex,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_source_round_trip() {
        for s in [
            "synthetic:separable:seed=7",
            "synthetic:regression:seed=3,n=20,p=40",
            "synthetic:game:seed=0,m=3",
            "data/train.csv",
        ] {
            let d: DataSource = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert_eq!(
            "synthetic:nonseparable".parse::<DataSource>().unwrap(),
            DataSource::Synthetic(SyntheticSpec::new(SyntheticKind::Nonseparable, 0))
        );
        assert!("synthetic:separable:seed=x".parse::<DataSource>().is_err());
        assert!("synthetic:separable:p=3".parse::<DataSource>().is_err());
        assert!("synthetic:moons:seed=1".parse::<DataSource>().is_err());
        assert!("synthetic:nonseparable:m=2".parse::<DataSource>().is_err());
    }

    #[test]
    fn two_points_one_feature_is_separable() {
        let data = LabeledData {
            features: vec![vec![0.0], vec![1.0]],
            labels: vec![1.0, -1.0],
        };
        let s = build_stumps(&data).unwrap();
        // ±1 constants and the two orientations of the single threshold.
        assert_eq!(s.classifiers.len(), 4);
        let a = s.training.matrix();
        assert!((0..a.cols()).any(|j| (0..a.rows()).all(|i| a.get(i, j) > 0.0)));
    }

    #[test]
    fn xor_has_no_positive_column() {
        let data = LabeledData {
            features: vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ],
            labels: vec![-1.0, 1.0, 1.0, -1.0],
        };
        let s = build_stumps(&data).unwrap();
        let a = s.training.matrix();
        assert!(!(0..a.cols()).any(|j| (0..a.rows()).all(|i| a.get(i, j) > 0.0)));
    }

    #[test]
    fn stump_set_is_closed_under_negation() {
        let data = synthetic_separable(15, 3, 2);
        let s = build_stumps(&data).unwrap();
        assert_eq!(s.training.original_columns(), s.training.n());
        let a = s.training.matrix();
        for j in 0..a.cols() {
            let neg: Vec<f64> = a.column(j).iter().map(|v| -v).collect();
            assert!((0..a.cols()).any(|k| a.column(k) == neg));
        }
    }

    #[test]
    fn planted_column_has_positive_margin() {
        let data = synthetic_separable(30, 4, 9);
        let s = build_stumps(&data).unwrap();
        let a = s.training.matrix();
        assert!((0..a.cols()).any(|j| (0..a.rows()).all(|i| a.get(i, j) > 0.0)));
    }

    #[test]
    fn nonseparable_has_contradictory_pair() {
        let d = synthetic_nonseparable(10, 3, 4);
        assert_eq!(d.len(), 10);
        assert_eq!(d.features[0], d.features[9]);
        assert_eq!(d.labels[0], -d.labels[9]);
        let s = build_stumps(&d).unwrap();
        let a = s.training.matrix();
        assert!(!(0..a.cols()).any(|j| (0..a.rows()).all(|i| a.get(i, j) > 0.0)));
    }

    #[test]
    fn wide_regression_fits_exactly() {
        let d = synthetic_regression(8, 20, 3);
        let y = d.response.clone();
        let rp = d.into_problem().unwrap();
        let norm_y = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((rp.least_squares_norm().unwrap() - norm_y).abs() < 1e-9);
    }

    #[test]
    fn preprocessing_centers_and_scales() {
        let mut d = RegressionData {
            design: vec![vec![1.0, 2.0], vec![3.0, 2.5], vec![5.0, 7.0]],
            response: vec![1.0, 2.0, 6.0],
        };
        d.preprocess(true, true).unwrap();
        for j in 0..2 {
            let mean: f64 = d.design.iter().map(|r| r[j]).sum();
            let norm: f64 = d.design.iter().map(|r| r[j] * r[j]).sum();
            assert!(mean.abs() < 1e-12 && (norm - 1.0).abs() < 1e-12);
        }
        assert!(d.response.iter().sum::<f64>().abs() < 1e-12);

        let mut constant = RegressionData {
            design: vec![vec![1.0], vec![1.0]],
            response: vec![0.0, 1.0],
        };
        assert!(constant.preprocess(true, true).is_err());
    }
}
