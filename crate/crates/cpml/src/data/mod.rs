//! Dataset ingestion, categorical encoding, splitting, and synthetic data.
//!
//! Values and labels are stored as dense 0-based indices; the string
//! dictionaries built during CSV loading (first-occurrence order) are kept on
//! the dataset so indices can be decoded back to the original strings.

pub mod uci;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng::{sub_rng, STREAM_SPLIT, STREAM_SYNTHETIC};
use crate::{Error, Result};

/// A dataset of purely categorical features with class labels.
///
/// `cells` holds the n×D value-index matrix row-major. Every value index is
/// strictly below its feature's cardinality and every label is strictly below
/// `class_count`; a subset produced by [`split`] keeps the parent's
/// cardinalities and class count even if it no longer observes every value.
#[derive(Debug, Clone)]
pub struct CategoricalDataset {
    cells: Vec<u32>,
    labels: Vec<usize>,
    cardinalities: Vec<usize>,
    class_count: usize,
    value_names: Option<Vec<Vec<String>>>,
    class_names: Option<Vec<String>>,
}

impl CategoricalDataset {
    /// Builds a dataset from row-major cells, validating every invariant.
    pub fn new(
        cells: Vec<u32>,
        labels: Vec<usize>,
        cardinalities: Vec<usize>,
        class_count: usize,
        value_names: Option<Vec<Vec<String>>>,
        class_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = labels.len();
        let d = cardinalities.len();
        if n == 0 {
            return Err(Error::InvalidData("empty dataset".into()));
        }
        if d == 0 {
            return Err(Error::InvalidData("dataset has no features".into()));
        }
        if class_count < 2 {
            return Err(Error::InvalidData("single class".into()));
        }
        if cells.len() != n * d {
            return Err(Error::ShapeMismatch(format!(
                "expected {} cells for {} rows x {} features, got {}",
                n * d,
                n,
                d,
                cells.len()
            )));
        }
        for (i, &y) in labels.iter().enumerate() {
            if y >= class_count {
                return Err(Error::InvalidData(format!(
                    "label {} at row {} out of range (classes: {})",
                    y, i, class_count
                )));
            }
        }
        for (pos, &v) in cells.iter().enumerate() {
            let col = pos % d;
            if v as usize >= cardinalities[col] {
                return Err(Error::InvalidData(format!(
                    "value {} at (row {}, feature {}) exceeds cardinality {}",
                    v,
                    pos / d,
                    col,
                    cardinalities[col]
                )));
            }
        }
        if let Some(names) = &value_names {
            if names.len() != d || names.iter().zip(&cardinalities).any(|(ns, &s)| ns.len() != s) {
                return Err(Error::ShapeMismatch("value_names do not match cardinalities".into()));
            }
        }
        if let Some(names) = &class_names {
            if names.len() != class_count {
                return Err(Error::ShapeMismatch("class_names do not match class count".into()));
            }
        }
        Ok(Self { cells, labels, cardinalities, class_count, value_names, class_names })
    }

    /// Number of examples.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of features.
    pub fn feature_count(&self) -> usize {
        self.cardinalities.len()
    }

    /// Number of classes.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Per-feature cardinalities.
    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    /// Largest feature cardinality.
    pub fn max_cardinality(&self) -> usize {
        self.cardinalities.iter().copied().max().unwrap_or(0)
    }

    /// Value indices of example `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        let d = self.feature_count();
        &self.cells[i * d..(i + 1) * d]
    }

    /// Label of example `i`.
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// All labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Examples per class.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.class_count];
        for &y in &self.labels {
            h[y] += 1;
        }
        h
    }

    /// Decoded string for value `v` of feature `d`, if dictionaries exist.
    pub fn value_name(&self, d: usize, v: u32) -> Option<&str> {
        self.value_names.as_ref().map(|ns| ns[d][v as usize].as_str())
    }

    /// Decoded string for class `c`, if a class dictionary exists.
    pub fn class_name(&self, c: usize) -> Option<&str> {
        self.class_names.as_ref().map(|ns| ns[c].as_str())
    }

    /// Dataset restricted to `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let d = self.feature_count();
        let mut cells = Vec::with_capacity(indices.len() * d);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n() {
                return Err(Error::InvalidData(format!("subset index {} out of range", i)));
            }
            cells.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::new(
            cells,
            labels,
            self.cardinalities.clone(),
            self.class_count,
            self.value_names.clone(),
            self.class_names.clone(),
        )
    }
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

/// Loads a categorical dataset from a headered CSV file.
///
/// Every column is treated as categorical; strings are mapped to dense
/// indices in first-occurrence order and the dictionaries are retained for
/// decoding. Errors on a missing file or label column, an empty cell, an
/// empty dataset, or data with fewer than two classes.
pub fn load_csv<P: AsRef<Path>>(path: P, label: &LabelColumn) -> Result<CategoricalDataset> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let label_idx = match label {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidData(format!("label column '{}' not found", name)))?,
        LabelColumn::Index(k) => {
            if *k >= headers.len() {
                return Err(Error::InvalidData(format!(
                    "label column index {} out of range ({} columns)",
                    k,
                    headers.len()
                )));
            }
            *k
        }
    };
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != label_idx).collect();
    if feature_cols.is_empty() {
        return Err(Error::InvalidData("dataset has no features".into()));
    }

    let mut value_maps: Vec<HashMap<String, u32>> = vec![HashMap::new(); feature_cols.len()];
    let mut value_names: Vec<Vec<String>> = vec![Vec::new(); feature_cols.len()];
    let mut class_map: HashMap<String, usize> = HashMap::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut cells: Vec<u32> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        for (slot, &col) in feature_cols.iter().enumerate() {
            let raw = record.get(col).unwrap_or("");
            if raw.is_empty() {
                return Err(Error::InvalidData(format!(
                    "empty cell at ({},{})",
                    row_idx + 1,
                    col + 1
                )));
            }
            let next = value_names[slot].len() as u32;
            let v = *value_maps[slot].entry(raw.to_string()).or_insert_with(|| {
                value_names[slot].push(raw.to_string());
                next
            });
            cells.push(v);
        }
        let raw_label = record.get(label_idx).unwrap_or("");
        if raw_label.is_empty() {
            return Err(Error::InvalidData(format!(
                "empty cell at ({},{})",
                row_idx + 1,
                label_idx + 1
            )));
        }
        let next = class_names.len();
        let y = *class_map.entry(raw_label.to_string()).or_insert_with(|| {
            class_names.push(raw_label.to_string());
            next
        });
        labels.push(y);
    }

    let cardinalities: Vec<usize> = value_names.iter().map(|ns| ns.len()).collect();
    let class_count = class_names.len();
    CategoricalDataset::new(cells, labels, cardinalities, class_count, Some(value_names), Some(class_names))
}

/// Writes a dataset as CSV with header `f1..fD,class`.
///
/// Decoded strings are used where dictionaries exist; otherwise 1-based
/// indices are written.
pub fn write_csv<P: AsRef<Path>>(ds: &CategoricalDataset, path: P) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let d = ds.feature_count();
    let mut header: Vec<String> = (1..=d).map(|j| format!("f{}", j)).collect();
    header.push("class".into());
    writer.write_record(&header)?;
    let mut row_buf: Vec<String> = Vec::with_capacity(d + 1);
    for i in 0..ds.n() {
        row_buf.clear();
        for (j, &v) in ds.row(i).iter().enumerate() {
            match ds.value_name(j, v) {
                Some(name) => row_buf.push(name.to_string()),
                None => row_buf.push(format!("{}", v + 1)),
            }
        }
        match ds.class_name(ds.label(i)) {
            Some(name) => row_buf.push(name.to_string()),
            None => row_buf.push(format!("{}", ds.label(i) + 1)),
        }
        writer.write_record(&row_buf)?;
    }
    writer.flush()?;
    Ok(())
}

/// Train/validation/test split parameters.
#[derive(Debug, Clone)]
pub struct SplitSpec {
    /// (train, validation, test) fractions, non-negative, summing to 1.
    pub ratios: [f64; 3],
    pub seed: u64,
    /// Preserve class proportions per split (within one example per class).
    pub stratified: bool,
}

impl SplitSpec {
    /// Stratified split with the given ratios and seed.
    pub fn new(ratios: [f64; 3], seed: u64) -> Self {
        Self { ratios, seed, stratified: true }
    }
}

/// Splits a dataset into disjoint train/validation/test subsets.
///
/// Validation and test receive `floor(ratio·n)` examples each and train
/// absorbs the remainder. Stratified mode allocates per class by largest
/// fractional remainder, keeping each split's class counts within one of
/// proportional. Subset rows keep their original relative order.
pub fn split(
    ds: &CategoricalDataset,
    spec: &SplitSpec,
) -> Result<(CategoricalDataset, CategoricalDataset, CategoricalDataset)> {
    let r = spec.ratios;
    if r.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidArgument("split ratios must be non-negative".into()));
    }
    if (r.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("split ratios must sum to 1".into()));
    }
    let n = ds.n();
    let n_val = (r[1] * n as f64).floor() as usize;
    let n_test = (r[2] * n as f64).floor() as usize;
    let n_train = n - n_val - n_test;
    if n_train == 0 || n_val == 0 || n_test == 0 {
        return Err(Error::InvalidData(format!(
            "dataset of {} examples too small for ratios {:?}: split sizes ({},{},{})",
            n, r, n_train, n_val, n_test
        )));
    }

    let mut rng = sub_rng(spec.seed, STREAM_SPLIT);
    let (mut idx_train, mut idx_val, mut idx_test) = if spec.stratified {
        let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); ds.class_count()];
        for i in 0..n {
            per_class[ds.label(i)].push(i);
        }
        let counts: Vec<usize> = per_class.iter().map(|v| v.len()).collect();
        let val_quota = allocate(&counts, r[1], n_val, &[]);
        let test_quota = allocate(&counts, r[2], n_test, &val_quota);
        let mut idx_train = Vec::with_capacity(n_train);
        let mut idx_val = Vec::with_capacity(n_val);
        let mut idx_test = Vec::with_capacity(n_test);
        for (k, members) in per_class.iter_mut().enumerate() {
            members.shuffle(&mut rng);
            let (va, te) = (val_quota[k], test_quota[k]);
            idx_val.extend_from_slice(&members[..va]);
            idx_test.extend_from_slice(&members[va..va + te]);
            idx_train.extend_from_slice(&members[va + te..]);
        }
        (idx_train, idx_val, idx_test)
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let idx_val = order[..n_val].to_vec();
        let idx_test = order[n_val..n_val + n_test].to_vec();
        let idx_train = order[n_val + n_test..].to_vec();
        (idx_train, idx_val, idx_test)
    };
    idx_train.sort_unstable();
    idx_val.sort_unstable();
    idx_test.sort_unstable();
    Ok((ds.subset(&idx_train)?, ds.subset(&idx_val)?, ds.subset(&idx_test)?))
}

/// Largest-remainder allocation of `total` across classes with quota
/// `count·ratio` each, never exceeding a class's remaining capacity after
/// `already` committed examples.
fn allocate(counts: &[usize], ratio: f64, total: usize, already: &[usize]) -> Vec<usize> {
    let taken = |k: usize| already.get(k).copied().unwrap_or(0);
    let mut alloc: Vec<usize> = Vec::with_capacity(counts.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(counts.len());
    let mut assigned = 0usize;
    for (k, &m) in counts.iter().enumerate() {
        let quota = m as f64 * ratio;
        let base = (quota.floor() as usize).min(m - taken(k));
        alloc.push(base);
        assigned += base;
        remainders.push((quota - quota.floor(), k));
    }
    // Highest fractional remainder first; ties broken by class index.
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut deficit = total.saturating_sub(assigned);
    while deficit > 0 {
        let mut progressed = false;
        for &(_, k) in &remainders {
            if deficit == 0 {
                break;
            }
            if alloc[k] + taken(k) < counts[k] {
                alloc[k] += 1;
                deficit -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    alloc
}

/// Parameters for multinomial synthetic data.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n: usize,
    /// Features whose distribution depends on the class.
    pub informative: usize,
    /// Features drawn identically for every class.
    pub noisy: usize,
    pub classes: usize,
    /// Shared per-feature cardinality; `None` picks `max(4, classes)`.
    pub cardinality: Option<usize>,
    /// Mass added to each class's favored component of informative features.
    pub weight: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Cardinality actually used for generation.
    pub fn resolved_cardinality(&self) -> usize {
        self.cardinality.unwrap_or_else(|| self.classes.max(4))
    }
}

/// Generates a categorical dataset from per-class multinomials.
///
/// Each feature draws base weights `u_v ~ Uniform(0,1)` shared by all
/// classes. Informative features add `weight` to class `c`'s favored
/// component `c mod s` before normalizing, so classes with distinct favored
/// components become separable as `weight` grows; noisy features use the
/// normalized base weights unchanged. Labels are assigned round-robin, and
/// the informative features come first in column order.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<CategoricalDataset> {
    let s = spec.resolved_cardinality();
    if s < 2 {
        return Err(Error::InvalidArgument("cardinality must be at least 2".into()));
    }
    if !(0.0..=1.0).contains(&spec.weight) {
        return Err(Error::InvalidArgument("weight must lie in [0,1]".into()));
    }
    let d = spec.informative + spec.noisy;
    if d == 0 {
        return Err(Error::InvalidArgument("at least one feature required".into()));
    }
    if spec.n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if spec.classes < 2 {
        return Err(Error::InvalidArgument("at least two classes required".into()));
    }

    let mut rng = sub_rng(spec.seed, STREAM_SYNTHETIC);
    // samplers[d] holds one distribution per class for informative features
    // and a single shared distribution for noisy ones.
    let mut samplers: Vec<Vec<WeightedIndex<f64>>> = Vec::with_capacity(d);
    for feature in 0..d {
        let base: Vec<f64> = (0..s).map(|_| rng.gen::<f64>()).collect();
        if feature < spec.informative {
            let per_class = (0..spec.classes)
                .map(|c| {
                    let mut w = base.clone();
                    w[c % s] += spec.weight;
                    WeightedIndex::new(&w).expect("positive weights")
                })
                .collect();
            samplers.push(per_class);
        } else {
            samplers.push(vec![WeightedIndex::new(&base).expect("positive weights")]);
        }
    }

    let mut cells = Vec::with_capacity(spec.n * d);
    let mut labels = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let y = i % spec.classes;
        labels.push(y);
        for (feature, sampler) in samplers.iter().enumerate() {
            let dist = if feature < spec.informative { &sampler[y] } else { &sampler[0] };
            cells.push(dist.sample(&mut rng) as u32);
        }
    }

    let value_names = Some((0..d).map(|_| (1..=s).map(|v| format!("v{}", v)).collect()).collect());
    let class_names = Some((1..=spec.classes).map(|c| format!("c{}", c)).collect());
    CategoricalDataset::new(cells, labels, vec![s; d], spec.classes, value_names, class_names)
}

/// Renders the class histogram as `c0:n0 c1:n1 ...` for log lines.
pub fn histogram_line(ds: &CategoricalDataset) -> String {
    let mut out = String::new();
    for (c, count) in ds.class_histogram().iter().enumerate() {
        if c > 0 {
            out.push(' ');
        }
        let name = ds.class_name(c).map(str::to_string).unwrap_or_else(|| format!("{}", c + 1));
        let _ = write!(out, "{}:{}", name, count);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn temp_csv(name: &str, content: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("cpml_test_{}_{}.csv", std::process::id(), name));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    const CREDIT_CSV: &str = "\
Occupation,Education,Marital status,Risk
Accountant,Bachelor,Married,Low
Doctor,Master,Married,Low
Plumber,TAFE,Single,High
Plumber,High school,Single,Middle
Doctor,Master,Married,Middle
Accountant,Master,Single,High
";

    #[test]
    fn load_credit_example() {
        let path = temp_csv("credit", CREDIT_CSV);
        let ds = load_csv(&path, &LabelColumn::Name("Risk".into())).unwrap();
        assert_eq!(ds.n(), 6);
        assert_eq!(ds.feature_count(), 3);
        assert_eq!(ds.class_count(), 3);
        assert_eq!(ds.cardinalities(), &[3, 4, 2]);
        // First-occurrence encoding keeps row order stable.
        assert_eq!(ds.value_name(0, 0), Some("Accountant"));
        assert_eq!(ds.class_name(0), Some("Low"));
        assert_eq!(ds.row(0), &[0, 0, 0]);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn load_by_index_matches_by_name() {
        let path = temp_csv("by_index", CREDIT_CSV);
        let by_name = load_csv(&path, &LabelColumn::Name("Risk".into())).unwrap();
        let by_index = load_csv(&path, &LabelColumn::Index(3)).unwrap();
        assert_eq!(by_name.n(), by_index.n());
        assert_eq!(by_name.labels(), by_index.labels());
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn single_class_rejected() {
        let path = temp_csv("one_row", "a,b,label\nx,y,z\n");
        let err = load_csv(&path, &LabelColumn::Name("label".into())).unwrap_err();
        assert!(err.to_string().contains("single class"), "{}", err);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn empty_cell_rejected() {
        let path = temp_csv("blank", "a,b,label\nx,,u\ny,z,v\n");
        let err = load_csv(&path, &LabelColumn::Name("label".into())).unwrap_err();
        assert!(err.to_string().contains("empty cell at (1,2)"), "{}", err);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn missing_label_column_rejected() {
        let path = temp_csv("no_label", "a,b\nx,y\n");
        let err = load_csv(&path, &LabelColumn::Name("label".into())).unwrap_err();
        assert!(err.to_string().contains("label column"), "{}", err);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_csv("/nonexistent/cpml.csv", &LabelColumn::Index(0)).unwrap_err();
        assert!(matches!(err, Error::Csv(_) | Error::Io(_)));
    }

    #[test]
    fn roundtrip_preserves_strings() {
        let path = temp_csv("rt_in", CREDIT_CSV);
        let ds = load_csv(&path, &LabelColumn::Name("Risk".into())).unwrap();
        let out = std::env::temp_dir().join(format!("cpml_test_{}_rt_out.csv", std::process::id()));
        write_csv(&ds, &out).unwrap();
        let back = load_csv(&out, &LabelColumn::Name("class".into())).unwrap();
        assert_eq!(back.n(), ds.n());
        for i in 0..ds.n() {
            for d in 0..ds.feature_count() {
                assert_eq!(back.value_name(d, back.row(i)[d]), ds.value_name(d, ds.row(i)[d]));
            }
            assert_eq!(back.class_name(back.label(i)), ds.class_name(ds.label(i)));
        }
        std::fs::remove_file(path).ok();
        std::fs::remove_file(out).ok();
    }

    fn balanced_dataset(n: usize, classes: usize) -> CategoricalDataset {
        let spec = SyntheticSpec {
            n,
            informative: 2,
            noisy: 1,
            classes,
            cardinality: Some(4),
            weight: 0.5,
            seed: 11,
        };
        generate_synthetic(&spec).unwrap()
    }

    #[test]
    fn split_sizes_exact_division() {
        let ds = balanced_dataset(10, 2);
        let (tr, va, te) = split(&ds, &SplitSpec::new([0.6, 0.2, 0.2], 7)).unwrap();
        assert_eq!((tr.n(), va.n(), te.n()), (6, 2, 2));
    }

    #[test]
    fn split_remainder_goes_to_train() {
        let ds = balanced_dataset(11, 2);
        let (tr, va, te) = split(&ds, &SplitSpec::new([0.6, 0.2, 0.2], 7)).unwrap();
        assert_eq!((tr.n(), va.n(), te.n()), (7, 2, 2));
    }

    #[test]
    fn split_deterministic() {
        let ds = balanced_dataset(53, 3);
        let spec = SplitSpec::new([0.6, 0.2, 0.2], 13);
        let (a1, b1, c1) = split(&ds, &spec).unwrap();
        let (a2, b2, c2) = split(&ds, &spec).unwrap();
        assert_eq!(a1.labels(), a2.labels());
        assert_eq!(b1.labels(), b2.labels());
        assert_eq!(c1.labels(), c2.labels());
        assert_eq!(a1.row(0), a2.row(0));
    }

    #[test]
    fn split_too_small_errors() {
        let ds = balanced_dataset(4, 2);
        let err = split(&ds, &SplitSpec::new([0.98, 0.01, 0.01], 1)).unwrap_err();
        assert!(err.to_string().contains("too small"), "{}", err);
    }

    #[test]
    fn stratified_split_keeps_proportions() {
        let ds = balanced_dataset(100, 4);
        let (tr, va, te) = split(&ds, &SplitSpec::new([0.6, 0.2, 0.2], 5)).unwrap();
        for part in [&tr, &va, &te] {
            let h = part.class_histogram();
            for (k, &count) in h.iter().enumerate() {
                let expected = ds.class_histogram()[k] as f64 * part.n() as f64 / ds.n() as f64;
                assert!(
                    (count as f64 - expected).abs() <= 1.0,
                    "class {} count {} vs proportional {:.2}",
                    k,
                    count,
                    expected
                );
            }
        }
    }

    #[test]
    fn synthetic_reproducible() {
        let spec = SyntheticSpec {
            n: 200,
            informative: 3,
            noisy: 2,
            classes: 3,
            cardinality: None,
            weight: 0.4,
            seed: 99,
        };
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a.labels(), b.labels());
        for i in 0..a.n() {
            assert_eq!(a.row(i), b.row(i));
        }
    }

    #[test]
    fn synthetic_label_histogram_balanced() {
        let spec = SyntheticSpec {
            n: 103,
            informative: 1,
            noisy: 0,
            classes: 4,
            cardinality: Some(5),
            weight: 0.2,
            seed: 3,
        };
        let ds = generate_synthetic(&spec).unwrap();
        let h = ds.class_histogram();
        assert!(h.iter().max().unwrap() - h.iter().min().unwrap() <= 1, "{:?}", h);
    }

    #[test]
    fn synthetic_informative_modes_track_favored_component() {
        // With weight 0.9 the favored component dominates each class's
        // distribution, so the per-class empirical mode should match it for
        // nearly every informative feature. A base draw can still beat the
        // favored component by chance (a competitor needs u_v > u_f + 0.9,
        // about 1.5% per cell), so allow one miss per class and demand the
        // 7-of-8 rate in aggregate per seed.
        for seed in 0..20u64 {
            let spec = SyntheticSpec {
                n: 1000,
                informative: 8,
                noisy: 0,
                classes: 4,
                cardinality: Some(4),
                weight: 0.9,
                seed,
            };
            let ds = generate_synthetic(&spec).unwrap();
            let s = 4usize;
            let mut total_matches = 0;
            for c in 0..4 {
                let mut matches = 0;
                for d in 0..8 {
                    let mut hist = vec![0usize; s];
                    for i in 0..ds.n() {
                        if ds.label(i) == c {
                            hist[ds.row(i)[d] as usize] += 1;
                        }
                    }
                    let mode = hist.iter().enumerate().max_by_key(|(_, &h)| h).unwrap().0;
                    if mode == c % s {
                        matches += 1;
                    }
                }
                assert!(matches >= 6, "seed {} class {}: only {}/8 modes matched", seed, c, matches);
                total_matches += matches;
            }
            assert!(total_matches >= 28, "seed {}: only {}/32 modes matched", seed, total_matches);
        }
    }

    #[test]
    fn synthetic_sweep_shapes() {
        for &features in &[1usize, 12, 25] {
            for &weight in &[0.1, 0.5, 0.9] {
                let spec = SyntheticSpec {
                    n: 60,
                    informative: features,
                    noisy: 0,
                    classes: 2,
                    cardinality: None,
                    weight,
                    seed: 8,
                };
                let ds = generate_synthetic(&spec).unwrap();
                assert_eq!(ds.n(), 60);
                assert_eq!(ds.feature_count(), features);
            }
        }
    }

    proptest! {
        #[test]
        fn split_is_partition(n in 12usize..120, classes in 2usize..5, seed in 0u64..500, stratified in proptest::bool::ANY) {
            let ds = balanced_dataset(n, classes);
            let spec = SplitSpec { ratios: [0.6, 0.2, 0.2], seed, stratified };
            let (tr, va, te) = split(&ds, &spec).unwrap();
            prop_assert_eq!(tr.n() + va.n() + te.n(), n);
            prop_assert_eq!(va.n(), (0.2 * n as f64).floor() as usize);
            prop_assert_eq!(te.n(), (0.2 * n as f64).floor() as usize);
            // Count row multiset coverage: histogram over encoded rows+labels.
            let mut full: std::collections::HashMap<(Vec<u32>, usize), i64> = std::collections::HashMap::new();
            for i in 0..ds.n() {
                *full.entry((ds.row(i).to_vec(), ds.label(i))).or_default() += 1;
            }
            for part in [&tr, &va, &te] {
                for i in 0..part.n() {
                    *full.get_mut(&(part.row(i).to_vec(), part.label(i))).unwrap() -= 1;
                }
            }
            prop_assert!(full.values().all(|&v| v == 0));
        }

        #[test]
        fn synthetic_values_in_range(n in 1usize..80, inf in 0usize..4, noisy in 0usize..4, classes in 2usize..5, seed in 0u64..100) {
            prop_assume!(inf + noisy >= 1);
            let spec = SyntheticSpec { n, informative: inf, noisy, classes, cardinality: Some(5), weight: 0.3, seed };
            let ds = generate_synthetic(&spec).unwrap();
            for i in 0..ds.n() {
                for &v in ds.row(i) {
                    prop_assert!((v as usize) < 5);
                }
            }
        }
    }
}
