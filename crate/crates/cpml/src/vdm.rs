//! Class-conditional value statistics and projection of categorical
//! examples into row-stochastic matrices.
//!
//! Fitting counts how often each (class, feature, value) combination occurs
//! in training data. Projection replaces feature d's value f with the row of
//! estimated conditional class probabilities, optionally Laplace-smoothed by
//! a pseudocount. The projected example is then a D×C matrix whose rows each
//! sum to one; its columns are the per-class profiles the metric learners
//! consume.

use std::path::Path;

use nalgebra::DMatrix;

use crate::data::CategoricalDataset;
use crate::{Error, Result};

/// Class-conditional count statistics fitted on a training set.
#[derive(Debug, Clone)]
pub struct VdmModel {
    /// Flat counts indexed by feature offset + value·C + class.
    counts: Vec<u64>,
    /// Start of each feature's block in `counts`.
    offsets: Vec<usize>,
    cardinalities: Vec<usize>,
    class_count: usize,
    smoothing: f64,
}

impl VdmModel {
    /// Number of features the model was fitted on.
    pub fn feature_count(&self) -> usize {
        self.cardinalities.len()
    }

    /// Number of classes.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Pseudocount added to every (class, value) cell at projection time.
    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    /// Times value `f` of feature `d` was observed with class `c`.
    pub fn count(&self, c: usize, d: usize, f: u32) -> u64 {
        self.counts[self.offsets[d] + f as usize * self.class_count + c]
    }

    /// Projects one example (a slice of value indices, one per feature).
    ///
    /// Row d holds `(N_cd(f) + ε) / (Σ_c N_cd(f) + C·ε)` for each class c.
    /// A value never observed in training (including an out-of-range index)
    /// has an all-zero count row, which with ε = 0 falls back to the uniform
    /// distribution.
    pub fn project(&self, x: &[u32]) -> Result<ProjectedExample> {
        let (d_count, c_count) = (self.feature_count(), self.class_count);
        if x.len() != d_count {
            return Err(Error::ShapeMismatch(format!(
                "example has {} features, model expects {}",
                x.len(),
                d_count
            )));
        }
        let mut matrix = DMatrix::zeros(d_count, c_count);
        for (d, &v) in x.iter().enumerate() {
            let seen = (v as usize) < self.cardinalities[d];
            let mut denom = c_count as f64 * self.smoothing;
            if seen {
                for c in 0..c_count {
                    denom += self.count(c, d, v) as f64;
                }
            }
            if denom == 0.0 {
                let uniform = 1.0 / c_count as f64;
                for c in 0..c_count {
                    matrix[(d, c)] = uniform;
                }
            } else {
                for c in 0..c_count {
                    let num = if seen { self.count(c, d, v) as f64 } else { 0.0 };
                    matrix[(d, c)] = (num + self.smoothing) / denom;
                }
            }
        }
        ProjectedExample::new(matrix)
    }
}

/// A categorical example projected to its D×C class-probability matrix.
#[derive(Debug, Clone)]
pub struct ProjectedExample {
    matrix: DMatrix<f64>,
}

impl ProjectedExample {
    /// Wraps a matrix, validating row-stochasticity (rows sum to 1 ± 1e-9,
    /// entries in [0, 1]).
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        for d in 0..matrix.nrows() {
            let mut sum = 0.0;
            for c in 0..matrix.ncols() {
                let v = matrix[(d, c)];
                if !(0.0..=1.0 + 1e-9).contains(&v) {
                    return Err(Error::InvalidData(format!(
                        "projection entry {} at ({},{}) outside [0,1]",
                        v, d, c
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidData(format!("projection row {} sums to {}", d, sum)));
            }
        }
        Ok(Self { matrix })
    }

    /// The D×C matrix, rows indexed by feature and columns by class.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Number of features (rows).
    pub fn feature_count(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of classes (columns).
    pub fn class_count(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Tallies class-conditional value counts over a training set.
pub fn fit_vdm(train: &CategoricalDataset, smoothing: f64) -> Result<VdmModel> {
    if !(smoothing >= 0.0 && smoothing.is_finite()) {
        return Err(Error::InvalidArgument("smoothing must be finite and non-negative".into()));
    }
    let c_count = train.class_count();
    let mut offsets = Vec::with_capacity(train.feature_count());
    let mut total = 0usize;
    for &s in train.cardinalities() {
        offsets.push(total);
        total += s * c_count;
    }
    let mut counts = vec![0u64; total];
    for i in 0..train.n() {
        let y = train.label(i);
        for (d, &v) in train.row(i).iter().enumerate() {
            counts[offsets[d] + v as usize * c_count + y] += 1;
        }
    }
    Ok(VdmModel {
        counts,
        offsets,
        cardinalities: train.cardinalities().to_vec(),
        class_count: c_count,
        smoothing,
    })
}

/// Projects a whole dataset, preserving example order.
pub fn project_dataset(model: &VdmModel, ds: &CategoricalDataset) -> Result<Vec<ProjectedExample>> {
    (0..ds.n()).map(|i| model.project(ds.row(i))).collect()
}

/// Projects a slice of raw examples; an empty slice yields an empty list.
pub fn project_examples(model: &VdmModel, rows: &[Vec<u32>]) -> Result<Vec<ProjectedExample>> {
    rows.iter().map(|r| model.project(r)).collect()
}

/// Writes projected examples as headerless CSV: one row per example, D·C
/// columns ordered feature-major (feature 0's class probabilities first).
pub fn write_projection_csv<P: AsRef<Path>>(examples: &[ProjectedExample], path: P) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut buf: Vec<String> = Vec::new();
    for ex in examples {
        buf.clear();
        let m = ex.matrix();
        for d in 0..m.nrows() {
            for c in 0..m.ncols() {
                buf.push(format!("{}", m[(d, c)]));
            }
        }
        writer.write_record(&buf)?;
    }
    writer.flush()?;
    Ok(())
}
