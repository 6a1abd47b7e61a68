//! Learned distances over projected examples.
//!
//! A pair of projected examples is summarized by the outer products of its
//! per-class column differences; both distance forms are then linear in the
//! metric: the shared form contracts the summed outer product with one D×D
//! matrix, the per-class form contracts each class's outer product with its
//! own matrix. Distances are evaluated in the elementwise Σ A_pq·M_pq form,
//! which costs O(D²) per block instead of a matrix product.

use nalgebra::DMatrix;

use crate::vdm::ProjectedExample;
use crate::{Error, Result};

/// Whether one metric is shared by all classes or each class has its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Single,
    Multi,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricKind::Single => write!(f, "single"),
            MetricKind::Multi => write!(f, "multi"),
        }
    }
}

/// A learned metric: one shared D×D block or C per-class blocks.
///
/// Blocks are expected symmetric (within 1e-9) and PSD (eigenvalues above
/// −1e-8); [`MetricModel::validate`] checks both.
#[derive(Debug, Clone)]
pub struct MetricModel {
    kind: MetricKind,
    blocks: Vec<DMatrix<f64>>,
}

impl MetricModel {
    /// Shared-metric model from one matrix.
    pub fn single(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch("metric must be square".into()));
        }
        Ok(Self { kind: MetricKind::Single, blocks: vec![m] })
    }

    /// Per-class model from C matrices of equal dimension.
    pub fn multi(blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("per-class model needs at least one block".into()));
        }
        let d = blocks[0].nrows();
        for b in &blocks {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::ShapeMismatch("metric blocks must be square and equal-sized".into()));
            }
        }
        Ok(Self { kind: MetricKind::Multi, blocks })
    }

    /// Identity shared metric of dimension `d`.
    pub fn identity_single(d: usize) -> Self {
        Self { kind: MetricKind::Single, blocks: vec![DMatrix::identity(d, d)] }
    }

    /// Identity per-class metric, `c` blocks of dimension `d`.
    pub fn identity_multi(d: usize, c: usize) -> Self {
        Self { kind: MetricKind::Multi, blocks: vec![DMatrix::identity(d, d); c] }
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    /// Block dimension D.
    pub fn dim(&self) -> usize {
        self.blocks[0].nrows()
    }

    /// All blocks: one for a shared metric, C for per-class.
    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    /// The shared matrix; errors for per-class models.
    pub fn as_single(&self) -> Result<&DMatrix<f64>> {
        match self.kind {
            MetricKind::Single => Ok(&self.blocks[0]),
            MetricKind::Multi => Err(Error::InvalidArgument("model holds per-class metrics".into())),
        }
    }

    /// Block used for class `c` (the shared block if kind is Single).
    pub fn class_block(&self, c: usize) -> &DMatrix<f64> {
        match self.kind {
            MetricKind::Single => &self.blocks[0],
            MetricKind::Multi => &self.blocks[c],
        }
    }

    /// Checks symmetry (‖M−Mᵀ‖_∞ ≤ 1e-9) and PSD-ness (min eigenvalue
    /// ≥ −1e-8) of every block.
    pub fn validate(&self) -> Result<()> {
        for (idx, m) in self.blocks.iter().enumerate() {
            let mut asym: f64 = 0.0;
            for p in 0..m.nrows() {
                for q in 0..p {
                    asym = asym.max((m[(p, q)] - m[(q, p)]).abs());
                }
            }
            if asym > 1e-9 {
                return Err(Error::Numerical(format!("metric block {} asymmetric by {}", idx, asym)));
            }
            let min_eig = crate::regularizer::min_eigenvalue(m)?;
            if min_eig < -1e-8 {
                return Err(Error::Numerical(format!(
                    "metric block {} has negative eigenvalue {}",
                    idx, min_eig
                )));
            }
        }
        Ok(())
    }

    /// Distance for a precomputed pair summary.
    pub fn distance(&self, pd: &PairDiff) -> Result<f64> {
        match self.kind {
            MetricKind::Single => distance_cps(&self.blocks[0], pd),
            MetricKind::Multi => distance_cpm(&self.blocks, pd),
        }
    }

    /// Distance between two projected examples without materializing the
    /// outer products: Σ_c Δ_cᵀ M_(c) Δ_c with Δ_c the class-c column
    /// difference.
    pub fn distance_between(&self, a: &ProjectedExample, b: &ProjectedExample) -> Result<f64> {
        let (am, bm) = (a.matrix(), b.matrix());
        if am.shape() != bm.shape() {
            return Err(Error::ShapeMismatch("projected examples differ in shape".into()));
        }
        let (d, c_count) = am.shape();
        if d != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "metric dimension {} does not match projection rows {}",
                self.dim(),
                d
            )));
        }
        if self.kind == MetricKind::Multi && self.blocks.len() != c_count {
            return Err(Error::ShapeMismatch(format!(
                "{} metric blocks for {} classes",
                self.blocks.len(),
                c_count
            )));
        }
        let mut total = 0.0;
        for c in 0..c_count {
            let m = self.class_block(c);
            for p in 0..d {
                let dp = am[(p, c)] - bm[(p, c)];
                if dp == 0.0 {
                    continue;
                }
                let mut row_acc = 0.0;
                for q in 0..d {
                    row_acc += m[(p, q)] * (am[(q, c)] - bm[(q, c)]);
                }
                total += dp * row_acc;
            }
        }
        Ok(total)
    }
}

/// Per-class outer products of a projected pair's column differences, plus
/// their sum.
#[derive(Debug, Clone)]
pub struct PairDiff {
    /// A_c = Δ_c Δ_cᵀ for each class column c; rank ≤ 1 each.
    pub per_class: Vec<DMatrix<f64>>,
    /// Σ_c A_c, equal to (φi−φj)(φi−φj)ᵀ summed over class columns.
    pub summed: DMatrix<f64>,
}

/// Builds the outer-product summary for a pair of projected examples.
pub fn pair_diff(a: &ProjectedExample, b: &ProjectedExample) -> Result<PairDiff> {
    let (am, bm) = (a.matrix(), b.matrix());
    if am.shape() != bm.shape() {
        return Err(Error::ShapeMismatch(format!(
            "projected examples differ in shape: {:?} vs {:?}",
            am.shape(),
            bm.shape()
        )));
    }
    let (d, c_count) = am.shape();
    let mut per_class = Vec::with_capacity(c_count);
    let mut summed = DMatrix::zeros(d, d);
    for c in 0..c_count {
        let mut outer = DMatrix::zeros(d, d);
        for q in 0..d {
            let dq = am[(q, c)] - bm[(q, c)];
            if dq == 0.0 {
                continue;
            }
            for p in 0..d {
                outer[(p, q)] = (am[(p, c)] - bm[(p, c)]) * dq;
            }
        }
        summed += &outer;
        per_class.push(outer);
    }
    Ok(PairDiff { per_class, summed })
}

/// Shared-metric distance: Σ_pq A_pq · M_pq over the summed outer product.
pub fn distance_cps(m: &DMatrix<f64>, pd: &PairDiff) -> Result<f64> {
    if m.shape() != pd.summed.shape() {
        return Err(Error::ShapeMismatch(format!(
            "metric is {:?}, pair summary is {:?}",
            m.shape(),
            pd.summed.shape()
        )));
    }
    Ok(frob_dot(m, &pd.summed))
}

/// Per-class distance: Σ_c Σ_pq (A_c)_pq · (M_c)_pq.
pub fn distance_cpm(metrics: &[DMatrix<f64>], pd: &PairDiff) -> Result<f64> {
    if metrics.len() != pd.per_class.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} metric blocks for {} class summaries",
            metrics.len(),
            pd.per_class.len()
        )));
    }
    let mut total = 0.0;
    for (m, a) in metrics.iter().zip(&pd.per_class) {
        if m.shape() != a.shape() {
            return Err(Error::ShapeMismatch(format!(
                "metric block is {:?}, class summary is {:?}",
                m.shape(),
                a.shape()
            )));
        }
        total += frob_dot(m, a);
    }
    Ok(total)
}

/// Identity-metric distance: the squared Euclidean distance between the
/// projections, used as the untrained baseline.
pub fn euclidean_baseline(pd: &PairDiff) -> f64 {
    pd.summed.trace()
}

/// Frobenius inner product over matching flat storage.
pub(crate) fn frob_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}
