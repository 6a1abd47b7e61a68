//! Hinge losses, subgradients, line search, and the projected-subgradient
//! training loop for both metric forms.
//!
//! Training minimizes mean hinge loss over a sampled constraint set plus a
//! weighted Schatten p-norm penalty. Each iteration assembles the
//! subgradient from currently violated constraints, picks a stepsize by
//! backtracking on the sufficient-decrease condition, steps, projects every
//! metric block back onto the PSD cone, and accepts the move only if the
//! post-projection objective did not increase, which makes the recorded
//! trace non-increasing by construction.
//!
//! The loop never rebuilds pair outer products: they are interned once per
//! unique constraint pair, and because distances are linear in the metric,
//! each iteration only refreshes one scalar per pair (the inner product with
//! the current blocks, then with the subgradient blocks), so line-search
//! probes cost O(|constraints|) instead of O(|constraints|·D²).

mod constraints;

pub use constraints::{build_pairs, build_triplets, ConstraintKind, ConstraintSet};

use std::collections::HashMap;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::distance::{frob_dot, pair_diff, MetricKind, MetricModel};
use crate::regularizer::{psd_project, schatten_subgrad, schatten_value};
use crate::vdm::ProjectedExample;
use crate::{Error, Result};

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Regularization weight on the Schatten penalty.
    pub lambda: f64,
    /// Schatten exponent, ≥ 1.
    pub p: f64,
    /// Constraint margin, > 0.
    pub b: f64,
    /// Line-search stepsize decay in (0,1).
    pub step_decay: f64,
    /// Maximum accepted iterations.
    pub max_iters: usize,
    /// Line-search probes before giving up on sufficient decrease.
    pub max_linesearch: usize,
    /// Relative objective-change threshold; three consecutive iterations
    /// below it stop the loop.
    pub tol: f64,
    /// Constraints to sample; `None` picks 30·n capped at 100,000.
    pub constraint_count: Option<usize>,
    pub seed: u64,
    /// One shared metric or one per class.
    pub kind: MetricKind,
    /// Apply the decay before the first probe (caps the stepsize at
    /// `step_decay` instead of starting from 1).
    pub decay_first: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            p: 1.0,
            b: 1.0,
            step_decay: 0.1,
            max_iters: 200,
            max_linesearch: 30,
            tol: 1e-5,
            constraint_count: None,
            seed: 42,
            kind: MetricKind::Single,
            decay_first: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p must be finite and >= 1, got {}", self.p)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidArgument(format!("margin must be positive, got {}", self.b)));
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err(Error::InvalidArgument(format!("step_decay must lie in (0,1), got {}", self.step_decay)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        if self.max_linesearch == 0 {
            return Err(Error::InvalidArgument("max_linesearch must be positive".into()));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tol must be finite and >= 0, got {}", self.tol)));
        }
        if self.constraint_count == Some(0) {
            return Err(Error::InvalidArgument("constraint count must be positive".into()));
        }
        Ok(())
    }

    /// Constraint count to sample for an n-example training set.
    pub fn resolved_constraints(&self, n: usize) -> usize {
        self.constraint_count.unwrap_or_else(|| (30 * n).min(100_000))
    }
}

/// Outcome of one training run.
#[derive(Debug, Clone, Serialize)]
pub struct TrainReport {
    #[serde(skip)]
    pub final_metric: MetricModel,
    /// Objective after initialization and after each accepted step.
    pub objective_trace: Vec<f64>,
    /// Violated-constraint count at the start of each accepted step.
    pub violated_counts: Vec<usize>,
    pub iterations_run: usize,
    /// Total seconds including setup.
    pub wall_time: f64,
    /// Seconds spent interning pair products and computing the initial
    /// objective.
    pub setup_seconds: f64,
    /// Seconds spent in the iteration loop proper.
    pub loop_seconds: f64,
}

impl TrainReport {
    /// Average seconds per accepted iteration.
    pub fn per_iteration_seconds(&self) -> f64 {
        self.loop_seconds / self.iterations_run.max(1) as f64
    }
}

fn check_kind(cs: &ConstraintSet, expected: ConstraintKind) -> Result<()> {
    if cs.kind() != expected {
        return Err(Error::InvalidArgument(format!(
            "constraint set holds {:?} constraints, expected {:?}",
            cs.kind(),
            expected
        )));
    }
    if cs.is_empty() {
        return Err(Error::InvalidArgument("empty constraint set".into()));
    }
    Ok(())
}

fn check_indices(cs: &ConstraintSet, n: usize) -> Result<()> {
    if let Some(max) = cs.max_index() {
        if max >= n {
            return Err(Error::InvalidData(format!(
                "constraint index {} out of range ({} projected examples)",
                max, n
            )));
        }
    }
    Ok(())
}

fn term_distance(metric: &MetricModel, projections: &[ProjectedExample], i: usize, j: usize) -> Result<f64> {
    let pd = pair_diff(&projections[i], &projections[j])?;
    metric.distance(&pd)
}

/// Mean triplet hinge loss: [d(i,j) + b − d(i,k)]_+ averaged over the set.
pub fn triplet_loss(metric: &MetricModel, projections: &[ProjectedExample], cs: &ConstraintSet) -> Result<f64> {
    check_kind(cs, ConstraintKind::Triplet)?;
    check_indices(cs, projections.len())?;
    let b = cs.margin();
    let mut sum = 0.0;
    for &[i, j, k] in cs.triplet_terms() {
        let d_ij = term_distance(metric, projections, i, j)?;
        let d_ik = term_distance(metric, projections, i, k)?;
        let z = d_ij + b - d_ik;
        if z > 0.0 {
            sum += z;
        }
    }
    Ok(sum / cs.len() as f64)
}

/// Mean signed pair hinge loss: [1 + r·(d(i,j) − b)]_+ averaged over the
/// set, with r = +1 for same-class pairs and −1 otherwise.
pub fn pair_loss(metric: &MetricModel, projections: &[ProjectedExample], cs: &ConstraintSet) -> Result<f64> {
    check_kind(cs, ConstraintKind::Pair)?;
    check_indices(cs, projections.len())?;
    let b = cs.margin();
    let mut sum = 0.0;
    for &(i, j, r) in cs.pair_terms() {
        let d = term_distance(metric, projections, i, j)?;
        let z = 1.0 + r as f64 * (d - b);
        if z > 0.0 {
            sum += z;
        }
    }
    Ok(sum / cs.len() as f64)
}

/// Mean quadruple hinge loss: [d(i,j) + b − d(k,l)]_+ averaged over the set.
pub fn quad_loss(metric: &MetricModel, projections: &[ProjectedExample], cs: &ConstraintSet) -> Result<f64> {
    check_kind(cs, ConstraintKind::Quad)?;
    check_indices(cs, projections.len())?;
    let b = cs.margin();
    let mut sum = 0.0;
    for &[i, j, k, l] in cs.quad_terms() {
        let d_ij = term_distance(metric, projections, i, j)?;
        let d_kl = term_distance(metric, projections, k, l)?;
        let z = d_ij + b - d_kl;
        if z > 0.0 {
            sum += z;
        }
    }
    Ok(sum / cs.len() as f64)
}

fn constraint_loss(metric: &MetricModel, projections: &[ProjectedExample], cs: &ConstraintSet) -> Result<f64> {
    match cs.kind() {
        ConstraintKind::Triplet => triplet_loss(metric, projections, cs),
        ConstraintKind::Pair => pair_loss(metric, projections, cs),
        ConstraintKind::Quad => quad_loss(metric, projections, cs),
    }
}

/// Sum of block Schatten values, weighted by lambda; zero lambda skips the
/// eigendecompositions entirely.
fn penalty(blocks: &[DMatrix<f64>], lambda: f64, p: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for b in blocks {
        total += schatten_value(b, p)?;
    }
    Ok(lambda * total)
}

/// Full objective: constraint loss plus lambda times the summed block
/// Schatten p-norms.
pub fn objective(
    metric: &MetricModel,
    projections: &[ProjectedExample],
    cs: &ConstraintSet,
    lambda: f64,
    p: f64,
) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {}", lambda)));
    }
    let loss = constraint_loss(metric, projections, cs)?;
    Ok(loss + penalty(metric.blocks(), lambda, p)?)
}

/// In-place `dst += scale · src` over matching flat storage.
fn axpy(dst: &mut DMatrix<f64>, src: &DMatrix<f64>, scale: f64) {
    for (d, s) in dst.as_mut_slice().iter_mut().zip(src.as_slice()) {
        *d += scale * s;
    }
}

/// Subgradient of [`objective`] at the given metric: mean of violated
/// constraints' outer-product differences plus lambda times the Schatten
/// subgradient, one matrix per block (a single block for a shared metric, C
/// blocks for per-class metrics).
pub fn subgradient(
    metric: &MetricModel,
    projections: &[ProjectedExample],
    cs: &ConstraintSet,
    lambda: f64,
    p: f64,
) -> Result<Vec<DMatrix<f64>>> {
    if cs.is_empty() {
        return Err(Error::InvalidArgument("empty constraint set".into()));
    }
    check_indices(cs, projections.len())?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {}", lambda)));
    }
    let d = metric.dim();
    let nblocks = metric.blocks().len();
    let mut grads = vec![DMatrix::zeros(d, d); nblocks];
    let b = cs.margin();

    // dst += scale · (per-block view of pd): the summed product for a shared
    // metric, per-class products otherwise.
    let mut add_pair = |grads: &mut [DMatrix<f64>], pd: &crate::distance::PairDiff, scale: f64| {
        match metric.kind() {
            MetricKind::Single => axpy(&mut grads[0], &pd.summed, scale),
            MetricKind::Multi => {
                for (g, a) in grads.iter_mut().zip(&pd.per_class) {
                    axpy(g, a, scale);
                }
            }
        }
    };

    match cs.kind() {
        ConstraintKind::Triplet => {
            for &[i, j, k] in cs.triplet_terms() {
                let pd_ij = pair_diff(&projections[i], &projections[j])?;
                let pd_ik = pair_diff(&projections[i], &projections[k])?;
                let z = metric.distance(&pd_ij)? + b - metric.distance(&pd_ik)?;
                if z > 0.0 {
                    add_pair(&mut grads, &pd_ij, 1.0);
                    add_pair(&mut grads, &pd_ik, -1.0);
                }
            }
        }
        ConstraintKind::Pair => {
            for &(i, j, r) in cs.pair_terms() {
                let pd = pair_diff(&projections[i], &projections[j])?;
                let z = 1.0 + r as f64 * (metric.distance(&pd)? - b);
                if z > 0.0 {
                    add_pair(&mut grads, &pd, r as f64);
                }
            }
        }
        ConstraintKind::Quad => {
            for &[i, j, k, l] in cs.quad_terms() {
                let pd_ij = pair_diff(&projections[i], &projections[j])?;
                let pd_kl = pair_diff(&projections[k], &projections[l])?;
                let z = metric.distance(&pd_ij)? + b - metric.distance(&pd_kl)?;
                if z > 0.0 {
                    add_pair(&mut grads, &pd_ij, 1.0);
                    add_pair(&mut grads, &pd_kl, -1.0);
                }
            }
        }
    }
    let count = cs.len() as f64;
    for g in &mut grads {
        for v in g.as_mut_slice() {
            *v /= count;
        }
    }
    if lambda > 0.0 {
        for (g, m) in grads.iter_mut().zip(metric.blocks()) {
            let sg = schatten_subgrad(m, p)?;
            axpy(g, &sg, lambda);
        }
    }
    Ok(grads)
}

/// Line-search outcome: the stepsize and whether it satisfied the
/// sufficient-decrease test.
#[derive(Debug, Clone, Copy)]
pub struct LineSearch {
    pub alpha: f64,
    /// False when every probe failed; the caller should accept the fallback
    /// step only if it does not increase the objective.
    pub sufficient_decrease: bool,
}

/// Backtracking line search on f(M − α·G).
///
/// `objective_at(α)` must evaluate the objective at stepsize α;
/// `direction_norm_sq` is ‖G‖²_F. Starting from α = 1 (or `decay` when
/// `decay_first` is set), each probe tests
/// f(α) ≤ f(0) − (α/2)·‖G‖² and shrinks α by `decay` on failure. After
/// `max_probes` failures the fallback stepsize `decay^max_probes` is
/// returned with `sufficient_decrease` unset.
pub fn line_search<F>(
    current_objective: f64,
    direction_norm_sq: f64,
    mut objective_at: F,
    decay: f64,
    max_probes: usize,
    decay_first: bool,
) -> Result<LineSearch>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(direction_norm_sq > 0.0) {
        return Err(Error::InvalidArgument("line search needs a non-zero direction".into()));
    }
    if !(decay > 0.0 && decay < 1.0) {
        return Err(Error::InvalidArgument(format!("decay must lie in (0,1), got {}", decay)));
    }
    if max_probes == 0 {
        return Err(Error::InvalidArgument("at least one probe required".into()));
    }
    for probe in 0..max_probes {
        let alpha = if decay_first { decay.powi(probe as i32 + 1) } else { decay.powi(probe as i32) };
        let f = objective_at(alpha)?;
        if !f.is_finite() {
            return Err(Error::Numerical(format!("non-finite objective {} probed at stepsize {}", f, alpha)));
        }
        if f <= current_objective - 0.5 * alpha * direction_norm_sq {
            return Ok(LineSearch { alpha, sufficient_decrease: true });
        }
    }
    Ok(LineSearch { alpha: decay.powi(max_probes as i32), sufficient_decrease: false })
}

/// One interned constraint term, referencing pair slots.
enum CachedTerm {
    Trip { ij: u32, ik: u32 },
    Pair { ij: u32, sign: f64 },
    Quad { ij: u32, kl: u32 },
}

/// Constraint set with pair outer products interned per unique pair.
///
/// For a shared metric only the class-summed product is kept per pair; for
/// per-class metrics only the per-class products. Distances then reduce to
/// one Frobenius inner product per block.
struct CachedProblem {
    pair_blocks: Vec<Vec<DMatrix<f64>>>,
    terms: Vec<CachedTerm>,
    margin: f64,
}

impl CachedProblem {
    fn build(projections: &[ProjectedExample], cs: &ConstraintSet, kind: MetricKind) -> Result<Self> {
        let mut slots: HashMap<(usize, usize), u32> = HashMap::new();
        let mut pair_blocks: Vec<Vec<DMatrix<f64>>> = Vec::new();
        let mut intern = |a: usize, b: usize, pair_blocks: &mut Vec<Vec<DMatrix<f64>>>| -> Result<u32> {
            let key = (a.min(b), a.max(b));
            if let Some(&slot) = slots.get(&key) {
                return Ok(slot);
            }
            let pd = pair_diff(&projections[a], &projections[b])?;
            let blocks = match kind {
                MetricKind::Single => vec![pd.summed],
                MetricKind::Multi => pd.per_class,
            };
            let slot = pair_blocks.len() as u32;
            pair_blocks.push(blocks);
            slots.insert(key, slot);
            Ok(slot)
        };

        let mut terms = Vec::with_capacity(cs.len());
        match cs.kind() {
            ConstraintKind::Triplet => {
                for &[i, j, k] in cs.triplet_terms() {
                    terms.push(CachedTerm::Trip {
                        ij: intern(i, j, &mut pair_blocks)?,
                        ik: intern(i, k, &mut pair_blocks)?,
                    });
                }
            }
            ConstraintKind::Pair => {
                for &(i, j, r) in cs.pair_terms() {
                    terms.push(CachedTerm::Pair { ij: intern(i, j, &mut pair_blocks)?, sign: r as f64 });
                }
            }
            ConstraintKind::Quad => {
                for &[i, j, k, l] in cs.quad_terms() {
                    terms.push(CachedTerm::Quad {
                        ij: intern(i, j, &mut pair_blocks)?,
                        kl: intern(k, l, &mut pair_blocks)?,
                    });
                }
            }
        }
        Ok(Self { pair_blocks, terms, margin: cs.margin() })
    }

    /// Inner product of every pair's products with the given blocks.
    fn distances(&self, blocks: &[DMatrix<f64>], out: &mut Vec<f64>) {
        out.clear();
        out.reserve(self.pair_blocks.len());
        for pb in &self.pair_blocks {
            let mut d = 0.0;
            for (a, m) in pb.iter().zip(blocks) {
                d += frob_dot(a, m);
            }
            out.push(d);
        }
    }

    /// Hinge argument of one term given per-pair distances.
    #[inline]
    fn term_z(&self, term: &CachedTerm, dist: &[f64]) -> f64 {
        let b = self.margin;
        match *term {
            CachedTerm::Trip { ij, ik } => dist[ij as usize] + b - dist[ik as usize],
            CachedTerm::Pair { ij, sign } => 1.0 + sign * (dist[ij as usize] - b),
            CachedTerm::Quad { ij, kl } => dist[ij as usize] + b - dist[kl as usize],
        }
    }

    fn loss(&self, dist: &[f64]) -> f64 {
        let mut sum = 0.0;
        for term in &self.terms {
            let z = self.term_z(term, dist);
            if z > 0.0 {
                sum += z;
            }
        }
        sum / self.terms.len() as f64
    }

    /// Loss at stepsize alpha using the linearity d(M − αG) = s − α·t.
    fn loss_at_step(&self, dist: &[f64], gdist: &[f64], alpha: f64) -> f64 {
        let b = self.margin;
        let mut sum = 0.0;
        for term in &self.terms {
            let z = match *term {
                CachedTerm::Trip { ij, ik } => {
                    (dist[ij as usize] - alpha * gdist[ij as usize]) + b
                        - (dist[ik as usize] - alpha * gdist[ik as usize])
                }
                CachedTerm::Pair { ij, sign } => {
                    1.0 + sign * ((dist[ij as usize] - alpha * gdist[ij as usize]) - b)
                }
                CachedTerm::Quad { ij, kl } => {
                    (dist[ij as usize] - alpha * gdist[ij as usize]) + b
                        - (dist[kl as usize] - alpha * gdist[kl as usize])
                }
            };
            if z > 0.0 {
                sum += z;
            }
        }
        sum / self.terms.len() as f64
    }

    /// Adds the mean violated-constraint gradient into `grads`, returning
    /// the violated count.
    fn violation_gradient(&self, dist: &[f64], grads: &mut [DMatrix<f64>]) -> usize {
        let mut violated = 0usize;
        for term in &self.terms {
            if self.term_z(term, dist) <= 0.0 {
                continue;
            }
            violated += 1;
            match *term {
                CachedTerm::Trip { ij, ik } => {
                    for (g, a) in grads.iter_mut().zip(&self.pair_blocks[ij as usize]) {
                        axpy(g, a, 1.0);
                    }
                    for (g, a) in grads.iter_mut().zip(&self.pair_blocks[ik as usize]) {
                        axpy(g, a, -1.0);
                    }
                }
                CachedTerm::Pair { ij, sign } => {
                    for (g, a) in grads.iter_mut().zip(&self.pair_blocks[ij as usize]) {
                        axpy(g, a, sign);
                    }
                }
                CachedTerm::Quad { ij, kl } => {
                    for (g, a) in grads.iter_mut().zip(&self.pair_blocks[ij as usize]) {
                        axpy(g, a, 1.0);
                    }
                    for (g, a) in grads.iter_mut().zip(&self.pair_blocks[kl as usize]) {
                        axpy(g, a, -1.0);
                    }
                }
            }
        }
        let count = self.terms.len() as f64;
        for g in grads.iter_mut() {
            for v in g.as_mut_slice() {
                *v /= count;
            }
        }
        violated
    }
}

/// Trains on sampled triplet constraints derived from `labels`.
pub fn train(projections: &[ProjectedExample], labels: &[usize], config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    if projections.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} projections vs {} labels",
            projections.len(),
            labels.len()
        )));
    }
    let count = config.resolved_constraints(labels.len());
    let cs = build_triplets(labels, count, config.seed)?.with_margin(config.b)?;
    train_with_constraints(projections, &cs, config)
}

/// Trains on an explicit constraint set (any kind).
pub fn train_with_constraints(
    projections: &[ProjectedExample],
    cs: &ConstraintSet,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if cs.is_empty() {
        return Err(Error::InvalidArgument("empty constraint set".into()));
    }
    if projections.is_empty() {
        return Err(Error::InvalidData("no projected examples".into()));
    }
    check_indices(cs, projections.len())?;
    let d = projections[0].feature_count();
    let c = projections[0].class_count();
    for ex in projections {
        if ex.feature_count() != d || ex.class_count() != c {
            return Err(Error::ShapeMismatch("projected examples differ in shape".into()));
        }
    }

    let total_start = Instant::now();
    let cache = CachedProblem::build(projections, cs, config.kind)?;
    let nblocks = match config.kind {
        MetricKind::Single => 1,
        MetricKind::Multi => c,
    };
    let mut blocks = vec![DMatrix::identity(d, d); nblocks];
    let mut dist: Vec<f64> = Vec::new();
    cache.distances(&blocks, &mut dist);
    let mut f_cur = cache.loss(&dist) + penalty(&blocks, config.lambda, config.p)?;
    if !f_cur.is_finite() {
        return Err(Error::Numerical(format!("non-finite initial objective {}", f_cur)));
    }
    let mut trace = vec![f_cur];
    let mut violated_counts: Vec<usize> = Vec::new();
    let setup_seconds = total_start.elapsed().as_secs_f64();

    let loop_start = Instant::now();
    let mut grads = vec![DMatrix::zeros(d, d); nblocks];
    let mut gdist: Vec<f64> = Vec::new();
    let mut cand_dist: Vec<f64> = Vec::new();
    let mut streak = 0usize;
    while trace.len() - 1 < config.max_iters {
        for g in &mut grads {
            g.fill(0.0);
        }
        let violated = cache.violation_gradient(&dist, &mut grads);
        if config.lambda > 0.0 {
            for (g, m) in grads.iter_mut().zip(&blocks) {
                let sg = schatten_subgrad(m, config.p)?;
                axpy(g, &sg, config.lambda);
            }
        }
        let gnorm_sq: f64 = grads.iter().map(|g| g.iter().map(|v| v * v).sum::<f64>()).sum();
        if gnorm_sq == 0.0 {
            // Stationary: nothing violated and no penalty pull.
            break;
        }
        cache.distances(&grads, &mut gdist);
        let ls = line_search(
            f_cur,
            gnorm_sq,
            |alpha| {
                let mut probed = cache.loss_at_step(&dist, &gdist, alpha);
                if config.lambda > 0.0 {
                    let mut reg = 0.0;
                    for (m, g) in blocks.iter().zip(&grads) {
                        reg += schatten_value(&(m - g * alpha), config.p)?;
                    }
                    probed += config.lambda * reg;
                }
                Ok(probed)
            },
            config.step_decay,
            config.max_linesearch,
            config.decay_first,
        )?;

        let mut candidate = Vec::with_capacity(nblocks);
        for (m, g) in blocks.iter().zip(&grads) {
            candidate.push(psd_project(&(m - g * ls.alpha))?);
        }
        cache.distances(&candidate, &mut cand_dist);
        let cand_f = cache.loss(&cand_dist) + penalty(&candidate, config.lambda, config.p)?;
        if !cand_f.is_finite() {
            return Err(Error::Numerical(format!("non-finite objective {} after step", cand_f)));
        }
        if cand_f > f_cur + 1e-12 {
            // The projected step would increase the objective; keep the
            // current iterate and stop rather than loop on the same point.
            break;
        }
        let rel = (f_cur - cand_f).abs() / f_cur.abs().max(1e-12);
        blocks = candidate;
        std::mem::swap(&mut dist, &mut cand_dist);
        f_cur = cand_f;
        trace.push(f_cur);
        violated_counts.push(violated);
        streak = if rel < config.tol { streak + 1 } else { 0 };
        if streak >= 3 {
            break;
        }
    }
    let loop_seconds = loop_start.elapsed().as_secs_f64();

    let final_metric = match config.kind {
        MetricKind::Single => MetricModel::single(blocks.swap_remove(0))?,
        MetricKind::Multi => MetricModel::multi(blocks)?,
    };
    let iterations_run = trace.len() - 1;
    Ok(TrainReport {
        final_metric,
        objective_trace: trace,
        violated_counts,
        iterations_run,
        wall_time: total_start.elapsed().as_secs_f64(),
        setup_seconds,
        loop_seconds,
    })
}
