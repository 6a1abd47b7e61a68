//! Schatten p-norm values and subgradients, and PSD-cone projection.
//!
//! On PSD matrices the Schatten p-norm is (Σ_k λ_k^p)^{1/p} over
//! eigenvalues; p=1 gives the trace norm and p=2 the Frobenius norm. Powers
//! are taken on eigenvalues normalized by the largest one so large p stays
//! finite. Eigenvalues in [−1e-8, 0) are treated as exact zeros: PSD
//! projection leaves tiny negatives behind and they must not poison
//! fractional powers.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Largest |M_pq − M_qp| over the matrix.
fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for p in 0..m.nrows() {
        for q in 0..p {
            worst = worst.max((m[(p, q)] - m[(q, p)]).abs());
        }
    }
    worst
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    Ok(())
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    check_square(m)?;
    let asym = max_asymmetry(m);
    if asym > 1e-9 {
        return Err(Error::InvalidArgument(format!("matrix asymmetric by {} (tolerance 1e-9)", asym)));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidArgument(format!("p must be finite and at least 1, got {}", p)));
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix, rejecting non-finite input.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigendecomposition failure: non-finite entries".into()));
    }
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    Ok((eig.eigenvalues, eig.eigenvectors))
}

/// Smallest eigenvalue of a symmetric matrix.
pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    let (values, _) = sym_eigen(m)?;
    Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Eigenvalues with negatives clipped to zero, descending order not
/// guaranteed.
fn clipped_eigen(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let (mut values, vectors) = sym_eigen(m)?;
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok((values, vectors))
}

/// Schatten p-norm (Σ_k λ_k^p)^{1/p} of a symmetric PSD matrix.
pub fn schatten_value(m: &DMatrix<f64>, p: f64) -> Result<f64> {
    check_p(p)?;
    check_symmetric(m)?;
    let (values, _) = clipped_eigen(m)?;
    Ok(p_norm(values.as_slice(), p))
}

/// p-norm of a non-negative vector, scaled by the maximum for stability.
fn p_norm(values: &[f64], p: f64) -> f64 {
    let top = values.iter().copied().fold(0.0f64, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|&v| (v / top).powf(p)).sum();
    top * sum.powf(1.0 / p)
}

/// Subgradient of the Schatten p-norm at a symmetric PSD matrix.
///
/// For p=1 this is the identity (gradient of the trace on the PSD cone);
/// for p>1 it is U·diag(λ_k^{p−1})·Uᵀ scaled by (Σλ^p)^{1/p−1}, computed as
/// (λ_k/‖λ‖_p)^{p−1} on the eigenbasis. The zero matrix gets the zero
/// subgradient.
pub fn schatten_subgrad(m: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
    check_p(p)?;
    check_symmetric(m)?;
    let d = m.nrows();
    if p == 1.0 {
        return Ok(DMatrix::identity(d, d));
    }
    let (values, vectors) = clipped_eigen(m)?;
    let norm = p_norm(values.as_slice(), p);
    if norm == 0.0 {
        return Ok(DMatrix::zeros(d, d));
    }
    let scaled = DVector::from_iterator(d, values.iter().map(|&v| (v / norm).powf(p - 1.0)));
    let g = &vectors * DMatrix::from_diagonal(&scaled) * vectors.transpose();
    Ok(symmetrize(g))
}

/// Frobenius-nearest PSD matrix: symmetrize, eigendecompose, clamp negative
/// eigenvalues to zero, reconstruct.
pub fn psd_project(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(m)?;
    let s = symmetrize(m.clone());
    let (values, vectors) = sym_eigen(&s)?;
    let clamped = DVector::from_iterator(values.len(), values.iter().map(|&v| v.max(0.0)));
    let rebuilt = &vectors * DMatrix::from_diagonal(&clamped) * vectors.transpose();
    Ok(symmetrize(rebuilt))
}

/// (M + Mᵀ)/2.
pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_pd(d: usize, seed: u64, ridge: f64) -> DMatrix<f64> {
        let mut rng = crate::rng::sub_rng(seed, 91);
        let b = DMatrix::from_fn(d, d, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        &b * b.transpose() + DMatrix::identity(d, d) * ridge
    }

    #[test]
    fn identity_value() {
        for d in [2usize, 4, 7] {
            for p in [1.0, 1.5, 2.0, 3.0] {
                let v = schatten_value(&DMatrix::identity(d, d), p).unwrap();
                assert_relative_eq!(v, (d as f64).powf(1.0 / p), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn three_four_five() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 4.0]));
        assert_relative_eq!(schatten_value(&m, 2.0).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_and_frobenius_oracles() {
        for seed in 0..20u64 {
            let m = random_pd(5, seed, 0.1);
            let trace: f64 = m.trace();
            let frob: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert_relative_eq!(schatten_value(&m, 1.0).unwrap(), trace, epsilon = 1e-10 * trace.max(1.0));
            assert_relative_eq!(schatten_value(&m, 2.0).unwrap(), frob, epsilon = 1e-10 * frob.max(1.0));
        }
    }

    #[test]
    fn p_below_one_rejected() {
        let m = DMatrix::identity(2, 2);
        assert!(schatten_value(&m, 0.5).is_err());
        assert!(schatten_subgrad(&m, 0.99).is_err());
        assert!(schatten_value(&m, f64::INFINITY).is_err());
    }

    #[test]
    fn asymmetric_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 1.0]);
        assert!(schatten_value(&m, 2.0).is_err());
        assert!(schatten_subgrad(&m, 2.0).is_err());
    }

    #[test]
    fn subgrad_p1_is_identity() {
        for seed in 0..5u64 {
            let m = random_pd(4, seed, 0.2);
            let g = schatten_subgrad(&m, 1.0).unwrap();
            assert_eq!(g, DMatrix::identity(4, 4));
        }
    }

    #[test]
    fn subgrad_p2_normalizes() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 4.0]));
        let g = schatten_subgrad(&m, 2.0).unwrap();
        assert_relative_eq!(g[(0, 0)], 0.6, epsilon = 1e-12);
        assert_relative_eq!(g[(1, 1)], 0.8, epsilon = 1e-12);
        assert_relative_eq!(g[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn subgrad_zero_matrix() {
        let z = DMatrix::zeros(3, 3);
        assert_eq!(schatten_subgrad(&z, 2.0).unwrap(), DMatrix::zeros(3, 3));
        assert_eq!(schatten_value(&z, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn subgrad_matches_finite_differences() {
        // Directional derivative of the norm along random symmetric
        // directions, compared against ⟨G, V⟩.
        let h = 1e-6;
        let mut rng = crate::rng::sub_rng(2024, 92);
        for p in [1.5, 2.0, 3.0] {
            for trial in 0..100 {
                let d = 3 + (trial % 3);
                let m = random_pd(d, trial as u64 + 1000, 0.3);
                let g = schatten_subgrad(&m, p).unwrap();
                let v = symmetrize(DMatrix::from_fn(d, d, |_, _| rng.gen::<f64>() * 2.0 - 1.0));
                let plus = schatten_value(&(&m + &v * h), p).unwrap();
                let minus = schatten_value(&(&m - &v * h), p).unwrap();
                let fd = (plus - minus) / (2.0 * h);
                let analytic = crate::distance::frob_dot(&g, &v);
                let scale = fd.abs().max(analytic.abs()).max(1e-8);
                assert!(
                    (fd - analytic).abs() / scale < 1e-4,
                    "p={} trial={}: fd={} analytic={}",
                    p,
                    trial,
                    fd,
                    analytic
                );
            }
        }
    }

    #[test]
    fn project_clamps_negative_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -1.0]));
        let p = psd_project(&m).unwrap();
        assert_relative_eq!(p[(0, 0)], 2.0, epsilon = 1e-12);
        assert_relative_eq!(p[(1, 1)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(p[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn project_off_diagonal_case() {
        // Eigenpairs of [[0,1],[1,0]] are ±1 with (1,±1)/√2 vectors; dropping
        // the negative one leaves the all-half matrix.
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let p = psd_project(&m).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_relative_eq!(p[(i, j)], 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn project_leaves_psd_unchanged() {
        for seed in 0..10u64 {
            let m = random_pd(4, seed, 0.05);
            let p = psd_project(&m).unwrap();
            assert_relative_eq!((&p - &m).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn project_rejects_non_finite() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(psd_project(&m), Err(Error::Numerical(_))));
    }

    #[test]
    fn large_p_tracks_max_eigenvalue() {
        for seed in 0..10u64 {
            let m = random_pd(5, seed + 40, 0.2);
            let (values, _) = sym_eigen(&m).unwrap();
            let top = values.iter().copied().fold(0.0f64, f64::max);
            let v = schatten_value(&m, 64.0).unwrap();
            assert!(v >= top - 1e-9 && v <= top * 1.05, "value {} vs max eigenvalue {}", v, top);
        }
    }

    proptest! {
        #[test]
        fn homogeneous(seed in 0u64..200, alpha in 0.0f64..5.0) {
            let m = random_pd(3, seed, 0.1);
            let p = 2.5;
            let lhs = schatten_value(&(&m * alpha), p).unwrap();
            let rhs = alpha * schatten_value(&m, p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }

        #[test]
        fn non_increasing_in_p(seed in 0u64..200) {
            let m = random_pd(4, seed, 0.1);
            let grid = [1.0, 1.3, 2.0, 3.0, 5.0, 10.0];
            let mut last = f64::INFINITY;
            for &p in &grid {
                let v = schatten_value(&m, p).unwrap();
                prop_assert!(v <= last + 1e-9, "value rose from {} to {} at p={}", last, v, p);
                last = v;
            }
        }

        #[test]
        fn projection_is_idempotent_and_contractive(seed in 0u64..300) {
            let mut rng = crate::rng::sub_rng(seed, 93);
            let s = symmetrize(DMatrix::from_fn(2, 2, |_, _| rng.gen::<f64>() * 4.0 - 2.0));
            let once = psd_project(&s).unwrap();
            let twice = psd_project(&once).unwrap();
            prop_assert!((&twice - &once).norm() <= 1e-10);
            // Projection never moves farther from any PSD point than the
            // original was.
            let p_target = {
                let b = DMatrix::from_fn(2, 2, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
                &b * b.transpose()
            };
            let before = (&s - &p_target).norm();
            let after = (&once - &p_target).norm();
            prop_assert!(after <= before + 1e-9, "distance grew from {} to {}", before, after);
        }
    }
}
