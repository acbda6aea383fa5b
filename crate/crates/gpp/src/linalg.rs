//! Symmetric positive-definite factorization with jitter escalation.
//!
//! Kernel matrices built from the cosine kernel are low-rank (at most d+1)
//! whenever |D| > d+1, so a plain Cholesky of K alone would fail. The
//! heteroscedastic noise diagonals usually rescue positive-definiteness, but
//! near-duplicate observations can still push the smallest eigenvalue below
//! zero in floating point. `spd_factor` escalates a diagonal jitter by
//! factors of 10 until the factorization succeeds and records the jitter it
//! actually used.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{GppError, Result};

/// Default starting jitter for [`spd_factor`].
pub const DEFAULT_BASE_JITTER: f64 = 1e-10;

/// Largest jitter tried before giving up.
pub const MAX_JITTER: f64 = 1e-4;

/// Cholesky factor of `M + jitter * I` together with the jitter used.
#[derive(Debug, Clone)]
pub struct SpdFactorization {
    chol: Cholesky<f64, Dyn>,
    jitter: f64,
}

impl SpdFactorization {
    /// Diagonal jitter that was added before factorization succeeded.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// Lower-triangular factor L with `L Lᵀ = M + jitter I`.
    pub fn lower(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// Solves `(M + jitter I) X = rhs` columnwise via the two triangular
    /// solves of the factorization.
    pub fn solve(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(rhs)
    }

    pub fn solve_vec(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }
}

/// Factorizes a symmetric matrix as `M + jitter I = L Lᵀ`, escalating the
/// jitter by x10 from `base_jitter` up to [`MAX_JITTER`] until Cholesky
/// succeeds.
pub fn spd_factor(m: &DMatrix<f64>, base_jitter: f64) -> Result<SpdFactorization> {
    if m.nrows() != m.ncols() {
        return Err(GppError::InvalidInput(format!(
            "spd_factor expects a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(GppError::InvalidInput(
            "spd_factor: matrix contains non-finite entries".into(),
        ));
    }
    let mut jitter = base_jitter.max(0.0);
    loop {
        let mut jittered = m.clone();
        for i in 0..m.nrows() {
            jittered[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(jittered) {
            return Ok(SpdFactorization { chol, jitter });
        }
        let next = if jitter == 0.0 { DEFAULT_BASE_JITTER } else { jitter * 10.0 };
        if next > MAX_JITTER {
            return Err(GppError::NumericalFailure(format!(
                "matrix of size {} not positive-definite even at jitter {:.1e} \
                 (started from {:.1e})",
                m.nrows(),
                jitter,
                base_jitter
            )));
        }
        jitter = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_factors_at_base_jitter() {
        let m = DMatrix::<f64>::identity(4, 4);
        let f = spd_factor(&m, 1e-10).unwrap();
        assert_eq!(f.jitter(), 1e-10);
        let l = f.lower();
        for i in 0..4 {
            assert!((l[(i, i)] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn reconstructs_random_spd_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let n = 6;
            let mut l = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in 0..i {
                    l[(i, j)] = rng.gen_range(-1.0..1.0);
                }
                l[(i, i)] = rng.gen_range(0.5..2.0);
            }
            let m = &l * l.transpose();
            let f = spd_factor(&m, 1e-10).unwrap();
            let rec = f.lower() * f.lower().transpose();
            let rel = (&rec - &m).norm() / m.norm();
            assert!(rel < 1e-10, "relative reconstruction error {rel}");
        }
    }

    #[test]
    fn near_singular_matrix_escalates_jitter() {
        // Smallest eigenvalue is ~-1e-6, so every jitter below 1e-6 leaves a
        // non-positive Cholesky pivot and the factorization must escalate.
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0 - 2e-6]);
        let f = spd_factor(&m, 1e-10).unwrap();
        assert!(f.jitter() >= 1e-6);
        assert!(f.jitter() <= MAX_JITTER);
        let rec = f.lower() * f.lower().transpose();
        // Reconstruction differs from M only by the jitter on the diagonal.
        let mut expected = m.clone();
        for i in 0..2 {
            expected[(i, i)] += f.jitter();
        }
        assert!((&rec - &expected).norm() < 1e-8);
    }

    #[test]
    fn genuinely_indefinite_matrix_fails() {
        let m = DMatrix::<f64>::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(
            spd_factor(&m, 1e-10),
            Err(GppError::NumericalFailure(_))
        ));
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let m = DMatrix::<f64>::identity(3, 3);
        let f = spd_factor(&m, 0.0).unwrap();
        let rhs = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let x = f.solve(&rhs);
        assert!((&x - &rhs).norm() < 1e-12);
    }

    #[test]
    fn solve_residual_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 8;
        let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let m = &a * a.transpose() + DMatrix::identity(n, n);
        let f = spd_factor(&m, 1e-10).unwrap();
        let rhs = DMatrix::<f64>::from_fn(n, 3, |_, _| rng.gen_range(-1.0..1.0));
        let x = f.solve(&rhs);
        let mut jittered = m.clone();
        for i in 0..n {
            jittered[(i, i)] += f.jitter();
        }
        let residual = &jittered * &x - &rhs;
        assert!(residual.norm() < 1e-9);

        // Multi-rhs solve matches columnwise single solves.
        for c in 0..3 {
            let col = DVector::from_column_slice(rhs.column(c).as_slice());
            let xc = f.solve_vec(&col);
            assert!((x.column(c) - xc).norm() < 1e-12);
        }
    }
}
