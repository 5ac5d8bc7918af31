//! Dense complex linear algebra for matrices up to 9x9.
//!
//! This is all the machinery the rest of the crate needs: an eigendecomposition
//! with a deterministic ordering, a matrix exponential that stays accurate even
//! for defective input (a Liouvillian at its exceptional point has a Jordan
//! block, so the eigendecomposition route alone is not enough), and a nullspace
//! extractor for steady states. Matrices are tiny, so clarity and determinism
//! win over performance everywhere.
//!
//! Eigen/singular-value/LU factorizations are delegated to `faer`; the
//! exponential-specific logic (route selection, Pade approximant, scaling and
//! squaring) lives here.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

/// Largest supported dimension (the three-level Liouvillian is 9x9).
pub const MAX_DIM: usize = 9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension {dim} exceeds the supported maximum {MAX_DIM}")]
    DimensionTooLarge { dim: usize },
    #[error("matrix has an empty dimension")]
    EmptyMatrix,
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
}

/// Validated dense complex matrix: both dimensions in `1..=9`, all entries
/// finite. This is the only matrix type the numerical kernels accept.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<Complex64>,
}

impl ComplexMatrix {
    pub fn new(data: Array2<Complex64>) -> Result<Self, LinalgError> {
        let (rows, cols) = data.dim();
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if rows > MAX_DIM {
            return Err(LinalgError::DimensionTooLarge { dim: rows });
        }
        if cols > MAX_DIM {
            return Err(LinalgError::DimensionTooLarge { dim: cols });
        }
        for ((row, col), z) in data.indexed_iter() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(LinalgError::NonFinite { row, col });
            }
        }
        Ok(Self { data })
    }

    /// Build from explicit rows; rows must be non-empty and of equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LinalgError::EmptyMatrix);
        }
        let ncols = rows[0].len();
        let mut data = Array2::zeros((rows.len(), ncols));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::NonSquare {
                    rows: rows.len(),
                    cols: row.len(),
                });
            }
            for (j, z) in row.iter().enumerate() {
                data[(i, j)] = *z;
            }
        }
        Self::new(data)
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.data
    }

    /// Entrywise multiplication by a scalar (re-validated, since an overflow
    /// could manufacture a non-finite entry).
    pub fn scaled(&self, factor: Complex64) -> Result<Self, LinalgError> {
        Self::new(self.data.mapv(|z| z * factor))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        self.data.dot(v)
    }

    /// Maximum absolute column sum (induced 1-norm).
    pub fn norm_one(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for col in self.data.columns() {
            let s: f64 = col.iter().map(|z| z.norm()).sum();
            worst = worst.max(s);
        }
        worst
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.data[idx]
    }
}

/// Eigendecomposition result. Eigenvalues are sorted by real part ascending,
/// ties broken by imaginary part ascending; eigenvectors follow the same
/// permutation, are normalized to unit Euclidean norm, and carry a fixed phase
/// (the largest-magnitude component is real and non-negative) so that repeated
/// runs produce identical output.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<Array1<Complex64>>,
}

fn to_faer(a: &Array2<Complex64>) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(m: &faer::Mat<Complex64>) -> Array2<Complex64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

fn require_square(m: &ComplexMatrix) -> Result<usize, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Normalize a vector and rotate its phase so the largest-magnitude component
/// (lowest index on ties) is real and non-negative.
fn normalize_phase(v: &mut Array1<Complex64>) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.mapv_inplace(|z| z / norm);
    }
    let mut pivot = 0;
    let mut best = -1.0f64;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > best + 1e-15 {
            best = z.norm();
            pivot = k;
        }
    }
    let p = v[pivot];
    if p.norm() > 0.0 {
        let phase = p.conj() / p.norm();
        v.mapv_inplace(|z| z * phase);
    }
}

fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Full eigendecomposition with right eigenvectors.
///
/// Deterministic for a fixed input: the backend is deterministic and the
/// ordering/phase conventions are fixed here.
pub fn eig(m: &ComplexMatrix) -> Result<SpectralResult, LinalgError> {
    let n = require_square(m)?;
    let decomp = to_faer(m.as_array())
        .eigen()
        .map_err(|_| LinalgError::NoConvergence)?;
    let values = decomp.S();
    let vectors = decomp.U();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sort_key(&values[a], &values[b]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &k in &order {
        eigenvalues.push(values[k]);
        let mut v = Array1::from_shape_fn(n, |i| vectors[(i, k)]);
        normalize_phase(&mut v);
        eigenvectors.push(v);
    }
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues of a Hermitian matrix, ascending. Input Hermiticity is the
/// caller's responsibility; imaginary parts (numerical dust for Hermitian
/// input) are discarded.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let spectral = eig(m)?;
    let mut vals: Vec<f64> = spectral.eigenvalues.iter().map(|z| z.re).collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn extremal_singular_values(m: &faer::Mat<Complex64>) -> Result<(f64, f64), LinalgError> {
    let svd = m.svd().map_err(|_| LinalgError::NoConvergence)?;
    let s = svd.S();
    let n = m.nrows().min(m.ncols());
    // Singular values come back ordered descending.
    Ok((s[0].re, s[n - 1].re))
}

/// Matrix exponential.
///
/// Route selection: if the matrix is diagonalizable with eigenvector condition
/// number below [`tol::EXPM_EIG_CONDITION_LIMIT`], exponentiate through the
/// eigendecomposition. Otherwise (defective or nearly defective input) fall
/// back to scaling-and-squaring with a fixed [13/13] Pade approximant, which
/// has no diagonalizability requirement. Accurate to ~1e-10 relative error for
/// inputs with norm up to 100.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    require_square(m)?;
    if let Some(result) = expm_via_eig(m)? {
        return Ok(result);
    }
    expm_pade(m)
}

/// Eigendecomposition route; `None` if the eigenvector basis is too
/// ill-conditioned to trust.
fn expm_via_eig(m: &ComplexMatrix) -> Result<Option<ComplexMatrix>, LinalgError> {
    let n = m.nrows();
    let decomp = match to_faer(m.as_array()).eigen() {
        Ok(d) => d,
        Err(_) => return Ok(None),
    };
    let vmat = decomp.U().to_owned();
    let (smax, smin) = extremal_singular_values(&vmat)?;
    if smin <= 0.0 || smax / smin >= tol::EXPM_EIG_CONDITION_LIMIT {
        return Ok(None);
    }
    let values = decomp.S();
    let vinv = vmat.partial_piv_lu().inverse();
    // E = V exp(Lambda) V^-1, with the diagonal exponential folded into V.
    let scaled_v = faer::Mat::from_fn(n, n, |i, j| vmat[(i, j)] * values[j].exp());
    let e = &scaled_v * &vinv;
    Ok(Some(ComplexMatrix::new(from_faer(&e))?))
}

/// Pade coefficients for the [13/13] approximant of exp.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// 1-norm threshold below which the [13/13] approximant alone is accurate.
const PADE13_THETA: f64 = 5.371_920_351_148_152;

/// Scaling-and-squaring matrix exponential with a fixed-order Pade core.
/// Exposed within the crate so tests can cross-check it against the
/// eigendecomposition route.
pub(crate) fn expm_pade(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = m.nrows();
    let norm = m.norm_one();
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(squarings as i32), 0.0);
    let a: Array2<Complex64> = m.as_array().mapv(|z| z * scale);

    let id: Array2<Complex64> = Array2::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let u_inner = a6.mapv(|z| z * b(13)) + a4.mapv(|z| z * b(11)) + a2.mapv(|z| z * b(9));
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|z| z * b(7))
        + a4.mapv(|z| z * b(5))
        + a2.mapv(|z| z * b(3))
        + id.mapv(|z| z * b(1));
    let u = a.dot(&u_poly);
    let v_inner = a6.mapv(|z| z * b(12)) + a4.mapv(|z| z * b(10)) + a2.mapv(|z| z * b(8));
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * b(6))
        + a4.mapv(|z| z * b(4))
        + a2.mapv(|z| z * b(2))
        + id.mapv(|z| z * b(0));

    // Solve (V - U) X = (V + U).
    let lhs = to_faer(&(&v - &u));
    let rhs = to_faer(&(&v + &u));
    let mut x = from_faer(&lhs.partial_piv_lu().solve(&rhs));
    for _ in 0..squarings {
        x = x.dot(&x);
    }
    ComplexMatrix::new(x)
}

/// Orthonormal basis of the numerical nullspace: right singular vectors whose
/// singular value is at most `tol * sigma_max`. Returns an empty list for a
/// full-rank matrix. [`tol::NULLSPACE_DEFAULT`] is the recommended tolerance.
pub fn nullspace(
    m: &ComplexMatrix,
    tol: f64,
) -> Result<Vec<Array1<Complex64>>, LinalgError> {
    let n = require_square(m)?;
    let svd = to_faer(m.as_array())
        .svd()
        .map_err(|_| LinalgError::NoConvergence)?;
    let s = svd.S();
    let v = svd.V();
    let sigma_max = s[0].re;
    let mut basis = Vec::new();
    for k in 0..n {
        if s[k].re <= tol * sigma_max {
            let mut col = Array1::from_shape_fn(n, |i| v[(i, k)]);
            normalize_phase(&mut col);
            basis.push(col);
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(entries: &[Complex64]) -> ComplexMatrix {
        let n = entries.len();
        let mut a = Array2::zeros((n, n));
        for (k, z) in entries.iter().enumerate() {
            a[(k, k)] = *z;
        }
        ComplexMatrix::new(a).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha12Rng, n: usize) -> ComplexMatrix {
        let a = Array2::from_shape_fn((n, n), |_| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        ComplexMatrix::new(a).unwrap()
    }

    fn max_entry_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn rejects_invalid_dimensions_and_entries() {
        assert!(matches!(
            ComplexMatrix::new(Array2::zeros((0, 3))),
            Err(LinalgError::EmptyMatrix)
        ));
        assert!(matches!(
            ComplexMatrix::new(Array2::zeros((10, 10))),
            Err(LinalgError::DimensionTooLarge { dim: 10 })
        ));
        let mut bad = Array2::<Complex64>::zeros((2, 2));
        bad[(1, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::new(bad),
            Err(LinalgError::NonFinite { row: 1, col: 0 })
        ));
        let rect = ComplexMatrix::new(Array2::zeros((2, 3))).unwrap();
        assert!(matches!(
            eig(&rect),
            Err(LinalgError::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn eig_diagonal_matrix_sorted_by_real_then_imaginary_part() {
        let m = diag(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
        let spectral = eig(&m).unwrap();
        let expected = [c(-3.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)];
        for (got, want) in spectral.eigenvalues.iter().zip(expected.iter()) {
            assert_relative_eq!(got.re, want.re, epsilon = 1e-12);
            assert_relative_eq!(got.im, want.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn eig_residual_bound_holds_for_random_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in [2usize, 4, 5, 9] {
            let m = random_matrix(&mut rng, n);
            let spectral = eig(&m).unwrap();
            assert_eq!(spectral.eigenvalues.len(), n);
            let mnorm = m.norm_frobenius();
            for (lambda, v) in spectral
                .eigenvalues
                .iter()
                .zip(spectral.eigenvectors.iter())
            {
                let residual = &m.apply(v) - &v.mapv(|z| z * lambda);
                let rnorm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!(
                    rnorm <= tol::EIG_RESIDUAL * mnorm,
                    "residual {rnorm:.3e} too large for n={n}"
                );
            }
        }
    }

    #[test]
    fn eig_residual_bound_holds_for_a_defective_matrix() {
        // Jordan block: eigenvalue 1 twice, a single eigenvector direction.
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let spectral = eig(&m).unwrap();
        let mnorm = m.norm_frobenius();
        for (lambda, v) in spectral
            .eigenvalues
            .iter()
            .zip(spectral.eigenvectors.iter())
        {
            assert_relative_eq!(lambda.re, 1.0, epsilon = 1e-7);
            let residual = &m.apply(v) - &v.mapv(|z| z * lambda);
            let rnorm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(rnorm <= tol::EIG_RESIDUAL * mnorm);
        }
    }

    #[test]
    fn eig_reconstruction_for_diagonalizable_input() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 5);
            let spectral = eig(&m).unwrap();
            let n = m.nrows();
            let mut v = Array2::zeros((n, n));
            for (k, vec) in spectral.eigenvectors.iter().enumerate() {
                for i in 0..n {
                    v[(i, k)] = vec[i];
                }
            }
            let vm = ComplexMatrix::new(v.clone()).unwrap();
            let lam = Array2::from_shape_fn((n, n), |(i, j)| {
                if i == j {
                    spectral.eigenvalues[i]
                } else {
                    c(0.0, 0.0)
                }
            });
            // V Lambda V^-1 via a solve: find X with X V = V Lambda.
            let vl = v.dot(&lam);
            let vinv_t = to_faer(vm.as_array()).partial_piv_lu().inverse();
            let reconstructed = vl.dot(&from_faer(&vinv_t));
            let err = max_entry_diff(&reconstructed, m.as_array());
            assert!(
                err <= 1e-8 * m.norm_frobenius(),
                "reconstruction error {err:.3e}"
            );
        }
    }

    #[test]
    fn eig_is_deterministic_for_a_fixed_input() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let m = random_matrix(&mut rng, 6);
        let a = eig(&m).unwrap();
        let b = eig(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        for (va, vb) in a.eigenvectors.iter().zip(b.eigenvectors.iter()) {
            assert_eq!(va, vb);
        }
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = ComplexMatrix::new(Array2::zeros((3, 3))).unwrap();
        let e = expm(&z).unwrap();
        let id: Array2<Complex64> = Array2::eye(3);
        assert!(max_entry_diff(e.as_array(), &id) < 1e-14);
    }

    #[test]
    fn expm_of_diagonal_matches_scalar_exponentials() {
        let m = diag(&[c(-1.0, 0.0), c(0.0, 2.0)]);
        let e = expm(&m).unwrap();
        assert_relative_eq!(e[(0, 0)].re, (-1.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(e[(0, 0)].im, 0.0, epsilon = 1e-12);
        assert_relative_eq!(e[(1, 1)].re, 2.0f64.cos(), epsilon = 1e-12);
        assert_relative_eq!(e[(1, 1)].im, 2.0f64.sin(), epsilon = 1e-12);
        assert!(e[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn expm_of_a_jordan_block_uses_the_pade_route_and_is_exact() {
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]]; the eigenvector basis is singular
        // so only the scaling-and-squaring route can produce this.
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let e = expm(&m).unwrap();
        let expected = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(max_entry_diff(e.as_array(), expected.as_array()) < 1e-13);
    }

    #[test]
    fn expm_routes_agree_on_well_conditioned_input() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 4);
            let hybrid = expm(&m).unwrap();
            let pade = expm_pade(&m).unwrap();
            let scale = hybrid.norm_frobenius();
            assert!(
                max_entry_diff(hybrid.as_array(), pade.as_array()) <= tol::EXPM_ACCURACY * scale
            );
        }
    }

    #[test]
    fn expm_semigroup_property() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for _ in 0..5 {
            let m = random_matrix(&mut rng, 4);
            let s = Complex64::new(0.3, 0.0);
            let t = Complex64::new(0.7, 0.0);
            let whole = expm(&m).unwrap();
            let part_s = expm(&m.scaled(s).unwrap()).unwrap();
            let part_t = expm(&m.scaled(t).unwrap()).unwrap();
            let composed = part_s.as_array().dot(part_t.as_array());
            let err = max_entry_diff(whole.as_array(), &composed);
            assert!(err <= 1e-9 * whole.norm_frobenius().max(1.0), "err {err:.3e}");
        }
    }

    #[test]
    fn expm_handles_large_norms_by_scaling() {
        // norm ~ 60: forces several squarings; compare against the
        // eigendecomposition of a normal (hence perfectly conditioned) matrix.
        let m = diag(&[c(-60.0, 0.0), c(-3.0, 40.0)]);
        let e = expm_pade(&m).unwrap();
        assert_relative_eq!(e[(0, 0)].re, (-60.0f64).exp(), max_relative = 1e-10);
        let want = c(-3.0, 40.0).exp();
        assert_relative_eq!(e[(1, 1)].re, want.re, max_relative = 1e-9);
        assert_relative_eq!(e[(1, 1)].im, want.im, max_relative = 1e-9);
    }

    #[test]
    fn nullspace_of_identity_is_empty() {
        let id = ComplexMatrix::new(Array2::eye(4)).unwrap();
        assert!(nullspace(&id, tol::NULLSPACE_DEFAULT).unwrap().is_empty());
    }

    #[test]
    fn nullspace_of_singular_diagonal_matrix() {
        let m = diag(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let basis = nullspace(&m, tol::NULLSPACE_DEFAULT).unwrap();
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert_relative_eq!(v[0].re, 1.0, epsilon = 1e-12);
        assert!(v[1].norm() < 1e-12 && v[2].norm() < 1e-12);
        // Residual bound from the module contract.
        let r = m.apply(v);
        let rnorm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(rnorm <= 10.0 * tol::NULLSPACE_DEFAULT * m.norm_frobenius());
    }

    #[test]
    fn nullspace_of_zero_matrix_is_everything() {
        let z = ComplexMatrix::new(Array2::zeros((3, 3))).unwrap();
        let basis = nullspace(&z, tol::NULLSPACE_DEFAULT).unwrap();
        assert_eq!(basis.len(), 3);
    }
}
