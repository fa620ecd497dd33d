//! Complex vectors and Hermitian matrices with spectral helpers.
//!
//! Everything downstream (characteristic polynomials, barrier certificates,
//! partition solvers) manipulates finite-dimensional Hermitian operators, so
//! this module owns the numerically delicate parts: symmetrized storage,
//! eigendecompositions, rank-one builders, Gram-vector extraction, and the
//! self-adjoint dilation of a contraction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::upoly::RealUniPoly;

/// Scalar type used throughout the crate.
pub type C64 = Complex64;

/// Relative deviation tolerance for accepting user matrices as Hermitian.
const HERMITIAN_TOL: f64 = 1e-12;
/// Relative eigenvalue threshold separating "rank" from "noise" in [`HermitianMatrix::gram_vectors`].
const RANK_TOL: f64 = 1e-9;
/// Slack allowed when verifying that a contraction has operator norm at most one.
const CONTRACTION_SLACK: f64 = 1e-9;
/// Tolerance (relative to the largest entry) for the zero-diagonal requirement of [`HermitianMatrix::dilation`].
const DIAGONAL_TOL: f64 = 1e-12;
/// Convergence settings for the symmetric eigensolver.
const EIGEN_EPS: f64 = 1e-13;
const EIGEN_MAX_ITER: usize = 100_000;

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// A nonempty vector over ℂ with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec {
    data: Vec<C64>,
}

impl CVec {
    /// Wraps raw entries, rejecting empty or non-finite input.
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::bad_params("vector must have at least one entry"));
        }
        if !data.iter().all(|&z| finite(z)) {
            return Err(Error::NonFinite);
        }
        Ok(CVec { data })
    }

    /// Builds a vector from real entries.
    pub fn from_real(entries: &[f64]) -> Result<Self> {
        CVec::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// The k-th standard basis vector of ℂ^dim.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(dim >= 1 && k < dim, "basis index out of range");
        let mut data = vec![C64::new(0.0, 0.0); dim];
        data[k] = C64::new(1.0, 0.0);
        CVec { data }
    }

    /// The zero vector of ℂ^dim.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        CVec {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn entry(&self, i: usize) -> C64 {
        self.data[i]
    }

    /// Squared Euclidean norm ‖v‖².
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// The vector scaled by a real factor.
    pub fn scaled(&self, s: f64) -> Self {
        CVec {
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// Inner product ⟨self, other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Embeds the vector into the `block`-th of `copies` consecutive blocks
    /// of a larger space ℂ^{copies·dim}, zero elsewhere.
    pub fn embed_block(&self, copies: usize, block: usize) -> Self {
        assert!(copies >= 1 && block < copies, "block index out of range");
        let d = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); copies * d];
        data[block * d..(block + 1) * d].copy_from_slice(&self.data);
        CVec { data }
    }
}

/// A Hermitian matrix stored with exact symmetry: construction symmetrizes
/// the entries, so `A[i][j] == conj(A[j][i])` holds bit-for-bit afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    mat: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Accepts a square matrix that is Hermitian up to relative deviation
    /// 1e-12 and stores its symmetrized part.
    pub fn from_dmatrix(mat: DMatrix<C64>) -> Result<Self> {
        let n = mat.nrows();
        if n == 0 || mat.ncols() != n {
            return Err(Error::bad_params("matrix must be square and nonempty"));
        }
        if !mat.iter().all(|&z| finite(z)) {
            return Err(Error::NonFinite);
        }
        let scale = 1.0 + mat.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut deviation = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                deviation = deviation.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if deviation > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian {
                deviation: deviation / scale,
            });
        }
        Ok(Self::symmetrized(mat))
    }

    /// Builds from row-major entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::bad_params("rows must form a nonempty square matrix"));
        }
        let mat = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_dmatrix(mat)
    }

    /// Internal constructor for matrices that are Hermitian by algebra;
    /// still symmetrizes so the invariant holds exactly in floating point.
    pub(crate) fn symmetrized(mat: DMatrix<C64>) -> Self {
        let n = mat.nrows();
        let mut m = mat;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        }
        HermitianMatrix { mat: m }
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        HermitianMatrix {
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        HermitianMatrix {
            mat: DMatrix::identity(n, n),
        }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        assert!(!diag.is_empty(), "dimension must be positive");
        let n = diag.len();
        HermitianMatrix {
            mat: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// The rank-one projector v v* (unnormalized outer product).
    pub fn rank1(v: &CVec) -> Self {
        let d = v.dim();
        let mat = DMatrix::from_fn(d, d, |i, j| v.entry(i) * v.entry(j).conj());
        Self::symmetrized(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Read-only view of the underlying storage.
    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Trace (real by Hermitian symmetry).
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(HermitianMatrix {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(HermitianMatrix {
            mat: &self.mat - &other.mat,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermitianMatrix {
            mat: &self.mat * C64::new(s, 0.0),
        }
    }

    /// Sum of a nonempty list of equally sized matrices.
    pub fn sum(mats: &[Self]) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::bad_params("sum of an empty matrix list"))?;
        let mut acc = first.clone();
        for m in &mats[1..] {
            acc = acc.add(m)?;
        }
        Ok(acc)
    }

    /// All eigenvalues, sorted ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let se = self
            .mat
            .clone()
            .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::IterationFailure { dim: self.dim() })?;
        let mut evs: Vec<f64> = se.eigenvalues.iter().copied().collect();
        evs.sort_by(f64::total_cmp);
        Ok(evs)
    }

    /// Eigenvalues (ascending) together with a unitary matrix of column eigenvectors.
    pub fn eigen_pairs(&self) -> Result<(Vec<f64>, DMatrix<C64>)> {
        let se = self
            .mat
            .clone()
            .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::IterationFailure { dim: self.dim() })?;
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let evs: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
        let mut vecs = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vecs.set_column(dst, &se.eigenvectors.column(src));
        }
        Ok((evs, vecs))
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Operator (spectral) norm: the largest eigenvalue magnitude.
    pub fn operator_norm(&self) -> Result<f64> {
        let evs = self.eigenvalues()?;
        Ok(evs.iter().map(|e| e.abs()).fold(0.0, f64::max))
    }

    /// Determinant (real for Hermitian matrices).
    pub fn det(&self) -> Result<f64> {
        Ok(self.mat.clone().determinant().re)
    }

    /// Whether all eigenvalues are at least `-tol · (1 + ‖A‖)`.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::bad_params("psd tolerance must be nonnegative"));
        }
        let evs = self.eigenvalues()?;
        let scale = 1.0 + evs.iter().map(|e| e.abs()).fold(0.0, f64::max);
        Ok(evs[0] >= -tol * scale)
    }

    /// Monic characteristic polynomial det(xI − A), built from the spectrum.
    pub fn char_poly(&self) -> Result<RealUniPoly> {
        Ok(RealUniPoly::from_roots(&self.eigenvalues()?))
    }

    /// Block-diagonal direct sum of a nonempty list of matrices.
    pub fn direct_sum(blocks: &[Self]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::bad_params("direct sum of an empty block list"));
        }
        let total: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut mat = DMatrix::zeros(total, total);
        let mut off = 0;
        for b in blocks {
            let d = b.dim();
            mat.view_mut((off, off), (d, d)).copy_from(&b.mat);
            off += d;
        }
        Ok(HermitianMatrix { mat })
    }

    /// Applies a real function to the spectrum: U f(Λ) U*.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (evs, vecs) = self.eigen_pairs()?;
        let n = self.dim();
        let fd = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(f(evs[i]), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let m = &vecs * fd * vecs.adjoint();
        Ok(Self::symmetrized(m))
    }

    /// Gram-vector factorization of a PSD matrix: returns u_1, …, u_n in
    /// ℂ^rank with A[i][j] = ⟨u_i, u_j⟩, the rank determined by discarding
    /// eigenvalues at or below 1e-9 relative to the spectral radius.
    ///
    /// When A is an orthogonal projection the returned vectors satisfy
    /// Σᵢ uᵢuᵢ* = I on the range, i.e. they form a Parseval frame.
    pub fn gram_vectors(&self) -> Result<Vec<CVec>> {
        let (evs, vecs) = self.eigen_pairs()?;
        let n = self.dim();
        let scale = 1.0 + evs.iter().map(|e| e.abs()).fold(0.0, f64::max);
        if evs[0] < -RANK_TOL * scale {
            return Err(Error::NotPsd {
                min_eigenvalue: evs[0],
            });
        }
        let kept: Vec<usize> = (0..n).filter(|&k| evs[k] > RANK_TOL * scale).collect();
        // A zero matrix factors through a one-dimensional space of zero vectors.
        if kept.is_empty() {
            return Ok(vec![CVec::zeros(1); n]);
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let data: Vec<C64> = kept
                .iter()
                .map(|&k| vecs[(i, k)].conj() * evs[k].sqrt())
                .collect();
            out.push(CVec::new(data)?);
        }
        Ok(out)
    }

    /// Self-adjoint dilation of a Hermitian contraction with zero diagonal:
    ///
    /// ```text
    ///     Q = 1/2 · [ I + T    S     ]        S = (I − T²)^{1/2}
    ///               [   S      I − T ]
    /// ```
    ///
    /// Q is an orthogonal projection of rank n with constant diagonal 1/2,
    /// and compressing Q to the first n coordinates recovers (I + T)/2.
    pub fn dilation(&self) -> Result<Self> {
        let n = self.dim();
        let norm = self.operator_norm()?;
        if norm > 1.0 + CONTRACTION_SLACK {
            return Err(Error::NormTooLarge { norm, bound: 1.0 });
        }
        let diag_scale = 1.0 + self.max_abs();
        let max_diag = (0..n).map(|i| self.mat[(i, i)].norm()).fold(0.0, f64::max);
        if max_diag > DIAGONAL_TOL * diag_scale {
            return Err(Error::NonzeroDiagonal { max_abs: max_diag });
        }
        // Functional calculus keeps S in the eigenbasis of T, so S and T
        // commute and Q² = Q holds exactly in exact arithmetic.
        let s = self.apply_spectral(|t| (1.0 - t * t).max(0.0).sqrt())?;
        let mut mat = DMatrix::zeros(2 * n, 2 * n);
        let id = DMatrix::<C64>::identity(n, n);
        let half = C64::new(0.5, 0.0);
        mat.view_mut((0, 0), (n, n))
            .copy_from(&((&id + &self.mat) * half));
        mat.view_mut((0, n), (n, n)).copy_from(&(&s.mat * half));
        mat.view_mut((n, 0), (n, n)).copy_from(&(&s.mat * half));
        mat.view_mut((n, n), (n, n))
            .copy_from(&((&id - &self.mat) * half));
        Ok(Self::symmetrized(mat))
    }

    /// Principal submatrix on the given (distinct, in-range) indices.
    pub fn compress(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::bad_params("compression onto an empty index set"));
        }
        let n = self.dim();
        for &i in indices {
            if i >= n {
                return Err(Error::BadIndex { index: i, nvars: n });
            }
        }
        let k = indices.len();
        let mat = DMatrix::from_fn(k, k, |a, b| self.mat[(indices[a], indices[b])]);
        Ok(HermitianMatrix { mat })
    }
}

/// trace(AB), which is real for Hermitian A, B — and nonnegative when both
/// are positive semidefinite.
pub fn trace_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.dim(),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a.mat[(i, j)] * b.mat[(j, i)];
        }
    }
    Ok(acc.re)
}

/// Absolute deviation in the determinant rank-1 update identity
/// det(A + vv*) = det(A)·(1 + v*A⁻¹v); A must be invertible.
pub fn rank1_update_deviation(a: &HermitianMatrix, v: &CVec) -> Result<f64> {
    let n = a.dim();
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    let lhs = a.add(&HermitianMatrix::rank1(v))?.det()?;
    let det_a = a.mat.clone().determinant();
    let rhs_vec = a
        .mat
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(v.entries()))
        .ok_or_else(|| Error::bad_params("rank-1 update identity needs invertible A"))?;
    let quad: C64 = v
        .entries()
        .iter()
        .zip(rhs_vec.iter())
        .map(|(vi, xi)| vi.conj() * xi)
        .sum();
    let rhs = det_a * (C64::new(1.0, 0.0) + quad);
    Ok((lhs - rhs.re).abs().max(rhs.im.abs()))
}

/// Absolute deviation between the central finite-difference t-derivative of
/// det(A + tB) at t = 0 (step h) and the closed form det(A)·trace(A⁻¹B);
/// A must be invertible.
pub fn jacobi_deviation(a: &HermitianMatrix, b: &HermitianMatrix, h: f64) -> Result<f64> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.dim(),
        });
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::bad_params("finite-difference step must be positive"));
    }
    let plus = a.add(&b.scaled(h))?.det()?;
    let minus = a.add(&b.scaled(-h))?.det()?;
    let fd = (plus - minus) / (2.0 * h);
    let det_a = a.mat.clone().determinant().re;
    let x = a
        .mat
        .clone()
        .lu()
        .solve(&b.mat)
        .ok_or_else(|| Error::bad_params("derivative identity needs invertible A"))?;
    let trace: C64 = (0..n).map(|i| x[(i, i)]).sum();
    Ok((fd - det_a * trace.re).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        let g = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        HermitianMatrix::from_dmatrix((&g + g.adjoint()) * C64::new(0.5, 0.0)).unwrap()
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        let g = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        HermitianMatrix::from_dmatrix(&g * g.adjoint()).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rank1_of_complex_unit_vector() {
        // v = (1, i)/√2  ⇒  vv* = [[1/2, -i/2], [i/2, 1/2]], trace 1.
        let s = 1.0 / 2.0f64.sqrt();
        let v = CVec::new(vec![c(s, 0.0), c(0.0, s)]).unwrap();
        let p = HermitianMatrix::rank1(&v);
        assert!((p.entry(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((p.entry(0, 1) - c(0.0, -0.5)).norm() < 1e-15);
        assert!((p.entry(1, 0) - c(0.0, 0.5)).norm() < 1e-15);
        assert!((p.entry(1, 1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((p.trace() - v.norm_sq()).abs() < 1e-15);
        // A rank-one projector with unit trace has eigenvalues {0, 1}.
        let evs = p.eigenvalues().unwrap();
        assert!(evs[0].abs() < 1e-12 && (evs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constructor_rejects_non_hermitian() {
        let mat =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermitianMatrix::from_dmatrix(mat),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn constructor_rejects_non_finite() {
        assert!(matches!(
            CVec::new(vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
        let mat = DMatrix::from_row_slice(1, 1, &[c(f64::INFINITY, 0.0)]);
        assert!(matches!(
            HermitianMatrix::from_dmatrix(mat),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn eigenvalues_of_pauli_x() {
        let t = HermitianMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let evs = t.eigenvalues().unwrap();
        assert!((evs[0] + 1.0).abs() < 1e-12 && (evs[1] - 1.0).abs() < 1e-12);
        assert!((t.operator_norm().unwrap() - 1.0).abs() < 1e-12);
        assert!((t.det().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn char_poly_matches_determinant_shift() {
        let a = HermitianMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let p = a.char_poly().unwrap();
        // det(xI − A) at a few sample points, via LU on the shifted matrix.
        for x in [-1.0, 0.0, 0.5, 2.0, 5.0] {
            let shifted = DMatrix::<C64>::identity(2, 2) * c(x, 0.0) - a.as_matrix();
            let direct = shifted.determinant().re;
            assert!((p.eval(x) - direct).abs() < 1e-10 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn det_equals_eigenvalue_product() {
        let a = HermitianMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 0.25), c(0.0, -0.5)],
            vec![c(0.5, -0.25), c(2.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, 0.5), c(0.3, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let prod: f64 = a.eigenvalues().unwrap().iter().product();
        assert!((a.det().unwrap() - prod).abs() < 1e-10 * (1.0 + prod.abs()));
    }

    #[test]
    fn is_psd_thresholds() {
        let a = HermitianMatrix::from_diag(&[0.0, 1.0, 2.0]);
        assert!(a.is_psd(1e-9).unwrap());
        let b = HermitianMatrix::from_diag(&[-0.1, 1.0]);
        assert!(!b.is_psd(1e-9).unwrap());
        assert!(b.is_psd(0.1).unwrap());
        assert!(a.is_psd(-1.0).is_err());
    }

    #[test]
    fn direct_sum_blocks() {
        let a = HermitianMatrix::from_diag(&[1.0]);
        let b = HermitianMatrix::from_diag(&[2.0, 3.0]);
        let s = HermitianMatrix::direct_sum(&[a, b]).unwrap();
        assert_eq!(s.dim(), 3);
        let evs = s.eigenvalues().unwrap();
        assert!((evs[0] - 1.0).abs() < 1e-12 && (evs[2] - 3.0).abs() < 1e-12);
        assert!(HermitianMatrix::direct_sum(&[]).is_err());
    }

    #[test]
    fn gram_vectors_reconstruct_entries() {
        // PSD matrix of rank 2 inside ℂ³.
        let v1 = CVec::new(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]).unwrap();
        let v2 = CVec::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(-0.5, 0.5)]).unwrap();
        let a = HermitianMatrix::rank1(&v1)
            .add(&HermitianMatrix::rank1(&v2))
            .unwrap();
        let us = a.gram_vectors().unwrap();
        assert_eq!(us.len(), 3);
        assert_eq!(us[0].dim(), 2); // rank 2
        for i in 0..3 {
            for j in 0..3 {
                let g = us[i].inner(&us[j]);
                assert!((g - a.entry(i, j)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn gram_vectors_reject_indefinite() {
        let a = HermitianMatrix::from_diag(&[1.0, -1.0]);
        assert!(matches!(a.gram_vectors(), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn dilation_of_pauli_x_is_projection() {
        let t = HermitianMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let q = t.dilation().unwrap();
        assert_eq!(q.dim(), 4);
        // Spectrum {0, 0, 1, 1} and constant diagonal 1/2.
        let evs = q.eigenvalues().unwrap();
        assert!(evs[0].abs() < 1e-10 && evs[1].abs() < 1e-10);
        assert!((evs[2] - 1.0).abs() < 1e-10 && (evs[3] - 1.0).abs() < 1e-10);
        for i in 0..4 {
            assert!((q.entry(i, i).re - 0.5).abs() < 1e-12);
        }
        // Q² = Q, checked spectrally: max |λ² − λ| small.
        let dev = evs.iter().map(|l| (l * l - l).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-10);
        // Compression onto the first block recovers (I + T)/2.
        let top = q.compress(&[0, 1]).unwrap();
        assert!((top.entry(0, 1).re - 0.5).abs() < 1e-12);
        assert!((top.entry(0, 0).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dilation_rejects_bad_input() {
        let big = HermitianMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(big.dilation(), Err(Error::NormTooLarge { .. })));
        let diag = HermitianMatrix::from_diag(&[0.5, -0.5]);
        assert!(matches!(
            diag.dilation(),
            Err(Error::NonzeroDiagonal { .. })
        ));
    }

    #[test]
    fn apply_spectral_square_root() {
        let a = HermitianMatrix::from_diag(&[4.0, 9.0]);
        let r = a.apply_spectral(|x| x.sqrt()).unwrap();
        assert!((r.entry(0, 0).re - 2.0).abs() < 1e-12);
        assert!((r.entry(1, 1).re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn embed_block_layout() {
        let v = CVec::from_real(&[1.0, 2.0]).unwrap();
        let e = v.embed_block(3, 1);
        assert_eq!(e.dim(), 6);
        assert!((e.entry(2).re - 1.0).abs() < 1e-15);
        assert!((e.entry(3).re - 2.0).abs() < 1e-15);
        assert!(e.entry(0).norm() < 1e-15 && e.entry(5).norm() < 1e-15);
    }

    #[test]
    fn rank1_update_identity_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for trial in 0..200 {
            let n = 2 + (trial % 3);
            // Shift away from singularity so A is safely invertible.
            let a = random_hermitian(&mut rng, n)
                .add(&HermitianMatrix::identity(n).scaled(2.0))
                .unwrap();
            let v = CVec::new(
                (0..n)
                    .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect(),
            )
            .unwrap();
            let dev = rank1_update_deviation(&a, &v).unwrap();
            let scale = a.det().unwrap().abs() * (1.0 + v.norm_sq());
            assert!(
                dev <= 1e-8 * scale,
                "trial {trial}: deviation {dev} over {scale}"
            );
        }
    }

    #[test]
    fn derivative_of_determinant_matches_trace_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for trial in 0..200 {
            let n = 2 + (trial % 3);
            let a = random_hermitian(&mut rng, n)
                .add(&HermitianMatrix::identity(n).scaled(2.0))
                .unwrap();
            let b = random_hermitian(&mut rng, n);
            let dev = jacobi_deviation(&a, &b, 1e-5).unwrap();
            let scale = 1.0 + a.det().unwrap().abs() * (1.0 + b.operator_norm().unwrap());
            assert!(
                dev <= 1e-5 * scale,
                "trial {trial}: deviation {dev} over scale {scale}"
            );
        }
    }

    #[test]
    fn trace_of_psd_product_is_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for trial in 0..200 {
            let n = 2 + (trial % 4);
            let a = random_psd(&mut rng, n);
            let b = random_psd(&mut rng, n);
            let t = trace_product(&a, &b).unwrap();
            assert!(t >= -1e-10, "trial {trial}: trace(AB) = {t}");
        }
    }
}
