//! Mixed characteristic polynomials, mixed discriminants, and the
//! brute-force expectation oracle.
//!
//! For independent random vectors v₁,…,v_m with covariances Aᵢ = E[vᵢvᵢ*],
//! the expected characteristic polynomial E[det(xI − Σ vᵢvᵢ*)] depends only
//! on the covariances. The fast route expands it by inclusion–exclusion over
//! subsets T ⊆ [m] with |T| ≤ min(m, d):
//!
//! ```text
//!   μ[A₁…A_m](x) = Σ_{k≤min(m,d)} x^{d−k} Σ_{|T|≤k} (−1)^{|T|}
//!                    · C(m−|T|, k−|T|) · [x^{d−k}] det(xI + Σ_{i∈T} Aᵢ)
//! ```
//!
//! The definitional enumeration over the product support remains available
//! as [`brute_force_expected_charpoly`], the independent oracle against
//! which the subset formula is tested.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{CVec, HermitianMatrix};
use crate::mpoly;
use crate::upoly::RealUniPoly;

type C64 = Complex64;

/// Budget on subsets enumerated by the inclusion–exclusion route.
const SUBSET_BUDGET: u64 = 1 << 22;
/// Budget on outcomes enumerated by the brute-force oracle.
const SUPPORT_BUDGET: u64 = 1_000_000;
/// Relative eigenvalue tolerance for accepting covariance matrices as PSD;
/// negative eigenvalues above −tol are clipped to zero.
const PSD_TOL: f64 = 1e-9;
/// Negativity below this relative level is eigensolver noise on an already
/// PSD matrix; clipping (which reconstructs the matrix and perturbs every
/// entry by rounding) would do more harm than leaving it alone.
const PSD_CLIP_FLOOR: f64 = 1e-14;
/// Dimension threshold below which subset coefficients come from Newton
/// power-sum identities instead of an eigendecomposition.
const NEWTON_DIM: usize = 6;

/// Compensated (Kahan) accumulator: inclusion–exclusion cancellation grows
/// with m, and compensated sums keep coefficient agreement at 1e-9.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// A finitely supported random vector: atoms (value, probability).
#[derive(Clone, Debug)]
pub struct RandomVectorSpec {
    atoms: Vec<(CVec, f64)>,
}

impl RandomVectorSpec {
    /// Validates nonempty support, a common dimension, and probabilities
    /// that are nonnegative and sum to 1 within 1e-12.
    pub fn new(atoms: Vec<(CVec, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::bad_params("random vector needs at least one atom"));
        }
        let d = atoms[0].0.dim();
        for (v, p) in &atoms {
            if v.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.dim(),
                });
            }
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::BadWeights {
                    detail: format!("atom probability {p}"),
                });
            }
        }
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadWeights {
                detail: format!("probabilities sum to {total}"),
            });
        }
        Ok(RandomVectorSpec { atoms })
    }

    /// A deterministic vector as a support-1 random vector.
    pub fn deterministic(v: CVec) -> Self {
        RandomVectorSpec {
            atoms: vec![(v, 1.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.dim()
    }

    pub fn support(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[(CVec, f64)] {
        &self.atoms
    }
}

/// A list of PSD covariance matrices of a common dimension. Matrices with
/// eigenvalues in [−1e-9·scale, 0) are projected onto the PSD cone by
/// clipping; anything lower is rejected.
#[derive(Clone, Debug)]
pub struct CovarianceList {
    mats: Vec<HermitianMatrix>,
}

impl CovarianceList {
    pub fn new(mats: Vec<HermitianMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::bad_params("covariance list must be nonempty"));
        }
        let d = mats[0].dim();
        let mut clean = Vec::with_capacity(mats.len());
        for a in mats {
            if a.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: a.dim(),
                });
            }
            let evs = a.eigenvalues()?;
            let scale = 1.0 + evs.iter().map(|e| e.abs()).fold(0.0, f64::max);
            if evs[0] < -PSD_TOL * scale {
                return Err(Error::NotPsd {
                    min_eigenvalue: evs[0],
                });
            }
            if evs[0] < -PSD_CLIP_FLOOR * scale {
                clean.push(a.apply_spectral(|l| l.max(0.0))?);
            } else {
                clean.push(a);
            }
        }
        Ok(CovarianceList { mats: clean })
    }

    pub fn dim(&self) -> usize {
        self.mats[0].dim()
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mats(&self) -> &[HermitianMatrix] {
        &self.mats
    }

    /// Sum of all covariances (the frame operator).
    pub fn total(&self) -> HermitianMatrix {
        HermitianMatrix::sum(&self.mats).expect("list is nonempty")
    }
}

/// Covariance E[v v*] = Σ pⱼ wⱼwⱼ* of a random vector.
pub fn covariance(spec: &RandomVectorSpec) -> HermitianMatrix {
    let d = spec.dim();
    let mut acc = HermitianMatrix::zeros(d);
    for (v, p) in spec.atoms() {
        acc = acc
            .add(&HermitianMatrix::rank1(v).scaled(*p))
            .expect("atoms share the spec dimension");
    }
    acc
}

/// Covariances of a list of independent random vectors.
pub fn covariances(specs: &[RandomVectorSpec]) -> Result<CovarianceList> {
    if specs.is_empty() {
        return Err(Error::bad_params("covariances of an empty spec list"));
    }
    let d = specs[0].dim();
    for s in specs {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
    }
    CovarianceList::new(specs.iter().map(covariance).collect())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Pascal-triangle table of binomial coefficients C(0..=n, ·) as f64
/// (exact for every value representable below 2^53).
fn binomial_table(n: usize, kmax: usize) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; kmax + 1]; n + 1];
    for row in 0..=n {
        table[row][0] = 1.0;
        for k in 1..=kmax.min(row) {
            table[row][k] = if row >= 1 {
                table[row - 1][k - 1] + table[row - 1][k]
            } else {
                0.0
            };
        }
    }
    table
}

/// Coefficients e₀,…,e_kmax with [x^{d−k}] det(xI + S) = e_k (the elementary
/// symmetric functions of the spectrum of S), written into `out`.
struct EsymScratch {
    pow_a: DMatrix<C64>,
    pow_b: DMatrix<C64>,
    power_sums: Vec<f64>,
}

impl EsymScratch {
    fn new(d: usize, kmax: usize) -> Self {
        EsymScratch {
            pow_a: DMatrix::zeros(d, d),
            pow_b: DMatrix::zeros(d, d),
            power_sums: vec![0.0; kmax + 1],
        }
    }
}

fn esym_coeffs(
    s: &DMatrix<C64>,
    kmax: usize,
    scratch: &mut EsymScratch,
    out: &mut [f64],
) -> Result<()> {
    let d = s.nrows();
    out.iter_mut().for_each(|e| *e = 0.0);
    out[0] = 1.0;
    if kmax == 0 {
        return Ok(());
    }
    if d <= NEWTON_DIM {
        // Newton identities: k·e_k = Σ_{i=1..k} (−1)^{i−1} e_{k−i} p_i with
        // p_i = tr(Sⁱ) (real, since S is Hermitian).
        let p = &mut scratch.power_sums;
        p[1] = (0..d).map(|i| s[(i, i)].re).sum();
        if kmax >= 2 {
            scratch.pow_a.copy_from(s);
            for pj in p.iter_mut().take(kmax + 1).skip(2) {
                scratch
                    .pow_b
                    .gemm(C64::new(1.0, 0.0), &scratch.pow_a, s, C64::new(0.0, 0.0));
                *pj = (0..d).map(|i| scratch.pow_b[(i, i)].re).sum();
                std::mem::swap(&mut scratch.pow_a, &mut scratch.pow_b);
            }
        }
        for k in 1..=kmax {
            let mut acc = 0.0;
            let mut sign = 1.0;
            for i in 1..=k {
                acc += sign * out[k - i] * p[i];
                sign = -sign;
            }
            out[k] = acc / k as f64;
        }
    } else {
        let se = s
            .clone()
            .try_symmetric_eigen(1e-13, 100_000)
            .ok_or(Error::IterationFailure { dim: d })?;
        for &l in se.eigenvalues.iter() {
            for k in (1..=kmax).rev() {
                out[k] += l * out[k - 1];
            }
        }
    }
    Ok(())
}

/// Inclusion–exclusion core shared by [`mixed_charpoly`] and
/// [`tree_polynomial`]: mixed characteristic polynomial of an explicit
/// matrix list (assumed PSD) in dimension d.
pub(crate) fn mixed_charpoly_mats(mats: &[&HermitianMatrix], d: usize) -> Result<RealUniPoly> {
    let m = mats.len();
    for a in mats {
        if a.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.dim(),
            });
        }
    }
    let kmax = m.min(d);
    let binom = binomial_table(m, kmax);
    let subsets: u128 = (0..=kmax).map(|k| binom[m][k] as u128).sum();
    if subsets > SUBSET_BUDGET as u128 {
        return Err(Error::TooManyVectors {
            subsets,
            budget: SUBSET_BUDGET,
        });
    }

    let mut slots = vec![Kahan::default(); kmax + 1];
    let mut sums: Vec<DMatrix<C64>> = (0..=kmax).map(|_| DMatrix::zeros(d, d)).collect();
    let mut scratch = EsymScratch::new(d, kmax);
    let mut esym = vec![0.0; kmax + 1];

    // Depth-first over subsets T of [m] with |T| ≤ kmax; sums[level] holds
    // Σ_{i∈T} A_i for the current prefix.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        mats: &[&HermitianMatrix],
        start: usize,
        level: usize,
        kmax: usize,
        sums: &mut [DMatrix<C64>],
        scratch: &mut EsymScratch,
        esym: &mut [f64],
        binom: &[Vec<f64>],
        slots: &mut [Kahan],
    ) -> Result<()> {
        let m = mats.len();
        esym_coeffs(&sums[level], kmax, scratch, esym)?;
        let sign = if level.is_multiple_of(2) { 1.0 } else { -1.0 };
        for k in level..=kmax {
            slots[k].add(sign * binom[m - level][k - level] * esym[k]);
        }
        if level == kmax {
            return Ok(());
        }
        for i in start..m {
            let (lo, hi) = sums.split_at_mut(level + 1);
            hi[0].copy_from(&lo[level]);
            hi[0] += mats[i].as_matrix();
            walk(
                mats,
                i + 1,
                level + 1,
                kmax,
                sums,
                scratch,
                esym,
                binom,
                slots,
            )?;
        }
        Ok(())
    }
    walk(
        mats,
        0,
        0,
        kmax,
        &mut sums,
        &mut scratch,
        &mut esym,
        &binom,
        &mut slots,
    )?;

    let mut coeffs = vec![0.0; d + 1];
    for k in 0..=kmax {
        coeffs[d - k] = slots[k].sum;
    }
    RealUniPoly::new(coeffs)
}

/// Mixed characteristic polynomial μ[A₁,…,A_m](x): the expected
/// characteristic polynomial of Σ vᵢvᵢ* for any independent random vectors
/// with these covariances. Monic of degree d and real-rooted for PSD input.
pub fn mixed_charpoly(list: &CovarianceList) -> Result<RealUniPoly> {
    let refs: Vec<&HermitianMatrix> = list.mats().iter().collect();
    mixed_charpoly_mats(&refs, list.dim())
}

/// Mixed discriminant D(B₁,…,B_k) of k ≤ d matrices in dimension d, padded
/// with identity copies: D(B₁,…,B_k) = D(B₁,…,B_k, I,…,I)/(d−k)!, computed
/// by inclusion–exclusion D(B₁,…,B_d) = Σ_{T⊆[d]} (−1)^{d−|T|} det(Σ_{i∈T} Bᵢ).
///
/// Normalization: D(I,…,I) = d! and D(A) = trace(A) in the padded form.
pub fn mixed_discriminant(bs: &[HermitianMatrix]) -> Result<f64> {
    if bs.is_empty() {
        return Err(Error::bad_params("mixed discriminant of an empty list"));
    }
    let d = bs[0].dim();
    for b in bs {
        if b.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: b.dim(),
            });
        }
    }
    if bs.len() > d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: bs.len(),
        });
    }
    let pad = d - bs.len();
    let id = HermitianMatrix::identity(d);
    let full: Vec<&HermitianMatrix> = bs.iter().chain(std::iter::repeat_n(&id, pad)).collect();

    let mut acc = Kahan::default();
    let mut sum = DMatrix::<C64>::zeros(d, d);
    for mask in 0u64..(1u64 << d) {
        sum.fill(C64::new(0.0, 0.0));
        let mut size = 0;
        for (i, b) in full.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sum += b.as_matrix();
                size += 1;
            }
        }
        let sign = if (d - size).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let det = if size == 0 {
            0.0
        } else {
            sum.clone().determinant().re
        };
        acc.add(sign * det);
    }
    Ok(acc.sum / factorial(pad))
}

/// Product of support sizes (the enumeration cost of the brute-force oracle).
pub fn support_product(specs: &[RandomVectorSpec]) -> u128 {
    specs.iter().map(|s| s.support() as u128).product()
}

/// The definitional expectation E[char_poly(Σ vᵢvᵢ*)], enumerated over the
/// full product support. Exponential cost; serves as the oracle for
/// [`mixed_charpoly`] and [`tree_polynomial`].
pub fn brute_force_expected_charpoly(specs: &[RandomVectorSpec]) -> Result<RealUniPoly> {
    if specs.is_empty() {
        return Err(Error::bad_params("expectation over an empty spec list"));
    }
    let d = specs[0].dim();
    for s in specs {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
    }
    let outcomes = support_product(specs);
    if outcomes > SUPPORT_BUDGET as u128 {
        return Err(Error::SupportTooLarge {
            support: outcomes,
            budget: SUPPORT_BUDGET,
        });
    }

    let m = specs.len();
    let mut slots = vec![Kahan::default(); d + 1];
    let mut sums: Vec<DMatrix<C64>> = (0..=m).map(|_| DMatrix::zeros(d, d)).collect();
    let mut scratch = EsymScratch::new(d, d);
    let mut esym = vec![0.0; d + 1];

    #[allow(clippy::too_many_arguments)]
    fn walk(
        specs: &[RandomVectorSpec],
        level: usize,
        weight: f64,
        d: usize,
        sums: &mut [DMatrix<C64>],
        scratch: &mut EsymScratch,
        esym: &mut [f64],
        slots: &mut [Kahan],
    ) -> Result<()> {
        if level == specs.len() {
            esym_coeffs(&sums[level], d, scratch, esym)?;
            // char_poly(S) = det(xI − S): [x^{d−k}] = (−1)^k e_k.
            let mut sign = 1.0;
            for k in 0..=d {
                slots[d - k].add(weight * sign * esym[k]);
                sign = -sign;
            }
            return Ok(());
        }
        for (v, p) in specs[level].atoms() {
            let (lo, hi) = sums.split_at_mut(level + 1);
            hi[0].copy_from(&lo[level]);
            let outer = HermitianMatrix::rank1(v);
            hi[0] += outer.as_matrix();
            walk(specs, level + 1, weight * p, d, sums, scratch, esym, slots)?;
        }
        Ok(())
    }
    walk(
        specs,
        0,
        1.0,
        d,
        &mut sums,
        &mut scratch,
        &mut esym,
        &mut slots,
    )?;

    RealUniPoly::new(slots.iter().map(|s| s.sum).collect())
}

/// Conditional expected characteristic polynomial at a tree node: the first
/// k vectors pinned to chosen atoms w₁,…,w_k, the rest still random with the
/// given covariances. Deterministic vectors are support-1 random vectors, so
/// this is just the mixed characteristic polynomial of
/// (w₁w₁*, …, w_kw_k*, A_{k+1}, …, A_m). Probability prefactors are omitted.
pub fn tree_polynomial(fixed: &[CVec], remaining: &[HermitianMatrix]) -> Result<RealUniPoly> {
    let d = match (fixed.first(), remaining.first()) {
        (Some(v), _) => v.dim(),
        (None, Some(a)) => a.dim(),
        (None, None) => {
            return Err(Error::bad_params(
                "tree polynomial with no vectors and no covariances",
            ))
        }
    };
    for v in fixed {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.dim(),
            });
        }
    }
    let rank_ones: Vec<HermitianMatrix> = fixed.iter().map(HermitianMatrix::rank1).collect();
    let mut refs: Vec<&HermitianMatrix> = rank_ones.iter().collect();
    refs.extend(remaining.iter());
    mixed_charpoly_mats(&refs, d)
}

/// Self-test of the expectation identity
/// E[det(A − v v*)] = (1 − ∂_t) det(A + t·E[v v*]) |_{t=0}
/// for an arbitrary Hermitian A and a finitely supported random vector.
/// Returns the absolute difference of the two sides, computing the right
/// side by exact polynomial interpolation of t ↦ det(A + t·Cov) at 0,…,d.
pub fn jameslee_identity_check(a: &HermitianMatrix, spec: &RandomVectorSpec) -> Result<f64> {
    let d = a.dim();
    if spec.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: spec.dim(),
        });
    }
    let mut lhs = Kahan::default();
    for (v, p) in spec.atoms() {
        let shifted = a.sub(&HermitianMatrix::rank1(v))?;
        lhs.add(p * shifted.det()?);
    }
    let cov = covariance(spec);
    let mut values = vec![0.0; d + 1];
    for (t, val) in values.iter_mut().enumerate() {
        *val = a.add(&cov.scaled(t as f64))?.det()?;
    }
    mpoly::values_to_coeffs(&mut values);
    let rhs = values[0] - values.get(1).copied().unwrap_or(0.0);
    Ok((lhs.sum - rhs).abs())
}
