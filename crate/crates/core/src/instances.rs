//! Seeded random instance generators shared by the test suites and the
//! command-line verifier. Everything is deterministic given the seed.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hermitian::{CVec, HermitianMatrix, C64};
use crate::mixedchar::{CovarianceList, RandomVectorSpec};

/// The stream cipher RNG used everywhere (reproducible across platforms).
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal draw (Box–Muller).
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Complex standard normal (unit variance overall).
pub fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(normal(rng), normal(rng)) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

/// Gaussian complex vector.
pub fn random_cvec(rng: &mut ChaCha8Rng, d: usize) -> CVec {
    CVec::new((0..d).map(|_| complex_normal(rng)).collect()).expect("gaussian entries are finite")
}

/// Uniform point on the complex unit sphere.
pub fn random_unit_cvec(rng: &mut ChaCha8Rng, d: usize) -> CVec {
    loop {
        let v = random_cvec(rng, d);
        let n = v.norm();
        if n > 1e-6 {
            return v.scaled(1.0 / n);
        }
    }
}

/// GUE-style random Hermitian matrix with entries of the given scale.
pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> HermitianMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| complex_normal(rng) * C64::new(scale, 0.0));
    HermitianMatrix::from_dmatrix((&g + g.adjoint()) * C64::new(0.5, 0.0))
        .expect("symmetrized gaussian matrix is Hermitian")
}

/// Random PSD matrix G·G*, normalized to unit average eigenvalue.
pub fn random_psd(rng: &mut ChaCha8Rng, d: usize) -> HermitianMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let m = HermitianMatrix::from_dmatrix(&g * g.adjoint()).expect("G·G* is Hermitian");
    let t = m.trace();
    if t > 1e-12 {
        m.scaled(d as f64 / t)
    } else {
        m
    }
}

/// Random Hermitian contraction with exactly zero diagonal and operator norm
/// at most `1 - margin`.
pub fn random_zero_diag_contraction(
    rng: &mut ChaCha8Rng,
    n: usize,
    margin: f64,
) -> Result<HermitianMatrix> {
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let z = complex_normal(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let h = HermitianMatrix::from_dmatrix(m)?;
    let norm = h.operator_norm()?;
    if norm <= 1e-12 {
        return Ok(h);
    }
    Ok(h.scaled((1.0 - margin).max(0.0) / norm))
}

/// Conjugates a spanning vector system by the inverse square root of its
/// frame operator, making Σ uᵢuᵢ* = I exactly (up to roundoff).
pub fn isotropize(vs: &[CVec]) -> Result<Vec<CVec>> {
    let rank1s: Vec<HermitianMatrix> = vs.iter().map(HermitianMatrix::rank1).collect();
    let s = HermitianMatrix::sum(&rank1s)?;
    let half = s.apply_spectral(|l| 1.0 / l.max(1e-300).sqrt())?;
    Ok(vs
        .iter()
        .map(|v| {
            let w = half.as_matrix() * DVector::from_column_slice(v.entries());
            CVec::new(w.iter().copied().collect()).expect("finite conjugation")
        })
        .collect())
}

/// Random Parseval system: m Gaussian unit vectors in dimension d, re-drawn
/// while the frame operator is nearly singular, then isotropized.
pub fn random_parseval(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Result<Vec<CVec>> {
    assert!(m >= d, "a spanning system needs m ≥ d");
    loop {
        let vs: Vec<CVec> = (0..m).map(|_| random_unit_cvec(rng, d)).collect();
        let rank1s: Vec<HermitianMatrix> = vs.iter().map(HermitianMatrix::rank1).collect();
        let s = HermitianMatrix::sum(&rank1s)?;
        if s.min_eigenvalue()? > 1e-3 {
            return isotropize(&vs);
        }
    }
}

/// Random PSD covariances with Σ Aᵢ = I and every trace at most `eps`:
/// random PSD matrices are whitened to sum to the identity, then any matrix
/// whose trace still exceeds the cap is split into two equal halves (which
/// preserves the sum) until all traces comply.
pub fn random_isotropic_covariances(
    rng: &mut ChaCha8Rng,
    d: usize,
    m: usize,
    eps: f64,
) -> Result<CovarianceList> {
    assert!(eps > 0.0, "the trace cap must be positive");
    assert!(m >= 1);
    let raw: Vec<HermitianMatrix> = (0..m).map(|_| random_psd(rng, d)).collect();
    let s = HermitianMatrix::sum(&raw)?;
    let half = s.apply_spectral(|l| 1.0 / l.max(1e-300).sqrt())?;
    let mut mats: Vec<HermitianMatrix> = raw
        .iter()
        .map(|a| {
            let m = half.as_matrix() * a.as_matrix() * half.as_matrix();
            HermitianMatrix::from_dmatrix(m).expect("conjugation preserves Hermitian")
        })
        .collect();
    let mut queue = std::mem::take(&mut mats);
    while let Some(a) = queue.pop() {
        if a.trace() > eps {
            queue.push(a.scaled(0.5));
            queue.push(a.scaled(0.5));
        } else {
            mats.push(a);
        }
    }
    CovarianceList::new(mats)
}

/// Random finite-support vector specs: each of the m vectors takes one of at
/// most `max_support` Gaussian values with random probabilities summing to 1
/// exactly.
pub fn random_spec_list(
    rng: &mut ChaCha8Rng,
    d: usize,
    m: usize,
    max_support: usize,
) -> Vec<RandomVectorSpec> {
    assert!(max_support >= 1);
    (0..m)
        .map(|_| {
            let support = 1 + (rng.random::<u32>() as usize) % max_support;
            let mut probs: Vec<f64> = (0..support).map(|_| 0.05 + rng.random::<f64>()).collect();
            let total: f64 = probs.iter().sum();
            for p in probs.iter_mut() {
                *p /= total;
            }
            // Force the sum to be exactly 1 in floating point.
            let head: f64 = probs[..support - 1].iter().sum();
            probs[support - 1] = 1.0 - head;
            let atoms = probs
                .into_iter()
                .map(|p| (random_cvec(rng, d).scaled(0.7), p))
                .collect();
            RandomVectorSpec::new(atoms).expect("constructed probabilities are valid")
        })
        .collect()
}

/// A randomized system of 36 unit vectors in ℂ² whose frame operator is
/// exactly 18·I: unit vectors at 36 equally spaced angles in the real plane
/// (frame operator (m/2)·I with m = 36), conjugated by a random unitary,
/// given random per-vector phases, and randomly reordered. Unitaries and
/// phases change neither the norms nor the frame operator's 18·I value.
pub fn weaver_instance(rng: &mut ChaCha8Rng) -> Vec<CVec> {
    let m = 36;
    let u = random_unitary_2x2(rng);
    let mut ws: Vec<CVec> = (0..m)
        .map(|k| {
            let theta = std::f64::consts::PI * (k as f64) / (m as f64);
            let base = DVector::from_column_slice(&[
                C64::new(theta.cos(), 0.0),
                C64::new(theta.sin(), 0.0),
            ]);
            let phase = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            let rotated = &u * base * C64::new(phase.cos(), phase.sin());
            CVec::new(rotated.iter().copied().collect()).expect("finite rotation")
        })
        .collect();
    // Fisher–Yates shuffle.
    for i in (1..ws.len()).rev() {
        let j = (rng.random::<u64>() as usize) % (i + 1);
        ws.swap(i, j);
    }
    ws
}

fn random_unitary_2x2(rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    // Gram–Schmidt on a Gaussian 2×2: the first column normalized, the
    // second orthogonalized against it and normalized.
    loop {
        let g = DMatrix::from_fn(2, 2, |_, _| complex_normal(rng));
        let c0 = g.column(0).into_owned();
        let n0 = c0.norm();
        if n0 < 1e-6 {
            continue;
        }
        let q0 = c0 / C64::new(n0, 0.0);
        let c1 = g.column(1).into_owned();
        let proj = q0.dotc(&c1);
        let r1 = c1 - &q0 * proj;
        let n1 = r1.norm();
        if n1 < 1e-6 {
            continue;
        }
        let q1 = r1 / C64::new(n1, 0.0);
        return DMatrix::from_fn(2, 2, |i, j| if j == 0 { q0[i] } else { q1[i] });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_systems_decompose_the_identity() {
        let mut r = rng(1);
        for _ in 0..3 {
            let us = random_parseval(&mut r, 3, 7).unwrap();
            let rank1s: Vec<HermitianMatrix> = us.iter().map(HermitianMatrix::rank1).collect();
            let dev = HermitianMatrix::sum(&rank1s)
                .unwrap()
                .sub(&HermitianMatrix::identity(3))
                .unwrap()
                .operator_norm()
                .unwrap();
            assert!(dev < 1e-12, "frame deviation {dev}");
        }
    }

    #[test]
    fn isotropic_covariances_respect_the_trace_cap() {
        let mut r = rng(2);
        for eps in [0.25, 0.5, 1.0] {
            let list = random_isotropic_covariances(&mut r, 3, 4, eps).unwrap();
            let dev = list
                .total()
                .sub(&HermitianMatrix::identity(3))
                .unwrap()
                .operator_norm()
                .unwrap();
            assert!(dev < 1e-12, "sum deviation {dev}");
            for a in list.mats() {
                assert!(a.trace() <= eps + 1e-12);
                assert!(a.min_eigenvalue().unwrap() > -1e-10);
            }
        }
    }

    #[test]
    fn weaver_instances_have_eta_18_exactly() {
        let mut r = rng(3);
        let ws = weaver_instance(&mut r);
        assert_eq!(ws.len(), 36);
        for w in &ws {
            assert!((w.norm() - 1.0).abs() < 1e-12);
        }
        let rank1s: Vec<HermitianMatrix> = ws.iter().map(HermitianMatrix::rank1).collect();
        let dev = HermitianMatrix::sum(&rank1s)
            .unwrap()
            .sub(&HermitianMatrix::identity(2).scaled(18.0))
            .unwrap()
            .operator_norm()
            .unwrap();
        assert!(dev < 1e-10, "frame operator deviates from 18·I by {dev}");
    }

    #[test]
    fn contractions_have_zero_diagonal_and_bounded_norm() {
        let mut r = rng(4);
        let t = random_zero_diag_contraction(&mut r, 5, 0.1).unwrap();
        for i in 0..5 {
            assert!(t.entry(i, i).norm() < 1e-15);
        }
        assert!(t.operator_norm().unwrap() <= 0.9 + 1e-12);
    }

    #[test]
    fn spec_lists_have_valid_probabilities() {
        let mut r = rng(5);
        let specs = random_spec_list(&mut r, 3, 5, 3);
        assert_eq!(specs.len(), 5);
        for spec in &specs {
            assert!(spec.support() >= 1 && spec.support() <= 3);
            let total: f64 = spec.atoms().iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
