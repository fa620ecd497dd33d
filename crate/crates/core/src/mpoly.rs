//! Dense multivariate polynomials on a small coefficient grid.
//!
//! A polynomial in `nvars ≤ 8` variables is stored as the full coefficient
//! box `[0..=max_deg]^nvars` (at most 10⁶ cells). Determinant polynomials
//! det(xI + Σ zᵢAᵢ) are recovered exactly by evaluating on the integer grid
//! and applying a Newton divided-difference inverse along each axis — the
//! degree in every variable is bounded by the matrix dimension, so the
//! interpolation is exact up to rounding.
//!
//! Real stability (no zeros with all imaginary parts positive) cannot be
//! decided numerically in general; the module instead offers a randomized
//! falsifier and a one-sided "above the roots" probe, both seeded.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::upoly::RealUniPoly;

type C64 = Complex64;

/// Hard cap on the number of coefficient cells.
const CELL_BUDGET: u64 = 1_000_000;
/// Hard cap on the number of variables.
const MAX_VARS: usize = 8;

/// A real polynomial in `nvars` variables with per-variable degree at most
/// `max_deg`. Coefficients are indexed little-endian: variable 0 has stride 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    max_deg: usize,
    coeffs: Vec<f64>,
}

impl MultiPoly {
    /// The zero polynomial on the given grid. `nvars = 0` is allowed and
    /// represents a constant.
    pub fn new_zero(nvars: usize, max_deg: usize) -> Result<Self> {
        if nvars > MAX_VARS {
            return Err(Error::bad_params(format!(
                "{nvars} variables exceeds the supported maximum {MAX_VARS}"
            )));
        }
        let side = max_deg as u128 + 1;
        let cells = side.pow(nvars as u32);
        if cells > CELL_BUDGET as u128 {
            return Err(Error::GridTooLarge {
                cells,
                budget: CELL_BUDGET,
            });
        }
        Ok(MultiPoly {
            nvars,
            max_deg,
            coeffs: vec![0.0; cells as usize],
        })
    }

    pub fn constant(c: f64) -> Self {
        MultiPoly {
            nvars: 0,
            max_deg: 0,
            coeffs: vec![c],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    fn side(&self) -> usize {
        self.max_deg + 1
    }

    fn stride(&self, var: usize) -> usize {
        self.side().pow(var as u32)
    }

    fn check_var(&self, var: usize) -> Result<()> {
        if var >= self.nvars {
            return Err(Error::BadIndex {
                index: var,
                nvars: self.nvars,
            });
        }
        Ok(())
    }

    /// Coefficient of the monomial with the given exponents.
    pub fn coeff(&self, exponents: &[usize]) -> Result<f64> {
        if exponents.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: exponents.len(),
            });
        }
        let mut idx = 0;
        for (v, &e) in exponents.iter().enumerate() {
            if e > self.max_deg {
                return Ok(0.0);
            }
            idx += e * self.stride(v);
        }
        Ok(self.coeffs[idx])
    }

    pub fn set_coeff(&mut self, exponents: &[usize], value: f64) -> Result<()> {
        if exponents.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: exponents.len(),
            });
        }
        let mut idx = 0;
        for (v, &e) in exponents.iter().enumerate() {
            if e > self.max_deg {
                return Err(Error::bad_params(format!(
                    "exponent {e} exceeds grid degree {}",
                    self.max_deg
                )));
            }
            idx += e * self.stride(v);
        }
        self.coeffs[idx] = value;
        Ok(())
    }

    /// Largest coefficient magnitude.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Evaluation at a complex point (one coordinate per variable).
    pub fn eval(&self, point: &[C64]) -> Result<C64> {
        if point.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        // Horner along variable nvars-1, recursing over contiguous sub-blocks.
        fn rec(coeffs: &[f64], side: usize, nvars: usize, point: &[C64]) -> C64 {
            if nvars == 0 {
                return C64::new(coeffs[0], 0.0);
            }
            let block = coeffs.len() / side;
            let z = point[nvars - 1];
            let mut acc = C64::new(0.0, 0.0);
            for k in (0..side).rev() {
                let sub = &coeffs[k * block..(k + 1) * block];
                acc = acc * z + rec(sub, side, nvars - 1, &point[..nvars - 1]);
            }
            acc
        }
        Ok(rec(&self.coeffs, self.side(), self.nvars, point))
    }

    /// Evaluation at a real point.
    pub fn eval_real(&self, point: &[f64]) -> Result<f64> {
        let z: Vec<C64> = point.iter().map(|&x| C64::new(x, 0.0)).collect();
        Ok(self.eval(&z)?.re)
    }

    /// Partial derivative ∂/∂(var).
    pub fn partial(&self, var: usize) -> Result<Self> {
        self.check_var(var)?;
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c = 0.0);
        let stride = self.stride(var);
        let side = self.side();
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let e = (idx / stride) % side;
            if e >= 1 {
                out.coeffs[idx - stride] += c * e as f64;
            }
        }
        Ok(out)
    }

    /// The operator (1 − ∂/∂(var)) applied to the polynomial.
    pub fn one_minus_partial(&self, var: usize) -> Result<Self> {
        let d = self.partial(var)?;
        let mut out = self.clone();
        for (o, &dv) in out.coeffs.iter_mut().zip(&d.coeffs) {
            *o -= dv;
        }
        Ok(out)
    }

    /// Substitutes `value` for the given variable, returning a polynomial in
    /// one variable fewer (variables above `var` shift down by one).
    pub fn restrict(&self, var: usize, value: f64) -> Result<Self> {
        self.check_var(var)?;
        let side = self.side();
        let mut out = MultiPoly {
            nvars: self.nvars - 1,
            max_deg: self.max_deg,
            coeffs: vec![0.0; self.coeffs.len() / side],
        };
        let stride = self.stride(var);
        // Index arithmetic: strip the `var` digit, collapse with powers of value.
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let e = (idx / stride) % side;
            let low = idx % stride;
            let high = idx / (stride * side);
            let out_idx = low + high * stride;
            out.coeffs[out_idx] += c * value.powi(e as i32);
        }
        Ok(out)
    }

    /// Converts a univariate grid polynomial to dense coefficient form.
    pub fn to_univariate(&self) -> Result<RealUniPoly> {
        if self.nvars != 1 {
            return Err(Error::bad_params(format!(
                "to_univariate on a {}-variable polynomial",
                self.nvars
            )));
        }
        RealUniPoly::new(self.coeffs.clone())
    }

    /// Applies a 1-D transform to every line along the given axis.
    fn transform_axis(&mut self, var: usize, f: &impl Fn(&mut [f64])) {
        let side = self.side();
        let stride = self.stride(var);
        let total = self.coeffs.len();
        let mut line = vec![0.0; side];
        // Enumerate all indices with digit `var` equal to zero.
        let outer = total / side;
        for o in 0..outer {
            let low = o % stride;
            let high = o / stride;
            let base = low + high * stride * side;
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = self.coeffs[base + k * stride];
            }
            f(&mut line);
            for (k, slot) in line.iter().enumerate() {
                self.coeffs[base + k * stride] = *slot;
            }
        }
    }
}

/// Interpolates values sampled at the integer nodes 0, 1, …, D into monomial
/// coefficients, in place, via Newton divided differences.
pub(crate) fn values_to_coeffs(line: &mut [f64]) {
    let n = line.len();
    // Divided differences on unit-spaced nodes: forward differences over k!.
    for k in 1..n {
        for j in (k..n).rev() {
            line[j] = (line[j] - line[j - 1]) / k as f64;
        }
    }
    // Expand the Newton form Σ dd[k]·∏_{j<k}(x−j) into monomials.
    let dd = line.to_vec();
    line.iter_mut().for_each(|c| *c = 0.0);
    line[0] = dd[n - 1];
    for k in (0..n - 1).rev() {
        // line ← line·(x − k) + dd[k]
        for j in (1..n - k).rev() {
            line[j] = line[j - 1] - k as f64 * line[j];
        }
        line[0] = dd[k] - k as f64 * line[0];
    }
}

/// The determinant polynomial det(Σ zᵢAᵢ), optionally with a leading xI term:
/// `det_poly(&mats, true)` is p(x, z₁, …, z_m) = det(xI + Σ zᵢAᵢ) with x as
/// variable 0, while `det_poly(&mats, false)` is det(Σ zᵢAᵢ).
pub fn det_poly(mats: &[HermitianMatrix], include_x: bool) -> Result<MultiPoly> {
    if mats.is_empty() {
        return Err(Error::bad_params(
            "determinant polynomial of an empty matrix list",
        ));
    }
    let d = mats[0].dim();
    for a in mats {
        if a.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.dim(),
            });
        }
    }
    let nvars = mats.len() + usize::from(include_x);
    let mut p = MultiPoly::new_zero(nvars, d)?;
    let side = d + 1;
    let mut point = vec![0usize; nvars];
    let mut m = DMatrix::<C64>::zeros(d, d);
    for idx in 0..p.coeffs.len() {
        let mut rem = idx;
        for digit in point.iter_mut() {
            *digit = rem % side;
            rem /= side;
        }
        m.fill(C64::new(0.0, 0.0));
        let offset = usize::from(include_x);
        if include_x {
            let x = point[0] as f64;
            for i in 0..d {
                m[(i, i)] = C64::new(x, 0.0);
            }
        }
        for (j, a) in mats.iter().enumerate() {
            let z = point[offset + j] as f64;
            if z != 0.0 {
                m += a.as_matrix() * C64::new(z, 0.0);
            }
        }
        // Hermitian combination with real weights ⇒ real determinant.
        p.coeffs[idx] = m.clone().determinant().re;
    }
    for v in 0..nvars {
        p.transform_axis(v, &values_to_coeffs);
    }
    // det(xI + Σ zᵢAᵢ) has total degree exactly d, so any mass in cells of
    // higher total degree is interpolation rounding dust. Clearing it matters
    // for evaluations far from the origin, where a 1e-13 ghost coefficient on
    // a high-degree monomial would otherwise dominate the true value.
    for idx in 0..p.coeffs.len() {
        let mut rem = idx;
        let mut total = 0;
        for _ in 0..nvars {
            total += rem % side;
            rem /= side;
        }
        if total > d {
            p.coeffs[idx] = 0.0;
        }
    }
    Ok(p)
}

/// Randomized falsifier for real stability: hunts for a zero with all
/// imaginary parts strictly positive. Returns a witness point (|p| below
/// 1e-10 relative to the coefficient scale after a local Newton descent in
/// one coordinate) or `None` if every trial fails — the one-sided outcome.
pub fn stability_falsifier(p: &MultiPoly, trials: usize, seed: u64) -> Option<Vec<C64>> {
    if p.nvars == 0 {
        return None;
    }
    let scale = p.coeff_scale();
    if scale == 0.0 {
        // The zero polynomial vanishes everywhere, upper half-plane included.
        return Some(vec![C64::new(0.0, 1.0); p.nvars]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut z: Vec<C64> = (0..p.nvars)
            .map(|_| {
                C64::new(
                    4.0 * rng.random::<f64>() - 2.0,
                    0.05 + 3.0 * rng.random::<f64>(),
                )
            })
            .collect();
        // Newton descent in a single randomly chosen coordinate: restrict to
        // that axis and chase the nearest root while it stays in the upper
        // half-plane.
        let var = rng.random_range(0..p.nvars);
        for _ in 0..40 {
            let val = match p.eval(&z) {
                Ok(v) => v,
                Err(_) => break,
            };
            if val.norm() <= 1e-10 * scale {
                if z.iter().all(|w| w.im > 0.0) {
                    return Some(z);
                }
                break;
            }
            // One-variable derivative by finite central difference in the
            // complex coordinate (exact direction, adequate accuracy).
            let h = 1e-6 * (1.0 + z[var].norm());
            let mut zp = z.clone();
            zp[var] += C64::new(h, 0.0);
            let mut zm = z.clone();
            zm[var] -= C64::new(h, 0.0);
            let dv = match (p.eval(&zp), p.eval(&zm)) {
                (Ok(a), Ok(b)) => (a - b) / C64::new(2.0 * h, 0.0),
                _ => break,
            };
            if dv.norm() < 1e-14 * scale {
                break;
            }
            let step = val / dv;
            let capped = if step.norm() > 1.0 {
                step / step.norm()
            } else {
                step
            };
            z[var] -= capped;
            if z[var].im <= 1e-9 {
                break; // left the open upper half-plane
            }
        }
    }
    None
}

/// One-sided probe that a real point `z` lies above the roots of `p` (the
/// closure of the set where p > 0 that contains +∞ in every coordinate):
///
/// * p(z) must be strictly positive;
/// * for every coordinate, the univariate restriction through `z` has all
///   roots strictly below the corresponding coordinate of `z`;
/// * p stays positive on `rays` random upward rays out of `z`.
pub fn above_roots_probe(p: &MultiPoly, z: &[f64], rays: usize, seed: u64) -> Result<bool> {
    if z.len() != p.nvars {
        return Err(Error::LengthMismatch {
            expected: p.nvars,
            got: z.len(),
        });
    }
    if p.nvars == 0 {
        return Ok(p.coeffs[0] > 0.0);
    }
    let at_origin = p.eval_real(z)?;
    if at_origin.is_nan() || at_origin <= 0.0 {
        return Ok(false);
    }
    for var in 0..p.nvars {
        // Restrict every other variable to its z-coordinate.
        let mut line = p.clone();
        for (v, &c) in z.iter().enumerate().rev() {
            if v != var {
                line = line.restrict(v, c)?;
            }
        }
        let uni = line.to_univariate()?;
        if uni.is_zero() || uni.degree() == 0 {
            continue; // constant along this axis; positivity already checked
        }
        for root in uni.roots()? {
            if root.im.abs() <= 1e-6 * (1.0 + root.norm()) && root.re >= z[var] {
                return Ok(false);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norm_z = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    let t_max = 10.0 * (1.0 + norm_z);
    for _ in 0..rays {
        let dir: Vec<f64> = (0..p.nvars).map(|_| rng.random::<f64>()).collect();
        let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len < 1e-12 {
            continue;
        }
        for step in 1..=32 {
            let t = t_max * step as f64 / 32.0;
            let pt: Vec<f64> = z
                .iter()
                .zip(&dir)
                .map(|(zi, di)| zi + t * di / len)
                .collect();
            let along_ray = p.eval_real(&pt)?;
            if along_ray.is_nan() || along_ray <= 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::CVec;

    #[test]
    fn det_poly_of_identity() {
        // det(xI₂ + z·I₂) = (x + z)².
        let p = det_poly(&[HermitianMatrix::identity(2)], true).unwrap();
        assert_eq!(p.nvars(), 2);
        assert!((p.coeff(&[2, 0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.coeff(&[1, 1]).unwrap() - 2.0).abs() < 1e-12);
        assert!((p.coeff(&[0, 2]).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.coeff(&[0, 0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn det_poly_without_x() {
        // det(z₁·diag(1,0) + z₂·diag(0,1)) = z₁ z₂.
        let a = HermitianMatrix::from_diag(&[1.0, 0.0]);
        let b = HermitianMatrix::from_diag(&[0.0, 1.0]);
        let p = det_poly(&[a, b], false).unwrap();
        assert!((p.coeff(&[1, 1]).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.coeff(&[2, 0]).unwrap().abs() < 1e-12);
        assert!(p.coeff(&[0, 2]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn det_poly_rank_one() {
        // det(xI₂ + z·e₁e₁*) = x² + xz.
        let a = HermitianMatrix::rank1(&CVec::basis(2, 0));
        let p = det_poly(&[a], true).unwrap();
        assert!((p.coeff(&[2, 0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.coeff(&[1, 1]).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.coeff(&[0, 1]).unwrap().abs() < 1e-12);
        assert!(p.coeff(&[0, 0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn partial_and_one_minus_partial() {
        // p = x² + xz on variables (x, z): ∂_z p = x; (1−∂_z)p = x² + xz − x.
        let a = HermitianMatrix::rank1(&CVec::basis(2, 0));
        let p = det_poly(&[a], true).unwrap();
        let dp = p.partial(1).unwrap();
        assert!((dp.coeff(&[1, 0]).unwrap() - 1.0).abs() < 1e-12);
        let q = p.one_minus_partial(1).unwrap();
        assert!((q.coeff(&[1, 0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((q.coeff(&[2, 0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.partial(2).is_err());
    }

    #[test]
    fn restrict_and_to_univariate() {
        let a = HermitianMatrix::rank1(&CVec::basis(2, 0));
        let p = det_poly(&[a], true).unwrap(); // x² + xz
        let at_zero = p.restrict(1, 0.0).unwrap().to_univariate().unwrap();
        assert_eq!(at_zero.coeffs(), &[0.0, 0.0, 1.0]); // x²
        let at_two = p.restrict(1, 2.0).unwrap().to_univariate().unwrap();
        assert!((at_two.eval(3.0) - 15.0).abs() < 1e-12); // 9 + 6
    }

    #[test]
    fn eval_matches_direct_determinant() {
        let a = HermitianMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(0.0, -0.5)],
            vec![C64::new(0.0, 0.5), C64::new(0.5, 0.0)],
        ])
        .unwrap();
        let b = HermitianMatrix::from_diag(&[0.25, 2.0]);
        let p = det_poly(&[a.clone(), b.clone()], true).unwrap();
        for (x, z1, z2) in [(0.3, 1.7, -0.4), (2.0, 0.0, 1.0), (-1.0, 0.5, 0.5)] {
            let m = DMatrix::<C64>::identity(2, 2) * C64::new(x, 0.0)
                + a.as_matrix() * C64::new(z1, 0.0)
                + b.as_matrix() * C64::new(z2, 0.0);
            let direct = m.determinant().re;
            let via_poly = p.eval_real(&[x, z1, z2]).unwrap();
            assert!((direct - via_poly).abs() < 1e-9 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn grid_budget_enforced() {
        assert!(matches!(
            MultiPoly::new_zero(9, 1),
            Err(Error::BadParameters { .. })
        ));
        assert!(matches!(
            MultiPoly::new_zero(8, 9),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn falsifier_finds_unstable_zero() {
        // p = 1 + z² vanishes at z = i: not real stable.
        let mut p = MultiPoly::new_zero(1, 2).unwrap();
        p.set_coeff(&[0], 1.0).unwrap();
        p.set_coeff(&[2], 1.0).unwrap();
        let w = stability_falsifier(&p, 200, 11).expect("should find the zero at i");
        assert!(w[0].im > 0.0);
        assert!(p.eval(&w).unwrap().norm() < 1e-8);
    }

    #[test]
    fn falsifier_passes_stable_determinant() {
        // det(xI + z₁A₁ + z₂A₂) with PSD Aᵢ is real stable: no witness.
        let a = HermitianMatrix::rank1(&CVec::basis(2, 0));
        let b = HermitianMatrix::identity(2);
        let p = det_poly(&[a, b], true).unwrap();
        assert!(stability_falsifier(&p, 100, 3).is_none());
    }

    #[test]
    fn above_roots_probe_splits_plane() {
        // p = det(xI + z·I) = (x + z)²: above the roots means x + z > 0.
        let p = det_poly(&[HermitianMatrix::identity(2)], true).unwrap();
        assert!(above_roots_probe(&p, &[1.0, 0.5], 8, 0).unwrap());
        assert!(!above_roots_probe(&p, &[-2.0, 1.0], 8, 0).unwrap());
        assert!(matches!(
            above_roots_probe(&p, &[1.0], 8, 0),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
