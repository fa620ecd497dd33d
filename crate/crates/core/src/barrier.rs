//! Multivariate barrier functions and a replay of the root-bound induction.
//!
//! For a real polynomial p and a point z above its roots, the barrier in
//! direction i is Φ^i_p(z) = ∂_i p(z) / p(z). Starting from
//! P₀ = det(Σ yᵢAᵢ) with ΣAᵢ = I and trace(Aᵢ) ≤ ε, applying the operators
//! (1 − ∂_i) one at a time while stepping the point by δ in the matching
//! coordinate keeps every barrier value at most φ = ε/(ε + √ε) and keeps the
//! point above the roots; restricting the final polynomial to the diagonal
//! shows max_root(μ[A₁…A_m]) ≤ (1 + √ε)². [`run_barrier_trace`] replays this
//! induction, recording every barrier value so tests can audit each step.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::mixedchar::{mixed_charpoly, CovarianceList};
use crate::mpoly::{above_roots_probe, det_poly, MultiPoly};

/// Positive-definiteness floor for the determinant-form barrier.
const PD_FLOOR: f64 = 1e-10;
/// Relative floor under which a polynomial value counts as a vanished
/// denominator.
const DENOM_TOL: f64 = 1e-12;
/// Rays used by the above-roots probe inside trace and check routines.
const PROBE_RAYS: usize = 16;
/// Seed for the probe's random ray directions.
const PROBE_SEED: u64 = 0xba11a5;

/// One step of the induction replay.
#[derive(Clone, Debug)]
pub struct BarrierStep {
    /// How many (1 − ∂) operators have been applied.
    pub k: usize,
    /// Evaluation point x^k: t + δ in the first k coordinates, t elsewhere.
    pub point: Vec<f64>,
    /// Φ^i at x^k for every direction i.
    pub barrier_values: Vec<f64>,
    /// Whether the sampled above-roots probe passed at x^k.
    pub above_roots: bool,
}

/// Full record of a barrier induction replay.
#[derive(Clone, Debug)]
pub struct BarrierTrace {
    pub epsilon: f64,
    /// Starting point height t = √ε + ε.
    pub t: f64,
    /// Per-step shift δ = 1 + √ε.
    pub delta: f64,
    /// Barrier budget φ = ε/(ε + √ε).
    pub phi: f64,
    /// Steps k = 0…m (empty in endpoint-only mode).
    pub steps: Vec<BarrierStep>,
    /// Largest root of the mixed characteristic polynomial.
    pub final_max_root: f64,
    /// The certified bound (1 + √ε)².
    pub root_bound: f64,
    /// Whether the intermediate polynomials were tracked symbolically.
    pub symbolic: bool,
}

/// Report of [`barrier_shift_check`]: Φ^i before and after one
/// (1 − ∂_j) / shift-by-δ step, with per-direction slacks.
#[derive(Clone, Debug)]
pub struct ShiftReport {
    pub j: usize,
    pub delta: f64,
    /// Φ^j at the starting point (must be ≤ 1 − 1/δ).
    pub phi_j: f64,
    /// Φ^i of p at z.
    pub before: Vec<f64>,
    /// Φ^i of p − ∂_j p at z + δ e_j.
    pub after: Vec<f64>,
    /// before − after, per direction; the lemma asserts ≥ 0.
    pub slacks: Vec<f64>,
    /// All slacks ≥ −1e-8.
    pub pass: bool,
}

/// Report of [`monotone_convex_check`]: central finite-difference estimates
/// of ∂_j Φ^i and ∂²_j Φ^i at z.
#[derive(Clone, Debug)]
pub struct MonotoneConvexReport {
    pub i: usize,
    pub j: usize,
    pub h: f64,
    /// Finite-difference ∂_j Φ^i (must be ≤ 1e-6: Φ is nonincreasing).
    pub first: f64,
    /// Finite-difference ∂²_j Φ^i (must be ≥ −1e-6: Φ is convex).
    pub second: f64,
    pub pass: bool,
}

impl MonotoneConvexReport {
    pub fn holds(&self) -> bool {
        self.first <= 1e-6 && self.second >= -1e-6
    }
}

/// Barrier of the determinant polynomial P₀ = det(Σ yⱼAⱼ) in direction i,
/// computed from the closed form trace((Σ yⱼAⱼ)⁻¹ Aᵢ).
pub fn barrier_det_form(list: &CovarianceList, y: &[f64], i: usize) -> Result<f64> {
    let m = list.len();
    if y.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: y.len(),
        });
    }
    if i >= m {
        return Err(Error::BadIndex { index: i, nvars: m });
    }
    let weighted: Vec<HermitianMatrix> = list
        .mats()
        .iter()
        .zip(y)
        .map(|(a, &c)| a.scaled(c))
        .collect();
    let sum = HermitianMatrix::sum(&weighted)?;
    let min = sum.min_eigenvalue()?;
    if min <= PD_FLOOR {
        return Err(Error::NotAboveRoots { witness: min });
    }
    let inv = sum.apply_spectral(|l| 1.0 / l)?;
    let d = list.dim();
    let mut tr = 0.0;
    for r in 0..d {
        for c in 0..d {
            tr += (inv.entry(r, c) * list.mats()[i].entry(c, r)).re;
        }
    }
    Ok(tr)
}

/// Barrier Φ^i_p(z) = ∂_i p(z) / p(z) of an arbitrary multivariate
/// polynomial, with the derivative taken symbolically.
pub fn barrier_general(p: &MultiPoly, z: &[f64], i: usize) -> Result<f64> {
    if z.len() != p.nvars() {
        return Err(Error::LengthMismatch {
            expected: p.nvars(),
            got: z.len(),
        });
    }
    if i >= p.nvars() {
        return Err(Error::BadIndex {
            index: i,
            nvars: p.nvars(),
        });
    }
    let value = p.eval_real(z)?;
    if value.abs() <= DENOM_TOL * p.coeff_scale() {
        return Err(Error::ZeroDenominator);
    }
    let deriv = p.partial(i)?.eval_real(z)?;
    Ok(deriv / value)
}

fn barrier_all(p: &MultiPoly, z: &[f64]) -> Result<Vec<f64>> {
    (0..p.nvars()).map(|i| barrier_general(p, z, i)).collect()
}

/// Replay the root-bound induction on a decomposition of the identity.
///
/// Requires ΣAᵢ = I within 1e-8 and trace(Aᵢ) ≤ ε + 1e-10. When the instance
/// is small enough for dense multivariate storage (m ≤ 5, d ≤ 4) the
/// intermediate polynomials P_k are tracked symbolically and every barrier
/// value is recorded; otherwise only the endpoint root bound is computed.
pub fn run_barrier_trace(list: &CovarianceList, epsilon: f64) -> Result<BarrierTrace> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::bad_params(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let m = list.len();
    let d = list.dim();
    let total = list.total();
    let dev = total.sub(&HermitianMatrix::identity(d))?.operator_norm()?;
    if dev > 1e-8 {
        return Err(Error::HypothesisViolated {
            detail: format!("covariances sum to identity only within {dev:.3e}"),
        });
    }
    for (idx, a) in list.mats().iter().enumerate() {
        let tr = a.trace();
        if tr > epsilon + 1e-10 {
            return Err(Error::HypothesisViolated {
                detail: format!("trace of covariance {idx} is {tr:.6e} > epsilon {epsilon:.6e}"),
            });
        }
    }

    let s = epsilon.sqrt();
    let t = s + epsilon;
    let delta = 1.0 + s;
    let phi = epsilon / (epsilon + s);
    let root_bound = (1.0 + s) * (1.0 + s);

    let symbolic = m <= 5 && d <= 4;
    let mut steps = Vec::new();
    if symbolic {
        let mut p = det_poly(list.mats(), false)?;
        let point_at =
            |k: usize| -> Vec<f64> { (0..m).map(|i| if i < k { t + delta } else { t }).collect() };
        let x0 = point_at(0);
        steps.push(BarrierStep {
            k: 0,
            barrier_values: barrier_all(&p, &x0)?,
            above_roots: above_roots_probe(&p, &x0, PROBE_RAYS, PROBE_SEED)?,
            point: x0,
        });
        for k in 1..=m {
            p = p.one_minus_partial(k - 1)?;
            let xk = point_at(k);
            steps.push(BarrierStep {
                k,
                barrier_values: barrier_all(&p, &xk)?,
                above_roots: above_roots_probe(
                    &p,
                    &xk,
                    PROBE_RAYS,
                    PROBE_SEED.wrapping_add(k as u64),
                )?,
                point: xk,
            });
        }
    }
    // Restricting the fully transformed polynomial to the diagonal y = x·𝟙
    // recovers the mixed characteristic polynomial (exactly, because
    // ΣAᵢ = I), so the endpoint root comes from the subset-expansion route,
    // whose compensated sums carry less rounding than grid interpolation.
    let final_max_root = mixed_charpoly(list)?.max_root()?;

    Ok(BarrierTrace {
        epsilon,
        t,
        delta,
        phi,
        steps,
        final_max_root,
        root_bound,
        symbolic,
    })
}

/// Audit one induction step: if Φ^j_p(z) ≤ 1 − 1/δ and z is above the roots
/// of p, then every Φ^i of p − ∂_j p at z + δ e_j is at most Φ^i of p at z.
pub fn barrier_shift_check(p: &MultiPoly, z: &[f64], j: usize, delta: f64) -> Result<ShiftReport> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::bad_params(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if j >= p.nvars() {
        return Err(Error::BadIndex {
            index: j,
            nvars: p.nvars(),
        });
    }
    if !above_roots_probe(p, z, PROBE_RAYS, PROBE_SEED)? {
        return Err(Error::PreconditionFailed {
            detail: "point failed the above-roots probe".into(),
        });
    }
    let phi_j = barrier_general(p, z, j)?;
    let budget = 1.0 - 1.0 / delta;
    if phi_j > budget + 1e-10 {
        return Err(Error::PreconditionFailed {
            detail: format!(
                "barrier {phi_j:.6e} in direction {j} exceeds 1 - 1/delta = {budget:.6e}"
            ),
        });
    }
    let before = barrier_all(p, z)?;
    let q = p.one_minus_partial(j)?;
    let mut shifted = z.to_vec();
    shifted[j] += delta;
    let after = barrier_all(&q, &shifted)?;
    let slacks: Vec<f64> = before.iter().zip(&after).map(|(b, a)| b - a).collect();
    let pass = slacks.iter().all(|s| *s >= -1e-8);
    Ok(ShiftReport {
        j,
        delta,
        phi_j,
        before,
        after,
        slacks,
        pass,
    })
}

/// Finite-difference audit of barrier monotonicity and convexity:
/// ∂_j Φ^i ≤ 0 and ∂²_j Φ^i ≥ 0 (up to 1e-6 tolerance) at a point above the
/// roots, using central differences with step h.
pub fn monotone_convex_check(
    p: &MultiPoly,
    z: &[f64],
    i: usize,
    j: usize,
    h: f64,
) -> Result<MonotoneConvexReport> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::bad_params(format!(
            "step h must be positive, got {h}"
        )));
    }
    if !above_roots_probe(p, z, PROBE_RAYS, PROBE_SEED)? {
        return Err(Error::PreconditionFailed {
            detail: "point failed the above-roots probe".into(),
        });
    }
    let mut plus = z.to_vec();
    plus[j] += h;
    let mut minus = z.to_vec();
    minus[j] -= h;
    let f_plus = barrier_general(p, &plus, i)?;
    let f_mid = barrier_general(p, z, i)?;
    let f_minus = barrier_general(p, &minus, i)?;
    let first = (f_plus - f_minus) / (2.0 * h);
    let second = (f_plus - 2.0 * f_mid + f_minus) / (h * h);
    let mut report = MonotoneConvexReport {
        i,
        j,
        h,
        first,
        second,
        pass: false,
    };
    report.pass = report.holds();
    Ok(report)
}

/// Default finite-difference step for [`monotone_convex_check`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;
