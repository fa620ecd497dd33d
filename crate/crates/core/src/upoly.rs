//! Real univariate polynomials: arithmetic, root finding, and interlacing.
//!
//! Roots are computed from a balanced companion matrix and then polished by
//! Newton iteration applied to p/p′, which stays quadratically convergent at
//! multiple roots. Interlacing of root sequences and real-rootedness of convex
//! combinations are the primitives behind every interlacing-family argument in
//! the crate.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

type C64 = Complex64;

/// Default relative tolerance on imaginary parts when deciding real-rootedness.
pub const REAL_ROOT_TOL: f64 = 1e-6;

/// A polynomial with real coefficients, stored ascending (`coeffs[k]` is the
/// coefficient of x^k). Trailing zero coefficients are trimmed on
/// construction; the zero polynomial is stored as `[0.0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealUniPoly {
    coeffs: Vec<f64>,
}

impl RealUniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite);
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(RealUniPoly { coeffs })
    }

    pub fn zero() -> Self {
        RealUniPoly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        RealUniPoly { coeffs: vec![c] }
    }

    /// Monic polynomial with the given real roots: ∏ (x − rᵢ).
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut asc = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; asc.len() + 1];
            for (k, &c) in asc.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            asc = next;
        }
        RealUniPoly { coeffs: asc }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// Largest coefficient magnitude; 0 only for the zero polynomial.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        RealUniPoly::new(coeffs).expect("derivative of finite coefficients is finite")
    }

    /// Taylor shift: returns q with q(x) = p(x + c).
    pub fn shifted(&self, c: f64) -> Self {
        let n = self.coeffs.len();
        let mut b = self.coeffs.clone();
        for k in 0..n {
            for i in (k..n - 1).rev() {
                b[i] += c * b[i + 1];
            }
        }
        RealUniPoly::new(b).expect("shift of finite coefficients is finite")
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        RealUniPoly::new(coeffs).expect("sum of finite coefficients is finite")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        RealUniPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
            .expect("scaling finite coefficients stays finite")
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RealUniPoly::new(coeffs).expect("product of finite coefficients is finite")
    }

    /// Product of a list of polynomials (empty product = 1).
    pub fn product<'a>(polys: impl IntoIterator<Item = &'a Self>) -> Self {
        polys
            .into_iter()
            .fold(Self::constant(1.0), |acc, p| acc.mul(p))
    }

    /// All complex roots with multiplicity. Exact zero roots are stripped,
    /// repeated roots are deflated onto square-free factors via a verified
    /// approximate gcd with the derivative, and the remaining simple roots
    /// come from a balanced companion matrix followed by a Newton polish.
    /// Leading coefficients smaller than 1e-13 of the coefficient scale are
    /// treated as numerical dust and trimmed first (their roots have escaped
    /// to infinity).
    pub fn roots(&self) -> Result<Vec<C64>> {
        if self.is_zero() {
            return Err(Error::bad_params("roots of the zero polynomial"));
        }
        let scale = self.coeff_scale();
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().abs() < 1e-13 * scale {
            coeffs.pop();
        }
        if coeffs.len() == 1 {
            return Err(Error::bad_params("roots of a constant polynomial"));
        }
        roots_recursive(&coeffs)
    }

    /// Newton iteration on p/p′ (quadratic even at multiple roots), with a
    /// plain Newton fallback and step acceptance by residual decrease.
    fn polish_root(&self, mut z: C64) -> C64 {
        let dp = self.derivative();
        let ddp = dp.derivative();
        for _ in 0..4 {
            let p = self.eval_complex(z);
            if p.norm() == 0.0 {
                return z;
            }
            let d1 = dp.eval_complex(z);
            let d2 = ddp.eval_complex(z);
            let denom = d1 * d1 - p * d2;
            let step = if denom.norm() > 1e-300 {
                p * d1 / denom
            } else if d1.norm() > 1e-300 {
                p / d1
            } else {
                return z;
            };
            if !step.re.is_finite() || !step.im.is_finite() {
                return z;
            }
            let cap = 0.5 * (1.0 + z.norm());
            let step = if step.norm() > cap {
                step * (cap / step.norm())
            } else {
                step
            };
            let cand = z - step;
            if self.eval_complex(cand).norm() <= p.norm() {
                z = cand;
            } else {
                break;
            }
        }
        z
    }

    /// Real parts of the roots, sorted ascending, after verifying that every
    /// imaginary part is at most `tol · (1 + max |root|)`.
    pub fn real_roots(&self, tol: f64) -> Result<Vec<f64>> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::bad_params("real-root tolerance must be nonnegative"));
        }
        let roots = self.roots()?;
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let max_imag = roots.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if max_imag > tol * scale {
            return Err(Error::NotRealRooted {
                max_imag: max_imag / scale,
            });
        }
        let mut rr: Vec<f64> = roots.iter().map(|z| z.re).collect();
        rr.sort_by(f64::total_cmp);
        Ok(rr)
    }

    /// Whether all roots are real within the relative tolerance `tol`.
    pub fn is_real_rooted(&self, tol: f64) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::bad_params("real-rootedness of the zero polynomial"));
        }
        if self.degree() == 0 {
            return Ok(true); // no roots to speak of
        }
        match self.real_roots(tol) {
            Ok(_) => Ok(true),
            Err(Error::NotRealRooted { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Largest real part among the roots — for a real-rooted polynomial, the
    /// largest root. Robust to the imaginary scatter of repeated roots under
    /// coefficient roundoff (a root of multiplicity q moves ~noise^(1/q)),
    /// which matters for expected characteristic polynomials of structured
    /// systems: those are real-rooted in exact arithmetic but their computed
    /// root clusters need not be.
    ///
    /// A simple, essentially-real top root is refined by bisection on the
    /// sign change just above the second-largest root. Repeated top roots
    /// are returned as produced by the square-free factorisation: around a
    /// multiplicity-q root the evaluated sign of p is cancellation noise out
    /// to ~(unit roundoff)^(1/q), and bisection could only wander into that
    /// plateau.
    pub fn max_root(&self) -> Result<f64> {
        let roots = self.roots()?;
        let top = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let scale = 1.0 + top.abs();
        let near_top: Vec<&C64> = roots.iter().filter(|z| z.re > top - 1e-6 * scale).collect();
        let top_is_real = near_top.iter().any(|z| z.im.abs() <= 1e-9 * scale);
        if near_top.len() > 1 || !top_is_real {
            return Ok(top);
        }
        let second = roots
            .iter()
            .map(|z| z.re)
            .filter(|&r| r < top - 1e-7 * scale)
            .fold(f64::NEG_INFINITY, f64::max);
        let second = second.is_finite().then_some(second);
        Ok(self.refine_top_root(top, second).unwrap_or(top))
    }

    /// Bisection on a bracket just below/above an isolated top root; returns
    /// None when no clean sign change exists (e.g. even multiplicity).
    fn refine_top_root(&self, top: f64, second: Option<f64>) -> Option<f64> {
        let scale = 1.0 + top.abs();
        let q = self.scaled(self.leading().signum()); // positive leading coefficient
        let mut lo = match second {
            Some(s) => 0.5 * (s + top),
            None => top - 1e-3 * scale,
        };
        // Above all roots q is positive; strictly between the top two roots
        // (or just below a simple top root) it is negative.
        let mut hi = top + 1e-3 * scale;
        for _ in 0..60 {
            if q.eval(hi) > 0.0 {
                break;
            }
            hi = top + 2.0 * (hi - top);
        }
        if !(q.eval(lo) < 0.0 && q.eval(hi) > 0.0) {
            return None;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if q.eval(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Roots of a dust-trimmed coefficient slice of degree ≥ 1, recursing on
/// square-free factors so that repeated roots are found on well-conditioned
/// subproblems instead of suffering the (noise)^(1/multiplicity) floor of a
/// single eigenvalue computation.
fn roots_recursive(coeffs: &[f64]) -> Result<Vec<C64>> {
    let deg = coeffs.len() - 1;
    // Exact zero low-order coefficients are exact roots at the origin;
    // factoring them out keeps the companion matrix nonsingular (and away
    // from the permutation-like pattern that stalls QR iteration).
    let zeros = coeffs[..deg].iter().take_while(|c| **c == 0.0).count();
    let mut roots = vec![C64::new(0.0, 0.0); zeros];
    let work = &coeffs[zeros..];
    let deg_w = work.len() - 1;
    if deg_w == 0 {
        return Ok(roots);
    }
    let lead = work[deg_w];
    let monic: Vec<f64> = work.iter().map(|c| c / lead).collect();
    match deg_w {
        1 => roots.push(C64::new(-monic[0], 0.0)),
        2 => roots.extend(quadratic_roots(monic[0], monic[1])),
        _ => {
            if let Some((quot, gcd)) = square_free_split(&monic) {
                roots.extend(roots_recursive(quot.coeffs())?);
                roots.extend(roots_recursive(gcd.coeffs())?);
            } else {
                let poly = RealUniPoly {
                    coeffs: monic.clone(),
                };
                let mut simple = companion_eigenvalues(&monic)?;
                for z in simple.iter_mut() {
                    *z = poly.polish_root(*z);
                }
                roots.extend(simple);
            }
        }
    }
    Ok(roots)
}

/// Division with remainder by a *monic* divisor: p = q·g + r, deg r < deg g.
fn divmod_monic(p: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dp = p.len() - 1;
    let dg = g.len() - 1;
    if dp < dg {
        return (vec![0.0], p.to_vec());
    }
    let mut rem = p.to_vec();
    let mut quot = vec![0.0; dp - dg + 1];
    for k in (0..=dp - dg).rev() {
        let c = rem[k + dg];
        quot[k] = c;
        if c != 0.0 {
            for (j, gj) in g.iter().take(dg).enumerate() {
                rem[k + j] -= c * gj;
            }
        }
        rem[k + dg] = 0.0;
    }
    rem.truncate(dg.max(1));
    (quot, rem)
}

/// Attempt to split a monic polynomial of degree ≥ 3 as p = q·g with
/// g = gcd(p, p′): q carries one copy of every distinct root, g the
/// repetitions. Returns None when p is (numerically) square-free, or when
/// the Euclidean chain's candidate gcd fails the division verification —
/// the guard that keeps merely-close root clusters from being merged.
fn square_free_split(monic: &[f64]) -> Option<(RealUniPoly, RealUniPoly)> {
    let scale = monic.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let dp: Vec<f64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect();
    let dlead = *dp.last().unwrap();
    let mut a = monic.to_vec();
    let mut b: Vec<f64> = dp.iter().map(|c| c / dlead).collect();
    let g = loop {
        let a_scale = a.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let (_, r) = divmod_monic(&a, &b);
        let r_scale = r.iter().map(|c| c.abs()).fold(0.0, f64::max);
        if r_scale <= 1e-12 * (1.0 + a_scale) {
            break b;
        }
        let mut rr = r;
        while rr.len() > 1 && rr.last().unwrap().abs() <= 1e-12 * r_scale {
            rr.pop();
        }
        if rr.len() == 1 {
            return None; // constant gcd: already square-free
        }
        let rl = *rr.last().unwrap();
        for c in rr.iter_mut() {
            *c /= rl;
        }
        a = b;
        b = rr;
    };
    if g.len() < 2 || g.len() + 1 > monic.len() {
        return None;
    }
    let (q, rem) = divmod_monic(monic, &g);
    let rem_scale = rem.iter().map(|c| c.abs()).fold(0.0, f64::max);
    if rem_scale > 1e-9 * (1.0 + scale) || q.len() < 2 {
        return None;
    }
    Some((RealUniPoly { coeffs: q }, RealUniPoly { coeffs: g }))
}

fn quadratic_roots(c0: f64, c1: f64) -> Vec<C64> {
    // x² + c1 x + c0, solved with the cancellation-safe variant.
    let disc = c1 * c1 - 4.0 * c0;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (c1 + c1.signum() * sq);
        let r1 = if q != 0.0 { c0 / q } else { -0.5 * c1 };
        let r2 = if c1 != 0.0 || c0 != 0.0 { q } else { 0.0 };
        if q == 0.0 {
            // c1 == 0 and c0 <= 0: symmetric pair.
            let r = (-c0).max(0.0).sqrt();
            return vec![C64::new(-r, 0.0), C64::new(r, 0.0)];
        }
        vec![C64::new(r1, 0.0), C64::new(r2, 0.0)]
    } else {
        let im = (-disc).sqrt() * 0.5;
        let re = -0.5 * c1;
        vec![C64::new(re, -im), C64::new(re, im)]
    }
}

/// Eigenvalues of the balanced companion matrix of a monic polynomial,
/// computed by QR iteration with a bounded iteration budget.
///
/// Companion matrices of polynomials with highly symmetric root patterns
/// (e.g. xⁿ − c) can stall plain Francis iteration indefinitely, so when the
/// budget runs out the polynomial is retried under a Taylor shift that
/// breaks the symmetry, and the shift is subtracted from the result.
fn companion_eigenvalues(monic: &[f64]) -> Result<Vec<C64>> {
    const SHIFTS: [f64; 4] = [
        0.0,
        0.618_033_988_749_894_9,
        -1.324_717_957_244_746,
        2.502_907_875_095_892_6,
    ];
    let deg = monic.len() - 1;
    let base = RealUniPoly::new(monic.to_vec())?;
    for &s in &SHIFTS {
        // p(x + s) has roots rᵢ − s and the same (unit) leading coefficient.
        let moved = if s == 0.0 {
            base.clone()
        } else {
            base.shifted(s)
        };
        let mc = moved.coeffs();
        let mut c = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            c[(i, i - 1)] = 1.0;
        }
        for (i, coeff) in mc.iter().take(deg).enumerate() {
            c[(i, deg - 1)] = -coeff;
        }
        balance_in_place(&mut c);
        if let Some(schur) = Schur::try_new(c, 1e-14, 40_000) {
            return Ok(schur
                .complex_eigenvalues()
                .iter()
                .map(|z| z + C64::new(s, 0.0))
                .collect());
        }
    }
    Err(Error::IterationFailure { dim: deg })
}

/// Parlett–Reinsch balancing (radix-2 diagonal similarity), which leaves
/// eigenvalues unchanged while taming row/column norm disparities.
fn balance_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| m[(j, i)].abs()).sum();
            if r == 0.0 || c == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / 2.0 {
                f *= 2.0;
                c *= 2.0;
                r /= 2.0;
            }
            while c > r * 2.0 {
                f /= 2.0;
                c /= 2.0;
                r *= 2.0;
            }
            if c + r < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            return;
        }
    }
}

/// Whether `g` interlaces `f`: deg g = deg f − 1, both real-rooted, and with
/// f-roots β₁ ≤ … ≤ βₙ and g-roots α₁ ≤ … ≤ αₙ₋₁ the chain
/// β₁ ≤ α₁ ≤ β₂ ≤ … ≤ αₙ₋₁ ≤ βₙ holds within `tol · (1 + root scale)`.
pub fn interlaces(g: &RealUniPoly, f: &RealUniPoly, tol: f64) -> Result<bool> {
    if f.degree() < 1 {
        return Err(Error::bad_params("interlacing target must have degree ≥ 1"));
    }
    if g.degree() + 1 != f.degree() {
        return Err(Error::DegreeMismatch {
            expected: f.degree() - 1,
            got: g.degree(),
        });
    }
    let beta = f.real_roots(REAL_ROOT_TOL)?;
    let alpha = if g.degree() == 0 {
        vec![]
    } else {
        g.real_roots(REAL_ROOT_TOL)?
    };
    let top = beta
        .iter()
        .chain(alpha.iter())
        .map(|r| r.abs())
        .fold(0.0, f64::max);
    let slack = tol * (1.0 + top);
    for i in 0..alpha.len() {
        if !(beta[i] <= alpha[i] + slack && alpha[i] <= beta[i + 1] + slack) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convex combination Σ λᵢ fᵢ of same-degree polynomials; weights must be
/// nonnegative and sum to 1 within 1e-9.
pub fn convex_combo(fs: &[RealUniPoly], lambdas: &[f64]) -> Result<RealUniPoly> {
    if fs.is_empty() {
        return Err(Error::bad_params("convex combination of an empty list"));
    }
    if fs.len() != lambdas.len() {
        return Err(Error::LengthMismatch {
            expected: fs.len(),
            got: lambdas.len(),
        });
    }
    let deg = fs[0].degree();
    for f in fs {
        if f.degree() != deg {
            return Err(Error::DegreeMismatch {
                expected: deg,
                got: f.degree(),
            });
        }
    }
    let sum: f64 = lambdas.iter().sum();
    if lambdas.iter().any(|&l| l < -1e-12) {
        return Err(Error::BadWeights {
            detail: "negative weight".into(),
        });
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadWeights {
            detail: format!("weights sum to {sum}"),
        });
    }
    let mut acc = RealUniPoly::zero();
    for (f, &l) in fs.iter().zip(lambdas) {
        acc = acc.add(&f.scaled(l));
    }
    Ok(acc)
}

/// Randomized test for a common interlacing of same-degree, positive-leading,
/// real-rooted polynomials: a common interlacing exists iff every convex
/// combination is real-rooted, so this evaluates real-rootedness at the
/// vertices, all pairwise midpoints, and `samples` uniform draws from the
/// weight simplex. A `false` is a certificate (a witness combination failed);
/// a `true` is evidence at the sampled combinations.
pub fn common_interlacing_check(
    fs: &[RealUniPoly],
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<bool> {
    if fs.is_empty() {
        return Err(Error::bad_params("common interlacing of an empty list"));
    }
    let deg = fs[0].degree();
    if deg < 1 {
        return Err(Error::bad_params("common interlacing needs degree ≥ 1"));
    }
    for f in fs {
        if f.degree() != deg {
            return Err(Error::DegreeMismatch {
                expected: deg,
                got: f.degree(),
            });
        }
        let leading = f.leading();
        if leading.is_nan() || leading <= 0.0 {
            return Err(Error::NonPositiveLeading { leading });
        }
    }
    let l = fs.len();
    let mut weight_sets: Vec<Vec<f64>> = Vec::new();
    for i in 0..l {
        let mut w = vec![0.0; l];
        w[i] = 1.0;
        weight_sets.push(w);
    }
    for i in 0..l {
        for j in (i + 1)..l {
            let mut w = vec![0.0; l];
            w[i] = 0.5;
            w[j] = 0.5;
            weight_sets.push(w);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        // Exponential spacings give the uniform distribution on the simplex.
        let raw: Vec<f64> = (0..l)
            .map(|_| -(1.0 - rng.random::<f64>()).ln().max(1e-12))
            .collect();
        let total: f64 = raw.iter().sum();
        weight_sets.push(raw.iter().map(|x| x / total).collect());
    }
    for w in &weight_sets {
        let combo = convex_combo(fs, w)?;
        if !combo.is_real_rooted(tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
