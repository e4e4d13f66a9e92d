//! Complex vector arithmetic and scalar maximization utilities.
//!
//! Everything here is self-contained: the only matrix that ever appears in
//! the rate analysis is the 2x2 Gram matrix of the two basestation-side
//! channels, so its eigenvalues are computed in closed form instead of
//! pulling in a general eigensolver.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A finite, non-empty vector of complex coefficients.
///
/// Houses channels, transmit/receive beamformers and channel projections.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    entries: Vec<Complex64>,
}

impl CVector {
    /// Build a vector, rejecting empty input and non-finite entries.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument(
                "vector must have at least one entry".into(),
            ));
        }
        if let Some(i) = entries
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "vector entry {i} is not finite"
            )));
        }
        Ok(Self { entries })
    }

    /// Build a real-valued vector.
    pub fn from_re(re: &[f64]) -> Result<Self> {
        Self::new(re.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Build a vector from separate real and imaginary parts.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch {
                expected: re.len(),
                got: im.len(),
            });
        }
        Self::new(
            re.iter()
                .zip(im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        )
    }

    /// The all-zero vector of length `len` (>= 1).
    pub fn zeros(len: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); len.max(1)],
        }
    }

    /// Internal constructor for values produced by our own arithmetic.
    pub(crate) fn from_raw(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.entries.iter()
    }

    /// `self * c`, entrywise.
    pub fn scaled(&self, c: Complex64) -> CVector {
        CVector::from_raw(self.entries.iter().map(|x| x * c).collect())
    }

    /// `self * s` for a real scalar.
    pub fn scaled_re(&self, s: f64) -> CVector {
        self.scaled(Complex64::new(s, 0.0))
    }

    /// `self - other`; lengths must match (callers guarantee this).
    pub(crate) fn minus(&self, other: &CVector) -> CVector {
        debug_assert_eq!(self.len(), other.len());
        CVector::from_raw(
            self.entries
                .iter()
                .zip(other.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `self + other`; lengths must match (callers guarantee this).
    pub(crate) fn plus(&self, other: &CVector) -> CVector {
        debug_assert_eq!(self.len(), other.len());
        CVector::from_raw(
            self.entries
                .iter()
                .zip(other.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Hermitian inner product `a^H b = sum_i conj(a_i) * b_i`.
pub fn inner_product(a: &CVector, b: &CVector) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Squared Euclidean norm `||a||^2` (real, non-negative).
pub fn norm_sq(a: &CVector) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Component of `a` orthogonal to `b`: `a - (b^H a / ||b||^2) b`.
///
/// Errors when `b` is the zero vector.
pub fn orthogonal_component(a: &CVector, b: &CVector) -> Result<CVector> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let nb = norm_sq(b);
    if nb <= 0.0 {
        return Err(Error::DegenerateChannel(
            "cannot project against the zero vector".into(),
        ));
    }
    let coeff = inner_product(b, a)? / nb;
    Ok(CVector::from_raw(
        a.iter().zip(b.iter()).map(|(x, y)| x - coeff * y).collect(),
    ))
}

/// Eigenvalues of the 2x2 Hermitian Gram matrix
/// `[[||h1||^2, h1^H h2], [h2^H h1, ||h2||^2]]`, sorted descending.
///
/// Closed-form quadratic; the discriminant is written as
/// `(||h1||^2 - ||h2||^2)^2 + 4 |h1^H h2|^2` so it can never go negative.
/// Round-off below zero on the small eigenvalue is clamped to 0 since the
/// matrix is positive semidefinite by construction.
pub fn gram_eigenvalues(h1: &CVector, h2: &CVector) -> Result<(f64, f64)> {
    let a = norm_sq(h1);
    let d = norm_sq(h2);
    let cross = inner_product(h1, h2)?.norm_sqr();
    let half_diff = 0.5 * (a - d);
    let s = (half_diff * half_diff + cross).sqrt();
    let mid = 0.5 * (a + d);
    Ok((mid + s, (mid - s).max(0.0)))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of a unimodal `f` on `[lo, hi]`.
/// Returns the best evaluated point, so the reported maximum is always a
/// true function value.
fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut bx, mut bf) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 > bf {
                bx = x2;
                bf = f2;
            }
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 > bf {
                bx = x1;
                bf = f1;
            }
        }
    }
    (bx, bf)
}

/// Global maximum of a piecewise-concave function on `[lo, hi]`.
///
/// `breakpoints` are the abscissae where concavity may break (kinks of
/// `[.]^+` clamps and rate caps); between consecutive breakpoints the
/// function must be concave. Each sub-interval is searched by golden
/// section and all partition points are evaluated exactly, so kink maxima
/// are found without loss. `tol` is interpreted on the argument axis; a
/// reasonable default is `1e-9 * (hi - lo)`.
pub fn maximize_piecewise_concave<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(
            "search bounds must be finite".into(),
        ));
    }
    if hi < lo {
        return Err(Error::InvalidArgument(format!(
            "upper bound {hi} is below lower bound {lo}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if hi == lo {
        let v = f(lo);
        return Ok((lo, v));
    }

    let mut pts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts.insert(0, lo);
    pts.push(hi);

    let mut bx = lo;
    let mut bf = f(lo);
    for &p in &pts[1..] {
        let fp = f(p);
        if fp > bf {
            bx = p;
            bf = fp;
        }
    }
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= tol {
            continue;
        }
        let (x, fx) = golden_max(&f, a, b, tol);
        if fx > bf {
            bx = x;
            bf = fx;
        }
    }
    Ok((bx, bf))
}
