//! Holomorphic inner product spaces and their real slices.
//!
//! `ℂⁿ` carries the bilinear form `g(X,Y) = Σ XᵢYᵢ`. A real slice of
//! signature `(p,q)` is the fixed-point set of the anti-linear map
//! `Z ↦ I_{p,q}·conj(Z)`: real in the first `p` coordinates, purely
//! imaginary in the last `q`. Basis ordering is always `+1` directions first.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the determinant test in [`is_real_slice`].
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Zero threshold for eigenvalue sign counting.
pub const EIGEN_ZERO_TOL: f64 = 1e-10;

/// Signature `(p,q)` of a pseudo-inner product, `n = p + q ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::Signature { p, q, reason: "dimension must be at least 1".into() });
        }
        Ok(Self { p, q })
    }

    /// Positive-definite signature `(n,0)`.
    pub fn riemannian(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn is_definite(&self) -> bool {
        self.p == 0 || self.q == 0
    }

    /// The signature of `-g`.
    pub fn flipped(&self) -> Self {
        Self { p: self.q, q: self.p }
    }

    /// Diagonal entry of `I_{p,q}` at index `a`.
    pub fn sign(&self, a: usize) -> f64 {
        if a < self.p {
            1.0
        } else {
            -1.0
        }
    }

    /// Diagonal of `I_{p,q}` as floats.
    pub fn eta(&self) -> Vec<f64> {
        (0..self.n()).map(|a| self.sign(a)).collect()
    }

    pub fn eta_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(self.eta()))
    }

    /// Coordinate of the pseudo-orthonormal vector `e_a` in the orthonormal
    /// complex frame: `y_a = e_a` for spacelike `a`, `y_a = i·e_a` otherwise.
    pub fn frame_factor(&self, a: usize) -> Complex64 {
        if a < self.p {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        }
    }

    /// `S = diag(frame_factor)`, so that `y = e·S`.
    pub fn frame_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.n(),
            (0..self.n()).map(|a| self.frame_factor(a)),
        ))
    }
}

impl TryFrom<[usize; 2]> for Signature {
    type Error = Error;
    fn try_from(v: [usize; 2]) -> Result<Self> {
        Self::new(v[0], v[1])
    }
}

impl From<Signature> for [usize; 2] {
    fn from(s: Signature) -> Self {
        [s.p, s.q]
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// The bilinear form `Σ XᵢYᵢ` (no complex conjugation).
pub fn standard_form_eval(x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), actual: y.len() });
    }
    if x.is_empty() {
        return Err(Error::Dimension { expected: 1, actual: 0 });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
}

/// The conjugation `Z ↦ I_{p,q}·conj(Z)` of a real slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugationMap {
    signature: Signature,
    diagonal: Vec<i32>,
}

impl ConjugationMap {
    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn diagonal(&self) -> &[i32] {
        &self.diagonal
    }

    /// The integer matrix `I_{p,q}`.
    pub fn matrix(&self) -> DMatrix<i32> {
        DMatrix::from_diagonal(&DVector::from_vec(self.diagonal.clone()))
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if z.len() != self.diagonal.len() {
            return Err(Error::Dimension { expected: self.diagonal.len(), actual: z.len() });
        }
        Ok(z.iter().zip(&self.diagonal).map(|(c, &s)| c.conj() * s as f64).collect())
    }

    /// A real basis of the fixed-point set: `e_a` where the entry is `+1`,
    /// `i·e_a` where it is `-1`.
    pub fn fixed_basis(&self) -> Vec<Vec<Complex64>> {
        let n = self.diagonal.len();
        (0..n)
            .map(|a| {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[a] = if self.diagonal[a] > 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
                v
            })
            .collect()
    }
}

pub fn make_conjugation(sig: Signature) -> ConjugationMap {
    let diagonal = (0..sig.n()).map(|a| if a < sig.p() { 1 } else { -1 }).collect();
    ConjugationMap { signature: sig, diagonal }
}

/// Outcome of [`is_real_slice`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealSliceCheck {
    pub is_real_slice: bool,
    /// Signature of the restricted form; present only for real slices.
    pub signature: Option<Signature>,
}

/// Decide whether the real span of `basis` is a real slice of `(ℂⁿ, g)`.
pub fn is_real_slice(basis: &[Vec<Complex64>]) -> Result<RealSliceCheck> {
    let k = basis.len();
    if k == 0 {
        return Err(Error::Rank { rank: 0, count: 0 });
    }
    let n = basis[0].len();
    if let Some(bad) = basis.iter().find(|v| v.len() != n) {
        return Err(Error::Dimension { expected: n, actual: bad.len() });
    }

    // Independence over ℝ: realify to 2n-dimensional vectors.
    let real = DMatrix::from_fn(2 * n, k, |i, j| {
        if i < n {
            basis[j][i].re
        } else {
            basis[j][i - n].im
        }
    });
    let sv = real.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * smax.max(1e-300)).count();
    if rank < k {
        return Err(Error::Rank { rank, count: k });
    }

    let mut gram = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = standard_form_eval(&basis[i], &basis[j])?;
        }
    }
    let scale = gram.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let not_real = NOT_SLICE;
    if scale == 0.0 {
        return Ok(not_real);
    }
    if gram.iter().any(|z| z.im.abs() > EIGEN_ZERO_TOL * scale) {
        return Ok(not_real);
    }
    let gram_re = gram.map(|z| z.re);
    let det = gram_re.clone().determinant();
    if det.abs() <= DEGENERACY_TOL * scale.powi(k as i32) {
        return Ok(not_real);
    }
    let eig = nalgebra::SymmetricEigen::new(gram_re);
    let p = eig.eigenvalues.iter().filter(|&&l| l > EIGEN_ZERO_TOL * scale).count();
    let q = eig.eigenvalues.iter().filter(|&&l| l < -EIGEN_ZERO_TOL * scale).count();
    Ok(RealSliceCheck { is_real_slice: true, signature: Some(Signature::new(p, q)?) })
}

const NOT_SLICE: RealSliceCheck = RealSliceCheck { is_real_slice: false, signature: None };

/// Two real slices plus the compact slice `ℝⁿ(n,0)`, all of `I_{p,q}` type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibleTriple {
    pub slice_a: ConjugationMap,
    pub slice_b: ConjugationMap,
    pub compact: ConjugationMap,
}

impl CompatibleTriple {
    /// Commutators `[A,B]`, `[A,C]`, `[B,C]` of the three conjugation matrices.
    pub fn commutators(&self) -> [DMatrix<i32>; 3] {
        let (a, b, c) = (self.slice_a.matrix(), self.slice_b.matrix(), self.compact.matrix());
        let comm = |x: &DMatrix<i32>, y: &DMatrix<i32>| x * y - y * x;
        [comm(&a, &b), comm(&a, &c), comm(&b, &c)]
    }

    /// Real basis of the intersection of the two non-compact slices.
    pub fn shared_fixed_basis(&self) -> Vec<Vec<Complex64>> {
        let a = self.slice_a.diagonal();
        let b = self.slice_b.diagonal();
        self.slice_a
            .fixed_basis()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| a[*i] == b[*i])
            .map(|(_, v)| v)
            .collect()
    }
}

pub fn build_compatible_triple(sig_a: Signature, sig_b: Signature) -> Result<CompatibleTriple> {
    if sig_a.n() != sig_b.n() {
        return Err(Error::Dimension { expected: sig_a.n(), actual: sig_b.n() });
    }
    Ok(CompatibleTriple {
        slice_a: make_conjugation(sig_a),
        slice_b: make_conjugation(sig_b),
        compact: make_conjugation(Signature::riemannian(sig_a.n())?),
    })
}
