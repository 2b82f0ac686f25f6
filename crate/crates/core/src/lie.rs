//! Pseudo-orthogonal Lie algebras, their Cartan decompositions, and the
//! matrix groups `O(p,q) ⊂ O(n,ℂ)`.
//!
//! Real-group data lives in the pseudo-orthonormal frame `{e_a}` (real
//! matrices preserving `I_{p,q}`). Complex-group data lives in the
//! orthonormal complex frame `{y_a}`, where the compact real form is `O(n)`
//! and the symmetric part is `i·o(n)`. [`GroupElement::orthonormal_matrix`]
//! converts between the two with `S⁻¹·A·S`, `S = diag(1,…,1,i,…,i)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hol::Signature;

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for the group-membership invariant, relative to `‖g‖²`.
pub const GROUP_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which group acts: a real form `O(p,q)` or the complex group `O(n,ℂ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Real(Signature),
    Complex(usize),
}

impl GroupKind {
    pub fn n(&self) -> usize {
        match self {
            GroupKind::Real(s) => s.n(),
            GroupKind::Complex(n) => *n,
        }
    }

    /// The signature whose frame factors convert native matrices to the
    /// orthonormal complex frame.
    pub fn frame_signature(&self) -> Signature {
        match self {
            GroupKind::Real(s) => *s,
            GroupKind::Complex(n) => Signature::riemannian(*n).expect("n >= 1"),
        }
    }

    /// The preserved bilinear form in the native frame.
    pub fn form(&self) -> CMatrix {
        match self {
            GroupKind::Real(s) => s.eta_matrix().map(|x| Complex64::new(x, 0.0)),
            GroupKind::Complex(n) => CMatrix::identity(*n, *n),
        }
    }

    pub fn cartan(&self) -> CartanDecomposition {
        match self {
            GroupKind::Real(s) => cartan_decompose(&basis_opq(*s)),
            GroupKind::Complex(n) => complex_cartan(*n),
        }
    }
}

/// Elementary generators of `o(p,q)` in the pseudo-orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthBasis {
    pub signature: Signature,
    pub generators: Vec<DMatrix<f64>>,
}

/// `o(p,q)` basis: for each index pair `a < b`, a rotation
/// `E_ba − E_ab` when both directions share a sign, otherwise a boost
/// `E_ab + E_ba`. Entries are single `±1`s.
pub fn basis_opq(sig: Signature) -> OrthBasis {
    let n = sig.n();
    let mut generators = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let mut x = DMatrix::<f64>::zeros(n, n);
            if sig.sign(a) == sig.sign(b) {
                x[(b, a)] = 1.0;
                x[(a, b)] = -1.0;
            } else {
                x[(a, b)] = 1.0;
                x[(b, a)] = 1.0;
            }
            generators.push(x);
        }
    }
    OrthBasis { signature: sig, generators }
}

/// Cartan data `𝔤 = 𝔨 ⊕ 𝔭` with the involution `θ` in the native frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanDecomposition {
    pub group: GroupKind,
    pub k_basis: Vec<CMatrix>,
    pub p_basis: Vec<CMatrix>,
    pub theta: DMatrix<f64>,
}

impl CartanDecomposition {
    /// `(𝔨, 𝔭)` bases expressed in the orthonormal complex frame.
    pub fn orthonormal_frame(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let sig = self.group.frame_signature();
        let conv = |v: &[CMatrix]| v.iter().map(|x| to_orthonormal(sig, x)).collect::<Vec<_>>();
        (conv(&self.k_basis), conv(&self.p_basis))
    }
}

pub fn cartan_decompose(basis: &OrthBasis) -> CartanDecomposition {
    let theta = basis.signature.eta_matrix();
    let mut k_basis = Vec::new();
    let mut p_basis = Vec::new();
    for x in &basis.generators {
        let conj = &theta * x * &theta;
        let as_c = x.map(|v| Complex64::new(v, 0.0));
        if conj == *x {
            k_basis.push(as_c);
        } else {
            debug_assert_eq!(conj, -x);
            p_basis.push(as_c);
        }
    }
    CartanDecomposition { group: GroupKind::Real(basis.signature), k_basis, p_basis, theta }
}

/// `o(n,ℂ) = o(n) ⊕ i·o(n)` in the orthonormal frame.
pub fn complex_cartan(n: usize) -> CartanDecomposition {
    let sig = Signature::riemannian(n).expect("n >= 1");
    let k_basis: Vec<CMatrix> =
        basis_opq(sig).generators.iter().map(|x| x.map(|v| Complex64::new(v, 0.0))).collect();
    let p_basis = k_basis.iter().map(|x| x * I).collect();
    CartanDecomposition { group: GroupKind::Complex(n), k_basis, p_basis, theta: DMatrix::identity(n, n) }
}

/// Native-frame matrix to orthonormal complex frame: `S⁻¹·A·S`.
pub fn to_orthonormal(sig: Signature, a: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * sig.frame_factor(j) / sig.frame_factor(i))
}

/// Inverse of [`to_orthonormal`].
pub fn from_orthonormal(sig: Signature, a: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * sig.frame_factor(i) / sig.frame_factor(j))
}

/// An element of `O(p,q)` (native real frame) or `O(n,ℂ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: CMatrix,
    kind: GroupKind,
}

impl GroupElement {
    /// Checked constructor: `mᵀ·G·m = G` up to `GROUP_TOL·max(1,‖m‖²)`.
    pub fn new(matrix: CMatrix, kind: GroupKind) -> Result<Self> {
        let n = kind.n();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension { expected: n, actual: matrix.nrows() });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { iteration: 0 });
        }
        let residual = form_residual(&matrix, kind);
        let scale = max_abs(&matrix).powi(2).max(1.0);
        if residual > GROUP_TOL * scale {
            return Err(Error::NotInGroup { residual });
        }
        Ok(Self { matrix, kind })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix, kind: GroupKind) -> Self {
        Self { matrix, kind }
    }

    pub fn identity(kind: GroupKind) -> Self {
        Self { matrix: CMatrix::identity(kind.n(), kind.n()), kind }
    }

    /// Build from a matrix given in the orthonormal complex frame.
    pub fn from_orthonormal(matrix_y: &CMatrix, kind: GroupKind) -> Result<Self> {
        Self::new(from_orthonormal(kind.frame_signature(), matrix_y), kind)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.kind.n()
    }

    /// The same map written in the orthonormal complex frame `{y_a}`.
    pub fn orthonormal_matrix(&self) -> CMatrix {
        to_orthonormal(self.kind.frame_signature(), &self.matrix)
    }

    /// `G⁻¹·mᵀ·G`, exact for group elements.
    pub fn inverse(&self) -> Self {
        let g = self.kind.form();
        Self { matrix: &g * self.matrix.transpose() * &g, kind: self.kind }
    }

    pub fn compose(&self, other: &GroupElement) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::Contract(format!("cannot compose {:?} with {:?}", self.kind, other.kind)));
        }
        Ok(Self { matrix: &self.matrix * &other.matrix, kind: self.kind })
    }

    /// Operator ∞-norm (max row sum of moduli).
    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.matrix)
    }

    /// Residual `‖mᵀ·G·m − G‖∞` (absolute).
    pub fn form_residual(&self) -> f64 {
        form_residual(&self.matrix, self.kind)
    }
}

fn form_residual(m: &CMatrix, kind: GroupKind) -> f64 {
    let g = kind.form();
    max_abs(&(m.transpose() * &g * m - &g))
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn norm_inf(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn norm_1(m: &CMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant. The degree is fixed regardless of the norm.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;

    let n = a.nrows();
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { iteration: 0 });
    }
    let norm = norm_1(a);
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a / Complex64::new(2f64.powi(s), 0.0);

    let id = CMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| Complex64::new(B[k], 0.0);

    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9)) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8)) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(Error::Singular)?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { iteration: 0 });
    }
    Ok(r)
}

/// `exp(a) − 1`, by Taylor series for small `a` so that the result keeps
/// its relative accuracy.
pub fn expm_minus_identity(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if norm_1(a) >= 0.5 {
        return Ok(expm(a)? - CMatrix::identity(n, n));
    }
    let mut term = a.clone();
    let mut sum = a.clone();
    for k in 2..30 {
        term = &term * a / Complex64::new(k as f64, 0.0);
        sum += &term;
        if max_abs(&term) <= f64::EPSILON * 1e-2 * max_abs(&sum) {
            break;
        }
    }
    Ok(sum)
}

/// `exp(t·x)` as a group element of `kind` (native frame).
pub fn exp_one_param(x: &CMatrix, t: f64, kind: GroupKind) -> Result<GroupElement> {
    let m = expm(&(x * Complex64::new(t, 0.0)))?;
    GroupElement::new(m, kind)
}

/// `g·θ·g⁻¹`.
pub fn conjugate_involution(theta: &CMatrix, g: &GroupElement) -> Result<CMatrix> {
    let inv = g.matrix().clone().try_inverse().ok_or(Error::Singular)?;
    let r = g.matrix() * theta * inv;
    let n = r.nrows();
    let residual = max_abs(&(&r * &r - CMatrix::identity(n, n)));
    if residual > GROUP_TOL * max_abs(&r).powi(2).max(1.0) {
        return Err(Error::NotInvolution { residual });
    }
    Ok(r)
}

/// One representative per connected component of the group (native frame).
///
/// `O(p,q)` has up to four components, reached by reflecting one spacelike
/// and/or one timelike direction; `O(n,ℂ)` has two.
pub fn component_representatives(kind: GroupKind) -> Vec<CMatrix> {
    let n = kind.n();
    let reflect = |idx: &[usize]| {
        let mut m = CMatrix::identity(n, n);
        for &i in idx {
            m[(i, i)] = -ONE;
        }
        m
    };
    match kind {
        GroupKind::Complex(_) => vec![reflect(&[]), reflect(&[0])],
        GroupKind::Real(sig) => {
            let mut reps = vec![reflect(&[])];
            if sig.p() > 0 {
                reps.push(reflect(&[0]));
            }
            if sig.q() > 0 {
                reps.push(reflect(&[sig.p()]));
            }
            if sig.p() > 0 && sig.q() > 0 {
                reps.push(reflect(&[0, sig.p()]));
            }
            reps
        }
    }
}

/// `Σ cᵢ·Xᵢ`.
pub fn combine(basis: &[CMatrix], coeffs: &[f64], n: usize) -> CMatrix {
    let mut out = CMatrix::from_element(n, n, ZERO);
    for (x, &c) in basis.iter().zip(coeffs) {
        out += x * Complex64::new(c, 0.0);
    }
    out
}

/// A random group element `exp(k)·exp(p)` with coefficients uniform in
/// `[-spread, spread]` on the elementary generators.
pub fn random_element<R: Rng + ?Sized>(kind: GroupKind, rng: &mut R, spread: f64) -> GroupElement {
    let cartan = kind.cartan();
    let n = kind.n();
    let mut draw = |basis: &[CMatrix]| {
        let coeffs: Vec<f64> = basis.iter().map(|_| rng.random_range(-spread..=spread)).collect();
        combine(basis, &coeffs, n)
    };
    let k = draw(&cartan.k_basis);
    let p = draw(&cartan.p_basis);
    let m = expm(&k).expect("finite") * expm(&p).expect("finite");
    GroupElement::new_unchecked(m, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn real(m: &DMatrix<f64>) -> CMatrix {
        m.map(|x| Complex64::new(x, 0.0))
    }

    #[test]
    fn basis_examples() {
        let b = basis_opq(sig(2, 0));
        assert_eq!(b.generators.len(), 1);
        assert_eq!(b.generators[0], DMatrix::from_row_slice(2, 2, &[0., -1., 1., 0.]));

        let b = basis_opq(sig(1, 1));
        assert_eq!(b.generators, vec![DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.])]);

        let b = basis_opq(sig(1, 3));
        assert_eq!(b.generators.len(), 6);
        assert_eq!(b.generators.iter().filter(|x| x.transpose() == **x).count(), 3);
        assert_eq!(b.generators.iter().filter(|x| x.transpose() == -*x).count(), 3);

        assert!(basis_opq(sig(1, 0)).generators.is_empty());
    }

    #[test]
    fn generators_preserve_form() {
        for (p, q) in [(2, 0), (1, 1), (2, 1), (1, 3), (2, 2), (0, 3)] {
            let s = sig(p, q);
            let eta = s.eta_matrix();
            for x in basis_opq(s).generators {
                assert_eq!(x.transpose() * &eta + &eta * &x, DMatrix::zeros(s.n(), s.n()));
            }
        }
    }

    #[test]
    fn cartan_split_sizes() {
        let sizes = |p, q| {
            let c = cartan_decompose(&basis_opq(sig(p, q)));
            (c.k_basis.len(), c.p_basis.len())
        };
        assert_eq!(sizes(2, 0), (1, 0));
        assert_eq!(sizes(1, 1), (0, 1));
        assert_eq!(sizes(2, 2), (2, 4));
        assert_eq!(sizes(3, 1), (3, 3));
    }

    /// Coefficients in an orthogonal elementary basis, plus the residual.
    fn expand(m: &CMatrix, basis: &[CMatrix]) -> f64 {
        let mut rest = m.clone();
        for b in basis {
            let num: Complex64 = b.iter().zip(m.iter()).map(|(x, y)| x.conj() * y).sum();
            let den: f64 = b.iter().map(|x| x.norm_sqr()).sum();
            rest -= b * (num / den);
        }
        max_abs(&rest)
    }

    #[test]
    fn cartan_bracket_relations() {
        for kind in [
            GroupKind::Real(sig(2, 2)),
            GroupKind::Real(sig(3, 1)),
            GroupKind::Real(sig(1, 2)),
            GroupKind::Complex(4),
        ] {
            let c = kind.cartan();
            let br = |a: &CMatrix, b: &CMatrix| a * b - b * a;
            for a in &c.k_basis {
                for b in &c.k_basis {
                    assert!(expand(&br(a, b), &c.k_basis) < 1e-10);
                }
                for b in &c.p_basis {
                    assert!(expand(&br(a, b), &c.p_basis) < 1e-10);
                }
            }
            for a in &c.p_basis {
                for b in &c.p_basis {
                    assert!(expand(&br(a, b), &c.k_basis) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn exp_closed_forms() {
        let rot = real(&basis_opq(sig(2, 0)).generators[0]);
        let g = exp_one_param(&rot, FRAC_PI_2, GroupKind::Real(sig(2, 0))).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO]);
        assert!(max_abs(&(g.matrix() - expected)) < 1e-15);

        let boost = real(&basis_opq(sig(1, 1)).generators[0]);
        for t in [0.3, 1.0, 4.0] {
            let g = exp_one_param(&boost, t, GroupKind::Real(sig(1, 1))).unwrap();
            let (c, s) = (t.cosh(), t.sinh());
            let expected = CMatrix::from_row_slice(2, 2, &[c, s, s, c].map(|x| Complex64::new(x, 0.0)));
            assert!(max_abs(&(g.matrix() - expected)) < 1e-13 * c);
        }

        let g = exp_one_param(&boost, 0.0, GroupKind::Real(sig(1, 1))).unwrap();
        assert_eq!(g.matrix(), &CMatrix::identity(2, 2));
    }

    /// Taylor series with enough terms, as an independent route.
    fn taylor_exp(a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..80 {
            term = &term * a / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn pade_matches_taylor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = CMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)));
            let e = expm(&a).unwrap();
            let t = taylor_exp(&a);
            assert!(max_abs(&(e - &t)) < 1e-11 * max_abs(&t).max(1.0));
        }
    }

    #[test]
    fn expm_minus_identity_is_accurate_for_small_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for scale in [1e-12, 1e-6, 0.3, 2.0] {
            let a = CMatrix::from_fn(3, 3, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale);
            let d = expm_minus_identity(&a).unwrap();
            let a2 = &a * &a;
            let third_order = &a + &a2 / Complex64::new(2.0, 0.0) + &a2 * &a / Complex64::new(6.0, 0.0);
            let reference = if scale < 1e-3 { third_order } else { taylor_exp(&a) - CMatrix::identity(3, 3) };
            assert!(max_abs(&(d - &reference)) < 1e-14 * max_abs(&reference));
        }
    }

    #[test]
    fn exp_preserves_form_for_all_generators() {
        for s in [sig(2, 0), sig(1, 1), sig(2, 1), sig(1, 3), sig(2, 2)] {
            let kind = GroupKind::Real(s);
            for x in basis_opq(s).generators {
                for t in [0.1, 1.0, 5.0] {
                    let g = exp_one_param(&real(&x), t, kind).unwrap();
                    let eta = kind.form();
                    let res = max_abs(&(g.matrix().transpose() * &eta * g.matrix() - &eta));
                    // ‖g‖ reaches cosh(5) ≈ 74 for boosts; rounding grows with ‖g‖².
                    assert!(res < 1e-9 * g.norm_inf().powi(2).max(1.0), "{res}");
                    assert!(res < 1e-9 || t == 5.0);
                }
            }
        }
    }

    #[test]
    fn exp_rejects_non_algebra_and_non_finite() {
        let kind = GroupKind::Real(sig(2, 0));
        let sym = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!(matches!(exp_one_param(&sym, 1.0, kind), Err(Error::NotInGroup { .. })));
        let bad = CMatrix::from_element(2, 2, Complex64::new(f64::NAN, 0.0));
        assert!(matches!(exp_one_param(&bad, 1.0, kind), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn conjugated_involutions() {
        let kind = GroupKind::Real(sig(1, 1));
        let theta = kind.form();
        let id = GroupElement::identity(kind);
        assert_eq!(conjugate_involution(&theta, &id).unwrap(), theta);

        let boost = real(&basis_opq(sig(1, 1)).generators[0]);
        let t = 0.7;
        let g = exp_one_param(&boost, t, kind).unwrap();
        let w = conjugate_involution(&theta, &g).unwrap();
        // g·diag(1,-1)·g⁻¹ = [[cosh 2t, -sinh 2t], [sinh 2t, -cosh 2t]]
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[(2. * t).cosh(), -(2. * t).sinh(), (2. * t).sinh(), -(2. * t).cosh()].map(|x| Complex64::new(x, 0.0)),
        );
        assert!(max_abs(&(&w - expected)) < 1e-13);

        let idm = CMatrix::identity(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_element(GroupKind::Real(sig(2, 1)), &mut rng, 1.0);
        assert!(max_abs(&(conjugate_involution(&idm, &g).unwrap() - &idm)) < 1e-12);
    }

    #[test]
    fn conjugated_involution_keeps_multiplicities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, q) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
            let kind = GroupKind::Real(sig(p, q));
            for _ in 0..50 {
                let g = random_element(kind, &mut rng, 1.0);
                let w = conjugate_involution(&kind.form(), &g).unwrap();
                // W² = 1 fixes eigenvalues to ±1; the trace fixes multiplicities.
                assert!((w.trace().re - (p as f64 - q as f64)).abs() < 1e-9);
                assert!(w.trace().im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn frame_conversion_maps_real_group_into_complex_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = random_element(GroupKind::Real(sig(2, 2)), &mut rng, 1.0);
        let y = g.orthonormal_matrix();
        let res = max_abs(&(y.transpose() * &y - CMatrix::identity(4, 4)));
        assert!(res < 1e-9 * g.norm_inf().powi(2));
        let c = complex_cartan(3);
        for x in &c.p_basis {
            assert_eq!(x.adjoint(), *x);
        }
        for x in &c.k_basis {
            assert_eq!(x.adjoint(), -x);
        }
        // The y-frame image of an o(p,q) boost lies in i·o(n).
        let (_, p) = GroupKind::Real(sig(1, 1)).cartan().orthonormal_frame();
        assert_eq!(p[0], CMatrix::from_row_slice(2, 2, &[ZERO, I, -I, ZERO]));
    }

    #[test]
    fn components_and_inverse() {
        assert_eq!(component_representatives(GroupKind::Real(sig(1, 1))).len(), 4);
        assert_eq!(component_representatives(GroupKind::Real(sig(3, 0))).len(), 2);
        assert_eq!(component_representatives(GroupKind::Complex(3)).len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = random_element(GroupKind::Real(sig(2, 1)), &mut rng, 1.0);
        let prod = g.compose(&g.inverse()).unwrap();
        assert!(max_abs(&(prod.matrix() - CMatrix::identity(3, 3))) < 1e-10);
    }
}
