//! Complexified tensor spaces over an `n`-dimensional frame, the group and
//! Lie-algebra actions, and the bilinear and Hermitian forms on them.
//!
//! Components are stored densely in the orthonormal complex frame `{y_a}`,
//! with the first slot most significant. A real-slice tensor of signature
//! `(p,q)` picks up a factor `i` (covariant) or `-i` (contravariant) for
//! each index in the last `q` directions; see [`from_real_frame`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hol::Signature;
use crate::lie::{CMatrix, GroupElement};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance on `base² = 1` for [`extend_involution`].
pub const INVOLUTION_TOL: f64 = 1e-10;

/// Numbers of contravariant and covariant slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Valence {
    pub contravariant: usize,
    pub covariant: usize,
}

impl Valence {
    pub const fn new(contravariant: usize, covariant: usize) -> Self {
        Self { contravariant, covariant }
    }

    pub const fn covariant(m: usize) -> Self {
        Self { contravariant: 0, covariant: m }
    }

    pub fn rank(&self) -> usize {
        self.contravariant + self.covariant
    }

    pub fn len(&self, n: usize) -> usize {
        n.pow(self.rank() as u32)
    }

    pub fn is_contravariant_slot(&self, slot: usize) -> bool {
        slot < self.contravariant
    }
}

/// A single tensor power, or an ordered direct sum of several.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorShape {
    dimension: usize,
    blocks: Vec<Valence>,
}

impl TensorShape {
    pub fn new(dimension: usize, contravariant: usize, covariant: usize) -> Self {
        Self { dimension, blocks: vec![Valence::new(contravariant, covariant)] }
    }

    pub fn direct_sum(dimension: usize, blocks: Vec<Valence>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Shape("direct sum needs at least one block".into()));
        }
        Ok(Self { dimension, blocks })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn blocks(&self) -> &[Valence] {
        &self.blocks
    }

    /// Valence of a single-block shape.
    pub fn valence(&self) -> Option<Valence> {
        match self.blocks.as_slice() {
            [v] => Some(*v),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.len(self.dimension)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(valence, start offset)` per block.
    fn block_ranges(&self) -> impl Iterator<Item = (Valence, std::ops::Range<usize>)> + '_ {
        let n = self.dimension;
        self.blocks.iter().scan(0usize, move |start, b| {
            let s = *start;
            *start += b.len(n);
            Some((*b, s..*start))
        })
    }
}

/// Dense complex tensor in the orthonormal complex frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: TensorShape,
    data: Vec<Complex64>,
}

impl Tensor {
    pub fn zeros(shape: TensorShape) -> Self {
        let len = shape.len();
        Self { shape, data: vec![ZERO; len] }
    }

    pub fn from_data(shape: TensorShape, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::Shape(format!("expected {} components, got {}", shape.len(), data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { iteration: 0 });
        }
        Ok(Self { shape, data })
    }

    /// Vector in `ℂⁿ` (valence (1,0)).
    pub fn vector(v: &[Complex64]) -> Self {
        Self { shape: TensorShape::new(v.len(), 1, 0), data: v.to_vec() }
    }

    /// The decomposable `y_{i₁} ⊗ … ⊗ y_{i_r}` in a single-block shape.
    pub fn basis(shape: TensorShape, index: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(shape);
        let pos = t.offset(index)?;
        t.data[pos] = Complex64::new(1.0, 0.0);
        Ok(t)
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        self.shape.dimension
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    fn offset(&self, index: &[usize]) -> Result<usize> {
        let v = self.shape.valence().ok_or_else(|| Error::Shape("multi-index access needs a single block".into()))?;
        if index.len() != v.rank() {
            return Err(Error::Shape(format!("index of length {} for rank {}", index.len(), v.rank())));
        }
        let n = self.shape.dimension;
        index.iter().try_fold(0usize, |acc, &i| {
            if i >= n {
                Err(Error::Dimension { expected: n, actual: i + 1 })
            } else {
                Ok(acc * n + i)
            }
        })
    }

    pub fn get(&self, index: &[usize]) -> Result<Complex64> {
        Ok(self.data[self.offset(index)?])
    }

    pub fn set(&mut self, index: &[usize], value: Complex64) -> Result<()> {
        let pos = self.offset(index)?;
        self.data[pos] = value;
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { shape: self.shape.clone(), data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn add(&self, other: &Tensor) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Tensor, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_same_shape(self, other)?;
        Ok(Self { shape: self.shape.clone(), data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() })
    }

    /// Largest component modulus.
    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `H(v,v)` for the compact conjugation: `Σ |v_I|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Zero every component below `threshold` in modulus.
    pub fn cleaned(&self, threshold: f64) -> Self {
        self.map(|z| if z.norm() < threshold { ZERO } else { z })
    }
}

fn check_same_shape(u: &Tensor, v: &Tensor) -> Result<()> {
    if u.shape != v.shape {
        return Err(Error::Shape(format!("{:?} vs {:?}", u.shape, v.shape)));
    }
    Ok(())
}

fn check_matrix(m: &CMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension { expected: n, actual: m.nrows() });
    }
    Ok(())
}

/// Apply `a` to one slot of a rank-`rank` block stored in `src`.
fn apply_slot(src: &[Complex64], n: usize, rank: usize, slot: usize, a: &CMatrix) -> Vec<Complex64> {
    let inner = n.pow((rank - slot - 1) as u32);
    let outer = src.len() / (n * inner);
    let mut out = vec![ZERO; src.len()];
    for o in 0..outer {
        let base = o * n * inner;
        for i in 0..n {
            for j in 0..n {
                let c = a[(i, j)];
                if c == ZERO {
                    continue;
                }
                let (dst, from) = (base + i * inner, base + j * inner);
                for r in 0..inner {
                    out[dst + r] += c * src[from + r];
                }
            }
        }
    }
    out
}

/// Every contravariant slot by `contra`, every covariant slot by `co`.
fn act_slotwise(v: &Tensor, contra: &CMatrix, co: &CMatrix) -> Tensor {
    let n = v.shape.dimension;
    let mut data = Vec::with_capacity(v.data.len());
    for (val, range) in v.shape.block_ranges() {
        let mut block = v.data[range].to_vec();
        for slot in 0..val.rank() {
            let m = if val.is_contravariant_slot(slot) { contra } else { co };
            block = apply_slot(&block, n, val.rank(), slot, m);
        }
        data.extend(block);
    }
    Tensor { shape: v.shape.clone(), data }
}

/// `g·v`: contravariant slots by `g`, covariant slots by `g⁻ᵀ`, both in
/// the orthonormal frame where `g⁻ᵀ = g`.
pub fn act_group(g: &GroupElement, v: &Tensor) -> Result<Tensor> {
    if g.n() != v.dimension() {
        return Err(Error::Dimension { expected: v.dimension(), actual: g.n() });
    }
    let m = g.orthonormal_matrix();
    Ok(act_slotwise(v, &m, &m))
}

/// `(1+d)·v − v` for the slotwise action of `1 + d` on every slot,
/// accumulated slot by slot so that the increment keeps its relative
/// accuracy when `d` is small. For complex-orthogonal `1 + d` this is the
/// increment of [`act_group`].
pub fn act_increment(d: &CMatrix, v: &Tensor) -> Result<Tensor> {
    let n = v.dimension();
    check_matrix(d, n)?;
    let mut diff = vec![ZERO; v.data.len()];
    for (val, range) in v.shape.block_ranges() {
        let mut cur = v.data[range.clone()].to_vec();
        for slot in 0..val.rank() {
            let delta = apply_slot(&cur, n, val.rank(), slot, d);
            for ((c, acc), x) in cur.iter_mut().zip(&mut diff[range.clone()]).zip(delta) {
                *c += x;
                *acc += x;
            }
        }
    }
    Ok(Tensor { shape: v.shape.clone(), data: diff })
}

/// Slotwise action of an arbitrary matrix given in the orthonormal frame,
/// with covariant slots transformed by its inverse transpose.
pub fn act_matrix(m: &CMatrix, v: &Tensor) -> Result<Tensor> {
    check_matrix(m, v.dimension())?;
    let inv_t = m.clone().try_inverse().ok_or(Error::Singular)?.transpose();
    Ok(act_slotwise(v, m, &inv_t))
}

/// Differential action `x·v` (Leibniz rule) for `x` in the orthonormal
/// frame: `x` on contravariant slots, `-xᵀ` on covariant ones.
pub fn act_algebra(x: &CMatrix, v: &Tensor) -> Result<Tensor> {
    let n = v.dimension();
    check_matrix(x, n)?;
    let neg_t = -x.transpose();
    let mut data = vec![ZERO; v.data.len()];
    for (val, range) in v.shape.block_ranges() {
        let block = &v.data[range.clone()];
        for slot in 0..val.rank() {
            let m = if val.is_contravariant_slot(slot) { x } else { &neg_t };
            let term = apply_slot(block, n, val.rank(), slot, m);
            for (d, t) in data[range.clone()].iter_mut().zip(term) {
                *d += t;
            }
        }
    }
    Ok(Tensor { shape: v.shape.clone(), data })
}

/// Bilinear extension of the metric: `Σ u_I·v_I` in the orthonormal frame.
pub fn tensor_inner_product(u: &Tensor, v: &Tensor) -> Result<Complex64> {
    check_same_shape(u, v)?;
    Ok(u.data.iter().zip(&v.data).map(|(a, b)| a * b).sum())
}

/// An involution of `ℂⁿ` extended slotwise to a tensor shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedInvolution {
    base: CMatrix,
    shape: TensorShape,
}

impl ExtendedInvolution {
    /// The compact-slice conjugation: plain complex conjugation in the
    /// orthonormal frame.
    pub fn compact(shape: TensorShape) -> Self {
        let n = shape.dimension;
        Self { base: CMatrix::identity(n, n), shape }
    }

    pub fn base(&self) -> &CMatrix {
        &self.base
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    fn check(&self, v: &Tensor) -> Result<()> {
        if v.shape != self.shape {
            return Err(Error::Shape(format!("involution for {:?} applied to {:?}", self.shape, v.shape)));
        }
        Ok(())
    }

    /// Complex-linear slotwise action: `base` on vectors, `∘base` on
    /// covectors.
    pub fn apply(&self, v: &Tensor) -> Result<Tensor> {
        self.check(v)?;
        Ok(act_slotwise(v, &self.base, &self.base.transpose()))
    }

    /// The anti-linear map `v ↦ base·conj(v)`.
    pub fn conjugate(&self, v: &Tensor) -> Result<Tensor> {
        self.apply(&v.conj())
    }
}

pub fn extend_involution(base: &CMatrix, shape: TensorShape) -> Result<ExtendedInvolution> {
    let n = shape.dimension;
    check_matrix(base, n)?;
    let residual = (base * base - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = base.iter().map(|z| z.norm_sqr()).fold(1.0, f64::max);
    if residual > INVOLUTION_TOL * scale {
        return Err(Error::NotInvolution { residual });
    }
    Ok(ExtendedInvolution { base: base.clone(), shape })
}

/// `(v + Tv)/2, (v − Tv)/2` for the linear involution `T`.
pub fn cartan_split(v: &Tensor, t: &ExtendedInvolution) -> Result<(Tensor, Tensor)> {
    split_with(v, &t.apply(v)?)
}

/// Split by the anti-linear conjugation `τ`: the real and imaginary
/// directions of the slice fixed by `τ`.
pub fn tau_split(v: &Tensor, tau: &ExtendedInvolution) -> Result<(Tensor, Tensor)> {
    split_with(v, &tau.conjugate(v)?)
}

fn split_with(v: &Tensor, tv: &Tensor) -> Result<(Tensor, Tensor)> {
    let half = Complex64::new(0.5, 0.0);
    let plus = v.add(tv)?.scale(half);
    // v₋ = v − v₊ keeps v₊ + v₋ = v exact.
    let minus = v.sub(&plus)?;
    Ok((plus, minus))
}

/// `H(u,v) = ⟨u, τ(v)⟩`.
pub fn hermitian_form(u: &Tensor, v: &Tensor, tau: &ExtendedInvolution) -> Result<Complex64> {
    tensor_inner_product(u, &tau.conjugate(v)?)
}

/// Frame factor of one component: each contravariant index `a` divides
/// by `s_a`, each covariant index multiplies by `s_a`.
fn component_factors(sig: Signature, valence: Valence) -> Vec<Complex64> {
    let n = sig.n();
    let rank = valence.rank();
    let mut out = Vec::with_capacity(valence.len(n));
    let mut idx = vec![0usize; rank];
    for _ in 0..valence.len(n) {
        let mut f = Complex64::new(1.0, 0.0);
        for (slot, &a) in idx.iter().enumerate() {
            let s = sig.frame_factor(a);
            f = if valence.is_contravariant_slot(slot) { f / s } else { f * s };
        }
        out.push(f);
        for slot in (0..rank).rev() {
            idx[slot] += 1;
            if idx[slot] < n {
                break;
            }
            idx[slot] = 0;
        }
    }
    out
}

/// Embed real pseudo-orthonormal components into the orthonormal complex
/// frame.
pub fn from_real_frame(sig: Signature, valence: Valence, components: &[f64]) -> Result<Tensor> {
    let shape = TensorShape::new(sig.n(), valence.contravariant, valence.covariant);
    if components.len() != shape.len() {
        return Err(Error::Shape(format!("expected {} components, got {}", shape.len(), components.len())));
    }
    let data = component_factors(sig, valence).into_iter().zip(components).map(|(f, &c)| f * c).collect();
    Tensor::from_data(shape, data)
}

/// Inverse of [`from_real_frame`]. Fails if the tensor is not in the real
/// slice of `sig` (imaginary residue above `1e-9` relative).
pub fn to_real_frame(sig: Signature, t: &Tensor) -> Result<Vec<f64>> {
    let valence = t.shape.valence().ok_or_else(|| Error::Shape("real frame conversion needs a single block".into()))?;
    if t.dimension() != sig.n() {
        return Err(Error::Dimension { expected: sig.n(), actual: t.dimension() });
    }
    let tol = 1e-9 * t.norm_inf().max(1.0);
    let mut out = Vec::with_capacity(t.data.len());
    for (f, z) in component_factors(sig, valence).into_iter().zip(&t.data) {
        let r = z / f;
        if r.im.abs() > tol {
            return Err(Error::NonReal { imag: r.im });
        }
        out.push(r.re);
    }
    Ok(out)
}

/// The real matrix of an orthonormal-frame map in the pseudo-orthonormal
/// frame, rejecting non-real results.
pub fn real_matrix(sig: Signature, m_y: &CMatrix) -> Result<DMatrix<f64>> {
    let e = crate::lie::from_orthonormal(sig, m_y);
    let tol = 1e-9 * e.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if let Some(z) = e.iter().find(|z| z.im.abs() > tol) {
        return Err(Error::NonReal { imag: z.im });
    }
    Ok(e.map(|z| z.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{basis_opq, exp_one_param, random_element, GroupKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_tensor(shape: TensorShape, rng: &mut ChaCha8Rng) -> Tensor {
        let data = (0..shape.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        Tensor::from_data(shape, data).unwrap()
    }

    fn max_diff(a: &Tensor, b: &Tensor) -> f64 {
        a.sub(b).unwrap().norm_inf()
    }

    #[test]
    fn group_action_examples() {
        let s2 = Signature::riemannian(2).unwrap();
        let v = Tensor::vector(&[ONE, ZERO]);
        let id = GroupElement::identity(GroupKind::Real(s2));
        assert_eq!(act_group(&id, &v).unwrap(), v);

        let rot = basis_opq(s2).generators[0].map(c);
        let g = exp_one_param(&rot, FRAC_PI_2, GroupKind::Real(s2)).unwrap();
        assert!(max_diff(&act_group(&g, &v).unwrap(), &Tensor::vector(&[ZERO, ONE])) < 1e-15);

        let shape = TensorShape::new(2, 2, 0);
        let y11 = Tensor::basis(shape.clone(), &[0, 0]).unwrap();
        let swap = GroupElement::new(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]), GroupKind::Complex(2)).unwrap();
        assert_eq!(act_group(&swap, &y11).unwrap(), Tensor::basis(shape, &[1, 1]).unwrap());
    }

    #[test]
    fn algebra_action_examples() {
        let shape = TensorShape::new(2, 2, 0);
        let y11 = Tensor::basis(shape.clone(), &[0, 0]).unwrap();
        assert_eq!(act_algebra(&CMatrix::zeros(2, 2), &y11).unwrap(), Tensor::zeros(shape.clone()));

        // x(y₁) = y₂
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO]);
        let v1 = act_algebra(&x, &Tensor::vector(&[ONE, ZERO])).unwrap();
        assert_eq!(v1, Tensor::vector(&[ZERO, ONE]));
        let expected = Tensor::basis(shape.clone(), &[1, 0]).unwrap().add(&Tensor::basis(shape, &[0, 1]).unwrap()).unwrap();
        assert_eq!(act_algebra(&x, &y11).unwrap(), expected);
    }

    #[test]
    fn inner_product_examples() {
        let shape = TensorShape::new(2, 2, 0);
        let y12 = Tensor::basis(shape, &[0, 1]).unwrap();
        assert_eq!(tensor_inner_product(&y12, &y12).unwrap(), ONE);
        let u = Tensor::vector(&[I, ZERO]);
        assert_eq!(tensor_inner_product(&u, &u).unwrap(), -ONE);
    }

    #[test]
    fn hermitian_examples() {
        let tau = ExtendedInvolution::compact(TensorShape::new(2, 1, 0));
        let v = Tensor::vector(&[I, ZERO]);
        assert_eq!(hermitian_form(&v, &v, &tau).unwrap(), ONE);
        let v = Tensor::vector(&[ONE, I]);
        assert_eq!(hermitian_form(&v, &v, &tau).unwrap(), c(2.0));
        let shape = TensorShape::new(2, 2, 0);
        let y12 = Tensor::basis(shape.clone(), &[0, 1]).unwrap();
        assert_eq!(hermitian_form(&y12, &y12, &ExtendedInvolution::compact(shape)).unwrap(), ONE);
    }

    #[test]
    fn extension_examples() {
        let shape = TensorShape::new(2, 2, 0);
        let theta = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, -ONE]));
        let t = extend_involution(&theta, shape.clone()).unwrap();
        let y12 = Tensor::basis(shape.clone(), &[0, 1]).unwrap();
        let y22 = Tensor::basis(shape.clone(), &[1, 1]).unwrap();
        assert_eq!(t.apply(&y12).unwrap(), y12.scale(-ONE));
        assert_eq!(t.apply(&y22).unwrap(), y22);

        let id = extend_involution(&CMatrix::identity(2, 2), shape.clone()).unwrap();
        assert_eq!(id.apply(&y12).unwrap(), y12);

        let not_inv = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(extend_involution(&not_inv, shape.clone()), Err(Error::NotInvolution { .. })));

        let y11 = Tensor::basis(shape, &[0, 0]).unwrap();
        let v = y11.add(&y12).unwrap();
        let (plus, minus) = cartan_split(&v, &t).unwrap();
        assert_eq!(plus, y11);
        assert_eq!(minus, y12);
        let (plus, minus) = cartan_split(&y22, &t).unwrap();
        assert_eq!((plus, minus.norm_inf()), (y22, 0.0));
    }

    #[test]
    fn extension_is_involutive_and_commutes_with_fixed_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sig = Signature::new(2, 2).unwrap();
        let shape = TensorShape::new(4, 1, 3);
        let theta = sig.eta_matrix().map(c);
        let t = extend_involution(&theta, shape.clone()).unwrap();
        let kind = GroupKind::Real(sig);
        let k_basis = kind.cartan().k_basis;
        for _ in 0..10 {
            let v = random_tensor(shape.clone(), &mut rng);
            assert!(max_diff(&t.apply(&t.apply(&v).unwrap()).unwrap(), &v) < 1e-10);
            let coeffs: Vec<f64> = k_basis.iter().map(|_| rng.random_range(-2.0..2.0)).collect();
            let k = GroupElement::new(crate::lie::expm(&crate::lie::combine(&k_basis, &coeffs, 4)).unwrap(), kind).unwrap();
            let lhs = t.apply(&act_group(&k, &v).unwrap()).unwrap();
            let rhs = act_group(&k, &t.apply(&v).unwrap()).unwrap();
            assert!(max_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn equivariance_and_form_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in [GroupKind::Real(Signature::new(2, 1).unwrap()), GroupKind::Complex(3)] {
            let shape = TensorShape::new(3, 1, 2);
            for _ in 0..20 {
                let g = random_element(kind, &mut rng, 0.7);
                let h = random_element(kind, &mut rng, 0.7);
                let u = random_tensor(shape.clone(), &mut rng);
                let v = random_tensor(shape.clone(), &mut rng);
                let gh = g.compose(&h).unwrap();
                let lhs = act_group(&g, &act_group(&h, &v).unwrap()).unwrap();
                let rhs = act_group(&gh, &v).unwrap();
                assert!(max_diff(&lhs, &rhs) < 1e-9 * rhs.norm_inf().max(1.0));
                let before = tensor_inner_product(&u, &v).unwrap();
                let after = tensor_inner_product(&act_group(&g, &u).unwrap(), &act_group(&g, &v).unwrap()).unwrap();
                assert!((before - after).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn algebra_action_is_derivative_of_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sig = Signature::new(1, 2).unwrap();
        let kind = GroupKind::Real(sig);
        let shape = TensorShape::new(3, 2, 2);
        let v = random_tensor(shape, &mut rng);
        for x in basis_opq(sig).generators {
            let xe = x.map(c);
            let xy = crate::lie::to_orthonormal(sig, &xe);
            let eps = 1e-6;
            let fwd = act_group(&exp_one_param(&xe, eps, kind).unwrap(), &v).unwrap();
            let back = act_group(&exp_one_param(&xe, -eps, kind).unwrap(), &v).unwrap();
            let fd = fwd.sub(&back).unwrap().scale(c(0.5 / eps));
            assert!(max_diff(&fd, &act_algebra(&xy, &v).unwrap()) < 1e-7);
        }
    }

    #[test]
    fn real_frame_round_trip() {
        let sig = Signature::new(1, 1).unwrap();
        let comps = [1.0, 2.0, 3.0, 4.0];
        let t = from_real_frame(sig, Valence::covariant(2), &comps).unwrap();
        assert_eq!(t.data(), &[c(1.0), 2.0 * I, 3.0 * I, c(-4.0)]);
        assert_eq!(to_real_frame(sig, &t).unwrap(), comps.to_vec());
        let bad = t.scale(I);
        assert!(matches!(to_real_frame(sig, &bad), Err(Error::NonReal { .. })));
    }

    #[test]
    fn direct_sum_blocks_act_independently() {
        let shape = TensorShape::direct_sum(2, vec![Valence::new(1, 0), Valence::covariant(2)]).unwrap();
        let mut data = vec![ZERO; shape.len()];
        data[0] = ONE;
        data[2] = ONE;
        let v = Tensor::from_data(shape, data).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO]);
        let out = act_algebra(&x, &v).unwrap();
        assert_eq!(out.data()[1], ONE);
        // covector slots get -xᵀ = x here: y¹⊗y¹ ↦ y²⊗y¹ + y¹⊗y²
        assert_eq!(&out.data()[2..], &[ZERO, ONE, ONE, ZERO]);
    }

    #[test]
    fn hermitian_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let shape = TensorShape::new(3, 0, 4);
        let tau = ExtendedInvolution::compact(shape.clone());
        for _ in 0..20 {
            let v = random_tensor(shape.clone(), &mut rng);
            let h = hermitian_form(&v, &v, &tau).unwrap();
            assert!(h.re > 0.0 && h.im.abs() < 1e-12);
        }
        let zero = Tensor::zeros(shape);
        assert_eq!(hermitian_form(&zero, &zero, &tau).unwrap(), ZERO);
    }
}
