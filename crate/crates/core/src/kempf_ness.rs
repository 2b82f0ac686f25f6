//! Minimal vectors and norm minimization over orbits.
//!
//! The flow minimizes `log H(g·v, g·v)` over the symmetric directions `𝔭`
//! with multiplicative updates `g ← exp(t·ξ)·g`, all in the orthonormal
//! complex frame. A run either settles (the orbit is closed and the end
//! point is a minimal vector), or the accumulated group element blows up
//! while the norm keeps dropping (the orbit is not closed and the end
//! point approximates a vector of the unique closed orbit in its closure).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{self, component_representatives, norm_inf, CMatrix, CartanDecomposition, GroupElement, GroupKind};
use crate::tensor::{act_algebra, act_increment, act_matrix, hermitian_form, tau_split, ExtendedInvolution, Tensor};

const ARMIJO: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 80;
const K_MAX_ITER: usize = 4000;
/// `F/F₀` below which the flow is treated as collapsing to zero. Further
/// progress would need `‖g‖ ≳ ε^{-1/2}`, where rounding dominates.
pub const VANISH_RATIO: f64 = 1e-14;

pub const CAVEAT_HEURISTIC: &str =
    "heuristic: non-closedness inferred from an unbounded group element along a norm-decreasing flow";
pub const CAVEAT_RANK_TWO: &str =
    "n = 2: O(1,1) sits in O(2,C), which is not linearly real reductive; verdict relies on the reductive-setup remark";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub step_init: f64,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub blowup_bound: f64,
    pub seed: u64,
    pub restarts: usize,
    /// Relative distance threshold for [`orbits_intersect`].
    pub dist_tol: f64,
    /// Bound on the Newton displacement `t·‖ξ‖` required for convergence.
    pub step_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step_init: 0.1,
            max_iter: 20_000,
            grad_tol: 1e-10,
            blowup_bound: 1e8,
            seed: 42,
            restarts: 8,
            dist_tol: 1e-6,
            step_tol: 1e-6,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.step_init, self.grad_tol, self.blowup_bound, self.dist_tol, self.step_tol];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) || self.max_iter == 0 {
            return Err(Error::Contract(format!("flow configuration must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowVerdict {
    ConvergedInOrbit,
    BoundaryLimit,
    MaxIter,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub minimizer: Tensor,
    /// Accumulated `g` with `minimizer = g·v`, orthonormal frame.
    pub group_matrix: CMatrix,
    pub kind: GroupKind,
    pub group_norm: f64,
    pub final_grad_norm: f64,
    pub iterations: usize,
    pub verdict: FlowVerdict,
    /// `H(g·v, g·v)` after every accepted step, starting with the input.
    pub norms: Vec<f64>,
    pub caveats: Vec<String>,
}

impl FlowResult {
    /// The accumulated element in the native frame of its group.
    pub fn group_element(&self) -> GroupElement {
        GroupElement::new_unchecked(lie::from_orthonormal(self.kind.frame_signature(), &self.group_matrix), self.kind)
    }

    pub fn is_monotone(&self) -> bool {
        self.norms.windows(2).all(|w| w[1] <= w[0])
    }
}

#[derive(Debug, Clone)]
pub struct ClosedVerdict {
    pub closed: bool,
    pub certificate: FlowResult,
    pub caveats: Vec<String>,
}

fn check_dim(v: &Tensor, kind: GroupKind) -> Result<()> {
    if v.dimension() != kind.n() {
        return Err(Error::Dimension { expected: kind.n(), actual: v.dimension() });
    }
    Ok(())
}

/// `max_x |Re H(x·v₊, v₋)|` over the `𝔭` basis, in the orthonormal frame.
pub fn minimality_residual(v: &Tensor, p_basis: &[CMatrix], tau: &ExtendedInvolution) -> Result<f64> {
    let (plus, minus) = tau_split(v, tau)?;
    let mut worst = 0.0f64;
    for x in p_basis {
        let h = hermitian_form(&act_algebra(x, &plus)?, &minus, tau)?;
        worst = worst.max(h.re.abs());
    }
    Ok(worst)
}

/// Kempf–Ness test with the default gradient tolerance.
pub fn is_minimal(v: &Tensor, decomp: &CartanDecomposition, tau: &ExtendedInvolution) -> Result<bool> {
    is_minimal_with_tol(v, decomp, tau, FlowConfig::default().grad_tol)
}

pub fn is_minimal_with_tol(v: &Tensor, decomp: &CartanDecomposition, tau: &ExtendedInvolution, tol: f64) -> Result<bool> {
    check_dim(v, decomp.group)?;
    let (_, p_basis) = decomp.orthonormal_frame();
    let h = hermitian_form(v, v, tau)?.re;
    Ok(minimality_residual(v, &p_basis, tau)? < tol * (1.0 + h))
}

/// Gradient of `log F` in the `𝔭` coordinates.
fn log_gradient(w: &Tensor, f: f64, p_basis: &[CMatrix]) -> Result<Vec<f64>> {
    p_basis
        .iter()
        .map(|x| {
            let xw = act_algebra(x, w)?;
            let h: Complex64 = xw.data().iter().zip(w.data()).map(|(a, b)| a * b.conj()).sum();
            Ok(2.0 * h.re / f)
        })
        .collect()
}

pub fn norm_flow(v: &Tensor, kind: GroupKind, config: &FlowConfig) -> Result<FlowResult> {
    flow(v, kind, config, false)
}

/// With `escape`, a flattening flow keeps going until rounding stops it,
/// which is how [`orbit_limit`] approaches the limit point.
fn flow(v: &Tensor, kind: GroupKind, config: &FlowConfig, escape: bool) -> Result<FlowResult> {
    check_dim(v, kind)?;
    config.validate()?;
    let n = kind.n();
    let (_, p_basis) = kind.cartan().orthonormal_frame();
    let mut caveats = Vec::new();
    if n == 2 && matches!(kind, GroupKind::Real(s) if !s.is_definite()) {
        caveats.push(CAVEAT_RANK_TWO.to_string());
    }

    let mut w = v.clone();
    let mut g = CMatrix::identity(n, n);
    let mut f = w.norm_sqr();
    let mut norms = vec![f];
    let finish = |w: Tensor, g: CMatrix, grad: f64, iterations: usize, verdict, norms, caveats| FlowResult {
        minimizer: w,
        group_norm: norm_inf(&g),
        group_matrix: g,
        kind,
        final_grad_norm: grad,
        iterations,
        verdict,
        norms,
        caveats,
    };

    if f == 0.0 || p_basis.is_empty() {
        return Ok(finish(w, g, 0.0, 0, FlowVerdict::ConvergedInOrbit, norms, caveats));
    }

    let mut gnorm = f64::INFINITY;
    for iter in 0..config.max_iter {
        let grad = log_gradient(&w, f, &p_basis)?;
        gnorm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !gnorm.is_finite() {
            return Err(Error::NonFinite { iteration: iter });
        }
        let xi = lie::combine(&p_basis, &grad.iter().map(|x| -x).collect::<Vec<_>>(), n);
        let xi_w = act_algebra(&xi, &w)?;
        let curvature = 4.0 * xi_w.norm_sqr();
        let newton = gnorm * gnorm * f / curvature;
        let xi_norm = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        let displacement = newton * xi_norm;
        if gnorm == 0.0 || (gnorm < config.grad_tol && displacement < config.step_tol) {
            return Ok(finish(w, g, gnorm, iter, FlowVerdict::ConvergedInOrbit, norms, caveats));
        }
        if gnorm < config.grad_tol && !escape {
            // The gradient has died out but the quadratic model still asks
            // for a long move: F is flattening towards an infimum at
            // infinity rather than towards a minimum in the orbit.
            caveats.push(CAVEAT_HEURISTIC.to_string());
            return Ok(finish(w, g, gnorm, iter, FlowVerdict::BoundaryLimit, norms, caveats));
        }

        let mut t = if newton.is_finite() && newton > 0.0 { newton } else { config.step_init };
        let slope = gnorm * gnorm * f;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let d = lie::expm_minus_identity(&(&xi * Complex64::new(t, 0.0))).map_err(|_| Error::NonFinite { iteration: iter })?;
            let diff = act_increment(&d, &w)?;
            // F(w + δ) − F(w) = 2 Re⟨δ, w⟩ + ‖δ‖², exact in the increment.
            let cross: f64 = diff.data().iter().zip(w.data()).map(|(a, b)| (a * b.conj()).re).sum();
            let delta_f = 2.0 * cross + diff.norm_sqr();
            if !delta_f.is_finite() {
                return Err(Error::NonFinite { iteration: iter });
            }
            if delta_f <= -ARMIJO * t * slope {
                let step = d + CMatrix::identity(n, n);
                accepted = Some((step, w.add(&diff)?, (f + delta_f).max(0.0)));
                break;
            }
            t *= BACKTRACK;
        }

        let Some((step, w_new, f_new)) = accepted else {
            let verdict = if gnorm < config.grad_tol { FlowVerdict::ConvergedInOrbit } else { FlowVerdict::MaxIter };
            return Ok(finish(w, g, gnorm, iter, verdict, norms, caveats));
        };
        g = step * g;
        w = w_new;
        f = f_new;
        norms.push(f);
        if norm_inf(&g) > config.blowup_bound || f < VANISH_RATIO * norms[0] {
            caveats.push(CAVEAT_HEURISTIC.to_string());
            return Ok(finish(w, g, gnorm, iter + 1, FlowVerdict::BoundaryLimit, norms, caveats));
        }
        if f == 0.0 {
            return Ok(finish(w, g, 0.0, iter + 1, FlowVerdict::ConvergedInOrbit, norms, caveats));
        }
    }
    Ok(finish(w, g, gnorm, config.max_iter, FlowVerdict::MaxIter, norms, caveats))
}

pub fn orbit_closed(v: &Tensor, kind: GroupKind, config: &FlowConfig) -> Result<ClosedVerdict> {
    let flow = norm_flow(v, kind, config)?;
    match flow.verdict {
        FlowVerdict::ConvergedInOrbit => Ok(ClosedVerdict { closed: true, caveats: flow.caveats.clone(), certificate: flow }),
        FlowVerdict::BoundaryLimit => {
            let mut caveats = flow.caveats.clone();
            if !caveats.iter().any(|c| c == CAVEAT_HEURISTIC) {
                caveats.push(CAVEAT_HEURISTIC.to_string());
            }
            Ok(ClosedVerdict { closed: false, certificate: flow, caveats })
        }
        FlowVerdict::MaxIter => Err(Error::Indeterminate { iterations: flow.iterations }),
    }
}

fn collapsed(flow: &FlowResult) -> bool {
    matches!((flow.norms.first(), flow.norms.last()), (Some(&f0), Some(&f)) if f < VANISH_RATIO * f0)
}

/// The limit `α` of a divergent flow, representing the closed orbit in
/// the closure of `G·v`. A flow whose norm collapsed below
/// [`VANISH_RATIO`] yields exact zero; otherwise the flow is pushed on
/// until rounding stops it, entries below `1e-12·‖α‖∞` are zeroed, and
/// the result must pass the minimal-vector test.
pub fn orbit_limit(v: &Tensor, kind: GroupKind, config: &FlowConfig) -> Result<Tensor> {
    let first = norm_flow(v, kind, config)?;
    match first.verdict {
        FlowVerdict::ConvergedInOrbit => {
            return Err(Error::Contract("orbit_limit needs a non-closed orbit; this orbit is closed".into()))
        }
        FlowVerdict::MaxIter => return Err(Error::Indeterminate { iterations: first.iterations }),
        FlowVerdict::BoundaryLimit => {}
    }
    if collapsed(&first) {
        return Ok(Tensor::zeros(v.shape().clone()));
    }
    let last = flow(&first.minimizer, kind, config, true)?;
    if collapsed(&last) || last.minimizer.norm_sqr() < VANISH_RATIO * first.norms[0] {
        return Ok(Tensor::zeros(v.shape().clone()));
    }
    if last.verdict == FlowVerdict::MaxIter {
        return Err(Error::Indeterminate { iterations: last.iterations });
    }
    let alpha = last.minimizer.cleaned(1e-12 * last.minimizer.norm_inf());
    let decomp = kind.cartan();
    let tau = ExtendedInvolution::compact(v.shape().clone());
    if !is_minimal_with_tol(&alpha, &decomp, &tau, config.grad_tol)? {
        return Err(Error::Indeterminate { iterations: first.iterations + last.iterations });
    }
    Ok(alpha)
}

/// Outcome of an orbit-intersection test.
#[derive(Debug, Clone)]
pub struct Intersection {
    pub intersect: bool,
    /// Smallest `H`-distance found between `K·m₁` and `m₂`.
    pub distance: f64,
    pub threshold: f64,
    /// `a` with `a·v₁ ≈ v₂` when the orbits meet (native frame).
    pub alignment: Option<GroupElement>,
    pub flows: [FlowResult; 2],
}

/// Best `k ∈ K` bringing `m1` towards `m2`, by ascent of `Re H(k·m₁, m₂)`
/// over `𝔨` from every component representative and `config.restarts`
/// random starts. Returns the distance and `k` (orthonormal frame).
pub fn k_distance(m1: &Tensor, m2: &Tensor, kind: GroupKind, config: &FlowConfig) -> Result<(f64, CMatrix)> {
    check_dim(m1, kind)?;
    check_dim(m2, kind)?;
    let (k_basis, _) = kind.cartan().orthonormal_frame();
    let n = kind.n();
    let sig = kind.frame_signature();
    let reps: Vec<CMatrix> = component_representatives(kind).iter().map(|r| lie::to_orthonormal(sig, r)).collect();
    let target = 1e-3 * config.dist_tol * (1.0 + m2.norm_sqr().sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut best = (f64::INFINITY, CMatrix::identity(n, n));
    for rep in &reps {
        for start in 0..=config.restarts {
            let k0 = if start == 0 || k_basis.is_empty() {
                rep.clone()
            } else {
                let coeffs: Vec<f64> = k_basis.iter().map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
                lie::expm(&lie::combine(&k_basis, &coeffs, n))? * rep
            };
            let (d, k) = k_descent(m1, m2, &k_basis, k0)?;
            if d < best.0 {
                best = (d, k);
            }
            if best.0 < target {
                return Ok(best);
            }
        }
    }
    Ok(best)
}

fn k_descent(m1: &Tensor, m2: &Tensor, k_basis: &[CMatrix], mut k: CMatrix) -> Result<(f64, CMatrix)> {
    let n = m1.dimension();
    let base = m1.norm_sqr() + m2.norm_sqr();
    let overlap = |t: &Tensor| -> f64 { t.data().iter().zip(m2.data()).map(|(a, b)| (a * b.conj()).re).sum() };
    let dist = |ov: f64| (base - 2.0 * ov).max(0.0).sqrt();

    let mut w = act_matrix(&k, m1)?;
    let mut ov = overlap(&w);
    let mut t = 1.0f64;
    for _ in 0..K_MAX_ITER {
        let grad: Vec<f64> = k_basis.iter().map(|y| Ok(overlap(&act_algebra(y, &w)?))).collect::<Result<_>>()?;
        let gnorm2: f64 = grad.iter().map(|x| x * x).sum();
        if gnorm2.sqrt() <= 1e-14 * base.max(f64::MIN_POSITIVE) {
            break;
        }
        let zeta = lie::combine(k_basis, &grad, n);
        t = (2.0 * t).min(std::f64::consts::PI);
        let mut moved = false;
        for _ in 0..MAX_BACKTRACKS {
            let step = lie::expm(&(&zeta * Complex64::new(t, 0.0)))?;
            let w_new = act_matrix(&step, &w)?;
            let ov_new = overlap(&w_new);
            if ov_new >= ov + ARMIJO * t * gnorm2 {
                k = step * k;
                w = w_new;
                ov = ov_new;
                moved = true;
                break;
            }
            t *= BACKTRACK;
        }
        if !moved {
            break;
        }
    }
    Ok((dist(ov), k))
}

pub fn orbit_intersection(v1: &Tensor, v2: &Tensor, kind: GroupKind, config: &FlowConfig) -> Result<Intersection> {
    if v1.shape() != v2.shape() {
        return Err(Error::Shape(format!("{:?} vs {:?}", v1.shape(), v2.shape())));
    }
    let settle = |v: &Tensor| -> Result<FlowResult> {
        let flow = norm_flow(v, kind, config)?;
        match flow.verdict {
            FlowVerdict::ConvergedInOrbit => Ok(flow),
            FlowVerdict::BoundaryLimit => Err(Error::Contract("orbits_intersect needs closed orbits".into())),
            FlowVerdict::MaxIter => Err(Error::Indeterminate { iterations: flow.iterations }),
        }
    };
    let f1 = settle(v1)?;
    let f2 = settle(v2)?;
    let (m1, m2) = (&f1.minimizer, &f2.minimizer);
    let r1 = m1.norm_sqr().sqrt();
    let r2 = m2.norm_sqr().sqrt();
    let threshold = config.dist_tol * (1.0 + r2);

    // K acts unitarily, so the radii bound the distance from below.
    let (distance, k) = if (r1 - r2).abs() >= threshold {
        ((r1 - r2).abs(), None)
    } else {
        let (d, k) = k_distance(m1, m2, kind, config)?;
        (d, Some(k))
    };
    let intersect = distance < threshold;
    let alignment = match (intersect, k) {
        (true, Some(k)) => {
            let g2_inv = f2.group_element().inverse();
            let a_y = lie::to_orthonormal(kind.frame_signature(), g2_inv.matrix()) * k * &f1.group_matrix;
            Some(GroupElement::new_unchecked(lie::from_orthonormal(kind.frame_signature(), &a_y), kind))
        }
        _ => None,
    };
    Ok(Intersection { intersect, distance, threshold, alignment, flows: [f1, f2] })
}

pub fn orbits_intersect(v1: &Tensor, v2: &Tensor, kind: GroupKind, config: &FlowConfig) -> Result<bool> {
    Ok(orbit_intersection(v1, v2, kind, config)?.intersect)
}
