//! Purity types and Wick-rotation verdicts for curvature data.
//!
//! Both questions are answered at a minimal vector. Minimal vectors of a
//! closed orbit form one orbit of the maximal compact subgroup, which
//! preserves the split by the compact conjugation, so a tensor is purely
//! electric (magnetic) exactly when its minimizer is real (imaginary) in
//! the orthonormal frame.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::curvature::{weyl_bundle, CurvatureBundle};
use crate::error::{Error, Result};
use crate::hol::Signature;
use crate::invariants::{compare, evaluate_invariants, evaluate_on_tensors, generate_contractions, invariant_distance, BundleShape, InvariantVector};
use crate::kempf_ness::{
    norm_flow, orbit_closed, orbit_intersection, orbit_limit, ClosedVerdict, FlowConfig, FlowResult, FlowVerdict, CAVEAT_HEURISTIC,
};
use crate::lie::{self, GroupElement, GroupKind};
use crate::tensor::{extend_involution, real_matrix, tau_split, ExtendedInvolution, Tensor};

/// Relative residual below which a split part counts as zero.
pub const SPLIT_TOL: f64 = 1e-8;
/// Relative per-component tolerance when comparing invariant vectors.
pub const INVARIANT_TOL: f64 = 1e-8;
/// Degree of the invariants compared by [`wick_check`].
pub const WICK_DEGREE: usize = 3;

const CAVEAT_BOUNDARY: &str = "orbit not closed: the minimizer lies outside the orbit, so no purity type is certified";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    Riemann,
    Weyl,
}

impl std::str::FromStr for Subject {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "riemann" => Ok(Subject::Riemann),
            "weyl" => Ok(Subject::Weyl),
            other => Err(Error::Contract(format!("unknown subject `{other}`, expected riemann or weyl"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PurityClass {
    #[serde(rename = "RPE")]
    Rpe,
    #[serde(rename = "RPM")]
    Rpm,
    #[serde(rename = "PE")]
    Pe,
    #[serde(rename = "PM")]
    Pm,
}

impl fmt::Display for PurityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PurityClass::Rpe => "RPE",
            PurityClass::Rpm => "RPM",
            PurityClass::Pe => "PE",
            PurityClass::Pm => "PM",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PurityReport {
    pub subject: Subject,
    pub verdict: BTreeSet<PurityClass>,
    /// False when the flow ran out of iterations.
    pub determinate: bool,
    /// Involution `W` (pseudo-orthonormal frame) with `W·R = ±R`.
    pub witness: Option<DMatrix<f64>>,
    /// `‖X₊‖/‖X‖` and `‖X₋‖/‖X‖` at the minimizer.
    pub split_residuals: (f64, f64),
    pub flow: FlowResult,
    pub caveats: Vec<String>,
}

/// `W = g⁻¹·I_{p,q}·g` for the flow's accumulated `g`, as a real matrix.
fn witness_of(flow: &FlowResult, sig: Signature) -> Result<DMatrix<f64>> {
    let theta = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sig.eta())).map(|x| Complex64::new(x, 0.0));
    let g = flow.group_element();
    let w_e = lie::conjugate_involution(&theta, &g.inverse())?;
    real_matrix(sig, &lie::to_orthonormal(sig, &w_e))
}

/// Checks a witness: `W² = 1`, `η·W` symmetric positive definite, and
/// `W·v = sign·v` within `tol` relative to `‖v‖`.
pub fn validate_witness(w: &DMatrix<f64>, sig: Signature, v: &Tensor, sign: f64, tol: f64) -> Result<()> {
    let n = sig.n();
    let scale = w.amax().max(1.0);
    let square = (w * w - DMatrix::identity(n, n)).amax();
    if square > 1e-8 * scale * scale {
        return Err(Error::NotInvolution { residual: square });
    }
    let ew = sig.eta_matrix() * w;
    let asym = (&ew - ew.transpose()).amax();
    let sym = (&ew + ew.transpose()) * 0.5;
    let positive = sym.symmetric_eigenvalues().iter().all(|&e| e > 0.0);
    if asym > 1e-8 * scale || !positive {
        return Err(Error::Contract("witness is not a Cartan involution of the metric".into()));
    }
    let w_y = lie::to_orthonormal(sig, &w.map(|x| Complex64::new(x, 0.0)));
    let ext = extend_involution(&w_y, v.shape().clone())?;
    let moved = ext.apply(v)?;
    let residual = moved.sub(&v.scale(Complex64::new(sign, 0.0)))?.norm_sqr().sqrt();
    if residual > tol * v.norm_sqr().sqrt().max(1.0) {
        return Err(Error::Contract(format!("witness moves the tensor by {residual:.3e}")));
    }
    Ok(())
}

pub fn classify_purity(bundle: &CurvatureBundle, subject: Subject, config: &FlowConfig) -> Result<PurityReport> {
    classify_purity_with_tol(bundle, subject, config, SPLIT_TOL)
}

/// [`classify_purity`] with a custom relative split tolerance.
pub fn classify_purity_with_tol(bundle: &CurvatureBundle, subject: Subject, config: &FlowConfig, split_tol: f64) -> Result<PurityReport> {
    if !(split_tol.is_finite() && split_tol > 0.0) {
        return Err(Error::Contract(format!("split tolerance must be positive, got {split_tol}")));
    }
    let target = match subject {
        Subject::Riemann => bundle.clone(),
        Subject::Weyl => weyl_bundle(bundle)?,
    };
    let sig = target.signature();
    let v = target.riemann_tensor();
    let kind = GroupKind::Real(sig);
    let flow = norm_flow(&v, kind, config)?;
    let mut caveats = flow.caveats.clone();
    let (electric, magnetic) = match subject {
        Subject::Riemann => (PurityClass::Rpe, PurityClass::Rpm),
        Subject::Weyl => (PurityClass::Pe, PurityClass::Pm),
    };

    let x = &flow.minimizer;
    let size = x.norm_sqr().sqrt();
    let (plus, minus) = tau_split(x, &ExtendedInvolution::compact(x.shape().clone()))?;
    let rel = |t: &Tensor| if size == 0.0 { 0.0 } else { t.norm_sqr().sqrt() / size };
    let split_residuals = (rel(&plus), rel(&minus));

    let mut verdict = BTreeSet::new();
    let mut witness = None;
    let determinate = flow.verdict != FlowVerdict::MaxIter;
    match flow.verdict {
        FlowVerdict::ConvergedInOrbit => {
            if split_residuals.1 < split_tol {
                verdict.insert(electric);
            }
            if split_residuals.0 < split_tol {
                verdict.insert(magnetic);
            }
            if let Some(&class) = verdict.iter().next() {
                let w = witness_of(&flow, sig)?;
                let sign = if class == electric { 1.0 } else { -1.0 };
                validate_witness(&w, sig, &v, sign, split_tol)?;
                witness = Some(w);
            }
        }
        FlowVerdict::BoundaryLimit => {
            if !caveats.iter().any(|c| c == CAVEAT_HEURISTIC) {
                caveats.push(CAVEAT_HEURISTIC.into());
            }
            caveats.push(CAVEAT_BOUNDARY.into());
        }
        FlowVerdict::MaxIter => {}
    }
    Ok(PurityReport { subject, verdict, determinate, witness, split_residuals, flow, caveats })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WickRelation {
    WickRotated,
    NotWickRotated,
    Indeterminate,
}

impl fmt::Display for WickRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WickRelation::WickRotated => "wick-rotated",
            WickRelation::NotWickRotated => "not-wick-rotated",
            WickRelation::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone)]
pub struct WickVerdict {
    pub relation: WickRelation,
    pub invariant_distance: f64,
    /// Worst per-component gap scaled by `1 + max|f|`.
    pub invariant_gap: f64,
    pub invariants: [InvariantVector; 2],
    pub closure_a: Option<ClosedVerdict>,
    pub closure_b: Option<ClosedVerdict>,
    /// `a` in `O(n,ℂ)` (orthonormal frame) with `a·R_a ≈ R_b`.
    pub alignment: Option<GroupElement>,
    /// For non-closed orbits: whether the limit orbits meet.
    pub limits_wick_rotated: Option<bool>,
    pub caveats: Vec<String>,
}

fn closure(v: &Tensor, sig: Signature, config: &FlowConfig) -> Result<Option<ClosedVerdict>> {
    match orbit_closed(v, GroupKind::Real(sig), config) {
        Ok(c) => Ok(Some(c)),
        Err(Error::Indeterminate { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn limits_meet(a: &Tensor, sig_a: Signature, b: &Tensor, sig_b: Signature, config: &FlowConfig) -> Result<Option<bool>> {
    let limit = |v: &Tensor, sig: Signature| match orbit_limit(v, GroupKind::Real(sig), config) {
        // A closed orbit is its own limit.
        Err(Error::Contract(_)) => Ok(Some(v.clone())),
        Err(Error::Indeterminate { .. }) => Ok(None),
        Err(e) => Err(e),
        Ok(l) => Ok(Some(l)),
    };
    let (Some(la), Some(lb)) = (limit(a, sig_a)?, limit(b, sig_b)?) else {
        return Ok(None);
    };
    if la.norm_inf() == 0.0 || lb.norm_inf() == 0.0 {
        return Ok(Some(la.norm_inf() == lb.norm_inf()));
    }
    match orbit_intersection(&la, &lb, GroupKind::Complex(a.dimension()), config) {
        Ok(i) => Ok(Some(i.intersect)),
        Err(Error::Indeterminate { .. } | Error::Contract(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Whether two curvature bundles are Wick rotations of each other at a
/// point, i.e. their Riemann tensors share an `O(n,ℂ)` orbit.
pub fn wick_check(a: &CurvatureBundle, b: &CurvatureBundle, config: &FlowConfig) -> Result<WickVerdict> {
    wick_check_with_tol(a, b, config, INVARIANT_TOL)
}

/// [`wick_check`] with a custom relative invariant tolerance.
pub fn wick_check_with_tol(a: &CurvatureBundle, b: &CurvatureBundle, config: &FlowConfig, invariant_tol: f64) -> Result<WickVerdict> {
    if !(invariant_tol.is_finite() && invariant_tol > 0.0) {
        return Err(Error::Contract(format!("invariant tolerance must be positive, got {invariant_tol}")));
    }
    if a.dimension() != b.dimension() {
        return Err(Error::Dimension { expected: a.dimension(), actual: b.dimension() });
    }
    config.validate()?;
    let n = a.dimension();
    let shape = BundleShape {
        dimension: n,
        derivative_orders: a.derivatives().len().min(b.derivatives().len()),
    };
    let words = generate_contractions(WICK_DEGREE, shape)?;
    let ia = evaluate_invariants(a, &words)?;
    let ib = evaluate_invariants(b, &words)?;
    let distance = invariant_distance(&ia, &ib)?;
    let (same, gap) = compare(&ia, &ib, invariant_tol)?;
    let mut verdict = WickVerdict {
        relation: WickRelation::NotWickRotated,
        invariant_distance: distance,
        invariant_gap: gap,
        invariants: [ia, ib],
        closure_a: None,
        closure_b: None,
        alignment: None,
        limits_wick_rotated: None,
        caveats: Vec::new(),
    };
    if !same {
        return Ok(verdict);
    }

    let (ra, rb) = (a.riemann_tensor(), b.riemann_tensor());
    verdict.closure_a = closure(&ra, a.signature(), config)?;
    verdict.closure_b = closure(&rb, b.signature(), config)?;
    for c in verdict.closure_a.iter().chain(&verdict.closure_b) {
        for cav in &c.caveats {
            if !verdict.caveats.contains(cav) {
                verdict.caveats.push(cav.clone());
            }
        }
    }
    let (Some(ca), Some(cb)) = (&verdict.closure_a, &verdict.closure_b) else {
        verdict.relation = WickRelation::Indeterminate;
        return Ok(verdict);
    };
    if !(ca.closed && cb.closed) {
        verdict.relation = WickRelation::Indeterminate;
        verdict.limits_wick_rotated = limits_meet(&ra, a.signature(), &rb, b.signature(), config)?;
        return Ok(verdict);
    }

    // Both tensors already live in the shared orthonormal frame, where the
    // two real slices and the compact one are the standard compatible
    // triple; the frame-matching map is the identity.
    match orbit_intersection(&ra, &rb, GroupKind::Complex(n), config) {
        Ok(found) => {
            verdict.relation = if found.intersect { WickRelation::WickRotated } else { WickRelation::NotWickRotated };
            verdict.alignment = found.alignment;
        }
        Err(Error::Indeterminate { .. } | Error::Contract(_)) => verdict.relation = WickRelation::Indeterminate,
        Err(e) => return Err(e),
    }
    Ok(verdict)
}

/// Cartan split `R = R₊ + R₋` with respect to an inner Cartan involution.
#[derive(Debug, Clone)]
pub struct CartanSplit {
    pub plus: Tensor,
    pub minus: Tensor,
    /// The involution in the pseudo-orthonormal frame.
    pub witness: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct WickSplit {
    pub a: CartanSplit,
    pub b: CartanSplit,
    /// Worst scaled invariant gap over `(a₊, b₊)` and `(a₋, b₋)`.
    pub cross_gap: f64,
}

fn split_at_minimum(bundle: &CurvatureBundle, config: &FlowConfig) -> Result<CartanSplit> {
    let sig = bundle.signature();
    let flow = norm_flow(&bundle.riemann_tensor(), GroupKind::Real(sig), config)?;
    if flow.verdict != FlowVerdict::ConvergedInOrbit {
        return Err(Error::Contract("Cartan splits need a closed orbit".into()));
    }
    let x = &flow.minimizer;
    let (xp, xm) = tau_split(x, &ExtendedInvolution::compact(x.shape().clone()))?;
    let inv = flow.group_element().inverse();
    let back = lie::to_orthonormal(sig, inv.matrix());
    let witness = witness_of(&flow, sig)?;
    Ok(CartanSplit {
        plus: crate::tensor::act_matrix(&back, &xp)?,
        minus: crate::tensor::act_matrix(&back, &xm)?,
        witness,
    })
}

/// Cartan splits of two Wick-rotated Riemann tensors with paired parts:
/// `a₊` is Wick-rotated to `b₊` and `a₋` to `b₋`.
pub fn wick_split(a: &CurvatureBundle, b: &CurvatureBundle, config: &FlowConfig) -> Result<WickSplit> {
    let check = wick_check(a, b, config)?;
    if check.relation != WickRelation::WickRotated {
        return Err(Error::Contract(format!("wick_split needs wick-rotated inputs, got {}", check.relation)));
    }
    let sa = split_at_minimum(a, config)?;
    let sb = split_at_minimum(b, config)?;
    let words = generate_contractions(WICK_DEGREE, BundleShape { dimension: a.dimension(), derivative_orders: 0 })?;
    let mut cross_gap = 0.0f64;
    for (x, y) in [(&sa.plus, &sb.plus), (&sa.minus, &sb.minus)] {
        let (ok, gap) = compare(&evaluate_on_tensors(x, &[], &words)?, &evaluate_on_tensors(y, &[], &words)?, INVARIANT_TOL)?;
        cross_gap = cross_gap.max(gap);
        if !ok {
            return Err(Error::Contract(format!("split parts are not paired: invariant gap {gap:.3e}")));
        }
    }
    Ok(WickSplit { a: sa, b: sb, cross_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{catalog_metric, CatalogName};
    use crate::lie::random_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> FlowConfig {
        FlowConfig::default()
    }

    fn boosted(name: &str, seed: u64) -> CurvatureBundle {
        let b = catalog_metric(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_element(GroupKind::Real(b.signature()), &mut rng, 0.8);
        b.transformed(&g).unwrap()
    }

    #[test]
    fn riemannian_is_electric() {
        let r = classify_purity(&catalog_metric("s2xs2").unwrap(), Subject::Riemann, &cfg()).unwrap();
        assert_eq!(r.verdict, BTreeSet::from([PurityClass::Rpe]));
        assert_eq!(r.witness.unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn catalog_purity_after_boosts() {
        for name in ["lorentz_L", "neutral_N"] {
            let b = boosted(name, 3);
            let r = classify_purity(&b, Subject::Riemann, &cfg()).unwrap();
            assert!(r.flow.is_monotone());
            assert_eq!(r.verdict, BTreeSet::from([PurityClass::Rpe]), "{name}: {:?}", r.split_residuals);
            assert!(r.witness.unwrap() != DMatrix::identity(4, 4));
        }
    }

    #[test]
    fn flat_is_both() {
        let r = classify_purity(&catalog_metric("flat(2,2)").unwrap(), Subject::Riemann, &cfg()).unwrap();
        assert_eq!(r.verdict, BTreeSet::from([PurityClass::Rpe, PurityClass::Rpm]));
    }

    #[test]
    fn weyl_subject() {
        let r = classify_purity(&catalog_metric("lorentz_L").unwrap(), Subject::Weyl, &cfg()).unwrap();
        assert!(r.verdict.contains(&PurityClass::Pe));
        let small = crate::curvature::CurvatureBundle::flat(Signature::new(1, 1).unwrap());
        assert!(matches!(classify_purity(&small, Subject::Weyl, &cfg()), Err(Error::Curvature(_))));
    }

    #[test]
    fn ppwave_has_no_purity_type() {
        let r = classify_purity(&catalog_metric("ppwave_vsi").unwrap(), Subject::Riemann, &cfg()).unwrap();
        assert!(r.verdict.is_empty());
        assert_eq!(r.flow.verdict, FlowVerdict::BoundaryLimit);
        assert!(r.caveats.iter().any(|c| c == CAVEAT_BOUNDARY));
    }

    #[test]
    fn wick_examples() {
        let s = catalog_metric("s2xs2").unwrap();
        let v = wick_check(&s, &catalog_metric("lorentz_L").unwrap(), &cfg()).unwrap();
        assert_eq!(v.relation, WickRelation::WickRotated);
        assert!(v.alignment.is_some());

        let v = wick_check(&s, &catalog_metric("flat").unwrap(), &cfg()).unwrap();
        assert_eq!(v.relation, WickRelation::NotWickRotated);
        assert!((v.invariant_distance - 4.0).abs() < 1e-10);

        let v = wick_check(&s, &s, &cfg()).unwrap();
        assert_eq!(v.relation, WickRelation::WickRotated);
        let a = v.alignment.unwrap();
        assert!(lie::norm_inf(&(a.matrix() - lie::CMatrix::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn wick_after_boost_aligns() {
        let s = catalog_metric("s2xs2").unwrap();
        let n = boosted("neutral_N", 11);
        let v = wick_check(&s, &n, &cfg()).unwrap();
        assert_eq!(v.relation, WickRelation::WickRotated);
        let a = v.alignment.unwrap();
        let moved = crate::tensor::act_matrix(a.matrix(), &s.riemann_tensor()).unwrap();
        let gap = moved.sub(&n.riemann_tensor()).unwrap().norm_inf();
        assert!(gap < 1e-5, "{gap}");
    }

    #[test]
    fn wick_non_closed_is_indeterminate() {
        let p = catalog_metric("ppwave_vsi").unwrap();
        let flat = catalog_metric("flat(3,1)").unwrap();
        let v = wick_check(&p, &p, &cfg()).unwrap();
        assert_eq!(v.relation, WickRelation::Indeterminate);
        assert_eq!(v.limits_wick_rotated, Some(true));
        let v = wick_check(&p, &flat, &cfg()).unwrap();
        assert_eq!(v.relation, WickRelation::Indeterminate);
        assert_eq!(v.limits_wick_rotated, Some(true));
    }

    #[test]
    fn dimension_mismatch() {
        let a = catalog_metric("s2xs2").unwrap();
        let b = crate::curvature::catalog(CatalogName::Flat(Signature::new(2, 1).unwrap()));
        assert!(matches!(wick_check(&a, &b, &cfg()), Err(Error::Dimension { .. })));
    }

    #[test]
    fn splits() {
        let s = catalog_metric("s2xs2").unwrap();
        let l = boosted("lorentz_L", 5);
        let w = wick_split(&s, &l, &cfg()).unwrap();
        assert_eq!(w.a.minus.norm_inf(), 0.0);
        assert!(w.b.minus.norm_inf() < 1e-8);
        let back = w.b.plus.add(&w.b.minus).unwrap().sub(&l.riemann_tensor()).unwrap();
        assert!(back.norm_inf() < 1e-12 * 1e3);

        let same = wick_split(&l, &l, &cfg()).unwrap();
        assert_eq!(same.a.plus, same.b.plus);
        let flat = catalog_metric("flat").unwrap();
        assert!(matches!(wick_split(&s, &flat, &cfg()), Err(Error::Contract(_))));
    }
}
