//! Pointwise curvature data in a pseudo-orthonormal frame: constant
//! curvature blocks, direct sums, Ricci/scalar/Weyl, and a small catalog of
//! example spaces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hol::Signature;
use crate::lie::{GroupElement, GroupKind};
use crate::tensor::{act_group, from_real_frame, to_real_frame, Tensor, Valence};

/// Residual bound for the algebraic Riemann symmetries, relative to
/// `max(1, ‖R‖∞)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Real, fully covariant tensor in the pseudo-orthonormal frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealTensor {
    dim: usize,
    rank: usize,
    data: Vec<f64>,
}

impl RealTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self { dim, rank, data: vec![0.0; dim.pow(rank as u32)] }
    }

    pub fn from_data(dim: usize, rank: usize, data: Vec<f64>) -> Result<Self> {
        let len = dim.pow(rank as u32);
        if data.len() != len {
            return Err(Error::Shape(format!("rank-{rank} tensor in dimension {dim} needs {len} components, got {}", data.len())));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { iteration: 0 });
        }
        Ok(Self { dim, rank, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { dim: self.dim, rank: self.rank, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// All multi-indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let (dim, rank) = (self.dim, self.rank);
        (0..self.data.len()).map(move |mut k| {
            let mut idx = vec![0; rank];
            for slot in (0..rank).rev() {
                idx[slot] = k % dim;
                k /= dim;
            }
            idx
        })
    }

    /// Relabel frame directions: component `idx` moves to `perm[idx]`.
    fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.dim, self.rank);
        for idx in self.indices() {
            let new: Vec<usize> = idx.iter().map(|&i| perm[i]).collect();
            out.set(&new, self.get(&idx));
        }
        out
    }

    /// Embed into a larger frame, sending direction `i` to `map[i]`.
    fn embedded(&self, dim: usize, map: &[usize]) -> Self {
        let mut out = Self::zeros(dim, self.rank);
        for idx in self.indices() {
            let new: Vec<usize> = idx.iter().map(|&i| map[i]).collect();
            out.set(&new, self.get(&idx));
        }
        out
    }
}

/// The frame at the point: always pseudo-orthonormal with `+1` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub signature: Signature,
    pub pseudo_orthonormal: bool,
    pub metric_diag: Vec<f64>,
}

impl MetricPoint {
    pub fn new(signature: Signature) -> Self {
        Self { signature, pseudo_orthonormal: true, metric_diag: signature.eta() }
    }
}

/// Worst violations of the Riemann symmetries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryResidual {
    /// Antisymmetry in each pair and pair exchange.
    pub symmetry: f64,
    pub symmetry_at: [usize; 4],
    /// First Bianchi identity `R_abcd + R_acdb + R_adbc`.
    pub bianchi: f64,
    pub bianchi_at: [usize; 4],
}

pub fn symmetry_residual(r: &RealTensor) -> SymmetryResidual {
    let n = r.dim;
    let mut out = SymmetryResidual { symmetry: 0.0, symmetry_at: [0; 4], bianchi: 0.0, bianchi_at: [0; 4] };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = r.get(&[a, b, c, d]);
                    let sym = (v + r.get(&[b, a, c, d]))
                        .abs()
                        .max((v + r.get(&[a, b, d, c])).abs())
                        .max((v - r.get(&[c, d, a, b])).abs());
                    if sym > out.symmetry {
                        out.symmetry = sym;
                        out.symmetry_at = [a, b, c, d];
                    }
                    let bianchi = (v + r.get(&[a, c, d, b]) + r.get(&[a, d, b, c])).abs();
                    if bianchi > out.bianchi {
                        out.bianchi = bianchi;
                        out.bianchi_at = [a, b, c, d];
                    }
                }
            }
        }
    }
    out
}

/// Metric, Riemann tensor and optional covariant derivatives at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBundle {
    metric: MetricPoint,
    riemann: RealTensor,
    derivatives: Vec<RealTensor>,
    label: Option<String>,
}

impl CurvatureBundle {
    /// Validated constructor: Riemann symmetries and first Bianchi within
    /// [`SYMMETRY_TOL`]; derivative `l` must have rank `5 + l`.
    pub fn new(signature: Signature, riemann: RealTensor, derivatives: Vec<RealTensor>) -> Result<Self> {
        let n = signature.n();
        if riemann.dim != n || riemann.rank != 4 {
            return Err(Error::Curvature(format!(
                "Riemann tensor must be rank 4 in dimension {n}, got rank {} in dimension {}",
                riemann.rank, riemann.dim
            )));
        }
        for (l, d) in derivatives.iter().enumerate() {
            if d.dim != n || d.rank != 5 + l {
                return Err(Error::Curvature(format!(
                    "derivative of order {} must be rank {} in dimension {n}, got rank {} in dimension {}",
                    l + 1,
                    5 + l,
                    d.rank,
                    d.dim
                )));
            }
        }
        let res = symmetry_residual(&riemann);
        let tol = SYMMETRY_TOL * riemann.norm_inf().max(1.0);
        if res.symmetry > tol {
            return Err(Error::Curvature(format!("Riemann symmetry violated by {:.3e} at {:?}", res.symmetry, res.symmetry_at)));
        }
        if res.bianchi > tol {
            return Err(Error::Curvature(format!("first Bianchi identity violated by {:.3e} at {:?}", res.bianchi, res.bianchi_at)));
        }
        Ok(Self { metric: MetricPoint::new(signature), riemann, derivatives, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn flat(signature: Signature) -> Self {
        Self::new(signature, RealTensor::zeros(signature.n(), 4), Vec::new()).expect("zero tensor is valid")
    }

    pub fn signature(&self) -> Signature {
        self.metric.signature
    }

    pub fn dimension(&self) -> usize {
        self.metric.signature.n()
    }

    pub fn metric(&self) -> &MetricPoint {
        &self.metric
    }

    pub fn riemann(&self) -> &RealTensor {
        &self.riemann
    }

    pub fn derivatives(&self) -> &[RealTensor] {
        &self.derivatives
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// The Riemann tensor in the orthonormal complex frame.
    pub fn riemann_tensor(&self) -> Tensor {
        from_real_frame(self.signature(), Valence::covariant(4), &self.riemann.data).expect("shape checked")
    }

    pub fn derivative_tensors(&self) -> Vec<Tensor> {
        self.derivatives
            .iter()
            .map(|d| from_real_frame(self.signature(), Valence::covariant(d.rank), &d.data).expect("shape checked"))
            .collect()
    }

    /// Pull every tensor through `g ∈ O(p,q)`.
    pub fn transformed(&self, g: &GroupElement) -> Result<Self> {
        if g.kind() != GroupKind::Real(self.signature()) {
            return Err(Error::Contract(format!("bundle of signature {} needs an O{} element", self.signature(), self.signature())));
        }
        let sig = self.signature();
        let move_real = |t: &RealTensor| -> Result<RealTensor> {
            let y = from_real_frame(sig, Valence::covariant(t.rank), &t.data)?;
            RealTensor::from_data(t.dim, t.rank, to_real_frame(sig, &act_group(g, &y)?)?)
        };
        Ok(Self {
            metric: self.metric.clone(),
            riemann: move_real(&self.riemann)?,
            derivatives: self.derivatives.iter().map(move_real).collect::<Result<_>>()?,
            label: self.label.clone(),
        })
    }

    /// Scale every curvature tensor by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            metric: self.metric.clone(),
            riemann: self.riemann.scaled(s),
            derivatives: self.derivatives.iter().map(|d| d.scaled(s)).collect(),
            label: self.label.clone(),
        }
    }

    /// The anti-isometry `g ↦ −g`: every covariant curvature tensor changes
    /// sign, the signature flips, and the frame is reordered so the new
    /// `+1` directions (the old `−1` ones) come first.
    pub fn negated_metric(&self) -> Self {
        let sig = self.signature();
        let flipped = sig.flipped();
        let (p, q) = (sig.p(), sig.q());
        let perm: Vec<usize> = (0..sig.n()).map(|a| if a < p { q + a } else { a - p }).collect();
        Self {
            metric: MetricPoint::new(flipped),
            riemann: self.riemann.scaled(-1.0).permuted(&perm),
            derivatives: self.derivatives.iter().map(|d| d.scaled(-1.0).permuted(&perm)).collect(),
            label: self.label.as_ref().map(|l| format!("-({l})")),
        }
    }
}

/// `R_abcd = K(g_ac g_bd − g_ad g_bc)`.
pub fn constant_curvature_block(dim: usize, k: f64, sig: Signature) -> Result<CurvatureBundle> {
    if dim < 2 {
        return Err(Error::Curvature(format!("constant curvature blocks need dimension >= 2, got {dim}")));
    }
    if sig.n() != dim {
        return Err(Error::Dimension { expected: dim, actual: sig.n() });
    }
    let eta = sig.eta();
    let mut r = RealTensor::zeros(dim, 4);
    for a in 0..dim {
        for b in 0..dim {
            if a == b {
                continue;
            }
            let v = k * eta[a] * eta[b];
            r.set(&[a, b, a, b], v);
            r.set(&[a, b, b, a], -v);
        }
    }
    CurvatureBundle::new(sig, r, Vec::new())
}

/// Block-diagonal sum. Directions are reordered to keep `+1` first: the
/// spacelike directions of `a`, then of `b`, then the timelike ones of `a`,
/// then of `b`. Derivative tensors do not survive the sum.
pub fn direct_sum_metric(a: &CurvatureBundle, b: &CurvatureBundle) -> Result<CurvatureBundle> {
    let (sa, sb) = (a.signature(), b.signature());
    let sig = Signature::new(sa.p() + sb.p(), sa.q() + sb.q())?;
    let map_a: Vec<usize> = (0..sa.n()).map(|i| if i < sa.p() { i } else { sig.p() + (i - sa.p()) }).collect();
    let map_b: Vec<usize> =
        (0..sb.n()).map(|i| if i < sb.p() { sa.p() + i } else { sig.p() + sa.q() + (i - sb.p()) }).collect();
    let ra = a.riemann.embedded(sig.n(), &map_a);
    let rb = b.riemann.embedded(sig.n(), &map_b);
    let data = ra.data.iter().zip(&rb.data).map(|(x, y)| x + y).collect();
    let label = match (a.label(), b.label()) {
        (Some(x), Some(y)) => Some(format!("{x} + {y}")),
        _ => None,
    };
    let mut out = CurvatureBundle::new(sig, RealTensor::from_data(sig.n(), 4, data)?, Vec::new())?;
    out.label = label;
    Ok(out)
}

/// Ricci tensor, scalar curvature and (for `n ≥ 3`) the Weyl tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedCurvature {
    pub ricci: RealTensor,
    pub scalar: f64,
    pub weyl: Option<RealTensor>,
}

pub fn derived_curvature(bundle: &CurvatureBundle) -> DerivedCurvature {
    let n = bundle.dimension();
    let eta = bundle.signature().eta();
    let r = &bundle.riemann;
    let mut ricci = RealTensor::zeros(n, 2);
    for b in 0..n {
        for d in 0..n {
            let s: f64 = (0..n).map(|a| eta[a] * r.get(&[a, b, a, d])).sum();
            ricci.set(&[b, d], s);
        }
    }
    let scalar: f64 = (0..n).map(|b| eta[b] * ricci.get(&[b, b])).sum();
    let weyl = (n >= 3).then(|| {
        let g = |a: usize, b: usize| if a == b { eta[a] } else { 0.0 };
        let (c1, c2) = (1.0 / (n as f64 - 2.0), scalar / ((n as f64 - 1.0) * (n as f64 - 2.0)));
        let mut w = RealTensor::zeros(n, 4);
        for idx in r.indices().collect::<Vec<_>>() {
            let [a, b, c, d] = [idx[0], idx[1], idx[2], idx[3]];
            let ric = |x: usize, y: usize| ricci.get(&[x, y]);
            let v = r.get(&idx)
                - c1 * (g(a, c) * ric(b, d) - g(a, d) * ric(b, c) - g(b, c) * ric(a, d) + g(b, d) * ric(a, c))
                + c2 * (g(a, c) * g(b, d) - g(a, d) * g(b, c));
            w.set(&idx, v);
        }
        w
    });
    DerivedCurvature { ricci, scalar, weyl }
}

/// The Weyl tensor as a bundle of the same signature (no derivatives).
pub fn weyl_bundle(bundle: &CurvatureBundle) -> Result<CurvatureBundle> {
    let weyl = derived_curvature(bundle)
        .weyl
        .ok_or_else(|| Error::Curvature(format!("the Weyl tensor needs dimension >= 3, got {}", bundle.dimension())))?;
    let mut out = CurvatureBundle::new(bundle.signature(), weyl, Vec::new())?;
    out.label = bundle.label.as_ref().map(|l| format!("Weyl({l})"));
    Ok(out)
}

/// `R_abcd R^abcd`.
pub fn kretschmann(bundle: &CurvatureBundle) -> f64 {
    let eta = bundle.signature().eta();
    let r = &bundle.riemann;
    r.indices().map(|i| eta[i[0]] * eta[i[1]] * eta[i[2]] * eta[i[3]] * r.get(&i).powi(2)).sum()
}

/// Named example spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogName {
    S2xS2,
    LorentzL,
    NeutralN,
    PpwaveVsi,
    Flat(Signature),
}

pub const CATALOG_NAMES: &str = "s2xs2, lorentz_L, neutral_N, ppwave_vsi, flat, flat(p,q)";

impl FromStr for CatalogName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownCatalog { name: s.to_string(), valid: CATALOG_NAMES.to_string() };
        match s {
            "s2xs2" => Ok(Self::S2xS2),
            "lorentz_L" => Ok(Self::LorentzL),
            "neutral_N" => Ok(Self::NeutralN),
            "ppwave_vsi" => Ok(Self::PpwaveVsi),
            "flat" => Ok(Self::Flat(Signature::riemannian(4)?)),
            _ => {
                let inner = s.strip_prefix("flat(").and_then(|r| r.strip_suffix(')')).ok_or_else(unknown)?;
                let (p, q) = inner.split_once(',').ok_or_else(unknown)?;
                let p = p.trim().parse().map_err(|_| unknown())?;
                let q = q.trim().parse().map_err(|_| unknown())?;
                Ok(Self::Flat(Signature::new(p, q)?))
            }
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::S2xS2 => write!(f, "s2xs2"),
            Self::LorentzL => write!(f, "lorentz_L"),
            Self::NeutralN => write!(f, "neutral_N"),
            Self::PpwaveVsi => write!(f, "ppwave_vsi"),
            Self::Flat(s) => write!(f, "flat({},{})", s.p(), s.q()),
        }
    }
}

fn unit_sphere() -> CurvatureBundle {
    constant_curvature_block(2, 1.0, Signature::riemannian(2).expect("n = 2")).expect("valid block").with_label("S2")
}

/// `dS₂` (equivalently `−AdS₂`): `K = 1` in signature `(1,1)`.
fn de_sitter() -> CurvatureBundle {
    constant_curvature_block(2, 1.0, Signature::new(1, 1).expect("n = 2")).expect("valid block").with_label("dS2")
}

/// `−H²`: the hyperbolic plane with its metric negated, `K = 1` in
/// signature `(0,2)`.
fn negated_hyperbolic() -> CurvatureBundle {
    constant_curvature_block(2, -1.0, Signature::riemannian(2).expect("n = 2"))
        .expect("valid block")
        .with_label("H2")
        .negated_metric()
}

/// Frame `(x, y, z, t)`, null covector `N = dz + dt`:
/// `R = ½ Σ_X s_X (N∧dX)⊗(N∧dX)` with `s_x = 1`, `s_y = −1`. In the null
/// frame `u = (z + t)/√2` this is `R_uxux = 1`, `R_uyuy = −1`.
fn pp_wave() -> CurvatureBundle {
    let n = 4;
    let nul = [0.0, 0.0, 1.0, 1.0];
    let mut r = RealTensor::zeros(n, 4);
    for (x, s) in [(0usize, 1.0), (1usize, -1.0)] {
        let mut dx = [0.0; 4];
        dx[x] = 1.0;
        let w = |a: usize, b: usize| nul[a] * dx[b] - nul[b] * dx[a];
        for idx in r.indices().collect::<Vec<_>>() {
            let v = r.get(&idx) + 0.5 * s * w(idx[0], idx[1]) * w(idx[2], idx[3]);
            r.set(&idx, v);
        }
    }
    CurvatureBundle::new(Signature::new(3, 1).expect("n = 4"), r, Vec::new()).expect("valid pp-wave").with_label("ppwave_vsi")
}

pub fn catalog(name: CatalogName) -> CurvatureBundle {
    let named = |b: Result<CurvatureBundle>| b.expect("catalog entries are valid").with_label(name.to_string());
    match name {
        CatalogName::S2xS2 => named(direct_sum_metric(&unit_sphere(), &unit_sphere())),
        CatalogName::LorentzL => named(direct_sum_metric(&unit_sphere(), &de_sitter())),
        CatalogName::NeutralN => named(direct_sum_metric(&unit_sphere(), &negated_hyperbolic())),
        CatalogName::PpwaveVsi => pp_wave(),
        CatalogName::Flat(sig) => CurvatureBundle::flat(sig).with_label(name.to_string()),
    }
}

pub fn catalog_metric(name: &str) -> Result<CurvatureBundle> {
    Ok(catalog(name.parse()?))
}
