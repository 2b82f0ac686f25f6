//! Polynomial curvature invariants built as full contractions.
//!
//! A contraction of `d` Riemann factors pairs up their `4d` slots. Up to
//! the slot symmetries (antisymmetry within each index pair, exchange of
//! the two pairs, reordering of factors) a contraction is determined, up to
//! sign, by the multigraph it induces on the `2d` index pairs. Words are
//! enumerated as such multigraphs in canonical form; graphs with a loop
//! (a trace over an antisymmetric pair) and graphs admitting a symmetry
//! that reverses the sign of the contraction vanish identically and are
//! dropped.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::CurvatureBundle;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const MAX_DEGREE: usize = 4;
pub const DEFAULT_DEGREE: usize = 3;
/// Default threshold for [`is_vsi`].
pub const VSI_TOL: f64 = 1e-10;
/// Imaginary residue allowed in an evaluation, relative to the sum of
/// absolute values of its terms.
pub const IMAG_TOL: f64 = 1e-12;

/// A factor of a contraction word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Riemann,
    /// `∇⁽ˡ⁾Riem`, rank `4 + l`.
    Derivative(usize),
}

impl Factor {
    pub fn rank(&self) -> usize {
        match self {
            Factor::Riemann => 4,
            Factor::Derivative(l) => 4 + l,
        }
    }

    fn symbol(&self) -> String {
        match self {
            Factor::Riemann => "R".into(),
            Factor::Derivative(l) => format!("D{l}R"),
        }
    }
}

/// A full contraction: factors in order, and a perfect matching on their
/// concatenated slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionWord {
    pub degree: usize,
    pub factors: Vec<Factor>,
    pub pairing: Vec<(usize, usize)>,
    pub label: String,
}

impl ContractionWord {
    /// Index notation, one letter per contracted pair, e.g. `R_{abab}`.
    pub fn text(&self) -> String {
        let total: usize = self.factors.iter().map(Factor::rank).sum();
        let mut letter = vec![' '; total];
        for (k, &(a, b)) in self.pairing.iter().enumerate() {
            let c = char::from_u32('a' as u32 + k as u32).unwrap_or('?');
            letter[a] = c;
            letter[b] = c;
        }
        let mut out = String::new();
        let mut start = 0;
        for f in &self.factors {
            let idx: String = letter[start..start + f.rank()].iter().collect();
            out.push_str(&format!("{}_{{{}}}", f.symbol(), idx));
            start += f.rank();
        }
        out
    }
}

impl fmt::Display for ContractionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.text())
    }
}

/// What a bundle offers to contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundleShape {
    pub dimension: usize,
    /// Number of covariant derivative tensors (orders `1..=count`).
    pub derivative_orders: usize,
}

impl BundleShape {
    pub fn of(bundle: &CurvatureBundle) -> Self {
        Self { dimension: bundle.dimension(), derivative_orders: bundle.derivatives().len() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantVector {
    pub values: Vec<f64>,
    pub words: Vec<ContractionWord>,
}

/// Multigraph on `2d` pair-nodes as upper-triangle edge counts.
type Graph = Vec<u8>;
/// Canonical graph, name and standard pairing of a named word.
type NamedGraph = (Graph, &'static str, Vec<(usize, usize)>);

fn tri_index(nodes: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    i * nodes - i * (i + 1) / 2 + (j - i - 1)
}

/// All loopless multigraphs with every node of degree 2.
fn two_regular_graphs(nodes: usize) -> Vec<Graph> {
    fn rec(nodes: usize, deg: &mut Vec<u8>, g: &mut Graph, prev: (usize, usize), out: &mut Vec<Graph>) {
        let Some(i) = (0..nodes).find(|&i| deg[i] < 2) else {
            out.push(g.clone());
            return;
        };
        let start = if prev.0 == i { prev.1 } else { i + 1 };
        for j in start..nodes {
            if deg[j] < 2 {
                deg[i] += 1;
                deg[j] += 1;
                g[tri_index(nodes, i, j)] += 1;
                rec(nodes, deg, g, (i, j), out);
                g[tri_index(nodes, i, j)] -= 1;
                deg[i] -= 1;
                deg[j] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(nodes, &mut vec![0; nodes], &mut vec![0; nodes * (nodes - 1) / 2], (usize::MAX, 0), &mut out);
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Node relabelings from factor permutations and pair exchanges.
fn node_symmetries(degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for perm in permutations(degree) {
        for flips in 0..1usize << degree {
            let map = (0..2 * degree)
                .map(|node| {
                    let (f, half) = (node / 2, node % 2);
                    let half = half ^ ((flips >> f) & 1);
                    2 * perm[f] + half
                })
                .collect();
            out.push(map);
        }
    }
    out
}

/// Pack the relabeled edge counts (each 0..=2) into a sortable key.
fn relabel_key(g: &Graph, nodes: usize, map: &[usize]) -> u64 {
    let mut counts = [0u8; 28];
    for i in 0..nodes {
        for j in i + 1..nodes {
            let c = g[tri_index(nodes, i, j)];
            if c > 0 {
                let (a, b) = (map[i].min(map[j]), map[i].max(map[j]));
                counts[tri_index(nodes, a, b)] += c;
            }
        }
    }
    counts[..g.len()].iter().fold(0u64, |k, &c| (k << 2) | c as u64)
}

fn canonical(g: &Graph, nodes: usize, syms: &[Vec<usize>]) -> Graph {
    let key = syms.iter().map(|m| relabel_key(g, nodes, m)).min().expect("identity present");
    let len = g.len();
    (0..len).map(|t| ((key >> (2 * (len - 1 - t))) & 3) as u8).collect()
}

/// Pairing of slots realizing `g`: edges in order take the next free
/// slot of each endpoint (node `2f` is slots `4f, 4f+1`, node `2f+1` is
/// `4f+2, 4f+3`).
fn pairing_of(g: &Graph, nodes: usize) -> Vec<(usize, usize)> {
    let mut used = vec![0usize; nodes];
    let mut pairs = Vec::new();
    for i in 0..nodes {
        for j in i + 1..nodes {
            for _ in 0..g[tri_index(nodes, i, j)] {
                let a = 2 * i + used[i];
                let b = 2 * j + used[j];
                used[i] += 1;
                used[j] += 1;
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// The 8 slot symmetries of one Riemann factor with their signs.
fn factor_symmetries() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::new();
    for exchange in [false, true] {
        for s1 in [false, true] {
            for s2 in [false, true] {
                let mut p = [0, 1, 2, 3];
                if s1 {
                    p.swap(0, 1);
                }
                if s2 {
                    p.swap(2, 3);
                }
                if exchange {
                    p = [p[2], p[3], p[0], p[1]];
                }
                let sign = if s1 ^ s2 { -1.0 } else { 1.0 };
                out.push((p, sign));
            }
        }
    }
    out
}

/// Whether some slot symmetry maps the pairing to itself with sign −1.
fn vanishes_by_symmetry(pairing: &[(usize, usize)], degree: usize) -> bool {
    let slots = 4 * degree;
    let mut partner = vec![0usize; slots];
    for &(a, b) in pairing {
        partner[a] = b;
        partner[b] = a;
    }
    let local = factor_symmetries();
    let perms = permutations(degree);
    let mut choice = vec![0usize; degree];
    loop {
        let sign: f64 = choice.iter().map(|&c| local[c].1).product();
        if sign < 0.0 {
            for perm in &perms {
                let sigma = |s: usize| 4 * perm[s / 4] + local[choice[s / 4]].0[s % 4];
                if pairing.iter().all(|&(a, b)| partner[sigma(a)] == sigma(b)) {
                    return true;
                }
            }
        }
        let mut k = 0;
        loop {
            if k == degree {
                return false;
            }
            choice[k] += 1;
            if choice[k] < local.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn normalize(mut pairs: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    for p in &mut pairs {
        if p.0 > p.1 {
            *p = (p.1, p.0);
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Standard forms used for the well-known words.
fn named_words() -> Vec<(&'static str, Vec<(usize, usize)>)> {
    vec![
        ("scalar curvature", vec![(0, 2), (1, 3)]),
        ("scalar curvature squared", vec![(0, 2), (1, 3), (4, 6), (5, 7)]),
        ("Ricci squared", vec![(0, 2), (1, 5), (3, 7), (4, 6)]),
        ("Kretschmann", vec![(0, 4), (1, 5), (2, 6), (3, 7)]),
    ]
}

fn graph_of(pairs: &[(usize, usize)], nodes: usize) -> Graph {
    let mut g = vec![0; nodes * (nodes - 1) / 2];
    for &(a, b) in pairs {
        let (u, v) = ((a / 2).min(b / 2), (a / 2).max(b / 2));
        g[tri_index(nodes, u, v)] += 1;
    }
    g
}

/// Riemann-only words of exactly `degree` factors, in canonical order.
fn riemann_words(degree: usize) -> &'static [ContractionWord] {
    static CACHE: [OnceLock<Vec<ContractionWord>>; MAX_DEGREE] = [const { OnceLock::new() }; MAX_DEGREE];
    CACHE[degree - 1].get_or_init(|| {
        let nodes = 2 * degree;
        let syms = node_symmetries(degree);
        let classes: BTreeSet<Graph> =
            two_regular_graphs(nodes).iter().map(|g| canonical(g, nodes, &syms)).collect();
        let names: Vec<NamedGraph> = named_words()
            .into_iter()
            .filter(|(_, p)| p.len() == 2 * degree)
            .map(|(name, p)| (canonical(&graph_of(&p, nodes), nodes, &syms), name, p))
            .collect();
        let mut words = Vec::new();
        for g in classes {
            let (label, pairing) = match names.iter().find(|(h, _, _)| *h == g) {
                Some((_, name, p)) => (name.to_string(), p.clone()),
                None => (String::new(), pairing_of(&g, nodes)),
            };
            let pairing = normalize(pairing);
            if vanishes_by_symmetry(&pairing, degree) {
                continue;
            }
            let label = if label.is_empty() { format!("Riemann degree {degree} #{}", words.len() + 1) } else { label };
            words.push(ContractionWord { degree, factors: vec![Factor::Riemann; degree], pairing, label });
        }
        words
    })
}

/// Words for `∇⁽ˡ⁾Riem`: the double trace `(a c)(b d)` with the derivative
/// slots traced in consecutive pairs when the valence is even, and the
/// full norm `∇⁽ˡ⁾R · ∇⁽ˡ⁾R`.
fn derivative_words(order: usize) -> Vec<ContractionWord> {
    let f = Factor::Derivative(order);
    let rank = f.rank();
    let mut out = Vec::new();
    if rank.is_multiple_of(2) {
        let mut pairing = vec![(0, 2), (1, 3)];
        pairing.extend((4..rank).step_by(2).map(|s| (s, s + 1)));
        out.push(ContractionWord { degree: 1, factors: vec![f], pairing, label: format!("derivative order {order} trace") });
    }
    out.push(ContractionWord {
        degree: 2,
        factors: vec![f, f],
        pairing: (0..rank).map(|s| (s, s + rank)).collect(),
        label: format!("derivative order {order} norm"),
    });
    out
}

pub fn generate_contractions(max_degree: usize, shape: BundleShape) -> Result<Vec<ContractionWord>> {
    if max_degree == 0 || max_degree > MAX_DEGREE {
        return Err(Error::Degree { requested: max_degree, max: MAX_DEGREE });
    }
    let mut words: Vec<ContractionWord> = (1..=max_degree).flat_map(|d| riemann_words(d).iter().cloned()).collect();
    for order in 1..=shape.derivative_orders {
        words.extend(derivative_words(order));
    }
    Ok(words)
}

/// Full contraction of `word` over the orthonormal-frame tensors
/// `factors[i]` (for [`Factor::Riemann`] use index 0, derivatives `l`).
fn evaluate_word(word: &ContractionWord, riemann: &Tensor, derivatives: &[Tensor]) -> Result<Complex64> {
    let n = riemann.dimension();
    let tensors: Vec<&Tensor> = word
        .factors
        .iter()
        .map(|f| match f {
            Factor::Riemann => Ok(riemann),
            Factor::Derivative(l) => derivatives
                .get(l - 1)
                .ok_or_else(|| Error::Shape(format!("word `{}` needs a derivative of order {l}", word.label))),
        })
        .collect::<Result<_>>()?;
    for (t, f) in tensors.iter().zip(&word.factors) {
        let ok = t.shape().valence().is_some_and(|v| v.rank() == f.rank()) && t.dimension() == n;
        if !ok {
            return Err(Error::Shape(format!("factor {:?} does not match its tensor", f)));
        }
    }
    let total: usize = word.factors.iter().map(Factor::rank).sum();
    let mut edge_of = vec![0usize; total];
    for (k, &(a, b)) in word.pairing.iter().enumerate() {
        edge_of[a] = k;
        edge_of[b] = k;
    }
    // Per factor: stride of each edge in the flat offset.
    let mut strides: Vec<Vec<usize>> = Vec::new();
    let mut start = 0;
    for f in &word.factors {
        let r = f.rank();
        let mut s = vec![0usize; word.pairing.len()];
        for slot in 0..r {
            s[edge_of[start + slot]] += n.pow((r - slot - 1) as u32);
        }
        strides.push(s);
        start += r;
    }
    let edges = word.pairing.len();
    let mut idx = vec![0usize; edges];
    let mut offsets = vec![0usize; tensors.len()];
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    loop {
        let mut term = Complex64::new(1.0, 0.0);
        for (t, &o) in tensors.iter().zip(&offsets) {
            term *= t.data()[o];
            if term.re == 0.0 && term.im == 0.0 {
                break;
            }
        }
        sum += term;
        abs_sum += term.norm();
        let mut k = 0;
        loop {
            if k == edges {
                if sum.im.abs() > IMAG_TOL * abs_sum.max(1.0) {
                    return Err(Error::NonReal { imag: sum.im });
                }
                return Ok(sum);
            }
            idx[k] += 1;
            for (o, s) in offsets.iter_mut().zip(&strides) {
                *o += s[k];
            }
            if idx[k] < n {
                break;
            }
            for (o, s) in offsets.iter_mut().zip(&strides) {
                *o -= n * s[k];
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Evaluate words on orthonormal-frame tensors directly.
pub fn evaluate_on_tensors(riemann: &Tensor, derivatives: &[Tensor], words: &[ContractionWord]) -> Result<InvariantVector> {
    let values = words
        .par_iter()
        .map(|w| evaluate_word(w, riemann, derivatives).map(|z| z.re))
        .collect::<Result<Vec<f64>>>()?;
    Ok(InvariantVector { values, words: words.to_vec() })
}

pub fn evaluate_invariants(bundle: &CurvatureBundle, words: &[ContractionWord]) -> Result<InvariantVector> {
    evaluate_on_tensors(&bundle.riemann_tensor(), &bundle.derivative_tensors(), words)
}

pub fn is_vsi(bundle: &CurvatureBundle, max_degree: usize, tol: f64) -> Result<bool> {
    let words = generate_contractions(max_degree, BundleShape::of(bundle))?;
    let v = evaluate_invariants(bundle, &words)?;
    Ok(v.values.iter().all(|x| x.abs() < tol))
}

/// Whether two invariant vectors agree component by component within
/// `rel_tol·(1 + max|f|)`, with the worst scaled gap.
pub fn compare(a: &InvariantVector, b: &InvariantVector, rel_tol: f64) -> Result<(bool, f64)> {
    if a.words != b.words {
        return Err(Error::Shape("invariant vectors were generated from different word lists".into()));
    }
    let mut worst = 0.0f64;
    let mut ok = true;
    for (x, y) in a.values.iter().zip(&b.values) {
        let gap = (x - y).abs();
        let scale = 1.0 + x.abs().max(y.abs());
        ok &= gap <= rel_tol * scale;
        worst = worst.max(gap / scale);
    }
    Ok((ok, worst))
}

/// `max_w |f_w(a) − f_w(b)|^{1/deg w}`: a distance on the same scale as
/// the curvature itself.
pub fn invariant_distance(a: &InvariantVector, b: &InvariantVector) -> Result<f64> {
    if a.words != b.words {
        return Err(Error::Shape("invariant vectors were generated from different word lists".into()));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .zip(&a.words)
        .map(|((x, y), w)| (x - y).abs().powf(1.0 / w.degree as f64))
        .fold(0.0, f64::max))
}
