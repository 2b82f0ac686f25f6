//! Command-line front end: read curvature documents, run the classifiers
//! and print JSON reports.
//!
//! Exit codes: 0 for a definite answer, 2 for an indeterminate one, 1 for
//! errors and usage problems.

pub mod document;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use wickgit_core::classify::{classify_purity_with_tol, wick_check_with_tol, Subject, WickRelation, INVARIANT_TOL, SPLIT_TOL};
use wickgit_core::curvature::CurvatureBundle;
use wickgit_core::invariants::{evaluate_invariants, generate_contractions, BundleShape, DEFAULT_DEGREE, VSI_TOL};
use wickgit_core::kempf_ness::{ClosedVerdict, FlowConfig, FlowResult, FlowVerdict};
use wickgit_core::lie::GroupKind;
use wickgit_core::tensor::{to_real_frame, Tensor};
use wickgit_core::{catalog_metric, norm_flow};

pub use document::{emit_document, parse_document, parse_input, InputDocument};

pub const EXIT_DEFINITE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Input(String),
    Core(wickgit_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<wickgit_core::Error> for CliError {
    fn from(e: wickgit_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "wickgit", version, about = "Orbit closure, purity and Wick-rotation checks for curvature tensors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TensorArg {
    Riemann,
    Weyl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GroupArg {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Purity type (RPE/RPM or PE/PM) of the Riemann or Weyl tensor.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "riemann")]
        tensor: TensorArg,
        /// Relative tolerance on the vanishing split part.
        #[arg(long, default_value_t = SPLIT_TOL)]
        tol: f64,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Whether two documents are Wick rotations of each other.
    WickCheck {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Relative per-component tolerance on the invariants.
        #[arg(long, default_value_t = INVARIANT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Polynomial curvature invariants up to a degree.
    Invariants {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        max_degree: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Run the norm-minimizing flow on the Riemann tensor.
    Flow {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "real")]
        group: GroupArg,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Whether all invariants up to a degree vanish.
    Vsi {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        max_degree: usize,
    },
    /// Write a catalog example as an input document.
    Catalog {
        /// s2xs2, lorentz_L, neutral_N, ppwave_vsi, flat or flat(p,q).
        #[arg(long)]
        name: String,
        #[arg(long)]
        emit: PathBuf,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn config_with(seed: u64, max_iter: Option<usize>) -> FlowConfig {
    let mut c = FlowConfig { seed, ..FlowConfig::default() };
    if let Some(m) = max_iter {
        c.max_iter = m;
    }
    c
}

fn config_json(c: &FlowConfig) -> Value {
    serde_json::to_value(c).expect("config serializes")
}

fn real_matrix_json(m: &DMatrix<f64>) -> Value {
    Value::from((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn complex_matrix_json(m: &DMatrix<Complex64>) -> Value {
    Value::from(
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

/// Non-zero components, in the pseudo-orthonormal frame when the tensor
/// lies in the real slice of `kind`, otherwise in the orthonormal frame.
fn tensor_json(t: &Tensor, kind: GroupKind) -> Value {
    let n = t.dimension();
    let rank = t.shape().valence().map_or(0, |v| v.rank());
    let index = |mut k: usize| {
        let mut idx = vec![0; rank];
        for slot in (0..rank).rev() {
            idx[slot] = k % n;
            k /= n;
        }
        idx
    };
    let real = match kind {
        GroupKind::Real(sig) => to_real_frame(sig, t).ok(),
        GroupKind::Complex(_) => None,
    };
    match real {
        Some(values) => json!({
            "frame": "pseudo-orthonormal",
            "entries": values.iter().enumerate().filter(|(_, v)| **v != 0.0)
                .map(|(k, v)| json!({"idx": index(k), "re": v, "im": 0.0})).collect::<Vec<_>>(),
        }),
        None => json!({
            "frame": "orthonormal-complex",
            "entries": t.data().iter().enumerate().filter(|(_, z)| z.norm() != 0.0)
                .map(|(k, z)| json!({"idx": index(k), "re": z.re, "im": z.im})).collect::<Vec<_>>(),
        }),
    }
}

fn flow_json(f: &FlowResult) -> Value {
    json!({
        "verdict": f.verdict,
        "iterations": f.iterations,
        "final_grad_norm": f.final_grad_norm,
        "group_norm": f.group_norm,
        "initial_norm_sqr": f.norms.first(),
        "final_norm_sqr": f.norms.last(),
        "monotone": f.is_monotone(),
        "caveats": f.caveats,
    })
}

fn closure_json(c: &Option<ClosedVerdict>) -> Value {
    match c {
        Some(c) => json!({"closed": c.closed, "caveats": c.caveats, "flow": flow_json(&c.certificate)}),
        None => json!({"closed": null, "indeterminate": true}),
    }
}

fn label(b: &CurvatureBundle) -> Value {
    b.label().map_or(Value::Null, Value::from)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn run(command: Command) -> Result<(i32, String), CliError> {
    match command {
        Command::Classify { input, tensor, tol, max_iter, seed } => {
            let bundle = parse_input(&input)?;
            let config = config_with(seed, max_iter);
            let subject = match tensor {
                TensorArg::Riemann => Subject::Riemann,
                TensorArg::Weyl => Subject::Weyl,
            };
            let r = classify_purity_with_tol(&bundle, subject, &config, tol)?;
            let code = if r.determinate { EXIT_DEFINITE } else { EXIT_INDETERMINATE };
            let report = json!({
                "command": "classify",
                "input": input,
                "label": label(&bundle),
                "signature": bundle.signature(),
                "subject": r.subject,
                "config": config_json(&config),
                "split_tol": tol,
                "determinate": r.determinate,
                "verdict": r.verdict,
                "split_residuals": {"plus": r.split_residuals.0, "minus": r.split_residuals.1},
                "witness_involution": r.witness.as_ref().map(real_matrix_json),
                "flow": flow_json(&r.flow),
                "caveats": r.caveats,
            });
            Ok((code, pretty(&report)))
        }
        Command::WickCheck { a, b, tol, seed } => {
            let (ba, bb) = (parse_input(&a)?, parse_input(&b)?);
            let config = config_with(seed, None);
            let v = wick_check_with_tol(&ba, &bb, &config, tol)?;
            let code = if v.relation == WickRelation::Indeterminate { EXIT_INDETERMINATE } else { EXIT_DEFINITE };
            let report = json!({
                "command": "wick-check",
                "a": a,
                "b": b,
                "labels": [label(&ba), label(&bb)],
                "signatures": [ba.signature(), bb.signature()],
                "config": config_json(&config),
                "invariant_tol": tol,
                "relation": v.relation,
                "invariant_distance": v.invariant_distance,
                "invariant_gap": v.invariant_gap,
                "invariants": v.invariants.iter().map(|i| &i.values).collect::<Vec<_>>(),
                "closure_a": closure_json(&v.closure_a),
                "closure_b": closure_json(&v.closure_b),
                "alignment": v.alignment.as_ref().map(|g| complex_matrix_json(g.matrix())),
                "limits_wick_rotated": v.limits_wick_rotated,
                "caveats": v.caveats,
            });
            Ok((code, pretty(&report)))
        }
        Command::Invariants { input, max_degree, format } => {
            let bundle = parse_input(&input)?;
            let words = generate_contractions(max_degree, BundleShape::of(&bundle))?;
            let v = evaluate_invariants(&bundle, &words)?;
            let out = match format {
                FormatArg::Csv => {
                    let mut s = String::from("label,degree,word,value\n");
                    for (w, x) in words.iter().zip(&v.values) {
                        s.push_str(&format!("{},{},{},{}\n", w.label, w.degree, w.text(), x));
                    }
                    s
                }
                FormatArg::Json => pretty(&json!({
                    "command": "invariants",
                    "input": input,
                    "label": label(&bundle),
                    "max_degree": max_degree,
                    "invariants": words.iter().zip(&v.values).map(|(w, x)| json!({
                        "label": w.label, "degree": w.degree, "word": w.text(), "value": x,
                    })).collect::<Vec<_>>(),
                })),
            };
            Ok((EXIT_DEFINITE, out))
        }
        Command::Flow { input, group, max_iter, seed } => {
            let bundle = parse_input(&input)?;
            let config = config_with(seed, max_iter);
            let kind = match group {
                GroupArg::Real => GroupKind::Real(bundle.signature()),
                GroupArg::Complex => GroupKind::Complex(bundle.dimension()),
            };
            let f = norm_flow(&bundle.riemann_tensor(), kind, &config)?;
            let code = if f.verdict == FlowVerdict::MaxIter { EXIT_INDETERMINATE } else { EXIT_DEFINITE };
            let report = json!({
                "command": "flow",
                "input": input,
                "label": label(&bundle),
                "group": kind,
                "config": config_json(&config),
                "flow": flow_json(&f),
                "minimizer": tensor_json(&f.minimizer, kind),
                "group_element": complex_matrix_json(f.group_element().matrix()),
            });
            Ok((code, pretty(&report)))
        }
        Command::Vsi { input, max_degree } => {
            let bundle = parse_input(&input)?;
            let words = generate_contractions(max_degree, BundleShape::of(&bundle))?;
            let v = evaluate_invariants(&bundle, &words)?;
            let largest = v.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let report = json!({
                "command": "vsi",
                "input": input,
                "label": label(&bundle),
                "max_degree": max_degree,
                "tol": VSI_TOL,
                "vsi": largest < VSI_TOL,
                "largest_invariant": largest,
                "words": words.len(),
            });
            Ok((EXIT_DEFINITE, pretty(&report)))
        }
        Command::Catalog { name, emit } => {
            let bundle = catalog_metric(&name)?;
            std::fs::write(&emit, emit_document(&bundle)).map_err(|e| CliError::Io(format!("{}: {e}", emit.display())))?;
            Ok((EXIT_DEFINITE, pretty(&json!({"command": "catalog", "name": name, "emit": emit}))))
        }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run_command<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_ERROR, stdout: String::new(), stderr: text }
            } else {
                Output { code: EXIT_DEFINITE, stdout: text, stderr: String::new() }
            };
        }
    };
    match run(cli.command) {
        Ok((code, stdout)) => Output { code, stdout, stderr: String::new() },
        Err(e) => Output { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
