//! Serializable solve reports: JSON with a fixed field order and 17
//! significant digits per float, plus a fixed-width text rendering.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use ukrylov_core::{MinresReport, SolveReport, Status, Verdict};

use super::{write_file, Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Entries smaller than this print as `0` in text tables.
const TEXT_ZERO: f64 = 5e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub method: String,
    /// `"compatible"`, `"incompatible"`, or null when the run did not finish.
    pub verdict: Option<String>,
    /// `"converged"` or `"max_iter_reached"`.
    pub status: String,
    pub error: Option<String>,
    pub n: usize,
    pub r: usize,
    pub delta_r: f64,
    /// `||Hx + c||` when compatible, `||H y_r||` when incompatible.
    pub residual_norm: f64,
    /// `||Hx + c||^2` of the reported solution (`x_mr` for minres).
    pub residual_squared: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub certificate: Option<Vec<f64>>,
    pub certificate_unit: Option<Vec<f64>>,
    pub x_mr: Option<Vec<f64>>,
    /// `||x_r - x_mr||` on compatible minres runs.
    pub x_discrepancy: Option<f64>,
    pub residual_history: Vec<f64>,
    pub iterations: IterationData,
    /// Every `(q_k, y_k, delta_k)`; empty when history was not kept.
    pub triples: Vec<TripleRecord>,
    /// `x_0^MR, x_1^MR, ...`; empty unless minres kept history.
    pub x_mr_iterates: Vec<Vec<f64>>,
    pub config: ConfigEcho,
    pub timings: Timings,
}

/// Per-step coefficients; `beta` has one entry fewer than `alpha`, and
/// `q_norm`/`delta` one more.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationData {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub theta: Vec<f64>,
    pub q_norm: Vec<f64>,
    pub delta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleRecord {
    pub k: usize,
    pub q: Vec<f64>,
    pub y: Vec<f64>,
    pub delta: f64,
}

/// Solver settings of the run. Input paths and the `b`/`c` convention are not
/// recorded, so equivalent inputs give identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    /// Null for cg, which has no free scaling.
    pub scaling: Option<String>,
    pub q_tol: f64,
    pub delta_tol: f64,
    pub max_iter: usize,
    pub reorthogonalize: bool,
}

/// Deterministic cost counters in place of wall-clock times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub steps: usize,
    pub operator_applications: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

fn verdict_name(v: Option<Verdict>) -> Option<String> {
    v.map(|v| match v {
        Verdict::Compatible => "compatible".to_string(),
        Verdict::Incompatible => "incompatible".to_string(),
    })
}

fn status_name(s: Status) -> String {
    match s {
        Status::Converged => "converged",
        Status::MaxIterReached => "max_iter_reached",
    }
    .to_string()
}

impl ReportDocument {
    /// Report of a Krylov or cg run (`method` names which).
    pub fn from_solve(method: &str, rep: &SolveReport, config: ConfigEcho) -> Self {
        let n = rep.last_triple().q.len();
        let residual_squared = match rep.verdict {
            Some(Verdict::Compatible) => Some(rep.residual_norm * rep.residual_norm),
            _ => None,
        };
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            method: method.to_string(),
            verdict: verdict_name(rep.verdict),
            status: status_name(rep.status),
            error: None,
            n,
            r: rep.r,
            delta_r: rep.delta_r,
            residual_norm: rep.residual_norm,
            residual_squared,
            x: rep.x.clone(),
            certificate: rep.certificate_y.clone(),
            certificate_unit: rep.certificate_unit.clone(),
            x_mr: None,
            x_discrepancy: None,
            residual_history: Vec::new(),
            iterations: IterationData {
                alpha: rep.trace.alphas.clone(),
                beta: rep.trace.betas.clone(),
                theta: rep.trace.thetas.clone(),
                q_norm: rep.trace.qnorms.clone(),
                delta: rep.trace.deltas.clone(),
            },
            triples: rep
                .history
                .iter()
                .map(|t| TripleRecord {
                    k: t.k,
                    q: t.q.clone(),
                    y: t.y.clone(),
                    delta: t.delta,
                })
                .collect(),
            x_mr_iterates: Vec::new(),
            config,
            timings: Timings {
                steps: rep.trace.steps(),
                operator_applications: rep.operator_applications,
            },
        }
    }

    pub fn from_minres(rep: &MinresReport, config: ConfigEcho) -> Self {
        let mut doc = Self::from_solve("minres", &rep.krylov, config);
        let g = rep.residual_norm();
        doc.residual_squared = Some(g * g);
        doc.x_mr = Some(rep.x_mr.clone());
        doc.x_discrepancy = rep.x_discrepancy;
        doc.residual_history = rep.residual_history.clone();
        doc.x_mr_iterates = rep.iterates.clone();
        doc
    }

    pub fn with_error(mut self, message: impl Into<String>) -> Self {
        self.error = Some(message.into());
        self
    }

    /// Pretty JSON; every float is written as `{:.16e}` so that parsing and
    /// re-serializing reproduces the same bytes.
    pub fn to_json(&self) -> Result<String> {
        self.check_finite()?;
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats::default());
        self.serialize(&mut ser)?;
        buf.push(b'\n');
        Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
    }

    /// JSON has no encoding for NaN or infinities.
    pub fn check_finite(&self) -> Result<()> {
        let scalars = [
            ("delta_r", Some(self.delta_r)),
            ("residual_norm", Some(self.residual_norm)),
            ("residual_squared", self.residual_squared),
            ("x_discrepancy", self.x_discrepancy),
            ("config.q_tol", Some(self.config.q_tol)),
            ("config.delta_tol", Some(self.config.delta_tol)),
        ];
        for (name, v) in scalars {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        let it = &self.iterations;
        let mut vectors: Vec<(String, &[f64])> = vec![
            ("x".into(), self.x.as_deref().unwrap_or(&[])),
            ("certificate".into(), self.certificate.as_deref().unwrap_or(&[])),
            ("certificate_unit".into(), self.certificate_unit.as_deref().unwrap_or(&[])),
            ("x_mr".into(), self.x_mr.as_deref().unwrap_or(&[])),
            ("residual_history".into(), &self.residual_history),
            ("iterations.alpha".into(), &it.alpha),
            ("iterations.beta".into(), &it.beta),
            ("iterations.theta".into(), &it.theta),
            ("iterations.q_norm".into(), &it.q_norm),
            ("iterations.delta".into(), &it.delta),
        ];
        for t in &self.triples {
            vectors.push((format!("triples[{}].q", t.k), &t.q));
            vectors.push((format!("triples[{}].y", t.k), &t.y));
            vectors.push((format!("triples[{}].delta", t.k), core::slice::from_ref(&t.delta)));
        }
        for (k, x) in self.x_mr_iterates.iter().enumerate() {
            vectors.push((format!("x_mr_iterates[{k}]"), x));
        }
        match vectors.into_iter().find(|(_, v)| v.iter().any(|x| !x.is_finite())) {
            Some((name, _)) => Err(Error::NonFinite(name)),
            None => Ok(()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ReportDocument = serde_json::from_str(text)?;
        Ok(doc)
    }

    /// Fixed-width text: 4-decimal tables of `q`, `y` and `x^MR` with one
    /// column per step, and the `delta` sequence on one line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "method = {}", self.method);
        let _ = writeln!(out, "verdict = {}", self.verdict.as_deref().unwrap_or("none"));
        let _ = writeln!(out, "status = {}", self.status);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error = {e}");
        }
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "r = {}", self.r);
        let _ = writeln!(out, "delta_r = {:.6e}", self.delta_r);
        let _ = writeln!(out, "residual_norm = {:.6e}", self.residual_norm);

        if !self.triples.is_empty() {
            out.push('\n');
            let q: Vec<&[f64]> = self.triples.iter().map(|t| t.q.as_slice()).collect();
            let y: Vec<&[f64]> = self.triples.iter().map(|t| t.y.as_slice()).collect();
            table(&mut out, "q", &q);
            table(&mut out, "y", &y);
        }
        let _ = writeln!(out, "delta = {}\n", line(&self.iterations.delta));
        if !self.x_mr_iterates.is_empty() {
            let cols: Vec<&[f64]> = self.x_mr_iterates.iter().map(Vec::as_slice).collect();
            table(&mut out, "xMR", &cols);
        }
        if let Some(x) = &self.x {
            let _ = writeln!(out, "x = {}", line(x));
        }
        if let Some(y) = &self.certificate_unit {
            let _ = writeln!(out, "certificate = {}", line(y));
        }
        if let Some(x) = &self.x_mr {
            let _ = writeln!(out, "x_mr = {}", line(x));
        }
        if let Some(r2) = self.residual_squared {
            let _ = writeln!(out, "residual_squared = {r2:.10e}");
        }
        let _ = writeln!(
            out,
            "steps = {}, operator applications = {}",
            self.timings.steps, self.timings.operator_applications
        );
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Text => Ok(self.to_text()),
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        write_file(path, &self.render(format)?)
    }
}

fn cell(v: f64) -> String {
    if v.abs() < TEXT_ZERO {
        "0".to_string()
    } else {
        format!("{v:.4}")
    }
}

fn line(v: &[f64]) -> String {
    v.iter().map(|x| cell(*x)).collect::<Vec<_>>().join(" ")
}

fn table(out: &mut String, name: &str, cols: &[&[f64]]) {
    let _ = writeln!(out, "{name} =");
    let rows = cols.first().map_or(0, |c| c.len());
    for i in 0..rows {
        for c in cols {
            let _ = write!(out, "{:>10}", cell(c[i]));
        }
        out.push('\n');
    }
    out.push('\n');
}

/// Pretty printing with floats in `{:.16e}` form.
#[derive(Default)]
struct ExactFloats {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
