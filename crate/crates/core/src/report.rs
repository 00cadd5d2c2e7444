//! Run configurations, flat CSV tables and versioned JSON documents.
//!
//! Every table starts with `#` comment lines carrying the schema tag, the
//! config JSON and its SHA-256. Floats print as the shortest string that
//! round-trips, so equal inputs give equal bytes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circle::MultiArcReport;
use crate::content::FreakZero;
use crate::foliation::FoliationSpec;
use crate::harmonics::AdditionReport;
use crate::spectrum::RadialEigenpair;
use crate::verifier::{IntegrandKind, Lambda2, PompeiuReport, Verdict, SIGMA_BAND};

pub const SCHEMA: &str = "isopompeiu/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Everything that determines a run's output. The worker count and the
/// output path are deliberately absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m0: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Command-specific extras (e.g. `alpha_over_pi`).
    #[serde(skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub extra: std::collections::BTreeMap<String, String>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn with_foliation(mut self, spec: &FoliationSpec) -> Self {
        self.n = Some(spec.n);
        self.g = Some(spec.g);
        self.m0 = Some(spec.m0);
        self.m1 = Some(spec.m1);
        self
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

/// Shortest round-trip decimal; scientific outside `[1e-4, 1e15)`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, config: &RunConfig) -> String {
        let mut s = String::new();
        writeln!(s, "# schema: {SCHEMA}").unwrap();
        writeln!(s, "# config: {}", config.canonical_json()).unwrap();
        writeln!(s, "# fingerprint: sha256:{}", config.fingerprint()).unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            writeln!(s, "{}", row.join(",")).unwrap();
        }
        s
    }
}

/// `{"schema", "fingerprint", "config", "result"}`, pretty-printed.
pub fn json_document<T: Serialize>(config: &RunConfig, result: &T) -> String {
    let doc = serde_json::json!({
        "schema": SCHEMA,
        "fingerprint": format!("sha256:{}", config.fingerprint()),
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

fn foliation_cells(spec: &FoliationSpec) -> Vec<String> {
    vec![
        spec.n.to_string(),
        spec.g.to_string(),
        spec.m0.to_string(),
        spec.m1.to_string(),
    ]
}

pub fn spectrum_table(closed: &[f64], solved: &[RadialEigenpair]) -> Table {
    let mut t = Table::new(&["k", "closed_form", "numeric", "rel_error", "residual"]);
    for (e, &c) in solved.iter().zip(closed) {
        let rel = (e.lambda - c).abs() / c.abs().max(1.0);
        t.push(vec![
            e.k.to_string(),
            fmt_float(c),
            fmt_float(e.lambda),
            fmt_float(rel),
            fmt_float(e.residual),
        ]);
    }
    t
}

/// One row per `(zero, contributing k)`.
pub fn freak_table(spec: &FoliationSpec, zeros: &[FreakZero], lambdas: &[f64]) -> Table {
    let mut t = Table::new(&["n", "g", "m0", "m1", "k", "lambda", "t_zero"]);
    for z in zeros {
        for &k in &z.ks {
            let mut row = foliation_cells(spec);
            row.extend([k.to_string(), fmt_float(lambdas[k]), fmt_float(z.t)]);
            t.push(row);
        }
    }
    t
}

/// Verdict of a single cell under the report's rule.
pub fn cell_verdict(kind: IntegrandKind, z: f64) -> Verdict {
    let inside = z.abs() <= SIGMA_BAND;
    match (kind, inside) {
        (IntegrandKind::Control, false) => Verdict::PositiveControlNonzero,
        (IntegrandKind::Control, true) => Verdict::Inconclusive,
        (_, true) => Verdict::FailsPompeiuWitnessed,
        (_, false) => Verdict::Inconclusive,
    }
}

pub fn kind_str(kind: IntegrandKind) -> &'static str {
    match kind {
        IntegrandKind::NonRadial => "nonradial",
        IntegrandKind::Radial => "radial",
        IntegrandKind::Control => "control",
    }
}

pub fn verify_table(reports: &[PompeiuReport]) -> Table {
    let mut t = Table::new(&[
        "n", "g", "m0", "m1", "kind", "t", "degree", "basis", "rotation", "value", "stderr", "z", "verdict",
    ]);
    for r in reports {
        let f = r.foliation;
        for c in &r.cells {
            t.push(vec![
                f.n.to_string(),
                f.g.to_string(),
                f.m0.to_string(),
                f.m1.to_string(),
                kind_str(r.kind).to_string(),
                fmt_float(r.t),
                r.degree.to_string(),
                c.basis_index.to_string(),
                c.rotation_index.to_string(),
                fmt_float(c.estimate.value),
                fmt_float(c.estimate.stderr),
                fmt_float(c.z),
                cell_verdict(r.kind, c.z).to_string(),
            ]);
        }
    }
    t
}

/// Cells that contradict their report's expected outcome.
pub fn failing_cells(reports: &[PompeiuReport]) -> Vec<String> {
    let mut out = Vec::new();
    for r in reports {
        let want = match r.kind {
            IntegrandKind::Control => Verdict::PositiveControlNonzero,
            _ => Verdict::FailsPompeiuWitnessed,
        };
        if r.verdict == want {
            continue;
        }
        for c in &r.cells {
            if cell_verdict(r.kind, c.z) != want || r.kind == IntegrandKind::Control {
                out.push(format!(
                    "{} t={} degree={} basis={} rotation={} value={} stderr={} z={}",
                    kind_str(r.kind),
                    fmt_float(r.t),
                    r.degree,
                    c.basis_index,
                    c.rotation_index,
                    fmt_float(c.estimate.value),
                    fmt_float(c.estimate.stderr),
                    fmt_float(c.z)
                ));
            }
        }
    }
    out
}

pub fn circle_table(reports: &[MultiArcReport]) -> Table {
    let mut t = Table::new(&["k", "l", "t", "c", "integral_cos", "integral_sin"]);
    for r in reports {
        for row in &r.rows {
            t.push(vec![
                r.k.to_string(),
                r.l.to_string(),
                fmt_float(r.t),
                fmt_float(row.c),
                fmt_float(row.cos_integral),
                fmt_float(row.sin_integral),
            ]);
        }
    }
    t
}

pub fn lambda2_table(rows: &[Lambda2]) -> Table {
    let mut t = Table::new(&["r", "s", "lambda2", "bound_ok", "equality"]);
    for l in rows {
        t.push(vec![
            fmt_float(l.r),
            fmt_float(l.s),
            fmt_float(l.lambda2),
            l.bound_ok.to_string(),
            l.equality.to_string(),
        ]);
    }
    t
}

pub fn addition_table(rows: &[AdditionReport]) -> Table {
    let mut t = Table::new(&[
        "n",
        "l",
        "multiplicity",
        "residual_at_y",
        "zonal_residual",
        "basis_independence_residual",
    ]);
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            r.degree.to_string(),
            r.multiplicity.to_string(),
            fmt_float(r.residual_at_y),
            fmt_float(r.zonal_residual),
            fmt_float(r.basis_independence_residual),
        ]);
    }
    t
}

/// Coefficients of `P_k(x) = sum_j a_j x^j`, one row per `(k, j)`.
pub fn polys_table(polys: &[Vec<f64>]) -> Table {
    let mut t = Table::new(&["k", "j", "coefficient"]);
    for (k, p) in polys.iter().enumerate() {
        for (j, &a) in p.iter().enumerate() {
            t.push(vec![k.to_string(), j.to_string(), fmt_float(a)]);
        }
    }
    t
}
