//! The versioned codebook file format and report serialization.
//!
//! A file is the line `codebookfile/1`, then `key=value` header lines, a
//! blank line, and N body rows. Exponent rows hold K integers; complex rows
//! hold 2K decimals (re, im interleaved) at 12 places. The `digest` header
//! is the SHA-256 of every other byte of the file, in order.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::AnalysisReport;
use crate::constructions::{Codebook, Construction};
use crate::cyclo::root_of_unity;
use crate::error::{Error, Result};
use crate::tower::{Level, TowerCtx, TowerParams};

pub const FORMAT_VERSION: &str = "codebookfile/1";

/// Decimal places used by the complex body form.
pub const COMPLEX_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BodyForm {
    Exponent,
    Complex,
}

impl std::str::FromStr for BodyForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponent" => Ok(BodyForm::Exponent),
            "complex" => Ok(BodyForm::Complex),
            other => Err(Error::Format(format!("unknown body form {other:?}"))),
        }
    }
}

impl std::fmt::Display for BodyForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BodyForm::Exponent => "exponent",
            BodyForm::Complex => "complex",
        })
    }
}

/// Field representation data recorded in a file header, enough to rebuild
/// the tower and check that it matches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldHeader {
    pub moduli: [Vec<u32>; 3],
    pub primitives: [u32; 3],
}

const LEVELS: [(Level, &str); 3] = [(Level::R, "r"), (Level::Q, "q"), (Level::Q2, "q2")];

impl FieldHeader {
    pub fn of(tower: &TowerCtx) -> Self {
        FieldHeader {
            moduli: LEVELS.map(|(l, _)| tower.field(l).modulus().to_vec()),
            primitives: LEVELS.map(|(l, _)| tower.field(l).primitive().0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodebookFile {
    pub form: BodyForm,
    pub fields: FieldHeader,
    pub codebook: Codebook,
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn header_lines(cb: &Codebook, fields: &FieldHeader, form: BodyForm) -> Vec<String> {
    let p = cb.params();
    let mut lines = vec![
        FORMAT_VERSION.to_string(),
        format!("construction={}", cb.construction()),
        format!("p={}", p.p),
        format!("t={}", p.t),
        format!("s={}", p.s),
        format!("N={}", cb.n()),
        format!("K={}", cb.k()),
    ];
    for (i, (_, name)) in LEVELS.iter().enumerate() {
        lines.push(format!("modulus_{name}={}", join(&fields.moduli[i])));
    }
    for (i, (_, name)) in LEVELS.iter().enumerate() {
        lines.push(format!("primitive_{name}={}", fields.primitives[i]));
    }
    lines.push(format!("root_order={}", cb.root_order()));
    lines.push(format!("form={form}"));
    lines
}

/// Fixed-point decimal with negative zero folded to zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.COMPLEX_DIGITS$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn render_body(cb: &Codebook, form: BodyForm) -> String {
    let mut out = String::with_capacity(cb.n() * cb.k() * 4);
    for i in 0..cb.n() {
        match form {
            BodyForm::Exponent => {
                for (j, e) in cb.row(i).iter().enumerate() {
                    if j > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{e}");
                }
            }
            BodyForm::Complex => {
                for (j, z) in cb.complex_row(i).iter().enumerate() {
                    if j > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{} {}", fixed(z.re), fixed(z.im));
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Serializes a codebook with its digest. Output is a pure function of the
/// inputs.
pub fn render_codebook(cb: &Codebook, fields: &FieldHeader, form: BodyForm) -> String {
    let header = header_lines(cb, fields, form);
    let body = render_body(cb, form);
    let digest = digest_of(&header, &body);
    let mut out = String::with_capacity(body.len() + 512);
    for line in &header {
        out.push_str(line);
        out.push('\n');
    }
    let _ = writeln!(out, "digest=sha256:{digest}");
    out.push('\n');
    out.push_str(&body);
    out
}

fn digest_of(header: &[String], body: &str) -> String {
    let mut h = Sha256::new();
    for line in header {
        h.update(line.as_bytes());
        h.update(b"\n");
    }
    h.update(b"\n");
    h.update(body.as_bytes());
    hex::encode(h.finalize())
}

pub fn save_codebook(path: &Path, cb: &Codebook, fields: &FieldHeader, form: BodyForm) -> Result<()> {
    std::fs::write(path, render_codebook(cb, fields, form))?;
    Ok(())
}

pub fn load_codebook(path: &Path) -> Result<CodebookFile> {
    parse_codebook(&std::fs::read_to_string(path)?)
}

fn field<T: std::str::FromStr>(map: &[(String, String)], key: &str) -> Result<T> {
    let raw = map
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Format(format!("missing header {key}")))?;
    raw.parse()
        .map_err(|_| Error::Format(format!("bad value {raw:?} for header {key}")))
}

fn list(map: &[(String, String)], key: &str) -> Result<Vec<u32>> {
    let raw: String = field(map, key)?;
    raw.split(',')
        .map(|x| x.parse().map_err(|_| Error::Format(format!("bad list entry {x:?} in {key}"))))
        .collect()
}

/// Parses a file and verifies its digest and shape. Does not rebuild the
/// tower; see [`verify_against_tower`].
pub fn parse_codebook(text: &str) -> Result<CodebookFile> {
    let (head, body) = text
        .split_once("\n\n")
        .ok_or_else(|| Error::Format("no blank line after the header".into()))?;
    let mut lines = head.lines();
    if lines.next() != Some(FORMAT_VERSION) {
        return Err(Error::Format(format!("first line must be {FORMAT_VERSION}")));
    }
    let mut header = vec![FORMAT_VERSION.to_string()];
    let mut map = Vec::new();
    let mut digest = None;
    for line in lines {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("header line without '=': {line:?}")))?;
        if k == "digest" {
            digest = Some(
                v.strip_prefix("sha256:")
                    .ok_or_else(|| Error::Format("digest must be sha256".into()))?
                    .to_string(),
            );
        } else {
            header.push(line.to_string());
            map.push((k.to_string(), v.to_string()));
        }
    }
    let digest = digest.ok_or_else(|| Error::Format("missing digest".into()))?;
    let actual = digest_of(&header, body);
    if actual != digest {
        return Err(Error::Integrity(format!("digest mismatch: header {digest}, content {actual}")));
    }

    let construction: Construction = field(&map, "construction")?;
    let params = TowerParams::new(field(&map, "p")?, field(&map, "t")?, field(&map, "s")?)?;
    let n: usize = field(&map, "N")?;
    let k: usize = field(&map, "K")?;
    let root_order: u64 = field(&map, "root_order")?;
    let form: BodyForm = field(&map, "form")?;
    let fields = FieldHeader {
        moduli: [list(&map, "modulus_r")?, list(&map, "modulus_q")?, list(&map, "modulus_q2")?],
        primitives: [
            field(&map, "primitive_r")?,
            field(&map, "primitive_q")?,
            field(&map, "primitive_q2")?,
        ],
    };

    let rows: Vec<&str> = body.lines().collect();
    if rows.len() != n {
        return Err(Error::Format(format!("header says N={n}, body has {} rows", rows.len())));
    }
    let mut exponents = Vec::with_capacity(n * k);
    for (i, row) in rows.iter().enumerate() {
        match form {
            BodyForm::Exponent => {
                for tok in row.split_ascii_whitespace() {
                    exponents.push(tok.parse().map_err(|_| Error::Format(format!("row {i}: bad exponent {tok:?}")))?);
                }
            }
            BodyForm::Complex => {
                let vals: Vec<f64> = row
                    .split_ascii_whitespace()
                    .map(|tok| tok.parse().map_err(|_| Error::Format(format!("row {i}: bad number {tok:?}"))))
                    .collect::<Result<_>>()?;
                if vals.len() % 2 != 0 {
                    return Err(Error::Format(format!("row {i}: odd number of reals")));
                }
                for pair in vals.chunks(2) {
                    exponents.push(nearest_root(Complex64::new(pair[0], pair[1]), k, root_order, i)?);
                }
            }
        }
        if exponents.len() != (i + 1) * k {
            return Err(Error::Format(format!("row {i} does not have K={k} entries")));
        }
    }
    let codebook = Codebook::from_exponents(construction, params, n, k, root_order, exponents)?;
    Ok(CodebookFile { form, fields, codebook })
}

/// Recovers the exponent of an entry z = ζ_m^e / √K written at fixed
/// precision.
fn nearest_root(z: Complex64, k: usize, m: u64, row: usize) -> Result<u32> {
    let w = z * (k as f64).sqrt();
    if (w.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Format(format!("row {row}: entry {z} is not a scaled root of unity")));
    }
    let turns = w.arg() / std::f64::consts::TAU;
    let e = ((turns * m as f64).round() as i64).rem_euclid(m as i64) as u64;
    if (root_of_unity(e, m) - w).norm() > 1e-6 {
        return Err(Error::Format(format!("row {row}: entry {z} is not a scaled root of unity")));
    }
    Ok(e as u32)
}

/// Checks that the recorded field representation is the one this build
/// produces for the same parameters.
pub fn verify_against_tower(file: &CodebookFile, tower: &TowerCtx) -> Result<()> {
    if tower.params() != file.codebook.params() {
        return Err(Error::Integrity("tower parameters differ from the file header".into()));
    }
    if FieldHeader::of(tower) != file.fields {
        return Err(Error::Integrity(
            "file was written with a different field representation".into(),
        ));
    }
    Ok(())
}

/// Output format for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Format(format!("unknown report format {other:?}"))),
        }
    }
}

const REPORT_COLUMNS: [&str; 17] = [
    "construction",
    "p",
    "t",
    "s",
    "r",
    "q",
    "N",
    "K",
    "tier",
    "imax_empirical",
    "imax_bound",
    "welch",
    "ratio_bound_over_welch",
    "ratio_empirical_over_welch",
    "chain_bound",
    "distribution",
    "violations",
];

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn report_csv_row(r: &AnalysisReport) -> String {
    let dist = r.distribution.as_ref().map_or(String::new(), |d| {
        d.0.iter()
            .map(|e| format!("{}:{}", e.value, e.count))
            .collect::<Vec<_>>()
            .join(";")
    });
    let tier = serde_json::to_value(r.tier)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    [
        r.construction.to_string(),
        r.p.to_string(),
        r.t.to_string(),
        r.s.to_string(),
        r.r.to_string(),
        r.q.to_string(),
        r.n.to_string(),
        r.k.to_string(),
        tier,
        opt(r.imax_empirical),
        r.imax_bound.to_string(),
        r.welch.to_string(),
        r.ratio_bound_over_welch.to_string(),
        opt(r.ratio_empirical_over_welch),
        r.chain_bound.to_string(),
        dist,
        r.violations.join("; "),
    ]
    .iter()
    .map(|c| csv_escape(c))
    .collect::<Vec<_>>()
    .join(",")
}

/// Renders reports as a JSON array (one object when there is one report) or
/// as CSV with a header line.
pub fn render_reports(reports: &[AnalysisReport], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => render_json(reports),
        ReportFormat::Csv => {
            let mut out = REPORT_COLUMNS.join(",");
            out.push('\n');
            for r in reports {
                out.push_str(&report_csv_row(r));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Pretty JSON of one value or of a slice (a single element is unwrapped).
pub fn render_json<T: Serialize>(items: &[T]) -> Result<String> {
    let mut s = if items.len() == 1 {
        serde_json::to_string_pretty(&items[0])?
    } else {
        serde_json::to_string_pretty(items)?
    };
    s.push('\n');
    Ok(s)
}
