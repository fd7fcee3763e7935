//! Byte-stable CSV and JSON rendering.

use serde::Serialize;

use super::Report;
use crate::table::ScenarioTable;

pub const CSV_HEADER: &str = "theta,phi,scheme,label,quantity,value,source";

const SIG_DIGITS: usize = 10;

/// Fixed-point decimal with 10 significant digits, trailing zeros trimmed.
///
/// `-0` prints as `0`; non-finite values print as `nan`, `inf`, `-inf`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    // scientific formatting does the correctly rounded part
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    let mut out = String::new();
    if v < 0.0 {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    out
}

/// Rounds to what [`format_number`] prints; non-finite values become `None`.
fn rounded(v: f64) -> Option<f64> {
    v.is_finite().then(|| format_number(v).parse().expect("formatted number parses"))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(table: &ScenarioTable) -> String {
    let mut out = String::with_capacity(64 * (table.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in table.iter() {
        let fields = [
            format_number(r.theta),
            format_number(r.phi),
            csv_field(&r.scheme),
            csv_field(&r.label),
            r.quantity.as_str().to_string(),
            format_number(r.value),
            r.source.as_str().to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonRow<'a> {
    theta: Option<f64>,
    phi: Option<f64>,
    scheme: &'a str,
    label: &'a str,
    quantity: &'static str,
    value: Option<f64>,
    source: &'static str,
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    name: &'a str,
    expected: Option<f64>,
    observed: Option<f64>,
    tolerance: Option<f64>,
    passed: bool,
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    seed: Option<u64>,
    command_line: &'a str,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    metadata: Metadata<'a>,
    rows: Vec<JsonRow<'a>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    checks: Vec<JsonCheck<'a>>,
}

pub fn render_json(report: &Report, command_line: &str) -> String {
    let doc = JsonReport {
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION"),
            seed: report.seed,
            command_line,
        },
        rows: report
            .table
            .iter()
            .map(|r| JsonRow {
                theta: rounded(r.theta),
                phi: rounded(r.phi),
                scheme: &r.scheme,
                label: &r.label,
                quantity: r.quantity.as_str(),
                value: rounded(r.value),
                source: r.source.as_str(),
            })
            .collect(),
        checks: report
            .checks
            .iter()
            .map(|c| JsonCheck {
                name: &c.name,
                expected: rounded(c.expected),
                observed: rounded(c.observed),
                tolerance: rounded(c.tolerance),
                passed: c.passed,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}
