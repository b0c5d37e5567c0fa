//! Plain-text numeric tables: header first, comma separated, numbers with
//! twelve significant digits in a locale-independent `%g`-style layout.

use std::fmt::Write as _;

const SIG_DIGITS: i32 = 12;

/// Formats `v` like C's `%.12g`.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIG_DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders a header row plus numeric rows.
pub fn render_csv<S: AsRef<str>>(header: &[S], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let names: Vec<&str> = header.iter().map(AsRef::as_ref).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| format_sig(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
