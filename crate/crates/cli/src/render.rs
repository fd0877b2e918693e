//! Table rendering for the three output formats.

use serde_json::Value;
use sheffer_core::exactnum::{format_rat, Rat};
use sheffer_core::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
}

/// A rectangular table; cells are plain strings except in JSON, where the
/// caller supplies the document directly.
pub struct Table {
    pub header: Vec<String>,
    pub latex_header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub latex_rows: Vec<Vec<String>>,
}

pub fn latex_rat(r: &Rat) -> String {
    let s = format_rat(r);
    let (sign, body) = match s.strip_prefix('-') {
        Some(b) => ("-", b),
        None => ("", s.as_str()),
    };
    match body.split_once('/') {
        Some((p, q)) => format!("{sign}\\frac{{{p}}}{{{q}}}"),
        None => format!("{sign}{body}"),
    }
}

pub fn latex_poly(p: &Poly, var: &str) -> String {
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        let s = format_rat(c);
        if s == "0" {
            continue;
        }
        let neg = s.starts_with('-');
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = latex_rat(&if neg { -c.clone() } else { c.clone() });
        match k {
            0 => out.push_str(&mag),
            _ => {
                if mag != "1" {
                    out.push_str(&mag);
                }
                out.push_str(var);
                if k > 1 {
                    out.push_str(&format!("^{{{k}}}"));
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let cols = "l".repeat(self.latex_header.len());
        let mut out = format!("\\begin{{tabular}}{{{cols}}}\n\\hline\n");
        out.push_str(&self.latex_header.join(" & "));
        out.push_str(" \\\\\n\\hline\n");
        for row in &self.latex_rows {
            out.push_str(&row.join(" & "));
            out.push_str(" \\\\\n");
        }
        out.push_str("\\hline\n\\end{tabular}\n");
        out
    }

    pub fn render(&self, format: Format, json: &Value) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(json).expect("json value");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Latex => self.to_latex(),
        }
    }
}
