//! Self-contained text form of a certificate.
//!
//! ```text
//! certificate invariant
//! group symmetric:3
//! lambda -2113/1000
//! vars x y z
//! theta e1 = x + y + z
//! ...
//! block 1 trivial
//! gamma 1
//! vector 1
//! pi 1 1 1
//! row 1 0 0 0
//! gram 1
//! ```
//!
//! Plain certificates list `vars`, one `monomial` record of exponents per entry of
//! `Y`, and `gram`. Floating-point data use `lambda ~<float>` and `fgram` with
//! decimal entries. Indices of irreps and of `Π` rows are 1-based.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::certificate::{Certificate, CertificateBody, Gram, InvariantBlock, Value};
use crate::error::Result;
use crate::invariantring::{parse_invariant, parse_presentation, render_invariant, render_presentation, InvariantPoly};
use crate::polyring::{parse_polynomial, render_polynomial, Monomial, Polynomial, VarNames};
use crate::rational::{parse_rational, render_rational};
use crate::textformat::{
    format_error, parse_matrix, parse_rationals, parse_usize, records, render_matrix, render_rationals,
};

const PRESENTATION_KEYS: [&str; 5] = ["vars", "generator", "theta", "eta", "syzygy"];

pub fn render_certificate(cert: &Certificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "certificate {}", cert.mode());
    let _ = writeln!(out, "group {}", cert.group);
    match &cert.lambda {
        Value::Exact(v) => {
            let _ = writeln!(out, "lambda {}", render_rational(v));
        }
        Value::Float(v) => {
            let _ = writeln!(out, "lambda ~{v:?}");
        }
    }
    if let Some(r) = cert.residual {
        let _ = writeln!(out, "residual {r:?}");
    }
    match &cert.body {
        CertificateBody::Plain { vars, monomials, gram } => {
            let _ = writeln!(out, "vars {}", vars.0.join(" "));
            for m in monomials {
                let exps: Vec<String> = m.0.iter().map(u32::to_string).collect();
                let _ = writeln!(out, "monomial {}", exps.join(" "));
            }
            render_gram(&mut out, gram);
        }
        CertificateBody::Invariant { presentation, blocks } => {
            out.push_str(&render_presentation(presentation));
            let vars = presentation.vars();
            for b in blocks {
                let _ = writeln!(out, "block {} {}", b.irrep + 1, b.label);
                let _ = writeln!(out, "gamma {}", render_rationals(&b.gamma));
                for v in &b.vectors {
                    let comps: Vec<String> = v.iter().map(|p| render_polynomial(p, vars)).collect();
                    let _ = writeln!(out, "vector {}", comps.join(" ; "));
                }
                for k in 0..b.pi.len() {
                    for l in k..b.pi.len() {
                        let _ = writeln!(
                            out,
                            "pi {} {} {}",
                            k + 1,
                            l + 1,
                            render_invariant(&b.pi[k][l], presentation)
                        );
                    }
                }
                for (k, a) in &b.rows {
                    let exps: Vec<String> = a.iter().map(u32::to_string).collect();
                    let _ = writeln!(out, "row {} {}", k + 1, exps.join(" "));
                }
                render_gram(&mut out, &b.gram);
            }
        }
    }
    out
}

fn render_gram(out: &mut String, gram: &Gram) {
    match gram {
        Gram::Exact(m) => {
            let _ = writeln!(out, "gram {}", render_matrix(m));
        }
        Gram::Float(m) => {
            let rows: Vec<String> = (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| format!("{:?}", m[(i, j)]))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            let _ = writeln!(out, "fgram {}", rows.join(" ; "));
        }
    }
}

fn parse_float_matrix(text: &str, line: usize) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|r| {
            r.split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| format_error(line, format!("bad number `{t}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format_error(line, "Gram matrix must be square"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn parse_exponents(text: &str, line: usize) -> Result<Vec<u32>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| format_error(line, format!("bad exponent `{t}`")))
        })
        .collect()
}

struct PendingBlock {
    line: usize,
    irrep: usize,
    label: String,
    gamma: Vec<crate::rational::Q>,
    vectors: Vec<Vec<Polynomial>>,
    pi: Vec<(usize, usize, InvariantPoly)>,
    rows: Vec<(usize, Vec<u32>)>,
    gram: Option<Gram>,
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut mode = None;
    let mut group = String::new();
    let mut lambda = None;
    let mut residual = None;
    let mut plain_vars = None;
    let mut monomials = Vec::new();
    let mut plain_gram = None;
    // Presentation records keep their line numbers; everything else is blanked.
    let mut pres_text = String::new();
    for raw in text.lines() {
        let t = raw.trim();
        let key = t.split_whitespace().next().unwrap_or("");
        if PRESENTATION_KEYS.contains(&key) {
            pres_text.push_str(raw);
        }
        pres_text.push('\n');
    }
    let mut blocks: Vec<PendingBlock> = Vec::new();
    let mut pres = None;
    for rec in records(text) {
        let line = rec.line;
        match rec.key {
            "certificate" => {
                mode = Some(match rec.rest {
                    "plain" => false,
                    "invariant" => true,
                    other => return Err(format_error(line, format!("unknown mode `{other}`"))),
                });
                if mode == Some(true) {
                    pres = Some(parse_presentation(&pres_text)?);
                }
            }
            "group" => group = rec.rest.to_string(),
            "lambda" => {
                lambda = Some(match rec.rest.strip_prefix('~') {
                    Some(v) => Value::Float(v.parse().map_err(|_| format_error(line, "bad float λ"))?),
                    None => Value::Exact(
                        parse_rational(rec.rest)
                            .ok_or_else(|| format_error(line, format!("bad rational `{}`", rec.rest)))?,
                    ),
                })
            }
            "residual" => {
                residual = Some(
                    rec.rest
                        .parse::<f64>()
                        .map_err(|_| format_error(line, "bad residual"))?,
                )
            }
            "vars" if mode == Some(false) => {
                let names: Vec<&str> = rec.rest.split_whitespace().collect();
                plain_vars = Some(VarNames::new(&names));
            }
            "generator" | "theta" | "eta" | "syzygy" | "vars" => {
                if mode != Some(true) {
                    return Err(format_error(
                        line,
                        format!("`{}` outside an invariant certificate", rec.key),
                    ));
                }
            }
            "monomial" => monomials.push(Monomial(parse_exponents(rec.rest, line)?)),
            "gram" | "fgram" => {
                let g = if rec.key == "gram" {
                    Gram::Exact(parse_matrix(rec.rest, line)?)
                } else {
                    Gram::Float(parse_float_matrix(rec.rest, line)?)
                };
                match blocks.last_mut() {
                    Some(b) if mode == Some(true) => b.gram = Some(g),
                    _ => plain_gram = Some(g),
                }
            }
            "block" => {
                let (idx, label) = rec.rest.split_once(char::is_whitespace).unwrap_or((rec.rest, ""));
                let idx = parse_usize(idx, line)?;
                if idx == 0 {
                    return Err(format_error(line, "irrep indices are 1-based"));
                }
                blocks.push(PendingBlock {
                    line,
                    irrep: idx - 1,
                    label: label.trim().to_string(),
                    gamma: Vec::new(),
                    vectors: Vec::new(),
                    pi: Vec::new(),
                    rows: Vec::new(),
                    gram: None,
                });
            }
            "gamma" | "vector" | "pi" | "row" => {
                let p = pres
                    .as_ref()
                    .ok_or_else(|| format_error(line, "block data outside an invariant certificate"))?;
                let b = blocks
                    .last_mut()
                    .ok_or_else(|| format_error(line, format!("`{}` before `block`", rec.key)))?;
                match rec.key {
                    "gamma" => b.gamma = parse_rationals(rec.rest, line)?,
                    "vector" => b.vectors.push(
                        rec.rest
                            .split(';')
                            .map(|t| parse_polynomial(t, p.vars()).map_err(|e| format_error(line, e.to_string())))
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    "pi" => {
                        let mut it = rec.rest.splitn(3, char::is_whitespace);
                        let k = parse_usize(it.next().unwrap_or(""), line)?;
                        let l = parse_usize(it.next().unwrap_or(""), line)?;
                        let body = it.next().unwrap_or("");
                        if k == 0 || l == 0 {
                            return Err(format_error(line, "Π indices are 1-based"));
                        }
                        let e = parse_invariant(body, p).map_err(|e| format_error(line, e.to_string()))?;
                        b.pi.push((k - 1, l - 1, e));
                    }
                    _ => {
                        let (k, rest) = rec.rest.split_once(char::is_whitespace).unwrap_or((rec.rest, ""));
                        let k = parse_usize(k, line)?;
                        if k == 0 {
                            return Err(format_error(line, "Π rows are 1-based"));
                        }
                        b.rows.push((k - 1, parse_exponents(rest, line)?));
                    }
                }
            }
            other => return Err(format_error(line, format!("unknown record `{other}`"))),
        }
    }
    let mode = mode.ok_or_else(|| format_error(0, "missing `certificate` record"))?;
    let lambda = lambda.ok_or_else(|| format_error(0, "missing `lambda` record"))?;
    let body = if mode {
        let presentation = pres.expect("parsed with the mode record");
        let mut out = Vec::with_capacity(blocks.len());
        for b in blocks {
            let r = b.vectors.len();
            let mut pi = vec![vec![InvariantPoly::zero(&presentation); r]; r];
            for (k, l, e) in b.pi {
                if k >= r || l >= r {
                    return Err(format_error(b.line, "Π index exceeds the number of vectors"));
                }
                pi[l][k] = e.clone();
                pi[k][l] = e;
            }
            out.push(InvariantBlock {
                irrep: b.irrep,
                label: b.label,
                gamma: b.gamma,
                vectors: b.vectors,
                pi,
                rows: b.rows,
                gram: b
                    .gram
                    .ok_or_else(|| format_error(b.line, "block without Gram matrix"))?,
            });
        }
        CertificateBody::Invariant {
            presentation,
            blocks: out,
        }
    } else {
        CertificateBody::Plain {
            vars: plain_vars.ok_or_else(|| format_error(0, "missing `vars` record"))?,
            monomials,
            gram: plain_gram.ok_or_else(|| format_error(0, "missing Gram matrix"))?,
        }
    };
    Ok(Certificate {
        group,
        lambda,
        residual,
        body,
    })
}

/// Polynomial file: one `vars` record, then `poly` records whose expressions are
/// summed, e.g. `vars x y` and `poly x^2 + y^2`.
pub fn parse_polynomial_file(text: &str) -> Result<(VarNames, Polynomial)> {
    let mut vars: Option<VarNames> = None;
    let mut poly: Option<Polynomial> = None;
    for rec in records(text) {
        match rec.key {
            "vars" => {
                if vars.is_some() {
                    return Err(format_error(rec.line, "duplicate `vars` record"));
                }
                let names: Vec<&str> = rec.rest.split_whitespace().collect();
                if names.is_empty() {
                    return Err(format_error(rec.line, "`vars` needs at least one name"));
                }
                vars = Some(VarNames::new(&names));
            }
            "poly" => {
                let v = vars
                    .as_ref()
                    .ok_or_else(|| format_error(rec.line, "`vars` must come first"))?;
                let p = parse_polynomial(rec.rest, v).map_err(|e| format_error(rec.line, e.to_string()))?;
                poly = Some(match poly {
                    Some(acc) => &acc + &p,
                    None => p,
                });
            }
            other => return Err(format_error(rec.line, format!("unknown record `{other}`"))),
        }
    }
    let vars = vars.ok_or_else(|| format_error(0, "missing `vars` record"))?;
    let poly = poly.ok_or_else(|| format_error(0, "missing `poly` record"))?;
    Ok((vars, poly))
}

pub fn render_polynomial_file(vars: &VarNames, p: &Polynomial) -> String {
    format!("vars {}\npoly {}\n", vars.0.join(" "), render_polynomial(p, vars))
}
