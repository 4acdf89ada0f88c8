//! Text form of a block SDP.
//!
//! ```text
//! sense maximize
//! block gram 3 1
//! free lambda
//! cost F0=1
//! constraint 1 X0[0,0]=1 F0=1
//! ```
//!
//! Indices are zero-based; `X<b>[i,j]` requires `i ≤ j`. An `approximate` record marks
//! data produced in floating point.

use super::{BlockSDP, BlockSpec, Constraint, EntryTerm, LinearForm, Sense};
use crate::error::Result;
use crate::rational::{parse_rational, render_rational};
use crate::textformat::{format_error, parse_usize, records};

fn parse_terms(text: &str, line: usize) -> Result<LinearForm> {
    let mut form = LinearForm::default();
    for tok in text.split_whitespace() {
        let (var, coef) = tok
            .split_once('=')
            .ok_or_else(|| format_error(line, format!("expected `var=coef`, got `{tok}`")))?;
        let coef = parse_rational(coef).ok_or_else(|| format_error(line, format!("bad rational `{coef}`")))?;
        if let Some(k) = var.strip_prefix('F') {
            form.free.push((parse_usize(k, line)?, coef));
        } else if let Some(rest) = var.strip_prefix('X') {
            let bad = || format_error(line, format!("bad entry `{var}`"));
            let (b, idx) = rest.split_once('[').ok_or_else(bad)?;
            let idx = idx.strip_suffix(']').ok_or_else(bad)?;
            let (i, j) = idx.split_once(',').ok_or_else(bad)?;
            form.entries.push(EntryTerm {
                block: parse_usize(b, line)?,
                row: parse_usize(i, line)?,
                col: parse_usize(j, line)?,
                coef,
            });
        } else {
            return Err(format_error(line, format!("unknown variable `{var}`")));
        }
    }
    Ok(form)
}

fn render_terms(form: &LinearForm) -> String {
    let mut out: Vec<String> = form
        .entries
        .iter()
        .map(|t| format!("X{}[{},{}]={}", t.block, t.row, t.col, render_rational(&t.coef)))
        .collect();
    out.extend(form.free.iter().map(|(k, c)| format!("F{k}={}", render_rational(c))));
    out.join(" ")
}

pub fn parse_sdp(text: &str) -> Result<BlockSDP> {
    let mut sdp = BlockSDP::new(Vec::new(), Vec::new());
    for rec in records(text) {
        match rec.key {
            "sense" => {
                sdp.sense = match rec.rest {
                    "minimize" => Sense::Minimize,
                    "maximize" => Sense::Maximize,
                    other => return Err(format_error(rec.line, format!("unknown sense `{other}`"))),
                }
            }
            "approximate" => sdp.approximate = true,
            "block" => {
                let parts: Vec<&str> = rec.rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(format_error(rec.line, "expected `block name size weight`"));
                }
                sdp.blocks.push(BlockSpec {
                    name: parts[0].to_string(),
                    size: parse_usize(parts[1], rec.line)?,
                    weight: parse_usize(parts[2], rec.line)?,
                });
            }
            "free" => sdp.free.push(rec.rest.to_string()),
            "cost" => sdp.cost = parse_terms(rec.rest, rec.line)?,
            "constraint" => {
                let (rhs, terms) = rec.rest.split_once(char::is_whitespace).unwrap_or((rec.rest, ""));
                let rhs = parse_rational(rhs)
                    .ok_or_else(|| format_error(rec.line, format!("bad right-hand side `{rhs}`")))?;
                sdp.constraints.push(Constraint {
                    form: parse_terms(terms, rec.line)?,
                    rhs,
                });
            }
            other => return Err(format_error(rec.line, format!("unknown record `{other}`"))),
        }
    }
    sdp.validate()?;
    Ok(sdp)
}

pub fn render_sdp(sdp: &BlockSDP) -> String {
    let mut out = String::new();
    let sense = match sdp.sense {
        Sense::Minimize => "minimize",
        Sense::Maximize => "maximize",
    };
    out.push_str(&format!("sense {sense}\n"));
    if sdp.approximate {
        out.push_str("approximate\n");
    }
    for b in &sdp.blocks {
        out.push_str(&format!("block {} {} {}\n", b.name, b.size, b.weight));
    }
    for f in &sdp.free {
        out.push_str(&format!("free {f}\n"));
    }
    out.push_str(&format!("cost {}\n", render_terms(&sdp.cost)).replace(" \n", "\n"));
    for c in &sdp.constraints {
        out.push_str(
            &format!("constraint {} {}\n", render_rational(&c.rhs), render_terms(&c.form)).replace(" \n", "\n"),
        );
    }
    out
}
