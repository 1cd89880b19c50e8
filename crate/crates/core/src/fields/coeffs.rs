//! Plain-text coefficient files.
//!
//! One term per line: `j l m c kind f1 f2 phase scale`, with `j` 1-based.
//! `#` starts a comment. A comment of the form `# radius <meters>` sets the
//! validity radius; otherwise the default is used.

use std::fmt::Write as _;
use std::path::Path;

use super::model::{FieldModel, SHTerm, DEFAULT_VALIDITY_RADIUS};
use super::modulation::{ModulationKind, TimeModulation};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn parse_num<T: Real>(tok: &str, line: usize, what: &str) -> Result<T> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("invalid {what} '{tok}'") })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, msg: format!("non-finite {what}") });
    }
    Ok(T::of(v))
}

pub fn parse_field_coefficients<T: Real>(text: &str) -> Result<FieldModel<T>> {
    let mut terms = Vec::new();
    let mut radius = T::of(DEFAULT_VALIDITY_RADIUS);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let mut it = c.split_whitespace();
            if it.next() == Some("radius") {
                let tok = it.next().ok_or(Error::Parse { line, msg: "radius directive without value".into() })?;
                radius = parse_num(tok, line, "radius")?;
            }
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 9 {
            return Err(Error::Parse { line, msg: format!("expected 9 fields, found {}", toks.len()) });
        }
        let j: usize = toks[0]
            .parse()
            .map_err(|_| Error::Parse { line, msg: format!("invalid component '{}'", toks[0]) })?;
        if !(1..=3).contains(&j) {
            return Err(Error::Parse { line, msg: format!("component {j} not in 1..=3") });
        }
        let l: u32 = toks[1].parse().map_err(|_| Error::Parse { line, msg: format!("invalid degree '{}'", toks[1]) })?;
        let m: i32 = toks[2].parse().map_err(|_| Error::Parse { line, msg: format!("invalid order '{}'", toks[2]) })?;
        if m.unsigned_abs() > l {
            return Err(Error::Parse { line, msg: format!("order {m} exceeds degree {l}") });
        }
        let kind: ModulationKind = toks[4].parse().map_err(|e: Error| Error::Parse { line, msg: e.to_string() })?;
        let modulation = TimeModulation {
            kind,
            f1: parse_num(toks[5], line, "f1")?,
            f2: parse_num(toks[6], line, "f2")?,
            phase: parse_num(toks[7], line, "phase")?,
            scale: parse_num(toks[8], line, "scale")?,
        };
        terms.push(SHTerm::new(j - 1, l, m, parse_num(toks[3], line, "coefficient")?, modulation));
    }
    FieldModel::new(terms, radius)
}

pub fn load_field_coefficients<T: Real>(path: impl AsRef<Path>) -> Result<FieldModel<T>> {
    parse_field_coefficients(&std::fs::read_to_string(path)?)
}

pub fn format_field_coefficients<T: Real>(model: &FieldModel<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# j l m c kind f1 f2 phase scale");
    let _ = writeln!(s, "# radius {}", model.radius());
    for t in model.terms() {
        let md = &t.modulation;
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {} {} {}",
            t.component + 1,
            t.degree,
            t.order,
            t.coefficient,
            md.kind,
            md.f1,
            md.f2,
            md.phase,
            md.scale
        );
    }
    s
}

pub fn write_field_coefficients<T: Real>(model: &FieldModel<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_field_coefficients(model))?;
    Ok(())
}
