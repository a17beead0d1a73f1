use num_complex::Complex64;

use super::{Grid, SampledField};
use crate::error::{Error, Result};

/// CSV layout: a `d,N,L` header, one line with their values, a `re,im`
/// header, then `N^d` rows in storage order.
pub fn field_to_csv(f: &SampledField) -> String {
    let g = f.grid();
    let mut out = String::with_capacity(48 * g.len() + 32);
    out.push_str("d,N,L\n");
    out.push_str(&format!("{},{},{:.17e}\n", g.dim(), g.n(), g.side()));
    out.push_str("re,im\n");
    for v in f.values() {
        out.push_str(&format!("{:.17e},{:.17e}\n", v.re, v.im));
    }
    out
}

pub fn field_from_csv(text: &str) -> Result<SampledField> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))
    };
    let header = next("header")?;
    if header.replace(' ', "") != "d,N,L" {
        return Err(Error::Parse(format!("expected `d,N,L` header, got `{header}`")));
    }
    let spec = next("grid line")?;
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("bad grid line `{spec}`")));
    }
    let bad = |e: &dyn std::fmt::Display| Error::Parse(format!("bad grid line `{spec}`: {e}"));
    let d: usize = parts[0].parse().map_err(|e| bad(&e))?;
    let n: usize = parts[1].parse().map_err(|e| bad(&e))?;
    let side: f64 = parts[2].parse().map_err(|e| bad(&e))?;
    let grid = Grid::new(d, n, side)?;

    let mut values = Vec::with_capacity(grid.len());
    for (row, line) in lines.enumerate() {
        if row == 0 && line.replace(' ', "") == "re,im" {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (re, im) = match (cols.next(), cols.next(), cols.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => return Err(Error::Parse(format!("row {row}: expected `re,im`, got `{line}`"))),
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {row}: {e}")))
        };
        values.push(Complex64::new(parse(re)?, parse(im)?));
    }
    SampledField::new(grid, values)
}
