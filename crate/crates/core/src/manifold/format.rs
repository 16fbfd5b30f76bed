//! Atlas text format.
//!
//! ```text
//! name S1
//! chart 0 dim 1 domain x1 > -pi ; x1 < pi
//! chart 1 dim 1 domain x1 > 0 ; x1 < 2*pi
//! trans 0 1 domain x1 > 0 ; x1 < pi map x1
//! trans 0 1 domain x1 < 0 ; x1 > -pi map x1 + 2*pi
//! ```
//!
//! `trans a b` maps chart `a` coordinates to chart `b` coordinates on the
//! given domain (in `a` coordinates). A pair may have several pieces.

use std::fmt::Write as _;

use super::{Atlas, Chart, ManifoldError, Region, Transition};
use crate::expr::{parse_exprs, parse_inequality};
use crate::scalar::Scalar;

fn err(line: usize, msg: impl Into<String>) -> ManifoldError {
    ManifoldError::Parse { line, msg: msg.into() }
}

fn parse_region<T: Scalar>(line: usize, text: &str, dim: usize) -> Result<Region<T>, ManifoldError> {
    let gs = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_inequality(s, dim).map_err(|e| err(line, format!("`{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Region::new(dim, gs)
}

fn parse_index(line: usize, w: Option<&str>, what: &str) -> Result<usize, ManifoldError> {
    w.and_then(|w| w.parse().ok()).ok_or_else(|| err(line, format!("expected {what}")))
}

pub fn parse_atlas<T: Scalar>(text: &str) -> Result<Atlas<T>, ManifoldError> {
    let mut name = String::from("atlas");
    let mut charts: Vec<Chart<T>> = Vec::new();
    // transitions need chart dimensions, so keep the raw lines until the end
    let mut pending = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        let Some((head, rest)) = body.split_once(char::is_whitespace).or((!body.is_empty()).then_some((body, ""))) else {
            continue;
        };
        match head {
            "name" => name = rest.trim().to_string(),
            "chart" => {
                let (before, domain) = rest.split_once("domain").unwrap_or((rest, ""));
                let words: Vec<&str> = before.split_whitespace().collect();
                let id = parse_index(line, words.first().copied(), "chart id")?;
                if words.get(1) != Some(&"dim") {
                    return Err(err(line, "expected `chart <id> dim <m> [domain ...]`"));
                }
                let dim = parse_index(line, words.get(2).copied(), "dimension")?;
                if charts.iter().any(|c| c.id == id) {
                    return Err(err(line, format!("chart {id} declared twice")));
                }
                charts.push(Chart { id, dim, domain: parse_region(line, domain, dim)? });
            }
            "trans" => pending.push((line, rest.to_string())),
            other => return Err(err(line, format!("unknown field `{other}`"))),
        }
    }
    let mut transitions = Vec::new();
    for (line, rest) in pending {
        let words: Vec<&str> = rest.split_whitespace().collect();
        let from = parse_index(line, words.first().copied(), "source chart")?;
        let to = parse_index(line, words.get(1).copied(), "target chart")?;
        let dim_of = |id| charts.iter().find(|c| c.id == id).map(|c| c.dim).ok_or_else(|| err(line, format!("unknown chart {id}")));
        let (da, db) = (dim_of(from)?, dim_of(to)?);
        let (head, map) = rest.split_once("map").ok_or_else(|| err(line, "missing `map`"))?;
        let domain = head.split_once("domain").map_or("", |(_, d)| d);
        let map = parse_exprs::<T>(map, Some(da)).map_err(|e| err(line, e.to_string()))?;
        if map.output_len() != db {
            return Err(err(line, format!("map has {} components, chart {to} has dimension {db}", map.output_len())));
        }
        transitions.push(Transition { from, to, domain: parse_region(line, domain, da)?, map });
    }
    Atlas::new(name, charts, transitions)
}

fn region_text<T: Scalar>(r: &Region<T>) -> String {
    r.inequalities()
        .iter()
        .map(|g| format!("{} > 0", g.to_strings()[0]))
        .collect::<Vec<_>>()
        .join(" ; ")
}

pub fn write_atlas<T: Scalar>(atlas: &Atlas<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name {}", atlas.name);
    for c in atlas.charts() {
        let _ = writeln!(s, "chart {} dim {} domain {}", c.id, c.dim, region_text(&c.domain));
    }
    for t in atlas.transitions() {
        let _ = writeln!(
            s,
            "trans {} {} domain {} map {}",
            t.from,
            t.to,
            region_text(&t.domain),
            t.map.to_strings().join(", ")
        );
    }
    s
}
