//! Plain-text algebra format.
//!
//! ```text
//! name dual
//! dim 2
//! unit 1 0
//! aug 1 0
//! labels 1 x
//! sc 0 0 -> 0:1
//! sc 0 1 -> 1:1
//! ```
//!
//! `sc i j -> k:v ...` lists the nonzero coefficients of `b_i b_j`. Pairs
//! with `i ≤ j` are authoritative and imply their mirror; a line with `i > j`
//! is accepted only when the mirrored line is present and agrees. Absent
//! pairs multiply to zero. `aug` and `labels` are optional; `#` starts a
//! comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{AlgebraError, AlgebraTable};
use crate::scalar::Scalar;

fn err(line: usize, msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse { line, msg: msg.into() }
}

fn parse_reals<T: Scalar>(line: usize, words: &[&str]) -> Result<Vec<T>, AlgebraError> {
    words
        .iter()
        .map(|w| {
            w.parse::<f64>()
                .map(T::lit)
                .map_err(|_| err(line, format!("`{w}` is not a real number")))
        })
        .collect()
}

type ScLine<T> = (usize, Vec<(usize, T)>);

pub fn parse_table<T: Scalar>(text: &str) -> Result<AlgebraTable<T>, AlgebraError> {
    let mut name = None;
    let mut dim = None;
    let mut unit = None;
    let mut aug = None;
    let mut labels = None;
    let mut products: BTreeMap<(usize, usize), ScLine<T>> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "name" => name = Some(words[1..].join(" ")),
            "dim" => {
                let d = words
                    .get(1)
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| err(lineno, "`dim` needs a non-negative integer"))?;
                dim = Some(d);
            }
            "unit" => unit = Some(parse_reals::<T>(lineno, &words[1..])?),
            "aug" => aug = Some(parse_reals::<T>(lineno, &words[1..])?),
            "labels" => labels = Some(words[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>()),
            "sc" => {
                if words.len() < 4 || words[3] != "->" {
                    return Err(err(lineno, "expected `sc i j -> k:v ...`"));
                }
                let i: usize = words[1].parse().map_err(|_| err(lineno, "bad index i"))?;
                let j: usize = words[2].parse().map_err(|_| err(lineno, "bad index j"))?;
                let mut entries = Vec::new();
                for w in &words[4..] {
                    let (k, v) = w.split_once(':').ok_or_else(|| err(lineno, format!("bad entry `{w}`")))?;
                    let k: usize = k.parse().map_err(|_| err(lineno, format!("bad index in `{w}`")))?;
                    let v = parse_reals::<T>(lineno, &[v])?[0];
                    entries.push((k, v));
                }
                if products.insert((i, j), (lineno, entries)).is_some() {
                    return Err(err(lineno, format!("duplicate line for pair ({i}, {j})")));
                }
            }
            other => return Err(err(lineno, format!("unknown field `{other}`"))),
        }
    }

    let dim = dim.ok_or_else(|| err(0, "missing `dim`"))?;
    let unit = unit.ok_or_else(|| err(0, "missing `unit`"))?;
    let mut sc = vec![T::zero(); dim * dim * dim];
    for (&(i, j), (lineno, entries)) in &products {
        if i >= dim || j >= dim {
            return Err(err(*lineno, format!("pair ({i}, {j}) out of range for dim {dim}")));
        }
        if i > j {
            match products.get(&(j, i)) {
                None => {
                    return Err(err(
                        *lineno,
                        format!("pair ({i}, {j}) given without its symmetric completion ({j}, {i})"),
                    ))
                }
                Some((_, mirror)) if mirror != entries => {
                    return Err(err(*lineno, format!("pair ({i}, {j}) disagrees with ({j}, {i})")))
                }
                Some(_) => continue,
            }
        }
        for &(k, v) in entries {
            if k >= dim {
                return Err(err(*lineno, format!("index {k} out of range for dim {dim}")));
            }
            sc[(i * dim + j) * dim + k] = v;
            sc[(j * dim + i) * dim + k] = v;
        }
    }
    let mut t = AlgebraTable::new(name.unwrap_or_else(|| "file".into()), dim, unit, aug, sc)?;
    if let Some(l) = labels {
        if l.len() != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, found: l.len() });
        }
        t.labels = Some(l);
    }
    Ok(t)
}

fn join<T: Scalar>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_table<T: Scalar>(t: &AlgebraTable<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name {}", t.name);
    let _ = writeln!(s, "dim {}", t.dim);
    let _ = writeln!(s, "unit {}", join(&t.unit));
    if let Some(aug) = &t.aug {
        let _ = writeln!(s, "aug {}", join(aug));
    }
    if let Some(labels) = &t.labels {
        let _ = writeln!(s, "labels {}", labels.join(" "));
    }
    for i in 0..t.dim {
        for j in i..t.dim {
            let entries: Vec<String> = t
                .basis_product(i, j)
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != T::zero())
                .map(|(k, v)| format!("{k}:{v}"))
                .collect();
            if !entries.is_empty() {
                let _ = writeln!(s, "sc {i} {j} -> {}", entries.join(" "));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{jet, multivariate_jet, validate};

    #[test]
    fn round_trip_presets() {
        for a in [jet::<f64>(3), multivariate_jet(2, 2)] {
            let text = write_table(a.table());
            let mut back = parse_table::<f64>(&text).unwrap();
            back.monomials = a.table().monomials.clone();
            assert_eq!(&back, a.table());
            assert!(validate(&back).passed());
        }
    }

    #[test]
    fn product_of_reals_without_aug() {
        let text = "dim 2\nunit 1 1\nsc 0 0 -> 0:1\nsc 1 1 -> 1:1\n";
        let t = parse_table::<f64>(text).unwrap();
        assert!(t.aug.is_none());
        assert_eq!(t.mul(&[1.0, 2.0], &[3.0, 4.0]), vec![3.0, 8.0]);
    }

    #[test]
    fn rejects_missing_symmetric_completion() {
        let text = "dim 2\nunit 1 0\naug 1 0\nsc 0 0 -> 0:1\nsc 1 0 -> 1:1\n";
        let e = parse_table::<f64>(text).unwrap_err();
        assert!(matches!(e, AlgebraError::Parse { line: 5, ref msg } if msg.contains("symmetric")), "{e}");
    }

    #[test]
    fn accepts_consistent_mirror_and_rejects_conflict() {
        let ok = "dim 2\nunit 1 0\nsc 0 0 -> 0:1\nsc 0 1 -> 1:1\nsc 1 0 -> 1:1\n";
        assert!(parse_table::<f64>(ok).is_ok());
        let bad = "dim 2\nunit 1 0\nsc 0 0 -> 0:1\nsc 0 1 -> 1:1\nsc 1 0 -> 1:2\n";
        assert!(parse_table::<f64>(bad).is_err());
    }

    #[test]
    fn reports_bad_lines() {
        assert!(matches!(
            parse_table::<f64>("dim 2\nunit 1 zero\n"),
            Err(AlgebraError::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_table::<f64>("dim 1\nunit 1\nfoo\n"), Err(AlgebraError::Parse { line: 3, .. })));
        assert!(matches!(
            parse_table::<f64>("dim 1\nunit 1\nsc 0 0 -> 3:1\n"),
            Err(AlgebraError::Parse { line: 3, .. })
        ));
    }
}
