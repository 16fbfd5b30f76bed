//! `weil`: command-line front end for Weil algebras and their Taylor lifts.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use weil_core::algebra::{
    minimal_idempotents, parse_algebra_spec, parse_table, tensor_product, write_table, AlgebraError, WeilAlgebra,
};
use weil_core::expr::{parse_exprs, GraphError};
use weil_core::lift::{eval_lift, LiftError, LiftedVector};
use weil_core::linalg::Matrix;
use weil_core::verify;

#[derive(Parser)]
#[command(name = "weil", version, about = "Weil algebras, Taylor lifts and their property suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Taylor lift of an expression at a point.
    Lift {
        /// Comma-separated component expressions in x1, x2, ...
        expr: String,
        #[arg(long, default_value = "dual")]
        algebra: String,
        /// Base point, one value per variable.
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        at: Vec<f64>,
        /// Nilpotent part of one variable, `j=c0,c1,...` over the full basis.
        /// Overrides the default seeding for that variable.
        #[arg(long = "slot", value_name = "J=COEFFS", allow_hyphen_values = true)]
        slots: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split an algebra into local summands through its minimal idempotents.
    Decompose {
        /// Algebra file (or preset spec).
        algebra: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a property suite: algebra, lift, manifold, liegroup or all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the tensor product of two algebras in the table format.
    Tensor {
        left: String,
        right: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the Weil algebra axioms of an algebra file.
    Validate {
        algebra: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure classes, each with its own exit code.
enum Failure {
    Usage(String),
    Math(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Math(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Math(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Parse { .. } | AlgebraError::UnknownSpec(_) | AlgebraError::DimensionMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<LiftError> for Failure {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::ArityMismatch { .. } | LiftError::Graph(GraphError::ArityMismatch { .. }) => {
                Failure::Usage(e.to_string())
            }
            LiftError::Algebra(a) => a.into(),
            _ => Failure::Math(e.to_string()),
        }
    }
}

/// `%.12g`: twelve significant digits, trailing zeros dropped.
fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = usize::try_from(11 - exp).unwrap_or(0);
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn load_algebra(spec: &str) -> Result<Arc<WeilAlgebra<f64>>, Failure> {
    Ok(Arc::new(parse_algebra_spec(spec)?))
}

/// Basis elements of `N` outside `N²`, in basis order: the unit nilpotent
/// generators used by the default seeding.
fn generators(alg: &WeilAlgebra<f64>) -> Vec<usize> {
    let d = alg.dim();
    let nil = alg.nilpotent_basis();
    let mut squares = Vec::new();
    for (i, a) in nil.iter().enumerate() {
        for b in &nil[i..] {
            squares.push(alg.mul_coeffs(a, b));
        }
    }
    let tol = 1e-9;
    let rank = |vs: &[Vec<f64>]| if vs.is_empty() { 0 } else { Matrix::from_columns(d, vs).rank(tol) };
    let base = rank(&squares);
    (0..d)
        .filter(|&i| {
            let e: Vec<f64> = (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect();
            if alg.augment(&e).abs() > tol {
                return false;
            }
            let mut with = squares.clone();
            with.push(e);
            rank(&with) > base
        })
        .collect()
}

fn parse_slot(text: &str, n: usize, d: usize) -> Result<(usize, Vec<f64>), Failure> {
    let bad = |why: &str| Failure::Usage(format!("bad --slot `{text}`: {why}"));
    let (j, coeffs) = text.split_once('=').ok_or_else(|| bad("expected J=COEFFS"))?;
    let j: usize = j.trim().trim_start_matches('x').parse().map_err(|_| bad("variable index"))?;
    if j == 0 || j > n {
        return Err(bad(&format!("variable index must be in 1..={n}")));
    }
    let c = coeffs
        .split(',')
        .map(|w| w.trim().parse::<f64>().map_err(|_| bad(&format!("`{w}` is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    if c.len() != d {
        return Err(bad(&format!("expected {d} coefficients, got {}", c.len())));
    }
    Ok((j - 1, c))
}

fn cmd_lift(spec: &str, expr: &str, at: &[f64], slots: &[String]) -> Result<String, Failure> {
    let alg = load_algebra(spec)?;
    let n = at.len();
    let d = alg.dim();
    let g = parse_exprs::<f64>(expr, Some(n)).map_err(|e| Failure::Usage(e.to_string()))?;
    if g.arity() != n {
        return Err(Failure::Usage(format!("expression has {} variables, --at gives {n} values", g.arity())));
    }
    let mut seeds: Vec<Option<Vec<f64>>> = vec![None; n];
    for s in slots {
        let (j, c) = parse_slot(s, n, d)?;
        seeds[j] = Some(c);
    }
    if seeds.iter().any(Option::is_none) {
        let gens = generators(&alg);
        if gens.len() < n {
            return Err(Failure::Usage(format!(
                "{} has {} nilpotent generators for {n} variables; give every variable a --slot",
                alg.name(),
                gens.len()
            )));
        }
        for (j, s) in seeds.iter_mut().enumerate() {
            if s.is_none() {
                let mut c = vec![0.0; d];
                c[gens[j]] = 1.0;
                *s = Some(c);
            }
        }
    }
    let seeds: Vec<Vec<f64>> = seeds.into_iter().flatten().collect();
    let v = LiftedVector::seeded(&alg, at, &seeds)?;
    let y = eval_lift(&g, &v)?;
    let width = (0..d).map(|i| alg.label(i).chars().count()).max().unwrap_or(1);
    let mut s = String::new();
    for (k, e) in y.entries().iter().enumerate() {
        let _ = writeln!(s, "output {}", k + 1);
        for (i, c) in e.coeffs().iter().enumerate() {
            let _ = writeln!(s, "  {:<width$}  {}", alg.label(i), fmt12(*c));
        }
    }
    Ok(s)
}

fn cmd_decompose(spec: &str) -> Result<String, Failure> {
    let table = match parse_algebra_spec::<f64>(spec) {
        Ok(a) => a.table().clone(),
        // a formally real algebra need not be local, so fall back to the raw table
        Err(_) => {
            let text = std::fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("{spec}: {e}")))?;
            parse_table(&text)?
        }
    };
    let dec = minimal_idempotents(&table)?;
    let mut s = String::new();
    let _ = writeln!(s, "k = {}", dec.idempotents.len());
    for (i, (e, a)) in dec.idempotents.iter().zip(&dec.summands).enumerate() {
        let coeffs: Vec<String> = e.coeffs.iter().map(|c| fmt12(*c)).collect();
        let _ = writeln!(s, "e{} = [{}]", i + 1, coeffs.join(", "));
        let _ = writeln!(s, "  summand {}: dim {} height {}", i + 1, a.dim(), a.height());
    }
    Ok(s)
}

fn cmd_verify(suite: &str, seed: u64, trials: usize) -> Result<(String, bool), Failure> {
    let reports = verify::run_named(suite, seed, trials).map_err(|e| Failure::Usage(e.to_string()))?;
    let ok = reports.iter().all(verify::SuiteReport::passed);
    let mut s: String = reports.iter().map(ToString::to_string).collect();
    let _ = writeln!(s, "{}", if ok { "all properties passed" } else { "verification FAILED" });
    Ok((s, ok))
}

fn cmd_tensor(left: &str, right: &str) -> Result<String, Failure> {
    let (a, b) = (load_algebra(left)?, load_algebra(right)?);
    Ok(write_table(tensor_product(&a, &b)?.table()))
}

fn cmd_validate(spec: &str) -> Result<(String, bool), Failure> {
    let table = match parse_algebra_spec::<f64>(spec) {
        Ok(a) => a.table().clone(),
        Err(_) => {
            let text = std::fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("{spec}: {e}")))?;
            parse_table(&text)?
        }
    };
    let report = weil_core::algebra::validate(&table);
    let mut s = format!("{}: {}\n", table.name, report.summary());
    if report.passed() {
        let a = WeilAlgebra::from_table(table)?;
        let _ = writeln!(s, "dim {} height {}", a.dim(), a.height());
    }
    Ok((s, report.passed()))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Lift { expr, algebra, at, slots, out } => emit(&cmd_lift(&algebra, &expr, &at, &slots)?, out.as_ref()),
        Command::Decompose { algebra, out } => emit(&cmd_decompose(&algebra)?, out.as_ref()),
        Command::Verify { suite, seed, trials, out } => {
            let (text, ok) = cmd_verify(&suite, seed, trials)?;
            emit(&text, out.as_ref())?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Verification(format!("suite `{suite}` failed")))
            }
        }
        Command::Tensor { left, right, out } => emit(&cmd_tensor(&left, &right)?, out.as_ref()),
        Command::Validate { algebra, out } => {
            let (text, ok) = cmd_validate(&algebra)?;
            emit(&text, out.as_ref())?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Verification(format!("`{algebra}` is not a Weil algebra")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(0.5), "0.5");
        assert_eq!(fmt12(1.0 / 6.0), "0.166666666667");
        assert_eq!(fmt12(-15.0), "-15");
        assert_eq!(fmt12(1.5e-9), "1.5e-9");
        assert_eq!(fmt12(123456789012345.0), "1.23456789012e14");
    }

    #[test]
    fn generators_of_presets() {
        let g = |s: &str| generators(&parse_algebra_spec::<f64>(s).unwrap());
        assert_eq!(g("dual"), vec![1]);
        assert_eq!(g("jet:3"), vec![1]);
        assert_eq!(g("dual*dual"), vec![1, 2]);
        assert_eq!(g("jet:2:2"), vec![1, 2]);
        assert!(g("R").is_empty());
    }
}
