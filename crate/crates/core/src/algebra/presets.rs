use std::path::Path;

use super::monomial::monomial_quotient_table;
use super::{parse_table, tensor_product, AlgebraError, WeilAlgebra};
use crate::scalar::Scalar;

fn build<T: Scalar>(name: &str, num_vars: usize, excluded: &[Vec<u32>]) -> WeilAlgebra<T> {
    let t = monomial_quotient_table(name, num_vars, excluded).expect("preset ideal is cofinite");
    WeilAlgebra::from_table(t).expect("preset algebra validates")
}

/// `R` itself: the one-dimensional Weil algebra with `N = 0`.
pub fn reals<T: Scalar>() -> WeilAlgebra<T> {
    build("R", 0, &[])
}

/// Dual numbers `R[x]/(x²)`.
pub fn dual_numbers<T: Scalar>() -> WeilAlgebra<T> {
    build("dual", 1, &[vec![2]])
}

/// `r`-jets `R[x]/(x^{r+1})`.
pub fn jet<T: Scalar>(r: u32) -> WeilAlgebra<T> {
    build(&format!("jet:{r}"), 1, &[vec![r + 1]])
}

/// Jets in `k` variables up to total degree `r`.
pub fn multivariate_jet<T: Scalar>(r: u32, k: usize) -> WeilAlgebra<T> {
    let mut excluded = Vec::new();
    let mut stack = vec![(Vec::<u32>::new(), r + 1)];
    while let Some((prefix, rest)) = stack.pop() {
        if prefix.len() + 1 == k {
            let mut m = prefix;
            m.push(rest);
            excluded.push(m);
            continue;
        }
        for e in 0..=rest {
            let mut m = prefix.clone();
            m.push(e);
            stack.push((m, rest - e));
        }
    }
    if k == 0 {
        return reals();
    }
    build(&format!("jet:{r}:{k}"), k, &excluded)
}

fn parse_preset<T: Scalar>(word: &str) -> Result<WeilAlgebra<T>, AlgebraError> {
    let bad = || AlgebraError::UnknownSpec(word.to_string());
    let parts: Vec<&str> = word.split(':').collect();
    match parts.as_slice() {
        ["R"] | ["reals"] => Ok(reals()),
        ["dual"] => Ok(dual_numbers()),
        ["jet", r] => Ok(jet(r.parse().map_err(|_| bad())?)),
        ["jet", r, k] => {
            let r: u32 = r.parse().map_err(|_| bad())?;
            let k: usize = k.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            Ok(multivariate_jet(r, k))
        }
        _ => Err(bad()),
    }
}

/// Resolves an algebra spec: a preset (`R`, `dual`, `jet:<r>`, `jet:<r>:<k>`),
/// a `*`-separated tensor product of presets (`dual*dual`), or the path of a
/// serialized algebra file.
pub fn parse_algebra_spec<T: Scalar>(spec: &str) -> Result<WeilAlgebra<T>, AlgebraError> {
    let spec = spec.trim();
    let factors: Result<Vec<WeilAlgebra<T>>, _> = spec.split('*').map(|w| parse_preset(w.trim())).collect();
    match factors {
        Ok(factors) => {
            let mut iter = factors.into_iter();
            let first = iter.next().ok_or_else(|| AlgebraError::UnknownSpec(spec.to_string()))?;
            iter.try_fold(first, |acc, f| tensor_product(&acc, &f))
        }
        Err(e) => {
            let path = Path::new(spec);
            if path.is_file() {
                let text = std::fs::read_to_string(path)
                    .map_err(|err| AlgebraError::Parse { line: 0, msg: err.to_string() })?;
                WeilAlgebra::from_table(parse_table(&text)?)
            } else {
                Err(e)
            }
        }
    }
}
