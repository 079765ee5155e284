//! Parsers for command-line values: complex numbers, 2x2 matrices and lists.

use num_complex::Complex64;
use pseudoboson::gl2_rep::GL2Matrix;
use std::str::FromStr;

use crate::CliError;

/// Accepts `re`, `re:im`, or algebraic forms such as `1+2i`, `-i`, `0.5i`.
pub fn complex(s: &str) -> Result<Complex64, CliError> {
    let t = s.trim();
    let bad = || CliError::Config(format!("cannot parse complex number {s:?}"));
    if let Some((re, im)) = t.split_once(':') {
        let re = f64::from_str(re.trim()).map_err(|_| bad())?;
        let im = f64::from_str(im.trim()).map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    let value = match t {
        "i" | "+i" => Complex64::new(0.0, 1.0),
        "-i" => Complex64::new(0.0, -1.0),
        _ => {
            let fixed = t.replace("+i", "+1i").replace("-i", "-1i");
            Complex64::from_str(&fixed).map_err(|_| bad())?
        }
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Four comma-separated complex entries in row-major order.
pub fn matrix(s: &str) -> Result<GL2Matrix, CliError> {
    let entries: Vec<Complex64> = s.split(',').map(complex).collect::<Result<_, _>>()?;
    let e: [Complex64; 4] = entries
        .try_into()
        .map_err(|_| CliError::Config(format!("matrix {s:?} must have exactly four entries")))?;
    Ok(GL2Matrix::from_entries(e)?)
}

/// Comma-separated list of values.
pub fn list<T: FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| CliError::Config(format!("bad list item {p:?} in {s:?}"))))
        .collect()
}

/// Criterion ids: comma-separated values or inclusive `a-b` ranges.
pub fn id_list(s: &str) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let bad = || CliError::Config(format!("bad criterion id {part:?}"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u8, u8) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.iter().any(|&id| !(1..=11).contains(&id)) {
        return Err(CliError::Config(format!("criterion ids must lie in 1..=11, got {s:?}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(complex("1:-2.5").unwrap(), c(1.0, -2.5));
        assert_eq!(complex("1+1i").unwrap(), c(1.0, 1.0));
        assert_eq!(complex("1-i").unwrap(), c(1.0, -1.0));
        assert_eq!(complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(complex("0.5i").unwrap(), c(0.0, 0.5));
        assert!(complex("x").is_err());
        assert!(complex("nan").is_err());
    }

    #[test]
    fn matrices_and_lists() {
        let g = matrix("1,1,0,1").unwrap();
        assert_eq!(g.get(1, 2), Complex64::new(1.0, 0.0));
        assert!(matrix("1,1,1,1").is_err());
        assert!(matrix("1,2,3").is_err());
        assert_eq!(list::<f64>("0.2, 0.5").unwrap(), vec![0.2, 0.5]);
        assert_eq!(id_list("1-3,7").unwrap(), vec![1, 2, 3, 7]);
        assert!(id_list("12").is_err());
    }
}
