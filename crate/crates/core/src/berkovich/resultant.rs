use crate::error::{Error, Result};
use crate::laurent::{ExtExp, LaurentSeries, RationalExp, C64};
use crate::parser::RationalMapFamily;

/// Relative order kept when dividing by elimination pivots.
const PIVOT_PRECISION: i64 = 32;

/// Sylvester matrix of two binary forms given by coefficient lists
/// (`c[j]` ↦ `w0^j w1^{d−j}`), rows ordered from the top power down.
pub fn sylvester_matrix(a: &[LaurentSeries], b: &[LaurentSeries]) -> Vec<Vec<LaurentSeries>> {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (coeffs, shifts) in [(a, n), (b, m)] {
        let deg = coeffs.len() - 1;
        for i in 0..shifts {
            let mut row = vec![LaurentSeries::zero(); size];
            for (k, c) in coeffs.iter().enumerate() {
                // coefficient of w0^k sits in column (deg − k) + i
                row[deg - k + i] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// t-adic order of the determinant, by elimination with minimal-order pivots.
///
/// Returns `+∞` for a singular matrix.
pub fn determinant_order(mut m: Vec<Vec<LaurentSeries>>) -> Result<ExtExp> {
    let n = m.len();
    let mut total = RationalExp::from_integer(0);
    for col in 0..n {
        let mut pivot: Option<(usize, RationalExp, f64)> = None;
        let mut unknown = false;
        for (row, r) in m.iter().enumerate().skip(col) {
            let e = &r[col];
            if e.is_zero() {
                unknown |= !e.is_exact();
                continue;
            }
            let (v, c) = e.leading().unwrap();
            let better = match pivot {
                None => true,
                Some((_, pv, pc)) => v < pv || (v == pv && c.norm() > pc),
            };
            if better {
                pivot = Some((row, v, c.norm()));
            }
        }
        let Some((prow, v, _)) = pivot else {
            if unknown {
                return Err(Error::Precision(
                    "resultant column known only to truncation order".into(),
                ));
            }
            return Ok(ExtExp::Infinite);
        };
        // an unknown entry could still undercut the pivot order
        for r in m.iter().skip(col) {
            if r[col].is_zero() {
                if let Some(tr) = r[col].trunc_order() {
                    if tr <= v {
                        return Err(Error::Precision(
                            "elimination pivot not determined by known terms".into(),
                        ));
                    }
                }
            }
        }
        m.swap(col, prow);
        total += v;
        let inv = m[col][col].inv_to(-v + RationalExp::from_integer(PIVOT_PRECISION))?;
        let pivot_row = m[col].clone();
        for r in m.iter_mut().skip(col + 1) {
            if r[col].is_zero() && r[col].is_exact() {
                continue;
            }
            let factor = &r[col] * &inv;
            for j in (col + 1)..n {
                if pivot_row[j].is_zero() && pivot_row[j].is_exact() {
                    continue;
                }
                let sub = &factor * &pivot_row[j];
                r[j] = &r[j] - &sub;
            }
            r[col] = LaurentSeries::zero();
        }
    }
    Ok(ExtExp::Finite(total))
}

/// Order of the resultant `Res(P0, P1)` as a series in `t`.
///
/// A vanishing resultant means the pair has a common factor for generic `t`.
pub fn resultant_valuation(family: &RationalMapFamily) -> Result<RationalExp> {
    let a = family.p0.binary_coeffs()?;
    let b = family.p1.binary_coeffs()?;
    match determinant_order(sylvester_matrix(&a, &b))? {
        ExtExp::Finite(v) => Ok(v),
        ExtExp::Infinite => Err(Error::Degenerate(format!(
            "resultant of {family} vanishes identically"
        ))),
    }
}

/// Complex Sylvester resultant at a fixed parameter value (for specialization checks).
pub fn resultant_complex(a: &[C64], b: &[C64]) -> C64 {
    let sa: Vec<LaurentSeries> = a.iter().map(|&c| LaurentSeries::constant(c)).collect();
    let sb: Vec<LaurentSeries> = b.iter().map(|&c| LaurentSeries::constant(c)).collect();
    let rows = sylvester_matrix(&sa, &sb);
    let n = rows.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j].coeff(RationalExp::from_integer(0)));
    m.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::int;
    use crate::parser::parse_family;

    fn pair(a: &str, b: &str) -> RationalMapFamily {
        let p0 = crate::parser::parse_homogeneous(a, 2, None).unwrap();
        let p1 = crate::parser::parse_homogeneous(b, 2, None).unwrap();
        RationalMapFamily::new(p0, p1, "test").unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(resultant_valuation(&pair("w0^2", "w1^2")).unwrap(), int(0));
        assert_eq!(
            resultant_valuation(&pair("t*w0^2", "t*w1^2")).unwrap(),
            int(4)
        );
        assert!(matches!(
            resultant_valuation(&pair("w0*w1", "w0*w1")),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn quadratic_polynomials_have_unit_resultant() {
        let f = parse_family("z^2 + 1/t").unwrap();
        assert_eq!(resultant_valuation(&f).unwrap(), int(0));
        // Res(w0^2 - t w1^2, w0 w1) = Res(., w0)·Res(., w1) = (-t)·1
        let f = parse_family("(z^2 - t)/z").unwrap();
        assert_eq!(resultant_valuation(&f).unwrap(), int(1));
    }

    #[test]
    fn complex_resultant_matches_roots() {
        // Res(z^2 - 1, z - 2) with the second form padded to degree 2: w0 w1 - 2 w1^2
        let a = [C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let b = [C64::new(-2.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let r = resultant_complex(&a, &b);
        // B = w1·(w0 − 2 w1), so |Res| = |A(1, 0)|·|A(2, 1)| = 3
        assert!((r.norm() - 3.0).abs() < 1e-12);
    }
}
