use crate::cxdyn::roots::poly_roots;
use crate::error::{Error, Result};
use crate::laurent::{ExtExp, LaurentSeries, RationalExp, C64};
use crate::poly::UniPoly;

/// Relative size below which a coefficient produced by a root shift counts as
/// rounding noise and is dropped.
const NOISE: f64 = 1e-9;

/// Roots clustering closer than this (relative) are treated as one multiple
/// root. An eigenvalue solver spreads an `m`-fold root by about `ε^{1/m}`, so
/// this has to sit well above `1e-16^{1/4}`.
const CLUSTER: f64 = 1e-3;

/// Puiseux roots of `f`, each correct for all exponents below `target`.
///
/// Roots are returned with multiplicity as exact series holding the expansion
/// up to (not including) `target`; a root of order `≥ target` is returned as
/// zero. Coefficients of `f` must be exact.
pub fn puiseux_roots(f: &UniPoly, target: RationalExp) -> Result<Vec<LaurentSeries>> {
    if f.coeffs().iter().any(|c| !c.is_exact()) {
        return Err(Error::Unsupported(
            "Puiseux expansion of a polynomial with truncated coefficients".into(),
        ));
    }
    if f.is_zero() {
        return Err(Error::Invalid("roots of the zero polynomial".into()));
    }
    let mut out = Vec::new();
    expand(f, &LaurentSeries::zero(), None, target, &mut out, 0)?;
    Ok(out)
}

fn clean(f: &UniPoly) -> UniPoly {
    let m = f
        .coeffs()
        .iter()
        .map(|c| c.max_abs_coeff())
        .fold(0.0, f64::max);
    let cut = NOISE * m;
    UniPoly::new(
        f.coeffs()
            .iter()
            .map(|c| LaurentSeries::from_terms(c.terms().filter(|(_, a)| a.norm() > cut), None))
            .collect(),
    )
}

/// Lower convex hull of `(j, ord f_j)`, as a list of vertex indices.
fn newton_polygon(points: &[(usize, RationalExp)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        while hull.len() >= 2 {
            let (x1, y1) = points[hull[hull.len() - 2]];
            let (x2, y2) = points[hull[hull.len() - 1]];
            // drop the middle point if it is on or above the chord
            let lhs = (y2 - y1) * (x as i64 - x1 as i64);
            let rhs = (y - y1) * (x2 as i64 - x1 as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

fn expand(
    f: &UniPoly,
    prefix: &LaurentSeries,
    gamma_min: Option<RationalExp>,
    target: RationalExp,
    out: &mut Vec<LaurentSeries>,
    depth: usize,
) -> Result<()> {
    if depth > 256 {
        return Err(Error::Numerical(
            "Puiseux expansion did not terminate".into(),
        ));
    }
    let coeffs = f.coeffs();
    let points: Vec<(usize, RationalExp)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(j, c)| match c.ord() {
            ExtExp::Finite(v) if !c.is_zero() => Some((j, v)),
            _ => None,
        })
        .collect();
    let Some(&(m0, _)) = points.first() else {
        return Ok(());
    };
    // z' = 0 is an exact root of multiplicity m0
    for _ in 0..m0 {
        out.push(prefix.clone());
    }
    let hull = newton_polygon(&points);
    for w in hull.windows(2) {
        let (j0, v0) = points[w[0]];
        let (j1, v1) = points[w[1]];
        let gamma = (v0 - v1) / RationalExp::from_integer((j1 - j0) as i64);
        if gamma_min.is_some_and(|g| gamma <= g) {
            continue;
        }
        let mult = j1 - j0;
        if gamma >= target {
            for _ in 0..mult {
                out.push(prefix.clone());
            }
            continue;
        }
        // edge polynomial Σ lc(f_j) X^{j − j0} over points on the edge
        let mut edge = vec![C64::new(0.0, 0.0); mult + 1];
        for &(j, v) in points.iter().filter(|(j, _)| *j >= j0 && *j <= j1) {
            if v + gamma * j as i64 == v0 + gamma * j0 as i64 {
                edge[j - j0] = coeffs[j].leading().unwrap().1;
            }
        }
        for (c, m) in cluster(&edge)? {
            let step = LaurentSeries::monomial(c, gamma);
            let next_prefix = prefix + &step;
            let shifted = clean(&f.taylor_shift(&step));
            let before = out.len();
            expand(&shifted, &next_prefix, Some(gamma), target, out, depth + 1)?;
            let found = out.len() - before;
            if found != m {
                return Err(Error::Numerical(format!(
                    "Puiseux branch at {next_prefix} produced {found} roots, expected {m}"
                )));
            }
        }
    }
    Ok(())
}

/// Nonzero roots of the edge polynomial grouped into clusters with multiplicities.
fn cluster(edge: &[C64]) -> Result<Vec<(C64, usize)>> {
    let roots = poly_roots(edge)?;
    let mut groups: Vec<(Vec<C64>, C64)> = Vec::new();
    for z in roots {
        match groups
            .iter_mut()
            .find(|(_, c)| (z - *c).norm() <= CLUSTER * c.norm().max(1.0))
        {
            Some((members, c)) => {
                members.push(z);
                *c = members.iter().sum::<C64>() / members.len() as f64;
            }
            None => groups.push((vec![z], z)),
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for (members, mean) in groups {
        let m = members.len();
        let c = if m > 1 {
            refine_multiple(edge, mean, m)
        } else {
            mean
        };
        out.push((c, m));
    }
    Ok(out)
}

/// A root of multiplicity `m` is a simple root of the `(m−1)`-th derivative.
fn refine_multiple(p: &[C64], guess: C64, m: usize) -> C64 {
    let mut d: Vec<C64> = p.to_vec();
    for _ in 0..m - 1 {
        d = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, a)| a * j as f64)
            .collect();
    }
    let dd: Vec<C64> = d
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, a)| a * j as f64)
        .collect();
    let eval = |c: &[C64], z: C64| {
        c.iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, a| acc * z + a)
    };
    let mut z = guess;
    for _ in 0..20 {
        let den = eval(&dd, z);
        if den.norm() == 0.0 {
            break;
        }
        let step = eval(&d, z) / den;
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, rat};
    use crate::parser::parse_homogeneous;
    use crate::poly::Chart;

    fn uni(s: &str) -> UniPoly {
        parse_homogeneous(s, 2, None)
            .unwrap()
            .dehomogenize(Chart::Z)
            .unwrap()
    }

    fn contains(roots: &[LaurentSeries], want: &LaurentSeries) -> bool {
        roots.iter().any(|r| r.approx_eq(want, 1e-9))
    }

    #[test]
    fn square_roots_of_inverse_t() {
        let roots = puiseux_roots(&uni("w0^2 + t^-1*w1^2"), int(4)).unwrap();
        assert_eq!(roots.len(), 2);
        for s in [1.0, -1.0] {
            let want = LaurentSeries::monomial(C64::new(0.0, s), rat(-1, 2));
            assert!(contains(&roots, &want), "{roots:?}");
        }
    }

    #[test]
    fn root_with_infinite_expansion() {
        // z^2 - (1 + t): z = ±(1 + t/2 - t^2/8 + ...)
        let roots = puiseux_roots(&uni("w0^2 - (1 + t)*w1^2"), int(3)).unwrap();
        assert_eq!(roots.len(), 2);
        let want: LaurentSeries = "1 + 0.5*t - 0.125*t^2".parse().unwrap();
        assert!(contains(&roots, &want), "{roots:?}");
    }

    #[test]
    fn multiple_and_zero_roots() {
        // z^2 (z - t)^2
        let roots = puiseux_roots(&uni("w0^4 - 2*t*w0^3*w1 + t^2*w0^2*w1^2"), int(5)).unwrap();
        assert_eq!(roots.len(), 4);
        assert_eq!(roots.iter().filter(|r| r.is_zero()).count(), 2);
        assert_eq!(
            roots
                .iter()
                .filter(|r| r.approx_eq(&LaurentSeries::t(), 1e-9))
                .count(),
            2
        );
    }

    #[test]
    fn ramified_root() {
        // z^2 - t
        let roots = puiseux_roots(&uni("w0^2 - t*w1^2"), int(2)).unwrap();
        let half = LaurentSeries::monomial(C64::new(1.0, 0.0), rat(1, 2));
        assert!(contains(&roots, &half));
        assert!(contains(&roots, &(-&half)));
    }

    #[test]
    fn newton_polygon_hull() {
        let pts = vec![(0, int(2)), (1, int(3)), (2, int(0)), (3, int(1))];
        assert_eq!(newton_polygon(&pts), vec![0, 2, 3]);
    }
}
