//! Admissible data and their model functions.
//!
//! A datum is a degree `d` and a list of degree-`d` homogeneous sections.
//! On a complex fiber its model function is measured against the
//! Fubini–Study metric, on the central fiber against the canonical
//! (max-norm) metric:
//!
//! ```text
//! φ_F(z, t) = log max_i |P_i(z, t)| − (d/2)·log Σ_j |z_j|²
//! g_F(ξ)    = max_i log |P_i|(ξ) − d·log max_j |w_j|(ξ)
//! ```

use num_integer::Integer;

use crate::berkovich::{homog_seminorm_point, BerkPoint};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::laurent::{ExtExp, RationalExp, C64};
use crate::parser::RationalMapFamily;
use crate::poly::HomogeneousPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleDatum {
    k: usize,
    degree: u32,
    sections: Vec<HomogeneousPoly>,
}

impl AdmissibleDatum {
    /// Sections must be forms of degree `d ≥ 1` in `k + 1` variables, not all zero.
    pub fn new(k: usize, degree: u32, sections: Vec<HomogeneousPoly>) -> Result<Self> {
        if sections.is_empty() {
            return Err(Error::Invalid(
                "admissible datum needs at least one section".into(),
            ));
        }
        if degree == 0 {
            return Err(Error::Invalid("admissible datum needs degree ≥ 1".into()));
        }
        for (i, s) in sections.iter().enumerate() {
            if s.nvars() != k + 1 {
                return Err(Error::Invalid(format!(
                    "section {i} has {} variables, expected {}",
                    s.nvars(),
                    k + 1
                )));
            }
            if s.degree() != degree {
                return Err(Error::Invalid(format!(
                    "inhomogeneous datum: section {i} has degree {}, expected {degree}",
                    s.degree()
                )));
            }
        }
        if sections.iter().all(|s| s.is_zero()) {
            return Err(Error::Invalid("all sections vanish".into()));
        }
        Ok(AdmissibleDatum {
            k,
            degree,
            sections,
        })
    }

    /// The coordinate datum `{w0, …, wk}`.
    pub fn coordinates(k: usize) -> Self {
        let sections = (0..=k)
            .map(|i| HomogeneousPoly::coordinate(k + 1, i))
            .collect();
        AdmissibleDatum {
            k,
            degree: 1,
            sections,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn sections(&self) -> &[HomogeneousPoly] {
        &self.sections
    }

    /// Smallest truncation order among all coefficients (`None` if all exact).
    pub fn trunc_order(&self) -> Option<RationalExp> {
        self.sections.iter().filter_map(|s| s.min_trunc()).min()
    }
}

/// Complex model function at `[z]` over parameter `t`; `−∞` where all sections vanish.
pub fn phi_complex(datum: &AdmissibleDatum, z: &[C64], t: C64) -> Result<f64> {
    if z.len() != datum.k + 1 {
        return Err(Error::Invalid(format!(
            "point has {} coordinates, datum lives on P^{}",
            z.len(),
            datum.k
        )));
    }
    if t == C64::new(0.0, 0.0) {
        return Err(Error::Domain("complex model function at t = 0".into()));
    }
    // rescale so the largest coordinate is 1: keeps powers in range
    let scale = z.iter().map(|w| w.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Invalid("zero homogeneous vector".into()));
    }
    let u: Vec<C64> = z.iter().map(|w| w / scale).collect();
    let mut best = f64::NEG_INFINITY;
    for s in &datum.sections {
        let v = s.eval(&u, t)?.norm();
        if v > 0.0 {
            best = best.max(v.ln());
        }
    }
    if best == f64::NEG_INFINITY {
        return Ok(best);
    }
    let norm2: f64 = u.iter().map(|w| w.norm_sqr()).sum();
    Ok(best - 0.5 * datum.degree as f64 * norm2.ln())
}

/// Exponent `q` with `g_F(ξ) = q·log r`; `+∞` if every section vanishes at `ξ`.
pub fn g_na_exponent(datum: &AdmissibleDatum, xi: &BerkPoint) -> Result<ExtExp> {
    let mut best = ExtExp::Infinite;
    for s in &datum.sections {
        best = best.min(homog_seminorm_point(s, xi)?);
    }
    Ok(best)
}

/// Non-Archimedean model function in natural-log units; `−∞` flags a common zero.
pub fn g_na(datum: &AdmissibleDatum, xi: &BerkPoint, r: f64) -> Result<f64> {
    Ok(g_na_exponent(datum, xi)?.times_log(r.ln()))
}

fn check_same_k(a: &AdmissibleDatum, b: &AdmissibleDatum) -> Result<()> {
    if a.k != b.k {
        return Err(Error::Invalid(format!(
            "data live on P^{} and P^{}",
            a.k, b.k
        )));
    }
    Ok(())
}

/// Tensor product: degree `d + d'`, all pairwise products of sections.
pub fn datum_tensor(a: &AdmissibleDatum, b: &AdmissibleDatum) -> Result<AdmissibleDatum> {
    check_same_k(a, b)?;
    let sections = a
        .sections
        .iter()
        .flat_map(|s| b.sections.iter().map(move |u| s.mul(u)))
        .collect();
    AdmissibleDatum::new(a.k, a.degree + b.degree, sections)
}

/// Datum of degree `δ = lcm(d, d')` whose model function is `max(δ/d·φ_F, δ/d'·φ_F')`.
pub fn datum_max(a: &AdmissibleDatum, b: &AdmissibleDatum) -> Result<AdmissibleDatum> {
    check_same_k(a, b)?;
    let delta = a.degree.lcm(&b.degree);
    let ea = delta / a.degree;
    let eb = delta / b.degree;
    let sections = a
        .sections
        .iter()
        .map(|s| s.pow(ea))
        .chain(b.sections.iter().map(|s| s.pow(eb)))
        .collect();
    AdmissibleDatum::new(a.k, delta, sections)
}

/// Homogeneous iterates `P^n = P ∘ P^{n−1}` of a family, `P^1 = P`.
pub fn family_iterates(family: &RationalMapFamily, n: u32) -> Result<Vec<[HomogeneousPoly; 2]>> {
    if n == 0 {
        return Err(Error::Invalid("iteration count must be ≥ 1".into()));
    }
    let base = [family.p0.clone(), family.p1.clone()];
    let mut out = vec![base.clone()];
    for _ in 1..n {
        let prev = out.last().unwrap();
        let next = [base[0].compose(&prev[..])?, base[1].compose(&prev[..])?];
        if next.iter().all(|p| p.is_zero()) {
            return Err(Error::Precision(format!(
                "iterate {} lost all known coefficients",
                out.len() + 1
            )));
        }
        out.push(next);
    }
    Ok(out)
}

/// The datum `F_n = {P^n_0, P^n_1}` of degree `d^n`.
///
/// Coefficients are composed symbolically; [`AdmissibleDatum::trunc_order`]
/// reports the precision left after composition.
pub fn iterate_datum(family: &RationalMapFamily, n: u32) -> Result<AdmissibleDatum> {
    let it = family_iterates(family, n)?.pop().unwrap();
    let degree = it[0].degree();
    AdmissibleDatum::new(1, degree, it.to_vec())
}

/// Numeric lift iteration at fixed `t`: returns `(u_n, L_n)` with
/// `P^n(z) = e^{L_n}·u_n` and `max |u_n| = 1`.
pub fn lift_orbit(coeffs: &[Vec<C64>; 2], z: [C64; 2], n: usize) -> Vec<([C64; 2], f64)> {
    let mut out = Vec::with_capacity(n + 1);
    let m = z[0].norm().max(z[1].norm());
    let mut u = [z[0] / m, z[1] / m];
    let mut l = m.ln();
    out.push((u, l));
    let d = coeffs[0].len() as f64 - 1.0;
    for _ in 0..n {
        let p = [eval_binary(&coeffs[0], u), eval_binary(&coeffs[1], u)];
        let m = p[0].norm().max(p[1].norm());
        l = d * l + m.ln();
        u = [p[0] / m, p[1] / m];
        out.push((u, l));
    }
    out
}

/// `Σ_j c_j w0^j w1^{d−j}` by Horner in the better-conditioned chart.
pub fn eval_binary(c: &[C64], w: [C64; 2]) -> C64 {
    let d = c.len() - 1;
    if w[1].norm() >= w[0].norm() {
        let z = w[0] / w[1];
        let mut acc = C64::new(0.0, 0.0);
        for cj in c.iter().rev() {
            acc = acc * z + cj;
        }
        acc * w[1].powu(d as u32)
    } else {
        let u = w[1] / w[0];
        let mut acc = C64::new(0.0, 0.0);
        for cj in c.iter() {
            acc = acc * u + cj;
        }
        acc * w[0].powu(d as u32)
    }
}

/// Per-step increments of the normalized model functions of the iterates.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyEstimate {
    /// `sup_z |d^{-(n+1)} φ_{F_{n+1}} − d^{-n} φ_{F_n}|` for `n = 1..=n_max`.
    pub sup_increments: Vec<f64>,
    /// `log |t|^{-1}`.
    pub log_inv_t: f64,
}

impl KeyEstimate {
    /// Successive ratios `sup_{n+1} / sup_n` (NaN where `sup_n = 0`).
    pub fn ratios(&self) -> Vec<f64> {
        self.sup_increments
            .windows(2)
            .map(|w| if w[0] == 0.0 { f64::NAN } else { w[1] / w[0] })
            .collect()
    }

    /// Smallest `C` with `sup_n ≤ C·d^{-n}·log|t|^{-1}` for all `n`.
    pub fn fitted_constant(&self, d: u32) -> f64 {
        self.sup_increments
            .iter()
            .enumerate()
            .map(|(i, s)| s * (d as f64).powi(i as i32 + 1) / self.log_inv_t)
            .fold(0.0, f64::max)
    }
}

/// Increments of `d^{-n}·φ_{F_n}` at parameter `t` over a grid of points.
///
/// Uses `d^{-(n+1)} φ_{F_{n+1}} − d^{-n} φ_{F_n} = d^{-(n+1)}·log max_i |P_i(u_n)|`
/// with `u_n` the max-normalized lift of `P^n(z)`; the Fubini–Study terms cancel.
pub fn key_estimate(
    family: &RationalMapFamily,
    t: C64,
    grid: &[[C64; 2]],
    n_max: usize,
    exec: Exec,
) -> Result<KeyEstimate> {
    let coeffs = [
        family.p0.binary_coeffs_at(t)?,
        family.p1.binary_coeffs_at(t)?,
    ];
    let d = family.degree as f64;
    let per_point = exec.map(grid, |z| {
        let orbit = lift_orbit(&coeffs, *z, n_max + 1);
        (1..=n_max)
            .map(|n| {
                let u = orbit[n].0;
                let m = eval_binary(&coeffs[0], u)
                    .norm()
                    .max(eval_binary(&coeffs[1], u).norm());
                (m.ln() / d.powi(n as i32 + 1)).abs()
            })
            .collect::<Vec<f64>>()
    });
    let mut sup = vec![0.0f64; n_max];
    for row in &per_point {
        for (s, v) in sup.iter_mut().zip(row) {
            if !v.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite increment at t = {t}: common zero of the lift"
                )));
            }
            *s = s.max(*v);
        }
    }
    Ok(KeyEstimate {
        sup_increments: sup,
        log_inv_t: -t.norm().ln(),
    })
}

/// `n` points of `ℙ¹` spread evenly on the Riemann sphere (Fibonacci lattice).
pub fn sphere_grid(n: usize) -> Vec<[C64; 2]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let theta = golden * i as f64;
            // stereographic: height y ↦ |z| = sqrt((1+y)/(1−y))
            let a = ((1.0 + y) / 2.0).sqrt();
            let b = ((1.0 - y) / 2.0).sqrt();
            [C64::from_polar(a, theta), C64::new(b, 0.0)]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berkovich::TypeIIPoint;
    use crate::parser::{parse_family, parse_sections};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn phi_examples() {
        let f = AdmissibleDatum::coordinates(1);
        let t = c(0.1);
        assert!(phi_complex(&f, &[c(1.0), c(0.0)], t).unwrap().abs() < 1e-15);
        let v = phi_complex(&f, &[c(1.0), c(1.0)], t).unwrap();
        assert!((v - (0.5f64).sqrt().ln()).abs() < 1e-15);
        let sq = parse_sections(&["w0^2"], 1, 2).unwrap();
        let v2 = phi_complex(&sq, &[c(1.0), c(1.0)], t).unwrap();
        assert!((v2 - 0.5f64.ln()).abs() < 1e-15);
        assert!((v2 - 2.0 * v).abs() < 1e-15);
    }

    #[test]
    fn phi_flags_common_zero() {
        let f = parse_sections(&["w0"], 1, 1).unwrap();
        assert_eq!(
            phi_complex(&f, &[c(0.0), c(1.0)], c(0.1)).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn g_na_at_gauss_point() {
        let r = 0.5;
        let xg = BerkPoint::TypeII(TypeIIPoint::gauss());
        let f = AdmissibleDatum::coordinates(1);
        assert_eq!(g_na(&f, &xg, r).unwrap(), 0.0);
        let f = parse_sections(&["t*w0", "t*w1"], 1, 1).unwrap();
        assert!((g_na(&f, &xg, r).unwrap() - r.ln()).abs() < 1e-15);
        let f = parse_sections(&["w0^2", "t*w1^2"], 1, 2).unwrap();
        assert_eq!(g_na(&f, &xg, r).unwrap(), 0.0);
    }

    #[test]
    fn tensor_and_max_degrees() {
        let f = AdmissibleDatum::coordinates(1);
        let ff = datum_tensor(&f, &f).unwrap();
        assert_eq!(ff.degree(), 2);
        assert_eq!(ff.sections().len(), 4);
        let g = parse_sections(&["w0^2 + w1^2", "t*w0*w1"], 1, 2).unwrap();
        let m = datum_max(&f, &g).unwrap();
        assert_eq!(m.degree(), 2);
        let h = parse_sections(&["w0^3"], 1, 3).unwrap();
        assert_eq!(datum_max(&g, &h).unwrap().degree(), 6);
    }

    #[test]
    fn symbolic_iterates() {
        let r = parse_family("[w0^2 : w1^2]").unwrap();
        let d3 = iterate_datum(&r, 3).unwrap();
        assert_eq!(d3.degree(), 8);
        assert_eq!(d3.sections()[0].to_string(), "w0^8");
        assert_eq!(d3.sections()[1].to_string(), "w1^8");
        let r = parse_family("[w0^2 : t*w1^2]").unwrap();
        let d2 = iterate_datum(&r, 2).unwrap();
        assert_eq!(d2.sections()[0].to_string(), "w0^4");
        assert_eq!(d2.sections()[1].to_string(), "t^3*w1^4");
    }

    #[test]
    fn lift_iteration_matches_symbolic() {
        let fam = parse_family("z^2 + 1/t").unwrap();
        let t = c(0.3);
        let coeffs = [
            fam.p0.binary_coeffs_at(t).unwrap(),
            fam.p1.binary_coeffs_at(t).unwrap(),
        ];
        let z = [C64::new(0.4, 0.2), c(1.0)];
        let orbit = lift_orbit(&coeffs, z, 3);
        let it = iterate_datum(&fam, 3).unwrap();
        let p0 = it.sections()[0].eval(&z, t).unwrap();
        let p1 = it.sections()[1].eval(&z, t).unwrap();
        let (u, l) = orbit[3];
        let e = l.exp();
        assert!(((u[0] * e - p0) / p0).norm() < 1e-10);
        assert!(((u[1] * e - p1) / p1).norm() < 1e-10);
    }

    #[test]
    fn key_estimate_trivial_for_power_map() {
        let fam = parse_family("z^2").unwrap();
        let k = key_estimate(&fam, c(0.5), &sphere_grid(200), 5, Exec::Sequential).unwrap();
        assert!(k.sup_increments.iter().all(|&s| s < 1e-15));
    }

    #[test]
    fn sphere_grid_is_normalized() {
        for w in sphere_grid(50) {
            assert!(((w[0].norm_sqr() + w[1].norm_sqr()) - 1.0).abs() < 1e-12);
        }
    }
}
