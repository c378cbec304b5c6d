//! Complex dynamics at a fixed parameter: specialization, backward-orbit
//! sampling of the measure of maximal entropy, Monte Carlo integration and
//! Lyapunov exponents.
//!
//! Points of `ℙ¹(ℂ)` are unit vectors `[w0, w1]` in `ℂ²`.

pub mod roots;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::admissible::eval_binary;
use crate::berkovich::resultant_complex;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::laurent::C64;
use crate::parser::RationalMapFamily;

pub use roots::{binary_roots, poly_roots, MAX_DEGREE};

/// Relative size of the resultant below which a specialization is degenerate.
pub const RESULTANT_TOL: f64 = 1e-12;

/// Preimage sets tighter than this (chordal) count as collapsed.
const COLLAPSE_SPREAD: f64 = 1e-9;
const COLLAPSE_STEPS: usize = 3;
const MAX_RESTARTS: usize = 10;

/// Share of excluded samples above which an integral is flagged.
pub const EXCLUDED_WARN: f64 = 0.01;

/// A degree-`d` rational map of `ℙ¹(ℂ)` given by a homogeneous lift.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMapC {
    degree: u32,
    p0: Vec<C64>,
    p1: Vec<C64>,
    /// Binary coefficients of `∂0P0·∂1P1 − ∂1P0·∂0P1` (degree `2d − 2`).
    jac: Vec<C64>,
}

fn conv(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `∂/∂w0` and `∂/∂w1` of a binary form, as binary forms of degree `d − 1`.
fn partials(c: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let d = c.len() - 1;
    let d0 = (1..=d).map(|j| c[j] * j as f64).collect();
    let d1 = (0..d).map(|j| c[j] * (d - j) as f64).collect();
    (d0, d1)
}

pub fn normalize(w: [C64; 2]) -> [C64; 2] {
    let n = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    [w[0] / n, w[1] / n]
}

/// Chordal distance between two unit vectors.
pub fn chordal(a: [C64; 2], b: [C64; 2]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).norm()
}

/// The point `[z : 1]`, unit-normalized.
pub fn point(z: C64) -> [C64; 2] {
    normalize([z, C64::new(1.0, 0.0)])
}

/// `|Res(P0, P1)| / (max|P0|·max|P1|)^d`, maximized over rescalings
/// `w0 ↦ λ·w0` (degeneracy does not depend on the coordinate scale, this
/// ratio does).
pub fn relative_resultant(p0: &[C64], p1: &[C64]) -> f64 {
    let d = p0.len() as i32 - 1;
    (-48..=48)
        .map(|k| {
            let lambda = 10f64.powf(k as f64 / 4.0);
            let scale = |p: &[C64]| -> Vec<C64> {
                p.iter()
                    .enumerate()
                    .map(|(j, c)| c * lambda.powi(j as i32))
                    .collect()
            };
            let (a, b) = (scale(p0), scale(p1));
            let s0 = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let s1 = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
            resultant_complex(&a, &b).norm() / (s0 * s1).powi(d)
        })
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max)
}

impl RationalMapC {
    /// Map from binary coefficients (`c[j]` ↦ `w0^j w1^{d−j}`).
    pub fn new(p0: Vec<C64>, p1: Vec<C64>) -> Result<Self> {
        if p0.len() != p1.len() || p0.len() < 3 {
            return Err(Error::Invalid(format!(
                "components of lengths {} and {}; need one degree ≥ 2",
                p0.len(),
                p1.len()
            )));
        }
        if p0.iter().chain(&p1).any(|c| !c.is_finite()) {
            return Err(Error::Numerical("non-finite map coefficient".into()));
        }
        let degree = p0.len() as u32 - 1;
        if degree as usize > MAX_DEGREE {
            return Err(Error::Unsupported(format!(
                "degree {degree} > {MAX_DEGREE}"
            )));
        }
        let ratio = relative_resultant(&p0, &p1);
        if ratio.is_nan() || ratio <= RESULTANT_TOL {
            return Err(Error::Degenerate(format!(
                "relative resultant {ratio:.3e} below {RESULTANT_TOL:.0e}"
            )));
        }
        let (a0, a1) = partials(&p0);
        let (b0, b1) = partials(&p1);
        let jac: Vec<C64> = conv(&a0, &b1)
            .into_iter()
            .zip(conv(&a1, &b0))
            .map(|(x, y)| x - y)
            .collect();
        Ok(RationalMapC {
            degree,
            p0,
            p1,
            jac,
        })
    }

    /// Polynomial `Σ a_j z^j` of degree `d ≥ 2`.
    pub fn polynomial(a: &[C64]) -> Result<Self> {
        let d = a.len() - 1;
        let mut p1 = vec![C64::new(0.0, 0.0); d + 1];
        p1[0] = C64::new(1.0, 0.0);
        Self::new(a.to_vec(), p1)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> [&[C64]; 2] {
        [&self.p0, &self.p1]
    }

    /// `P1 = c·w1^d`.
    pub fn is_polynomial(&self) -> bool {
        self.p1[1..].iter().all(|c| c.norm() == 0.0)
    }

    /// Image of a point, unit-normalized.
    pub fn apply(&self, w: [C64; 2]) -> [C64; 2] {
        normalize(self.lift(w))
    }

    pub fn lift(&self, w: [C64; 2]) -> [C64; 2] {
        [eval_binary(&self.p0, w), eval_binary(&self.p1, w)]
    }

    /// The `d` preimages of `y` with multiplicity.
    pub fn preimages(&self, y: [C64; 2]) -> Result<Vec<[C64; 2]>> {
        // P(w) ∥ y  ⇔  y1·P0(w) − y0·P1(w) = 0
        let h: Vec<C64> = self
            .p0
            .iter()
            .zip(&self.p1)
            .map(|(a, b)| y[1] * a - y[0] * b)
            .collect();
        binary_roots(&h)
            .map_err(|e| Error::Numerical(format!("preimages of [{} : {}]: {e}", y[0], y[1])))
    }

    /// `log‖det dR‖(w) = log(|J(w)|·‖w‖² / (d·‖P(w)‖²))`, the log of the
    /// spherical derivative.
    pub fn log_det_norm(&self, w: [C64; 2]) -> f64 {
        let w = normalize(w);
        let p = self.lift(w);
        let j = eval_binary(&self.jac, w).norm();
        let pn = p[0].norm_sqr() + p[1].norm_sqr();
        j.ln() - (self.degree as f64).ln() - pn.ln()
    }
}

/// The map `R_t` of a family at a fixed `t`.
pub fn specialize(family: &RationalMapFamily, t: C64) -> Result<RationalMapC> {
    if t.norm() == 0.0 {
        return Err(Error::Domain("specialization at t = 0".into()));
    }
    let p0 = family.p0.binary_coeffs_at(t)?;
    let p1 = family.p1.binary_coeffs_at(t)?;
    RationalMapC::new(p0, p1).map_err(|e| match e {
        Error::Degenerate(m) => Error::Degenerate(format!("{family} at t = {t}: {m}")),
        other => other,
    })
}

/// Backward-orbit samples with their provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub points: Vec<[C64; 2]>,
    pub seed: u64,
    pub n_burn: usize,
    pub n_keep: usize,
    /// Perturbed restarts after landing on an exceptional orbit.
    pub restarts: usize,
}

/// One CSV row of a [`SampleSet`]: the affine coordinate in the better chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub re: f64,
    pub im: f64,
    /// `z` for `w0/w1`, `u` for `w1/w0`.
    pub chart: String,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rows(&self) -> Vec<SampleRow> {
        self.points
            .iter()
            .map(|w| {
                let (v, chart) = if w[1].norm() >= w[0].norm() {
                    (w[0] / w[1], "z")
                } else {
                    (w[1] / w[0], "u")
                };
                SampleRow {
                    re: v.re,
                    im: v.im,
                    chart: chart.into(),
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Random backward orbit choosing one of the `d` preimages uniformly per step.
///
/// The first `n_burn` points are discarded. When the preimage set stays
/// collapsed for several steps the chain is near an exceptional point and is
/// restarted from a perturbed start.
pub fn backward_sample(
    map: &RationalMapC,
    seed: u64,
    n_burn: usize,
    n_keep: usize,
    start: [C64; 2],
) -> Result<SampleSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut restarts = 0;
    let mut y = normalize(start);
    'chain: loop {
        let mut points = Vec::with_capacity(n_keep);
        let mut collapsed = 0;
        for step in 0..n_burn + n_keep {
            let pre = map.preimages(y)?;
            let spread = pre.iter().map(|p| chordal(*p, pre[0])).fold(0.0, f64::max);
            collapsed = if spread < COLLAPSE_SPREAD {
                collapsed + 1
            } else {
                0
            };
            if collapsed >= COLLAPSE_STEPS {
                restarts += 1;
                if restarts > MAX_RESTARTS {
                    return Err(Error::Numerical(format!(
                        "backward orbit keeps collapsing near [{} : {}]",
                        y[0], y[1]
                    )));
                }
                let kick = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                y = normalize([start[0] + kick, start[1] + kick * 0.5]);
                continue 'chain;
            }
            y = pre[rng.random_range(0..pre.len())];
            if step >= n_burn {
                points.push(y);
            }
        }
        return Ok(SampleSet {
            points,
            seed,
            n_burn,
            n_keep,
            restarts,
        });
    }
}

/// Independent chains with seeds `seed, seed+1, …`, concatenated in order.
pub fn backward_sample_chains(
    map: &RationalMapC,
    seed: u64,
    chains: usize,
    n_burn: usize,
    n_keep: usize,
    start: [C64; 2],
    exec: Exec,
) -> Result<SampleSet> {
    let chains = chains.max(1);
    let per = n_keep.div_ceil(chains);
    let seeds: Vec<u64> = (0..chains as u64).map(|i| seed.wrapping_add(i)).collect();
    let sets = exec.try_map(&seeds, |&s| backward_sample(map, s, n_burn, per, start))?;
    let mut points = Vec::with_capacity(per * chains);
    let mut restarts = 0;
    for s in sets {
        points.extend(s.points);
        restarts += s.restarts;
    }
    points.truncate(n_keep);
    Ok(SampleSet {
        points,
        seed,
        n_burn,
        n_keep,
        restarts,
    })
}

/// Monte Carlo estimate with diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub mean: f64,
    pub stderr: f64,
    pub n_used: usize,
    pub n_excluded: usize,
    /// More than 1% of the samples were excluded as non-finite.
    pub warning: bool,
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + comp
}

fn mean(xs: &[f64]) -> f64 {
    neumaier_sum(xs.iter().copied()) / xs.len() as f64
}

/// Number of contiguous batches for the batch-means standard error.
const BATCHES: usize = 32;

/// Mean of `f` over the samples, with a batch-means standard error that
/// accounts for correlation along the chain.
pub fn integrate_mu<F>(f: F, samples: &SampleSet) -> Result<Integral>
where
    F: Fn([C64; 2]) -> f64,
{
    let values: Vec<f64> = samples.points.iter().map(|w| f(*w)).collect();
    integrate_values(&values)
}

/// [`integrate_mu`] on precomputed values.
pub fn integrate_values(values: &[f64]) -> Result<Integral> {
    let used: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let n_excluded = values.len() - used.len();
    if used.is_empty() {
        return Err(Error::Numerical("no finite samples to integrate".into()));
    }
    let n = used.len();
    let m = mean(&used);
    let stderr = if n >= 10 * BATCHES {
        let size = n / BATCHES;
        let bm: Vec<f64> = used.chunks_exact(size).take(BATCHES).map(mean).collect();
        let mm = mean(&bm);
        let var = neumaier_sum(bm.iter().map(|b| (b - mm) * (b - mm))) / (BATCHES - 1) as f64;
        (var / BATCHES as f64).sqrt()
    } else if n > 1 {
        let var = neumaier_sum(used.iter().map(|v| (v - m) * (v - m))) / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(Integral {
        mean: m,
        stderr,
        n_used: n,
        n_excluded,
        warning: n_excluded as f64 > EXCLUDED_WARN * values.len() as f64,
    })
}

/// Lyapunov exponent `∫ log‖det dR‖ dμ` estimated on backward samples.
pub fn lyapunov_complex(map: &RationalMapC, samples: &SampleSet) -> Result<Integral> {
    integrate_mu(|w| map.log_det_norm(w), samples)
}

/// Escape-rate Green function `lim d^{-n} log⁺|p^n(z)|` of a polynomial.
pub fn escape_green(a: &[C64], z: C64) -> f64 {
    let d = a.len() - 1;
    let lead = a[d];
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max) / lead.norm();
    let escape = 1e30 * (1.0 + scale);
    let log_lead = lead.norm().ln() / (d as f64 - 1.0);
    let mut z = z;
    let mut factor = 1.0;
    for _ in 0..10_000 {
        if z.norm() > escape {
            return factor * (z.norm().ln() + log_lead);
        }
        z = a
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
        factor /= d as f64;
        if !z.is_finite() {
            break;
        }
    }
    if z.is_finite() {
        0.0
    } else {
        f64::NAN
    }
}

/// `log d + Σ_c G(c)` over finite critical points of the polynomial `R_t`.
pub fn przytycki_oracle(family: &RationalMapFamily, t: C64) -> Result<f64> {
    let map = specialize(family, t)?;
    if !map.is_polynomial() {
        return Err(Error::Unsupported(format!("{family} is not polynomial")));
    }
    let d = map.degree as usize;
    let c = map.p1[0];
    let a: Vec<C64> = map.p0.iter().map(|x| x / c).collect();
    let deriv: Vec<C64> = (1..=d).map(|j| a[j] * j as f64).collect();
    let crit = poly_roots(&deriv)?;
    let sum: f64 = crit.iter().map(|&z| escape_green(&a, z)).sum();
    if !sum.is_finite() {
        return Err(Error::Numerical(format!(
            "escape iteration overflowed at t = {t}"
        )));
    }
    Ok((d as f64).ln() + sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_family;
    use std::f64::consts::LN_2;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn square() -> RationalMapC {
        RationalMapC::polynomial(&[c(0.0), c(0.0), c(1.0)]).unwrap()
    }

    #[test]
    fn specialize_examples() {
        let f = parse_family("z^2 + 1/t").unwrap();
        let m = specialize(&f, c(0.1)).unwrap();
        let [p0, p1] = m.coeffs();
        assert!((p0[0] - c(10.0)).norm() < 1e-12);
        assert_eq!(p0[2], c(1.0));
        assert_eq!(p1[0], c(1.0));
        assert!(m.is_polynomial());
        assert!(matches!(specialize(&f, c(0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn degenerate_map() {
        let err = RationalMapC::new(vec![c(0.0), c(1.0), c(0.0)], vec![c(0.0), c(1.0), c(0.0)]);
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn preimages_solve_the_equation() {
        let m =
            RationalMapC::new(vec![c(1.0), c(2.0), c(-1.0)], vec![c(3.0), c(0.5), c(1.0)]).unwrap();
        let y = point(C64::new(0.3, -1.2));
        for w in m.preimages(y).unwrap() {
            assert!(chordal(m.apply(w), y) < 1e-12);
        }
    }

    #[test]
    fn square_samples_on_unit_circle() {
        let s = backward_sample(&square(), 7, 50, 2000, point(c(2.0))).unwrap();
        assert_eq!(s.len(), 2000);
        for w in &s.points {
            assert!(((w[0] / w[1]).norm() - 1.0).abs() < 1e-6);
        }
        let again = backward_sample(&square(), 7, 50, 2000, point(c(2.0))).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn exceptional_start_restarts() {
        let s = backward_sample(&square(), 1, 50, 100, point(c(0.0))).unwrap();
        assert!(s.restarts >= 1);
        assert!(s
            .points
            .iter()
            .all(|w| ((w[0] / w[1]).norm() - 1.0).abs() < 1e-6));
    }

    #[test]
    fn constant_integrand() {
        let s = backward_sample(&square(), 3, 20, 1000, point(c(2.0))).unwrap();
        let i = integrate_mu(|_| 2.5, &s).unwrap();
        assert!((i.mean - 2.5).abs() < 1e-15);
        assert!(i.stderr < 1e-15);
        let i = integrate_mu(|w| (w[0] / w[1]).norm().ln(), &s).unwrap();
        assert!(i.mean.abs() < 1e-6);
    }

    #[test]
    fn excluded_samples_are_counted() {
        let mut v = vec![1.0; 100];
        v[3] = f64::NEG_INFINITY;
        v[7] = f64::NAN;
        let i = integrate_values(&v).unwrap();
        assert_eq!(i.n_excluded, 2);
        assert!(i.warning);
    }

    #[test]
    fn spherical_derivative_of_square_on_circle() {
        // |f'(z)|(1+|z|²)/(1+|f(z)|²) = 2 on |z| = 1
        let m = square();
        let w = point(C64::from_polar(1.0, 0.7));
        assert!((m.log_det_norm(w) - LN_2).abs() < 1e-12);
    }

    #[test]
    fn przytycki_examples() {
        let f = parse_family("z^2").unwrap();
        assert!((przytycki_oracle(&f, c(0.5)).unwrap() - LN_2).abs() < 1e-12);
        let f = parse_family("z^2 + 1/t").unwrap();
        let v = przytycki_oracle(&f, c(1e-6)).unwrap();
        assert!((v - (LN_2 + 0.5 * 1e6f64.ln())).abs() < 1e-3);
    }
}
