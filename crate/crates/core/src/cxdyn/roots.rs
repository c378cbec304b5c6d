//! Roots of complex polynomials and binary forms.
//!
//! Quadratics use the cancellation-free projective formula; higher degrees
//! use eigenvalues of the companion matrix (complex Schur form) followed by
//! Newton polishing in whichever chart keeps the root bounded.

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};
use crate::laurent::C64;

/// Largest degree handled by the companion-matrix solver.
pub const MAX_DEGREE: usize = 8;

fn horner(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn polish(c: &[C64], mut z: C64) -> C64 {
    let mut best = horner(c, z).0.norm();
    for _ in 0..4 {
        let (p, dp) = horner(c, z);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let r = horner(c, next).0.norm();
        if r.is_nan() || r >= best {
            break;
        }
        best = r;
        z = next;
    }
    z
}

fn companion_roots(monic_tail: &[C64]) -> Result<Vec<C64>> {
    // monic polynomial z^n + Σ_{j<n} a_j z^j with a_j = monic_tail[j]
    let n = monic_tail.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -monic_tail[n - 1 - j]
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("companion eigenvalues did not converge".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("companion eigenvalues unavailable".into()))?;
    Ok(ev.iter().copied().collect())
}

/// All roots of `Σ c_j z^j` with multiplicity; trailing zero coefficients are dropped.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut c: Vec<C64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite polynomial coefficient".into()));
    }
    let n = c.len() - 1;
    if n > MAX_DEGREE * MAX_DEGREE {
        return Err(Error::Unsupported(format!("root finding in degree {n}")));
    }
    let lead = c[n];
    if n == 1 {
        return Ok(vec![-c[0] / lead]);
    }
    let tail: Vec<C64> = c[..n].iter().map(|a| a / lead).collect();
    let roots = match companion_roots(&tail) {
        Ok(r) => r,
        Err(_) => shifted_roots(&tail)?,
    };
    Ok(roots.into_iter().map(|z| polish(&c, z)).collect())
}

/// QR iteration can stall on companion matrices of symmetric root sets
/// (`z^n + c`); moving the roots off-center breaks the symmetry.
fn shifted_roots(monic_tail: &[C64]) -> Result<Vec<C64>> {
    let n = monic_tail.len();
    let mut full: Vec<C64> = monic_tail.to_vec();
    full.push(C64::new(1.0, 0.0));
    let radius = monic_tail
        .iter()
        .enumerate()
        .map(|(j, a)| a.norm().powf(1.0 / (n - j) as f64))
        .fold(0.0, f64::max)
        .max(1e-300);
    for k in 1..=3 {
        let sigma = C64::from_polar(0.1 * k as f64 * radius, 0.7 * k as f64);
        // coefficients of p(z + σ) by repeated synthetic division
        let mut q = full.clone();
        for i in 0..n {
            for j in (i..n).rev() {
                let next = q[j + 1];
                q[j] += sigma * next;
            }
        }
        if let Ok(r) = companion_roots(&q[..n]) {
            return Ok(r.into_iter().map(|z| z + sigma).collect());
        }
    }
    Err(Error::Numerical(
        "companion eigenvalues did not converge".into(),
    ))
}

fn normalize(w: [C64; 2]) -> [C64; 2] {
    let n = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    [w[0] / n, w[1] / n]
}

/// Roots `[w0 : w1]` of the binary form `Σ_j h_j w0^j w1^{d−j}`, unit-normalized.
pub fn binary_roots(h: &[C64]) -> Result<Vec<[C64; 2]>> {
    let d = h.len() - 1;
    let scale = h.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Numerical("binary form vanishes identically".into()));
    }
    if d > MAX_DEGREE {
        return Err(Error::Unsupported(format!(
            "preimages in degree {d} > {MAX_DEGREE}"
        )));
    }
    let h: Vec<C64> = h.iter().map(|x| x / scale).collect();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    if d == 1 {
        return Ok(vec![normalize([-h[0], h[1]])]);
    }
    if d == 2 {
        let (h0, h1, h2) = (h[0], h[1], h[2]);
        let sq = (h1 * h1 - 4.0 * h2 * h0).sqrt();
        let q = if (h1.conj() * sq).re >= 0.0 {
            -(h1 + sq) / 2.0
        } else {
            -(h1 - sq) / 2.0
        };
        if q.norm() == 0.0 {
            let w = if h2.norm() >= h0.norm() {
                [zero, one]
            } else {
                [one, zero]
            };
            return Ok(vec![w, w]);
        }
        return Ok(vec![normalize([q, h2]), normalize([h0, q])]);
    }
    // solve in the chart whose leading coefficient is larger, then polish
    let roots: Vec<[C64; 2]> = if h[d].norm() >= h[0].norm() {
        poly_roots(&h)?.into_iter().map(|z| [z, one]).collect()
    } else {
        let rev: Vec<C64> = h.iter().rev().copied().collect();
        poly_roots(&rev)?.into_iter().map(|u| [one, u]).collect()
    };
    let rev: Vec<C64> = h.iter().rev().copied().collect();
    let polished = roots
        .into_iter()
        .map(|w| {
            if w[1].norm() >= w[0].norm() {
                [polish(&h, w[0] / w[1]), one]
            } else {
                [one, polish(&rev, w[1] / w[0])]
            }
        })
        .map(normalize)
        .collect::<Vec<_>>();
    if polished.len() != d
        || polished
            .iter()
            .any(|w| !(w[0].is_finite() && w[1].is_finite()))
    {
        return Err(Error::Numerical(format!(
            "root finder returned {} of {d} roots",
            polished.len()
        )));
    }
    Ok(polished)
}
