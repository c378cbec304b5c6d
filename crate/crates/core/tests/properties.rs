use hybrid_degen::berkovich::{homog_seminorm, subtree_span, tree_ma, tree_ma_exact, TypeIIPoint};
use hybrid_degen::cxdyn::{backward_sample, backward_sample_chains, point, RationalMapC};
use hybrid_degen::exec::Exec;
use hybrid_degen::harness::{fit_line, ExperimentConfig};
use hybrid_degen::hybrid::{tau_eval, HybridPoint};
use hybrid_degen::laurent::{int, rat, rat_to_f64, ExtExp, LaurentSeries, RationalExp, C64};
use hybrid_degen::poly::HomogeneousPoly;
use proptest::prelude::*;

const R: f64 = 0.5;

fn coeff() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64)
        .prop_filter("not tiny", |(a, b)| a.abs() + b.abs() > 0.1)
        .prop_map(|(a, b)| C64::new(a, b))
}

fn series() -> impl Strategy<Value = LaurentSeries> {
    (1i64..=3, prop::collection::vec((-5i64..=5, coeff()), 1..4)).prop_map(|(den, terms)| {
        LaurentSeries::from_terms(terms.into_iter().map(|(k, c)| (rat(k, den), c)), None)
    })
}

fn interior_point() -> impl Strategy<Value = HybridPoint> {
    (1e-3..=1.0f64, -3.1..3.1f64)
        .prop_map(|(u, th)| HybridPoint::interior(C64::from_polar(R * u, th), R).unwrap())
}

/// Binary form of degree `d` with monomial coefficients `c·t^k`.
fn binary_form(d: u32) -> impl Strategy<Value = HomogeneousPoly> {
    prop::collection::vec(prop::option::of((-2i64..=2, coeff())), (d + 1) as usize)
        .prop_filter("nonzero", |v| v.iter().any(Option::is_some))
        .prop_map(move |v| {
            let terms = v.into_iter().enumerate().filter_map(|(j, c)| {
                c.map(|(k, a)| {
                    (
                        vec![j as u32, d - j as u32],
                        LaurentSeries::monomial(a, int(k)),
                    )
                })
            });
            HomogeneousPoly::new(2, d, terms).unwrap()
        })
}

/// Disk `D(a·t^k, r^s)` inside the closed unit disk.
fn disk() -> impl Strategy<Value = TypeIIPoint> {
    (
        prop::sample::select(vec![0.0, 1.0, -1.0, 2.0]),
        0i64..=2,
        0i64..=8,
    )
        .prop_map(|(a, k, s2)| {
            let c = if a == 0.0 {
                LaurentSeries::zero()
            } else {
                LaurentSeries::monomial(C64::new(a, 0.0), int(k))
            };
            TypeIIPoint::disk(c, rat(s2, 2)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tau_is_multiplicative(f in series(), g in series(), p in interior_point()) {
        let lhs = tau_eval(&(&f * &g), &p);
        let rhs = tau_eval(&f, &p) * tau_eval(&g, &p);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()));
        let c = HybridPoint::central(R).unwrap();
        prop_assert!((tau_eval(&(&f * &g), &c) - tau_eval(&f, &c) * tau_eval(&g, &c)).abs() <= 1e-12);
    }

    #[test]
    fn tau_of_t_is_r(p in interior_point()) {
        prop_assert!((tau_eval(&LaurentSeries::t(), &p) - R).abs() <= 1e-12);
    }

    #[test]
    fn seminorm_is_multiplicative(
        a in (1u32..=3).prop_flat_map(binary_form),
        b in (1u32..=3).prop_flat_map(binary_form),
        xi in disk(),
    ) {
        let qa = homog_seminorm(&a, &xi).unwrap();
        let qb = homog_seminorm(&b, &xi).unwrap();
        let qab = homog_seminorm(&a.mul(&b), &xi).unwrap();
        match (qa, qb) {
            (ExtExp::Finite(x), ExtExp::Finite(y)) => prop_assert_eq!(qab, ExtExp::Finite(x + y)),
            _ => prop_assert_eq!(qab, ExtExp::Infinite),
        }
    }

    /// The potential `q(v) = Σ_x ν(x)·⟨v, x⟩` (Gromov product from the Gauss
    /// point) has Laplacian exactly `ν`.
    #[test]
    fn laplacian_inverts_potential(
        points in prop::collection::vec(disk(), 1..7),
        weights in prop::collection::vec(0i64..=5, 64),
    ) {
        let tree = subtree_span(&points).unwrap();
        let gauss = TypeIIPoint::gauss();
        let n = tree.len();
        prop_assume!(n <= weights.len());
        let total: i64 = weights[..n].iter().sum();
        prop_assume!(total > 0);
        let nu: Vec<RationalExp> = weights[..n].iter().map(|&w| rat(w, total)).collect();
        let verts = tree.vertices();
        let q: Vec<RationalExp> = verts
            .iter()
            .map(|v| {
                verts.iter().zip(&nu).map(|(x, w)| {
                    let j = v.join(x).unwrap();
                    *w * gauss.distance(&j).unwrap()
                })
                .sum()
            })
            .collect();
        let mu = tree_ma_exact(&tree, &q).unwrap();
        prop_assert_eq!(mu.exact.as_ref().unwrap(), &nu);
        prop_assert!((mu.total() - 1.0).abs() <= 1e-12);
        // the floating-point version agrees on g = q·log r
        let g: Vec<f64> = q.iter().map(|e| rat_to_f64(*e) * R.ln()).collect();
        let mf = tree_ma(&tree, &g, R).unwrap();
        for (a, b) in mf.masses.iter().zip(&nu) {
            prop_assert!((a - rat_to_f64(*b)).abs() <= 1e-9);
        }
    }

    #[test]
    fn line_fit_is_exact_on_lines(
        slope in -5.0..5.0f64,
        intercept in -5.0..5.0f64,
        xs in prop::collection::btree_set(-1000i32..1000, 3..20),
    ) {
        let xs: Vec<f64> = xs.into_iter().map(|x| x as f64 / 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
        let f = fit_line(&xs, &ys).unwrap();
        prop_assert!((f.slope - slope).abs() <= 1e-9);
        prop_assert!((f.intercept - intercept).abs() <= 1e-8);
    }

    #[test]
    fn config_hash_survives_round_trip(seed in any::<u64>(), n_keep in 1usize..100_000, phases in 1u32..16) {
        let text = format!(
            "family = \"z^2 + 1/t\"\n[sampler]\nseed = {}\nn_keep = {n_keep}\n[t_grid]\nphases = {phases}\n",
            seed % (1 << 53)
        );
        let a = ExperimentConfig::from_toml(&text).unwrap();
        let b = ExperimentConfig::from_toml(&a.to_toml().unwrap()).unwrap();
        prop_assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.sampler.n_keep += 1;
        prop_assert_ne!(a.hash(), c.hash());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), c in -1.5..0.25f64) {
        let map = RationalMapC::polynomial(&[C64::new(c, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let start = point(C64::new(0.3711, 0.618));
        let a = backward_sample(&map, seed, 20, 200, start).unwrap();
        let b = backward_sample(&map, seed, 20, 200, start).unwrap();
        prop_assert_eq!(a.points, b.points);
        let p = backward_sample_chains(&map, seed, 4, 20, 100, start, Exec::Parallel).unwrap();
        let s = backward_sample_chains(&map, seed, 4, 20, 100, start, Exec::Sequential).unwrap();
        prop_assert_eq!(p.points, s.points);
    }
}
