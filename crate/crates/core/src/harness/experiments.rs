use serde::Serialize;

use crate::admissible::{g_na, phi_complex};
use crate::berkovich::{
    na_lyapunov_exponent, na_measure, probe_tree, BerkPoint, GreenSolver, NaMeasure,
};
use crate::cxdyn::{
    backward_sample, integrate_mu, lyapunov_complex, point, przytycki_oracle, specialize, Integral,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hybrid::{scaling_n, tau_eval, HybridPoint};
use crate::laurent::{rat_to_f64, C64};
use crate::parser::{parse_series, RationalMapFamily};

use super::config::{ExperimentConfig, GridCell};
use super::fit::fit_line;
use super::record::{fmt_f64, ResultRecord, Table};

/// Generic starting point for backward orbits (not exceptional for the shipped families).
pub const SAMPLER_START: [f64; 2] = [0.3711, 0.6180];

fn start() -> [C64; 2] {
    point(C64::new(SAMPLER_START[0], SAMPLER_START[1]))
}

/// Seed of one grid cell, mixed from the base seed and the cell indices.
pub fn cell_seed(base: u64, cell: &GridCell) -> u64 {
    // splitmix64 finalizer over a combined word
    let mut z = base
        ^ (cell.modulus_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (cell.phase_index as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Phase-averaged value of one modulus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusSummary {
    pub modulus: f64,
    pub log_inv_t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub phases: usize,
}

fn phase_average(cells: &[GridCell], values: &[Integral], moduli: &[f64]) -> Vec<ModulusSummary> {
    moduli
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let vals: Vec<&Integral> = cells
                .iter()
                .zip(values)
                .filter(|(c, _)| c.modulus_index == i)
                .map(|(_, v)| v)
                .collect();
            let k = vals.len() as f64;
            ModulusSummary {
                modulus: m,
                log_inv_t: -m.ln(),
                mean: vals.iter().map(|v| v.mean).sum::<f64>() / k,
                stderr: vals.iter().map(|v| v.stderr * v.stderr).sum::<f64>().sqrt() / k,
                phases: vals.len(),
            }
        })
        .collect()
}

fn samples_at(
    family: &RationalMapFamily,
    cfg: &ExperimentConfig,
    cell: &GridCell,
) -> Result<(crate::cxdyn::RationalMapC, crate::cxdyn::SampleSet)> {
    let map = specialize(family, cell.t)?;
    let s = backward_sample(
        &map,
        cell_seed(cfg.sampler.seed, cell),
        cfg.sampler.n_burn,
        cfg.sampler.n_keep,
        start(),
    )?;
    Ok((map, s))
}

/// `τ`-values of a series along `|z| = r·2^{-j}` against the central limit `r^{ord f}`.
pub fn cmd_circle_demo(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let c = cfg
        .circle
        .as_ref()
        .ok_or_else(|| Error::Config("circle-demo needs a [circle] section".into()))?;
    let f = parse_series(&c.series)?;
    let limit = tau_eval(&f, &HybridPoint::central(cfg.r)?);
    let phases = cfg.t_grid.phases.max(1);
    let mut table = Table::new(&["j", "modulus", "phase", "n", "value", "limit", "error"]);
    let mut last_max = f64::NAN;
    for j in 0..=c.j_max {
        let m = cfg.r * 0.5f64.powi(j as i32);
        let mut max_err: f64 = 0.0;
        for k in 0..phases {
            let theta = std::f64::consts::TAU * k as f64 / phases as f64;
            let p = HybridPoint::interior(C64::from_polar(m, theta), cfg.r)?;
            let v = tau_eval(&f, &p);
            let err = (v - limit).abs();
            max_err = max_err.max(err);
            table.push(vec![
                j.to_string(),
                fmt_f64(m),
                k.to_string(),
                fmt_f64(scaling_n(&p)),
                fmt_f64(v),
                fmt_f64(limit),
                fmt_f64(err),
            ]);
        }
        last_max = max_err;
    }
    let mut rec = ResultRecord::new("circle-demo", cfg, table);
    rec.set("series", f.to_string());
    rec.set("limit", limit);
    rec.set("max_error_at_smallest_modulus", last_max);
    Ok(rec)
}

/// Probe tree, Green function and measure of the configured family.
pub fn na_side(
    family: &RationalMapFamily,
    cfg: &ExperimentConfig,
    exec: Exec,
) -> Result<NaMeasure> {
    let tree = probe_tree(family, &cfg.probes)?;
    let solver = GreenSolver::new(family, cfg.r, cfg.green.n_max)?;
    na_measure(family, tree, &solver, cfg.green.n_max, cfg.green.tol, exec)
}

/// `I(t) = ∫ n(t)·φ_F dμ_t` over the grid against `I(0) = Σ mass·g_F`.
pub fn cmd_hybrid_converge(cfg: &ExperimentConfig, exec: Exec) -> Result<ResultRecord> {
    let family = cfg.family()?;
    let datum = cfg.datum()?;
    let na = na_side(&family, cfg, exec)?;
    let mut i0 = 0.0;
    for (p, &m) in na.measure.points.iter().zip(&na.measure.masses) {
        if m != 0.0 {
            i0 += m * g_na(&datum, &BerkPoint::TypeII(p.clone()), cfg.r)?;
        }
    }
    let cells = cfg.t_grid.cells(cfg.r);
    let values = exec.try_map(&cells, |cell| -> Result<Integral> {
        let (_, s) = samples_at(&family, cfg, cell)?;
        let n = scaling_n(&HybridPoint::interior(cell.t, cfg.r)?);
        // φ fails only on malformed input, which the datum check rules out
        integrate_mu(
            |w| phi_complex(&datum, &w, cell.t).map_or(f64::NAN, |phi| n * phi),
            &s,
        )
    })?;
    let mut table = Table::new(&[
        "modulus_index",
        "phase_index",
        "t_re",
        "t_im",
        "n",
        "i_t",
        "stderr",
        "i_0",
        "abs_error",
        "n_excluded",
    ]);
    for (cell, v) in cells.iter().zip(&values) {
        let n = scaling_n(&HybridPoint::interior(cell.t, cfg.r)?);
        table.push(vec![
            cell.modulus_index.to_string(),
            cell.phase_index.to_string(),
            fmt_f64(cell.t.re),
            fmt_f64(cell.t.im),
            fmt_f64(n),
            fmt_f64(v.mean),
            fmt_f64(v.stderr),
            fmt_f64(i0),
            fmt_f64((v.mean - i0).abs()),
            v.n_excluded.to_string(),
        ]);
    }
    let moduli = cfg.t_grid.moduli(cfg.r);
    let per = phase_average(&cells, &values, &moduli);
    let errors: Vec<f64> = per.iter().map(|p| (p.mean - i0).abs()).collect();
    // nonincreasing along the grid up to the combined standard errors
    let monotone = per
        .windows(2)
        .zip(errors.windows(2))
        .all(|(p, e)| e[1] <= e[0] + p[0].stderr + p[1].stderr);
    let mut rec = ResultRecord::new("hybrid-converge", cfg, table);
    rec.set("i_0", i0);
    rec.set("per_modulus", &per);
    rec.set("abs_errors", &errors);
    rec.set("monotone_nonincreasing", monotone);
    rec.set(
        "final_abs_error",
        errors.last().copied().unwrap_or(f64::NAN),
    );
    rec.set("leaf_mass_fraction", na.measure.leaf_mass_fraction);
    rec.set(
        "excluded_samples",
        values.iter().map(|v| v.n_excluded).sum::<usize>(),
    );
    rec.set("warnings", values.iter().filter(|v| v.warning).count());
    Ok(rec)
}

/// Sign of `x`, treating `|x| ≤ tol` as zero.
fn sign(x: f64, tol: f64) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

/// Fitted slope of `Lyap(R_t)` against `log|t|^{-1}` and the NA prediction.
pub fn cmd_lyap_slope(cfg: &ExperimentConfig, exec: Exec) -> Result<ResultRecord> {
    let family = cfg.family()?;
    let cells = cfg.t_grid.cells(cfg.r);
    let values = exec.try_map(&cells, |cell| -> Result<(Integral, Option<f64>)> {
        let (map, s) = samples_at(&family, cfg, cell)?;
        let oracle = if family.is_polynomial() {
            Some(przytycki_oracle(&family, cell.t)?)
        } else {
            None
        };
        Ok((lyapunov_complex(&map, &s)?, oracle))
    })?;
    let mut table = Table::new(&[
        "modulus_index",
        "phase_index",
        "t_re",
        "t_im",
        "log_inv_t",
        "lyap",
        "stderr",
        "oracle",
        "n_excluded",
    ]);
    for (cell, (v, o)) in cells.iter().zip(&values) {
        table.push(vec![
            cell.modulus_index.to_string(),
            cell.phase_index.to_string(),
            fmt_f64(cell.t.re),
            fmt_f64(cell.t.im),
            fmt_f64(-cell.t.norm().ln()),
            fmt_f64(v.mean),
            fmt_f64(v.stderr),
            o.map(fmt_f64).unwrap_or_default(),
            v.n_excluded.to_string(),
        ]);
    }
    let moduli = cfg.t_grid.moduli(cfg.r);
    let integrals: Vec<Integral> = values.iter().map(|(v, _)| *v).collect();
    let per = phase_average(&cells, &integrals, &moduli);
    let xs: Vec<f64> = per.iter().map(|p| p.log_inv_t).collect();
    let ys: Vec<f64> = per.iter().map(|p| p.mean).collect();
    let fit = fit_line(&xs, &ys)?;

    let na = na_side(&family, cfg, exec)?;
    let e = na_lyapunov_exponent(&family, &na.measure)?;
    let na_ratio = e.abs();
    // the literal asymptotic predicts slope Lyap(R)/log r = e
    let relation = match (
        sign(fit.slope, 2.0 * fit.slope_stderr.max(1e-9)),
        sign(e, 1e-9),
    ) {
        (0, 0) => "both-zero",
        (0, _) | (_, 0) => "one-zero",
        (a, b) if a == b => "same",
        _ => "opposite",
    };
    // stderr is exactly 0 for maps whose log-det is constant on the support
    let pairs: Vec<(f64, f64)> = values
        .iter()
        .filter_map(|(v, o)| o.map(|o| ((v.mean - o).abs(), v.stderr)))
        .collect();
    let oracle_abs = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let oracle_ok = pairs.iter().all(|&(dev, se)| dev <= 3.0 * se + 1e-9);
    let mut rec = ResultRecord::new("lyap-slope", cfg, table);
    rec.fit = Some(fit);
    rec.set("slope", fit.slope);
    rec.set("slope_stderr", fit.slope_stderr);
    rec.set("abs_slope", fit.slope.abs());
    rec.set("na_lyapunov", e * cfg.r.ln());
    rec.set("na_lyapunov_over_log_r", e);
    rec.set("na_abs_ratio", na_ratio);
    rec.set("unsigned_discrepancy", (fit.slope.abs() - na_ratio).abs());
    rec.set("sign_relation", relation);
    rec.set("per_modulus", &per);
    if !pairs.is_empty() {
        rec.set("max_oracle_abs_deviation", oracle_abs);
        rec.set("oracle_within_3_stderr", oracle_ok);
    }
    rec.set("na_total_mass", na.measure.total());
    rec.set("leaf_mass_fraction", na.measure.leaf_mass_fraction);
    rec.set(
        "min_lyapunov_minus_bound",
        integrals
            .iter()
            .map(|v| v.mean + 3.0 * v.stderr - 0.5 * (family.degree as f64).ln())
            .fold(f64::INFINITY, f64::min),
    );
    rec.set(
        "excluded_samples",
        integrals.iter().map(|v| v.n_excluded).sum::<usize>(),
    );
    Ok(rec)
}

/// Green function and Monge–Ampère measure on the probe tree.
pub fn cmd_na_measure(cfg: &ExperimentConfig, exec: Exec) -> Result<ResultRecord> {
    let family = cfg.family()?;
    let na = na_side(&family, cfg, exec)?;
    let leaves = na.tree.leaves();
    let mut table = Table::new(&[
        "index",
        "parent",
        "chart",
        "center",
        "s",
        "green_exponent",
        "green",
        "error_bound",
        "iterates",
        "mass",
        "leaf",
    ]);
    for (v, p) in na.tree.vertices().iter().enumerate() {
        let g = &na.green[v];
        let rec: crate::berkovich::PointRecord = p.into();
        table.push(vec![
            v.to_string(),
            na.tree.parent(v).map(|x| x.to_string()).unwrap_or_default(),
            format!("{:?}", rec.chart),
            rec.center,
            rec.s,
            g.exponent.to_string(),
            fmt_f64(g.value),
            fmt_f64(g.error_bound),
            g.n.to_string(),
            fmt_f64(na.measure.masses[v]),
            leaves.contains(&v).to_string(),
        ]);
    }
    let mut rec = ResultRecord::new("na-measure", cfg, table);
    rec.set("family", family.to_string());
    rec.set("vertices", na.tree.len());
    rec.set("total_mass", na.measure.total());
    rec.set("gauss_mass", na.measure.masses[0]);
    rec.set("leaf_mass_fraction", na.measure.leaf_mass_fraction);
    rec.set("clipped_mass", na.measure.clipped);
    rec.set("min_raw_mass", na.measure.min_raw_mass);
    rec.set(
        "max_green_error_bound",
        na.green.iter().map(|g| g.error_bound).fold(0.0, f64::max),
    );
    rec.set(
        "max_abs_green",
        na.green
            .iter()
            .map(|g| rat_to_f64(g.exponent).abs())
            .fold(0.0, f64::max)
            * cfg.r.ln().abs(),
    );
    rec.set("measure", na.measure.records());
    Ok(rec)
}

/// Runs a subcommand by name.
pub fn run(command: &str, cfg: &ExperimentConfig, exec: Exec) -> Result<ResultRecord> {
    match command {
        "circle-demo" => cmd_circle_demo(cfg),
        "hybrid-converge" => cmd_hybrid_converge(cfg, exec),
        "lyap-slope" => cmd_lyap_slope(cfg, exec),
        "na-measure" => cmd_na_measure(cfg, exec),
        other => Err(Error::Config(format!("unknown experiment `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(text).unwrap()
    }

    #[test]
    fn circle_demo_columns() {
        for (series, limit) in [("t", 0.5), ("1 + t", 1.0), ("t^-1", 2.0)] {
            let c = cfg(&format!("[circle]\nseries = \"{series}\"\nj_max = 30"));
            let rec = cmd_circle_demo(&c).unwrap();
            let vals = rec.table.f64_column("value").unwrap();
            assert_eq!(rec.get_f64("limit").unwrap(), limit);
            if series == "t" {
                assert!(vals.iter().all(|v| (v - 0.5).abs() < 1e-12));
            }
            let last = *vals.last().unwrap();
            assert!((last - limit).abs() < 0.05, "{series}: {last}");
        }
    }

    #[test]
    fn cell_seeds_differ() {
        let a = GridCell {
            modulus_index: 0,
            phase_index: 1,
            t: C64::new(0.1, 0.0),
        };
        let b = GridCell {
            modulus_index: 1,
            phase_index: 0,
            t: C64::new(0.1, 0.0),
        };
        assert_ne!(cell_seed(1, &a), cell_seed(1, &b));
        assert_eq!(cell_seed(1, &a), cell_seed(1, &a));
    }

    #[test]
    fn na_measure_of_square() {
        let rec = cmd_na_measure(&cfg("family = \"z^2\""), Exec::Sequential).unwrap();
        assert_eq!(rec.get_f64("gauss_mass"), Some(1.0));
        assert_eq!(rec.get_f64("max_abs_green"), Some(0.0));
    }

    #[test]
    fn slope_needs_three_moduli() {
        let c = cfg(
            "family = \"z^2\"\n[t_grid]\nmoduli = [0.1, 0.01]\nphases = 1\n[sampler]\nn_keep = 100",
        );
        assert!(matches!(
            cmd_lyap_slope(&c, Exec::Sequential),
            Err(Error::Invalid(_))
        ));
    }
}
