use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::laurent::{rat_to_f64, ExtExp, LaurentSeries, RationalExp};
use crate::parser::RationalMapFamily;
use crate::poly::{Chart, HomogeneousPoly};

use super::green::{GreenSolver, GreenValue};
use super::point::{PointRecord, TypeIIPoint};
use super::puiseux::puiseux_roots;
use super::seminorm::homog_seminorm;

/// Negative masses down to this size are clipped (and reported); larger ones are errors.
pub const CLIP_TOL: f64 = 1e-6;

/// Finite subtree of the Berkovich line rooted at the Gauss point.
///
/// Vertex 0 is the root; every other vertex stores its parent and the length
/// of the edge to it. Vertices are sorted so parents precede children.
#[derive(Clone, Debug)]
pub struct BerkTree {
    vertices: Vec<TypeIIPoint>,
    parent: Vec<Option<usize>>,
    lengths: Vec<RationalExp>,
}

impl BerkTree {
    pub fn vertices(&self) -> &[TypeIIPoint] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Length of the edge from `v` to its parent (zero at the root).
    pub fn edge_length(&self, v: usize) -> RationalExp {
        self.lengths[v]
    }

    /// Adjacent vertices with edge lengths.
    pub fn neighbors(&self, v: usize) -> Vec<(usize, RationalExp)> {
        let mut out: Vec<(usize, RationalExp)> = self.parent[v]
            .map(|p| (p, self.lengths[v]))
            .into_iter()
            .collect();
        out.extend(
            (0..self.len())
                .filter(|&w| self.parent[w] == Some(v))
                .map(|w| (w, self.lengths[w])),
        );
        out
    }

    /// Non-root vertices with a single neighbor.
    pub fn leaves(&self) -> Vec<usize> {
        let mut degree = vec![0usize; self.len()];
        for p in self.parent.iter().flatten() {
            degree[*p] += 1;
        }
        (1..self.len()).filter(|&v| degree[v] == 0).collect()
    }

    pub fn index_of(&self, p: &TypeIIPoint) -> Option<usize> {
        self.vertices.iter().position(|v| v.same_as(p))
    }

    pub fn total_length(&self) -> RationalExp {
        self.lengths.iter().sum()
    }
}

fn push_unique(list: &mut Vec<TypeIIPoint>, p: TypeIIPoint) {
    if !list.iter().any(|q| q.same_as(&p)) {
        list.push(p);
    }
}

/// Smallest subtree containing `points` and the Gauss point.
pub fn subtree_span(points: &[TypeIIPoint]) -> Result<BerkTree> {
    if points.is_empty() {
        return Err(Error::Invalid("cannot span an empty point set".into()));
    }
    let mut base = vec![TypeIIPoint::gauss()];
    for p in points {
        push_unique(&mut base, p.clone());
    }
    // branch points of a rooted tree are pairwise joins
    let mut all = base.clone();
    for i in 0..base.len() {
        for j in (i + 1)..base.len() {
            push_unique(&mut all, base[i].join(&base[j])?);
        }
    }
    all[1..]
        .sort_by(|a, b| (a.chart() as u8, a.radius_exp()).cmp(&(b.chart() as u8, b.radius_exp())));
    let n = all.len();
    let mut parent = vec![None; n];
    let mut lengths = vec![RationalExp::from_integer(0); n];
    for v in 1..n {
        // ancestors in one chart form a chain; the deepest one is the parent
        let p = (0..n)
            .filter(|&u| u != v && all[u].is_ancestor_of(&all[v]))
            .max_by_key(|&u| {
                if all[u].is_gauss() {
                    None
                } else {
                    Some(all[u].radius_exp())
                }
            })
            .ok_or_else(|| Error::Invalid(format!("{} has no ancestor in the tree", all[v])))?;
        let len = all[v].distance(&all[p])?;
        if len <= RationalExp::from_integer(0) {
            return Err(Error::Invalid(format!(
                "non-positive edge between {} and {}",
                all[p], all[v]
            )));
        }
        parent[v] = Some(p);
        lengths[v] = len;
    }
    Ok(BerkTree {
        vertices: all,
        parent,
        lengths,
    })
}

/// Probe-tree layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeOptions {
    /// Radius exponents run over `j/q`.
    pub q: u32,
    pub s_min: i64,
    pub s_max: i64,
    /// Preimage levels of critical points used as extra centers (polynomial families).
    pub depth: u32,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            q: 2,
            s_min: -3,
            s_max: 3,
            depth: 2,
        }
    }
}

impl ProbeOptions {
    fn grid(&self) -> Vec<RationalExp> {
        let q = self.q.max(1) as i64;
        (self.s_min * q..=self.s_max * q)
            .map(|j| RationalExp::new(j, q))
            .collect()
    }
}

/// Disk centers at critical points of a polynomial family and their
/// preimages up to `depth` levels, as Puiseux series good below `target`.
fn critical_centers(
    family: &RationalMapFamily,
    depth: u32,
    target: RationalExp,
) -> Result<Vec<LaurentSeries>> {
    let p0 = family.p0.dehomogenize(Chart::Z)?;
    let crit = puiseux_roots(&p0.derivative(), target)?;
    let mut centers: Vec<LaurentSeries> = Vec::new();
    let push = |c: LaurentSeries, list: &mut Vec<LaurentSeries>| {
        if !list
            .iter()
            .any(|x| (x - &c).ord() >= ExtExp::Finite(target))
        {
            list.push(c);
        }
    };
    for c in &crit {
        push(c.clone(), &mut centers);
    }
    if depth == 0 {
        return Ok(centers);
    }
    let iterates = crate::admissible::family_iterates(family, depth)?;
    for it in &iterates {
        let num = it[0].dehomogenize(Chart::Z)?;
        let den = it[1].dehomogenize(Chart::Z)?;
        for c in &crit {
            // f^j(z) = c  ⇔  P^j_0(z, 1) − c·P^j_1(z, 1) = 0
            let eq = num.sub(&den.scale(c));
            for root in puiseux_roots(&eq, target)? {
                push(root, &mut centers);
            }
        }
    }
    Ok(centers)
}

/// Default probe points: the Gauss point, `D(0, r^s)` on the grid, and for
/// polynomial families `D(a, r^s)` with `a` running over critical points and
/// their preimages.
///
/// Centers need exact family coefficients; with truncated ones only the
/// grid through 0 is returned.
pub fn probe_points(family: &RationalMapFamily, opts: &ProbeOptions) -> Result<Vec<TypeIIPoint>> {
    let grid = opts.grid();
    let mut centers = vec![LaurentSeries::zero()];
    let exact = family
        .components()
        .iter()
        .all(|p| p.terms().all(|(_, c)| c.is_exact()));
    if family.is_polynomial() && exact {
        let target = RationalExp::from_integer(opts.s_max + 1);
        centers.extend(critical_centers(family, opts.depth, target)?);
    }
    let mut out = vec![TypeIIPoint::gauss()];
    for c in &centers {
        for &s in &grid {
            push_unique(&mut out, TypeIIPoint::disk(c.clone(), s)?);
        }
    }
    Ok(out)
}

/// Probe points spanned into a tree.
pub fn probe_tree(family: &RationalMapFamily, opts: &ProbeOptions) -> Result<BerkTree> {
    subtree_span(&probe_points(family, opts)?)
}

/// Atomic measure on the vertices of a [`BerkTree`].
#[derive(Clone, Debug)]
pub struct TreeMeasure {
    pub points: Vec<TypeIIPoint>,
    pub masses: Vec<f64>,
    /// Masses as exact rationals when computed from exact potentials.
    pub exact: Option<Vec<RationalExp>>,
    /// Smallest mass before clipping.
    pub min_raw_mass: f64,
    /// Total negative mass removed by clipping.
    pub clipped: f64,
    /// Share of the total mass sitting on leaves.
    pub leaf_mass_fraction: f64,
}

/// One vertex of a serialized [`TreeMeasure`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassRecord {
    #[serde(flatten)]
    pub point: PointRecord,
    pub mass: f64,
}

impl TreeMeasure {
    pub fn total(&self) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for &m in &self.masses {
            // Neumaier summation
            let t = sum + m;
            comp += if f64::abs(sum) >= m.abs() {
                (sum - t) + m
            } else {
                (m - t) + sum
            };
            sum = t;
        }
        sum + comp
    }

    pub fn mass_at(&self, p: &TypeIIPoint) -> f64 {
        self.points
            .iter()
            .zip(&self.masses)
            .filter(|(q, _)| q.same_as(p))
            .map(|(_, m)| *m)
            .sum()
    }

    pub fn records(&self) -> Vec<MassRecord> {
        self.points
            .iter()
            .zip(&self.masses)
            .map(|(p, &mass)| MassRecord {
                point: p.into(),
                mass,
            })
            .collect()
    }

    /// Support as `(point, mass)` pairs with mass above `eps`.
    pub fn support(&self, eps: f64) -> Vec<(&TypeIIPoint, f64)> {
        self.points
            .iter()
            .zip(&self.masses)
            .filter(|(_, m)| **m > eps)
            .map(|(p, m)| (p, *m))
            .collect()
    }
}

fn finish(tree: &BerkTree, raw: Vec<f64>, exact: Option<Vec<RationalExp>>) -> Result<TreeMeasure> {
    let min_raw_mass = raw.iter().copied().fold(f64::INFINITY, f64::min);
    if min_raw_mass < -CLIP_TOL {
        let v = raw.iter().position(|&m| m == min_raw_mass).unwrap();
        return Err(Error::Numerical(format!(
            "Laplacian convention failure: mass {min_raw_mass:.3e} at {}",
            tree.vertices[v]
        )));
    }
    let clipped: f64 = raw.iter().filter(|&&m| m < 0.0).map(|m| -m).sum();
    let masses: Vec<f64> = raw.iter().map(|&m| m.max(0.0)).collect();
    let total: f64 = masses.iter().sum();
    let leaf: f64 = tree.leaves().iter().map(|&v| masses[v]).sum();
    Ok(TreeMeasure {
        points: tree.vertices.clone(),
        masses,
        exact,
        min_raw_mass,
        clipped,
        leaf_mass_fraction: if total > 0.0 { leaf / total } else { 0.0 },
    })
}

/// Monge–Ampère measure of a potential given by exponents `q_v` (`g = q·log r`).
///
/// `mass(v) = [v = root] − Σ_{w ~ v} (q_w − q_v) / len(v, w)`, the outgoing
/// slopes of `g` in units of `|log r|`. Exact, so the total is exactly 1.
pub fn tree_ma_exact(tree: &BerkTree, exponents: &[RationalExp]) -> Result<TreeMeasure> {
    if exponents.len() != tree.len() {
        return Err(Error::Invalid(format!(
            "{} potential values for {} vertices",
            exponents.len(),
            tree.len()
        )));
    }
    let zero = RationalExp::from_integer(0);
    let mut mass: Vec<RationalExp> = vec![zero; tree.len()];
    mass[0] = RationalExp::from_integer(1);
    for v in 1..tree.len() {
        let p = tree.parent[v].unwrap();
        let slope = (exponents[v] - exponents[p]) / tree.lengths[v];
        // outgoing slope of g from p toward v is −slope, and from v toward p is +slope
        mass[p] -= slope;
        mass[v] += slope;
    }
    let raw = mass.iter().map(|&m| rat_to_f64(m)).collect();
    finish(tree, raw, Some(mass))
}

/// [`tree_ma_exact`] for a real-valued potential `g` (natural-log units).
pub fn tree_ma(tree: &BerkTree, g: &[f64], r: f64) -> Result<TreeMeasure> {
    if g.len() != tree.len() {
        return Err(Error::Invalid(format!(
            "{} potential values for {} vertices",
            g.len(),
            tree.len()
        )));
    }
    if let Some(v) = g.iter().position(|x| !x.is_finite()) {
        return Err(Error::Domain(format!(
            "potential not finite at {}",
            tree.vertices[v]
        )));
    }
    let unit = r.ln().abs();
    let mut mass = vec![0.0; tree.len()];
    mass[0] = 1.0;
    for v in 1..tree.len() {
        let p = tree.parent[v].unwrap();
        let slope = (g[v] - g[p]) / (unit * rat_to_f64(tree.lengths[v]));
        mass[p] += slope;
        mass[v] -= slope;
    }
    finish(tree, mass, None)
}

/// Probe tree, Green function values and the resulting measure of a family.
#[derive(Clone, Debug)]
pub struct NaMeasure {
    pub tree: BerkTree,
    pub green: Vec<GreenValue>,
    pub measure: TreeMeasure,
}

/// Chambert-Loir measure of the family resolved on a probe tree.
pub fn na_measure(
    family: &RationalMapFamily,
    tree: BerkTree,
    solver: &GreenSolver,
    n_max: u32,
    tol: f64,
    exec: Exec,
) -> Result<NaMeasure> {
    if solver.family() != family {
        return Err(Error::Invalid(
            "Green solver built for another family".into(),
        ));
    }
    let mut green = exec.try_map(tree.vertices(), |xi| solver.eval(xi, n_max, tol))?;
    // The Laplacian needs one partial sum S_n across the whole tree.
    let n = green.iter().map(|g| g.n).min().unwrap_or(1);
    if green.iter().any(|g| g.n != n) {
        green = exec.try_map(tree.vertices(), |xi| solver.eval_at(xi, n))?;
    }
    let exps: Vec<RationalExp> = green.iter().map(|g| g.exponent).collect();
    let measure = tree_ma_exact(&tree, &exps)?;
    Ok(NaMeasure {
        tree,
        green,
        measure,
    })
}

/// Jacobian determinant `∂0P0·∂1P1 − ∂1P0·∂0P1`.
pub fn jacobian_det(family: &RationalMapFamily) -> Result<HomogeneousPoly> {
    let (p0, p1) = (&family.p0, &family.p1);
    let a = p0.partial(0).mul(&p1.partial(1));
    let b = p0.partial(1).mul(&p1.partial(0));
    a.add(&b.scale(&LaurentSeries::real(-1.0)))
}

/// Exponent `e` with `log‖det dR‖(ξ) = e·log r`.
pub fn log_det_exponent(family: &RationalMapFamily, xi: &TypeIIPoint) -> Result<RationalExp> {
    let j = jacobian_det(family)?;
    log_det_exponent_with(family, &j, xi)
}

fn log_det_exponent_with(
    family: &RationalMapFamily,
    jac: &HomogeneousPoly,
    xi: &TypeIIPoint,
) -> Result<RationalExp> {
    let qj = homog_seminorm(jac, xi)?;
    let qp = homog_seminorm(&family.p0, xi)?.min(homog_seminorm(&family.p1, xi)?);
    match (qj, qp) {
        (ExtExp::Finite(a), ExtExp::Finite(b)) => Ok(a - b * 2),
        _ => Err(Error::Degenerate(format!(
            "Jacobian or map vanishes identically at {xi}"
        ))),
    }
}

/// `Σ_v mass(v)·log‖det dR‖(v)` in exponent units (multiply by `log r`).
pub fn na_lyapunov_exponent(family: &RationalMapFamily, mu: &TreeMeasure) -> Result<f64> {
    let j = jacobian_det(family)?;
    let mut sum = 0.0;
    for (p, &m) in mu.points.iter().zip(&mu.masses) {
        if m != 0.0 {
            sum += m * rat_to_f64(log_det_exponent_with(family, &j, p)?);
        }
    }
    Ok(sum)
}

/// Non-Archimedean Lyapunov exponent `∫ log‖det dR‖ dμ`.
pub fn na_lyapunov(family: &RationalMapFamily, mu: &TreeMeasure, r: f64) -> Result<f64> {
    Ok(na_lyapunov_exponent(family, mu)? * r.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, rat, C64};
    use crate::parser::parse_family;

    fn disk(c: &str, s: RationalExp) -> TypeIIPoint {
        TypeIIPoint::disk(c.parse().unwrap(), s).unwrap()
    }

    #[test]
    fn span_examples() {
        let t = subtree_span(&[TypeIIPoint::gauss()]).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.leaves().is_empty());

        let t = subtree_span(&[disk("0", int(1)), disk("0", int(2))]).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.parent(1), Some(0));
        assert_eq!(t.parent(2), Some(1));
        assert_eq!(t.edge_length(1), int(1));
        assert_eq!(t.edge_length(2), int(1));
        assert_eq!(t.leaves(), vec![2]);

        let t = subtree_span(&[disk("t", int(2)), disk("-t", int(2))]).unwrap();
        assert_eq!(t.len(), 4);
        let b = t.index_of(&disk("0", int(1))).expect("branch vertex");
        assert_eq!(t.neighbors(b).len(), 3);
        assert_eq!(t.total_length(), int(3));
    }

    #[test]
    fn zero_potential_is_dirac_at_gauss() {
        let t =
            subtree_span(&[disk("0", int(1)), disk("t^-1", int(-2)), disk("1", int(3))]).unwrap();
        let mu = tree_ma_exact(&t, &vec![int(0); t.len()]).unwrap();
        assert_eq!(mu.masses[0], 1.0);
        assert_eq!(mu.total(), 1.0);
        let mu = tree_ma(&t, &vec![0.0; t.len()], 0.5).unwrap();
        assert_eq!(mu.masses[0], 1.0);
    }

    #[test]
    fn unit_slope_moves_mass_down_the_path() {
        // exponent slope +1 on [x_g, D(0, r)], flat beyond
        let t = subtree_span(&[disk("0", int(1)), disk("0", int(2))]).unwrap();
        let mu = tree_ma_exact(&t, &[int(0), int(1), int(1)]).unwrap();
        assert_eq!(mu.masses, vec![0.0, 1.0, 0.0]);
        let r: f64 = 0.3;
        let g: Vec<f64> = [0.0, 1.0, 1.0].iter().map(|q| q * r.ln()).collect();
        let mu = tree_ma(&t, &g, r).unwrap();
        assert!((mu.masses[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convention_failure_is_loud() {
        let t = subtree_span(&[disk("0", int(1))]).unwrap();
        assert!(matches!(
            tree_ma_exact(&t, &[int(0), int(-1)]),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn good_reduction_measure() {
        let f = parse_family("z^2").unwrap();
        let tree = probe_tree(&f, &ProbeOptions::default()).unwrap();
        let solver = GreenSolver::new(&f, 0.5, 4).unwrap();
        let m = na_measure(&f, tree, &solver, 4, 1e-9, Exec::Sequential).unwrap();
        assert_eq!(m.measure.masses[0], 1.0);
        assert!(m.green.iter().all(|g| g.exponent == int(0)));
        assert_eq!(na_lyapunov(&f, &m.measure, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn inverse_t_family_measure() {
        let f = parse_family("z^2 + 1/t").unwrap();
        let opts = ProbeOptions {
            depth: 1,
            ..ProbeOptions::default()
        };
        let tree = probe_tree(&f, &opts).unwrap();
        let solver = GreenSolver::new(&f, 0.5, 5).unwrap();
        let m = na_measure(&f, tree, &solver, 5, 1e-12, Exec::Sequential).unwrap();
        assert_eq!(m.measure.total(), 1.0);
        for sign in [1.0, -1.0] {
            let zeta = TypeIIPoint::disk(
                LaurentSeries::monomial(C64::new(0.0, sign), rat(-1, 2)),
                int(0),
            )
            .unwrap();
            assert!(
                (m.measure.mass_at(&zeta) - 0.5).abs() < 1e-12,
                "{:?}",
                m.measure.records()
            );
        }
        let e = na_lyapunov_exponent(&f, &m.measure).unwrap();
        assert!((e + 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_det_at_gauss_of_good_reduction() {
        let f = parse_family("[w0^2 : w1^2]").unwrap();
        assert_eq!(log_det_exponent(&f, &TypeIIPoint::gauss()).unwrap(), int(0));
    }
}
