//! Cone convexities on a sampled unit sphere.
//!
//! Points are unit vectors; a center `c` is an interior point. The segment
//! of `x1, x2` under `G(c)` is the set of sample points `p` whose forward
//! ray from `c` passes within `tol` of the chord `[x1, x2]`, or just
//! `{x1, x2}` when the line through them passes within `tol` of `c`.

use std::sync::Arc;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::convexity::{intersect_convexities, make_convexity, BaseHull, Convexity};
use crate::error::{Error, Result};
use crate::independence::{
    is_conically_independent, pair_hull_of, semiconvex, verify_prop3,
};
use crate::report::Report;
use crate::space::{ElemSet, GroundSpace, MAX_ELEMENTS};

pub type Vec3 = [f64; 3];

/// Strictness margin for separating halfspaces.
pub const REGULARITY_MARGIN: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-9;

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add_scaled(a: &Vec3, t: f64, d: &Vec3) -> Vec3 {
    [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]]
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// `(1 - s) a + s b`.
pub fn lerp(a: &Vec3, b: &Vec3, s: f64) -> Vec3 {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])]
}

/// Quasi-uniform spiral sample of `n` unit vectors, ordered by height from
/// the north pole down.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden * i as f64;
            [r * theta.cos(), r * theta.sin(), z]
        })
        .collect()
}

/// Median over points of the chord to the nearest other point.
pub fn median_nn_chord(points: &[Vec3]) -> f64 {
    let mut nn: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| norm(&sub(p, q)))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nn.sort_by(f64::total_cmp);
    nn[nn.len() / 2]
}

/// Distance from the line through `x1, x2` to `c`.
fn line_distance(c: &Vec3, x1: &Vec3, x2: &Vec3) -> f64 {
    let e = sub(x2, x1);
    norm(&cross(&e, &sub(c, x1))) / norm(&e)
}

/// Least distance between the ray `c + t d` (`t >= 0`) and the segment
/// `x1 + s e` (`0 <= s <= 1`).
fn ray_segment_distance(c: &Vec3, d: &Vec3, x1: &Vec3, x2: &Vec3) -> f64 {
    let e = sub(x2, x1);
    let w = sub(c, x1);
    let (a, b, cc) = (dot(d, d), dot(d, &e), dot(&e, &e));
    let (dw, ew) = (dot(d, &w), dot(&e, &w));
    let at = |t: f64, s: f64| norm(&sub(&add_scaled(c, t, d), &add_scaled(x1, s, &e)));
    let mut best = f64::INFINITY;
    let det = a * cc - b * b;
    if det > 1e-14 * a * cc {
        let t = (b * ew - cc * dw) / det;
        let s = (a * ew - b * dw) / det;
        if t >= 0.0 && (0.0..=1.0).contains(&s) {
            best = at(t, s);
        }
    }
    for s in [0.0, 1.0] {
        let t = (-(dw - s * b) / a).max(0.0);
        best = best.min(at(t, s));
    }
    let s = if cc > 0.0 { (ew / cc).clamp(0.0, 1.0) } else { 0.0 };
    best.min(at(0.0, s))
}

/// Cone segment of `x1, x2` from `c`, over the sample `points`.
pub fn cone_segment(points: &[Vec3], c: &Vec3, tol: f64, x1: usize, x2: usize) -> ElemSet {
    let pair = ElemSet::singleton(x1).with(x2);
    if x1 == x2 || line_distance(c, &points[x1], &points[x2]) <= tol {
        return pair;
    }
    let mut out = pair;
    for (k, p) in points.iter().enumerate() {
        if ray_segment_distance(c, &sub(p, c), &points[x1], &points[x2]) <= tol {
            out.insert(k);
        }
    }
    out
}

/// Binary convexity generated by the cone segments from `c`.
pub fn cone_convexity(points: &[Vec3], c: &Vec3, tol: f64, id: impl Into<String>) -> Result<Convexity> {
    let space = GroundSpace::new(points.len(), 2)?;
    let base = BaseHull::from_fn(&space, |b| match b.to_vec()[..] {
        [x1, x2] => cone_segment(points, c, tol, x1, x2),
        _ => b,
    });
    make_convexity(&space, base, id)
}

/// Open halfspace `{x : normal · x > offset}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec3,
    pub offset: f64,
}

impl Halfspace {
    /// Normalizes `normal` to unit length.
    pub fn new(normal: Vec3, offset: f64) -> Result<Self> {
        let len = norm(&normal);
        if !(len.is_finite() && len > 0.0 && offset.is_finite()) {
            return Err(Error::InvalidGeometry("halfspace normal must be finite and nonzero".into()));
        }
        Ok(Halfspace { normal: normal.map(|x| x / len), offset: offset / len })
    }

    pub fn value(&self, x: &Vec3) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.value(x) > 0.0
    }

    /// Is the boundary plane parallel to the direction `d`?
    pub fn is_parallel_to(&self, d: &Vec3) -> bool {
        dot(&self.normal, d).abs() <= 1e-9 * norm(d).max(1.0)
    }
}

/// Is there an open halfspace holding `c0` and `c1` but no point of `a`?
/// The witness has been re-checked by direct evaluation.
pub fn is_regular_points(
    points: &[Vec3],
    a: &ElemSet,
    c0: &Vec3,
    c1: &Vec3,
) -> Result<(bool, Option<Halfspace>)> {
    // maximize t  s.t.  w·c_i - b >= t,  w·p - b <= 0,  |w_j| <= 1,  t <= 1
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let w: Vec<_> = (0..3).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    let b = lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    for c in [c0, c1] {
        lp.add_constraint([(w[0], c[0]), (w[1], c[1]), (w[2], c[2]), (b, -1.0), (t, -1.0)], ComparisonOp::Ge, 0.0);
    }
    for i in a.iter() {
        let p = points.get(i).ok_or(Error::OutOfRange { element: i, size: points.len() })?;
        lp.add_constraint([(w[0], p[0]), (w[1], p[1]), (w[2], p[2]), (b, -1.0)], ComparisonOp::Le, 0.0);
    }
    let sol = lp.solve().map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let margin = sol.objective();
    if margin <= REGULARITY_MARGIN {
        return Ok((false, None));
    }
    let h = Halfspace::new([sol[w[0]], sol[w[1]], sol[w[2]]], sol[b])?;
    let sound = h.value(c0) > 0.0
        && h.value(c1) > 0.0
        && a.iter().all(|i| h.value(&points[i]) <= REGULARITY_MARGIN);
    if !sound {
        return Err(Error::NumericalFailure(format!(
            "separating halfspace with margin {margin} failed re-verification"
        )));
    }
    Ok((true, Some(h)))
}

/// Sample points, centers and one cone convexity per center.
#[derive(Clone, Debug)]
pub struct SphereModel {
    points: Vec<Vec3>,
    centers: Vec<Vec3>,
    tol: f64,
    convexities: Vec<Arc<Convexity>>,
}

impl SphereModel {
    /// Validates the geometry and builds `G(c)` for each center, with ids
    /// `Gc0, Gc1, ...`. `tol = None` picks the default.
    pub fn new(points: Vec<Vec3>, centers: Vec<Vec3>, tol: Option<f64>) -> Result<Self> {
        if points.len() < 2 || points.len() > MAX_ELEMENTS {
            return Err(Error::InvalidGeometry(format!(
                "need 2..={MAX_ELEMENTS} points, got {}",
                points.len()
            )));
        }
        validate_geometry(&points, &centers)?;
        let tol = match tol {
            Some(t) if t.is_finite() && t >= 0.0 => t,
            Some(t) => return Err(Error::InvalidGeometry(format!("tolerance {t} is not a finite nonnegative number"))),
            None => 1.5 * median_nn_chord(&points),
        };
        let convexities = centers
            .iter()
            .enumerate()
            .map(|(i, c)| cone_convexity(&points, c, tol, format!("Gc{i}")).map(Arc::new))
            .collect::<Result<_>>()?;
        Ok(SphereModel { points, centers, tol, convexities })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn space(&self) -> &GroundSpace {
        self.convexities[0].space()
    }

    pub fn convexities(&self) -> &[Arc<Convexity>] {
        &self.convexities
    }

    pub fn convexity(&self, center: usize) -> Result<&Arc<Convexity>> {
        self.convexities.get(center).ok_or(Error::UnknownCenter(center))
    }

    pub fn segment_c(&self, center: usize, x1: usize, x2: usize) -> Result<ElemSet> {
        let c = self.centers.get(center).ok_or(Error::UnknownCenter(center))?;
        for x in [x1, x2] {
            if x >= self.points.len() {
                return Err(Error::OutOfRange { element: x, size: self.points.len() });
            }
        }
        Ok(cone_segment(&self.points, c, self.tol, x1, x2))
    }

    pub fn is_regular(&self, a: &ElemSet, c0: usize, c1: usize) -> Result<(bool, Option<Halfspace>)> {
        let p0 = self.centers.get(c0).ok_or(Error::UnknownCenter(c0))?;
        let p1 = self.centers.get(c1).ok_or(Error::UnknownCenter(c1))?;
        is_regular_points(&self.points, a, p0, p1)
    }
}

fn validate_geometry(points: &[Vec3], centers: &[Vec3]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::InvalidGeometry("no centers".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if !p.iter().all(|x| x.is_finite()) || (norm(p) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidGeometry(format!("point {i} is not a unit vector")));
        }
    }
    for (i, c) in centers.iter().enumerate() {
        if !c.iter().all(|x| x.is_finite()) || norm(c) >= 1.0 {
            return Err(Error::InvalidGeometry(format!("center {i} is not inside the open unit ball")));
        }
    }
    Ok(())
}

/// Points of the model outside the open halfspace `h`, with their original
/// indices.
pub fn subspace(points: &[Vec3], h: &Halfspace) -> Result<(Vec<Vec3>, Vec<usize>)> {
    let index: Vec<usize> = (0..points.len()).filter(|&i| !h.contains(&points[i])).collect();
    if index.is_empty() {
        return Err(Error::EmptySubspace);
    }
    Ok((index.iter().map(|&i| points[i]).collect(), index))
}

/// Grows `start` into a member of `1/{convs}`: while some small `B` has no
/// hull inside the set, one of its hulls (chosen at random) is added.
pub fn grow_member<R: Rng>(convs: &[&Convexity], start: ElemSet, rng: &mut R) -> ElemSet {
    let space = convs[0].space();
    let mut a = start;
    loop {
        let mut unserved = None;
        let _ = space.for_each_small_subset(&a, |_, r| {
            if convs.iter().any(|c| c.small_hull(r).is_subset(&a)) {
                std::ops::ControlFlow::Continue(())
            } else {
                unserved = Some(r);
                std::ops::ControlFlow::Break(())
            }
        });
        match unserved {
            None => return a,
            Some(r) => a = a.union(&convs[rng.gen_range(0..convs.len())].small_hull(r)),
        }
    }
}

/// Random open halfspace holding both centers, cutting off roughly the
/// lower `fraction` of the points along a random direction.
fn random_cap<R: Rng>(points: &[Vec3], c0: &Vec3, c1: &Vec3, fraction: f64, rng: &mut R) -> Option<Halfspace> {
    for _ in 0..64 {
        let w: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if norm(&w) < 1e-3 {
            continue;
        }
        let mut vals: Vec<f64> = points.iter().map(|p| dot(&w, p)).collect();
        vals.sort_by(f64::total_cmp);
        let b = vals[((vals.len() as f64 * fraction) as usize).min(vals.len() - 1)];
        if dot(&w, c0) > b && dot(&w, c1) > b {
            return Halfspace::new(w, b).ok();
        }
    }
    None
}

#[derive(Serialize)]
struct PairHullViolation {
    set: ElemSet,
    pair_hull: ElemSet,
}

/// Checks that sampled regular members of `1/{G(c0), G(c1)}` equal their
/// pair hull. Members are grown from 1 to 4 random seed points below a
/// random cap containing both centers; sampling stops after `target`
/// regular members or `20 * target` attempts.
pub fn build_example1<R: Rng>(
    model: &SphereModel,
    c0: usize,
    c1: usize,
    target: usize,
    rng: &mut R,
) -> Result<Report> {
    let g0 = model.convexity(c0)?.clone();
    let g1 = model.convexity(c1)?.clone();
    let convs = [g0.as_ref(), g1.as_ref()];
    let (p0, p1) = (model.centers[c0], model.centers[c1]);
    let mut report = Report::new("example1");
    let (mut attempts, mut regular, mut strict, mut violations) = (0u64, 0u64, 0u64, 0u64);
    let (mut irregular, mut irregular_violations) = (0u64, 0u64);
    while (regular as usize) < target && attempts < 20 * target as u64 {
        attempts += 1;
        let fraction = rng.gen_range(0.2..0.6);
        let Some(cap) = random_cap(&model.points, &p0, &p1, fraction, rng) else { continue };
        let below: Vec<usize> = (0..model.points.len()).filter(|&i| !cap.contains(&model.points[i])).collect();
        if below.is_empty() {
            continue;
        }
        let seeds = rng.gen_range(1..=4);
        let start: ElemSet = (0..seeds).map(|_| below[rng.gen_range(0..below.len())]).collect();
        let a = grow_member(&convs, start, rng);
        let ph = pair_hull_of(&convs, &a);
        let (is_reg, _) = model.is_regular(&a, c0, c1)?;
        if is_reg {
            regular += 1;
            if !g0.is_convex_of(&a) && !g1.is_convex_of(&a) {
                strict += 1;
            }
            if ph != a {
                violations += 1;
                report.fail(PairHullViolation { set: a, pair_hull: ph });
            }
        } else {
            irregular += 1;
            if ph != a {
                irregular_violations += 1;
            }
        }
    }
    report.set_count("points", model.points.len() as u64);
    report.set_count("attempts", attempts);
    report.set_count("regular", regular);
    report.set_count("regular_strictly_semiconvex", strict);
    report.set_count("violations", violations);
    report.set_count("irregular", irregular);
    report.set_count("irregular_not_in_domain", irregular_violations);
    if (regular as usize) < target {
        report.fail(format!("only {regular} regular members in {attempts} attempts"));
    }
    Ok(report)
}

/// `G'(c_λ)` on the subspace points, one per `λ`.
fn restricted_family(
    sub: &[Vec3],
    c0: &Vec3,
    c1: &Vec3,
    tol: f64,
    lambdas: &[f64],
) -> Result<Vec<Convexity>> {
    // c_λ = λ c0 + (1 - λ) c1
    lambdas
        .iter()
        .map(|&l| {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidGeometry(format!("λ = {l} is outside [0, 1]")));
            }
            cone_convexity(sub, &lerp(c1, c0, l), tol, format!("Gl{l}"))
        })
        .collect()
}

fn check_halfspace(h: &Halfspace, c0: &Vec3, c1: &Vec3) -> Result<()> {
    if !h.is_parallel_to(&sub(c1, c0)) {
        return Err(Error::InvalidGeometry("halfspace is not parallel to [c0, c1]".into()));
    }
    if !(h.contains(c0) && h.contains(c1)) {
        return Err(Error::InvalidGeometry("halfspace does not contain both centers".into()));
    }
    Ok(())
}

/// `k` evenly spaced values in `[lo, hi]`; the midpoint when `k = 1`.
pub fn lambda_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![(lo + hi) / 2.0],
        _ => (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
    }
}

/// Independence of the restricted convexities `G'(c_λ)` on the points
/// outside `h`. Exhaustive over the subspace when it fits under `cap`,
/// otherwise `samples` grown members are checked.
#[allow(clippy::too_many_arguments)]
pub fn build_example2<R: Rng>(
    model: &SphereModel,
    c0: usize,
    c1: usize,
    h: &Halfspace,
    lambdas: &[f64],
    cap: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Report> {
    let p0 = *model.centers.get(c0).ok_or(Error::UnknownCenter(c0))?;
    let p1 = *model.centers.get(c1).ok_or(Error::UnknownCenter(c1))?;
    check_halfspace(h, &p0, &p1)?;
    let (sub_pts, index) = subspace(&model.points, h)?;
    let family = restricted_family(&sub_pts, &p0, &p1, model.tol, lambdas)?;
    let refs: Vec<&Convexity> = family.iter().collect();
    let mut report = Report::new("example2");
    report.set_count("subspace", index.len() as u64);
    report.set_count("convexities", family.len() as u64);
    report.set_value("lambdas", lambdas);
    if refs.is_empty() {
        return Err(Error::EmptyList);
    }
    let space = refs[0].space().clone();
    let mut violations = 0;
    if space.check_cap(cap).is_ok() {
        let dom = crate::independence::independence_domain(&refs, cap)?;
        report.set_value("mode", "exhaustive");
        report.set_count("members", (dom.domain.len() + dom.violations.len()) as u64);
        for (a, ph) in &dom.violations {
            violations += 1;
            report.fail(PairHullViolation { set: *a, pair_hull: *ph });
        }
    } else {
        report.set_value("mode", "sampled");
        for _ in 0..samples {
            let seeds = rng.gen_range(1..=4);
            let start: ElemSet = (0..seeds).map(|_| rng.gen_range(0..space.size())).collect();
            let a = grow_member(&refs, start, rng);
            debug_assert!(semiconvex(&space, &refs, &a));
            let ph = pair_hull_of(&refs, &a);
            if ph != a {
                violations += 1;
                report.fail(PairHullViolation { set: a, pair_hull: ph });
            }
        }
        report.set_count("members", samples as u64);
    }
    report.set_count("violations", violations);
    Ok(report)
}

/// The two multiconvexities of the midpoint construction on the subspace
/// outside `h`, with the midpoint convexity itself.
pub struct MidpointPair {
    pub index: Vec<usize>,
    /// Intersection of `G'(c_λ)` over the sampled `λ ∈ [1/2, 1]`.
    pub g1: Convexity,
    /// Intersection of `G'(c_λ)` over the sampled `λ ∈ [0, 1/2]`.
    pub g2: Convexity,
    pub mid: Convexity,
    pub parts: Vec<Convexity>,
}

pub fn midpoint_pair(model: &SphereModel, c0: usize, c1: usize, h: &Halfspace, k_per_half: usize) -> Result<MidpointPair> {
    let p0 = *model.centers.get(c0).ok_or(Error::UnknownCenter(c0))?;
    let p1 = *model.centers.get(c1).ok_or(Error::UnknownCenter(c1))?;
    check_halfspace(h, &p0, &p1)?;
    if k_per_half == 0 {
        return Err(Error::EmptyList);
    }
    let (sub_pts, index) = subspace(&model.points, h)?;
    let upper = restricted_family(&sub_pts, &p0, &p1, model.tol, &lambda_grid(0.5, 1.0, k_per_half.max(2)))?;
    let lower = restricted_family(&sub_pts, &p0, &p1, model.tol, &lambda_grid(0.0, 0.5, k_per_half.max(2)))?;
    let (upper, lower) = if k_per_half == 1 {
        (vec![upper[0].clone()], vec![lower[lower.len() - 1].clone()])
    } else {
        (upper, lower)
    };
    let mid = restricted_family(&sub_pts, &p0, &p1, model.tol, &[0.5])?.remove(0).renamed("Gmid");
    let g1 = intersect_convexities(&upper.iter().collect::<Vec<_>>())?.renamed("G1");
    let g2 = intersect_convexities(&lower.iter().collect::<Vec<_>>())?.renamed("G2");
    let parts = upper.into_iter().chain(lower).collect();
    Ok(MidpointPair { index, g1, g2, mid, parts })
}

/// Midpoint construction checks on the subspace outside `h`. Asserted: the
/// identity `hull1 ∩ hull2 = hull_mid` on every nonempty set of at most
/// four points, the conical scan of the pair lifted to arity 3, and
/// independence of that pair. Counted but not asserted: the step property
/// of the midpoint hull for tuples of length at most four.
pub fn build_example3(
    model: &SphereModel,
    c0: usize,
    c1: usize,
    h: &Halfspace,
    k_per_half: usize,
    cap: usize,
) -> Result<Report> {
    let pair = midpoint_pair(model, c0, c1, h, k_per_half)?;
    let n = pair.index.len();
    let mut report = Report::new("example3");
    report.set_count("subspace", n as u64);
    report.set_count("k_per_half", k_per_half as u64);
    report.set_value("tol", model.tol);

    // Step property: every x in hull_mid(P ∪ {x_n}) lies in hull_mid{y, x_n}
    // for some y in hull_mid(P).
    let small = GroundSpace::new(n, n.min(3))?;
    let (mut step_checked, mut step_failed) = (0u64, 0u64);
    for p in small.small_subsets().filter(|p| !p.is_empty()) {
        let q = pair.mid.hull_of(&p);
        for xn in 0..n {
            step_checked += 1;
            let reach = q
                .iter()
                .fold(ElemSet::EMPTY, |acc, y| acc.union(&pair.mid.hull_of(&ElemSet::singleton(y).with(xn))));
            let full = pair.mid.hull_of(&p.with(xn));
            if !full.is_subset(&reach) {
                step_failed += 1;
                let mut tuple = p.to_vec();
                tuple.push(xn);
                report.witness(serde_json::json!({ "step": tuple, "missing": full.difference(&reach) }));
            }
        }
    }
    report.set_count("step_checked", step_checked);
    report.set_count("step_failed", step_failed);

    let four = GroundSpace::new(n, n.min(4))?;
    let (mut eq_checked, mut eq_failed, mut nontrivial) = (0u64, 0u64, 0u64);
    for b in four.small_subsets().filter(|b| !b.is_empty()) {
        eq_checked += 1;
        let m = pair.mid.hull_of(&b);
        let ph = pair.g1.hull_of(&b).intersection(&pair.g2.hull_of(&b));
        if m != b && m.len() < n {
            nontrivial += 1;
        }
        if ph != m {
            eq_failed += 1;
            report.fail(serde_json::json!({ "set": b, "pair_hull": ph, "mid_hull": m }));
        }
    }
    report.set_count("identity_checked", eq_checked);
    report.set_count("identity_failed", eq_failed);
    report.set_count("identity_nontrivial", nontrivial);

    let g1 = pair.g1.with_arity(3.min(n))?;
    let g2 = pair.g2.with_arity(3.min(n))?;
    let scan = is_conically_independent(&g1, &g2, cap)?;
    report.absorb("conical", &scan.to_report());
    if scan.independent() && n >= 3 {
        report.absorb("prop3", &verify_prop3(&scan, &g1, &g2, cap)?);
    }
    Ok(report)
}

/// Preset used by the acceptance suite and `gen sphere`: two centers at
/// `(±0.5, 0, 0.3)` and the cap `z > -0.2`, with the tolerance set to half
/// the median nearest-neighbor chord.
pub fn standard_model(points: usize) -> Result<(SphereModel, Halfspace)> {
    let pts = fibonacci_sphere(points);
    let tol = 0.5 * median_nn_chord(&pts);
    let model = SphereModel::new(pts, vec![[-0.5, 0.0, 0.3], [0.5, 0.0, 0.3]], Some(tol))?;
    Ok((model, Halfspace::new([0.0, 0.0, 1.0], -0.2)?))
}
