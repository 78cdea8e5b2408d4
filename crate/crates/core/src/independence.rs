//! Pair hulls, independence domains and the conical exchange scan.

use std::borrow::Borrow;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::convexity::Convexity;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::space::{ElemSet, GroundSpace, SetFamily};

fn shared_space<C: Borrow<Convexity>>(convs: &[C]) -> Result<&GroundSpace> {
    let first = convs.first().ok_or(Error::EmptyList)?.borrow();
    if convs.iter().any(|c| c.borrow().space() != first.space()) {
        return Err(Error::SpaceMismatch);
    }
    Ok(first.space())
}

fn shared_pair<'a>(g1: &'a Convexity, g2: &'a Convexity) -> Result<&'a GroundSpace> {
    if g1.space() != g2.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(g1.space())
}

pub(crate) fn pair_hull_of<C: Borrow<Convexity>>(convs: &[C], a: &ElemSet) -> ElemSet {
    convs
        .iter()
        .map(|c| c.borrow().hull_of(a))
        .reduce(|x, y| x.intersection(&y))
        .unwrap_or(*a)
}

/// `⋂_λ hull_λ(a)`.
pub fn pair_hull<C: Borrow<Convexity>>(convs: &[C], a: &ElemSet) -> Result<ElemSet> {
    shared_space(convs)?.check(a)?;
    Ok(pair_hull_of(convs, a))
}

/// Membership in `1/{convs}`: every small `B ⊆ a` has some hull inside `a`.
pub(crate) fn semiconvex<C: Borrow<Convexity>>(space: &GroundSpace, convs: &[C], a: &ElemSet) -> bool {
    space
        .for_each_small_subset(a, |_, r| {
            if convs.iter().any(|c| c.borrow().small_hull(r).is_subset(a)) {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        })
        .is_continue()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub independent: bool,
    /// Members of `1/{convs}` equal to their pair hull.
    pub domain: SetFamily,
    /// Members that are not, with their pair hull.
    pub violations: Vec<(ElemSet, ElemSet)>,
}

impl IndependenceReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new("independence");
        r.set_count("members", (self.domain.len() + self.violations.len()) as u64);
        r.set_count("domain", self.domain.len() as u64);
        r.set_count("violations", self.violations.len() as u64);
        r.set_value("independent", self.independent);
        for (a, h) in &self.violations {
            r.witness(serde_json::json!({ "set": a, "pair_hull": h }));
        }
        r.status = crate::report::Status::Info;
        r
    }
}

/// Splits the members of `1/{convs}` by whether they equal their pair hull.
pub fn independence_domain<C>(convs: &[C], cap: usize) -> Result<IndependenceReport>
where
    C: Borrow<Convexity> + Sync,
{
    let space = shared_space(convs)?;
    let count = space.subset_count(cap)?;
    let members: Vec<(ElemSet, ElemSet)> = (0..count)
        .into_par_iter()
        .map(ElemSet::from_mask)
        .filter(|a| semiconvex(space, convs, a))
        .map(|a| (a, pair_hull_of(convs, &a)))
        .collect();
    let (domain, violations): (Vec<_>, Vec<_>) = members.into_iter().partition(|(a, h)| a == h);
    Ok(IndependenceReport {
        independent: violations.is_empty(),
        domain: domain.into_iter().map(|(a, _)| a).collect(),
        violations,
    })
}

/// Pair hulls of every subset with at most three elements.
struct TripleHulls {
    space: GroundSpace,
    table: Vec<ElemSet>,
}

impl TripleHulls {
    fn new(g1: &Convexity, g2: &Convexity) -> Result<Self> {
        let base = g1.space();
        let space = GroundSpace::new(base.size(), base.size().min(3))?;
        let table = space.small_subsets().map(|t| pair_hull_of(&[g1, g2], &t)).collect();
        Ok(TripleHulls { space, table })
    }

    fn holds(&self, a: &ElemSet) -> bool {
        self.space
            .for_each_small_subset(a, |_, r| {
                if self.table[r].is_subset(a) {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            })
            .is_continue()
    }
}

/// Does the pair hull of every subset of `a` with at most three elements
/// stay inside `a`? Repeated points give the one- and two-element subsets.
pub fn condition_3_1(g1: &Convexity, g2: &Convexity, a: &ElemSet) -> Result<bool> {
    let space = shared_pair(g1, g2)?;
    space.check(a)?;
    let pts = a.to_vec();
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate().skip(i) {
            for &z in pts.iter().skip(j) {
                let t = ElemSet::singleton(x).with(y).with(z);
                if !pair_hull_of(&[g1, g2], &t).is_subset(a) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A tuple `x_1..x_k` and a target `x` in its pair hull.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConicalWitness {
    pub point_list: Vec<usize>,
    pub target: usize,
    pub verdict: bool,
    /// Which of `y_1` (for the first convexity) and `y_2` (for the second)
    /// could not be found. Empty when the verdict is true.
    pub missing: Vec<usize>,
}

/// Result of [`is_conically_independent`]. Only obtainable from the scan,
/// so it serves as evidence for [`verify_lemma1`] and [`verify_prop3`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConicalScan {
    ids: (String, String),
    #[serde(skip)]
    space: GroundSpace,
    #[serde(skip)]
    fingerprints: (u64, u64),
    independent: bool,
    scanned: u64,
    witness: Option<ConicalWitness>,
}

impl ConicalScan {
    pub fn independent(&self) -> bool {
        self.independent
    }

    /// Number of `(P, x_k)` pairs examined.
    pub fn scanned(&self) -> u64 {
        self.scanned
    }

    pub fn witness(&self) -> Option<&ConicalWitness> {
        self.witness.as_ref()
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new("conical");
        r.set_count("scanned", self.scanned);
        r.set_value("convexities", [&self.ids.0, &self.ids.1]);
        if let Some(w) = &self.witness {
            r.fail(w);
        }
        r
    }

    fn require(&self, g1: &Convexity, g2: &Convexity) -> Result<()> {
        if self.ids != (g1.id().to_string(), g2.id().to_string())
            || self.space != *g1.space()
            || self.fingerprints != (g1.fingerprint(), g2.fingerprint())
        {
            return Err(Error::PreconditionNotChecked(format!(
                "conical scan was run on ({}, {}), not on ({}, {})",
                self.ids.0,
                self.ids.1,
                g1.id(),
                g2.id()
            )));
        }
        if !self.independent {
            return Err(Error::PreconditionNotChecked(format!(
                "({}, {}) failed the conical scan",
                self.ids.0, self.ids.1
            )));
        }
        Ok(())
    }
}

/// Segment hulls `hull({y, x})`, indexed `[x][y]`.
fn segment_table(g: &Convexity) -> Vec<Vec<ElemSet>> {
    let n = g.space().size();
    (0..n)
        .map(|x| (0..n).map(|y| g.hull_of(&ElemSet::singleton(x).with(y))).collect())
        .collect()
}

struct ConicalContext<'a> {
    g1: &'a Convexity,
    g2: &'a Convexity,
    seg1: Vec<Vec<ElemSet>>,
    seg2: Vec<Vec<ElemSet>>,
}

impl<'a> ConicalContext<'a> {
    fn new(g1: &'a Convexity, g2: &'a Convexity) -> Self {
        ConicalContext { g1, g2, seg1: segment_table(g1), seg2: segment_table(g2) }
    }

    // Any x already in Q = pair_hull(P) is reached with y1 = y2 = x. If x_k
    // lies in Q, adding it changes neither hull. Otherwise the y1 and y2
    // searches are independent, so it suffices to cover the new points by
    // the unions of the segments from Q to x_k in each convexity.
    fn check(&self, p: &ElemSet, xk: usize) -> Option<ConicalWitness> {
        self.check_all(p, xk..xk + 1)
    }

    fn check_all(&self, p: &ElemSet, last: std::ops::Range<usize>) -> Option<ConicalWitness> {
        let (h1, h2) = (self.g1.hull_of(p), self.g2.hull_of(p));
        let q = h1.intersection(&h2);
        for xk in last {
            if q.contains(xk) {
                continue;
            }
            let full = self.g1.extend_hull(&h1, xk).intersection(&self.g2.extend_hull(&h2, xk));
            let (mut u1, mut u2) = (ElemSet::EMPTY, ElemSet::EMPTY);
            for y in q.iter() {
                u1 = u1.union(&self.seg1[xk][y]);
                u2 = u2.union(&self.seg2[xk][y]);
            }
            let Some(target) = full.difference(&q).iter().find(|&x| !u1.contains(x) || !u2.contains(x))
            else {
                continue;
            };
            let missing = [(1, &u1), (2, &u2)]
                .into_iter()
                .filter(|(_, u)| !u.contains(target))
                .map(|(i, _)| i)
                .collect();
            let mut point_list = p.to_vec();
            point_list.push(xk);
            return Some(ConicalWitness { point_list, target, verdict: false, missing });
        }
        None
    }
}

/// Checks the exchange condition for one prefix set `p` and last point `xk`.
/// Returns a failing witness, or `None` when the condition holds.
pub fn check_conical_at(
    g1: &Convexity,
    g2: &Convexity,
    p: &ElemSet,
    xk: usize,
) -> Result<Option<ConicalWitness>> {
    let space = shared_pair(g1, g2)?;
    space.check(p)?;
    space.check(&ElemSet::singleton(xk))?;
    Ok(ConicalContext::new(g1, g2).check(p, xk))
}

fn combinations(n: usize, k: usize) -> Vec<ElemSet> {
    fn rec(n: usize, k: usize, start: usize, acc: ElemSet, out: &mut Vec<ElemSet>) {
        if acc.len() == k {
            out.push(acc);
            return;
        }
        for x in start..=n - (k - acc.len()) {
            rec(n, k, x + 1, acc.with(x), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, ElemSet::EMPTY, &mut out);
    }
    out
}

/// Exhaustive conical scan.
///
/// A tuple `x_1..x_k` enters the condition only through the prefix set
/// `P = {x_1..x_{k-1}}` and the last point, so the scan runs over every
/// `P` with `3 <= |P| < N` (lexicographic within each size, sizes
/// ascending) and every `x_k`, inside or outside `P`. The first failure in
/// this order is the witness.
pub fn is_conically_independent(g1: &Convexity, g2: &Convexity, cap: usize) -> Result<ConicalScan> {
    let space = shared_pair(g1, g2)?;
    space.check_cap(cap)?;
    let n = space.size();
    let ctx = ConicalContext::new(g1, g2);
    let mut scanned = 0;
    let mut witness = None;
    for size in 3..n {
        let prefixes = combinations(n, size);
        witness = prefixes
            .par_iter()
            .find_map_first(|p| ctx.check_all(p, 0..n));
        match &witness {
            None => scanned += (prefixes.len() * n) as u64,
            Some(w) => {
                let p: ElemSet = w.point_list[..w.point_list.len() - 1].iter().copied().collect();
                let pos = prefixes.iter().position(|q| *q == p).expect("witness prefix");
                scanned += (pos * n + w.point_list[w.point_list.len() - 1] + 1) as u64;
                break;
            }
        }
    }
    Ok(ConicalScan {
        ids: (g1.id().to_string(), g2.id().to_string()),
        space: space.clone(),
        fingerprints: (g1.fingerprint(), g2.fingerprint()),
        independent: witness.is_none(),
        scanned,
        witness,
    })
}

/// Given a passing conical scan for `(g1, g2)`, checks that every `A`
/// satisfying [`condition_3_1`] equals its pair hull. Exhaustive over all
/// subsets.
pub fn verify_lemma1(scan: &ConicalScan, g1: &Convexity, g2: &Convexity, cap: usize) -> Result<Report> {
    scan.require(g1, g2)?;
    let space = g1.space();
    let count = space.subset_count(cap)?;
    let triples = TripleHulls::new(g1, g2)?;
    let checked: Vec<(ElemSet, ElemSet)> = (0..count)
        .into_par_iter()
        .map(ElemSet::from_mask)
        .filter(|a| triples.holds(a))
        .map(|a| (a, pair_hull_of(&[g1, g2], &a)))
        .collect();
    let mut report = Report::new("lemma1");
    report.set_count("subsets", count);
    report.set_count("condition_sets", checked.len() as u64);
    let mut violations = 0;
    for (a, h) in checked.iter().filter(|(a, h)| a != h) {
        violations += 1;
        report.fail(serde_json::json!({ "set": a, "pair_hull": h }));
    }
    report.set_count("violations", violations);
    Ok(report)
}

/// Given a passing conical scan for 3-ary `(g1, g2)`, checks that every
/// member of `1/{g1, g2}` equals its pair hull.
pub fn verify_prop3(scan: &ConicalScan, g1: &Convexity, g2: &Convexity, cap: usize) -> Result<Report> {
    for g in [g1, g2] {
        if g.arity() != 3 {
            return Err(Error::ArityMismatch { expected: 3, found: g.arity() });
        }
    }
    scan.require(g1, g2)?;
    let dom = independence_domain(&[g1, g2], cap)?;
    let mut report = Report::new("prop3");
    report.set_count("members", (dom.domain.len() + dom.violations.len()) as u64);
    report.set_count("violations", dom.violations.len() as u64);
    for (a, h) in &dom.violations {
        report.fail(serde_json::json!({ "set": a, "pair_hull": h }));
    }
    Ok(report)
}
