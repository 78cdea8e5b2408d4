//! n-ary convexities on a finite ground space.
//!
//! A convexity is specified by a *base generator*: one set `h(B)` for every
//! subset `B` with `|B| <= n`. The convex sets are those `A` with
//! `h(B) ⊆ A` for every small `B ⊆ A`; they contain the whole space and are
//! closed under intersection, so each `A` has a least convex superset, its
//! hull. [`make_convexity`] closes the generator once, caching the hull of
//! every small subset, and [`Convexity::hull`] grows larger sets by a
//! round-based fixpoint over those cached hulls.
//!
//! ```
//! use fractoconvex::{Convexity, ElemSet, GroundSpace};
//!
//! let space = GroundSpace::new(10, 2)?;
//! let g = Convexity::interval(&space, "G1");
//! let a: ElemSet = [2, 5].into_iter().collect();
//! assert_eq!(g.hull(&a)?.to_vec(), vec![2, 3, 4, 5]);
//! assert!(!g.is_convex(&a)?);
//! # Ok::<(), fractoconvex::Error>(())
//! ```

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::ops::ControlFlow;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{ElemSet, GroundSpace, SetFamily};

/// Generator table: `h(B)` for every `B` with `|B| <= n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseHull {
    space: GroundSpace,
    table: Vec<Option<ElemSet>>,
}

impl BaseHull {
    /// Tabulates `f` over every small subset.
    pub fn from_fn<F>(space: &GroundSpace, mut f: F) -> Self
    where
        F: FnMut(ElemSet) -> ElemSet,
    {
        let table = space.small_subsets().map(|b| Some(f(b))).collect();
        BaseHull { space: space.clone(), table }
    }

    /// Builds a table from explicit entries. `∅` and singletons default to
    /// themselves; any other missing subset is left empty and reported by
    /// [`make_convexity`] as [`Error::MissingEntry`].
    pub fn from_entries<I>(space: &GroundSpace, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ElemSet, ElemSet)>,
    {
        let mut table: Vec<Option<ElemSet>> = space
            .small_subsets()
            .map(|b| (b.len() <= 1).then_some(b))
            .collect();
        for (b, h) in entries {
            space.check(&b)?;
            let r = space.rank(&b).ok_or_else(|| {
                Error::InvalidSpace(format!("hull entry {b} is larger than the arity"))
            })?;
            table[r] = Some(h);
        }
        Ok(BaseHull { space: space.clone(), table })
    }

    pub fn space(&self) -> &GroundSpace {
        &self.space
    }

    pub fn get(&self, b: &ElemSet) -> Option<ElemSet> {
        self.space.rank(b).and_then(|r| self.table[r])
    }
}

/// An n-ary convexity with its closed hull table.
#[derive(Clone, Debug)]
pub struct Convexity {
    id: String,
    space: GroundSpace,
    base: Vec<ElemSet>,
    closed: Vec<ElemSet>,
}

impl PartialEq for Convexity {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.space == other.space && self.closed == other.closed
    }
}

/// Validates a generator and closes it into a convexity.
pub fn make_convexity(space: &GroundSpace, base: BaseHull, id: impl Into<String>) -> Result<Convexity> {
    if base.space != *space {
        return Err(Error::SpaceMismatch);
    }
    let mut table = Vec::with_capacity(base.table.len());
    for (r, entry) in base.table.into_iter().enumerate() {
        let b = space.unrank(r);
        let h = entry.ok_or(Error::MissingEntry(b))?;
        space.check(&h)?;
        if b.is_empty() && !h.is_empty() {
            return Err(Error::NonEmptyHullOfEmpty(h));
        }
        if !b.is_subset(&h) {
            return Err(Error::ExtensivityViolation { set: b, hull: h });
        }
        table.push(h);
    }

    // Table order is by subset size, so smaller subsets are already closed
    // when a larger one is processed. Mixing closed and raw entries is
    // harmless: every closed entry lies inside the final closure.
    let mut closed = table.clone();
    for r in 0..closed.len() {
        let b = space.unrank(r);
        if b.len() <= 1 && closed[r] == b {
            continue;
        }
        let hull = close(space, closed[r], |q| closed[q]);
        closed[r] = hull;
    }
    Ok(Convexity { id: id.into(), space: space.clone(), base: table, closed })
}

/// Least superset of `start` closed under `lookup` (indexed by subset rank).
fn close<F>(space: &GroundSpace, start: ElemSet, lookup: F) -> ElemSet
where
    F: Fn(usize) -> ElemSet,
{
    close_from(space, ElemSet::EMPTY, start, lookup)
}

/// As [`close`], where `closed` is already closed and `start ⊇ closed`.
fn close_from<F>(space: &GroundSpace, closed: ElemSet, start: ElemSet, lookup: F) -> ElemSet
where
    F: Fn(usize) -> ElemSet,
{
    let mut cur = start;
    let mut frontier = start.difference(&closed);
    loop {
        let mut next = cur;
        // Subsets lying wholly inside the previous round's set contributed
        // already; only those touching the frontier can add anything.
        let _ = space.for_each_small_subset_touching(&cur, &frontier, |_, r| {
            next = next.union(&lookup(r));
            ControlFlow::Continue(())
        });
        if next == cur {
            return cur;
        }
        frontier = next.difference(&cur);
        cur = next;
    }
}

impl Convexity {
    /// Same as [`make_convexity`].
    pub fn new(space: &GroundSpace, base: BaseHull, id: impl Into<String>) -> Result<Self> {
        make_convexity(space, base, id)
    }

    /// Every set is convex.
    pub fn free(space: &GroundSpace, id: impl Into<String>) -> Self {
        make_convexity(space, BaseHull::from_fn(space, |b| b), id).expect("identity generator is valid")
    }

    /// Order convexity of the chain `0 < 1 < ... < size-1`: hulls are
    /// contiguous runs `{min A ..= max A}`.
    pub fn interval(space: &GroundSpace, id: impl Into<String>) -> Self {
        let base = BaseHull::from_fn(space, |b| match (b.first(), b.last()) {
            (Some(lo), Some(hi)) => (lo..=hi).collect(),
            _ => ElemSet::EMPTY,
        });
        make_convexity(space, base, id).expect("interval generator is valid")
    }

    /// Interval convexity transported along the bijection `perm`
    /// (`x ↦ perm[x]`): the hull of `A` is the image of the interval spanned
    /// by the preimage of `A`.
    pub fn permuted_interval(space: &GroundSpace, id: impl Into<String>, perm: &[usize]) -> Result<Self> {
        let inverse = invert_permutation(perm, space.size())?;
        let base = BaseHull::from_fn(space, |b| {
            let pre: ElemSet = b.iter().map(|x| inverse[x]).collect();
            match (pre.first(), pre.last()) {
                (Some(lo), Some(hi)) => (lo..=hi).map(|i| perm[i]).collect(),
                _ => ElemSet::EMPTY,
            }
        });
        make_convexity(space, base, id)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn space(&self) -> &GroundSpace {
        &self.space
    }

    pub fn arity(&self) -> usize {
        self.space.arity()
    }

    /// A copy under a different id.
    pub fn renamed(&self, id: impl Into<String>) -> Self {
        Convexity { id: id.into(), ..self.clone() }
    }

    /// The generator entry for a small subset, as supplied.
    pub fn base_entry(&self, b: &ElemSet) -> Option<ElemSet> {
        self.space.rank(b).map(|r| self.base[r])
    }

    /// Cached hull of the small subset with the given rank.
    #[inline]
    pub(crate) fn small_hull(&self, rank: usize) -> ElemSet {
        self.closed[rank]
    }

    /// Least convex superset of `a`.
    pub fn hull(&self, a: &ElemSet) -> Result<ElemSet> {
        self.space.check(a)?;
        Ok(self.hull_of(a))
    }

    pub(crate) fn hull_of(&self, a: &ElemSet) -> ElemSet {
        if let Some(r) = self.space.rank(a) {
            return self.closed[r];
        }
        close(&self.space, *a, |r| self.closed[r])
    }

    /// Hash of the closed hull table, for telling convexities apart.
    pub(crate) fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.closed.hash(&mut h);
        h.finish()
    }

    /// Hull of `convex ∪ {x}`, where `convex` is already convex.
    pub(crate) fn extend_hull(&self, convex: &ElemSet, x: usize) -> ElemSet {
        if convex.contains(x) {
            return *convex;
        }
        close_from(&self.space, *convex, convex.with(x), |r| self.closed[r])
    }

    /// `true` iff every small `B ⊆ a` has its hull inside `a`.
    pub fn is_convex(&self, a: &ElemSet) -> Result<bool> {
        self.space.check(a)?;
        Ok(self.is_convex_of(a))
    }

    pub(crate) fn is_convex_of(&self, a: &ElemSet) -> bool {
        self.space
            .for_each_small_subset(a, |_, r| {
                if self.closed[r].is_subset(a) {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            })
            .is_continue()
    }

    /// All convex sets, in mask order.
    pub fn enumerate_convex(&self, cap: usize) -> Result<SetFamily> {
        let count = self.space.subset_count(cap)?;
        let members = (0..count)
            .into_par_iter()
            .map(ElemSet::from_mask)
            .filter(|a| self.is_convex_of(a))
            .collect();
        Ok(SetFamily::from_sorted(members))
    }

    /// Same family on a space of a different arity: the new generator is the
    /// hull of each subset of size `<= arity`. Raising the arity never changes
    /// the family of an n-ary convexity.
    pub fn with_arity(&self, arity: usize) -> Result<Self> {
        let space = self.space.with_arity(arity)?;
        let base = BaseHull::from_fn(&space, |b| self.hull_of(&b));
        make_convexity(&space, base, self.id.clone())
    }

    /// Convexity induced on the subspace `y`, whose elements are renumbered
    /// `0..|y|` in ascending order. Each small subset is generated by its
    /// hull traced on `y`. Returns the convexity and the new-to-old map.
    pub fn restrict(&self, y: &ElemSet, id: impl Into<String>) -> Result<(Convexity, Vec<usize>)> {
        self.space.check(y)?;
        if y.is_empty() {
            return Err(Error::EmptySubspace);
        }
        let old: Vec<usize> = y.to_vec();
        let space = GroundSpace::new(old.len(), self.arity().min(old.len()))?;
        let base = BaseHull::from_fn(&space, |b| {
            let lifted: ElemSet = b.iter().map(|i| old[i]).collect();
            let h = self.hull_of(&lifted);
            (0..old.len()).filter(|&i| h.contains(old[i])).collect()
        });
        Ok((make_convexity(&space, base, id)?, old))
    }

    /// Exhaustive check of the hull axioms and of n-arity.
    ///
    /// Monotonicity is checked on covering pairs `A ⊂ A ∪ {x}` only; every
    /// inclusion `A ⊆ B` is a chain of such steps.
    pub fn check_axioms(&self, cap: usize) -> Result<AxiomReport> {
        let count = self.space.subset_count(cap)?;
        let hulls: Vec<ElemSet> = (0..count)
            .into_par_iter()
            .map(|m| self.hull_of(&ElemSet::from_mask(m)))
            .collect();
        let n = self.space.size();
        let mut report = AxiomReport::new(count);
        for (m, &h) in hulls.iter().enumerate() {
            let a = ElemSet::from_mask(m as u64);
            if !a.is_subset(&h) {
                report.fail(AxiomProperty::Extensive, vec![a, h]);
            }
            for x in 0..n {
                if !a.contains(x) {
                    let b = a.with(x);
                    let hb = hulls[b.low_mask() as usize];
                    if !h.is_subset(&hb) {
                        report.fail(AxiomProperty::Monotone, vec![a, b, h, hb]);
                    }
                }
            }
            let hh = hulls[h.low_mask() as usize];
            if hh != h {
                report.fail(AxiomProperty::Idempotent, vec![a, h, hh]);
            }
            if (h == a) != self.is_convex_of(&a) {
                report.fail(AxiomProperty::NAry, vec![a, h]);
            }
        }
        Ok(report)
    }

    /// Randomized version of [`Convexity::check_axioms`] for spaces too large
    /// to enumerate. Each sample draws a random set `A`, a random superset
    /// `B = A ∪ R`, and checks the same four properties on them.
    pub fn check_axioms_sampled<R: Rng>(&self, samples: usize, rng: &mut R) -> AxiomReport {
        let n = self.space.size();
        let mut report = AxiomReport::new(samples as u64);
        for _ in 0..samples {
            let density = rng.gen_range(0.0..0.3);
            let a: ElemSet = (0..n).filter(|_| rng.gen_bool(density)).collect();
            let extra: ElemSet = (0..n).filter(|_| rng.gen_bool(0.05)).collect();
            let b = a.union(&extra);
            let (ha, hb) = (self.hull_of(&a), self.hull_of(&b));
            if !a.is_subset(&ha) {
                report.fail(AxiomProperty::Extensive, vec![a, ha]);
            }
            if !ha.is_subset(&hb) {
                report.fail(AxiomProperty::Monotone, vec![a, b, ha, hb]);
            }
            let hh = self.hull_of(&ha);
            if hh != ha {
                report.fail(AxiomProperty::Idempotent, vec![a, ha, hh]);
            }
            if (ha == a) != self.is_convex_of(&a) || !self.is_convex_of(&ha) {
                report.fail(AxiomProperty::NAry, vec![a, ha]);
            }
        }
        report
    }

    /// Overwrites one cached hull. Test-only fault injection.
    #[cfg(test)]
    pub(crate) fn corrupt_closed(&mut self, b: &ElemSet, value: ElemSet) {
        let r = self.space.rank(b).unwrap();
        self.closed[r] = value;
    }
}

pub(crate) fn invert_permutation(perm: &[usize], size: usize) -> Result<Vec<usize>> {
    if perm.len() != size {
        return Err(Error::NotAPermutation(size));
    }
    let mut inverse = vec![usize::MAX; size];
    for (i, &p) in perm.iter().enumerate() {
        if p >= size || inverse[p] != usize::MAX {
            return Err(Error::NotAPermutation(size));
        }
        inverse[p] = i;
    }
    Ok(inverse)
}

/// Convexity whose convex sets are those convex in every input.
///
/// The generator of the result maps each small `B` to the least set
/// containing `B` that is closed under every input hull.
pub fn intersect_convexities(convs: &[&Convexity]) -> Result<Convexity> {
    let first = convs.first().ok_or(Error::EmptyList)?;
    let space = first.space();
    if convs.iter().any(|c| c.space() != space) {
        return Err(Error::SpaceMismatch);
    }
    if convs.len() == 1 {
        return Ok((*first).clone());
    }
    let base = BaseHull::from_fn(space, |b| joint_hull(convs, &b));
    let id = convs.iter().map(|c| c.id()).collect::<Vec<_>>().join("∩");
    make_convexity(space, base, id)
}

/// Least superset of `a` that is convex in every convexity of `convs`.
pub(crate) fn joint_hull(convs: &[&Convexity], a: &ElemSet) -> ElemSet {
    let mut cur = *a;
    loop {
        let next = convs.iter().fold(cur, |acc, c| acc.union(&c.hull_of(&acc)));
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomProperty {
    Extensive,
    Monotone,
    Idempotent,
    NAry,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomWitness {
    pub property: AxiomProperty,
    pub sets: Vec<ElemSet>,
}

/// Outcome of [`Convexity::check_axioms`]. A flag is `false` exactly when a
/// witness for that property is recorded (the first one found).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub extensive: bool,
    pub monotone: bool,
    pub idempotent: bool,
    pub n_ary: bool,
    pub checked: u64,
    pub witnesses: Vec<AxiomWitness>,
}

impl AxiomReport {
    fn new(checked: u64) -> Self {
        AxiomReport {
            extensive: true,
            monotone: true,
            idempotent: true,
            n_ary: true,
            checked,
            witnesses: Vec::new(),
        }
    }

    fn fail(&mut self, property: AxiomProperty, sets: Vec<ElemSet>) {
        let flag = match property {
            AxiomProperty::Extensive => &mut self.extensive,
            AxiomProperty::Monotone => &mut self.monotone,
            AxiomProperty::Idempotent => &mut self.idempotent,
            AxiomProperty::NAry => &mut self.n_ary,
        };
        if *flag {
            *flag = false;
            self.witnesses.push(AxiomWitness { property, sets });
        }
    }

    pub fn all_pass(&self) -> bool {
        self.extensive && self.monotone && self.idempotent && self.n_ary
    }
}

/// Hull tables keyed by set, for callers that want to inspect a convexity
/// without going through ranks.
pub fn closure_table(conv: &Convexity) -> HashMap<ElemSet, ElemSet> {
    conv.space
        .small_subsets()
        .zip(conv.closed.iter().copied())
        .collect()
}
