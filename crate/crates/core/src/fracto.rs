//! Fractoconvexities, multiconvexities and their join/meet algebra.
//!
//! A [`Fractoconvexity`] is a disjunction of [`Block`]s. A block `m/{G_λ}`
//! *serves* a small set `B ⊆ A` when at least `m` of its convexities keep
//! `hull_λ(B)` inside `A`; `A` is a member when every `B ⊆ A` with
//! `|B| <= n` is served by some block. The per-`B` predicate is the unit of
//! meaning here:
//!
//! * [`Fractoconvexity::join`] is the disjunction of the per-`B` predicates,
//! * [`Fractoconvexity::meet`] is their conjunction, computed structurally on
//!   full-block normal forms,
//! * [`Fractoconvexity::normalize`] rewrites to full blocks without changing
//!   the per-`B` predicate.
//!
//! Two notions of equality are kept apart: per-`B` equivalence
//! ([`Fractoconvexity::per_b_equivalent`]) and equality of member families
//! ([`Fractoconvexity::family_equal`]). The first implies the second, not the
//! other way round.

use std::cmp::Ordering;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::convexity::{intersect_convexities, Convexity};
use crate::error::{Error, Result};
use crate::space::{ElemSet, GroundSpace, SetFamily};

/// `threshold / {members}`: served when at least `threshold` member hulls fit.
#[derive(Clone, Debug)]
pub struct Block {
    members: Vec<Arc<Convexity>>,
    threshold: usize,
}

impl Block {
    /// Members are sorted by id. Ids must be distinct and share one space.
    pub fn new(mut members: Vec<Arc<Convexity>>, threshold: usize) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyList)?;
        let space = first.space().clone();
        if members.iter().any(|c| *c.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        members.sort_by(|a, b| a.id().cmp(b.id()));
        if let Some(w) = members.windows(2).find(|w| w[0].id() == w[1].id()) {
            return Err(Error::DuplicateId(w[0].id().to_string()));
        }
        if threshold == 0 || threshold > members.len() {
            return Err(Error::ThresholdOutOfRange { threshold, members: members.len() });
        }
        Ok(Block { members, threshold })
    }

    /// Threshold equal to the member count.
    pub fn full(members: Vec<Arc<Convexity>>) -> Result<Self> {
        let k = members.len();
        Block::new(members, k)
    }

    pub fn members(&self) -> &[Arc<Convexity>] {
        &self.members
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn is_full(&self) -> bool {
        self.threshold == self.members.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(|c| c.id())
    }

    pub fn space(&self) -> &GroundSpace {
        self.members[0].space()
    }

    #[inline]
    fn served_rank(&self, rank: usize, a: &ElemSet) -> bool {
        let mut needed = self.threshold;
        let mut left = self.members.len();
        for c in &self.members {
            if c.small_hull(rank).is_subset(a) {
                needed -= 1;
                if needed == 0 {
                    return true;
                }
            }
            left -= 1;
            if left < needed {
                return false;
            }
        }
        false
    }

    fn key(&self) -> (Vec<&str>, usize) {
        (self.ids().collect(), self.threshold)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{{", self.threshold)?;
        for (i, id) in self.ids().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(id)?;
        }
        f.write_str("}")
    }
}

/// Whether a value is known to be per-`B` equivalent to the expression it
/// was built from, or only to have the same member family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    PerB,
    ExtensionalOnly,
}

/// A join of blocks over one ground space.
#[derive(Clone, Debug)]
pub struct Fractoconvexity {
    space: GroundSpace,
    blocks: Vec<Block>,
    exactness: Exactness,
}

impl Fractoconvexity {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let space = blocks.first().ok_or(Error::EmptyFracto)?.space().clone();
        if blocks.iter().any(|b| *b.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        let mut out = Fractoconvexity { space, blocks: Vec::new(), exactness: Exactness::PerB };
        for b in blocks {
            out.push_unique(b);
        }
        Ok(out)
    }

    /// `threshold / {convs}` as a one-block fractoconvexity.
    pub fn frac(convs: &[Arc<Convexity>], threshold: usize) -> Result<Self> {
        Fractoconvexity::new(vec![Block::new(convs.to_vec(), threshold)?])
    }

    /// The multiconvexity over `convs`: one full block.
    pub fn multiconvexity(convs: &[Arc<Convexity>]) -> Result<Self> {
        Fractoconvexity::frac(convs, convs.len())
    }

    fn push_unique(&mut self, block: Block) {
        if !self.blocks.iter().any(|b| b.key() == block.key()) {
            self.blocks.push(block);
        }
    }

    pub fn space(&self) -> &GroundSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    /// `true` when every block is full.
    pub fn is_normal(&self) -> bool {
        self.blocks.iter().all(Block::is_full)
    }

    /// Is the small set `b ⊆ a` served by some block?
    pub fn served(&self, a: &ElemSet, b: &ElemSet) -> Result<bool> {
        self.space.check(a)?;
        let r = self.space.rank(b).filter(|_| b.is_subset(a)).ok_or_else(|| {
            Error::InvalidSpace(format!("{b} is not a subset of {a} of size <= {}", self.space.arity()))
        })?;
        Ok(self.served_rank(r, a))
    }

    #[inline]
    fn served_rank(&self, rank: usize, a: &ElemSet) -> bool {
        self.blocks.iter().any(|blk| blk.served_rank(rank, a))
    }

    /// Membership: every small subset of `a` is served.
    pub fn member(&self, a: &ElemSet) -> Result<bool> {
        self.space.check(a)?;
        Ok(self.member_of(a))
    }

    pub(crate) fn member_of(&self, a: &ElemSet) -> bool {
        self.space
            .for_each_small_subset(a, |_, r| {
                if self.served_rank(r, a) {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            })
            .is_continue()
    }

    /// `F1 ∨ F2`: blocks of both, deduplicated.
    pub fn join(&self, other: &Fractoconvexity) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let mut out = self.clone();
        for b in &other.blocks {
            out.push_unique(b.clone());
        }
        out.exactness = weakest(self.exactness, other.exactness);
        Ok(out)
    }

    /// `F1 ∩ F2`, as the cross-union of the two full-block normal forms.
    pub fn meet(&self, other: &Fractoconvexity) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let left = full_member_sets(&self.blocks);
        let right = full_member_sets(&other.blocks);
        let mut unions = Vec::with_capacity(left.len() * right.len());
        for l in &left {
            for r in &right {
                unions.push(merge_by_id(l, r)?);
            }
        }
        let mut out = from_full_sets(&self.space, absorb(unions))?;
        out.exactness = weakest(self.exactness, other.exactness);
        Ok(out)
    }

    /// Full-block normal form: each `m/{M}` becomes the join of `m/{Ω}` over
    /// all `Ω ⊆ M` with `|Ω| = m`; a full block is dropped when a retained
    /// one uses a subset of its convexities.
    pub fn normalize(&self) -> Self {
        let mut out = from_full_sets(&self.space, absorb(full_member_sets(&self.blocks)))
            .expect("normal form of a valid fractoconvexity is valid");
        out.exactness = self.exactness;
        out
    }

    /// Replaces each full block over `{G_λ : λ ∈ Ω}` by `1/{⋂ G_λ}`.
    ///
    /// Each replaced block has the same members as the original block, but
    /// the per-`B` predicate can differ, so the result is marked
    /// [`Exactness::ExtensionalOnly`].
    pub fn simplify_prop1(&self) -> Result<Self> {
        let mut blocks = Vec::new();
        for set in absorb(full_member_sets(&self.blocks)) {
            let conv = if set.len() == 1 {
                set[0].clone()
            } else {
                let refs: Vec<&Convexity> = set.iter().map(|c| c.as_ref()).collect();
                Arc::new(intersect_convexities(&refs)?)
            };
            blocks.push(Block::new(vec![conv], 1)?);
        }
        let mut out = Fractoconvexity::new(blocks)?;
        out.exactness = Exactness::ExtensionalOnly;
        Ok(out)
    }

    /// All members, in mask order.
    pub fn enumerate_members(&self, cap: usize) -> Result<SetFamily> {
        let count = self.space.subset_count(cap)?;
        let members = (0..count)
            .into_par_iter()
            .map(ElemSet::from_mask)
            .filter(|a| self.member_of(a))
            .collect();
        Ok(SetFamily::from_sorted(members))
    }

    /// Do both fractoconvexities have the same members?
    pub fn family_equal(&self, other: &Fractoconvexity, cap: usize) -> Result<bool> {
        Ok(self.first_difference(other, cap)?.is_none())
    }

    /// Smallest set (in mask order) on which membership differs.
    pub fn first_difference(&self, other: &Fractoconvexity, cap: usize) -> Result<Option<ElemSet>> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let count = self.space.subset_count(cap)?;
        Ok((0..count)
            .into_par_iter()
            .map(ElemSet::from_mask)
            .find_first(|a| self.member_of(a) != other.member_of(a)))
    }

    /// Per-`B` equivalence: for every `A` and every small `B ⊆ A`, both
    /// serve `B` or neither does. Returns the first disagreeing `(A, B)`.
    pub fn per_b_difference(
        &self,
        other: &Fractoconvexity,
        cap: usize,
    ) -> Result<Option<(ElemSet, ElemSet)>> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let count = self.space.subset_count(cap)?;
        Ok((0..count).into_par_iter().find_map_first(|m| {
            let a = ElemSet::from_mask(m);
            let mut found = None;
            let _ = self.space.for_each_small_subset(&a, |b, r| {
                if self.served_rank(r, &a) != other.served_rank(r, &a) {
                    found = Some((a, b));
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            found
        }))
    }

    pub fn per_b_equivalent(&self, other: &Fractoconvexity, cap: usize) -> Result<bool> {
        Ok(self.per_b_difference(other, cap)?.is_none())
    }

    /// Pairs of distinct ids within one block whose convexities have the same
    /// family. Only checked when the space is enumerable under `cap`.
    pub fn duplicate_families(&self, cap: usize) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for blk in &self.blocks {
            let fams = blk
                .members
                .iter()
                .map(|c| c.enumerate_convex(cap))
                .collect::<Result<Vec<_>>>()?;
            for i in 0..fams.len() {
                for j in i + 1..fams.len() {
                    if fams[i] == fams[j] {
                        let pair = (blk.members[i].id().to_string(), blk.members[j].id().to_string());
                        if !out.contains(&pair) {
                            out.push(pair);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Renders with `∨` instead of `v`.
    pub fn to_unicode(&self) -> String {
        self.to_string().replace(" v ", " ∨ ")
    }
}

impl fmt::Display for Fractoconvexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" v ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Multiconvexity membership: the union of all hulls of each small `B ⊆ a`
/// lies in `a`.
pub fn is_multiconvex(convs: &[Arc<Convexity>], a: &ElemSet) -> Result<bool> {
    Fractoconvexity::multiconvexity(convs)?.member(a)
}

fn weakest(a: Exactness, b: Exactness) -> Exactness {
    if a == Exactness::PerB && b == Exactness::PerB {
        Exactness::PerB
    } else {
        Exactness::ExtensionalOnly
    }
}

/// Member lists of the full blocks obtained by expanding each block into
/// all threshold-sized subsets of its members.
fn full_member_sets(blocks: &[Block]) -> Vec<Vec<Arc<Convexity>>> {
    let mut out = Vec::new();
    for blk in blocks {
        let mut pick = Vec::with_capacity(blk.threshold);
        combinations(&blk.members, blk.threshold, 0, &mut pick, &mut out);
    }
    out
}

fn combinations(
    items: &[Arc<Convexity>],
    k: usize,
    start: usize,
    pick: &mut Vec<Arc<Convexity>>,
    out: &mut Vec<Vec<Arc<Convexity>>>,
) {
    if pick.len() == k {
        out.push(pick.clone());
        return;
    }
    for i in start..items.len() {
        if items.len() - i < k - pick.len() {
            break;
        }
        pick.push(items[i].clone());
        combinations(items, k, i + 1, pick, out);
        pick.pop();
    }
}

/// Sorted union of two id-sorted member lists.
fn merge_by_id(a: &[Arc<Convexity>], b: &[Arc<Convexity>]) -> Result<Vec<Arc<Convexity>>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.id().cmp(y.id()),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                if !Arc::ptr_eq(&a[i], &b[j]) && a[i] != b[j] {
                    return Err(Error::DuplicateId(a[i].id().to_string()));
                }
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

fn is_sub_by_id(small: &[Arc<Convexity>], big: &[Arc<Convexity>]) -> bool {
    small.iter().all(|c| big.iter().any(|d| d.id() == c.id()))
}

/// Canonical order (size, then ids) and absorption of supersets.
fn absorb(mut sets: Vec<Vec<Arc<Convexity>>>) -> Vec<Vec<Arc<Convexity>>> {
    sets.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.iter().map(|c| c.id()).cmp(b.iter().map(|c| c.id())))
    });
    let mut kept: Vec<Vec<Arc<Convexity>>> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| is_sub_by_id(k, &s)) {
            kept.push(s);
        }
    }
    kept
}

fn from_full_sets(space: &GroundSpace, sets: Vec<Vec<Arc<Convexity>>>) -> Result<Fractoconvexity> {
    let blocks = sets.into_iter().map(Block::full).collect::<Result<Vec<_>>>()?;
    let out = Fractoconvexity::new(blocks)?;
    debug_assert_eq!(out.space, *space);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_convexity;
    use crate::space::DEFAULT_CAP;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(xs: &[usize]) -> ElemSet {
        xs.iter().copied().collect()
    }

    fn random_convs(rng: &mut ChaCha8Rng, size: usize, arity: usize, k: usize) -> Vec<Arc<Convexity>> {
        let g = GroundSpace::new(size, arity).unwrap();
        (0..k)
            .map(|i| Arc::new(random_convexity(&g, rng, 0.3, format!("G{}", i + 1)).unwrap()))
            .collect()
    }

    /// Direct reading of the membership quantifier: for every small B ⊆ A
    /// there is a block and an Ω ⊆ M with |Ω| = m and every hull inside A.
    fn member_oracle(f: &Fractoconvexity, a: &ElemSet) -> bool {
        let n = f.space().size();
        (0..1u64 << n).map(ElemSet::from_mask).all(|b| {
            if !b.is_subset(a) || b.len() > f.space().arity() {
                return true;
            }
            f.blocks().iter().any(|blk| {
                let members = blk.members();
                (0..1u64 << members.len()).any(|omega| {
                    omega.count_ones() as usize == blk.threshold()
                        && (0..members.len())
                            .filter(|i| omega >> i & 1 == 1)
                            .all(|i| members[i].hull(&b).unwrap().is_subset(a))
                })
            })
        })
    }

    #[test]
    fn single_convexity_reduces_to_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for size in 3..=8 {
            let convs = random_convs(&mut rng, size, 2, 1);
            let f = Fractoconvexity::frac(&convs, 1).unwrap();
            for a in f.space().all_subsets(DEFAULT_CAP).unwrap() {
                assert_eq!(f.member(&a).unwrap(), convs[0].is_convex(&a).unwrap());
            }
        }
    }

    #[test]
    fn full_pair_is_intersection_of_convexities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let convs = random_convs(&mut rng, 6, 2, 2);
            let f = Fractoconvexity::frac(&convs, 2).unwrap();
            let expected = convs[0]
                .enumerate_convex(DEFAULT_CAP)
                .unwrap()
                .intersection(&convs[1].enumerate_convex(DEFAULT_CAP).unwrap());
            assert_eq!(f.enumerate_members(DEFAULT_CAP).unwrap(), expected);
        }
    }

    #[test]
    fn membership_matches_quantifier_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut strictly_semiconvex = 0;
        for _ in 0..20 {
            let convs = random_convs(&mut rng, 6, 2, 3);
            let f = Fractoconvexity::new(vec![
                Block::new(convs[..2].to_vec(), 1).unwrap(),
                Block::new(convs.clone(), 2).unwrap(),
            ])
            .unwrap();
            let semi = Fractoconvexity::frac(&convs[..2], 1).unwrap();
            for a in f.space().all_subsets(DEFAULT_CAP).unwrap() {
                assert_eq!(f.member(&a).unwrap(), member_oracle(&f, &a));
                let in_semi = semi.member(&a).unwrap();
                assert_eq!(in_semi, member_oracle(&semi, &a));
                if in_semi && !convs[0].is_convex(&a).unwrap() && !convs[1].is_convex(&a).unwrap() {
                    strictly_semiconvex += 1;
                }
            }
        }
        assert!(strictly_semiconvex > 0, "no semiconvex set outside both convexities");
    }

    #[test]
    fn multiconvexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let convs = random_convs(&mut rng, 6, 2, 2);
        let full = Fractoconvexity::frac(&convs, 2).unwrap();
        for a in full.space().all_subsets(DEFAULT_CAP).unwrap() {
            assert_eq!(is_multiconvex(&convs[..1], &a).unwrap(), convs[0].is_convex(&a).unwrap());
            assert_eq!(is_multiconvex(&convs, &a).unwrap(), full.member(&a).unwrap());
        }
        let members = full.enumerate_members(DEFAULT_CAP).unwrap();
        assert!(members.contains(&full.space().full()));
        assert_eq!(members.intersection_witness(), None);
    }

    #[test]
    fn block_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let convs = random_convs(&mut rng, 5, 2, 2);
        assert!(matches!(
            Block::new(convs.clone(), 3),
            Err(Error::ThresholdOutOfRange { threshold: 3, members: 2 })
        ));
        assert!(matches!(Block::new(convs.clone(), 0), Err(Error::ThresholdOutOfRange { .. })));
        let dup = vec![convs[0].clone(), convs[0].clone()];
        assert!(matches!(Block::new(dup, 1), Err(Error::DuplicateId(_))));
        assert!(matches!(Block::new(vec![], 1), Err(Error::EmptyList)));
        let other = random_convs(&mut rng, 6, 2, 1);
        assert!(matches!(
            Block::new(vec![convs[0].clone(), other[0].renamed("H").into()], 1),
            Err(Error::SpaceMismatch)
        ));
        assert!(matches!(Fractoconvexity::new(vec![]), Err(Error::EmptyFracto)));
    }

    #[test]
    fn join_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let convs = random_convs(&mut rng, 6, 2, 3);
            let f1 = Fractoconvexity::frac(&convs[..2], 1).unwrap();
            let f2 = Fractoconvexity::frac(&convs[1..], 2).unwrap();
            let f3 = Fractoconvexity::frac(&[convs[0].clone(), convs[2].clone()], 1).unwrap();
            assert!(f1.join(&f1).unwrap().family_equal(&f1, DEFAULT_CAP).unwrap());
            assert_eq!(f1.join(&f1).unwrap().blocks().len(), 1);
            let ab = f1.join(&f2).unwrap();
            let ba = f2.join(&f1).unwrap();
            assert!(ab.per_b_equivalent(&ba, DEFAULT_CAP).unwrap());
            let left = f1.join(&f2).unwrap().join(&f3).unwrap();
            let right = f1.join(&f2.join(&f3).unwrap()).unwrap();
            assert!(left.per_b_equivalent(&right, DEFAULT_CAP).unwrap());
            // k < l over the same prefix
            let k = Fractoconvexity::frac(&convs[..1], 1).unwrap();
            let l = Fractoconvexity::frac(&convs, 3).unwrap();
            assert!(k.join(&l).unwrap().family_equal(&k, DEFAULT_CAP).unwrap());
        }
    }

    #[test]
    fn meet_matches_conjunction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let convs = random_convs(&mut rng, 5, 2, 3);
            let pick = |rng: &mut ChaCha8Rng| {
                let m = rng.gen_range(1..=3);
                let t = rng.gen_range(1..=m);
                Fractoconvexity::frac(&convs[..m], t).unwrap()
            };
            let f1 = pick(&mut rng).join(&pick(&mut rng)).unwrap();
            let f2 = pick(&mut rng);
            let meet = f1.meet(&f2).unwrap();
            assert!(meet.is_normal());
            let a = ElemSet::from_mask(rng.gen_range(0..32));
            assert_eq!(meet.member(&a).unwrap(), f1.member(&a).unwrap() && f2.member(&a).unwrap());
        }
    }

    #[test]
    fn meet_of_singletons_is_intersection_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let convs = random_convs(&mut rng, 6, 2, 2);
        let m = Fractoconvexity::frac(&convs[..1], 1)
            .unwrap()
            .meet(&Fractoconvexity::frac(&convs[1..], 1).unwrap())
            .unwrap();
        let both = Arc::new(intersect_convexities(&[&convs[0], &convs[1]]).unwrap());
        let single = Fractoconvexity::frac(&[both], 1).unwrap();
        assert!(m.family_equal(&single, DEFAULT_CAP).unwrap());
        assert!(m.meet(&m).unwrap().family_equal(&m, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn normalize_expands_thresholds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let convs = random_convs(&mut rng, 6, 2, 3);
        let one = Fractoconvexity::frac(&convs, 1).unwrap().normalize();
        assert_eq!(one.to_string(), "1/{G1} v 1/{G2} v 1/{G3}");
        let two = Fractoconvexity::frac(&convs, 2).unwrap();
        let n2 = two.normalize();
        assert_eq!(n2.to_string(), "2/{G1,G2} v 2/{G1,G3} v 2/{G2,G3}");
        assert!(n2.per_b_equivalent(&two, DEFAULT_CAP).unwrap());
        for a in two.space().all_subsets(DEFAULT_CAP).unwrap() {
            assert_eq!(n2.member(&a).unwrap(), two.member(&a).unwrap());
        }
        let full = Fractoconvexity::frac(&convs, 3).unwrap();
        assert_eq!(full.normalize().to_string(), full.to_string());
        // absorption: 1/{G1} makes 2/{G1,G2} redundant
        let mixed = Fractoconvexity::frac(&convs[..1], 1)
            .unwrap()
            .join(&Fractoconvexity::frac(&convs[..2], 2).unwrap())
            .unwrap();
        assert_eq!(mixed.normalize().to_string(), "1/{G1}");
    }

    #[test]
    fn simplify_single_blocks_keeps_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let convs = random_convs(&mut rng, 6, 2, 2);
            let solo = Fractoconvexity::frac(&convs[..1], 1).unwrap();
            assert_eq!(solo.simplify_prop1().unwrap().to_string(), "1/{G1}");
            let full = Fractoconvexity::frac(&convs, 2).unwrap();
            let simple = full.simplify_prop1().unwrap();
            assert_eq!(simple.to_string(), "1/{G1∩G2}");
            assert_eq!(simple.exactness(), Exactness::ExtensionalOnly);
            assert!(simple.family_equal(&full, DEFAULT_CAP).unwrap());
        }
    }

    #[test]
    fn simplified_members_are_original_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut shrunk = 0;
        for _ in 0..300 {
            let convs = random_convs(&mut rng, 6, 2, 4);
            let blocks = (0..3)
                .map(|_| {
                    let k = rng.gen_range(1..=3);
                    let start = rng.gen_range(0..=4 - k);
                    Block::new(convs[start..start + k].to_vec(), rng.gen_range(1..=k)).unwrap()
                })
                .collect();
            let f = Fractoconvexity::new(blocks).unwrap();
            let simple = f.simplify_prop1().unwrap();
            let (fm, sm) = (
                f.enumerate_members(DEFAULT_CAP).unwrap(),
                simple.enumerate_members(DEFAULT_CAP).unwrap(),
            );
            assert!(sm.is_subfamily(&fm));
            if sm != fm {
                shrunk += 1;
                let a = f.first_difference(&simple, DEFAULT_CAP).unwrap().unwrap();
                assert!(member_oracle(&f, &a) && !member_oracle(&simple, &a));
            }
        }
        assert!(shrunk > 0, "no multi-block instance lost members");
    }

    #[test]
    fn join_is_not_extensional() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..3000 {
            let convs = random_convs(&mut rng, 5, 2, 3);
            let full = Fractoconvexity::frac(&convs[..2], 2).unwrap();
            let simple = full.simplify_prop1().unwrap();
            assert!(full.family_equal(&simple, DEFAULT_CAP).unwrap());
            let other = Fractoconvexity::frac(&convs[2..], 1).unwrap();
            let (j1, j2) = (full.join(&other).unwrap(), simple.join(&other).unwrap());
            if let Some(a) = j1.first_difference(&j2, DEFAULT_CAP).unwrap() {
                assert_ne!(member_oracle(&j1, &a), member_oracle(&j2, &a));
                return;
            }
        }
        panic!("no instance separates the joins");
    }

    #[test]
    fn semiconvex_family_contains_both_convexities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut strict = 0;
        for _ in 0..30 {
            let convs = random_convs(&mut rng, 6, 2, 2);
            let semi = Fractoconvexity::frac(&convs, 1).unwrap().enumerate_members(DEFAULT_CAP).unwrap();
            let union = convs[0]
                .enumerate_convex(DEFAULT_CAP)
                .unwrap()
                .union(&convs[1].enumerate_convex(DEFAULT_CAP).unwrap());
            assert!(union.is_subfamily(&semi));
            if semi.len() > union.len() {
                strict += 1;
            }
        }
        assert!(strict > 0);
    }

    #[test]
    fn served_requires_a_small_subset() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let convs = random_convs(&mut rng, 5, 2, 2);
        let f = Fractoconvexity::frac(&convs, 1).unwrap();
        let a = set(&[0, 1, 2]);
        assert!(f.served(&a, &set(&[0])).unwrap());
        assert!(f.served(&a, &set(&[0, 1, 2])).is_err());
        assert!(f.served(&a, &set(&[3])).is_err());
    }

    #[test]
    fn duplicate_family_diagnostic() {
        let g = GroundSpace::new(5, 2).unwrap();
        let a = Arc::new(Convexity::interval(&g, "A"));
        let b = Arc::new(Convexity::interval(&g, "B"));
        let f = Fractoconvexity::frac(&[a, b], 1).unwrap();
        assert_eq!(f.duplicate_families(DEFAULT_CAP).unwrap(), vec![("A".into(), "B".into())]);
    }
}
