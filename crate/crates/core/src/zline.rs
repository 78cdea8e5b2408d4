//! Integer window `0..N` with the interval convexity and its transport
//! along a permutation.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::convexity::Convexity;
use crate::error::{Error, Result};
use crate::fracto::Fractoconvexity;
use crate::independence::pair_hull_of;
use crate::report::Report;
use crate::space::{ElemSet, GroundSpace, SetFamily};

/// Default enumeration cap for window sweeps.
pub const ZLINE_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct ZLineModel {
    perm: Vec<usize>,
    g1: Arc<Convexity>,
    g2: Arc<Convexity>,
    f4: Fractoconvexity,
}

impl ZLineModel {
    pub fn window_size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn g1(&self) -> &Arc<Convexity> {
        &self.g1
    }

    pub fn g2(&self) -> &Arc<Convexity> {
        &self.g2
    }

    /// `1/{G1, G2}`.
    pub fn f4(&self) -> &Fractoconvexity {
        &self.f4
    }

    pub fn space(&self) -> &GroundSpace {
        self.g1.space()
    }
}

/// Builds `G1` (intervals) and `G2` (intervals transported by `perm`) as
/// binary convexities on the window `0..window_size`.
pub fn build_zline(window_size: usize, perm: &[usize]) -> Result<ZLineModel> {
    if window_size < 2 {
        return Err(Error::WindowTooSmall(window_size));
    }
    let space = GroundSpace::new(window_size, 2)?;
    let g1 = Arc::new(Convexity::interval(&space, "G1"));
    let g2 = Arc::new(Convexity::permuted_interval(&space, "G2", perm)?);
    let f4 = Fractoconvexity::frac(&[g1.clone(), g2.clone()], 1)?;
    Ok(ZLineModel { perm: perm.to_vec(), g1, g2, f4 })
}

/// Members of `1/{G1, G2}`.
pub fn f4_members(model: &ZLineModel, cap: usize) -> Result<SetFamily> {
    model.f4.enumerate_members(cap)
}

#[derive(Serialize)]
struct Violation {
    set: ElemSet,
    pair_hull: ElemSet,
}

/// Exhaustive check that every member `A` of `1/{G1, G2}` equals
/// `hull1(A) ∩ hull2(A)`. Also counts members convex in neither.
pub fn check_prop4(model: &ZLineModel, cap: usize) -> Result<Report> {
    let mut report = check_pair_identity(&model.g1, &model.g2, cap)?;
    report.set_count("window", model.window_size() as u64);
    report.set_value("perm", &model.perm);
    Ok(report)
}

/// The same check for an arbitrary pair on one space.
pub fn check_pair_identity(g1: &Arc<Convexity>, g2: &Arc<Convexity>, cap: usize) -> Result<Report> {
    let f = Fractoconvexity::frac(&[g1.clone(), g2.clone()], 1)?;
    let count = f.space().subset_count(cap)?;
    let convs = [g1.as_ref(), g2.as_ref()];
    let rows: Vec<(ElemSet, ElemSet, bool)> = (0..count)
        .into_par_iter()
        .map(ElemSet::from_mask)
        .filter(|a| f.member_of(a))
        .map(|a| {
            let neither = !g1.is_convex_of(&a) && !g2.is_convex_of(&a);
            (a, pair_hull_of(&convs, &a), neither)
        })
        .collect();
    let mut report = Report::new("prop4");
    report.set_count("subsets", count);
    report.set_count("members", rows.len() as u64);
    let nontrivial: Vec<ElemSet> = rows.iter().filter(|r| r.2).map(|r| r.0).collect();
    report.set_count("nontrivial_members", nontrivial.len() as u64);
    report.set_value("nontrivial_examples", &nontrivial[..nontrivial.len().min(4)]);
    let mut violations = 0;
    for (a, h, _) in rows.iter().filter(|r| r.0 != r.1) {
        violations += 1;
        report.fail(Violation { set: *a, pair_hull: *h });
    }
    report.set_count("violations", violations);
    Ok(report)
}

pub fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// `x ↦ n - 1 - x`.
pub fn reversal_perm(n: usize) -> Vec<usize> {
    (0..n).rev().collect()
}

/// Even values ascending, then odd values ascending.
pub fn interleaved_perm(n: usize) -> Vec<usize> {
    (0..n).step_by(2).chain((1..n).step_by(2)).collect()
}
