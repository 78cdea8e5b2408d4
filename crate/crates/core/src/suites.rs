//! Property suites behind `prop-check`.
//!
//! Each suite runs either on a given [`ConvexSpace`] or on a seeded batch of
//! random spaces. Random trials are independent ChaCha streams of one seed,
//! so results do not depend on the thread count.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::convexity::{intersect_convexities, Convexity};
use crate::error::{Error, Result};
use crate::fracto::Fractoconvexity;
use crate::independence::{is_conically_independent, verify_lemma1, verify_prop3};
use crate::random::{random_fracto, random_permutation, random_space};
use crate::registry::ConvexSpace;
use crate::report::{Report, Status};
use crate::space::SetFamily;
use crate::zline::{build_zline, check_pair_identity, check_prop4};

/// Random operands drawn per space in the algebra suites.
pub const SAMPLES_PER_SPACE: usize = 5;

/// Samples for the axiom audit of convexities too large to enumerate.
const AXIOM_SAMPLES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prop {
    One,
    Two,
    Three,
    Four,
    Abs,
    Iii,
    Lattice,
}

impl Prop {
    pub const ALL: [Prop; 7] = [Prop::One, Prop::Two, Prop::Three, Prop::Four, Prop::Abs, Prop::Iii, Prop::Lattice];

    pub fn token(self) -> &'static str {
        match self {
            Prop::One => "1",
            Prop::Two => "2",
            Prop::Three => "3",
            Prop::Four => "4",
            Prop::Abs => "abs",
            Prop::Iii => "iii",
            Prop::Lattice => "lattice",
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Prop {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Prop::ALL
            .into_iter()
            .find(|p| p.token() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected one of 1, 2, 3, 4, abs, iii, lattice)"))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Number of random spaces (ignored when a space is given).
    pub trials: usize,
    pub cap: usize,
}

/// Runs one suite. With `space`, the registered convexities are used;
/// otherwise `opts.trials` random spaces are drawn from `opts.seed`.
pub fn run_suite(prop: Prop, space: Option<&ConvexSpace>, opts: &SuiteOptions) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = match space {
        Some(space) => on_space(prop, space, &mut rng, opts.cap)?,
        None => {
            let parts = (0..opts.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                    rng.set_stream(t as u64);
                    random_trial(prop, &mut rng, opts.cap)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut total = Report::new(prop_name(prop));
            total.set_count("trials", opts.trials as u64);
            for (t, part) in parts.iter().enumerate() {
                merge(&mut total, part, t);
            }
            if parts.iter().all(|p| p.status == Status::Info) && !parts.is_empty() {
                total.status = Status::Info;
            }
            total
        }
    };
    report.name = prop_name(prop);
    report.seed = Some(opts.seed);
    Ok(report)
}

fn prop_name(prop: Prop) -> String {
    format!("prop-{prop}")
}

fn on_space(prop: Prop, space: &ConvexSpace, rng: &mut ChaCha8Rng, cap: usize) -> Result<Report> {
    match prop {
        Prop::One => prop1_on(space, cap),
        Prop::Two => prop2_on(space, SAMPLES_PER_SPACE, rng, cap),
        Prop::Three => prop3_on(space, cap),
        Prop::Four => prop4_on(space, cap),
        Prop::Abs => abs_on(space, SAMPLES_PER_SPACE, rng, cap),
        Prop::Iii => iii_on(space, SAMPLES_PER_SPACE, rng, cap),
        Prop::Lattice => lattice_on(space, SAMPLES_PER_SPACE, rng, cap),
    }
}

fn random_trial(prop: Prop, rng: &mut ChaCha8Rng, cap: usize) -> Result<Report> {
    match prop {
        Prop::One => {
            let (size, arity, k) = (rng.gen_range(4..=8), rng.gen_range(2..=3), rng.gen_range(2..=3));
            prop1_on(&random_space(size, arity, k, 0.3, rng)?, cap)
        }
        Prop::Three => prop3_on(&random_independence_candidate(rng)?, cap),
        Prop::Four => {
            let size = rng.gen_range(6..=12);
            let model = build_zline(size, &random_permutation(size, rng))?;
            check_prop4(&model, cap)
        }
        _ => {
            let (size, arity) = (rng.gen_range(4..=7), rng.gen_range(2..=3));
            let space = random_space(size, arity, 3, 0.3, rng)?;
            on_space(prop, &space, rng, cap)
        }
    }
}

/// A pair `G1, G2` of ternary convexities on 5 to 7 points, either native
/// or binary lifted to arity 3. Sparse generators make conical
/// independence likely.
pub fn random_independence_candidate<R: Rng>(rng: &mut R) -> Result<ConvexSpace> {
    let size = rng.gen_range(5..=7);
    if rng.gen_bool(0.5) {
        let binary = random_space(size, 2, 2, 0.15, rng)?;
        lift_to_arity(&binary, 3)
    } else {
        random_space(size, 3, 2, 0.05, rng)
    }
}

/// The same convexities re-registered on a space of higher arity.
pub fn lift_to_arity(space: &ConvexSpace, arity: usize) -> Result<ConvexSpace> {
    let mut out = ConvexSpace::new(space.ground().with_arity(arity)?);
    for g in space.convexities() {
        out.insert(g.with_arity(arity)?)?;
    }
    Ok(out)
}

/// Adds counts, tags witnesses with the trial index, propagates failure.
fn merge(total: &mut Report, part: &Report, trial: usize) {
    for (k, v) in part.counts.iter().filter(|(k, _)| k.as_str() != "window") {
        total.add_count(k, *v);
    }
    for w in &part.witnesses {
        total.witness(json!({ "trial": trial, "witness": w }));
    }
    if part.status == Status::Fail {
        total.status = Status::Fail;
    }
}

fn start(name: &str) -> Report {
    let mut r = Report::new(name);
    for key in ["checks", "violations", "axioms_checked", "axiom_failures"] {
        r.set_count(key, 0);
    }
    r
}

/// Extensional comparison, recorded under `law`.
fn compare(report: &mut Report, law: &str, lhs: &Fractoconvexity, rhs: &Fractoconvexity, cap: usize) -> Result<()> {
    report.add_count("checks", 1);
    if let Some(a) = lhs.first_difference(rhs, cap)? {
        report.add_count("violations", 1);
        report.fail(json!({ "law": law, "lhs": lhs.to_string(), "rhs": rhs.to_string(), "set": a }));
    }
    Ok(())
}

/// Per-`B` comparison, recorded under `law`.
fn compare_per_b(report: &mut Report, law: &str, lhs: &Fractoconvexity, rhs: &Fractoconvexity, cap: usize) -> Result<()> {
    report.add_count("per_b_checks", 1);
    if let Some((a, b)) = lhs.per_b_difference(rhs, cap)? {
        report.add_count("violations", 1);
        report.fail(json!({ "law": law, "lhs": lhs.to_string(), "rhs": rhs.to_string(), "set": a, "small_set": b }));
    }
    Ok(())
}

/// Axiom check of every convexity a suite builds or uses; exhaustive when
/// the space fits under `cap`, sampled otherwise.
pub fn audit_axioms(report: &mut Report, convs: &[&Convexity], cap: usize) -> Result<()> {
    for (i, g) in convs.iter().enumerate() {
        let axioms = if g.space().check_cap(cap).is_ok() {
            g.check_axioms(cap)?
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            g.check_axioms_sampled(AXIOM_SAMPLES, &mut rng)
        };
        report.add_count("axioms_checked", 1);
        if !axioms.all_pass() {
            report.add_count("axiom_failures", 1);
            report.fail(json!({ "axioms": g.id(), "report": axioms }));
        }
    }
    Ok(())
}

fn registered(space: &ConvexSpace) -> Vec<&Convexity> {
    space.convexities().iter().map(|g| g.as_ref()).collect()
}

/// Index subsets of `0..m` with sizes in `sizes`, in lexicographic order.
fn index_subsets(m: usize, sizes: std::ops::RangeInclusive<usize>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in sizes {
        let mut pick: Vec<usize> = (0..k).collect();
        if k > m {
            break;
        }
        loop {
            out.push(pick.clone());
            let Some(i) = (0..k).rev().find(|&i| pick[i] < m - k + i) else { break };
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    out
}

fn pick(space: &ConvexSpace, idx: &[usize]) -> Vec<Arc<Convexity>> {
    idx.iter().map(|&i| space.convexities()[i].clone()).collect()
}

fn join_all(parts: Vec<Fractoconvexity>) -> Result<Fractoconvexity> {
    let mut it = parts.into_iter();
    let first = it.next().ok_or(Error::EmptyFracto)?;
    it.try_fold(first, |acc, f| acc.join(&f))
}

fn meet_all(parts: Vec<Fractoconvexity>) -> Result<Fractoconvexity> {
    let mut it = parts.into_iter();
    let first = it.next().ok_or(Error::EmptyFracto)?;
    it.try_fold(first, |acc, f| acc.meet(&f))
}

/// For every 2 or 3 registered convexities: the full block, the single
/// intersection convexity, the meet of single blocks and the intersection
/// of the convex families all have the same members.
pub fn prop1_on(space: &ConvexSpace, cap: usize) -> Result<Report> {
    let mut report = start("prop-1");
    audit_axioms(&mut report, &registered(space), cap)?;
    for idx in index_subsets(space.convexities().len(), 2..=3) {
        let convs = pick(space, &idx);
        let refs: Vec<&Convexity> = convs.iter().map(|g| g.as_ref()).collect();
        let inter = Arc::new(intersect_convexities(&refs)?);
        audit_axioms(&mut report, &[inter.as_ref()], cap)?;
        let full = Fractoconvexity::multiconvexity(&convs)?;
        let single = Fractoconvexity::frac(std::slice::from_ref(&inter), 1)?;
        let meet = meet_all(convs.iter().map(|g| Fractoconvexity::frac(std::slice::from_ref(g), 1)).collect::<Result<_>>()?)?;
        compare(&mut report, "full block = 1/{intersection}", &full, &single, cap)?;
        compare(&mut report, "full block = meet of single blocks", &full, &meet, cap)?;
        compare(&mut report, "full block = simplified", &full, &full.simplify_prop1()?, cap)?;

        report.add_count("checks", 1);
        let families = convs
            .iter()
            .map(|g| g.enumerate_convex(cap))
            .collect::<Result<Vec<SetFamily>>>()?;
        let common = families[1..].iter().fold(families[0].clone(), |acc, f| acc.intersection(f));
        if full.enumerate_members(cap)? != common {
            report.add_count("violations", 1);
            report.fail(json!({ "law": "members = common convex sets", "block": full.to_string() }));
        }
    }
    Ok(report)
}

/// Both distributive laws on random triples.
pub fn prop2_on<R: Rng>(space: &ConvexSpace, triples: usize, rng: &mut R, cap: usize) -> Result<Report> {
    let mut report = start("prop-2");
    audit_axioms(&mut report, &registered(space), cap)?;
    for _ in 0..triples {
        let (f1, f2, f3) = random_triple(space, rng)?;
        report.add_count("triples", 1);
        distributive(&mut report, &f1, &f2, &f3, cap)?;
    }
    Ok(report)
}

fn random_triple<R: Rng>(space: &ConvexSpace, rng: &mut R) -> Result<(Fractoconvexity, Fractoconvexity, Fractoconvexity)> {
    Ok((random_fracto(space, 2, rng)?, random_fracto(space, 2, rng)?, random_fracto(space, 2, rng)?))
}

fn distributive(
    report: &mut Report,
    f1: &Fractoconvexity,
    f2: &Fractoconvexity,
    f3: &Fractoconvexity,
    cap: usize,
) -> Result<()> {
    let lhs = f1.join(f2)?.meet(f3)?;
    let rhs = f1.meet(f3)?.join(&f2.meet(f3)?)?;
    compare(report, "(F1 v F2) ^ F3 = (F1 ^ F3) v (F2 ^ F3)", &lhs, &rhs, cap)?;
    let lhs = f1.meet(f2)?.join(f3)?;
    let rhs = f1.join(f3)?.meet(&f2.join(f3)?)?;
    compare(report, "(F1 ^ F2) v F3 = (F1 v F3) ^ (F2 v F3)", &lhs, &rhs, cap)
}

fn absorption(report: &mut Report, f1: &Fractoconvexity, f2: &Fractoconvexity, cap: usize) -> Result<()> {
    compare(report, "(F1 v F2) ^ F1 = F1", &f1.join(f2)?.meet(f1)?, f1, cap)?;
    compare(report, "(F1 ^ F2) v F1 = F1", &f1.meet(f2)?.join(f1)?, f1, cap)
}

/// For every pair of registered convexities (lifted to arity 3 if binary):
/// the conical scan, then the two independence checks when it passes.
pub fn prop3_on(space: &ConvexSpace, cap: usize) -> Result<Report> {
    let arity = space.ground().arity();
    if arity > 3 {
        return Err(Error::ArityMismatch { expected: 3, found: arity });
    }
    let lifted;
    let space = if arity < 3 {
        lifted = lift_to_arity(space, 3)?;
        &lifted
    } else {
        space
    };
    let mut report = start("prop-3");
    report.set_count("pairs", 0);
    report.set_count("conical_independent", 0);
    audit_axioms(&mut report, &registered(space), cap)?;
    for idx in index_subsets(space.convexities().len(), 2..=2) {
        let (g1, g2) = (&space.convexities()[idx[0]], &space.convexities()[idx[1]]);
        report.add_count("pairs", 1);
        let scan = is_conically_independent(g1, g2, cap)?;
        report.add_count("scanned", scan.scanned());
        if !scan.independent() {
            continue;
        }
        report.add_count("conical_independent", 1);
        let lemma = verify_lemma1(&scan, g1, g2, cap)?;
        let prop = verify_prop3(&scan, g1, g2, cap)?;
        report.add_count("checks", 2);
        for r in [&lemma, &prop] {
            report.add_count("violations", r.count("violations"));
            report.absorb(&r.name, r);
        }
    }
    if report.count("conical_independent") == 0 && report.passed() {
        report.status = Status::Info;
    }
    Ok(report)
}

/// The pair identity for the first two registered convexities.
pub fn prop4_on(space: &ConvexSpace, cap: usize) -> Result<Report> {
    let convs = space.convexities();
    if convs.len() < 2 {
        return Err(Error::InvalidSpace("the check needs two convexities".into()));
    }
    let mut report = check_pair_identity(&convs[0], &convs[1], cap)?;
    let mut audit = start("axioms");
    audit_axioms(&mut audit, &[convs[0].as_ref(), convs[1].as_ref()], cap)?;
    for key in ["axioms_checked", "axiom_failures"] {
        report.set_count(key, audit.count(key));
    }
    if !audit.passed() {
        report.fail(json!({ "axioms": audit.witnesses }));
    }
    Ok(report)
}

/// `k/{G1..Gk} v l/{G1..Gl} = k/{G1..Gk}` for all `k < l` over the
/// registered order, then both absorption laws on random pairs.
pub fn abs_on<R: Rng>(space: &ConvexSpace, pairs: usize, rng: &mut R, cap: usize) -> Result<Report> {
    let mut report = start("prop-abs");
    audit_axioms(&mut report, &registered(space), cap)?;
    let convs = space.convexities();
    for l in 2..=convs.len() {
        for k in 1..l {
            let small = Fractoconvexity::frac(&convs[..k], k)?;
            let large = Fractoconvexity::frac(&convs[..l], l)?;
            let joined = small.join(&large)?;
            compare(&mut report, "k-block v l-block = k-block", &joined, &small, cap)?;
            compare_per_b(&mut report, "k-block v l-block = k-block", &joined, &small, cap)?;
        }
    }
    for _ in 0..pairs {
        let (f1, f2) = (random_fracto(space, 2, rng)?, random_fracto(space, 2, rng)?);
        absorption(&mut report, &f1, &f2, cap)?;
    }
    Ok(report)
}

/// Threshold blocks against the join of their sub-blocks, per `B`, for
/// every subset of up to four registered convexities; then normalization
/// of random fractoconvexities.
pub fn iii_on<R: Rng>(space: &ConvexSpace, samples: usize, rng: &mut R, cap: usize) -> Result<Report> {
    let mut report = start("prop-iii");
    audit_axioms(&mut report, &registered(space), cap)?;
    let m = space.convexities().len();
    for idx in index_subsets(m, 1..=4) {
        let convs = pick(space, &idx);
        for k in 1..=convs.len() {
            let block = Fractoconvexity::frac(&convs, k)?;
            let parts = index_subsets(convs.len(), k..=k)
                .into_iter()
                .map(|sub| {
                    let members: Vec<_> = sub.iter().map(|&i| convs[i].clone()).collect();
                    Fractoconvexity::frac(&members, k)
                })
                .collect::<Result<Vec<_>>>()?;
            let expanded = join_all(parts)?;
            compare_per_b(&mut report, "k/{M} = join of k-subsets", &block, &expanded, cap)?;
            compare(&mut report, "k/{M} = join of k-subsets", &block, &expanded, cap)?;
        }
    }
    for _ in 0..samples {
        let f = random_fracto(space, 3, rng)?;
        compare_per_b(&mut report, "normalize", &f, &f.normalize(), cap)?;
    }
    Ok(report)
}

/// Commutativity and associativity of `v` on random triples, both
/// extensionally and per `B`.
pub fn join_laws_on<R: Rng>(space: &ConvexSpace, triples: usize, rng: &mut R, cap: usize) -> Result<Report> {
    let mut report = start("join-laws");
    audit_axioms(&mut report, &registered(space), cap)?;
    for _ in 0..triples {
        let (f1, f2, f3) = random_triple(space, rng)?;
        report.add_count("triples", 1);
        join_laws(&mut report, &f1, &f2, &f3, cap)?;
    }
    Ok(report)
}

fn join_laws(
    report: &mut Report,
    f1: &Fractoconvexity,
    f2: &Fractoconvexity,
    f3: &Fractoconvexity,
    cap: usize,
) -> Result<()> {
    let j12 = f1.join(f2)?;
    let j21 = f2.join(f1)?;
    compare(report, "F1 v F2 = F2 v F1", &j12, &j21, cap)?;
    compare_per_b(report, "F1 v F2 = F2 v F1", &j12, &j21, cap)?;
    let left = j12.join(f3)?;
    let right = f1.join(&f2.join(f3)?)?;
    compare(report, "(F1 v F2) v F3 = F1 v (F2 v F3)", &left, &right, cap)?;
    compare_per_b(report, "(F1 v F2) v F3 = F1 v (F2 v F3)", &left, &right, cap)
}

/// Lattice laws on random triples: commutativity, associativity and
/// idempotence of both operations, absorption and distributivity.
pub fn lattice_on<R: Rng>(space: &ConvexSpace, triples: usize, rng: &mut R, cap: usize) -> Result<Report> {
    let mut report = start("prop-lattice");
    audit_axioms(&mut report, &registered(space), cap)?;
    for _ in 0..triples {
        let (f1, f2, f3) = random_triple(space, rng)?;
        report.add_count("triples", 1);
        join_laws(&mut report, &f1, &f2, &f3, cap)?;
        compare(&mut report, "F1 ^ F2 = F2 ^ F1", &f1.meet(&f2)?, &f2.meet(&f1)?, cap)?;
        let left = f1.meet(&f2)?.meet(&f3)?;
        let right = f1.meet(&f2.meet(&f3)?)?;
        compare(&mut report, "(F1 ^ F2) ^ F3 = F1 ^ (F2 ^ F3)", &left, &right, cap)?;
        compare(&mut report, "F1 v F1 = F1", &f1.join(&f1)?, &f1, cap)?;
        compare(&mut report, "F1 ^ F1 = F1", &f1.meet(&f1)?, &f1, cap)?;
        absorption(&mut report, &f1, &f2, cap)?;
        distributive(&mut report, &f1, &f2, &f3, cap)?;
    }
    Ok(report)
}
