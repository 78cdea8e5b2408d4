//! Seeded random instances for sweeps and property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::convexity::{make_convexity, BaseHull, Convexity};
use crate::error::Result;
use crate::expr::FractoExpr;
use crate::fracto::{Block, Fractoconvexity};
use crate::registry::ConvexSpace;
use crate::space::{ElemSet, GroundSpace};

/// Extensive generator: each small `B` with `|B| >= 2` gains every outside
/// element independently with probability `p`; singletons do so with
/// probability `p / 4`.
pub fn random_generator<R: Rng>(space: &GroundSpace, rng: &mut R, p: f64) -> BaseHull {
    let n = space.size();
    BaseHull::from_fn(space, |b| {
        let q = match b.len() {
            0 => return b,
            1 => p / 4.0,
            _ => p,
        };
        (0..n).filter(|&x| b.contains(x) || rng.gen_bool(q)).collect()
    })
}

pub fn random_convexity<R: Rng>(
    space: &GroundSpace,
    rng: &mut R,
    p: f64,
    id: impl Into<String>,
) -> Result<Convexity> {
    make_convexity(space, random_generator(space, rng, p), id)
}

/// Uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Random subset with each element drawn with probability `p`.
pub fn random_subset<R: Rng>(n: usize, rng: &mut R, p: f64) -> ElemSet {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

/// Ground space with `k` random convexities `G1..Gk`.
pub fn random_space<R: Rng>(size: usize, arity: usize, k: usize, p: f64, rng: &mut R) -> Result<ConvexSpace> {
    let ground = GroundSpace::new(size, arity)?;
    let mut space = ConvexSpace::new(ground.clone());
    for i in 1..=k {
        space.insert(random_convexity(&ground, rng, p, format!("G{i}"))?)?;
    }
    Ok(space)
}

/// Join of `1..=max_blocks` blocks, each over `1..=3` distinct registered
/// convexities with a uniform threshold.
pub fn random_fracto<R: Rng>(space: &ConvexSpace, max_blocks: usize, rng: &mut R) -> Result<Fractoconvexity> {
    let convs = space.convexities();
    let blocks = (0..rng.gen_range(1..=max_blocks.max(1)))
        .map(|_| {
            let k = rng.gen_range(1..=convs.len().min(3));
            let members: Vec<_> = convs.choose_multiple(rng, k).cloned().collect();
            Block::new(members, rng.gen_range(1..=k))
        })
        .collect::<Result<Vec<_>>>()?;
    Fractoconvexity::new(blocks)
}

/// Random expression tree over `ids` with at most `depth` operator levels.
pub fn random_expr<R: Rng, S: AsRef<str>>(ids: &[S], depth: usize, rng: &mut R) -> FractoExpr {
    if depth == 0 || rng.gen_bool(0.35) {
        let k = rng.gen_range(1..=ids.len());
        let picked: Vec<String> = ids.choose_multiple(rng, k).map(|s| s.as_ref().to_string()).collect();
        return FractoExpr::frac(rng.gen_range(1..=k), picked);
    }
    let l = random_expr(ids, depth - 1, rng);
    let r = random_expr(ids, depth - 1, rng);
    if rng.gen_bool(0.5) {
        l.join(r)
    } else {
        l.meet(r)
    }
}
