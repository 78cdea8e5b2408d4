use std::path::Path;

use fractoconvex::expr::FractoExpr;
use fractoconvex::independence::{independence_domain, is_conically_independent};
use fractoconvex::random::random_permutation;
use fractoconvex::spacefile::SpaceFile;
use fractoconvex::sphere::{fibonacci_sphere, SphereModel, Vec3};
use fractoconvex::suites::{audit_axioms, run_suite, SuiteOptions};
use fractoconvex::zline::{build_zline, identity_perm, reversal_perm};
use fractoconvex::{parse_expr, ConvexSpace, Convexity, ElemSet, Error, Fractoconvexity, Report, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{Command, Gen, Global, Output};

/// Centers used by `gen sphere` when none are given.
const DEFAULT_CENTERS: [Vec3; 2] = [[-0.5, 0.0, 0.3], [0.5, 0.0, 0.3]];

pub fn run(command: Command, g: &Global) -> Result<Output> {
    let report = match command {
        Command::Validate(s) => validate(&s.space, g)?,
        Command::Hull { space, conv, set } => {
            let space = load(&space.space)?;
            let a = parse_set(&set.set, &space)?;
            let h = space.get(&conv)?.hull(&a)?;
            let mut r = Report::info("hull");
            r.set_value("convexity", &conv);
            r.set_value("set", a);
            r.set_value("hull", h);
            r.set_value("convex", h == a);
            r
        }
        Command::Member { space, expr, set } => {
            let space = load(&space.space)?;
            let (text, f) = eval(&space, &expr.expr, g)?;
            let a = parse_set(&set.set, &space)?;
            let mut r = Report::info("member");
            r.set_value("expr", text);
            r.set_value("set", a);
            r.set_value("member", f.member(&a)?);
            r
        }
        Command::Enumerate { space, expr } => {
            let space = load(&space.space)?;
            let (text, f) = eval(&space, &expr.expr, g)?;
            let members = f.enumerate_members(g.cap)?;
            let mut r = Report::info("enumerate");
            r.set_count("members", members.len() as u64);
            r.set_value("expr", text);
            r.set_value("members", members.members());
            r
        }
        Command::Eq { space, e1, e2 } => {
            let space = load(&space.space)?;
            let (t1, f1) = eval(&space, &e1, g)?;
            let (t2, f2) = eval(&space, &e2, g)?;
            let mut r = Report::new("eq");
            r.set_value("e1", t1);
            r.set_value("e2", t2);
            r.set_value("per_b_equivalent", f1.per_b_equivalent(&f2, g.cap)?);
            if let Some(a) = f1.first_difference(&f2, g.cap)? {
                r.fail(json!({ "set": a, "in_e1": f1.member(&a)?, "in_e2": f2.member(&a)? }));
            }
            r
        }
        Command::Normalize { space, expr } => {
            let space = load(&space.space)?;
            let (text, f) = eval(&space, &expr.expr, g)?;
            let normal = f.normalize();
            let mut r = Report::info("normalize");
            r.set_count("blocks", normal.blocks().len() as u64);
            r.set_value("expr", text);
            r.set_value("normal_form", render(&normal, g));
            r
        }
        Command::Independence { space, conv } => {
            let space = load(&space.space)?;
            let convs = match conv {
                Some(ids) => space.resolve(&split_ids(&ids))?,
                None => space.convexities().to_vec(),
            };
            let refs: Vec<&Convexity> = convs.iter().map(|c| c.as_ref()).collect();
            let mut r = independence_domain(&refs, g.cap)?.to_report();
            r.set_value("convexities", convs.iter().map(|c| c.id()).collect::<Vec<_>>());
            r
        }
        Command::Conical { space, conv } => {
            let space = load(&space.space)?;
            let ids = split_ids(&conv);
            if ids.len() != 2 {
                return Err(Error::InvalidSpace(format!("--conv needs two ids, got {}", ids.len())));
            }
            let (g1, g2) = (space.get(&ids[0])?, space.get(&ids[1])?);
            let scan = is_conically_independent(g1, g2, g.cap)?;
            let mut r = scan.to_report();
            r.set_value("independent", scan.independent());
            r
        }
        Command::PropCheck { prop, space, trials } => {
            let space = space.as_deref().map(load).transpose()?;
            let opts = SuiteOptions { seed: g.seed, trials, cap: g.cap };
            run_suite(prop, space.as_ref(), &opts)?
        }
        Command::Gen(gen) => return generate(gen, g).map(Output::Text),
    };
    Ok(Output::Report(report))
}

fn load(path: &Path) -> Result<ConvexSpace> {
    SpaceFile::read(path)?.build()
}

fn validate(path: &Path, g: &Global) -> Result<Report> {
    let file = SpaceFile::read(path)?;
    let space = file.build()?;
    let mut r = Report::new("validate");
    r.set_count("size", space.ground().size() as u64);
    r.set_count("n", space.ground().arity() as u64);
    r.set_count("convexities", space.convexities().len() as u64);
    r.set_count("axiom_failures", 0);
    let convs: Vec<&Convexity> = space.convexities().iter().map(|c| c.as_ref()).collect();
    audit_axioms(&mut r, &convs, g.cap)?;
    r.set_value("exhaustive", space.ground().check_cap(g.cap).is_ok());
    r.set_value("ids", convs.iter().map(|c| c.id()).collect::<Vec<_>>());
    Ok(r)
}

fn eval(space: &ConvexSpace, text: &str, g: &Global) -> Result<(String, Fractoconvexity)> {
    let expr: FractoExpr = parse_expr(text)?;
    let rendered = if g.unicode { expr.to_unicode() } else { expr.to_string() };
    Ok((rendered, space.eval(&expr)?))
}

fn render(f: &Fractoconvexity, g: &Global) -> String {
    if g.unicode {
        f.to_unicode()
    } else {
        f.to_string()
    }
}

fn split_ids(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn parse_set(text: &str, space: &ConvexSpace) -> Result<ElemSet> {
    let mut set = ElemSet::EMPTY;
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let x: usize = part
            .parse()
            .map_err(|_| Error::InvalidSpace(format!("`{part}` is not an element id")))?;
        if x >= space.ground().size() {
            return Err(Error::OutOfRange { element: x, size: space.ground().size() });
        }
        set.insert(x);
    }
    Ok(set)
}

fn generate(gen: Gen, g: &Global) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let file = match gen {
        Gen::Zline { size, perm } => {
            let perm = match perm.as_str() {
                "identity" => identity_perm(size),
                "reversal" => reversal_perm(size),
                "random" => random_permutation(size, &mut rng),
                list => list
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::NotAPermutation(size))?,
            };
            SpaceFile::zline(&build_zline(size, &perm)?)
        }
        Gen::Sphere { points, centers, tol } => {
            let centers = match centers {
                Some(text) => parse_centers(&text)?,
                None => DEFAULT_CENTERS.to_vec(),
            };
            let pts = rotate(fibonacci_sphere(points), &mut rng, g.seed != 0);
            SpaceFile::sphere(&SphereModel::new(pts, centers, tol)?)
        }
    };
    Ok(file.to_json())
}

fn parse_centers(text: &str) -> Result<Vec<Vec3>> {
    text.split(';')
        .map(|c| {
            let xs: Vec<f64> = c
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidGeometry(format!("bad center `{c}`")))?;
            <[f64; 3]>::try_from(xs).map_err(|_| Error::InvalidGeometry(format!("center `{c}` needs 3 coordinates")))
        })
        .collect()
}

/// Applies a uniformly random rotation (unit quaternion) when `enabled`.
fn rotate(points: Vec<Vec3>, rng: &mut ChaCha8Rng, enabled: bool) -> Vec<Vec3> {
    if !enabled {
        return points;
    }
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (a * (tau * u2).sin(), a * (tau * u2).cos(), b * (tau * u3).sin(), b * (tau * u3).cos());
    let m = [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ];
    points
        .into_iter()
        .map(|p| {
            let q = m.map(|row| row[0] * p[0] + row[1] * p[1] + row[2] * p[2]);
            let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
            q.map(|v| v / n)
        })
        .collect()
}
