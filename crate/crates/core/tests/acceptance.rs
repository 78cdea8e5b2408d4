//! Acceptance suite: ten criteria, one line each, run in order.
//!
//! Every randomized criterion draws from `ACCEPTANCE_SEED`. Limits are wall
//! clock for the optimized test profile. Equalities are exact except for
//! the sphere criteria, whose segments are computed with the model's
//! geometric tolerance.

use std::time::{Duration, Instant};

use fractoconvex::expr::FractoExpr;
use fractoconvex::independence::verify_prop3;
use fractoconvex::random::{random_expr, random_permutation, random_space};
use fractoconvex::sphere::{build_example1, build_example3, standard_model};
use fractoconvex::suites::{
    abs_on, audit_axioms, iii_on, join_laws_on, prop3_on, random_independence_candidate, run_suite, Prop,
    SuiteOptions, SAMPLES_PER_SPACE,
};
use fractoconvex::zline::{build_zline, check_prop4, identity_perm, reversal_perm, ZLINE_CAP};
use fractoconvex::{
    is_conically_independent, parse_expr, Convexity, ElemSet, Error, Fractoconvexity, Report, DEFAULT_CAP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ACCEPTANCE_SEED: u64 = 20261016;

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED);
    r.set_stream(stream);
    r
}

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    elapsed: Duration,
    limit: Option<Duration>,
    detail: String,
}

impl Outcome {
    fn line(&self) -> String {
        let within = self.limit.is_none_or(|l| self.elapsed <= l);
        let verdict = if self.passed && within { "PASS" } else { "FAIL" };
        let limit = self.limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        format!(
            "criterion {:>2} {verdict} {:<28} {:>8.2}s{limit}  {}",
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }

    fn ok(&self) -> bool {
        self.passed && self.limit.is_none_or(|l| self.elapsed <= l)
    }
}

/// Running totals of the axiom audit across criteria 1 to 7.
#[derive(Default)]
struct Axioms {
    checked: u64,
    failed: u64,
}

impl Axioms {
    fn take(&mut self, r: &Report) {
        self.checked += r.count("axioms_checked");
        self.failed += r.count("axiom_failures");
    }

    fn audit(&mut self, convs: &[&Convexity], cap: usize) {
        let mut r = Report::new("axioms");
        audit_axioms(&mut r, convs, cap).unwrap();
        self.take(&r);
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn criterion_1(ax: &mut Axioms) -> Outcome {
    let opts = SuiteOptions { seed: ACCEPTANCE_SEED, trials: 200, cap: DEFAULT_CAP };
    let (r, elapsed) = timed(|| run_suite(Prop::One, None, &opts).unwrap());
    ax.take(&r);
    Outcome {
        id: 1,
        title: "full block = intersection",
        passed: r.passed() && r.count("checks") > 0 && r.count("violations") == 0,
        elapsed,
        limit: Some(Duration::from_secs(60)),
        detail: format!("spaces=200 checks={} violations={}", r.count("checks"), r.count("violations")),
    }
}

fn criterion_2(ax: &mut Axioms) -> Outcome {
    let (parts, elapsed) = timed(|| {
        let mut rng = rng(2);
        (0..200)
            .map(|_| {
                let (size, arity) = (rng.gen_range(4..=7), rng.gen_range(2..=3));
                let space = random_space(size, arity, 3, 0.3, &mut rng).unwrap();
                [
                    join_laws_on(&space, 1, &mut rng, DEFAULT_CAP).unwrap(),
                    abs_on(&space, 1, &mut rng, DEFAULT_CAP).unwrap(),
                    iii_on(&space, 1, &mut rng, DEFAULT_CAP).unwrap(),
                ]
            })
            .collect::<Vec<_>>()
    });
    let mut checks = 0;
    let mut per_b = 0;
    let mut violations = 0;
    let mut passed = true;
    for r in parts.iter().flatten() {
        ax.take(r);
        checks += r.count("checks");
        per_b += r.count("per_b_checks");
        violations += r.count("violations");
        passed &= r.passed();
    }
    Outcome {
        id: 2,
        title: "join laws, k<l, normal form",
        passed: passed && violations == 0 && checks > 0,
        elapsed,
        limit: Some(Duration::from_secs(30)),
        detail: format!("instances=200 checks={checks} per_b_checks={per_b} violations={violations}"),
    }
}

fn criterion_3(ax: &mut Axioms) -> Outcome {
    let trials = 500 / SAMPLES_PER_SPACE;
    let opts = SuiteOptions { seed: ACCEPTANCE_SEED ^ 3, trials, cap: DEFAULT_CAP };
    let (r, elapsed) = timed(|| run_suite(Prop::Lattice, None, &opts).unwrap());
    ax.take(&r);
    Outcome {
        id: 3,
        title: "distributive + absorption",
        passed: r.passed() && r.count("triples") >= 500 && r.count("violations") == 0,
        elapsed,
        limit: Some(Duration::from_secs(120)),
        detail: format!(
            "triples={} checks={} violations={}",
            r.count("triples"),
            r.count("checks"),
            r.count("violations")
        ),
    }
}

fn criterion_4(ax: &mut Axioms) -> Outcome {
    const WANTED: u64 = 50;
    let ((reports, attempts), elapsed) = timed(|| {
        let mut rng = rng(4);
        let mut reports = Vec::new();
        let mut passing = 0;
        let mut attempts = 0;
        while passing < WANTED && attempts < 5000 {
            attempts += 1;
            let space = random_independence_candidate(&mut rng).unwrap();
            let r = prop3_on(&space, DEFAULT_CAP).unwrap();
            passing += r.count("conical_independent");
            reports.push(r);
        }
        (reports, attempts)
    });
    let mut violations = 0;
    let mut passing = 0;
    let mut checks = 0;
    let mut passed = true;
    for r in &reports {
        ax.take(r);
        violations += r.count("violations");
        passing += r.count("conical_independent");
        checks += r.count("checks");
        passed &= r.passed();
    }
    Outcome {
        id: 4,
        title: "conical independence",
        passed: passed && passing >= WANTED && violations == 0 && checks == 2 * passing,
        elapsed,
        limit: Some(Duration::from_secs(120)),
        detail: format!("pairs={attempts} passing={passing} violations={violations}"),
    }
}

fn criterion_5(ax: &mut Axioms) -> Outcome {
    let limit = Duration::from_secs(60);
    let mut rng = rng(5);
    let mut slowest = Duration::ZERO;
    let mut members = 0;
    let mut nontrivial = 0;
    let mut violations = 0;
    let mut models = 0;
    let mut passed = true;
    let start = Instant::now();
    for size in 6..=14 {
        let mut perms = vec![identity_perm(size), reversal_perm(size)];
        perms.extend((0..50).map(|_| random_permutation(size, &mut rng)));
        let (_, elapsed) = timed(|| {
            for perm in &perms {
                let model = build_zline(size, perm).unwrap();
                let r = check_prop4(&model, ZLINE_CAP).unwrap();
                ax.audit(&[model.g1().as_ref(), model.g2().as_ref()], ZLINE_CAP);
                models += 1;
                members += r.count("members");
                nontrivial += r.count("nontrivial_members");
                violations += r.count("violations");
                passed &= r.passed();
            }
        });
        slowest = slowest.max(elapsed);
    }
    Outcome {
        id: 5,
        title: "pair identity on Z windows",
        passed: passed && violations == 0 && slowest <= limit,
        elapsed: start.elapsed(),
        limit: None,
        detail: format!(
            "sizes=6..14 models={models} members={members} nontrivial={nontrivial} violations={violations} slowest_size={:.2}s (limit {}s)",
            slowest.as_secs_f64(),
            limit.as_secs()
        ),
    }
}

fn criterion_6(ax: &mut Axioms) -> Outcome {
    let (r, elapsed) = timed(|| {
        let (model, _) = standard_model(80).unwrap();
        let convs: Vec<&Convexity> = model.convexities().iter().map(|g| g.as_ref()).collect();
        ax.audit(&convs, DEFAULT_CAP);
        (build_example1(&model, 0, 1, 500, &mut rng(6)), model.tol())
    });
    let (r, tol) = r;
    let (passed, detail) = match r {
        Ok(r) => (
            r.passed() && r.count("regular") >= 500 && r.count("violations") == 0,
            format!(
                "tol={tol:.4} regular={} strictly_semiconvex={} violations={} attempts={}",
                r.count("regular"),
                r.count("regular_strictly_semiconvex"),
                r.count("violations"),
                r.count("attempts")
            ),
        ),
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id: 6, title: "sphere: regular sets", passed, elapsed, limit: Some(Duration::from_secs(120)), detail }
}

fn criterion_7(ax: &mut Axioms) -> Outcome {
    let (r, elapsed) = timed(|| {
        let (model, h) = standard_model(40).unwrap();
        let convs: Vec<&Convexity> = model.convexities().iter().map(|g| g.as_ref()).collect();
        ax.audit(&convs, DEFAULT_CAP);
        (build_example3(&model, 0, 1, &h, 2, DEFAULT_CAP).unwrap(), model.tol())
    });
    let (r, tol) = r;
    Outcome {
        id: 7,
        title: "sphere: midpoint identity",
        passed: r.passed()
            && r.count("identity_failed") == 0
            && r.count("identity_checked") > 0
            && r.count("conical.scanned") > 0
            && r.count("prop3.members") > 0,
        elapsed,
        limit: Some(Duration::from_secs(300)),
        detail: format!(
            "tol={tol:.4} subspace={} identity={}/{} nontrivial={} conical_scanned={} prop3_members={} prop3_violations={}",
            r.count("subspace"),
            r.count("identity_checked") - r.count("identity_failed"),
            r.count("identity_checked"),
            r.count("identity_nontrivial"),
            r.count("conical.scanned"),
            r.count("prop3.members"),
            r.count("prop3.violations")
        ),
    }
}

fn criterion_8(ax: &Axioms, elapsed: Duration) -> Outcome {
    Outcome {
        id: 8,
        title: "axioms of every convexity",
        passed: ax.checked > 0 && ax.failed == 0,
        elapsed,
        limit: None,
        detail: format!("convexities={} failures={}", ax.checked, ax.failed),
    }
}

const ID_POOL: [&str; 8] = ["G1", "G2", "G3", "v", "x_1", "H'", "a.b-c", "_Z9"];

fn criterion_9() -> Outcome {
    let ((mismatches, cases), elapsed) = timed(|| {
        let mut rng = rng(9);
        let mut mismatches = Vec::new();
        let cases = 10_000;
        for _ in 0..cases {
            let depth = rng.gen_range(0..=5);
            let e: FractoExpr = random_expr(&ID_POOL, depth, &mut rng);
            let text = e.to_string();
            match parse_expr(&text) {
                Ok(back) if back == e => {}
                other => mismatches.push((text, format!("{other:?}"))),
            }
        }
        (mismatches, cases)
    });
    let syntax = matches!(parse_expr("1/{G1,G2} v"), Err(Error::Syntax { offset: 11, .. }));
    let arity = matches!(parse_expr("3/{G1,G2}"), Err(Error::ExprArity { offset: 0, threshold: 3, members: 2 }));
    let duplicate = matches!(parse_expr("1/{G1} ^ 2/{G2,G2}"), Err(Error::ExprDuplicateId { .. }));
    Outcome {
        id: 9,
        title: "parser round trip + errors",
        passed: mismatches.is_empty() && syntax && arity && duplicate,
        elapsed,
        limit: None,
        detail: format!(
            "cases={cases} mismatches={} syntax={syntax} arity={arity} duplicate={duplicate}",
            mismatches.len()
        ),
    }
}

/// Direct reading of the two pair conditions: for every small `B ⊆ A`,
/// some (semi) or every (bi) hull of `B` lies in `A`.
fn pair_condition(g: [&Convexity; 2], a: &ElemSet, every: bool) -> bool {
    let n = g[0].space().size();
    let arity = g[0].space().arity();
    (0..1u64 << n).map(ElemSet::from_mask).filter(|b| b.is_subset(a) && b.len() <= arity).all(|b| {
        let fits = g.map(|gi| gi.hull(&b).unwrap().is_subset(a));
        if every {
            fits[0] && fits[1]
        } else {
            fits[0] || fits[1]
        }
    })
}

fn criterion_10() -> Outcome {
    let ((subsets, mismatches), elapsed) = timed(|| {
        let mut rng = rng(10);
        let mut subsets = 0u64;
        let mut mismatches = 0u64;
        for _ in 0..100 {
            let (size, arity) = (rng.gen_range(4..=8), rng.gen_range(2..=3));
            let space = random_space(size, arity, 2, 0.3, &mut rng).unwrap();
            let convs = space.convexities();
            let semi = Fractoconvexity::frac(convs, 1).unwrap();
            let bi = Fractoconvexity::frac(convs, 2).unwrap();
            let pair = [convs[0].as_ref(), convs[1].as_ref()];
            for a in space.ground().all_subsets(DEFAULT_CAP).unwrap() {
                subsets += 1;
                mismatches += u64::from(semi.member(&a).unwrap() != pair_condition(pair, &a, false));
                mismatches += u64::from(bi.member(&a).unwrap() != pair_condition(pair, &a, true));
            }
        }
        (subsets, mismatches)
    });
    Outcome {
        id: 10,
        title: "semi/biconvex encodings",
        passed: mismatches == 0 && subsets > 0,
        elapsed,
        limit: None,
        detail: format!("spaces=100 subsets={subsets} mismatches={mismatches}"),
    }
}

#[test]
fn acceptance() {
    let mut ax = Axioms::default();
    let mut outcomes = Vec::new();
    let mut run = |o: Outcome| {
        println!("{}", o.line());
        outcomes.push(o);
    };
    let audit_start = Instant::now();
    run(criterion_1(&mut ax));
    run(criterion_2(&mut ax));
    run(criterion_3(&mut ax));
    run(criterion_4(&mut ax));
    run(criterion_5(&mut ax));
    run(criterion_6(&mut ax));
    run(criterion_7(&mut ax));
    run(criterion_8(&ax, audit_start.elapsed()));
    run(criterion_9());
    run(criterion_10());
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.ok()).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn scan_of_another_pair_is_rejected() {
    let mut rng = rng(11);
    let space = random_space(5, 3, 2, 0.05, &mut rng).unwrap();
    let other = random_space(5, 3, 2, 0.05, &mut rng).unwrap();
    let (g1, g2) = (&space.convexities()[0], &space.convexities()[1]);
    let scan = is_conically_independent(&other.convexities()[0], &other.convexities()[1], DEFAULT_CAP).unwrap();
    assert!(matches!(verify_prop3(&scan, g1, g2, DEFAULT_CAP), Err(Error::PreconditionNotChecked(_))));
}
