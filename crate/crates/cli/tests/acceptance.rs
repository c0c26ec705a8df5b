//! Acceptance suite: one PASS/FAIL line per criterion, each with its pinned
//! tolerance and time budget. Run with `cargo test -p mper-cli --test acceptance`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mper_core::criterion::{
    theorem1_criterion, torus_corollary, Semantics, Status, TORUS_EXCEPTIONS,
};
use mper_core::fixpoint::{
    certified_fixed_point_count, fixed_point_squares, half_branch_count, is_conservative_interior,
    refine_fixed_point, Certification,
};
use mper_core::toral::{exact_period_count, fixed_point_count, periods_up_to, FixCount};
use mper_core::torus_loops::{basis_loops, signed_intersection_number, PlLoop};
use mper_core::unit_circle::unit_circle_counts;
use mper_core::{
    Error, HomologyMatrix, IntMatrix, Integer, PolynomialMap2D, Rational, RationalPoly,
    RationalPoly2, UnitCircleCount,
};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use common::{
    numeric_circle_counts, random_int_poly, random_interior_map, random_poly2,
    random_self_inversive, random_unimodular, rng,
};

type Check = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mper(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mper"))
        .args(args)
        .output()
        .expect("run mper");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn six_case_table() -> Check {
    let expected = [
        ((0, 0), (2, 0, 0)),
        ((-1, 0), (1, 1, 0)),
        ((-2, 1), (0, 2, 0)),
        ((0, 1), (0, 2, 0)),
        ((-1, 1), (0, 2, 0)),
        ((1, 1), (0, 2, 0)),
    ];
    for ((t, d), (i, o, u)) in expected {
        ensure(TORUS_EXCEPTIONS.contains(&(t, d)), || {
            format!("({t},{d}) missing from the exception set")
        })?;
        let p = RationalPoly::from_ints(&[d, -t, 1]);
        let c = unit_circle_counts(&p).map_err(|e| e.to_string())?;
        ensure(c == UnitCircleCount::new(i, o, u), || {
            format!("({t},{d}): got {c:?}")
        })?;
    }
    let zero = RationalPoly::from_ints(&[0, 0, 1])
        .squarefree_decomposition()
        .map_err(|e| e.to_string())?;
    ensure(
        zero.factors == vec![(RationalPoly::from_ints(&[0, 1]), 2)],
        || "x^2 is not a double root at 0".into(),
    )?;
    Ok("6/6 cases exact".into())
}

fn corollary_consistency() -> Check {
    let (mut violations, mut divergent) = (Vec::new(), 0);
    for t in -10..=10 {
        for d in -10..=10 {
            let v = torus_corollary(t, d);
            if v.status == Status::NotSatisfied && v.theorem1.status == Status::Satisfied {
                violations.push((t, d));
            }
            divergent += v.diverges() as usize;
        }
    }
    ensure(violations.is_empty(), || {
        format!("violations at {violations:?}")
    })?;
    Ok(format!(
        "441 cells, 0 violations, {divergent} one-sided divergences"
    ))
}

fn divergence_scan() -> Check {
    let path = std::env::temp_dir().join(format!("mper-acceptance-{}.csv", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let args = [
        "scan",
        "--t-range",
        "-3:3",
        "--d-range",
        "-3:3",
        "--out",
        p.as_str(),
    ];
    let (code, _) = mper(&args);
    ensure(code == 0, || format!("scan exited {code}"))?;
    let first = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    mper(&args);
    let second = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&path);
    ensure(first == second, || "re-run is not byte-identical".into())?;
    let mut lines = first.lines();
    ensure(
        lines.next() == Some("t,d,corollary,theorem1,n_in,n_on,n_out,oracle_primes,divergence"),
        || "bad header".into(),
    )?;
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    ensure(rows.len() == 49, || format!("{} rows", rows.len()))?;
    let flagged: Vec<&Vec<&str>> = rows.iter().filter(|r| r[8] == "true").collect();
    let names: Vec<String> = flagged
        .iter()
        .map(|r| format!("({},{})", r[0], r[1]))
        .collect();
    ensure(names.contains(&"(1,-2)".to_string()), || {
        format!("(1,-2) not flagged; flagged {names:?}")
    })?;
    for r in &flagged {
        ensure(r[2] == "satisfied" && r[3] == "not_satisfied", || {
            format!("unexpected direction {r:?}")
        })?;
        ensure(r[5].parse::<usize>().unwrap_or(0) >= 1, || {
            format!("flagged row without circle root {r:?}")
        })?;
    }
    Ok(format!("flagged {}, all with n_on >= 1", names.join(" ")))
}

fn cat_census() -> Check {
    let cat = HomologyMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]).map_err(|e| e.to_string())?;
    let mut last = Integer::zero();
    for n in 1..=30u64 {
        let expected = (Integer::from(2) - cat.power(n).trace()).abs();
        let got = fixed_point_count(&cat, n).map_err(|e| e.to_string())?;
        ensure(got == FixCount::Count(expected.clone()), || {
            format!("n = {n}: {got:?} != {expected}")
        })?;
        last = expected;
    }
    let e2 = exact_period_count(&cat, 2).map_err(|e| e.to_string())?;
    let e3 = exact_period_count(&cat, 3).map_err(|e| e.to_string())?;
    ensure(e2 == Integer::from(4) && e3 == Integer::from(15), || {
        format!("exact(2) = {e2}, exact(3) = {e3}")
    })?;
    let (code, json) = mper(&["oracle", "--matrix", "2,1;1,1", "--max-period", "30"]);
    ensure(code == 0 && json.contains(&format!("\"{last}\"")), || {
        "CLI oracle disagrees".into()
    })?;
    Ok(format!(
        "n <= 30 exact, Fix(30) = {last}, exact(2) = 4, exact(3) = 15"
    ))
}

fn realized_primes() -> Check {
    let mut r = rng(505);
    let (mut tested, mut failures) = (0, Vec::new());
    while tested < 200 {
        let e: Vec<i64> = (0..4).map(|_| r.gen_range(-5..=5)).collect();
        let m = HomologyMatrix::from_i64_rows(&[&e[..2], &e[2..]]).map_err(|e| e.to_string())?;
        if theorem1_criterion(&m, Semantics::Spectral).status != Status::Satisfied {
            continue;
        }
        tested += 1;
        let report = periods_up_to(&m, 31).map_err(|e| e.to_string())?;
        let missing: Vec<u64> = [5, 7, 11, 13, 17, 19, 23, 29, 31]
            .into_iter()
            .filter(|p| !report.realized_periods.contains(p))
            .collect();
        if !missing.is_empty() {
            failures.push(format!("{m}: missing {missing:?}"));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok("200 satisfied matrices realize every prime in [5, 31]".into())
}

fn unit_circle_oracle() -> Check {
    let mut r = rng(606);
    let (mut mismatches, mut straddled) = (Vec::new(), 0);
    for _ in 0..1000 {
        let p = random_int_poly(&mut r, 10, 9);
        let c = unit_circle_counts(&p).map_err(|e| e.to_string())?;
        let (i, s, o) = numeric_circle_counts(&p);
        let ok = if s == 0 {
            (c.n_in, c.n_on, c.n_out) == (i, 0, o)
        } else {
            straddled += 1;
            c.n_in >= i && c.n_out >= o && c.n_on <= s && c.total() == i + s + o
        };
        if !ok {
            mismatches.push(format!("{p}: exact {c:?} numeric ({i},{s},{o})"));
        }
    }
    for _ in 0..60 {
        let (p, (i, on, o)) = random_self_inversive(&mut r);
        let c = unit_circle_counts(&p).map_err(|e| e.to_string())?;
        let (ni, ns, no) = numeric_circle_counts(&p);
        if c != UnitCircleCount::new(i, on, o) || (ni, ns, no) != (i, on, o) {
            mismatches.push(format!(
                "{p}: exact {c:?} built ({i},{on},{o}) numeric ({ni},{ns},{no})"
            ));
        }
    }
    ensure(mismatches.is_empty(), || {
        format!("{} mismatches: {}", mismatches.len(), mismatches.join("; "))
    })?;
    Ok(format!("1000 random + 60 self-inversive, 0 mismatches ({straddled} random cases had a disk touching the circle)"))
}

fn jordan_structure() -> Check {
    let mut r = rng(707);
    for _ in 0..100 {
        let target = 2 * r.gen_range(1..=3);
        let mut blocks = Vec::new();
        let mut dim = 0;
        while dim < target {
            let size = r.gen_range(1..=3usize).min(target - dim);
            blocks.push((r.gen_range(-3..=3i64), size));
            dim += size;
        }
        let mats: Vec<IntMatrix> = blocks
            .iter()
            .map(|&(e, s)| {
                let mut m = IntMatrix::zeros(s, s);
                for i in 0..s {
                    m[(i, i)] = Integer::from(e);
                    if i + 1 < s {
                        m[(i, i + 1)] = Integer::from(1);
                    }
                }
                m
            })
            .collect();
        let m = HomologyMatrix::new(IntMatrix::block_diagonal(&mats)).map_err(|e| e.to_string())?;
        let (s, s_inv) = random_unimodular(&mut r, dim, 20);
        let c = m.conjugate(&s, &s_inv);
        let mut roots: Vec<i64> = blocks.iter().filter(|b| b.1 >= 2).map(|b| b.0).collect();
        roots.sort();
        roots.dedup();
        let expected = roots.iter().fold(RationalPoly::from_ints(&[1]), |acc, &e| {
            acc * RationalPoly::from_ints(&[-e, 1])
        });
        let got = c.repeated_block_locus();
        ensure(got == expected, || {
            format!("blocks {blocks:?}: got {got}, expected {expected}")
        })?;
    }
    Ok("100 conjugated Jordan forms, exact locus equality".into())
}

fn contraction_map() -> PolynomialMap2D {
    PolynomialMap2D::new(
        RationalPoly2::new(vec![vec![q(3, 10), q(1, 4)], vec![q(1, 4)]]),
        RationalPoly2::new(vec![vec![q(1, 5)], vec![q(0, 1), q(1, 2)]]),
    )
}

fn refinement() -> Check {
    let map = contraction_map();
    let tol = q(1, 1_000_000_000);
    let squares = fixed_point_squares(&map, &q(1, 16)).map_err(|e| e.to_string())?;
    let names: Vec<String> = squares
        .squares
        .iter()
        .map(|s| format!("{:?}", s.grid_index))
        .collect();
    let (mut x, mut y) = (0.5f64, 0.5f64);
    for _ in 0..200 {
        (x, y) = ((x + y) / 4.0 + 0.3, x * y / 2.0 + 0.2);
    }
    let mut lost = Vec::new();
    for s in &squares.squares {
        match refine_fixed_point(&map, s, &tol) {
            Ok(res) => {
                ensure(res.residual <= tol, || format!("residual {}", res.residual))?;
                let (px, py) = (res.point.0.to_f64().unwrap(), res.point.1.to_f64().unwrap());
                ensure((px - x).abs() <= 1e-8 && (py - y).abs() <= 1e-8, || {
                    format!("({px}, {py}) vs oracle ({x}, {y})")
                })?;
                for w in res.trail.windows(2) {
                    ensure(w[1].level == w[0].level + 1 && w[0].contains(&w[1]), || {
                        "trail does not halve".into()
                    })?;
                }
                return Ok(format!(
                    "squares {}; from {:?}: ({px:.10}, {py:.10}), residual <= 1e-9, |diff| <= 1e-8, {} halvings{}",
                    names.join(" "),
                    s.grid_index,
                    res.trail.len() - 1,
                    if lost.is_empty() { String::new() } else { format!("; lost zero from {}", lost.join(" ")) }
                ));
            }
            Err(Error::RefinementLostZero) => lost.push(format!("{:?}", s.grid_index)),
            Err(e) => return Err(e.to_string()),
        }
    }
    Err(format!("no square refined; squares {}", names.join(" ")))
}

fn parity() -> Check {
    let mut r = rng(909);
    let tol = q(1, 1_000_000);
    let (mut complete, mut incomplete, mut rejected) = (0, 0, 0);
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    let mut even = Vec::new();
    while complete + incomplete < 100 {
        let map = random_interior_map(&mut r);
        if !is_conservative_interior(&map) {
            rejected += 1;
            continue;
        }
        let c = certified_fixed_point_count(&map, &tol).map_err(|e| e.to_string())?;
        match c.status {
            Certification::Complete => {
                complete += 1;
                *hist.entry(c.count).or_default() += 1;
                if c.count % 2 == 0 {
                    even.push(format!("{map:?} -> {}", c.count));
                }
            }
            Certification::Incomplete => incomplete += 1,
        }
    }
    ensure(even.is_empty(), || {
        format!("even complete counts: {}", even.join("; "))
    })?;
    ensure(incomplete < 20, || format!("incomplete rate {incomplete}%"))?;
    Ok(format!(
        "{complete} complete, all odd (counts {hist:?}); incomplete {incomplete}% (< 20%); {rejected} draws failed the interior check"
    ))
}

fn half_branches() -> Check {
    let origin = (q(0, 1), q(0, 1));
    let r = q(1, 10);
    let run = |c: &RationalPoly2| half_branch_count(c, &origin, &r).map_err(|e| e.to_string());
    let nodal = RationalPoly2::new(vec![
        vec![q(0, 1), q(0, 1), q(1, 1)],
        vec![],
        vec![q(-1, 1)],
        vec![q(-1, 1)],
    ]);
    let lines = RationalPoly2::new(vec![
        vec![q(0, 1), q(0, 1), q(1, 1)],
        vec![],
        vec![q(-1, 1)],
    ]);
    let smooth = RationalPoly2::new(vec![vec![q(0, 1), q(1, 1)], vec![q(-1, 1)]]);
    let (a, b, c) = (run(&nodal)?, run(&lines)?, run(&smooth)?);
    ensure((a, b, c) == (4, 4, 2), || {
        format!("nodal {a}, lines {b}, nonsingular {c}")
    })?;
    let mut rg = rng(1010);
    let (mut returned, mut retried) = (0, 0);
    let mut odd = Vec::new();
    while returned < 50 {
        let g = random_poly2(&mut rg, 3, 5);
        let (x, y) = (q(rg.gen_range(-8..=8), 8), q(rg.gen_range(-8..=8), 8));
        let curve = g.sub(&RationalPoly2::constant(g.eval(&x, &y)));
        if curve.is_zero() {
            continue;
        }
        let mut radius = q(1, 10);
        for _ in 0..6 {
            match half_branch_count(&curve, &(x.clone(), y.clone()), &radius) {
                Ok(n) => {
                    returned += 1;
                    if n % 2 == 1 {
                        odd.push(format!("{curve:?} at ({x}, {y})"));
                    }
                    break;
                }
                Err(Error::RadiusNotGeneric) => {
                    retried += 1;
                    radius /= q(3, 1);
                }
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    ensure(odd.is_empty(), || format!("odd counts: {}", odd.join("; ")))?;
    Ok(format!(
        "nodal 4, lines 4, nonsingular 2; 50 random probes even ({retried} radius retries)"
    ))
}

fn intersections() -> Check {
    let (a, b) = basis_loops();
    let ab = signed_intersection_number(&a, &b).map_err(|e| e.to_string())?;
    let ba = signed_intersection_number(&b, &a).map_err(|e| e.to_string())?;
    ensure(ab == 1 && ba == -1, || {
        format!("<a,b> = {ab}, <b,a> = {ba}")
    })?;
    for (dx, dy) in [
        (q(1, 7), q(2, 9)),
        (q(-3, 11), q(5, 13)),
        (q(1, 2), q(1, 5)),
    ] {
        let moved = b.translated(&dx, &dy).map_err(|e| e.to_string())?;
        let k = signed_intersection_number(&a, &moved).map_err(|e| e.to_string())?;
        ensure(k == 1, || format!("translate by ({dx}, {dy}) gives {k}"))?;
    }
    let classes: Vec<(i64, i64)> = (-3..=3)
        .flat_map(|m| (-3..=3).map(move |n| (m, n)))
        .filter(|&c| c != (0, 0))
        .collect();
    let build = |base: (Rational, Rational)| -> Result<Vec<PlLoop>, String> {
        classes
            .iter()
            .map(|&(m, n)| PlLoop::straight(m, n, base.clone()).map_err(|e| e.to_string()))
            .collect()
    };
    let (left, right) = (build((q(1, 101), q(3, 103)))?, build((q(5, 97), q(7, 89)))?);
    let mut pairs = 0;
    for (s, &(m, n)) in left.iter().zip(&classes) {
        for (t, &(p, r)) in right.iter().zip(&classes) {
            let k = signed_intersection_number(s, t)
                .map_err(|e| format!("({m},{n})x({p},{r}): {e}"))?;
            ensure(k == m * r - n * p, || {
                format!("<({m},{n}),({p},{r})> = {k}")
            })?;
            pairs += 1;
        }
    }
    let (code, json) = mper(&[
        "intersect",
        "--loops",
        r#"{"loops": [{"name": "a", "vertices": [["0","1/3"],["1/2","1/3"]]}, {"name": "b", "vertices": [["1/3","0"],["1/3","1/2"]]}]}"#,
    ]);
    ensure(
        code == 0 && json.trim() == r#"{"names":["a","b"],"matrix":[[null,1],[-1,null]]}"#,
        || format!("CLI intersect: {json}"),
    )?;
    Ok(format!(
        "<a,b> = 1, antisymmetric, translation invariant, {pairs} winding pairs match m q - n p"
    ))
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, u64, fn() -> Check);
    let criteria: [Criterion; 11] = [
        (1, "corollary six-case table", 1, six_case_table),
        (
            2,
            "corollary/theorem consistency on [-10,10]^2",
            5,
            corollary_consistency,
        ),
        (3, "divergence scan on [-3,3]^2", 1, divergence_scan),
        (4, "cat-map census", 1, cat_census),
        (
            5,
            "criterion implies realized primes 5..31",
            30,
            realized_primes,
        ),
        (
            6,
            "unit-circle counts vs numerical isolation",
            60,
            unit_circle_oracle,
        ),
        (
            7,
            "repeated-block locus of Jordan conjugates",
            10,
            jordan_structure,
        ),
        (
            8,
            "fixed-point refinement of the contraction",
            5,
            refinement,
        ),
        (9, "odd fixed-point parity", 120, parity),
        (10, "half-branch parity", 10, half_branches),
        (11, "torus intersection identities", 1, intersections),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (tag, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over time budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "[{tag}] {id:>2}. {name} ({:.2}s, budget {budget}s): {detail}",
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
