//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! A few criteria are known not to hold for this witness pair; they are
//! reported as FAIL and listed in `KNOWN_UNATTAINABLE` with the reason. The
//! process exits nonzero only on an unexpected failure.
//!
//! `UCW_CERTIFY_SECONDS` caps the branch-and-bound run for `I` (default 60).

mod common;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ucw::behavior::{Behavior, CorrelatorView, DoData};
use ucw::classical::{fixture, ClassicalModel};
use ucw::commands::subspace::{quantum_circle, Region, SubspaceWitnesses};
use ucw::optimizer::objective::tangent;
use ucw::optimizer::relax::mccormick;
use ucw::optimizer::{branch_and_bound_with, local_search, solve_lp, BnbConfig, LpProblem, LpStatus, Row};
use ucw::quantum::{critical_visibility_with, family_behavior, maximize_over_theta, ThetaPolicy};
use ucw::{builtin, QuantumStrategy, Which};

use common::*;

const KNOWN_UNATTAINABLE: [(&str, &str); 4] = [
    ("5-I", "the I root at the reference bound is 0.98342, not 0.98873"),
    ("6-I", "the printed I-optimal weights evaluate to 2.56212"),
    ("6-F", "the printed F-optimal weights evaluate to 2.99985"),
    ("8-I", "classical models reach 2.60311 > the reference bound"),
];

fn bound_i() -> f64 {
    3.0 / 2f64.sqrt() + 7f64.sqrt() / 6.0
}

fn bound_f() -> f64 {
    9.0 / 7.0 + 0.7 * 6f64.sqrt()
}

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: String) -> Line {
    let l = Line { id, pass, detail };
    println!("{} {:<5} {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail);
    l
}

fn random_behavior(rng: &mut impl Rng) -> [f64; 8] {
    let x: [f64; 8] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
    let s: f64 = x.iter().sum();
    x.map(|v| v / s)
}

fn random_do(rng: &mut impl Rng) -> [f64; 8] {
    let mut d = [0.0; 8];
    for k in 0..4 {
        let u: f64 = rng.random();
        d[2 * k] = u;
        d[2 * k + 1] = 1.0 - u;
    }
    d
}

fn do_data(d: &[f64; 8]) -> DoData {
    DoData::new([[d[0], d[1]], [d[2], d[3]]], [[d[4], d[5]], [d[6], d[7]]]).unwrap()
}

fn random_model(rng: &mut impl Rng) -> ([f64; 4], [f64; 4], [f64; 16]) {
    let b0: [f64; 16] = std::array::from_fn(|_| rng.random());
    (random_simplex(rng), random_simplex(rng), b0)
}

fn criterion_1() -> Line {
    let mut gap: f64 = 0.0;
    let mut marginal: f64 = 0.0;
    for k in 0..32 {
        let theta = FRAC_PI_2 * k as f64 / 31.0;
        let born = QuantumStrategy::family(theta, 1.0).unwrap().born_behavior().unwrap();
        let closed = family(theta, 1.0);
        for (x, y) in born.as_array().iter().zip(&closed) {
            gap = gap.max((x - y).abs());
        }
        marginal = marginal.max((born.marginal_b(0) - 0.25).abs());
    }
    line(
        "1",
        gap < 1e-12 && marginal < 1e-12,
        format!("born rule vs closed form: max diff {gap:.1e}, max |P(b=0)-1/4| {marginal:.1e}"),
    )
}

fn criterion_2() -> Line {
    let spec = builtin("I").unwrap();
    let p = QuantumStrategy::family(FRAC_PI_8, 1.0).unwrap().born_behavior().unwrap();
    let v = spec.evaluate(&p, None).unwrap().value;
    let oracle = witness_i(&family(FRAC_PI_8, 1.0));
    let pass = (v - 2.69238).abs() <= 1e-4 && (v - oracle).abs() < 1e-12 && v > bound_i();
    line("2", pass, format!("I at pi/8, v=1: {v:.6} (oracle {oracle:.6}), bound {:.9}", bound_i()))
}

fn criterion_3() -> Line {
    let spec = builtin("F").unwrap();
    let s = QuantumStrategy::family(FRAC_PI_8, 1.0).unwrap();
    let (p, d) = (s.born_behavior().unwrap(), s.born_do_data().unwrap());
    let v = spec.evaluate(&p, Some(&d)).unwrap().value;
    let oracle = witness_f(&family(FRAC_PI_8, 1.0), &d.flat());
    let pass = (v - 3.15432).abs() <= 1e-4 && (v - oracle).abs() < 1e-12 && v > bound_f();
    line("3", pass, format!("F at pi/8, v=1: {v:.6} (oracle {oracle:.6}), bound {:.6}", bound_f()))
}

fn criterion_4() -> Vec<Line> {
    let unbiased = [0.5; 8];
    [
        ("4-I", Which::I, (2.0f64 / 5.0).atan(), 2.69258),
        ("4-F", Which::F, (1.0f64 / 3.0).atan(), 3.16228),
    ]
    .into_iter()
    .map(|(id, which, theta, value)| {
        let opt = maximize_over_theta(which, 1.0);
        let p = family(opt.theta, 1.0);
        let oracle = match which {
            Which::I => witness_i(&p),
            Which::F => witness_f(&p, &unbiased),
        };
        let pass = (opt.theta - theta).abs() <= 1e-4
            && (opt.value - value).abs() <= 1e-4
            && (oracle - opt.value).abs() < 1e-9;
        line(
            id,
            pass,
            format!("argmax {:.6} (expected {theta:.6}), max {:.6} (expected {value})", opt.theta, opt.value),
        )
    })
    .collect()
}

fn criterion_5() -> Vec<Line> {
    [("5-I", Which::I, bound_i(), 0.98873), ("5-F", Which::F, bound_f(), 0.87743)]
        .into_iter()
        .map(|(id, which, bound, expected)| {
            let fixed = critical_visibility_with(which, bound, ThetaPolicy::UnitVisibilityOptimum)
                .unwrap()
                .value();
            let optimized = critical_visibility_with(which, bound, ThetaPolicy::Optimized).unwrap().value();
            let pass = fixed.is_some_and(|v| (v - expected).abs() <= 1e-4);
            line(
                id,
                pass,
                format!(
                    "critical visibility {} at fixed angle, {} re-optimized (expected {expected})",
                    fixed.map_or("none".into(), |v| format!("{v:.6}")),
                    optimized.map_or("none".into(), |v| format!("{v:.6}")),
                ),
            )
        })
        .collect()
}

fn model_parts(m: &ClassicalModel) -> ([f64; 4], [f64; 4], [f64; 16]) {
    (*m.p_gamma(), *m.p_alpha(), *m.p_b0())
}

fn criterion_6() -> Vec<Line> {
    let wi = builtin("I").unwrap();
    let wf = builtin("F").unwrap();
    let mut out = Vec::new();
    for (id, name, expected) in [("6-I", "I-optimal", 2.56226), ("6-F", "F-optimal", 3.00001)] {
        let m = fixture(name).unwrap();
        let (pg, pa, b0) = model_parts(&m);
        let p = classical_behavior(&pg, &pa, &b0);
        let d = classical_do(&pg, &pa);
        let (v, oracle) = if id == "6-I" {
            (wi.evaluate(&m.behavior(), None).unwrap().value, witness_i(&p))
        } else {
            (wf.evaluate(&m.behavior(), Some(&m.do_data())).unwrap().value, witness_f(&p, &d))
        };
        let pass = (v - expected).abs() <= 1e-4 && (v - oracle).abs() < 1e-12;
        out.push(line(id, pass, format!("{name}: {v:.10} (oracle {oracle:.10}, expected {expected})")));
    }
    out
}

fn criterion_7() -> Vec<Line> {
    let mut out = Vec::new();
    for (id, name, floor) in [("7-I", "I", 2.5622), ("7-F", "F", 3.0000)] {
        let spec = builtin(name).unwrap();
        let started = Instant::now();
        let (m, v) = local_search(&spec, 200, 7).unwrap();
        let (pg, pa, b0) = model_parts(&m);
        let p = classical_behavior(&pg, &pa, &b0);
        let oracle = if name == "I" {
            witness_i(&p)
        } else {
            witness_f(&p, &classical_do(&pg, &pa))
        };
        let pass = (v * 1e4).round() / 1e4 >= floor && (v - oracle).abs() < 1e-9;
        out.push(line(
            id,
            pass,
            format!("local search: {v:.12} (oracle {oracle:.12}) >= {floor}, {:.1} s", started.elapsed().as_secs_f64()),
        ));
    }
    out
}

fn criterion_8() -> Vec<Line> {
    let limit: u64 = std::env::var("UCW_CERTIFY_SECONDS").ok().and_then(|s| s.parse().ok()).unwrap_or(60);
    let mut out = Vec::new();
    for (id, name, target, time_limit) in [
        ("8-I", "I", bound_i(), Some(Duration::from_secs(limit))),
        ("8-F", "F", bound_f(), Some(Duration::from_secs(1800))),
    ] {
        let spec = builtin(name).unwrap();
        let cfg = BnbConfig {
            abs_gap: 1e-3,
            time_limit,
            ..BnbConfig::default()
        };
        let cert = branch_and_bound_with(&spec, &cfg).unwrap();
        let (pg, pa, b0) = model_parts(&cert.model);
        let p = classical_behavior(&pg, &pa, &b0);
        let oracle = if name == "I" {
            witness_i(&p)
        } else {
            witness_f(&p, &classical_do(&pg, &pa))
        };
        let bracket = cert.lower <= target && target <= cert.upper;
        let width = !cert.converged || cert.upper - cert.lower <= 1.1e-3;
        let pass = bracket && width && (oracle - cert.lower).abs() < 1e-9;
        out.push(line(
            id,
            pass,
            format!(
                "bracket [{:.6}, {:.6}] vs {target:.6}, {} after {} nodes in {:.0} s",
                cert.lower,
                cert.upper,
                if cert.converged { "converged" } else { "not converged" },
                cert.nodes,
                cert.seconds
            ),
        ));
    }
    out
}

fn criterion_9() -> Vec<Line> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let wi = builtin("I").unwrap();
    let wf = builtin("F").unwrap();
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = Behavior::new(random_behavior(&mut rng)).unwrap();
        let c = p.to_correlators();
        let q = *p.as_array();
        for b in 0..2 {
            let got = [c.p_b(b), c.a(b), c.c(b), c.ac(b)];
            let expected = [corr(&q, 0, 0, b), corr(&q, 1, 0, b), corr(&q, 0, 1, b), corr(&q, 1, 1, b)];
            for (x, y) in got.iter().zip(&expected) {
                worst = worst.max((x - y).abs());
            }
        }
        let back = CorrelatorView::new(c.values).to_behavior().unwrap();
        worst = worst.max(back.max_abs_diff(&p));
    }
    out.push(line("9a", worst <= 1e-14, format!("correlator roundtrip over 1000 behaviors: max error {worst:.1e}")));

    let mut worst: f64 = 0.0;
    let mut status_mismatch = 0;
    for _ in 0..100 {
        let d = random_lp(&mut rng);
        let mut lp = LpProblem::new(d.c.len());
        lp.objective = d.c.clone();
        lp.inequalities = d.a.iter().zip(&d.b).map(|(r, b)| Row::new(r.clone(), *b)).collect();
        lp.equalities = d.e.iter().zip(&d.f).map(|(r, f)| Row::new(r.clone(), *f)).collect();
        lp.bounds = d.lower.iter().copied().zip(d.upper.iter().copied()).collect();
        let sol = solve_lp(&lp).unwrap();
        match (vertex_enumeration(&d), sol.status) {
            (Some(v), LpStatus::Optimal) => worst = worst.max((v - sol.value).abs()),
            (None, LpStatus::Infeasible) => {}
            _ => status_mismatch += 1,
        }
    }
    out.push(line(
        "9b",
        worst <= 1e-8 && status_mismatch == 0,
        format!("LP vs vertex enumeration over 100 instances: max error {worst:.1e}, status mismatches {status_mismatch}"),
    ));

    let mut violations = 0;
    for _ in 0..10_000 {
        let mut iv = || {
            let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
            (x.min(y), x.max(y))
        };
        let (ub, vb) = (iv(), iv());
        let u = ub.0 + rng.random::<f64>() * (ub.1 - ub.0);
        let v = vb.0 + rng.random::<f64>() * (vb.1 - vb.0);
        for (cu, cv, rhs, lower) in mccormick(ub, vb) {
            let lin = cu * u + cv * v - rhs;
            if (lower && u * v < lin - 1e-12) || (!lower && u * v > lin + 1e-12) {
                violations += 1;
            }
        }
        let y0 = rng.random::<f64>().max(1e-6);
        let y = rng.random::<f64>();
        let (slope, intercept) = tangent(y0);
        if y.sqrt() > slope * y + intercept + 1e-12 {
            violations += 1;
        }
    }
    out.push(line("9c", violations == 0, format!("McCormick and tangent sampling: {violations} violations in 10000 draws")));

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (p1, p2) = (random_behavior(&mut rng), random_behavior(&mut rng));
        let (d1, d2) = (random_do(&mut rng), random_do(&mut rng));
        let t: f64 = rng.random();
        let pm: [f64; 8] = std::array::from_fn(|k| t * p1[k] + (1.0 - t) * p2[k]);
        let dm: [f64; 8] = std::array::from_fn(|k| t * d1[k] + (1.0 - t) * d2[k]);
        let eval = |spec: &ucw::FunctionalSpec, p: &[f64; 8], d: &[f64; 8]| {
            spec.evaluate(&Behavior::new(*p).unwrap(), Some(&do_data(d))).unwrap().value
        };
        for spec in [&wi, &wf] {
            let deficit = t * eval(spec, &p1, &d1) + (1.0 - t) * eval(spec, &p2, &d2) - eval(spec, &pm, &dm);
            worst = worst.max(deficit);
        }
    }
    out.push(line("9d", worst <= 1e-12, format!("concavity over 1000 triples: max deficit {worst:.1e}")));

    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let (pg, pa, b0) = random_model(&mut rng);
        let m = ClassicalModel::new(pg, pa, b0).unwrap();
        let d = classical_do(&pg, &pa);
        for b in 0..2 {
            for a in 0..2 {
                for c in 0..2 {
                    let mut joint = 0.0;
                    for (g, gl) in LABELS.iter().enumerate() {
                        for (k, al) in LABELS.iter().enumerate() {
                            let hit = gl.as_bytes()[b] - b'0' == a as u8 && al.as_bytes()[b] - b'0' == c as u8;
                            if hit {
                                joint += pg[g] * pa[k];
                            }
                        }
                    }
                    worst = worst.max((joint - d[2 * b + a] * d[4 + 2 * b + c]).abs());
                }
            }
        }
        for (x, y) in m.do_data().flat().iter().zip(&d) {
            worst = worst.max((x - y).abs());
        }
        for (x, y) in m.behavior().as_array().iter().zip(&classical_behavior(&pg, &pa, &b0)) {
            worst = worst.max((x - y).abs());
        }
    }
    out.push(line("9e", worst <= 1e-14, format!("do-factorization over 10000 models: max error {worst:.1e}")));

    let mut excess = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let (pg, pa, b0) = random_model(&mut rng);
        let p = classical_behavior(&pg, &pa, &b0);
        let d = classical_do(&pg, &pa);
        excess = excess.max(witness_i(&p) - bound_i()).max(witness_f(&p, &d) - bound_f());
    }
    out.push(line("9f", excess <= 1e-9, format!("10000 random models: largest excess over the bounds {excess:.4}")));
    out
}

fn criterion_10() -> Line {
    let wi = builtin("I").unwrap();
    let wf = builtin("F").unwrap();
    let w = SubspaceWitnesses {
        i: &wi,
        f: &wf,
        bound_i: bound_i(),
        bound_f: bound_f(),
    };
    let circle = quantum_circle(256)
        .iter()
        .map(|(r, s)| (16.0 * (r * r + s * s) - 1.0).abs())
        .fold(0.0, f64::max);
    let on_circle = w.classify(FRAC_PI_4.sin() / 4.0, FRAC_PI_4.cos() / 4.0).unwrap();
    let origin = w.classify(0.0, 0.0).unwrap();
    // The family at θ = π/8 sits on the circle point above.
    let family_point = family_behavior(FRAC_PI_8, 1.0);
    let same = family_point.max_abs_diff(&Behavior::new(family(FRAC_PI_8, 1.0)).unwrap());
    let pass = circle <= 1e-15
        && on_circle.region == Some(Region::IViolating)
        && origin.region == Some(Region::ClassicalSatisfying)
        && same < 1e-15;
    line(
        "10",
        pass,
        format!(
            "circle residual {circle:.1e}; (sin(pi/4)/4, cos(pi/4)/4) {}; origin {}",
            on_circle.region.map_or("?", |r| r.label()),
            origin.region.map_or("?", |r| r.label())
        ),
    )
}

fn main() {
    let mut lines = vec![criterion_1(), criterion_2(), criterion_3()];
    lines.extend(criterion_4());
    lines.extend(criterion_5());
    lines.extend(criterion_6());
    lines.extend(criterion_7());
    lines.extend(criterion_9());
    lines.push(criterion_10());
    lines.extend(criterion_8());

    let known: BTreeMap<&str, &str> = KNOWN_UNATTAINABLE.into_iter().collect();
    let mut unexpected = Vec::new();
    println!();
    for l in &lines {
        match (l.pass, known.get(l.id)) {
            (false, Some(why)) => println!("known  {:<5} {why}", l.id),
            (false, None) => unexpected.push(l.id),
            (true, Some(_)) => println!("note   {:<5} listed as unattainable but passed", l.id),
            (true, None) => {}
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("{passed}/{} criteria passed", lines.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
