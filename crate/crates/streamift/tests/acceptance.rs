//! Acceptance suite: one test per acceptance criterion, golden values and
//! tolerances pinned in code. Criteria with wall-clock bounds assert them
//! directly.
//!
//! Criterion 3a is expected to fail and is left failing on purpose: the
//! published rendering of the three-coloured-trees derivation splits the
//! second equation's cross monomial on a different variable than the other
//! two equations (no single variable order produces all three rows) and
//! carries the negated Cramer pair (its denominator evaluates to -1 at the
//! origin, not to the Jacobian determinant +1). No configuration of this
//! pipeline reproduces that rendering verbatim. Criterion 3x shows the two
//! systems are the same mathematical object: identical solution streams
//! for y1, y2, y3 and zero residual on the defining equations.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num::bigint::BigInt;
use num::traits::One;

use streamift::bench::{loglog_slope, run_bench, to_csv, Method, CSV_HEADER};
use streamift::deriv::{classical_partial, decompose, stream_derivative};
use streamift::engine::{
    convolve, naive_coefficients, SolveMode, StreamSolution,
};
use streamift::engine::residual;
use streamift::gen::{random_guarded_system, random_order};
use streamift::ift::{check_hypotheses, derive_pipeline, SdeSystem};
use streamift::parse::{parse_expr, parse_system, PolySystem};
use streamift::poly::{Monomial, Polynomial};
use streamift::rat::{is_zero, rat, rat_frac, Rat};
use streamift::taylor::{build_classical_ode, compare_methods, derivative_size_metric, taylor_solve};
use streamift::var::{VarId, VarOrder};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn systems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems")
}

fn load(name: &str) -> PolySystem {
    let path = systems_dir().join(format!("{name}.sys"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    parse_system(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn solve(sys: &PolySystem, k: usize) -> Vec<Vec<Rat>> {
    let sde = derive_pipeline(sys, &sys.order).expect("hypotheses hold");
    let mut sol = StreamSolution::new(&sde, SolveMode::Sde);
    sol.extend(k);
    (1..=sys.n()).map(|i| sol.stream(i).to_vec()).collect()
}

fn rats(vals: &[i64]) -> Vec<Rat> {
    vals.iter().map(|&v| rat(v)).collect()
}

/// Independent closed-form oracle: the n-th Catalan number
/// binom(2n, n) / (n + 1), computed by exact integer arithmetic.
fn catalan_number(n: usize) -> Rat {
    let mut binom = BigInt::one();
    for i in 1..=n {
        binom = binom * BigInt::from(n + i) / BigInt::from(i);
    }
    Rat::new(binom, BigInt::from(n + 1))
}

#[test]
fn criterion_01_catalan_golden() {
    let start = Instant::now();
    let sys = load("catalan");
    let rows = solve(&sys, 9);
    let elapsed = start.elapsed();

    assert_eq!(&rows[0][..6], rats(&[1, 1, 2, 5, 14, 42]).as_slice());
    assert_eq!(&rows[0][6..], rats(&[132, 429, 1430, 4862]).as_slice());
    let oracle: Vec<Rat> = (0..=9).map(catalan_number).collect();
    assert_eq!(rows[0], oracle);

    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("criterion 1: PASS (catalan coefficients exact, {elapsed:?})");
}

#[test]
fn criterion_02_circle_golden() {
    let sys = load("circle");
    let rows = solve(&sys, 100);
    let sigma = &rows[0];

    let expect = vec![
        rat(1),
        rat(0),
        rat_frac(-1, 2),
        rat(0),
        rat_frac(-1, 8),
        rat(0),
        rat_frac(-1, 16),
    ];
    assert_eq!(&sigma[..7], expect.as_slice());

    // defining identity: sigma (*) sigma = 1 - x^2, exactly, through 100
    let square = convolve(sigma, sigma, 100);
    for (i, c) in square.iter().enumerate() {
        let want = match i {
            0 => rat(1),
            2 => rat(-1),
            _ => rat(0),
        };
        assert_eq!(*c, want, "index {i} of sigma*sigma");
    }

    // the other branch is the exact negation
    let neg_rows = solve(&load("circle-neg"), 100);
    let negated: Vec<Rat> = sigma.iter().map(|c| -c).collect();
    assert_eq!(neg_rows[0], negated);
    println!("criterion 2: PASS (circle coefficients, defining identity, negated branch)");
}

/// The published rendering of the trees derivation, transcribed verbatim.
fn trees_reference_system() -> SdeSystem {
    let names: Vec<String> = ["y1", "y2", "y3", "w"].iter().map(|s| s.to_string()).collect();
    let rhs = vec![
        parse_expr("2*w*y1*y2 + w*y2*y3 - w", &names).unwrap(),
        parse_expr(
            "-2*w*y1^2 - 4*w*y1*y2 - w*y1*y3 - w*y1 - 2*w*y2*y3",
            &names,
        )
        .unwrap(),
        parse_expr("-w*y1*y2 - w*y1 - 2*w*y2", &names).unwrap(),
        parse_expr(
            "4*w^2*y1^2*y2^2 + 4*w^2*y1^2*y2*y3 - 8*w^2*y1^2*y3^2 - 6*w^2*y1^2*y3 \
             + 8*w^2*y1*y2^3 + 14*w^2*y1*y2^2*y3 + 6*w^2*y1*y2^2 - 10*w^2*y1*y2*y3^2 \
             - 8*w^2*y1*y2*y3 - 2*w^2*y1*y2 - 4*w^2*y1*y3^3 - 7*w^2*y1*y3^2 \
             - 7*w^2*y1*y3 + 4*w^2*y2^3*y3 + 6*w^2*y2^2*y3^2 + 3*w^2*y2^2*y3 \
             - 4*w^2*y2^2 - 6*w^2*y2*y3^3 - 3*w^2*y2*y3^2 - 10*w^2*y2*y3 \
             - 3*w^2*y2 - 2*w^2*y3^2 - 3*w^2*y3",
            &names,
        )
        .unwrap(),
    ];
    let init = vec![rat(0), rat(0), rat(0), rat(-1)];
    SdeSystem { names, rhs, init }
}

#[test]
fn criterion_03a_trees_sde_matches_reference_rendering() {
    let sys = load("trees");
    let start = Instant::now();
    let sde = derive_pipeline(&sys, &sys.order).expect("hypotheses hold");
    let reference = trees_reference_system();
    assert!(start.elapsed() < Duration::from_secs(5));

    assert_eq!(sde.names, reference.names);
    // Exact polynomial equality after canonicalization, equation by
    // equation. See the module comment: the reference rendering is not
    // derivable from any single variable order, so this check documents
    // the discrepancy rather than passing.
    for i in 0..4 {
        assert_eq!(
            sde.rhs[i], reference.rhs[i],
            "equation {} differs from the reference rendering:\n  derived:   {}\n  reference: {}",
            i + 1,
            sde.rhs[i].render(&|v| sde.name_of(v)),
            reference.rhs[i].render(&|v| reference.name_of(v)),
        );
    }
    assert_eq!(sde.init, reference.init);
    println!("criterion 3a: PASS (derived trees system matches the reference rendering)");
}

#[test]
fn criterion_03b_trees_stream_coefficients() {
    let start = Instant::now();
    let sys = load("trees");
    let rows = solve(&sys, 8);
    let elapsed = start.elapsed();
    assert_eq!(rows[0], rats(&[0, 1, 0, 0, 4, 16, 56, 256, 1236]));
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("criterion 3b: PASS (sigma_1 indices 0..8 exact, {elapsed:?})");
}

#[test]
fn criterion_03c_trees_series_route_through_nine() {
    let start = Instant::now();
    let sys = load("trees");
    let ode = build_classical_ode(&sys).expect("hypotheses hold");
    let series = taylor_solve(&ode, 9);
    assert_eq!(series[0], rats(&[0, 1, 0, 0, 4, 16, 56, 256, 1236, 5808]));

    let stream_rows = solve(&sys, 9);
    for i in 0..3 {
        assert_eq!(stream_rows[i], series[i][..10], "variable {}", i + 1);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("criterion 3c: PASS (series route matches through index 9 incl. 5808)");
}

#[test]
fn criterion_03x_trees_reference_system_semantically_equivalent() {
    // The reference rendering, run as a system in its own right, generates
    // the same y-streams and solves the defining equations, even though
    // its polynomials and its auxiliary stream differ from the derived
    // system's.
    let reference = trees_reference_system();

    // Internal consistency of the reference: its w-equation is exactly the
    // inverse-stream law applied to its own denominator polynomial
    // Delta = 2*y1^2*y2 + ... - 1 (which evaluates to -1 at the origin):
    // w' = -Delta(0,r0)^{-1} * h * w with h from Delta' by y_i' -> f_i*w.
    let names = &reference.names;
    let delta = parse_expr(
        "2*y1^2*y2 + 4*y1^2*y3 + 4*y1*y2^2 + 10*y1*y2*y3 + 3*y1*y2 + 2*y1*y3^2 \
         + 3*y1*y3 + 2*y2^2*y3 + 4*y2*y3^2 + 3*y2*y3 - 1",
        names,
    )
    .unwrap();
    let order = VarOrder::identity(3);
    let zero_y0: BTreeMap<VarId, Polynomial> = (1..=3)
        .map(|i| (VarId::Y0(i), Polynomial::zero()))
        .collect();
    let delta_prime = stream_derivative(&delta, &order).unwrap().substitute(&zero_y0);
    let w_poly = Polynomial::var(VarId::Y(4));
    // h = Delta'[y0 -> 0][y_i' -> f_i * w], and each f_i * w is exactly the
    // reference system's i-th right-hand side.
    let prime_subs: BTreeMap<VarId, Polynomial> = (0..3)
        .map(|i| (VarId::YPrime(i as u32 + 1), reference.rhs[i].clone()))
        .collect();
    let h = delta_prime.substitute(&prime_subs);
    // w' = -Delta(0, r0)^{-1} * h * w = h * w, since Delta(0, r0) = -1
    assert_eq!(
        reference.rhs[3],
        h.mul(&w_poly),
        "reference w-equation is the inverse-stream law for Delta"
    );

    // Same y-streams as the derived system.
    let sys = load("trees");
    let derived_rows = solve(&sys, 50);
    let mut ref_sol = StreamSolution::new(&reference, SolveMode::Sde);
    ref_sol.extend(50);
    for i in 1..=3 {
        assert_eq!(
            ref_sol.stream(i),
            derived_rows[i - 1].as_slice(),
            "y{i} streams of reference and derived systems"
        );
    }
    // The auxiliary streams are different objects (inverses of different
    // denominator polynomials).
    let derived = derive_pipeline(&sys, &sys.order).unwrap();
    let mut derived_sol = StreamSolution::new(&derived, SolveMode::Sde);
    derived_sol.extend(50);
    assert_ne!(ref_sol.stream(4), derived_sol.stream(4));

    // The reference solution satisfies the defining equations exactly.
    let ref_streams: Vec<Vec<Rat>> = (1..=3).map(|i| ref_sol.stream(i).to_vec()).collect();
    let res = residual(&sys, &ref_streams, 50);
    for (i, row) in res.iter().enumerate() {
        assert!(row.iter().all(is_zero), "equation {} residual", i + 1);
    }
    println!("criterion 3x: PASS (reference rendering is semantically equivalent)");
}

#[test]
fn criterion_04_positive_dimensional_system() {
    let sys = load("nonzerod");
    let report = check_hypotheses(&sys, &sys.order).unwrap();
    assert!(report.ok);
    assert_eq!(report.determinant, rat(12));

    let rows = solve(&sys, 50);
    let res = residual(&sys, &rows, 50);
    for (i, row) in res.iter().enumerate() {
        assert!(row.iter().all(is_zero), "equation {} residual", i + 1);
    }
    println!("criterion 4: PASS (determinant 12, residual zero through 50)");
}

const BUNDLED: [&str; 15] = [
    "catalan",
    "circle",
    "circle-neg",
    "trees",
    "nonzerod",
    "guarded01",
    "guarded02",
    "guarded03",
    "guarded04",
    "guarded05",
    "guarded06",
    "guarded07",
    "guarded08",
    "guarded09",
    "guarded10",
];

#[test]
fn criterion_05_method_equivalence_suite() {
    let start = Instant::now();
    for name in BUNDLED {
        let sys = load(name);
        let report = compare_methods(&sys, &sys.order, 100).unwrap();
        assert!(report.agree(), "{name}: {report}");
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "suite took {elapsed:?}, bound is 30 s"
    );
    println!("criterion 5: PASS (both routes agree through 100 on all bundled, {elapsed:?})");
}

fn random_poly(rng: &mut ChaCha8Rng, n: u32, max_deg: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..terms {
        let mut pairs = Vec::new();
        let mut budget = max_deg;
        if rng.gen_bool(0.4) {
            let e = rng.gen_range(1..=budget.max(1));
            budget = budget.saturating_sub(e);
            pairs.push((VarId::X, e));
        }
        for i in 1..=n {
            if budget > 0 && rng.gen_bool(0.6) {
                let e = rng.gen_range(1..=budget);
                budget -= e;
                pairs.push((VarId::Y(i), e));
            }
        }
        let c = rng.gen_range(-9i64..=9);
        if c != 0 {
            p.add_term(Monomial::from_pairs(pairs), rat(c));
        }
    }
    p
}

#[test]
fn criterion_06_partial_derivative_lemma() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAB1E);
    let mut checked = 0usize;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4u32);
        let p = random_poly(&mut rng, n, 5, 6);
        let order = VarOrder::identity(n as usize);
        let dec = decompose(&stream_derivative(&p, &order).unwrap(), n as usize).unwrap();
        for _ in 0..5 {
            let r0: Vec<Rat> = (0..n)
                .map(|_| rat_frac(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=3)))
                .collect();
            let mut point = BTreeMap::new();
            point.insert(VarId::X, rat(0));
            for (i, r) in r0.iter().enumerate() {
                point.insert(VarId::Y(i as u32 + 1), r.clone());
                point.insert(VarId::Y0(i as u32 + 1), r.clone());
            }
            for i in 1..=n {
                let classical = classical_partial(&p, VarId::Y(i)).eval(&point).unwrap();
                let stream = dec.q[i as usize - 1].eval(&point).unwrap();
                assert_eq!(classical, stream, "partial wrt y{i} of {p} at {r0:?}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 1000);
    println!("criterion 6: PASS ({checked} classical/stream partial agreements)");
}

#[test]
fn criterion_07_order_invariance() {
    for idx in 0..50u64 {
        let n = (idx as usize % 4) + 1;
        let sys = random_guarded_system(0xD1CE + idx, n);
        let ord_a = random_order(0xA0 + idx, n);
        let ord_b = random_order(0xB0 + idx, n);
        let sde_a = derive_pipeline(&sys, &ord_a).unwrap();
        let sde_b = derive_pipeline(&sys, &ord_b).unwrap();
        let mut sol_a = StreamSolution::new(&sde_a, SolveMode::Sde);
        let mut sol_b = StreamSolution::new(&sde_b, SolveMode::Sde);
        sol_a.extend(30);
        sol_b.extend(30);
        for i in 1..=n {
            assert_eq!(
                sol_a.stream(i),
                sol_b.stream(i),
                "system {idx}, variable {i}"
            );
        }
    }
    println!("criterion 7: PASS (50 guarded systems agree under two orders)");
}

#[test]
fn criterion_08_oracle_suite() {
    for name in BUNDLED {
        let sys = load(name);
        let sde = derive_pipeline(&sys, &sys.order).unwrap();
        let mut sol = StreamSolution::new(&sde, SolveMode::Sde);
        sol.extend(50);
        assert_eq!(sol.streams(), naive_coefficients(&sde, 50), "{name}");
    }
    for idx in 0..50u64 {
        let n = (idx as usize % 4) + 1;
        let sys = random_guarded_system(0xFEED + idx, n);
        let sde = derive_pipeline(&sys, &sys.order).unwrap();
        let mut sol = StreamSolution::new(&sde, SolveMode::Sde);
        sol.extend(50);
        assert_eq!(sol.streams(), naive_coefficients(&sde, 50), "guarded {idx}");
    }
    println!("criterion 8: PASS (memoized equals naive through 50 everywhere)");
}

#[test]
fn criterion_09_benchmark_shape() {
    let sys = load("trees");
    let ks = [100, 200, 300, 400, 500];
    let records = run_bench(&sys, &sys.order, "trees", &ks, 3).unwrap();
    assert_eq!(records.len(), 10);
    let csv = to_csv(&records);
    assert!(csv.starts_with(CSV_HEADER));

    let sde_points: Vec<(usize, f64)> = records
        .iter()
        .filter(|r| r.method == Method::SdeRecurrence)
        .map(|r| (r.k, r.seconds))
        .collect();
    let ode_at_500 = records
        .iter()
        .find(|r| r.method == Method::OdeSeries && r.k == 500)
        .unwrap()
        .seconds;
    let sde_at_500 = records
        .iter()
        .find(|r| r.method == Method::SdeRecurrence && r.k == 500)
        .unwrap()
        .seconds;
    assert!(
        sde_at_500 <= ode_at_500,
        "stream route {sde_at_500}s slower than series route {ode_at_500}s at k=500"
    );

    let slope = loglog_slope(&sde_points);
    assert!(
        (1.3..=2.7).contains(&slope),
        "log-log slope {slope} outside [1.3, 2.7]\n{csv}"
    );
    println!(
        "criterion 9: PASS (sde {sde_at_500:.3}s <= ode {ode_at_500:.3}s at k=500, slope {slope:.2})"
    );
}

#[test]
fn criterion_10_derivative_size_metric() {
    let sys = load("trees");
    let metric = derivative_size_metric(&sys, &sys.order).unwrap();
    // frozen regression values for the trees system
    assert_eq!(metric.monomials_stream, 13);
    assert_eq!(metric.monomials_classical, 16);
    assert_eq!(metric.p_stream, 22);
    assert_eq!(metric.p_classical, 40);
    assert!(metric.monomials_stream < metric.monomials_classical);
    assert!(
        metric.p_stream < metric.p_classical,
        "P_stream {} vs P_classical {}",
        metric.p_stream,
        metric.p_classical
    );
    println!(
        "criterion 10: PASS (monomials {} < {}, P {} < {})",
        metric.monomials_stream,
        metric.monomials_classical,
        metric.p_stream,
        metric.p_classical
    );
}

/// Post-condition of the derivation on the whole corpus: the generated
/// streams solve the defining equations exactly through index 200.
#[test]
fn bundled_corpus_solution_correctness_to_200() {
    for name in BUNDLED {
        let sys = load(name);
        let report = check_hypotheses(&sys, &sys.order).unwrap();
        assert!(report.ok, "{name} must satisfy the hypotheses");
        assert!(!is_zero(&report.determinant));
        let rows = solve(&sys, 200);
        let res = residual(&sys, &rows, 200);
        for row in res {
            assert!(row.iter().all(is_zero), "{name} residual");
        }
    }
}
