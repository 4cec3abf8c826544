//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;

use qrw::bialgebra::{
    build_function_algebra, build_group_algebra, verify_bialgebra, CounitalBialgebra,
};
use qrw::cocycle::{first_order_remainder, CocycleOracle};
use qrw::convolution::check_compatibility;
use qrw::experiment::{cmd_sweep, demo_config, loglog_slope, ErrorTable, Experiment};
use qrw::group::FiniteGroup;
use qrw::io::{bialgebra_to_json, load_bialgebra};
use qrw::linalg::{cvec, direct_sum, max_abs_slice, CMatrix, CVector, C64};
use qrw::qsmaps::{
    choi_min_eigenvalue, extract_implementing_pair, generator_from_triple, homomorphism_residual,
    structure_map_from_pair, unitality_residual, verify_structure_relation, Character,
    ImplementingTriple,
};
use qrw::walk::{
    build_isometry, build_unitary, vector_state_check, verify_error_identity, walk_map,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn s3() -> FiniteGroup {
    FiniteGroup::symmetric(3).unwrap()
}

fn z2() -> FiniteGroup {
    FiniteGroup::cyclic(2).unwrap()
}

fn four_bialgebras() -> Vec<(&'static str, CounitalBialgebra)> {
    vec![
        ("C(Z2)", build_function_algebra(&z2())),
        ("C(S3)", build_function_algebra(&s3())),
        ("C[Z2]", build_group_algebra(&z2())),
        ("C[S3]", build_group_algebra(&s3())),
    ]
}

fn test_vector(p: usize, seed: f64) -> CVector {
    CVector::from_fn(p, |i, _| {
        let x = i as f64 + seed;
        c((1.3 * x).sin() * 0.6, (0.7 * x).cos() * 0.3)
    })
}

fn column_isometry(p: usize, k: usize) -> CMatrix {
    // Orthonormal columns from a QR factorisation of a fixed matrix.
    let m = CMatrix::from_fn(p, k, |i, j| {
        c(
            1.0 + (i * (j + 2)) as f64 * 0.37,
            0.2 * (i as f64 - j as f64),
        )
    });
    m.qr().q().columns(0, k).into_owned()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut names = vec![];
    let mut all = four_bialgebras();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c_s3.json");
    std::fs::write(&path, bialgebra_to_json(&build_function_algebra(&s3()))).unwrap();
    all.push(("C(S3) from file", load_bialgebra(&path).unwrap()));
    for (name, b) in &all {
        let r = verify_bialgebra(b);
        worst = worst.max(r.max_residual());
        if !r.passes(1e-12) {
            names.push(format!("{name}: {}", r.first_failure(1e-12).unwrap()));
        }
    }
    outcome(
        names.is_empty() && worst < 1e-12,
        format!(
            "5 bialgebras, max axiom residual {worst:.2e}{}",
            if names.is_empty() {
                String::new()
            } else {
                format!("; {names:?}")
            }
        ),
    )
}

fn triples(b: &CounitalBialgebra) -> Vec<(ImplementingTriple, Character)> {
    let p = b.rep_dim();
    let faithful = b.faithful_rep().to_vec();
    let last = b.characters().len() - 1;
    let chi_last = Character::stored(b, last).unwrap();
    let one_dim: Vec<CMatrix> = chi_last
        .values()
        .iter()
        .map(|&z| CMatrix::from_element(1, 1, z))
        .collect();
    let summed: Vec<CMatrix> = faithful
        .iter()
        .zip(&one_dim)
        .map(|(a, o)| direct_sum(a, o))
        .collect();
    let counit = Character::counit(b);
    vec![
        (
            ImplementingTriple::pair(faithful.clone(), test_vector(p, 0.0)),
            counit.clone(),
        ),
        (
            ImplementingTriple::pair(faithful.clone(), test_vector(p, 2.5)),
            chi_last.clone(),
        ),
        (
            ImplementingTriple::pair(one_dim, cvec(&[c(0.7, -0.2)])),
            counit.clone(),
        ),
        (
            ImplementingTriple::pair(summed, test_vector(p + 1, 1.0)),
            counit,
        ),
    ]
}

fn criterion_2() -> Outcome {
    let (mut rel, mut trip, mut count) = (0.0f64, 0.0f64, 0);
    for (_, b) in four_bialgebras() {
        for (t, chi) in triples(&b) {
            let phi = structure_map_from_pair(&b, &t, &chi).unwrap();
            rel = rel.max(verify_structure_relation(&b, &phi, &chi));
            let ex = extract_implementing_pair(&b, &phi, &chi, 1e-10).unwrap();
            trip = trip.max(ex.round_trip_residual);
            count += 1;
        }
    }
    outcome(
        rel < 1e-12 && trip < 1e-10,
        format!(
            "{count} triples on 4 bialgebras, structure relation {rel:.2e}, round trip {trip:.2e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let (mut unit, mut expand, mut vs) = (0.0f64, 0.0f64, 0.0f64);
    for (_, b) in four_bialgebras() {
        let p = b.rep_dim();
        let xi = test_vector(p, 0.5) * c(2.0, 0.0);
        let chi = Character::counit(&b);
        let k = if p > 1 { 2.min(p) } else { 1 };
        let d = column_isometry(p, k);
        let pair = ImplementingTriple::pair(b.faithful_rep().to_vec(), xi.clone());
        let with_d =
            ImplementingTriple::with_isometry(b.faithful_rep().to_vec(), xi.clone(), d.clone());
        for h0 in [0.5, 0.1, 0.01] {
            let h = h0 * (1.0 / xi.norm_squared()).min(1.0);
            unit = unit.max(build_unitary(&xi, h).unwrap().unitarity_residual());
            unit = unit.max(build_isometry(&xi, &d, h).unwrap().unitarity_residual());
            expand = expand.max(verify_error_identity(&b, &pair, &chi, h).unwrap());
            expand = expand.max(verify_error_identity(&b, &with_d, &chi, h).unwrap());
            vs = vs.max(vector_state_check(&b, &pair, &chi, h).unwrap().max());
        }
    }
    outcome(
        unit < 1e-13 && expand < 1e-11 && vs < 1e-12,
        format!(
            "unitarity/isometry {unit:.2e}, error expansion {expand:.2e}, vector state {vs:.2e}"
        ),
    )
}

fn demo_experiment(name: &str) -> Experiment {
    let (cfg, _) = demo_config(name).unwrap();
    Experiment::from_config(&cfg, Path::new(".")).unwrap()
}

const DEMOS: [&str; 3] = ["c-z2", "group-z2", "group-s3"];

fn demo_tables() -> &'static Vec<(&'static str, Experiment, ErrorTable)> {
    static TABLES: std::sync::OnceLock<Vec<(&'static str, Experiment, ErrorTable)>> =
        std::sync::OnceLock::new();
    TABLES.get_or_init(|| {
        DEMOS
            .iter()
            .map(|&n| {
                let exp = demo_experiment(n);
                let t = cmd_sweep(&exp).unwrap();
                (n, exp, t)
            })
            .collect()
    })
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for (name, _, t) in demo_tables() {
        let pts: Vec<(f64, f64)> = t.rows.iter().map(|r| (r.h, r.generator_gap)).collect();
        let slope = loglog_slope(&pts).unwrap_or(f64::NAN);
        let bounded = t
            .rows
            .iter()
            .all(|r| r.generator_gap <= r.gap_bound * (1.0 + 1e-12));
        ok &= t.rows.len() == 6 && (slope - 1.0).abs() <= 0.1 && bounded;
        parts.push(format!(
            "{name} slope {slope:.3}{}",
            if bounded { "" } else { " (bound violated)" }
        ));
    }
    outcome(ok, parts.join(", "))
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let cases: Vec<(CounitalBialgebra, ImplementingTriple)> = {
        let gs3 = build_group_algebra(&s3());
        let t1 = ImplementingTriple::with_isometry(
            gs3.faithful_rep().to_vec(),
            test_vector(6, 0.3),
            column_isometry(6, 1),
        );
        let cs3 = build_function_algebra(&s3());
        let chi = Character::stored(&cs3, 4).unwrap();
        let pi: Vec<CMatrix> = chi
            .values()
            .iter()
            .map(|&z| CMatrix::from_element(1, 1, z))
            .collect();
        let t2 = ImplementingTriple::pair(pi, cvec(&[c(0.9, 0.3)]));
        vec![(gs3, t1), (cs3, t2)]
    };
    for (b, t) in &cases {
        let psi = walk_map(b, t, &Character::counit(b), 0.2).unwrap();
        for n in 0..=4 {
            worst = worst.max(check_compatibility(b, &psi, n, 4096).unwrap());
        }
    }
    outcome(
        worst < 1e-11,
        format!("C[S3] (CP) and C(S3) (homomorphic), n ≤ 4, residual {worst:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let b = build_group_algebra(&s3());
    let t = ImplementingTriple::with_isometry(
        b.faithful_rep().to_vec(),
        test_vector(6, 0.3),
        column_isometry(6, 1),
    );
    let phi = generator_from_triple(&b, &t, &Character::counit(&b)).unwrap();
    let oracle = CocycleOracle::new(&b, phi).unwrap();
    let mut law: f64 = 0.0;
    for (cv, dv) in [
        (c(0.0, 0.0), c(0.0, 0.0)),
        (c(0.5, 0.1), c(-0.3, 0.4)),
        (c(1.0, 0.0), c(1.0, 0.0)),
    ] {
        let (cc, dd) = (cvec(&[cv]), cvec(&[dv]));
        for s in [0.1, 0.3, 0.5] {
            for tt in [0.2, 0.45, 0.7] {
                let lhs = oracle
                    .semigroup_at(&cc, &dd, s)
                    .unwrap()
                    .convolve(&b, &oracle.semigroup_at(&cc, &dd, tt).unwrap());
                let rhs = oracle.semigroup_at(&cc, &dd, s + tt).unwrap();
                law = law.max(max_abs_slice((lhs.0 - rhs.0).as_slice()));
            }
        }
    }
    let hs = [0.1, 0.05, 0.025, 0.0125];
    let mut slopes = vec![];
    let cz2 = build_function_algebra(&z2());
    let chi1 = Character::stored(&cz2, 1).unwrap();
    let pi: Vec<CMatrix> = chi1
        .values()
        .iter()
        .map(|&z| CMatrix::from_element(1, 1, z))
        .collect();
    let cases = [
        (&b, t.clone()),
        (&cz2, ImplementingTriple::pair(pi, cvec(&[c(1.0, 0.0)]))),
    ];
    for (bb, tr) in cases {
        let r: Vec<(f64, f64)> = hs
            .iter()
            .map(|&h| {
                (
                    h,
                    first_order_remainder(
                        bb,
                        &tr,
                        &cvec(&[c(0.7, 0.2)]),
                        &cvec(&[c(-0.5, 0.1)]),
                        h,
                    )
                    .unwrap(),
                )
            })
            .collect();
        slopes.push(loglog_slope(&r).unwrap_or(f64::NAN));
    }
    let quadratic = slopes.iter().all(|s| (s - 2.0).abs() <= 0.1);
    outcome(
        law < 1e-11 && quadratic,
        format!("semigroup law {law:.2e}, first-order remainder slopes {slopes:.3?} (expected 2)"),
    )
}

fn criterion_7() -> Outcome {
    let fixtures: serde_json::Value =
        serde_json::from_str(include_str!("fixtures/convergence.json")).expect("fixture file");
    let mut ok = true;
    let mut parts = vec![];
    for (name, _, t) in demo_tables() {
        let maxes: Vec<f64> = t.rows.iter().map(|r| r.max_error).collect();
        let decreasing = maxes.windows(2).all(|w| w[1] < w[0]);
        let ratio = maxes[maxes.len() - 1] / maxes[0];
        let frozen: Vec<f64> = fixtures[*name]["max_error"]
            .as_array()
            .expect("fixture entry")
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        let drift = maxes
            .iter()
            .zip(&frozen)
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0f64, f64::max);
        let matches = frozen.len() == maxes.len() && drift < 1e-9;
        ok &= decreasing && ratio <= 1e-2 && matches;
        parts.push(format!(
            "{name}: decreasing {decreasing}, final/initial {ratio:.4} (need ≤ 0.01), fixture drift {drift:.1e}"
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let (mut hom, mut choi, mut unital) = (0.0f64, 0.0f64, 0.0f64);
    let mut seen = (0, 0);
    for (_, exp, _) in demo_tables() {
        for &h in &exp.hs {
            let psi = walk_map(&exp.b, &exp.triple, &exp.chi, h).unwrap();
            if exp.triple.isometry.is_none() {
                hom = hom.max(homomorphism_residual(&exp.b, &psi));
                seen.0 += 1;
            } else {
                choi = choi.min(choi_min_eigenvalue(&exp.b, &psi));
                unital = unital.max(unitality_residual(&exp.b, &psi));
                seen.1 += 1;
            }
        }
    }
    outcome(
        seen.0 > 0 && seen.1 > 0 && hom < 1e-12 && choi >= -1e-10 && unital <= 1e-14,
        format!(
            "{} homomorphic steps (residual {hom:.2e}), {} CP steps (Choi min {choi:.2e}, ‖ψ(1) − I‖ {unital:.2e})",
            seen.0, seen.1
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("algebraic axioms", criterion_1),
        ("structure-map equivalence", criterion_2),
        ("walk-step identities", criterion_3),
        ("generator convergence", criterion_4),
        ("compatibility identity", criterion_5),
        ("semigroup and first-order expansion", criterion_6),
        ("end-to-end convergence", criterion_7),
        ("homomorphic/preunital preservation", criterion_8),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let o = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{}]: {}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            title,
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
