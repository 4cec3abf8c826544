use serde::Serialize;

use crate::bialgebra::{verify_bialgebra, BialgebraReport};
use crate::convolution::check_compatibility;
use crate::error::Result;
use crate::qsmaps::{
    choi_min_eigenvalue, default_zeta, extract_implementing_pair, generator_from_triple,
    homomorphism_residual, unitality_residual, verify_cp_decomposition, verify_structure_relation,
};
use crate::walk::{
    build_isometry, build_unitary, vector_state_check, verify_error_identity, walk_map,
};

use super::config::Experiment;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// "max": value ≤ tolerance; "min": value ≥ −tolerance.
    pub kind: &'static str,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            kind: "max",
            passed: value <= tolerance,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            kind: "min",
            passed: value >= -tolerance,
        }
    }

    fn failed(name: impl Into<String>, why: String) -> Self {
        log::warn!("{why}");
        Self {
            name: format!("{}: {why}", name.into()),
            value: f64::NAN,
            tolerance: 0.0,
            kind: "error",
            passed: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub passed: bool,
    pub bialgebra: BialgebraReport,
    /// First violated axiom, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub checks: Vec<Check>,
}

fn push<T>(checks: &mut Vec<Check>, name: &str, r: Result<T>, f: impl FnOnce(T) -> Vec<Check>) {
    match r {
        Ok(v) => checks.extend(f(v)),
        Err(e) => checks.push(Check::failed(name, e.to_string())),
    }
}

pub fn cmd_verify(exp: &Experiment) -> VerifyReport {
    let tol = exp.tol;
    let b = &exp.b;
    let report = verify_bialgebra(b);
    if let Some(err) = report.first_failure(tol.identity) {
        log::error!("bialgebra axioms fail: {err}");
        return VerifyReport {
            name: exp.name.clone(),
            passed: false,
            bialgebra: report,
            failure: Some(err.to_string()),
            checks: vec![],
        };
    }

    let mut checks = Vec::new();
    let chi = &exp.chi;
    let triple = &exp.triple;
    checks.push(Check::at_most("character", chi.residual(b), tol.identity));
    push(
        &mut checks,
        "triple",
        triple.validate(b, tol.identity),
        |_| vec![],
    );
    if checks.iter().any(|c| !c.passed) {
        return finish(exp, report, checks);
    }

    let phi = match generator_from_triple(b, triple, chi) {
        Ok(p) => p,
        Err(e) => {
            checks.push(Check::failed("generator", e.to_string()));
            return finish(exp, report, checks);
        }
    };

    if triple.isometry.is_none() {
        checks.push(Check::at_most(
            "structure relation",
            verify_structure_relation(b, &phi, chi),
            tol.identity,
        ));
        push(
            &mut checks,
            "extraction round trip",
            extract_implementing_pair(b, &phi, chi, tol.round_trip),
            |ex| {
                vec![Check::at_most(
                    "extraction round trip",
                    ex.round_trip_residual,
                    tol.round_trip,
                )]
            },
        );
    }
    push(
        &mut checks,
        "cp decomposition",
        verify_cp_decomposition(b, &phi, chi, &default_zeta(triple), tol.positivity),
        |r| {
            vec![
                Check::at_least(
                    "φ₁ Choi minimum eigenvalue",
                    r.phi1_min_eigenvalue,
                    tol.positivity,
                ),
                Check::at_most(
                    "φ(1) maximum eigenvalue",
                    r.phi_one_max_eigenvalue,
                    tol.positivity,
                ),
            ]
        },
    );

    for &h in &exp.hs {
        let step = match &triple.isometry {
            None => build_unitary(&triple.xi, h),
            Some(d) => build_isometry(&triple.xi, d, h),
        };
        push(&mut checks, &format!("walk step h={h}"), step, |s| {
            vec![Check::at_most(
                format!("unitarity h={h}"),
                s.unitarity_residual(),
                tol.unitary,
            )]
        });
        push(
            &mut checks,
            &format!("error identity h={h}"),
            verify_error_identity(b, triple, chi, h),
            |r| {
                vec![Check::at_most(
                    format!("error identity h={h}"),
                    r,
                    tol.expansion,
                )]
            },
        );
        if triple.isometry.is_none() {
            push(
                &mut checks,
                &format!("vector state h={h}"),
                vector_state_check(b, triple, chi, h),
                |r| {
                    vec![Check::at_most(
                        format!("vector state h={h}"),
                        r.max(),
                        tol.identity,
                    )]
                },
            );
        }
        push(
            &mut checks,
            &format!("walk map h={h}"),
            walk_map(b, triple, chi, h),
            |psi| {
                if triple.isometry.is_none() {
                    vec![Check::at_most(
                        format!("*-homomorphism h={h}"),
                        homomorphism_residual(b, &psi),
                        tol.identity,
                    )]
                } else {
                    vec![
                        Check::at_least(
                            format!("complete positivity h={h}"),
                            choi_min_eigenvalue(b, &psi),
                            tol.positivity,
                        ),
                        Check::at_most(
                            format!("preunitality h={h}"),
                            unitality_residual(b, &psi),
                            tol.identity,
                        ),
                    ]
                }
            },
        );
    }

    if let Some(&h) = exp.hs.first() {
        push(
            &mut checks,
            "compatibility",
            walk_map(b, triple, chi, h),
            |psi| {
                (1..=exp.compatibility_n)
                    .map(
                        |n| match check_compatibility(b, &psi, n, exp.dimension_cap) {
                            Ok(r) => {
                                Check::at_most(format!("compatibility n={n}"), r, tol.expansion)
                            }
                            Err(e) => Check::failed(format!("compatibility n={n}"), e.to_string()),
                        },
                    )
                    .collect()
            },
        );
    }
    finish(exp, report, checks)
}

fn finish(exp: &Experiment, bialgebra: BialgebraReport, checks: Vec<Check>) -> VerifyReport {
    for c in checks.iter().filter(|c| !c.passed) {
        log::warn!(
            "check failed: {} = {:e} (tolerance {:e})",
            c.name,
            c.value,
            c.tolerance
        );
    }
    VerifyReport {
        name: exp.name.clone(),
        passed: checks.iter().all(|c| c.passed),
        bialgebra,
        failure: None,
        checks,
    }
}
