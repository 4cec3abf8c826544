use serde_json::json;

use super::config::{
    BialgebraSource, CharacterChoice, ExperimentConfig, GroupSource, Probes, RepSource,
    StepPairConfig, SweepConfig, TripleConfig,
};
use crate::bialgebra::build_group_algebra;
use crate::group::FiniteGroup;
use crate::io::{bialgebra_to_json, Complex};
use crate::tolerance::{self, Tolerances};

pub const DEMOS: [(&str, &str); 4] = [
    (
        "c-z2",
        "C(Z2), one-dimensional π, D absent (commutative, homomorphic walk)",
    ),
    (
        "group-z2",
        "ℂ[Z2], regular representation, isometry D (CP walk)",
    ),
    (
        "group-s3",
        "ℂ[S3], regular representation, isometry D (noncommutative CP walk)",
    ),
    (
        "custom-file",
        "ℂ[Z3] read back from a bialgebra file, D absent, noise dimension 3",
    ),
];

pub fn demo_names() -> Vec<&'static str> {
    DEMOS.iter().map(|(n, _)| *n).collect()
}

fn reals(v: &[f64]) -> Vec<Complex> {
    v.iter().map(|&x| Complex::Real(x)).collect()
}

fn column(v: &[f64]) -> Vec<Vec<Complex>> {
    v.iter().map(|&x| vec![Complex::Real(x)]).collect()
}

fn rows(v: serde_json::Value) -> Vec<Vec<serde_json::Value>> {
    serde_json::from_value(v).expect("literal rows")
}

fn scalar_pairs() -> Vec<StepPairConfig> {
    vec![
        StepPairConfig {
            f: rows(json!([[1.0, [0.5, 0.0]]])),
            g: rows(json!([[1.0, [0.3, 0.0]]])),
        },
        StepPairConfig {
            f: rows(json!([[0.5, [1.0, 0.2]], [0.5, [-0.5, 0.0]]])),
            g: rows(json!([[0.25, [0.2, -0.1]], [0.75, [0.6, 0.0]]])),
        },
    ]
}

fn vector_pairs() -> Vec<StepPairConfig> {
    vec![
        StepPairConfig {
            f: rows(json!([[1.0, [0.5, 0.0], [0.0, 0.0], [0.2, 0.0]]])),
            g: rows(json!([[1.0, [0.3, 0.0], [0.1, 0.0], [0.0, 0.0]]])),
        },
        StepPairConfig {
            f: rows(json!([
                [0.5, [1.0, 0.2], [0.0, 0.3], [0.1, 0.0]],
                [0.5, [-0.5, 0.0], [0.2, 0.0], [0.0, 0.0]]
            ])),
            g: rows(json!([
                [0.25, [0.2, -0.1], [0.4, 0.0], [0.0, 0.0]],
                [0.75, [0.6, 0.0], [0.0, 0.0], [-0.3, 0.1]]
            ])),
        },
    ]
}

fn base(
    name: &str,
    bialgebra: BialgebraSource,
    triple: TripleConfig,
    pairs: Vec<StepPairConfig>,
) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        bialgebra,
        triple,
        noise_dim: None,
        character: CharacterChoice::default(),
        horizon: 1.0,
        sample_times: vec![0.5, 1.0],
        sweep: SweepConfig {
            h0: 0.25,
            ratio: 0.5,
            count: 6,
        },
        step_functions: pairs,
        probes: Probes::default(),
        tolerances: Tolerances::default(),
        error_bound: 1e-2,
        compatibility_n: 3,
        dimension_cap: tolerance::DIMENSION_CAP,
    }
}

/// The ready-made config for a demo, plus any extra file it refers to.
pub fn demo_config(name: &str) -> Option<(ExperimentConfig, Option<(&'static str, String)>)> {
    let cfg = match name {
        "c-z2" => base(
            name,
            BialgebraSource::FunctionAlgebra(GroupSource::Cyclic(2)),
            TripleConfig {
                pi: RepSource::Character { character: 1 },
                xi: reals(&[1.0]),
                isometry: None,
            },
            scalar_pairs(),
        ),
        "group-z2" => base(
            name,
            BialgebraSource::GroupAlgebra(GroupSource::Cyclic(2)),
            TripleConfig {
                pi: RepSource::Named("faithful".into()),
                xi: reals(&[1.0, 0.0]),
                isometry: Some(column(&[1.0, 0.0])),
            },
            scalar_pairs(),
        ),
        "group-s3" => base(
            name,
            BialgebraSource::GroupAlgebra(GroupSource::Symmetric(3)),
            TripleConfig {
                pi: RepSource::Named("faithful".into()),
                xi: reals(&[0.8, 0.4, 0.0, -0.3, 0.2, 0.1]),
                isometry: Some(column(&[0.0, 0.6, 0.8, 0.0, 0.0, 0.0])),
            },
            scalar_pairs(),
        ),
        "custom-file" => {
            let file =
                bialgebra_to_json(&build_group_algebra(&FiniteGroup::cyclic(3).expect("Z3")));
            let cfg = base(
                name,
                BialgebraSource::File("bialgebra.json".into()),
                TripleConfig {
                    pi: RepSource::Named("faithful".into()),
                    xi: reals(&[0.6, 0.3, -0.2]),
                    isometry: None,
                },
                vector_pairs(),
            );
            return Some((cfg, Some(("bialgebra.json", file))));
        }
        _ => return None,
    };
    Some((cfg, None))
}
