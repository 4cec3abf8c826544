use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{axiom} violated at basis index {}", format_indices(.indices))]
    AxiomViolation {
        axiom: &'static str,
        indices: Vec<usize>,
        residual: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid implementing triple: {0}")]
    InvalidTriple(String),

    #[error("D is not an isometry: ‖D*D − I‖ = {0:e}")]
    NonIsometric(f64),

    #[error("step too large: h‖ξ‖² = {value} exceeds 1 (walk steps need h‖ξ‖² ≤ 1)")]
    StepTooLarge { value: f64 },

    #[error("step length must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("not a χ-structure map: {0}")]
    NotStructureMap(String),

    #[error("tensor dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("step function breakpoint {breakpoint} is not aligned with grid step {h}")]
    Misaligned { breakpoint: f64, h: f64 },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("time {t} lies beyond the step-function horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("generator does not match the triple: residual {0:e}")]
    GeneratorMismatch(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_indices(indices: &[usize]) -> String {
    match indices {
        [i] => i.to_string(),
        _ => format!(
            "{} ({})",
            indices.first().map(|i| i.to_string()).unwrap_or_default(),
            indices
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}
