use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown generator {code} (presentation has {rank} generators)")]
    UnknownGenerator { code: i64, rank: usize },

    #[error("element is not purely loxodromic: {reason}")]
    NotLoxodromic { reason: String },

    #[error("ill-conditioned rank decision: singular-value gap {gap:.3e} below {required:.1e}")]
    IllConditioned { gap: f64, required: f64 },

    #[error("cocycle is not parabolic along peripheral word {index}: residual {residual:.3e} > {tolerance:.1e}")]
    NotParabolic {
        index: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("omega_G requires a closed surface, got {boundaries} boundary components")]
    NotClosedSurface { boundaries: usize },

    #[error("bending direction is not invariant under the cut holonomy: defect {defect:.3e}")]
    InvariantViolation { defect: f64 },

    #[error("degenerate flag configuration: wedge determinant {value:.3e} below gate {gate:.1e}")]
    DegenerateConfiguration { value: f64, gate: f64 },

    #[error("symplectic matrix is singular at the requested point")]
    SingularOmega,

    #[error("flow left the chart domain at t = {t}")]
    LeftDomain { t: f64 },

    #[error("Newton shooting did not converge: residual {residual:.3e} after {iterations} iterations")]
    ShootingDiverged { residual: f64, iterations: usize },

    #[error("unsupported {what}: {name}")]
    Unsupported { what: &'static str, name: String },

    #[error("representation relator residual {residual:.3e} exceeds {tolerance:.1e}")]
    RelatorViolation { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("schema error at {field}: {message}")]
    Schema { field: String, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
