use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("face {face} of tetrahedron {tet} is not glued")]
    UngluedFace { tet: usize, face: usize },
    #[error("gluing of tetrahedron {tet} face {face} is not involutive")]
    NonInvolutiveGluing { tet: usize, face: usize },
    #[error("invalid gluing of tetrahedron {tet} face {face}: {reason}")]
    InvalidGluing {
        tet: usize,
        face: usize,
        reason: String,
    },
    #[error("vertex orderings disagree on the face {face} of tetrahedron {tet}")]
    InconsistentOrdering { tet: usize, face: usize },
    #[error("triangulation is not orientable or orientation override is inconsistent at tetrahedron {tet}")]
    Orientation { tet: usize },
    #[error("cusp {cusp} is not a torus (V - E + F = {euler})")]
    NotTorus { cusp: usize, euler: i64 },
    #[error("peripheral path {name} on cusp {cusp} is invalid: {reason}")]
    BadPath {
        cusp: usize,
        name: String,
        reason: String,
    },
    #[error("peripheral curves on cusp {cusp} do not form a homology basis")]
    NotBasis { cusp: usize },
    #[error("malformed triangulation document: {0}")]
    Malformed(String),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("sigma template: {0}")]
    Template(String),
    #[error("holonomy target for cusp {0} is zero")]
    ZeroTarget(usize),
    #[error("holonomy constraint violated on cusp {cusp}: {reason}")]
    Holonomy { cusp: usize, reason: String },
    #[error("gcd(r, s) != 1 for filling {r}/{s}")]
    NotCoprime { r: i64, s: i64 },
    #[error("log data incompatible with sigma: {0}")]
    Incongruent(String),
    #[error("gauge value at vertex {0} is zero")]
    ZeroGauge(usize),
    #[error("degenerate cross-ratio at tetrahedron {0}")]
    Degenerate(usize),
    #[error("solver found no solution")]
    NoSolution,
    #[error("path is not normal: {0}")]
    NotNormal(String),
    #[error("resultant: {0}")]
    Resultant(String),
    #[error("unsupported shape: {0}")]
    Unsupported(String),
    #[error("empty candidate list")]
    Empty,
    #[error("invalid filling vector: {0}")]
    Filling(String),
}
