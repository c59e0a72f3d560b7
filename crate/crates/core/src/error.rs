use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown {kind} `{name}`")]
    UnknownName {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("line {line}: duplicate {kind} `{name}`")]
    Duplicate {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("edge `{edge}` does not join a black and a white vertex")]
    NotBipartite { edge: String },
    #[error("rotation at vertex `{vertex}` does not list its incident edges exactly once")]
    RotationMismatch { vertex: String },
    #[error("vertex `{vertex}` has no rotation line")]
    MissingRotation { vertex: String },
    #[error("vertex `{vertex}` has degree {degree}; degree at least 2 is required")]
    DegreeTooSmall { vertex: String, degree: usize },
    #[error("the tiling graph is disconnected")]
    Disconnected,
    #[error("the tiling has no vertices")]
    Empty,
    #[error("Euler characteristic {0} is odd; not a closed orientable surface")]
    OddEuler(i64),

    #[error("unknown arrow or edge `{0}`")]
    UnknownArrow(String),
    #[error("arrows {0} and {1} do not compose")]
    NotComposable(usize, usize),
    #[error("vertex {vertex} does not lie on face {face}")]
    VertexNotOnFace { vertex: usize, face: usize },

    #[error("walk left the developed patch (radius {radius}); develop with a larger radius")]
    PatchExhausted { radius: usize },
    #[error("development exceeded the patch cap of {cap} lifted faces")]
    PatchCap { cap: usize },
    #[error("development produced inconsistent identifications: {0}")]
    Development(String),

    #[error("no positive homogeneous grading: edges {uncovered:?} lie in no perfect matching")]
    NoGrading { uncovered: Vec<String> },
    #[error("resource limit hit: {0}")]
    Budget(String),
    #[error("symmetric difference is not a disjoint union of cycles")]
    NotCycles,
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("forcing contradiction while building the canonical dimer: {0}")]
    Forcing(String),
    #[error("canonical form certification failed: {0}")]
    Certification(String),
    #[error("height profile is not the height function of a module: {0}")]
    InvalidHeight(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("genus {0} is not supported here (torus only)")]
    GenusUnsupported(usize),
    #[error("trivial torus weight in the tangent space at fixed point {0}")]
    ZeroWeight(String),
    #[error("integer overflow in exact lattice arithmetic")]
    Overflow,
}

impl Error {
    /// True for errors that a larger budget or radius could cure.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::PatchExhausted { .. }
                | Error::PatchCap { .. }
                | Error::Budget(_)
                | Error::WindowTooSmall(_)
        )
    }
}
