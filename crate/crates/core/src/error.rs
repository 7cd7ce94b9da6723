use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("oscillator index {n} exceeds cap {max}")]
    IndexBounds { n: usize, max: usize },

    #[error("non-finite argument to {func}")]
    Domain { func: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("quadratic form not positive definite: kx*ky = {kxky} <= g^2 = {g2}")]
    NotDefinite { kxky: f64, g2: f64 },

    #[error("photon ({cluster}, {photon}): {source}")]
    Photon {
        cluster: usize,
        photon: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("Hamiltonian not diagonalizable: kappa = {kappa}, lambda = {lambda}")]
    NonDiagonalizable { kappa: f64, lambda: f64 },

    #[error("energy-level factor {factor} = {value} is negative on branch {branch}; switch the sign selector")]
    Branch { factor: &'static str, value: f64, branch: char },

    #[error("quadrature did not converge: relative change {change:e} on node doubling")]
    Accuracy { change: f64 },

    #[error("coefficients not normalized: sum |U|^2 = {0}")]
    Normalization(f64),

    #[error("probe ({x}, {y}) outside grid")]
    Probe { x: f64, y: f64 },

    #[error("series of length {len} shorter than window {window}")]
    Length { len: usize, window: usize },

    #[error("degenerate envelope: {which} sample {index} = {value:e} below floor")]
    DegenerateEnvelope { which: &'static str, index: usize, value: f64 },

    #[error("densities have disjoint supports")]
    EmptyProduct,

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("Gaussian variance is zero; distribution is atomic, use the mass function")]
    Atomic,

    #[error("infinite capacity: zero noise power with positive signal")]
    InfiniteCapacity,

    #[error("negative discriminant {disc:e}; chi must not exceed {chi_max}")]
    Regime { disc: f64, chi_max: f64 },

    #[error("density not normalized: total probability {0}")]
    DensityNotNormalized(f64),
}
