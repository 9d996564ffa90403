use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyMapError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("component {component} has a nonzero constant term; a germ must vanish at the origin")]
    ConstantTerm { component: usize },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("suspension order must be at least 2, got {0}")]
    SuspensionOrder(u32),
    #[error("unknown germ `{0}`")]
    UnknownGerm(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("invalid annulus bounds: need 0 < inner < outer, got [{inner}, {outer}]")]
    InvalidAnnulus { inner: f64, outer: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("no point of the link found on the sphere of radius {eps}")]
    NoSeed { eps: f64 },
    #[error("step size collapsed below {h_min:e} near {point:?} (smallest singular value {sigma_min:e})")]
    StepCollapse {
        point: [f64; 4],
        h_min: f64,
        sigma_min: f64,
    },
    #[error("the curve is singular at {point:?} (smallest singular value {sigma_min:e})")]
    Singular { point: [f64; 4], sigma_min: f64 },
    #[error("loop did not close within {0} steps")]
    MaxSteps(usize),
    #[error("the map must have 4 variables, got {0}")]
    NotFourVariables(usize),
    #[error("invalid radius {0}")]
    InvalidRadius(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("point lies on the link (|f| = {modulus:e}), the phase is undefined")]
    OnLink { modulus: f64 },
    #[error("sample lies on the branch locus (|f| = {modulus:e})")]
    OnBranchLocus { modulus: f64 },
    #[error("link does not belong to this germ: {0}")]
    Mismatch(String),
    #[error("suspension order must be at least 2, got {0}")]
    Order(u32),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KnotError {
    #[error("projection pole is too close to the curve (distance {distance:e})")]
    PoleTooClose { distance: f64 },
    #[error("no generic projection direction found after {0} attempts")]
    NotGeneric(usize),
    #[error("planar diagram is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("malformed PD code: {0}")]
    Malformed(String),
}
