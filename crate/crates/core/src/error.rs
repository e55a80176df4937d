use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid descriptor: {0}")]
    Descriptor(#[from] DescriptorError),
    #[error("{0}")]
    Domain(String),
    #[error("step budget of {0} steps exhausted before reaching the endpoint")]
    StepBudget(usize),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("unknown point id {0}")]
    UnknownPoint(usize),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// The first violated descriptor invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescriptorError {
    #[error("genus: expected genus >= 2, got {0}")]
    Genus(i64),
    #[error("curve count: genus {genus} needs {expected} curves, got {found}")]
    CurveCount {
        genus: u32,
        expected: usize,
        found: usize,
    },
    #[error("pants index: curve {curve} ends on pants {pants}, but only {pants_count} pants exist")]
    PantsIndex {
        curve: String,
        pants: usize,
        pants_count: usize,
    },
    #[error("duplicate id: curve id {0} appears more than once")]
    DuplicateId(String),
    #[error("length: curve {curve} has length {length}, expected a positive finite value")]
    Length { curve: String, length: f64 },
    #[error("degree: pants {pants} has degree {degree}, expected 3")]
    Degree { pants: usize, degree: usize },
    #[error("connectivity: pants graph has {components} components")]
    Disconnected { components: usize },
}

impl DescriptorError {
    /// Name of the violated invariant.
    pub fn invariant(&self) -> &'static str {
        match self {
            DescriptorError::Genus(_) => "genus",
            DescriptorError::CurveCount { .. } => "curve count",
            DescriptorError::PantsIndex { .. } => "pants index",
            DescriptorError::DuplicateId(_) => "duplicate id",
            DescriptorError::Length { .. } => "length",
            DescriptorError::Degree { .. } => "degree",
            DescriptorError::Disconnected { .. } => "connectivity",
        }
    }
}
