use alloc::string::String;
use core::fmt;

use crate::config::ClassId;
use crate::dataset::ValidationReport;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A class has no labeled samples to build a prototype from.
    EmptySamples,
    /// Cosine similarity against a zero-norm vector is undefined.
    DegenerateVector,
    DimensionMismatch { expected: usize, got: usize },
    /// A class was referenced before its introduction session.
    ClassUnseen { class: ClassId, session: usize },
    EmptyTestSet,
    EmptyBank,
    /// Covariance is undefined for a class with fewer than two samples.
    SingletonClass(ClassId),
    /// Sphere rejection sampling could not place all class means.
    PackingInfeasible,
    ZeroTrials,
    InvalidConfig(String),
    InvalidDataset(ValidationReport),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySamples => write!(f, "no labeled samples for class"),
            Error::DegenerateVector => write!(f, "degenerate vector (zero norm)"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::ClassUnseen { class, session } => {
                write!(f, "class {} unseen at session {session}", class.0)
            }
            Error::EmptyTestSet => write!(f, "no test samples"),
            Error::EmptyBank => write!(f, "prototype bank is empty"),
            Error::SingletonClass(c) => {
                write!(f, "covariance undefined for singleton class {}", c.0)
            }
            Error::PackingInfeasible => {
                write!(f, "packing infeasible; increase dim or radius")
            }
            Error::ZeroTrials => write!(f, "trials must be positive"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InvalidDataset(report) => {
                write!(f, "dataset failed validation: ")?;
                match report.violations.first() {
                    Some(v) => write!(f, "{v}"),
                    None => write!(f, "(no detail)"),
                }
            }
        }
    }
}

impl core::error::Error for Error {}
