use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A dense d-dimensional embedding vector. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("feature vector must be nonempty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("feature vector has non-finite entry".into()));
        }
        Ok(FeatureVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|v| v * v).sum())
    }

    pub fn dot(&self, other: &FeatureVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn squared_distance(&self, other: &FeatureVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(squared_distance(&self.0, &other.0))
    }

    pub(crate) fn check_dim(&self, other: &FeatureVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Component-wise mean of a nonempty, dimension-uniform set of vectors.
pub(crate) fn mean_of(vectors: &[&FeatureVector]) -> Result<FeatureVector> {
    let first = vectors.first().ok_or(Error::EmptySamples)?;
    let dim = first.dim();
    let mut acc = alloc::vec![0.0f64; dim];
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        for (a, x) in acc.iter_mut().zip(v.as_slice()) {
            *a += x;
        }
    }
    let n = vectors.len() as f64;
    for a in acc.iter_mut() {
        *a /= n;
    }
    FeatureVector::new(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_empty() {
        assert!(FeatureVector::new(alloc::vec![]).is_err());
        assert!(FeatureVector::new(alloc::vec![1.0, f64::NAN]).is_err());
        assert!(FeatureVector::new(alloc::vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn norm_and_distance() {
        let a = FeatureVector::new(alloc::vec![3.0, 4.0]).unwrap();
        let b = FeatureVector::new(alloc::vec![0.0, 0.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.squared_distance(&b).unwrap(), 25.0);
    }

    #[test]
    fn dimension_mismatch() {
        let a = FeatureVector::new(alloc::vec![1.0]).unwrap();
        let b = FeatureVector::new(alloc::vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            a.dot(&b),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }
}
