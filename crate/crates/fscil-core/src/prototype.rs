use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::config::ClassId;
use crate::error::{Error, Result};
use crate::feature::{mean_of, squared_distance, FeatureVector};

/// One class entry in the classifier bank.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeEntry {
    /// Classifier weight w_c: the (possibly updated) class mean estimate.
    pub weight: FeatureVector,
    pub intro_session: usize,
    /// Number of labeled samples the prototype was built from (Num_c).
    pub labeled_count: usize,
}

/// The classifier set W: one prototype per seen class, keyed by class id.
///
/// BTreeMap keeps iteration in ascending id order, which makes prediction
/// tie-breaks and report output deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrototypeBank {
    entries: BTreeMap<ClassId, PrototypeEntry>,
}

impl PrototypeBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, class: ClassId, entry: PrototypeEntry) {
        self.entries.insert(class, entry);
    }

    pub fn get(&self, class: ClassId) -> Option<&PrototypeEntry> {
        self.entries.get(&class)
    }

    pub fn set_weight(&mut self, class: ClassId, weight: FeatureVector) {
        if let Some(e) = self.entries.get_mut(&class) {
            e.weight = weight;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ClassId, &PrototypeEntry)> {
        self.entries.iter()
    }

    pub fn class_ids(&self) -> Vec<ClassId> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nearest prototype by squared Euclidean distance; exact ties resolve
    /// to the smallest class id.
    pub fn predict(&self, feature: &FeatureVector) -> Result<ClassId> {
        let mut best: Option<(ClassId, f64)> = None;
        for (id, entry) in &self.entries {
            entry.weight.check_dim(feature)?;
            let d = squared_distance(entry.weight.as_slice(), feature.as_slice());
            match best {
                Some((_, bd)) if d >= bd => {}
                _ => best = Some((*id, d)),
            }
        }
        best.map(|(id, _)| id).ok_or(Error::EmptyBank)
    }
}

/// Arithmetic mean of the labeled feature vectors of one class (Eq. 12).
pub fn compute_prototype(samples: &[FeatureVector]) -> Result<FeatureVector> {
    let refs: Vec<&FeatureVector> = samples.iter().collect();
    mean_of(&refs)
}

/// Cosine similarity, clamped to [-1, 1] against rounding overshoot.
pub fn cosine_similarity(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    let dot = a.dot(b)?;
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}
