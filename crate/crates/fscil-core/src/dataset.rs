use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::config::{ClassId, ProtocolConfig};
use crate::error::Result;
use crate::feature::FeatureVector;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub feature: FeatureVector,
    pub label: ClassId,
}

/// A (T+1)-session partition of labeled train and test samples.
///
/// Test labels are retained for scoring only; strategies never see them.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionDataset {
    pub config: ProtocolConfig,
    /// train[t]: labeled samples arriving in session t.
    pub train: Vec<Vec<LabeledSample>>,
    /// test[t]: evaluation samples for session t (all seen classes).
    pub test: Vec<Vec<LabeledSample>>,
}

/// Outcome of non-fatal dataset validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl SessionDataset {
    /// Checks every structural invariant and reports the violations found.
    /// Never aborts; malformed inputs produce diagnostics, not panics.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let cfg = &self.config;

        if let Err(e) = cfg.validate() {
            violations.push(format!("config: {e}"));
        }
        let n_sessions = cfg.sessions + 1;
        if self.train.len() != n_sessions {
            violations.push(format!(
                "expected {n_sessions} train sessions, found {}",
                self.train.len()
            ));
        }
        if self.test.len() != n_sessions {
            violations.push(format!(
                "expected {n_sessions} test sessions, found {}",
                self.test.len()
            ));
        }
        if !violations.is_empty() {
            return ValidationReport { ok: false, violations };
        }

        for (t, samples) in self.train.iter().enumerate() {
            for s in samples {
                if s.feature.dim() != cfg.dim {
                    violations.push(format!(
                        "dimension: session {t} train sample of class {} has dim {}, expected {}",
                        s.label, s.feature.dim(), cfg.dim
                    ));
                    break;
                }
            }
            for s in samples {
                match cfg.session_of(s.label) {
                    None => {
                        violations.push(format!(
                            "class range: session {t} train label {} >= total_classes {}",
                            s.label, cfg.total_classes
                        ));
                        break;
                    }
                    // Contiguous-id rule makes cross-session label reuse a
                    // disjointness violation.
                    Some(home) if home != t => {
                        violations.push(format!(
                            "disjointness: class {} belongs to session {home} but appears in session {t} train set",
                            s.label
                        ));
                        break;
                    }
                    Some(_) => {}
                }
            }
        }

        // N-way K-shot: exactly K train samples per incremental class.
        for t in 1..=cfg.sessions {
            for id in cfg.class_range(t) {
                let count = self.train[t]
                    .iter()
                    .filter(|s| s.label == ClassId(id))
                    .count();
                if count != cfg.shot {
                    violations.push(format!(
                        "shot count: session {t} class {id} has {count} train samples, expected {}",
                        cfg.shot
                    ));
                }
            }
        }

        for (t, samples) in self.test.iter().enumerate() {
            let seen = cfg.seen_classes(t);
            for s in samples {
                if s.feature.dim() != cfg.dim {
                    violations.push(format!(
                        "dimension: session {t} test sample of class {} has dim {}, expected {}",
                        s.label, s.feature.dim(), cfg.dim
                    ));
                    break;
                }
            }
            for s in samples {
                if s.label.0 >= seen {
                    violations.push(format!(
                        "test label containment: session {t} test label {} not in seen classes 0..{seen}",
                        s.label
                    ));
                    break;
                }
            }
        }

        ValidationReport { ok: violations.is_empty(), violations }
    }

    /// FNV-1a hash over the config and every sample bit pattern; used as the
    /// dataset fingerprint echoed in reports.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        for v in [
            self.config.total_classes,
            self.config.base_classes,
            self.config.sessions,
            self.config.way,
            self.config.shot,
            self.config.dim,
        ] {
            h.write_u64(v as u64);
        }
        for split in [&self.train, &self.test] {
            for session in split {
                h.write_u64(session.len() as u64);
                for s in session {
                    h.write_u64(s.label.0 as u64);
                    for x in s.feature.as_slice() {
                        h.write_u64(x.to_bits());
                    }
                }
            }
        }
        h.finish()
    }

    /// All test features of session t, labels stripped.
    pub fn test_features(&self, session: usize) -> Vec<FeatureVector> {
        self.test[session].iter().map(|s| s.feature.clone()).collect()
    }

    /// Train samples of session t grouped by class, in class-id order.
    pub fn train_by_class(&self, session: usize) -> Result<Vec<(ClassId, Vec<&FeatureVector>)>> {
        let mut groups = Vec::new();
        for id in self.config.class_range(session) {
            let feats: Vec<&FeatureVector> = self.train[session]
                .iter()
                .filter(|s| s.label.0 == id)
                .map(|s| &s.feature)
                .collect();
            groups.push((ClassId(id), feats));
        }
        Ok(groups)
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }
    fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
    fn finish(&self) -> u64 {
        self.0
    }
}
