//! Orchestration of a full (T+1)-session run: prototype extension, strategy
//! invocation, and metric computation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::config::{ClassId, StrategyConfig};
use crate::dataset::SessionDataset;
use crate::error::{Error, Result};
use crate::exp2::{run_session_inference, InferenceOptions};
use crate::prototype::{compute_prototype, PrototypeBank, PrototypeEntry};

/// Metrics and diagnostics of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionReport {
    pub session: usize,
    pub overall_accuracy: f64,
    /// Accuracy over samples whose true class arrived in an incremental
    /// session; absent when the session has no such samples.
    pub incremental_accuracy: Option<f64>,
    pub n_test: usize,
    pub n_test_incremental: usize,
    /// Per-class prototype movement ||w_after - w_before|| within the session.
    pub drift: BTreeMap<ClassId, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub sessions: Vec<SessionReport>,
    pub strategy: StrategyConfig,
    pub dataset_fingerprint: u64,
    pub seed: u64,
}

/// A finished run: the report plus the final classifier bank.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub report: ProtocolReport,
    pub bank: PrototypeBank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub inference: InferenceOptions,
    /// Echoed into the report; the protocol itself is deterministic.
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { inference: InferenceOptions::default(), seed: 0 }
    }
}

/// Fraction of exact label matches.
pub fn overall_accuracy(predictions: &[ClassId], labels: &[ClassId]) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != labels.len() {
        return Err(Error::EmptyTestSet);
    }
    let correct = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(correct as f64 / predictions.len() as f64)
}

/// Accuracy restricted to samples whose true label is incremental
/// (id >= base_class_count); None when no such samples exist.
pub fn incremental_accuracy(
    predictions: &[ClassId],
    labels: &[ClassId],
    base_class_count: usize,
) -> Option<f64> {
    let mut n = 0usize;
    let mut correct = 0usize;
    for (p, l) in predictions.iter().zip(labels) {
        if l.0 >= base_class_count {
            n += 1;
            if p == l {
                correct += 1;
            }
        }
    }
    if n == 0 {
        None
    } else {
        Some(correct as f64 / n as f64)
    }
}

/// Extend the bank with prototypes for the classes arriving in `session`.
pub fn extend_bank(
    bank: &mut PrototypeBank,
    dataset: &SessionDataset,
    session: usize,
) -> Result<()> {
    for (class_id, feats) in dataset.train_by_class(session)? {
        if feats.is_empty() {
            return Err(Error::EmptySamples);
        }
        let owned: Vec<_> = feats.iter().map(|f| (*f).clone()).collect();
        let weight = compute_prototype(&owned)?;
        bank.insert(
            class_id,
            PrototypeEntry { weight, intro_session: session, labeled_count: feats.len() },
        );
    }
    Ok(())
}

/// Run all sessions: extend the bank from the session's train set, run
/// strategy inference on its test set, and score against hidden labels.
/// Bank state (including exploit updates) carries across sessions.
pub fn run_protocol(
    dataset: &SessionDataset,
    strategy: &StrategyConfig,
    options: &RunOptions,
) -> Result<ProtocolOutcome> {
    strategy.validate()?;
    let validation = dataset.validate();
    if !validation.ok {
        return Err(Error::InvalidDataset(validation));
    }
    let cfg = &dataset.config;
    let mut bank = PrototypeBank::new();
    let mut sessions = Vec::with_capacity(cfg.sessions + 1);

    for t in 0..=cfg.sessions {
        extend_bank(&mut bank, dataset, t)?;
        let pre: BTreeMap<ClassId, crate::feature::FeatureVector> = bank
            .iter()
            .map(|(id, e)| (*id, e.weight.clone()))
            .collect();

        let batch = dataset.test_features(t);
        let predictions =
            run_session_inference(&mut bank, &batch, strategy, t, cfg, &options.inference)?;

        let drift: BTreeMap<ClassId, f64> = bank
            .iter()
            .map(|(id, e)| {
                let d = e.weight.squared_distance(&pre[id]).unwrap_or(f64::NAN);
                (*id, libm::sqrt(d))
            })
            .collect();

        let labels: Vec<ClassId> = dataset.test[t].iter().map(|s| s.label).collect();
        let n_test = labels.len();
        let n_test_incremental = labels.iter().filter(|l| l.0 >= cfg.base_classes).count();
        sessions.push(SessionReport {
            session: t,
            overall_accuracy: overall_accuracy(&predictions, &labels)?,
            incremental_accuracy: incremental_accuracy(&predictions, &labels, cfg.base_classes),
            n_test,
            n_test_incremental,
            drift,
        });
    }

    Ok(ProtocolOutcome {
        report: ProtocolReport {
            sessions,
            strategy: *strategy,
            dataset_fingerprint: dataset.fingerprint(),
            seed: options.seed,
        },
        bank,
    })
}
