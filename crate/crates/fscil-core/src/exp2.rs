//! Inference-time explore/exploit prototype updating.
//!
//! Exploration ranks the unlabeled test batch by cosine similarity to a
//! class prototype, keeps the top R (with ties at the cutoff), and filters
//! by a confidence threshold. Exploitation moves the prototype toward the
//! mean of the selected features by a session-decayed convex weight.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::config::{ClassId, ProtocolConfig, StrategyConfig, StrategyVariant};
use crate::error::{Error, Result};
use crate::feature::{mean_of, FeatureVector};
use crate::prototype::{cosine_similarity, PrototypeBank};

/// Outcome of exploration for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationResult {
    pub class_id: ClassId,
    /// The R-th highest similarity (minimum similarity when fewer than R
    /// samples exist; -inf for an empty batch).
    pub alpha: f64,
    /// Indices into the test batch passing both the top-R cutoff and tau.
    pub selected: Vec<usize>,
    /// Cosine similarity of every batch sample to the prototype.
    pub similarities: Vec<f64>,
}

/// Select the batch samples within the exploration boundary of one class:
/// similarity >= alpha (the R-th highest) and similarity > tau.
pub fn explore(
    class_id: ClassId,
    weight: &FeatureVector,
    test_features: &[FeatureVector],
    top_r: usize,
    tau: f64,
) -> Result<ExplorationResult> {
    if top_r < 1 {
        return Err(Error::InvalidConfig("R must be >= 1".into()));
    }
    let mut similarities = Vec::with_capacity(test_features.len());
    for f in test_features {
        similarities.push(cosine_similarity(weight, f)?);
    }
    if similarities.is_empty() {
        return Ok(ExplorationResult {
            class_id,
            alpha: f64::NEG_INFINITY,
            selected: Vec::new(),
            similarities,
        });
    }
    let mut sorted = similarities.clone();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let alpha = sorted[top_r.min(sorted.len()) - 1];
    let selected = similarities
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= alpha && s > tau)
        .map(|(i, _)| i)
        .collect();
    Ok(ExplorationResult {
        class_id,
        alpha,
        selected,
        similarities,
    })
}

/// Update degree for class c at session t: beta_base^(t+1) for base
/// classes, beta_inc^(t - floor((c - |C0|)/N)) for incremental classes.
pub fn beta_schedule(
    class_id: ClassId,
    session: usize,
    strategy: &StrategyConfig,
    protocol: &ProtocolConfig,
) -> Result<f64> {
    let intro = protocol
        .session_of(class_id)
        .ok_or(Error::ClassUnseen { class: class_id, session })?;
    if intro > session {
        return Err(Error::ClassUnseen { class: class_id, session });
    }
    if intro == 0 {
        Ok(libm::pow(strategy.beta_base, (session + 1) as f64))
    } else {
        // exponent = t - floor((c - |C0|)/N) = t - (intro - 1)
        Ok(libm::pow(strategy.beta_inc, (session - (intro - 1)) as f64))
    }
}

/// Convex-combination update of one prototype toward the mean of the
/// selected features. An empty selection returns the prototype unchanged.
pub fn exploit_update(
    weight: &FeatureVector,
    selected_features: &[&FeatureVector],
    beta: f64,
) -> Result<FeatureVector> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidConfig("beta must be in [0, 1)".into()));
    }
    if selected_features.is_empty() {
        return Ok(weight.clone());
    }
    let mean = mean_of(selected_features)?;
    weight.check_dim(&mean)?;
    let values = weight
        .as_slice()
        .iter()
        .zip(mean.as_slice())
        .map(|(w, m)| (1.0 - beta) * w + beta * m)
        .collect();
    FeatureVector::new(values)
}

/// Planned update for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassUpdate {
    pub beta: f64,
    /// Mean of the selected features; absent exactly when the exploration
    /// boundary is empty.
    pub mean_feature: Option<FeatureVector>,
}

/// The per-class updates of one batch, all computed against the same
/// prototype snapshot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UpdatePlan {
    pub updates: BTreeMap<ClassId, ClassUpdate>,
}

/// Compute the update plan for a batch with an explicit class visit order.
///
/// Every class is explored against the pre-batch snapshot of its prototype,
/// so the plan (and the bank after applying it) is identical for any
/// permutation of `order`.
pub fn plan_updates_with_order(
    bank: &PrototypeBank,
    batch: &[FeatureVector],
    strategy: &StrategyConfig,
    session: usize,
    protocol: &ProtocolConfig,
    order: &[ClassId],
) -> Result<UpdatePlan> {
    let mut plan = UpdatePlan::default();
    if matches!(strategy.variant, StrategyVariant::Baseline) {
        return Ok(plan);
    }
    for &class_id in order {
        let entry = bank
            .get(class_id)
            .ok_or(Error::ClassUnseen { class: class_id, session })?;
        let (beta, mean_feature) = match strategy.variant {
            StrategyVariant::Baseline => unreachable!(),
            StrategyVariant::Exp2 | StrategyVariant::Weight => {
                let beta = if matches!(strategy.variant, StrategyVariant::Exp2) {
                    beta_schedule(class_id, session, strategy, protocol)?
                } else if entry.intro_session == 0 {
                    strategy.beta_base
                } else {
                    strategy.beta_inc
                };
                let exploration =
                    explore(class_id, &entry.weight, batch, strategy.top_r, strategy.tau)?;
                let mean = if exploration.selected.is_empty() {
                    None
                } else {
                    let refs: Vec<&FeatureVector> =
                        exploration.selected.iter().map(|&i| &batch[i]).collect();
                    Some(mean_of(&refs)?)
                };
                (beta, mean)
            }
            StrategyVariant::Average => {
                // X_c = whole batch, equal-weight two-point average.
                let mean = if batch.is_empty() {
                    None
                } else {
                    let refs: Vec<&FeatureVector> = batch.iter().collect();
                    Some(mean_of(&refs)?)
                };
                (0.5, mean)
            }
        };
        plan.updates.insert(class_id, ClassUpdate { beta, mean_feature });
    }
    Ok(plan)
}

/// [`plan_updates_with_order`] over all bank classes in id order.
pub fn plan_updates(
    bank: &PrototypeBank,
    batch: &[FeatureVector],
    strategy: &StrategyConfig,
    session: usize,
    protocol: &ProtocolConfig,
) -> Result<UpdatePlan> {
    plan_updates_with_order(bank, batch, strategy, session, protocol, &bank.class_ids())
}

/// Commit a plan to the bank. Classes with an empty selection keep their
/// weight bit-identical.
pub fn apply_plan(bank: &mut PrototypeBank, plan: &UpdatePlan) -> Result<()> {
    for (&class_id, update) in &plan.updates {
        if let Some(mean) = &update.mean_feature {
            let entry = bank.get(class_id).ok_or(Error::ClassUnseen {
                class: class_id,
                session: 0,
            })?;
            let refs = [mean];
            let next = exploit_update(&entry.weight, &refs, update.beta)?;
            bank.set_weight(class_id, next);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferenceOptions {
    /// Process the test batch in chunks of this size, updating between
    /// chunks; 0 means one whole-session batch.
    pub chunk_size: usize,
    /// Whether explore/exploit also runs in the base session (t = 0).
    pub update_base_session: bool,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        InferenceOptions { chunk_size: 0, update_base_session: true }
    }
}

/// One session of inference: update the bank from the unlabeled batch per
/// the strategy, then predict every sample with the updated bank.
pub fn run_session_inference(
    bank: &mut PrototypeBank,
    batch: &[FeatureVector],
    strategy: &StrategyConfig,
    session: usize,
    protocol: &ProtocolConfig,
    options: &InferenceOptions,
) -> Result<Vec<ClassId>> {
    strategy.validate()?;
    let update_enabled = session > 0 || options.update_base_session;
    let chunk = if options.chunk_size == 0 { batch.len().max(1) } else { options.chunk_size };
    let mut predictions = Vec::with_capacity(batch.len());
    for chunk_feats in batch.chunks(chunk) {
        if update_enabled {
            let plan = plan_updates(bank, chunk_feats, strategy, session, protocol)?;
            apply_plan(bank, &plan)?;
        }
        for f in chunk_feats {
            predictions.push(bank.predict(f)?);
        }
    }
    Ok(predictions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prototype::PrototypeEntry;
    use alloc::vec;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    fn protocol() -> ProtocolConfig {
        ProtocolConfig {
            total_classes: 40,
            base_classes: 20,
            sessions: 5,
            way: 4,
            shot: 5,
            dim: 2,
        }
    }

    #[test]
    fn explore_tau_one_selects_nothing() {
        let batch = vec![fv(&[1.0, 0.0]), fv(&[2.0, 0.0]), fv(&[0.0, 1.0])];
        let r = explore(ClassId(0), &fv(&[1.0, 0.0]), &batch, 2, 1.0).unwrap();
        assert!(r.selected.is_empty());
    }

    #[test]
    fn explore_unconstrained_selects_all() {
        let batch = vec![fv(&[1.0, 0.0]), fv(&[0.0, 1.0]), fv(&[-1.0, 0.0])];
        let r = explore(ClassId(0), &fv(&[1.0, 1.0]), &batch, 10, -1.0).unwrap();
        assert_eq!(r.selected, vec![0, 1, 2]);
        // fewer samples than R: alpha is the minimum similarity
        let min = r.similarities.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(r.alpha, min);
    }

    #[test]
    fn explore_empty_batch_is_not_an_error() {
        let r = explore(ClassId(0), &fv(&[1.0, 0.0]), &[], 5, 0.5).unwrap();
        assert!(r.selected.is_empty());
    }

    #[test]
    fn explore_includes_ties_at_alpha() {
        // two copies of the cutoff vector: both pass the >= alpha rule
        let batch = vec![
            fv(&[1.0, 0.0]),
            fv(&[1.0, 0.1]),
            fv(&[1.0, 0.1]),
            fv(&[0.0, 1.0]),
        ];
        let r = explore(ClassId(0), &fv(&[1.0, 0.0]), &batch, 2, -1.0).unwrap();
        assert_eq!(r.selected, vec![0, 1, 2]);
    }

    #[test]
    fn beta_schedule_table() {
        let p = protocol();
        let s = StrategyConfig::new(StrategyVariant::Exp2);
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(beta_schedule(ClassId(0), 0, &s, &p).unwrap(), 0.05) <= 1e-12);
        assert!(rel(beta_schedule(ClassId(0), 3, &s, &p).unwrap(), 6.25e-6) <= 1e-12);
        // class 24 is introduced in session 2
        assert!(rel(beta_schedule(ClassId(24), 2, &s, &p).unwrap(), 0.3) <= 1e-12);
        assert!(rel(beta_schedule(ClassId(24), 4, &s, &p).unwrap(), 0.027) <= 1e-12);
    }

    #[test]
    fn beta_schedule_rejects_unseen_class() {
        let p = protocol();
        let s = StrategyConfig::new(StrategyVariant::Exp2);
        assert!(matches!(
            beta_schedule(ClassId(24), 1, &s, &p),
            Err(Error::ClassUnseen { .. })
        ));
    }

    #[test]
    fn beta_schedule_strictly_decreasing_in_session() {
        let p = protocol();
        let s = StrategyConfig::new(StrategyVariant::Exp2);
        for class in [ClassId(0), ClassId(21), ClassId(36)] {
            let intro = p.session_of(class).unwrap();
            let mut prev = f64::INFINITY;
            for t in intro..=p.sessions {
                let b = beta_schedule(class, t, &s, &p).unwrap();
                assert!(b < prev && b > 0.0 && b < 1.0);
                prev = b;
            }
        }
    }

    #[test]
    fn exploit_empty_selection_is_bit_identical() {
        let w = fv(&[1.0, 0.1 + 0.2]); // value with a non-trivial bit pattern
        let out = exploit_update(&w, &[], 0.3).unwrap();
        assert_eq!(out.as_slice()[1].to_bits(), w.as_slice()[1].to_bits());
    }

    #[test]
    fn exploit_convex_combination() {
        let w = fv(&[1.0, 0.0]);
        let v = fv(&[0.0, 1.0]);
        let out = exploit_update(&w, &[&v], 0.3).unwrap();
        assert_eq!(out, fv(&[0.7, 0.3]));
    }

    #[test]
    fn exploit_converges_geometrically_to_constant_mean() {
        let target = fv(&[2.0, -1.0, 0.5]);
        let mut w = fv(&[0.0, 0.0, 0.0]);
        let beta = 0.3;
        let initial: f64 = w.squared_distance(&target).unwrap();
        let initial = libm::sqrt(initial);
        for n in 1..=50 {
            w = exploit_update(&w, &[&target], beta).unwrap();
            let dist = libm::sqrt(w.squared_distance(&target).unwrap());
            let expected = libm::pow(1.0 - beta, n as f64) * initial;
            assert!((dist - expected).abs() <= 1e-9 * (1.0 + expected));
        }
    }

    fn two_class_bank() -> PrototypeBank {
        let mut bank = PrototypeBank::new();
        bank.insert(
            ClassId(0),
            PrototypeEntry { weight: fv(&[10.0, 0.0]), intro_session: 0, labeled_count: 5 },
        );
        bank.insert(
            ClassId(1),
            PrototypeEntry { weight: fv(&[0.0, 10.0]), intro_session: 0, labeled_count: 5 },
        );
        bank
    }

    #[test]
    fn baseline_never_touches_the_bank() {
        let mut bank = two_class_bank();
        let before = bank.clone();
        let strategy = StrategyConfig::new(StrategyVariant::Baseline);
        let batch = vec![fv(&[9.0, 1.0]), fv(&[1.0, 9.0])];
        let preds = run_session_inference(
            &mut bank, &batch, &strategy, 0, &protocol(), &InferenceOptions::default(),
        )
        .unwrap();
        assert_eq!(bank, before);
        assert_eq!(preds, vec![ClassId(0), ClassId(1)]);
    }

    #[test]
    fn exp2_with_tau_one_equals_baseline() {
        let batch = vec![fv(&[9.0, 1.0]), fv(&[1.0, 9.0]), fv(&[5.0, 5.0])];
        let mut baseline_bank = two_class_bank();
        let mut exp2_bank = two_class_bank();
        let baseline = StrategyConfig::new(StrategyVariant::Baseline);
        let mut exp2 = StrategyConfig::new(StrategyVariant::Exp2);
        exp2.tau = 1.0;
        let p1 = run_session_inference(
            &mut baseline_bank, &batch, &baseline, 0, &protocol(), &InferenceOptions::default(),
        )
        .unwrap();
        let p2 = run_session_inference(
            &mut exp2_bank, &batch, &exp2, 0, &protocol(), &InferenceOptions::default(),
        )
        .unwrap();
        assert_eq!(p1, p2);
        assert_eq!(baseline_bank, exp2_bank);
    }

    #[test]
    fn average_moves_every_prototype_halfway_to_batch_mean() {
        let mut bank = two_class_bank();
        let strategy = StrategyConfig::new(StrategyVariant::Average);
        let batch = vec![fv(&[2.0, 0.0]), fv(&[0.0, 2.0])];
        run_session_inference(
            &mut bank, &batch, &strategy, 0, &protocol(), &InferenceOptions::default(),
        )
        .unwrap();
        // batch mean = (1, 1); each prototype -> (w + mean) / 2
        assert_eq!(bank.get(ClassId(0)).unwrap().weight, fv(&[5.5, 0.5]));
        assert_eq!(bank.get(ClassId(1)).unwrap().weight, fv(&[0.5, 5.5]));
    }

    #[test]
    fn plan_is_order_independent() {
        let bank = two_class_bank();
        let strategy = StrategyConfig::new(StrategyVariant::Exp2);
        let batch = vec![fv(&[9.0, 1.0]), fv(&[1.0, 9.0]), fv(&[8.0, 2.0])];
        let fwd = plan_updates_with_order(
            &bank, &batch, &strategy, 0, &protocol(), &[ClassId(0), ClassId(1)],
        )
        .unwrap();
        let rev = plan_updates_with_order(
            &bank, &batch, &strategy, 0, &protocol(), &[ClassId(1), ClassId(0)],
        )
        .unwrap();
        assert_eq!(fwd, rev);
    }
}
