use alloc::format;
use core::ops::Range;

use crate::error::{Error, Result};

/// A globally unique class identifier. Ids are contiguous in introduction
/// order: the base block `0..base_classes` first, then `way` ids per
/// incremental session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub usize);

impl core::fmt::Display for ClassId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shape of a (T+1)-session class-incremental protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolConfig {
    pub total_classes: usize,
    pub base_classes: usize,
    /// Number of incremental sessions T (sessions run 0..=T).
    pub sessions: usize,
    /// Classes per incremental session (N).
    pub way: usize,
    /// Labeled samples per incremental class (K).
    pub shot: usize,
    /// Feature dimension d.
    pub dim: usize,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_classes < 1 {
            return Err(Error::InvalidConfig("base_classes must be >= 1".into()));
        }
        if self.way < 1 || self.shot < 1 || self.dim < 1 {
            return Err(Error::InvalidConfig("way, shot, dim must be >= 1".into()));
        }
        if self.total_classes != self.base_classes + self.sessions * self.way {
            return Err(Error::InvalidConfig(format!(
                "total_classes {} != base_classes {} + sessions {} * way {}",
                self.total_classes, self.base_classes, self.sessions, self.way
            )));
        }
        Ok(())
    }

    /// Session in which `class` is introduced, or None if out of range.
    pub fn session_of(&self, class: ClassId) -> Option<usize> {
        if class.0 >= self.total_classes {
            return None;
        }
        if class.0 < self.base_classes {
            Some(0)
        } else {
            Some((class.0 - self.base_classes) / self.way + 1)
        }
    }

    /// Class ids introduced in `session`.
    pub fn class_range(&self, session: usize) -> Range<usize> {
        if session == 0 {
            0..self.base_classes
        } else {
            let start = self.base_classes + (session - 1) * self.way;
            start..start + self.way
        }
    }

    /// Number of classes seen after `session` has arrived.
    pub fn seen_classes(&self, session: usize) -> usize {
        self.base_classes + session * self.way
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyVariant {
    /// Static nearest-prototype classification; no updates.
    Baseline,
    /// Explore (top-R + threshold) and exploit with session-decayed beta.
    Exp2,
    /// Equal-weight average of the prototype and the whole-batch mean.
    Average,
    /// Explore as Exp2 but with a constant beta, no decay.
    Weight,
}

impl StrategyVariant {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyVariant::Baseline => "baseline",
            StrategyVariant::Exp2 => "exp2",
            StrategyVariant::Average => "average",
            StrategyVariant::Weight => "weight",
        }
    }
}

/// Strategy variant plus the explore/exploit hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub variant: StrategyVariant,
    /// Top-R cutoff for exploration (R).
    pub top_r: usize,
    /// Confidence threshold on cosine similarity.
    pub tau: f64,
    pub beta_base: f64,
    pub beta_inc: f64,
}

impl StrategyConfig {
    pub fn new(variant: StrategyVariant) -> Self {
        StrategyConfig {
            variant,
            top_r: 40,
            tau: 0.8,
            beta_base: 0.05,
            beta_inc: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_r < 1 {
            return Err(Error::InvalidConfig("R must be >= 1".into()));
        }
        if !(-1.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidConfig("tau must be in [-1, 1]".into()));
        }
        for (name, b) in [("beta_base", self.beta_base), ("beta_inc", self.beta_inc)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidConfig(format!("{name} must be in (0, 1)")));
            }
        }
        Ok(())
    }
}
