//! Guarded edit predicates and the split, collapse and flip passes.

mod passes;
mod predicates;

use std::collections::BTreeMap;

use serde::Serialize;

pub use passes::{run_collapse_pass, run_flip_pass, run_split_pass, valence_energy, MAX_SPLIT_GENERATIONS};
pub use predicates::{dihedral_angle, should_collapse, should_flip, should_split};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EditReason {
    Ok,
    LengthNotTriggered,
    ObtuseAdjacent,
    BoundaryEndpoint,
    DegreeExceeded,
    LinkCondition,
    NewObtuse,
    DihedralExceeded,
    NoValenceGain,
    TopologyBlocked,
    GeometryFold,
    /// A collapse would leave an edge longer than the split threshold.
    CreatesLongEdge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EditDecision {
    pub allowed: bool,
    pub reason: EditReason,
}

impl EditDecision {
    pub const OK: Self = Self {
        allowed: true,
        reason: EditReason::Ok,
    };

    pub fn blocked(reason: EditReason) -> Self {
        debug_assert_ne!(reason, EditReason::Ok);
        Self {
            allowed: false,
            reason,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PassKind {
    Split,
    Collapse,
    Flip,
    Smooth,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PassStats {
    pub kind: PassKind,
    /// Candidates examined; equals `performed` plus all blocked counts.
    pub candidates: usize,
    pub performed: usize,
    pub blocked: BTreeMap<EditReason, usize>,
    /// Queued candidates that no longer existed when their turn came.
    pub stale_skipped: usize,
    /// Smoothing only: vertices whose surface projection failed.
    pub projection_failures: usize,
    pub wall_time_s: f64,
}

impl PassStats {
    pub fn new(kind: PassKind) -> Self {
        Self {
            kind,
            candidates: 0,
            performed: 0,
            blocked: BTreeMap::new(),
            stale_skipped: 0,
            projection_failures: 0,
            wall_time_s: 0.0,
        }
    }

    pub fn record(&mut self, decision: EditDecision) {
        self.candidates += 1;
        if decision.allowed {
            self.performed += 1;
        } else {
            *self.blocked.entry(decision.reason).or_default() += 1;
        }
    }

    pub fn blocked_by(&self, reason: EditReason) -> usize {
        self.blocked.get(&reason).copied().unwrap_or(0)
    }

    pub fn total_blocked(&self) -> usize {
        self.blocked.values().sum()
    }
}
