use serde::Serialize;

use crate::consistency::WeightingScheme;
use crate::error::{Error, Result};

/// Parameters of a remeshing run. Angles are stored in degrees.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemeshConfig {
    pub target_length: f64,
    pub split_factor: f64,
    pub collapse_factor: f64,
    pub obtuse_threshold_deg: f64,
    pub max_degree: usize,
    pub dihedral_eps_deg: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub angle_opt_enabled: bool,
    pub mls_enabled: bool,
    pub weighting: WeightingScheme,
    /// MLS bandwidth as a multiple of the input's average edge length.
    pub bandwidth_factor: f64,
}

impl Default for RemeshConfig {
    fn default() -> Self {
        Self {
            target_length: 1.0,
            split_factor: 4.0 / 3.0,
            collapse_factor: 4.0 / 5.0,
            obtuse_threshold_deg: 90.0,
            max_degree: 6,
            dihedral_eps_deg: 20.0,
            lambda: 0.5,
            iterations: 10,
            angle_opt_enabled: true,
            mls_enabled: true,
            weighting: WeightingScheme::Area,
            bandwidth_factor: 0.5,
        }
    }
}

impl RemeshConfig {
    pub fn with_target_length(target_length: f64) -> Self {
        Self {
            target_length,
            ..Self::default()
        }
    }

    pub fn split_length(&self) -> f64 {
        self.split_factor * self.target_length
    }

    pub fn collapse_length(&self) -> f64 {
        self.collapse_factor * self.target_length
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.target_length.is_finite() && self.target_length > 0.0) {
            return bad("target length must be positive");
        }
        if !(self.split_factor > 1.0 && self.split_factor.is_finite()) {
            return bad("split factor must exceed 1");
        }
        if !(self.collapse_factor > 0.0 && self.collapse_factor < 1.0) {
            return bad("collapse factor must lie in (0, 1)");
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return bad("lambda must lie in (0, 1]");
        }
        if !(self.dihedral_eps_deg > 0.0 && self.dihedral_eps_deg < 180.0) {
            return bad("dihedral epsilon must lie in (0, 180) degrees");
        }
        if !(self.obtuse_threshold_deg > 0.0 && self.obtuse_threshold_deg < 180.0) {
            return bad("obtuse threshold must lie in (0, 180) degrees");
        }
        if self.max_degree < 3 {
            return bad("max degree must be at least 3");
        }
        if !(self.bandwidth_factor > 0.0 && self.bandwidth_factor.is_finite()) {
            return bad("bandwidth factor must be positive");
        }
        Ok(())
    }
}
