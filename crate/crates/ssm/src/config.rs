//! Named numerical tolerances, overridable per analysis run.

use std::collections::BTreeMap;

use crate::error::{Result, SsmError};

/// All thresholds used by the numerical pipeline. Every field can be
/// overridden by name through [`Tolerances::set`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Hermiticity residual, relative to max(1, ‖A‖_F).
    pub herm: f64,
    /// Allowed negative eigenvalue magnitude for PSD inputs, relative.
    pub psd: f64,
    /// Orthonormality residual for isometries and projectors.
    pub unit: f64,
    /// Eigendecomposition reconstruction residual, relative.
    pub eig: f64,
    /// Relative singular-value cutoff for numerical nullspaces.
    pub nullspace: f64,
    /// Kraus completeness residual ‖Σ E†E − I‖_F.
    pub cptp: f64,
    /// Support cutoff relative to the largest eigenvalue of ρ₀.
    pub support: f64,
    /// Eigenvalue clustering gap, relative to max(1, ‖witness‖_F).
    pub cluster: f64,
    /// Proportionality residual for the spectrum-nondegeneracy test.
    pub prop: f64,
    /// Threshold on ‖Q_i P_j‖_F for block detection.
    pub nonzero: f64,
    /// Steadiness residual for fixed-point checks.
    pub steady: f64,
    /// Cauchy–Schwarz equality margin for scalar-multiple deduplication.
    pub dedup: f64,
    /// Drop tolerance for rank-revealing orthonormalization.
    pub drop: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-9,
            psd: 1e-9,
            unit: 1e-10,
            eig: 1e-10,
            nullspace: 1e-10,
            cptp: 1e-8,
            support: 1e-10,
            cluster: 1e-8,
            prop: 1e-8,
            nonzero: 1e-8,
            steady: 1e-8,
            dedup: 1e-10,
            drop: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "herm" => &mut self.herm,
            "psd" => &mut self.psd,
            "unit" => &mut self.unit,
            "eig" => &mut self.eig,
            "nullspace" => &mut self.nullspace,
            "cptp" => &mut self.cptp,
            "support" => &mut self.support,
            "cluster" => &mut self.cluster,
            "prop" => &mut self.prop,
            "nonzero" => &mut self.nonzero,
            "steady" => &mut self.steady,
            "dedup" => &mut self.dedup,
            "drop" => &mut self.drop,
            other => return Err(SsmError::UnknownTolerance(other.to_string())),
        };
        *slot = value;
        Ok(())
    }

    pub fn with_overrides(mut self, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        for (name, value) in overrides {
            self.set(name, *value)?;
        }
        Ok(self)
    }

    /// Name → value view, used for report provenance.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("herm".into(), self.herm);
        m.insert("psd".into(), self.psd);
        m.insert("unit".into(), self.unit);
        m.insert("eig".into(), self.eig);
        m.insert("nullspace".into(), self.nullspace);
        m.insert("cptp".into(), self.cptp);
        m.insert("support".into(), self.support);
        m.insert("cluster".into(), self.cluster);
        m.insert("prop".into(), self.prop);
        m.insert("nonzero".into(), self.nonzero);
        m.insert("steady".into(), self.steady);
        m.insert("dedup".into(), self.dedup);
        m.insert("drop".into(), self.drop);
        m
    }
}
