//! Certificates for the structural claims about tiles UPBs and their states.
//!
//! Every check returns a [`Certificate`] rather than a bool so that the
//! numbers behind a decision travel with it.

mod edge;
mod exhaustive;
mod seesaw;
mod structure;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use edge::check_edge;
pub use exhaustive::{check_unextendible_exhaustive, check_upb_unextendible, extendible_control_set};
pub use seesaw::{max_product_overlap, search_product_in_subspace, ProductSearch};
pub use structure::{
    check_cardinality_constraint, check_completeness, check_decomposition, check_decomposition_of,
    check_entangled_basis, check_extreme_rank4, check_extreme_rank4_state, check_member_count, check_orthogonality,
    check_ppt, check_pt_spectrum, check_rank, family_weights, mixture_min_pt_eigenvalue, mixture_scan,
    sample_probabilities, MixtureScan,
};

use crate::{Error, Result};

/// The tolerance ladder shared by all checks.
pub mod tol {
    /// Residuals of exact constructions.
    pub const CONSTRUCTION: f64 = 1e-12;
    /// Rank and spectral decisions.
    pub const SPECTRAL: f64 = 1e-9;
    /// Optimization objective counted as "found".
    pub const FOUND: f64 = 1e-8;
    /// Optimization objective counted as "absent".
    pub const ABSENT: f64 = 1e-6;
    /// Local support residual for the rank-4 extremality hypothesis.
    pub const SUPPORT: f64 = 1e-10;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// Whether a status rests on an exhaustive argument or on a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Proof,
    Evidence,
}

impl std::fmt::Display for Confidence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Confidence::Proof => "proof",
            Confidence::Evidence => "evidence",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: String,
    pub status: Status,
    pub confidence: Confidence,
    pub witnesses: Value,
    pub config: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Certificate {
    pub fn new(claim: impl Into<String>, status: Status, confidence: Confidence, witnesses: Value, config: Value) -> Self {
        Certificate { claim: claim.into(), status, confidence, witnesses, config, elapsed_ms: None }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Runs `f` and records its wall time on the certificate it returns.
    pub fn timed(f: impl FnOnce() -> Result<Certificate>) -> Result<Certificate> {
        let start = Instant::now();
        let mut cert = f()?;
        cert.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        Ok(cert)
    }

    pub fn witness(&self, key: &str) -> Option<&Value> {
        self.witnesses.get(key)
    }

    pub fn witness_f64(&self, key: &str) -> Option<f64> {
        self.witness(key).and_then(Value::as_f64)
    }
}

pub(crate) fn status_of(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Parameters of the alternating product-vector searches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub tol_converge: f64,
    pub tol_found: f64,
    pub tol_absent: f64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            restarts: 200,
            max_iters: 500,
            seed: 0,
            tol_converge: 1e-12,
            tol_found: tol::FOUND,
            tol_absent: tol::ABSENT,
        }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Argument("restarts must be at least 1".into()));
        }
        if self.tol_found.is_nan() || self.tol_found >= self.tol_absent {
            return Err(Error::Argument(format!(
                "tol_found ({}) must be below tol_absent ({})",
                self.tol_found, self.tol_absent
            )));
        }
        if self.tol_converge.is_nan() || self.tol_converge < 0.0 {
            return Err(Error::Argument("tol_converge must be non-negative".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain struct")
    }
}
