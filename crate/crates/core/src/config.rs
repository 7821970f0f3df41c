//! Tolerances and suite settings, gathered in one serialisable record.

use crate::fock::{DEFAULT_DIM, DEFAULT_TAIL_BOUND};
use crate::mutation::Mutation;
use crate::params::{Constants, SATURATION_TOL};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub roundtrip: f64,
    pub saturation_identity: f64,
    pub saturation_input: f64,
    pub angle_identity: f64,
    pub f_symmetry: f64,
    pub phi_psi: f64,
    pub vis1: f64,
    pub bch_block: f64,
    pub operator_identity: f64,
    pub defining_residual: f64,
    pub probe_residual_min: f64,
    pub sr_saturating: f64,
    pub sr_positive: f64,
    pub sr_probe: f64,
    pub moments_fock: f64,
    pub wf_forms: f64,
    pub wf_synthesis: f64,
    pub wf_normalization: f64,
    pub phase_anchor: f64,
    pub coherent_modulus: f64,
    pub overlap_triangle: f64,
    pub overlap_forms: f64,
    pub reproducing_coherent: f64,
    pub reproducing_squeezed: f64,
    pub resolution: f64,
    pub mu_identity: f64,
    pub kernel_reconstruction: f64,
    pub tail_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            roundtrip: 1e-12,
            saturation_identity: 1e-12,
            saturation_input: SATURATION_TOL,
            angle_identity: 1e-12,
            f_symmetry: 1e-12,
            phi_psi: 1e-12,
            vis1: 1e-10,
            bch_block: 1e-9,
            operator_identity: 1e-10,
            defining_residual: 1e-7,
            probe_residual_min: 0.1,
            sr_saturating: 1e-8,
            sr_positive: 1e-10,
            sr_probe: 1e-10,
            moments_fock: 1e-8,
            wf_forms: 1e-12,
            wf_synthesis: 1e-8,
            wf_normalization: 1e-10,
            phase_anchor: 1e-10,
            coherent_modulus: 1e-12,
            overlap_triangle: 1e-8,
            overlap_forms: 1e-12,
            reproducing_coherent: 1e-8,
            reproducing_squeezed: 1e-6,
            resolution: 1e-5,
            mu_identity: 1e-4,
            kernel_reconstruction: 1e-8,
            tail_bound: DEFAULT_TAIL_BOUND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub constants: Constants,
    /// Truncation N for operator identities; state-based checks use 2N.
    pub fock_dim: usize,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Glob over check ids, e.g. `params.*`.
    pub only: Option<String>,
    /// Deliberate corruption to inject (canary runs only).
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            constants: Constants::default(),
            fock_dim: DEFAULT_DIM,
            tolerances: Tolerances::default(),
            seed: 20_240_917,
            only: None,
            mutation: None,
        }
    }
}

impl SuiteConfig {
    pub fn state_dim(&self) -> usize {
        2 * self.fock_dim
    }
}
