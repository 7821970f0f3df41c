//! Deliberate formula corruptions used as canaries by the verification suite.
//!
//! Each variant switches one closed form to a wrong version; a healthy suite
//! must report at least one failing check for every variant.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Sign of the Gaussian quadratic form in the squeezed overlap flipped.
    OverlapGaussianSign,
    /// θ̄₊ moved to the neighbouring branch (shifted by 2π) in the wavefunction phase.
    ThetaBarBranch,
    /// Wavefunction missing its e^{−iq₀p₀/(2ħ)} factor.
    MissingShiftPhase,
    /// ρ₊ and ρ₋ exchanged in the derived angles.
    SwappedRho,
    /// Squeezed overlap missing its (1−ζ̄₂ζ₁)^{−1/2} prefactor.
    DroppedOverlapPrefactor,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::OverlapGaussianSign,
        Mutation::ThetaBarBranch,
        Mutation::MissingShiftPhase,
        Mutation::SwappedRho,
        Mutation::DroppedOverlapPrefactor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::OverlapGaussianSign => "overlap_gaussian_sign",
            Mutation::ThetaBarBranch => "theta_bar_branch",
            Mutation::MissingShiftPhase => "missing_shift_phase",
            Mutation::SwappedRho => "swapped_rho",
            Mutation::DroppedOverlapPrefactor => "dropped_overlap_prefactor",
        }
    }
}

#[inline]
pub(crate) fn is(m: Option<Mutation>, which: Mutation) -> bool {
    m == Some(which)
}
