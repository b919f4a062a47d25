//! Security thresholds and verification suites.
//!
//! The grid sweeps the symmetric attack angle `θ ∈ [0, π/2]` and the attacked
//! fraction `λ ∈ [0, 1]`, scoring Bob's information `I_B` against Eve's
//! Holevo quantity `χ`. The tolerable error `e₀` is the smallest error rate
//! on the `I_B = χ` boundary.

mod grid;
mod model;
mod suites;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::protocols::ProtocolId;
use crate::Result;

pub use grid::{
    axes, build_grid, tolerable_error, GridCell, SecurityGrid, ThresholdResult, CSV_HEADER, E_TOLERANCE,
    LAMBDA_SEMANTICS, MIN_RESOLUTION,
};
pub use model::{
    error_rate, eve_information, AttackedModel, ChiScale, EveKnowledge, IbReading, Interpretation,
    CROSSINGS_PER_SYMBOL,
};
pub use suites::{
    duality_entropy_max, duality_suite, ghz, heisenberg_check, monogamy_suite, ng_oracle_report,
    printed_rho_double_prime, random_unitary, w_state, DualityReport, FamilyPoint, HeisenbergReport,
    MonogamyReport, OraclePoint, OracleReport, MIN_SAMPLES,
};

/// Pair protocols the grid covers.
pub const PAIR_PROTOCOLS: [ProtocolId; 6] = [
    ProtocolId::Pp,
    ProtocolId::Cl,
    ProtocolId::Dll,
    ProtocolId::PpGv,
    ProtocolId::ClGv,
    ProtocolId::DllGv,
];

/// Resolution used for the Bell-check threshold default.
pub const DEFAULT_THRESHOLD_RESOLUTION: usize = 50;
const FALLBACK_THRESHOLD: f64 = 0.11;

/// `e₀` of `protocol` under the default interpretation, computed once per
/// process. GV has no pair model and falls back to 11%.
pub fn default_bell_threshold(protocol: ProtocolId) -> f64 {
    static CACHE: [OnceLock<f64>; 7] = [const { OnceLock::new() }; 7];
    let slot = ProtocolId::ALL
        .iter()
        .position(|&p| p == protocol)
        .expect("known id");
    *CACHE[slot].get_or_init(|| {
        build_grid(protocol, DEFAULT_THRESHOLD_RESOLUTION, Interpretation::default())
            .and_then(|g| tolerable_error(&g))
            .map(|t| t.e0)
            .unwrap_or(FALLBACK_THRESHOLD)
    })
}

/// Threshold under one interpretation, or the reason there is none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantThreshold {
    pub interpretation: Interpretation,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<ThresholdResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// `e₀` for every interpretation variant of one protocol.
pub fn threshold_variants(protocol: ProtocolId, resolution: usize) -> Result<Vec<VariantThreshold>> {
    Interpretation::variants()
        .into_iter()
        .map(|interp| {
            let grid = build_grid(protocol, resolution, interp)?;
            let (result, error) = match tolerable_error(&grid) {
                Ok(t) => (Some(t), None),
                Err(crate::Error::NoThreshold) => (None, Some("no finite threshold".to_string())),
                Err(e) => return Err(e),
            };
            Ok(VariantThreshold {
                interpretation: interp,
                label: interp.label(),
                result,
                error,
            })
        })
        .collect()
}
