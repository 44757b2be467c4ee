// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Gate constructions and their error metrics.

use crate::quantum::{fidelity, DensityMatrix, StateVector};
use crate::Result;

pub mod cphase;
pub mod full_model;
pub mod phase;
pub mod transfer;

pub use cphase::{
    cphase_spin_echo_error, logical_phase_extract, CphaseSpec, FlipMode, TransferMode,
};
pub use full_model::{
    dispersive_convergence, transfer_full_model_error, ConvergencePoint, FullModelReport,
};
pub use phase::{phase_gate_time, simulate_phase_gate, PhaseSpec};
pub use transfer::{transfer_error_quasistatic, transfer_gate_error, TransferSpec};

/// Fidelity of one input state against its ideal output.
#[derive(Clone, Debug, PartialEq)]
pub struct InputFidelity {
    pub label: String,
    pub fidelity: f64,
}

/// Outcome of a gate simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct GateErrorReport {
    pub per_input: Vec<InputFidelity>,
    /// The headline error (definition depends on the gate).
    pub primary_error: f64,
    /// Mean of `1 − F` over `per_input`.
    pub average_error: f64,
    /// Standard error of `primary_error` for Monte Carlo estimates.
    pub std_error: Option<f64>,
    /// Parameters the result was computed from (angular units).
    pub metadata: Vec<(String, f64)>,
    pub seed: Option<u64>,
}

impl GateErrorReport {
    pub(crate) fn new(per_input: Vec<InputFidelity>, primary_error: f64) -> Self {
        let average_error = if per_input.is_empty() {
            primary_error
        } else {
            per_input
                .iter()
                .map(|p| error_from_fidelity(p.fidelity))
                .sum::<f64>()
                / per_input.len() as f64
        };
        Self {
            per_input,
            primary_error,
            average_error,
            std_error: None,
            metadata: Vec::new(),
            seed: None,
        }
    }

    pub fn fidelity_of(&self, label: &str) -> Option<f64> {
        self.per_input
            .iter()
            .find(|p| p.label == label)
            .map(|p| p.fidelity)
    }

    pub fn meta(&self, key: &str) -> Option<f64> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
    }
}

/// `1 − F` clipped to `[0, 1]` (roundoff can push F slightly above 1).
pub fn error_from_fidelity(f: f64) -> f64 {
    (1.0 - f).clamp(0.0, 1.0)
}

pub(crate) fn input_fidelity(
    label: &str,
    rho: &DensityMatrix,
    target: &StateVector,
) -> Result<InputFidelity> {
    Ok(InputFidelity {
        label: label.to_owned(),
        fidelity: fidelity(rho, target)?,
    })
}
