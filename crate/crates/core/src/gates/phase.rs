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

//! Single-qubit phase gate from a dispersively coupled junction on the
//! right resonator: `H = (g_r²/Δ_r) b†b`.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::lindblad::{build_liouvillian, Integrator};
use crate::quantum::DensityMatrix;

use super::transfer::TwoModes;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSpec {
    /// g_r (rad/s).
    pub coupling: f64,
    /// Δ_r (rad/s).
    pub detuning: f64,
    /// Relative phase to imprint (rad, nonnegative).
    pub phase: f64,
}

impl PhaseSpec {
    fn validate(&self) -> Result<()> {
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return invalid("phase gate coupling must be positive");
        }
        if !(self.detuning.is_finite() && self.detuning != 0.0) {
            return invalid("phase gate detuning must be finite and nonzero");
        }
        if !(self.phase >= 0.0 && self.phase.is_finite()) {
            return invalid("phase must be finite and nonnegative");
        }
        Ok(())
    }

    /// Shift rate g_r²/Δ_r (rad/s, signed).
    pub fn shift_rate(&self) -> f64 {
        self.coupling * self.coupling / self.detuning
    }
}

/// Gate time `phase·|Δ_r|/g_r²`.
pub fn phase_gate_time(spec: &PhaseSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.phase / spec.shift_rate().abs())
}

/// Evolves `rho` (on resonators A ⊗ B) under the phase Hamiltonian for
/// the gate time.
pub fn simulate_phase_gate(
    spec: &PhaseSpec,
    rho: &DensityMatrix,
    integrator: Integrator,
) -> Result<DensityMatrix> {
    let t = phase_gate_time(spec)?;
    let modes = TwoModes::new();
    let h = &(&modes.b.adjoint() * &modes.b) * spec.shift_rate();
    let l = build_liouvillian(&h, &[])?;
    integrator.evolve(&l, rho, t)
}

/// Phase of `|10⟩` relative to `|01⟩`, i.e. `arg ρ[10, 01]`, in (−π, π].
pub fn relative_phase(rho: &DensityMatrix) -> Result<f64> {
    let modes = TwoModes::new();
    if rho.space() != &modes.space {
        return Err(crate::Error::SpaceMismatch);
    }
    let i10 = modes.space.index_of(&[1, 0])?;
    let i01 = modes.space.index_of(&[0, 1])?;
    let c: Complex64 = rho.element(i10, i01);
    Ok(c.arg())
}

/// The one-photon superposition `(|10⟩ + |01⟩)/√2` on A ⊗ B.
pub fn phase_test_state() -> DensityMatrix {
    let modes = TwoModes::new();
    modes.inputs()[2].1.to_density_matrix()
}
