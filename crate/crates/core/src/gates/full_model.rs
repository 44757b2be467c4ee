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

//! Transfer through the coupler with the junction kept as a two-level
//! system, used to check the dispersive elimination.
//!
//! In the frame rotating at the resonator frequency,
//! `H = Δ|e⟩⟨e| + g[(a + b)σ⁺ + (a† + b†)σ⁻]`. Second-order elimination of
//! the coupler (initially in `|g⟩`) gives `−(g²/Δ)(a†b + ab† + a†a + b†b)`,
//! which is what the full model is compared against.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::device::{effective_dephasing_rate, induced_loss_rate};
use crate::error::{invalid, Result};
use crate::expm::expm;
use crate::lindblad::{build_liouvillian, LindbladTerm, Propagator};
use crate::quantum::{
    annihilation, embed, fidelity, projector, CMatrix, DensityMatrix, HilbertSpace, Operator,
    StateVector,
};

use super::transfer::{TransferSpec, TwoModes};
use super::{error_from_fidelity, GateErrorReport, InputFidelity};

/// Minimum number of samples used to locate the peak coupler excitation.
const MIN_PEAK_SAMPLES: usize = 2000;

/// Full-model transfer compared against the effective model.
#[derive(Clone, Debug, PartialEq)]
pub struct FullModelReport {
    /// Full-model errors; inputs are scored against the effective-model
    /// ideal unitary at the effective gate time.
    pub report: GateErrorReport,
    /// Primary error of the effective master equation at the same point.
    pub effective_error: f64,
    /// Effective-model fidelities for the same inputs.
    pub effective_fidelities: Vec<InputFidelity>,
    /// Largest coupler excited-state population seen during the gate.
    pub peak_excitation: f64,
    pub t_effective: f64,
    /// Transfer time from the exact splitting of the photon-like
    /// one-excitation eigenstates.
    pub t_full: f64,
}

struct FullSpace {
    space: HilbertSpace,
    a: Operator,
    b: Operator,
    lower: Operator,
    excited: Operator,
}

impl FullSpace {
    fn new() -> Self {
        let space = HilbertSpace::new([("A", 2), ("B", 2), ("Q", 2)]).expect("static space");
        let a1 = annihilation(2).expect("dim 2");
        let a = embed(&a1, &space, "A").expect("A");
        let b = embed(&a1, &space, "B").expect("B");
        let lower = embed(&projector(0, 1, 2).expect("σ⁻"), &space, "Q").expect("Q");
        let excited = embed(&projector(1, 1, 2).expect("|e⟩⟨e|"), &space, "Q").expect("Q");
        Self {
            space,
            a,
            b,
            lower,
            excited,
        }
    }

    fn hamiltonian(&self, g: f64, delta: f64) -> Operator {
        let modes = &self.a + &self.b;
        let hop = &modes * &self.lower.adjoint();
        &(&self.excited * delta) + &(&(&hop + &hop.adjoint()) * g)
    }

    /// Embeds a two-mode state with the coupler in `|g⟩`.
    fn lift(&self, psi: &StateVector) -> StateVector {
        let ground =
            CMatrix::from_column_slice(2, 1, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let v = CMatrix::from_column_slice(4, 1, psi.amplitudes().as_slice()).kronecker(&ground);
        StateVector::new(self.space.clone(), v.column(0).into_owned()).expect("normalized lift")
    }
}

/// π over the splitting between the antisymmetric photon state and the
/// photon-like dressed symmetric state.
fn full_transfer_time(g: f64, delta: f64) -> Result<f64> {
    // one-excitation block in the basis {|10g⟩, |01g⟩, |00e⟩}
    let z = Complex64::new(0.0, 0.0);
    let gc = Complex64::new(g, 0.0);
    let block = CMatrix::from_row_slice(
        3,
        3,
        &[z, z, gc, z, z, gc, gc, gc, Complex64::new(delta, 0.0)],
    );
    let eig = block.symmetric_eigen();
    // photon weight of each eigenvector; keep the two most photon-like
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&i, &j| {
        let wi = eig.eigenvectors[(2, i)].norm_sqr();
        let wj = eig.eigenvectors[(2, j)].norm_sqr();
        wi.total_cmp(&wj)
    });
    let split = (eig.eigenvalues[idx[0]] - eig.eigenvalues[idx[1]]).abs();
    if split == 0.0 {
        return invalid("degenerate photon-like states; no transfer");
    }
    Ok(PI / split)
}

/// Simulates the transfer with the coupler as a dissipative two-level
/// system. Coupler decay acts on the junction directly here (it is folded
/// into the photon loss only on the effective side).
pub fn transfer_full_model_error(spec: &TransferSpec) -> Result<FullModelReport> {
    spec.validate()?;
    let (g, delta) = (spec.coupling, spec.detuning);
    let full = FullSpace::new();
    let sz = &(&full.excited * 2.0) - &Operator::identity(&full.space);
    let l_full = build_liouvillian(
        &full.hamiltonian(g, delta),
        &[
            LindbladTerm::new(spec.photon_loss, full.a.clone())?,
            LindbladTerm::new(spec.photon_loss, full.b.clone())?,
            // σz at Γ₂/2 damps the g–e coherence at Γ₂
            LindbladTerm::new(spec.cbjj_dephasing / 2.0, sz)?,
            LindbladTerm::new(spec.cbjj_decay, full.lower.clone())?,
        ],
    )?;

    let modes = TwoModes::new();
    let j = g * g / delta;
    let h_eff = &(&modes.exchange
        + &(&(&modes.a.adjoint() * &modes.a) + &(&modes.b.adjoint() * &modes.b)))
        * (-j);
    let loss = spec.photon_loss + induced_loss_rate(g, delta, spec.cbjj_decay)?;
    let l_eff = build_liouvillian(
        &h_eff,
        &[
            LindbladTerm::new(loss, modes.a.clone())?,
            LindbladTerm::new(loss, modes.b.clone())?,
            LindbladTerm::new(
                effective_dephasing_rate(g, delta, spec.cbjj_dephasing)?,
                modes.exchange.clone(),
            )?,
        ],
    )?;

    let t = spec.gate_time();
    let u_eff = expm(&(h_eff.matrix() * Complex64::new(0.0, -t)));

    // Peak excitation: step the primary input through the gate on a grid
    // fine enough to resolve the coupler oscillation at ~|Δ|/2π.
    let periods = delta.abs() * t / (2.0 * PI);
    let steps = MIN_PEAK_SAMPLES.max((40.0 * periods).ceil() as usize);
    let step = Propagator::new(&l_full, t / steps as f64)?;
    let inputs = modes.inputs();
    let mut rho = full.lift(&inputs[0].1).to_density_matrix();
    let mut peak: f64 = 0.0;
    for _ in 0..steps {
        rho = step.apply(&rho)?;
        peak = peak.max(full.excited.expectation(&rho)?.re);
    }

    let gate_full = Propagator::new(&l_full, t)?;
    let gate_eff = Propagator::new(&l_eff, t)?;
    let mut per_input = Vec::new();
    let mut effective_fidelities = Vec::new();
    for (label, psi) in &inputs {
        let target = psi.evolve(&u_eff)?;
        let out_full: DensityMatrix = gate_full
            .apply(&full.lift(psi).to_density_matrix())?
            .partial_trace(&["A", "B"])?;
        let out_eff = gate_eff.apply(&psi.to_density_matrix())?;
        per_input.push(InputFidelity {
            label: (*label).to_owned(),
            fidelity: fidelity(&out_full, &target)?,
        });
        effective_fidelities.push(InputFidelity {
            label: (*label).to_owned(),
            fidelity: fidelity(&out_eff, &target)?,
        });
    }

    let primary = error_from_fidelity(per_input[0].fidelity);
    let effective_error = error_from_fidelity(effective_fidelities[0].fidelity);
    let mut report = GateErrorReport::new(per_input, primary);
    report.metadata = spec.metadata();
    report.metadata.push(("peak_excitation".into(), peak));
    Ok(FullModelReport {
        report,
        effective_error,
        effective_fidelities,
        peak_excitation: peak,
        t_effective: t,
        t_full: full_transfer_time(g, delta)?,
    })
}

/// Full and effective transfer errors at one value of g/Δ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub ratio: f64,
    pub full_error: f64,
    pub effective_error: f64,
    /// `full_error − effective_error`.
    pub difference: f64,
    pub peak_excitation: f64,
}

/// Scans g/Δ at fixed g (Δ = g/ratio), keeping every rate of `base`.
pub fn dispersive_convergence(
    base: &TransferSpec,
    ratios: &[f64],
) -> Result<Vec<ConvergencePoint>> {
    ratios
        .iter()
        .map(|&ratio| {
            if !(ratio > 0.0 && ratio.is_finite()) {
                return invalid(format!("g/Δ ratio must be positive, got {ratio}"));
            }
            let spec = TransferSpec {
                detuning: base.coupling / ratio * base.detuning.signum(),
                ..*base
            };
            let r = transfer_full_model_error(&spec)?;
            Ok(ConvergencePoint {
                ratio,
                full_error: r.report.primary_error,
                effective_error: r.effective_error,
                difference: r.report.primary_error - r.effective_error,
                peak_excitation: r.peak_excitation,
            })
        })
        .collect()
}
