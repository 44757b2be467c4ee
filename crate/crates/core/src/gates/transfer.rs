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

//! Dispersive photon transfer between two resonators through a detuned
//! junction coupler.
//!
//! Eliminating the coupler leaves the exchange `H = J (a†b + a b†)` with
//! `J = g²/Δ`; a full transfer takes `t = π|Δ|/(2g²)` and maps `|10⟩` to
//! `−i|01⟩`. Coupler dephasing reaches the photons as a Lindblad term on
//! the exchange operator with rate `2(g/Δ)²Γ₂`; coupler decay adds
//! `(g/Δ)²Γ₁` to the photon loss rate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::device::{
    dispersive_regime, effective_dephasing_rate, induced_loss_rate, DispersiveRegime,
};
use crate::error::{invalid, Result};
use crate::expm::expm;
use crate::lindblad::{build_liouvillian, Integrator, LindbladTerm};
use crate::montecarlo::{monte_carlo_quasistatic, QuasiStaticNoise};
use crate::quantum::{
    annihilation, embed, fidelity, CMatrix, DensityMatrix, HilbertSpace, Operator, StateVector,
};

use super::{error_from_fidelity, input_fidelity, GateErrorReport, InputFidelity};

/// A photon transfer between resonators A and B. Rates are angular.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferSpec {
    /// g (rad/s).
    pub coupling: f64,
    /// Δ = Ω − ω₀ (rad/s).
    pub detuning: f64,
    /// κ (rad/s).
    pub photon_loss: f64,
    /// Γ₂ of the coupler (rad/s).
    pub cbjj_dephasing: f64,
    /// Γ₁ of the coupler (rad/s), folded into the photon loss.
    pub cbjj_decay: f64,
    /// Exchange angle; π is a full transfer.
    pub target_angle: f64,
    pub integrator: Integrator,
}

impl TransferSpec {
    pub fn new(coupling: f64, detuning: f64) -> Self {
        Self {
            coupling,
            detuning,
            photon_loss: 0.0,
            cbjj_dephasing: 0.0,
            cbjj_decay: 0.0,
            target_angle: PI,
            integrator: Integrator::Expm,
        }
    }

    /// Rejects |Δ| < 5g; returns the regime so callers can warn on
    /// [`DispersiveRegime::Marginal`].
    pub fn validate(&self) -> Result<DispersiveRegime> {
        for (name, v) in [
            ("coupling", self.coupling),
            ("photon loss", self.photon_loss),
            ("CBJJ dephasing", self.cbjj_dephasing),
            ("CBJJ decay", self.cbjj_decay),
            ("target angle", self.target_angle),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!(
                    "transfer {name} must be finite and nonnegative, got {v}"
                ));
            }
        }
        if self.coupling == 0.0 {
            return invalid("transfer coupling must be positive");
        }
        if !(self.detuning.is_finite() && self.detuning != 0.0) {
            return invalid("transfer detuning must be finite and nonzero");
        }
        let regime = dispersive_regime(self.coupling, self.detuning);
        if regime == DispersiveRegime::Violated {
            return invalid(format!(
                "|Δ| = {:.3e} rad/s is below 5 g = {:.3e} rad/s; the dispersive model does not apply",
                self.detuning.abs(),
                5.0 * self.coupling
            ));
        }
        Ok(regime)
    }

    /// Exchange rate J = g²/Δ (rad/s, signed).
    pub fn exchange_rate(&self) -> f64 {
        self.coupling * self.coupling / self.detuning
    }

    /// Gate time `target_angle·|Δ|/(2g²)`.
    pub fn gate_time(&self) -> f64 {
        self.target_angle / (2.0 * self.exchange_rate().abs())
    }

    /// Photon loss including the coupler-decay contribution.
    pub fn total_loss(&self) -> Result<f64> {
        Ok(self.photon_loss + induced_loss_rate(self.coupling, self.detuning, self.cbjj_decay)?)
    }

    pub(crate) fn metadata(&self) -> Vec<(String, f64)> {
        vec![
            ("g".into(), self.coupling),
            ("delta".into(), self.detuning),
            ("kappa".into(), self.photon_loss),
            ("gamma2".into(), self.cbjj_dephasing),
            ("gamma1".into(), self.cbjj_decay),
            ("target_angle".into(), self.target_angle),
            ("gate_time".into(), self.gate_time()),
        ]
    }
}

/// Resonators A and B, each truncated to {0, 1} photons.
pub(crate) struct TwoModes {
    pub space: HilbertSpace,
    pub a: Operator,
    pub b: Operator,
    /// a†b + ab†
    pub exchange: Operator,
}

impl TwoModes {
    pub fn new() -> Self {
        let space = HilbertSpace::new([("A", 2), ("B", 2)]).expect("static space");
        let a1 = annihilation(2).expect("dim 2");
        let a = embed(&a1, &space, "A").expect("label A");
        let b = embed(&a1, &space, "B").expect("label B");
        let exchange = &(&a.adjoint() * &b) + &(&a * &b.adjoint());
        Self {
            space,
            a,
            b,
            exchange,
        }
    }

    /// The four test inputs with their labels.
    pub fn inputs(&self) -> Vec<(&'static str, StateVector)> {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let s = &self.space;
        vec![
            ("10", StateVector::basis(s, &[1, 0]).expect("basis")),
            ("01", StateVector::basis(s, &[0, 1]).expect("basis")),
            (
                "10+01",
                StateVector::superposition(s, &[(&[1, 0][..], one), (&[0, 1][..], one)])
                    .expect("sup"),
            ),
            (
                "10+i01",
                StateVector::superposition(s, &[(&[1, 0][..], one), (&[0, 1][..], i)])
                    .expect("sup"),
            ),
        ]
    }
}

/// Ideal transfer unitary `exp(−i J X t)`.
fn ideal_unitary(modes: &TwoModes, spec: &TransferSpec) -> CMatrix {
    let h = modes.exchange.matrix() * Complex64::new(spec.exchange_rate(), 0.0);
    expm(&(h * Complex64::new(0.0, -spec.gate_time())))
}

/// Transfer error from the effective master equation.
///
/// The primary error is `1 − F` for a photon starting in A (for a full
/// transfer, the population missing from `|01⟩`); the per-input list
/// covers `|10⟩`, `|01⟩`, `(|10⟩+|01⟩)/√2` and `(|10⟩+i|01⟩)/√2`.
pub fn transfer_gate_error(spec: &TransferSpec) -> Result<GateErrorReport> {
    spec.validate()?;
    let modes = TwoModes::new();
    let loss = spec.total_loss()?;
    let deph = effective_dephasing_rate(spec.coupling, spec.detuning, spec.cbjj_dephasing)?;
    let h = &modes.exchange * spec.exchange_rate();
    let l = build_liouvillian(
        &h,
        &[
            LindbladTerm::new(loss, modes.a.clone())?,
            LindbladTerm::new(loss, modes.b.clone())?,
            LindbladTerm::new(deph, modes.exchange.clone())?,
        ],
    )?;
    let u = ideal_unitary(&modes, spec);
    let t = spec.gate_time();

    let mut per_input = Vec::new();
    for (label, psi) in modes.inputs() {
        let rho = spec.integrator.evolve(&l, &psi.to_density_matrix(), t)?;
        per_input.push(input_fidelity(label, &rho, &psi.evolve(&u)?)?);
    }
    let primary = error_from_fidelity(per_input[0].fidelity);
    let mut report = GateErrorReport::new(per_input, primary);
    report.metadata = spec.metadata();
    report.metadata.push(("effective_dephasing".into(), deph));
    report.metadata.push(("effective_loss".into(), loss));
    Ok(report)
}

/// Standard deviation of the quasi-static detuning noise δ_n whose
/// ensemble dephasing matches the Lindblad rate `2(g/Δ)²Γ₂` at gate time
/// `t`.
///
/// With `r = (g/Δ)²` the noise term `−r δ_n X` splits the exchange
/// eigenstates by `2 r δ_n`; averaging over a Gaussian δ_n damps their
/// coherence by `exp(−2 r² σ² t²)`, while the Lindblad term damps it by
/// `exp(−4 r Γ₂ t)`. Equating the two gives `σ² = 2Γ₂ / (r t)`.
pub fn quasistatic_std_dev(coupling: f64, detuning: f64, gamma2: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid("calibration time must be positive");
    }
    let r = (coupling / detuning).powi(2);
    if !(r > 0.0 && r.is_finite()) {
        return invalid("coupling and detuning must be nonzero and finite");
    }
    Ok((2.0 * gamma2 / (r * t)).sqrt())
}

/// Transfer error with coupler dephasing replaced by a quasi-static random
/// Hamiltonian `−(g/Δ)² δ_n X`, averaged over `samples` Gaussian draws of
/// δ_n. Loss terms stay in the master equation.
pub fn transfer_error_quasistatic(
    spec: &TransferSpec,
    samples: usize,
    seed: u64,
    jobs: usize,
) -> Result<GateErrorReport> {
    spec.validate()?;
    let modes = TwoModes::new();
    let t = spec.gate_time();
    let loss = spec.total_loss()?;
    let r = (spec.coupling / spec.detuning).powi(2);
    let noise = QuasiStaticNoise {
        parameter: "delta_n".into(),
        mean: 0.0,
        std_dev: quasistatic_std_dev(spec.coupling, spec.detuning, spec.cbjj_dephasing, t)?,
        samples,
        seed,
    };
    let u = ideal_unitary(&modes, spec);
    let inputs = modes.inputs();
    let targets: Vec<StateVector> = inputs
        .iter()
        .map(|(_, psi)| psi.evolve(&u))
        .collect::<Result<_>>()?;
    let jumps = [
        LindbladTerm::new(loss, modes.a.clone())?,
        LindbladTerm::new(loss, modes.b.clone())?,
    ];

    let run_input = |delta: f64, psi: &StateVector| -> Result<DensityMatrix> {
        let h = &modes.exchange * (spec.exchange_rate() - r * delta);
        let l = build_liouvillian(&h, &jumps)?;
        spec.integrator.evolve(&l, &psi.to_density_matrix(), t)
    };

    let mut per_input = Vec::new();
    let mut estimates = Vec::new();
    for ((label, psi), target) in inputs.iter().zip(&targets) {
        let result = monte_carlo_quasistatic(
            &noise,
            |delta| run_input(delta, psi),
            |rho| Ok(vec![fidelity(rho, target)?]),
            jobs,
        )?;
        let est = result.observables[0];
        per_input.push(InputFidelity {
            label: (*label).to_owned(),
            fidelity: est.mean,
        });
        estimates.push(est);
    }
    let primary = estimates[0];
    let mut report = GateErrorReport::new(per_input, error_from_fidelity(primary.mean));
    report.std_error = Some(primary.std_error);
    report.seed = Some(seed);
    report.metadata = spec.metadata();
    report
        .metadata
        .push(("delta_n_std_dev".into(), noise.std_dev));
    report.metadata.push(("samples".into(), samples as f64));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{angular, DeviceParams};
    use approx::assert_relative_eq;

    fn paper_point() -> TransferSpec {
        let dev = DeviceParams::default();
        TransferSpec {
            photon_loss: angular(10e3),
            cbjj_dephasing: angular(1e6),
            ..TransferSpec::new(dev.g_c(), dev.delta_c())
        }
    }

    #[test]
    fn lossless_transfer_is_exact() {
        let spec = TransferSpec {
            photon_loss: 0.0,
            cbjj_dephasing: 0.0,
            ..paper_point()
        };
        let r = transfer_gate_error(&spec).unwrap();
        assert!(r.primary_error < 1e-9);
        assert!(r.average_error < 1e-9);
        assert_relative_eq!(
            spec.gate_time(),
            1.2901701323251418e-08,
            max_relative = 1e-12
        );
    }

    #[test]
    fn operating_point_value() {
        let r = transfer_gate_error(&paper_point()).unwrap();
        assert_relative_eq!(r.primary_error, 0.0023773699977402973, max_relative = 1e-9);
        assert_relative_eq!(r.average_error, 0.0019856048292704875, max_relative = 1e-9);
        assert_relative_eq!(
            r.fidelity_of("01").unwrap(),
            1.0 - 0.0023773699977400753,
            max_relative = 1e-12
        );

        let folded = TransferSpec {
            cbjj_decay: angular(0.1e6),
            ..paper_point()
        };
        let r = transfer_gate_error(&folded).unwrap();
        assert_relative_eq!(r.primary_error, 0.0024557200190385986, max_relative = 1e-9);
    }

    #[test]
    fn loss_only_matches_uniform_decay() {
        let spec = TransferSpec {
            cbjj_dephasing: 0.0,
            ..paper_point()
        };
        let r = transfer_gate_error(&spec).unwrap();
        let want = 1.0 - (-spec.photon_loss * spec.gate_time()).exp();
        assert_relative_eq!(r.primary_error, want, max_relative = 0.1);
    }

    #[test]
    fn rk4_agrees_with_expm() {
        let spec = paper_point();
        let rk = TransferSpec {
            integrator: Integrator::Rk4 { step: 1e-11 },
            ..spec
        };
        let a = transfer_gate_error(&spec).unwrap();
        let b = transfer_gate_error(&rk).unwrap();
        assert!((a.primary_error - b.primary_error).abs() < 1e-9);
    }

    #[test]
    fn regime_checks() {
        let g = angular(197e6);
        assert!(TransferSpec::new(g, 2.0 * g).validate().is_err());
        assert_eq!(
            TransferSpec::new(g, 7.0 * g).validate().unwrap(),
            DispersiveRegime::Marginal
        );
        assert_eq!(
            TransferSpec::new(g, -20.0 * g).validate().unwrap(),
            DispersiveRegime::Deep
        );
        assert!(TransferSpec::new(g, 0.0).validate().is_err());
    }

    #[test]
    fn calibration_formula() {
        let (g, d, g2, t) = (2.0, 20.0, 5.0, 0.3);
        let s = quasistatic_std_dev(g, d, g2, t).unwrap();
        let r: f64 = 0.01;
        // ensemble decay exp(−2 r² σ² t²) equals Lindblad decay exp(−4 r Γ₂ t)
        assert_relative_eq!(
            2.0 * r * r * s * s * t * t,
            4.0 * r * g2 * t,
            max_relative = 1e-12
        );
    }

    #[test]
    fn quasistatic_matches_lindblad() {
        let spec = paper_point();
        let lind = transfer_gate_error(&spec).unwrap();
        let mc = transfer_error_quasistatic(&spec, 1000, 11, 0).unwrap();
        let se = mc.std_error.unwrap();
        assert!(
            (mc.primary_error - lind.primary_error).abs() <= 3.0 * se,
            "{} vs {} (se {se})",
            mc.primary_error,
            lind.primary_error
        );
    }
}
