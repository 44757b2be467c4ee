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

//! Single-photon detector: a resonator mode coupled to a three-level
//! current-biased junction `{g, e, f}`.
//!
//! The photon is absorbed on the `g → e` transition; from `|e⟩` the junction
//! escapes to the voltage state `|f⟩` at rate Γ, which is the detection
//! event. Competing channels are photon loss κ, intra-well decay `e → g`
//! at γ_T and pure `g–e` dephasing γ_φ.

use crate::device::{angular, TWO_PI};
use crate::error::{invalid, Result};
use crate::lindblad::{build_liouvillian, Integrator, LindbladTerm, Liouvillian, Propagator};
use crate::montecarlo::run_indexed;
use crate::quantum::{
    annihilation, embed, projector, DensityMatrix, HilbertSpace, Operator, StateVector,
};

pub const G: usize = 0;
pub const E: usize = 1;
pub const F: usize = 2;

/// Convergence threshold on both the change of `P_f` between checkpoints
/// and the excitation still in the photon or `|e⟩`.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

/// Detector parameters. All rates are angular.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorParams {
    pub coupling: f64,
    /// δ = ω₀ − μ.
    pub detuning: f64,
    pub photon_loss: f64,
    /// Γ, escape `e → f`.
    pub escape_rate: f64,
    /// γ_T, intra-well decay `e → g`.
    pub intra_well_decay: f64,
    /// γ_φ.
    pub dephasing: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            coupling: angular(100e6),
            detuning: 0.0,
            photon_loss: angular(10e3),
            escape_rate: angular(20e6),
            intra_well_decay: angular(100e3),
            dephasing: angular(1e6),
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("coupling", self.coupling),
            ("photon loss", self.photon_loss),
            ("escape rate", self.escape_rate),
            ("intra-well decay", self.intra_well_decay),
            ("dephasing", self.dephasing),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!(
                    "detector {name} must be finite and nonnegative, got {v}"
                ));
            }
        }
        if !self.detuning.is_finite() {
            return invalid("detector detuning must be finite");
        }
        Ok(())
    }

    fn rates(&self) -> [f64; 6] {
        [
            self.coupling,
            self.detuning.abs(),
            self.photon_loss,
            self.escape_rate,
            self.intra_well_decay,
            self.dephasing,
        ]
    }
}

/// Photon mode (0/1) ⊗ junction {g, e, f}.
pub fn detector_space() -> HilbertSpace {
    HilbertSpace::new([("photon", 2), ("cbjj", 3)]).expect("static space")
}

fn on_cbjj(i: usize, j: usize, space: &HilbertSpace) -> Result<Operator> {
    embed(&projector(i, j, 3)?, space, "cbjj")
}

pub fn build_detector_liouvillian(p: &DetectorParams) -> Result<Liouvillian> {
    p.validate()?;
    let space = detector_space();
    let a = embed(&annihilation(2)?, &space, "photon")?;
    let s_ge = on_cbjj(G, E, &space)?;
    let absorb = &a.adjoint() * &s_ge;
    let h = &(&(&a.adjoint() * &a) * p.detuning) + &(&(&absorb + &absorb.adjoint()) * p.coupling);
    build_liouvillian(
        &h,
        &[
            LindbladTerm::new(p.photon_loss, a)?,
            LindbladTerm::new(p.escape_rate, on_cbjj(F, E, &space)?)?,
            LindbladTerm::new(p.intra_well_decay, on_cbjj(G, E, &space)?)?,
            LindbladTerm::new(p.dephasing, on_cbjj(G, G, &space)?)?,
            LindbladTerm::new(p.dephasing, on_cbjj(E, E, &space)?)?,
        ],
    )
}

/// One photon in the resonator, junction in `|g⟩`.
pub fn detector_initial_state() -> DensityMatrix {
    StateVector::basis(&detector_space(), &[1, G])
        .expect("basis state")
        .to_density_matrix()
}

/// Populations at one checkpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    pub time: f64,
    pub p_g: f64,
    pub p_e: f64,
    pub p_f: f64,
    /// ⟨a†a⟩.
    pub photon: f64,
}

impl Checkpoint {
    fn of(time: f64, rho: &DensityMatrix) -> Self {
        let pops = rho.populations();
        let space = rho.space();
        let mut c = Checkpoint {
            time,
            p_g: 0.0,
            p_e: 0.0,
            p_f: 0.0,
            photon: 0.0,
        };
        for (i, p) in pops.iter().enumerate() {
            let lv = space.levels_of(i);
            match lv[1] {
                G => c.p_g += p,
                E => c.p_e += p,
                _ => c.p_f += p,
            }
            if lv[0] == 1 {
                c.photon += p;
            }
        }
        c
    }

    /// Excitation not yet resolved into detection or loss.
    pub fn remaining(&self) -> f64 {
        self.photon + self.p_e
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    /// Final `P_f`.
    pub efficiency: f64,
    pub time_series: Vec<Checkpoint>,
    pub converged: bool,
    pub t_final: f64,
}

/// Junction state after time `t` with the chosen integrator.
pub fn evolve_detector(
    p: &DetectorParams,
    t: f64,
    integrator: Integrator,
) -> Result<DensityMatrix> {
    let l = build_detector_liouvillian(p)?;
    integrator.evolve(&l, &detector_initial_state(), t)
}

/// Detection probability: `P_f` once the photon has been either absorbed
/// and escaped or lost.
///
/// Checkpoints sit at `t_k = t₀·2^k` with `t₀ = 1/(10·max rate)`; the run
/// stops when `P_f` changes by less than 1e-6 between checkpoints and less
/// than 1e-6 of the excitation remains, or at `10³/min(positive rates)`.
pub fn detection_efficiency(p: &DetectorParams) -> Result<DetectionResult> {
    p.validate()?;
    let rho0 = detector_initial_state();
    if p.escape_rate == 0.0 {
        return Ok(DetectionResult {
            efficiency: 0.0,
            time_series: vec![Checkpoint::of(0.0, &rho0)],
            converged: true,
            t_final: 0.0,
        });
    }
    let rates = p.rates();
    let max_rate = rates.iter().copied().fold(0.0, f64::max);
    let min_rate = rates
        .iter()
        .copied()
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let t0 = 1.0 / (10.0 * max_rate);
    let t_max = 1e3 / min_rate;

    let l = build_detector_liouvillian(p)?;
    let mut series = vec![Checkpoint::of(0.0, &rho0)];
    let mut prop = Propagator::new(&l, t0)?;
    let mut t = t0;
    let mut converged = false;
    loop {
        let rho = prop.apply(&rho0)?;
        let cp = Checkpoint::of(t, &rho);
        let prev = *series.last().expect("nonempty");
        series.push(cp);
        if (cp.p_f - prev.p_f).abs() < CONVERGENCE_TOLERANCE
            && cp.remaining() < CONVERGENCE_TOLERANCE
        {
            converged = true;
            break;
        }
        if 2.0 * t > t_max {
            if t < t_max {
                let rho = Propagator::new(&l, t_max)?.apply(&rho0)?;
                let last = Checkpoint::of(t_max, &rho);
                converged = (last.p_f - cp.p_f).abs() < CONVERGENCE_TOLERANCE
                    && last.remaining() < CONVERGENCE_TOLERANCE;
                series.push(last);
            }
            break;
        }
        prop = prop.squared();
        t *= 2.0;
    }
    let last = *series.last().expect("nonempty");
    Ok(DetectionResult {
        efficiency: last.p_f,
        time_series: series,
        converged,
        t_final: last.time,
    })
}

/// Efficiency as a function of Γ/κ with κ fixed at `p.photon_loss`.
/// Points are computed in parallel and returned in grid order.
pub fn efficiency_sweep(
    p: &DetectorParams,
    ratios: &[f64],
    jobs: usize,
) -> Result<Vec<(f64, DetectionResult)>> {
    if ratios.is_empty() {
        return invalid("efficiency sweep needs at least one ratio");
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return invalid(format!("Γ/κ ratios must be positive, got {r}"));
    }
    if !(p.photon_loss > 0.0) {
        return invalid("efficiency sweep needs a positive photon loss rate");
    }
    run_indexed(ratios.len(), jobs, |i| {
        let point = DetectorParams {
            escape_rate: ratios[i] * p.photon_loss,
            ..*p
        };
        detection_efficiency(&point).map(|r| (ratios[i], r))
    })
    .into_iter()
    .collect()
}

/// Linear frequency of an angular rate, for reports.
pub fn hz(rate: f64) -> f64 {
    rate / TWO_PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::propagate_expm;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn only_coupling() -> DetectorParams {
        DetectorParams {
            coupling: angular(100e6),
            detuning: 0.0,
            photon_loss: 0.0,
            escape_rate: 0.0,
            intra_well_decay: 0.0,
            dephasing: 0.0,
        }
    }

    #[test]
    fn rabi_return() {
        let p = only_coupling();
        let l = build_detector_liouvillian(&p).unwrap();
        assert!(l.trace_residual() < 1e-12);
        let rho0 = detector_initial_state();
        let half = propagate_expm(&l, &rho0, PI / (2.0 * p.coupling)).unwrap();
        let space = detector_space();
        let i0e = space.index_of(&[0, E]).unwrap();
        assert_abs_diff_eq!(half.populations()[i0e], 1.0, epsilon = 1e-9);
        let back = propagate_expm(&l, &rho0, PI / p.coupling).unwrap();
        let i1g = space.index_of(&[1, G]).unwrap();
        assert!(1.0 - back.populations()[i1g] < 1e-9);
    }

    #[test]
    fn pure_dephasing_block() {
        let gamma = angular(1e6);
        let p = DetectorParams {
            coupling: 0.0,
            dephasing: gamma,
            ..only_coupling()
        };
        let l = build_detector_liouvillian(&p).unwrap();
        let space = detector_space();
        let psi = StateVector::superposition(
            &space,
            &[
                (&[1, G][..], num_complex::Complex64::new(1.0, 0.0)),
                (&[0, E][..], num_complex::Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap()
        .to_density_matrix();
        let (i, j) = (
            space.index_of(&[1, G]).unwrap(),
            space.index_of(&[0, E]).unwrap(),
        );
        for t in [1e-7, 5e-7, 2e-6] {
            let rho = propagate_expm(&l, &psi, t).unwrap();
            assert_abs_diff_eq!(
                rho.element(i, j).norm(),
                0.5 * (-gamma * t).exp(),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(rho.populations()[i], 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn paper_operating_point() {
        let r = detection_efficiency(&DetectorParams::default()).unwrap();
        assert!(r.converged);
        assert!(r.efficiency > 0.99);
        assert_abs_diff_eq!(r.efficiency, 0.99452, epsilon = 2e-5);
        for w in r.time_series.windows(2) {
            assert!(w[1].p_f >= w[0].p_f - 1e-12);
        }
        for c in &r.time_series {
            assert_abs_diff_eq!(c.p_g + c.p_e + c.p_f, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn trivial_limits() {
        let no_escape = DetectorParams {
            escape_rate: 0.0,
            ..DetectorParams::default()
        };
        let r = detection_efficiency(&no_escape).unwrap();
        assert_eq!(r.efficiency, 0.0);
        assert!(r.converged);
        let rho = evolve_detector(&no_escape, 1e-6, Integrator::Expm).unwrap();
        assert_eq!(Checkpoint::of(1e-6, &rho).p_f, 0.0);

        let uncoupled = DetectorParams {
            coupling: 0.0,
            ..DetectorParams::default()
        };
        let r = detection_efficiency(&uncoupled).unwrap();
        assert!(r.efficiency < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn sweep_order_and_errors() {
        let p = DetectorParams::default();
        let pts = efficiency_sweep(&p, &[1000.0, 10.0], 2).unwrap();
        assert_eq!(pts[0].0, 1000.0);
        assert!(pts[0].1.efficiency > pts[1].1.efficiency);
        assert!(efficiency_sweep(&p, &[], 1).is_err());
        assert!(efficiency_sweep(&p, &[0.0], 1).is_err());
    }
}
