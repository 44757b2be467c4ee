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

//! Two-phase (spin-echo) controlled-phase gate between two dual-rail
//! qubits through a cross-Kerr coupler.
//!
//! Each rail holds one photon in one of three resonators: the outer one
//! (A or F), the inner one (B or E), or the auxiliary one (C or D) coupled
//! to the four-junction SQUID. Logical `0`/`1` is the photon in the
//! outer/inner resonator, so a rail is a single level index:
//!
//! | level | rail 1 | rail 2 |
//! |-------|--------|--------|
//! | 0     | A      | F      |
//! | 1     | B      | E      |
//! | 2     | C      | D      |
//! | 3     | lost   | lost   |
//!
//! Level 3 exists only when photon loss is switched on.
//!
//! One phase of the protocol transfers B→C and E→D, waits `π/|ω_int|`,
//! and transfers back; the qubits are then flipped and the phase repeated,
//! followed by a second flip. Throughout, the SQUID adds
//! `δω_s (n_c + n_d) − ω_int n_c n_d`, where both coefficients depend on the
//! SQUID phase φ, drawn once per run from its ground-state Gaussian.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::device::FjsDerived;
use crate::error::{invalid, Error, Result};
use crate::expm::expm;
use crate::lindblad::{build_liouvillian, vectorize, LindbladTerm};
use crate::montecarlo::{aggregate, sample_map, QuasiStaticNoise};
use crate::quantum::{
    embed, fidelity, projector, CMatrix, CVector, DensityMatrix, HilbertSpace, Operator,
    StateVector,
};

use super::{error_from_fidelity, GateErrorReport, InputFidelity};

const OUTER: usize = 0;
const INNER: usize = 1;
const AUX: usize = 2;
const LOST: usize = 3;

/// Logical basis labels in index order.
pub const LOGICAL_LABELS: [&str; 4] = ["00", "01", "10", "11"];
/// Minimum logical population accepted by [`logical_phase_extract`].
pub const LOGICAL_POPULATION_FLOOR: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipMode {
    /// Perfect instantaneous outer↔inner swaps.
    Ideal,
    /// Exchange at `flip_rate` for a quarter period, with the SQUID terms on.
    Simulated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferMode {
    /// Exchange at λ for `π/(2λ)` with the SQUID terms on.
    Finite,
    /// Perfect instantaneous inner↔auxiliary swaps.
    Instantaneous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CphaseSpec {
    pub fjs: FjsDerived,
    /// λ, the inner↔auxiliary exchange rate (rad/s).
    pub transfer_rate: f64,
    /// Static offset added to the sampled shift δω_s (rad/s).
    pub shift_offset: f64,
    /// κ on every resonator (rad/s).
    pub photon_loss: f64,
    pub flips: FlipMode,
    /// Exchange rate used for simulated flips (rad/s).
    pub flip_rate: f64,
    pub transfers: TransferMode,
    pub samples: usize,
    pub seed: u64,
}

impl CphaseSpec {
    pub fn new(fjs: FjsDerived, transfer_rate: f64) -> Self {
        Self {
            fjs,
            transfer_rate,
            shift_offset: 0.0,
            photon_loss: 0.0,
            flips: FlipMode::Ideal,
            flip_rate: transfer_rate,
            transfers: TransferMode::Finite,
            samples: 1000,
            seed: 0,
        }
    }

    /// λ giving the requested λ/|δω_s|.
    pub fn lambda_for_ratio(fjs: &FjsDerived, ratio: f64) -> f64 {
        ratio * fjs.delta_omega_s.abs()
    }

    pub fn wait_time(&self) -> f64 {
        PI / self.fjs.omega_int.abs()
    }

    pub fn transfer_time(&self) -> f64 {
        PI / (2.0 * self.transfer_rate)
    }

    pub fn flip_time(&self) -> f64 {
        PI / (2.0 * self.flip_rate)
    }

    pub fn noise(&self) -> QuasiStaticNoise {
        QuasiStaticNoise {
            parameter: "phi".into(),
            mean: self.fjs.phi0,
            std_dev: self.fjs.sigma_phi,
            samples: self.samples,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.transfer_rate > 0.0 && self.transfer_rate.is_finite()) {
            return invalid("λ must be positive and finite");
        }
        if !(self.fjs.omega_int != 0.0 && self.fjs.omega_int.is_finite()) {
            return invalid("ω_int must be nonzero for a finite wait time");
        }
        if !(self.photon_loss >= 0.0 && self.photon_loss.is_finite()) {
            return invalid("photon loss must be nonnegative");
        }
        if self.flips == FlipMode::Simulated
            && !(self.flip_rate > 0.0 && self.flip_rate.is_finite())
        {
            return invalid("simulated flips need a positive flip rate");
        }
        if !self.shift_offset.is_finite() {
            return invalid("shift offset must be finite");
        }
        if self.samples == 0 {
            return invalid("at least one Monte Carlo sample is needed");
        }
        Ok(())
    }
}

/// Operators on the two-rail cell.
struct Cell {
    space: HilbertSpace,
    n_aux: Operator,
    n_cd: Operator,
    x_transfer: Operator,
    x_flip: Operator,
    loss: Vec<Operator>,
    logical: [usize; 4],
}

impl Cell {
    fn new(with_loss: bool) -> Result<Self> {
        let levels = if with_loss { 4 } else { 3 };
        let space = HilbertSpace::new([("rail1", levels), ("rail2", levels)])?;
        let on = |op: &Operator, rail: &str| embed(op, &space, rail);
        let proj = |i, j| projector(i, j, levels);
        let p_aux = proj(AUX, AUX)?;
        let swap = |i, j| -> Result<Operator> { Ok(&proj(i, j)? + &proj(j, i)?) };
        let nc = on(&p_aux, "rail1")?;
        let nd = on(&p_aux, "rail2")?;
        let x_transfer = &on(&swap(INNER, AUX)?, "rail1")? + &on(&swap(INNER, AUX)?, "rail2")?;
        let x_flip = &on(&swap(OUTER, INNER)?, "rail1")? + &on(&swap(OUTER, INNER)?, "rail2")?;
        let mut loss = Vec::new();
        if with_loss {
            for rail in ["rail1", "rail2"] {
                for k in [OUTER, INNER, AUX] {
                    loss.push(on(&proj(LOST, k)?, rail)?);
                }
            }
        }
        let mut logical = [0; 4];
        for (k, slot) in logical.iter_mut().enumerate() {
            *slot = space.index_of(&[k / 2, k % 2])?;
        }
        Ok(Self {
            n_aux: &nc + &nd,
            n_cd: &nc * &nd,
            space,
            x_transfer,
            x_flip,
            loss,
            logical,
        })
    }

    /// SQUID terms at a given shift and interaction strength.
    fn always_on(&self, shift: f64, omega_int: f64) -> Operator {
        &(&self.n_aux * shift) - &(&self.n_cd * omega_int)
    }

    /// Equal superposition of the four logical states.
    fn plus_plus(&self) -> StateVector {
        let mut v = CVector::zeros(self.space.dim());
        for &i in &self.logical {
            v[i] = Complex64::new(0.5, 0.0);
        }
        StateVector::new(self.space.clone(), v).expect("normalized")
    }

    fn basis(&self, k: usize) -> StateVector {
        let mut v = CVector::zeros(self.space.dim());
        v[self.logical[k]] = Complex64::new(1.0, 0.0);
        StateVector::new(self.space.clone(), v).expect("normalized")
    }

    fn target(&self, tau: &[f64; 4]) -> StateVector {
        let mut v = CVector::zeros(self.space.dim());
        for (&i, &t) in self.logical.iter().zip(tau) {
            v[i] = Complex64::from_polar(0.5, t);
        }
        StateVector::new(self.space.clone(), v).expect("normalized")
    }
}

fn unitary(h: &Operator, t: f64) -> CMatrix {
    expm(&(h.matrix() * Complex64::new(0.0, -t)))
}

/// Superoperator of `ρ ↦ U ρ U†`.
fn unitary_superop(u: &CMatrix) -> CMatrix {
    u.conjugate().kronecker(u)
}

/// Hamiltonians and durations of the three stage kinds at one φ.
struct Stages {
    transfer: Option<(Operator, f64)>,
    wait: (Operator, f64),
    flip: Option<(Operator, f64)>,
}

fn stages(spec: &CphaseSpec, cell: &Cell, shift: f64, omega_int: f64) -> Stages {
    let base = cell.always_on(shift, omega_int);
    let transfer = match spec.transfers {
        TransferMode::Finite => Some((
            &base + &(&cell.x_transfer * spec.transfer_rate),
            spec.transfer_time(),
        )),
        TransferMode::Instantaneous => None,
    };
    let flip = match spec.flips {
        FlipMode::Simulated => Some((&base + &(&cell.x_flip * spec.flip_rate), spec.flip_time())),
        FlipMode::Ideal => None,
    };
    Stages {
        transfer,
        wait: (base, spec.wait_time()),
        flip,
    }
}

/// Ideal quarter-period swap `exp(−i(π/2)X)`.
fn ideal_swap(x: &Operator) -> CMatrix {
    unitary(x, PI / 2.0)
}

/// Closed-system protocol unitary `F·T·W·T·F·T·W·T`.
fn protocol_unitary(spec: &CphaseSpec, cell: &Cell, shift: f64, omega_int: f64) -> CMatrix {
    let st = stages(spec, cell, shift, omega_int);
    let t = match &st.transfer {
        Some((h, dt)) => unitary(h, *dt),
        None => ideal_swap(&cell.x_transfer),
    };
    let w = unitary(&st.wait.0, st.wait.1);
    let f = match &st.flip {
        Some((h, dt)) => unitary(h, *dt),
        None => ideal_flip(cell),
    };
    let half = &t * &w * &t;
    &f * &half * &f * &half
}

/// Outer↔inner permutation on both rails (no phase).
fn ideal_flip(cell: &Cell) -> CMatrix {
    let d = cell.space.dim();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        let levels: Vec<usize> = cell
            .space
            .levels_of(i)
            .into_iter()
            .map(|l| match l {
                OUTER => INNER,
                INNER => OUTER,
                other => other,
            })
            .collect();
        let j = cell.space.index_of(&levels).expect("valid levels");
        m[(j, i)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Open-system protocol map on column-stacked states.
fn protocol_superop(spec: &CphaseSpec, cell: &Cell, shift: f64, omega_int: f64) -> Result<CMatrix> {
    let st = stages(spec, cell, shift, omega_int);
    let jumps: Vec<LindbladTerm> = cell
        .loss
        .iter()
        .map(|l| LindbladTerm::new(spec.photon_loss, l.clone()))
        .collect::<Result<_>>()?;
    let open = |h: &Operator, dt: f64| -> Result<CMatrix> {
        let l = build_liouvillian(h, &jumps)?;
        Ok(expm(&(l.generator() * Complex64::new(dt, 0.0))))
    };
    let t = match &st.transfer {
        Some((h, dt)) => open(h, *dt)?,
        None => unitary_superop(&ideal_swap(&cell.x_transfer)),
    };
    let w = open(&st.wait.0, st.wait.1)?;
    let f = match &st.flip {
        Some((h, dt)) => open(h, *dt)?,
        None => unitary_superop(&ideal_flip(cell)),
    };
    let half = &t * &w * &t;
    Ok(&f * &half * &f * &half)
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// Target phases from the noiseless protocol: the calibrated logical
/// phases with the entangling mismatch against diag(−1, 1, 1, −1) spread
/// evenly, which leaves exactly the global and single-qubit Z phases.
fn calibrate(spec: &CphaseSpec, cell: &Cell) -> ([f64; 4], CMatrix) {
    let u = protocol_unitary(spec, cell, spec.shift_offset, spec.fjs.omega_int);
    let mut theta = [0.0; 4];
    for (k, &i) in cell.logical.iter().enumerate() {
        theta[k] = u[(i, i)].arg();
    }
    let mismatch = wrap(theta[0] - theta[1] - theta[2] + theta[3] - 2.0 * PI);
    let signs = [1.0, -1.0, -1.0, 1.0];
    let mut tau = [0.0; 4];
    for k in 0..4 {
        tau[k] = theta[k] - signs[k] * mismatch / 4.0;
    }
    (tau, u)
}

/// Monte Carlo error of the spin-echo controlled-phase gate.
///
/// The primary error is `1 − F` on `½(|0⟩+|1⟩)⊗(|0⟩+|1⟩)` against the
/// calibrated target; per-input entries add the four logical basis states.
pub fn cphase_spin_echo_error(spec: &CphaseSpec, jobs: usize) -> Result<GateErrorReport> {
    spec.validate()?;
    let open = spec.photon_loss > 0.0;
    let cell = Cell::new(open)?;
    let (tau, u_cal) = calibrate(spec, &cell);
    let plus = cell.plus_plus();
    let target = cell.target(&tau);
    let calibration_error = {
        let out = plus.evolve(&u_cal)?;
        error_from_fidelity(out.inner(&target)?.norm_sqr())
    };

    let inputs: Vec<StateVector> = std::iter::once(plus.clone())
        .chain((0..4).map(|k| cell.basis(k)))
        .collect();
    let targets: Vec<StateVector> = std::iter::once(target.clone())
        .chain((0..4).map(|k| {
            let mut v = cell.basis(k).amplitudes().clone();
            v[cell.logical[k]] = Complex64::from_polar(1.0, tau[k]);
            StateVector::new(cell.space.clone(), v).expect("normalized")
        }))
        .collect();

    let noise = spec.noise();
    let samples = sample_map(
        &noise,
        |phi| {
            let shift = spec.fjs.shift_at(phi) + spec.shift_offset;
            let omega_int = spec.fjs.omega_int_at(phi);
            let outputs: Vec<DensityMatrix> = if open {
                let map = protocol_superop(spec, &cell, shift, omega_int)?;
                inputs
                    .iter()
                    .map(|psi| {
                        let v = &map * vectorize(psi.to_density_matrix().matrix());
                        let m = CMatrix::from_column_slice(
                            cell.space.dim(),
                            cell.space.dim(),
                            v.as_slice(),
                        );
                        DensityMatrix::new(
                            cell.space.clone(),
                            (&m + m.adjoint()) * Complex64::new(0.5, 0.0),
                        )
                    })
                    .collect::<Result<_>>()?
            } else {
                let u = protocol_unitary(spec, &cell, shift, omega_int);
                inputs
                    .iter()
                    .map(|psi| Ok(psi.evolve(&u)?.to_density_matrix()))
                    .collect::<Result<_>>()?
            };
            let fids: Vec<f64> = outputs
                .iter()
                .zip(&targets)
                .map(|(rho, t)| fidelity(rho, t))
                .collect::<Result<_>>()?;
            let first = outputs.into_iter().next().expect("five inputs");
            Ok((first, fids))
        },
        jobs,
    )?;
    let result = aggregate(samples)?;

    let mut labels = vec!["++"];
    labels.extend(LOGICAL_LABELS);
    let per_input: Vec<InputFidelity> = labels
        .iter()
        .zip(&result.observables)
        .map(|(l, e)| InputFidelity {
            label: (*l).to_owned(),
            fidelity: e.mean,
        })
        .collect();
    let primary = result.observables[0];
    let mut report = GateErrorReport::new(per_input, error_from_fidelity(primary.mean));
    report.std_error = Some(primary.std_error);
    report.seed = Some(spec.seed);
    report.metadata = vec![
        ("lambda".into(), spec.transfer_rate),
        (
            "ratio".into(),
            spec.transfer_rate / spec.fjs.delta_omega_s.abs(),
        ),
        ("omega_int".into(), spec.fjs.omega_int),
        ("delta_omega_s".into(), spec.fjs.delta_omega_s),
        ("shift_offset".into(), spec.shift_offset),
        ("kappa".into(), spec.photon_loss),
        ("wait_time".into(), spec.wait_time()),
        ("transfer_time".into(), spec.transfer_time()),
        ("calibration_error".into(), calibration_error),
        ("samples".into(), spec.samples as f64),
    ];
    Ok(report)
}

/// Noiseless protocol output on the equal logical superposition, with the
/// SQUID phase at its mean and the configured shift offset.
pub fn cphase_noiseless_output(spec: &CphaseSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    let cell = Cell::new(false)?;
    let u = protocol_unitary(spec, &cell, spec.shift_offset, spec.fjs.omega_int);
    Ok(cell.plus_plus().evolve(&u)?.to_density_matrix())
}

/// Phases of the logical amplitudes `00, 01, 10, 11` relative to `|01⟩`,
/// each in (−π, π].
///
/// `rho` must live on the two-rail cell (`rail1 ⊗ rail2`, three or four
/// levels each) and keep at least 99% of its population in the logical
/// subspace.
pub fn logical_phase_extract(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let dims = rho.space().dims();
    let labels: Vec<&str> = rho.space().labels().collect();
    if labels != ["rail1", "rail2"] || dims[0] != dims[1] || !(3..=4).contains(&dims[0]) {
        return invalid(format!("expected a two-rail cell, got {}", rho.space()));
    }
    let cell = Cell::new(dims[0] == 4)?;
    let population: f64 = cell.logical.iter().map(|&i| rho.element(i, i).re).sum();
    if population < LOGICAL_POPULATION_FLOOR {
        return Err(Error::Leakage { population });
    }
    let reference = cell.logical[1];
    if rho.element(reference, reference).re < 1e-12 {
        return invalid("the |01⟩ reference amplitude vanishes");
    }
    let mut phases = [0.0; 4];
    for (k, &i) in cell.logical.iter().enumerate() {
        phases[k] = wrap(rho.element(i, reference).arg());
    }
    Ok(phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::DeviceParams;
    use crate::device::{FjsParams, TlrParams};

    fn fjs() -> FjsDerived {
        DeviceParams::default().fjs_derived().unwrap()
    }

    fn fjs_without_shift_noise() -> FjsDerived {
        let tlr = TlrParams::default();
        let p = FjsParams {
            phi2_spread_scale: 0.0,
            ..FjsParams::matched(&tlr, &tlr)
        };
        crate::device::fjs_derive(&p, &tlr, &tlr).unwrap()
    }

    fn max_phase_gap(a: &[f64; 4], b: &[f64; 4]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| wrap(x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ideal_limit_phases_and_error() {
        let f = fjs_without_shift_noise();
        let spec = CphaseSpec {
            samples: 64,
            ..CphaseSpec::new(f, 1e4 * f.omega_int.abs())
        };
        let out = cphase_noiseless_output(&spec).unwrap();
        let phases = logical_phase_extract(&out).unwrap();
        assert!(
            max_phase_gap(&phases, &[PI, 0.0, 0.0, PI]) < 1e-3,
            "{phases:?}"
        );
        let report = cphase_spin_echo_error(&spec, 0).unwrap();
        assert!(report.primary_error < 1e-5, "{}", report.primary_error);
    }

    #[test]
    fn instantaneous_transfers_give_exact_pattern() {
        let spec = CphaseSpec {
            transfers: TransferMode::Instantaneous,
            ..CphaseSpec::new(fjs(), 1.0)
        };
        let phases = logical_phase_extract(&cphase_noiseless_output(&spec).unwrap()).unwrap();
        assert!(
            max_phase_gap(&phases, &[PI, 0.0, 0.0, PI]) < 1e-12,
            "{phases:?}"
        );
    }

    #[test]
    fn echo_cancels_static_shift() {
        let base = CphaseSpec {
            transfers: TransferMode::Instantaneous,
            ..CphaseSpec::new(fjs(), 1.0)
        };
        let a = logical_phase_extract(&cphase_noiseless_output(&base).unwrap()).unwrap();
        let shifted = CphaseSpec {
            shift_offset: 3.7 * fjs().delta_omega_s,
            ..base.clone()
        };
        let b = logical_phase_extract(&cphase_noiseless_output(&shifted).unwrap()).unwrap();
        assert!(max_phase_gap(&a, &b) < 1e-9);
    }

    #[test]
    fn simulated_flips_match_ideal_without_leakage() {
        // with instantaneous transfers no amplitude is left in C/D when the
        // flips run, so the flip phases are global
        let base = CphaseSpec {
            samples: 16,
            transfers: TransferMode::Instantaneous,
            ..CphaseSpec::new(fjs(), 20.0 * fjs().delta_omega_s.abs())
        };
        let sim = CphaseSpec {
            flips: FlipMode::Simulated,
            flip_rate: 50.0 * fjs().delta_omega_s.abs(),
            ..base.clone()
        };
        let a = cphase_spin_echo_error(&base, 1).unwrap();
        let b = cphase_spin_echo_error(&sim, 1).unwrap();
        assert!((a.primary_error - b.primary_error).abs() < 1e-9);
    }

    #[test]
    fn lossy_cell_reduces_to_lossless_at_zero_rate() {
        // κ → tiny: the 4-level Lindblad path agrees with the 3-level unitary one
        let base = CphaseSpec {
            samples: 4,
            ..CphaseSpec::new(fjs(), 20.0 * fjs().delta_omega_s.abs())
        };
        let lossy = CphaseSpec {
            photon_loss: 1e-9,
            ..base.clone()
        };
        let a = cphase_spin_echo_error(&base, 1).unwrap();
        let b = cphase_spin_echo_error(&lossy, 1).unwrap();
        assert!((a.primary_error - b.primary_error).abs() < 1e-8);
        let with_loss = CphaseSpec {
            photon_loss: 2.0 * PI * 10e3,
            ..base
        };
        let c = cphase_spin_echo_error(&with_loss, 1).unwrap();
        assert!(c.primary_error > a.primary_error);
    }

    #[test]
    fn phase_extraction_examples() {
        let cell = Cell::new(false).unwrap();
        let plus = cell.plus_plus().to_density_matrix();
        assert_eq!(logical_phase_extract(&plus).unwrap(), [0.0; 4]);

        // Z(θ) on qubit 1 as diag(e^{iθ}, 1): amplitudes 00, 01 pick up θ
        let theta = 0.8;
        let mut v = cell.plus_plus().amplitudes().clone();
        for k in [0, 1] {
            v[cell.logical[k]] *= Complex64::from_polar(1.0, theta);
        }
        let z = StateVector::new(cell.space.clone(), v)
            .unwrap()
            .to_density_matrix();
        let phases = logical_phase_extract(&z).unwrap();
        let want = [0.0, 0.0, -theta, -theta];
        assert!(max_phase_gap(&phases, &want) < 1e-14);

        let mut leaked = CVector::zeros(9);
        leaked[cell.logical[1]] = Complex64::new(0.5, 0.0);
        leaked[cell.space.index_of(&[AUX, AUX]).unwrap()] = Complex64::new(0.75f64.sqrt(), 0.0);
        let leaked = StateVector::new(cell.space.clone(), leaked)
            .unwrap()
            .to_density_matrix();
        assert!(matches!(
            logical_phase_extract(&leaked),
            Err(Error::Leakage { .. })
        ));
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
