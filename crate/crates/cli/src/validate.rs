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

//! Invariant checks across the simulator, one report line per check.
//!
//! Each line is `id,status,measured,bound`. A check whose computation
//! itself fails is reported as `FAIL` with a `nan` measurement and the
//! error on a following `#` line.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use tlrsim::detector::{
    build_detector_liouvillian, detection_efficiency, detector_initial_state, detector_space,
    DetectorParams, E, G,
};
use tlrsim::device::{
    angular, dispersive_regime, to_angular, to_linear, DeviceParams, DispersiveRegime,
};
use tlrsim::gates::cphase::cphase_noiseless_output;
use tlrsim::gates::{
    dispersive_convergence, logical_phase_extract, transfer_error_quasistatic,
    transfer_full_model_error, transfer_gate_error, CphaseSpec, TransferMode, TransferSpec,
};
use tlrsim::lindblad::{
    build_liouvillian, propagate_rk4, LindbladTerm, Liouvillian, Propagator, Segment,
};
use tlrsim::quantum::{
    annihilation, embed, fidelity, DensityMatrix, HilbertSpace, Operator, StateVector,
};

use crate::config::{RunConfig, Tolerances};
use crate::csv::format_float;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub measured: f64,
    pub bound: String,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("id,status,measured,bound\n");
        for c in &self.checks {
            writeln!(
                out,
                "{},{},{},{}",
                c.id,
                c.status.as_str(),
                format_float(c.measured),
                c.bound
            )
            .unwrap();
            if let Some(n) = &c.note {
                writeln!(out, "# {}: {n}", c.id).unwrap();
            }
        }
        out
    }

    fn at_most(&mut self, id: &str, measured: Measured, bound: f64) {
        self.push(id, measured, |m| m <= bound, format_float(bound));
    }

    fn at_least(&mut self, id: &str, measured: Measured, bound: f64) {
        self.push(
            id,
            measured,
            |m| m >= bound,
            format!(">={}", format_float(bound)),
        );
    }

    fn push(&mut self, id: &str, measured: Measured, ok: impl Fn(f64) -> bool, bound: String) {
        let check = match measured {
            Ok(m) => Check {
                id: id.into(),
                status: if ok(m) { Status::Pass } else { Status::Fail },
                measured: m,
                bound,
                note: None,
            },
            Err(e) => Check {
                id: id.into(),
                status: Status::Fail,
                measured: f64::NAN,
                bound,
                note: Some(e),
            },
        };
        self.checks.push(check);
    }
}

type Measured = std::result::Result<f64, String>;

fn measured(r: tlrsim::Result<f64>) -> Measured {
    r.map_err(|e| e.to_string())
}

/// A and B truncated to one photon each.
struct Modes {
    space: HilbertSpace,
    a: Operator,
    b: Operator,
    exchange: Operator,
}

impl Modes {
    fn new() -> tlrsim::Result<Self> {
        let space = HilbertSpace::new([("A", 2), ("B", 2)])?;
        let a1 = annihilation(2)?;
        let a = embed(&a1, &space, "A")?;
        let b = embed(&a1, &space, "B")?;
        let exchange = &(&a.adjoint() * &b) + &(&a * &b.adjoint());
        Ok(Self {
            space,
            a,
            b,
            exchange,
        })
    }

    fn number(&self) -> Operator {
        &(&self.a.adjoint() * &self.a) + &(&self.b.adjoint() * &self.b)
    }

    fn inputs(&self) -> tlrsim::Result<Vec<DensityMatrix>> {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let s = &self.space;
        Ok(vec![
            StateVector::basis(s, &[1, 0])?.to_density_matrix(),
            StateVector::superposition(s, &[(&[1, 0][..], one), (&[0, 1][..], one)])?
                .to_density_matrix(),
            StateVector::superposition(s, &[(&[1, 0][..], one), (&[0, 1][..], i)])?
                .to_density_matrix(),
        ])
    }

    /// Effective transfer Liouvillian of `spec`.
    fn liouvillian(&self, spec: &TransferSpec) -> tlrsim::Result<Liouvillian> {
        let r = (spec.coupling / spec.detuning).powi(2);
        let loss = spec.total_loss()?;
        build_liouvillian(
            &(&self.exchange * spec.exchange_rate()),
            &[
                LindbladTerm::new(loss, self.a.clone())?,
                LindbladTerm::new(loss, self.b.clone())?,
                LindbladTerm::new(2.0 * r * spec.cbjj_dephasing, self.exchange.clone())?,
            ],
        )
    }
}

/// Worst diagnostics over a set of propagations.
#[derive(Default)]
struct Worst {
    drift: f64,
    hermiticity: f64,
    min_eigenvalue: f64,
}

impl Worst {
    fn record(&mut self, p: &Propagator, rho: &DensityMatrix) -> tlrsim::Result<()> {
        let (_, d) = p.apply_with_diagnostics(rho)?;
        self.drift = self.drift.max(d.trace_drift);
        self.hermiticity = self.hermiticity.max(d.hermiticity);
        self.min_eigenvalue = self.min_eigenvalue.min(d.min_eigenvalue);
        Ok(())
    }
}

fn operating_point(dev: &DeviceParams) -> TransferSpec {
    TransferSpec {
        photon_loss: dev.tlr.photon_loss_rate,
        cbjj_dephasing: dev.cbjj.dephasing_rate,
        ..TransferSpec::new(dev.g_c(), dev.delta_c())
    }
}

/// Transfer propagations at the operating point plus the detector out to
/// long times.
fn state_diagnostics(dev: &DeviceParams, det: &DetectorParams) -> tlrsim::Result<Worst> {
    let mut w = Worst::default();
    let modes = Modes::new()?;
    let spec = operating_point(dev);
    spec.validate()?;
    let l = modes.liouvillian(&spec)?;
    let t = spec.gate_time();
    for rho in modes.inputs()? {
        for k in 1..=4 {
            w.record(&Propagator::new(&l, t * k as f64 / 4.0)?, &rho)?;
        }
    }
    let ld = build_detector_liouvillian(det)?;
    let rho0 = detector_initial_state();
    let mut p = Propagator::new(&ld, 1e-10)?;
    for _ in 0..24 {
        w.record(&p, &rho0)?;
        p = p.squared();
    }
    Ok(w)
}

fn cross_propagator(dev: &DeviceParams, det: &DetectorParams, step: f64) -> tlrsim::Result<f64> {
    let modes = Modes::new()?;
    let spec = operating_point(dev);
    spec.validate()?;
    let l = modes.liouvillian(&spec)?;
    let t = spec.gate_time();
    let mut worst: f64 = 0.0;
    for rho in modes.inputs()? {
        let a = Propagator::new(&l, t)?.apply(&rho)?;
        let b = propagate_rk4(&[Segment::new(&l, t)], &rho, step)?;
        worst = worst.max(a.trace_distance(&b)?);
    }
    let ld = build_detector_liouvillian(det)?;
    let rho0 = detector_initial_state();
    let t = 20e-9;
    let a = Propagator::new(&ld, t)?.apply(&rho0)?;
    let b = propagate_rk4(&[Segment::new(&ld, t)], &rho0, step)?;
    Ok(worst.max(a.trace_distance(&b)?))
}

/// `|⟨N⟩(t) − ⟨N⟩(0)|` under exchange plus exchange dephasing.
fn excitation_drift(dev: &DeviceParams) -> tlrsim::Result<f64> {
    let modes = Modes::new()?;
    let spec = TransferSpec {
        photon_loss: 0.0,
        ..operating_point(dev)
    };
    spec.validate()?;
    let l = modes.liouvillian(&spec)?;
    let n = modes.number();
    let mut worst: f64 = 0.0;
    for rho in modes.inputs()? {
        let n0 = n.expectation(&rho)?.re;
        for k in 1..=8 {
            let out = Propagator::new(&l, spec.gate_time() * k as f64 / 4.0)?.apply(&rho)?;
            worst = worst.max((n.expectation(&out)?.re - n0).abs());
        }
    }
    Ok(worst)
}

/// Closed-system drift of ⟨H⟩ for the exchange Hamiltonian.
fn energy_drift(dev: &DeviceParams) -> tlrsim::Result<f64> {
    let modes = Modes::new()?;
    let spec = TransferSpec {
        photon_loss: 0.0,
        cbjj_dephasing: 0.0,
        ..operating_point(dev)
    };
    let h = &modes.exchange * spec.exchange_rate();
    let l = build_liouvillian(&h, &[])?;
    let mut worst: f64 = 0.0;
    for rho in modes.inputs()? {
        let e0 = h.expectation(&rho)?.re;
        let out = Propagator::new(&l, 0.37 * spec.gate_time())?.apply(&rho)?;
        worst = worst.max((h.expectation(&out)?.re - e0).abs() / spec.exchange_rate().abs());
    }
    Ok(worst)
}

/// Largest one-step purity increase under unital dynamics.
fn purity_increase(dev: &DeviceParams) -> tlrsim::Result<f64> {
    let modes = Modes::new()?;
    let spec = TransferSpec {
        photon_loss: 0.0,
        ..operating_point(dev)
    };
    let l = modes.liouvillian(&spec)?;
    let p = Propagator::new(&l, spec.gate_time() / 16.0)?;
    let mut worst = f64::NEG_INFINITY;
    for mut rho in modes.inputs()? {
        for _ in 0..32 {
            let next = p.apply(&rho)?;
            worst = worst.max(next.purity() - rho.purity());
            rho = next;
        }
    }
    Ok(worst.max(0.0))
}

/// `1 − F` after one resonant vacuum-Rabi period on the detector.
fn rabi_return(det: &DetectorParams) -> tlrsim::Result<f64> {
    let p = DetectorParams {
        detuning: 0.0,
        photon_loss: 0.0,
        escape_rate: 0.0,
        intra_well_decay: 0.0,
        dephasing: 0.0,
        ..*det
    };
    let l = build_detector_liouvillian(&p)?;
    let space = detector_space();
    let psi = StateVector::basis(&space, &[1, G])?;
    let mut worst: f64 = 0.0;
    for periods in [1.0, 3.0] {
        let out = Propagator::new(&l, periods * 2.0 * PI / p.coupling)?
            .apply(&psi.to_density_matrix())?;
        worst = worst.max(1.0 - fidelity(&out, &psi)?);
    }
    let half = Propagator::new(&l, PI / (2.0 * p.coupling))?.apply(&psi.to_density_matrix())?;
    let swapped = StateVector::basis(&space, &[0, E])?;
    worst = worst.max(1.0 - fidelity(&half, &swapped)?);
    Ok(worst)
}

/// Largest logical-phase change between two static shift offsets with
/// instantaneous transfers.
fn echo_independence(dev: &DeviceParams) -> tlrsim::Result<f64> {
    let fjs = dev.fjs_derived()?;
    let base = CphaseSpec {
        transfers: TransferMode::Instantaneous,
        ..CphaseSpec::new(fjs, 20.0 * fjs.delta_omega_s.abs())
    };
    let p0 = logical_phase_extract(&cphase_noiseless_output(&base)?)?;
    let mut worst: f64 = 0.0;
    for offset in [0.5, 3.0, -7.0] {
        let spec = CphaseSpec {
            shift_offset: offset * fjs.delta_omega_s.abs(),
            ..base.clone()
        };
        let p = logical_phase_extract(&cphase_noiseless_output(&spec)?)?;
        for (a, b) in p.iter().zip(&p0) {
            let d = (a - b).rem_euclid(2.0 * PI);
            worst = worst.max(d.min(2.0 * PI - d));
        }
    }
    Ok(worst)
}

/// |MC − Lindblad| in Monte Carlo standard errors.
fn monte_carlo_agreement(
    dev: &DeviceParams,
    samples: usize,
    seed: u64,
    jobs: usize,
) -> tlrsim::Result<f64> {
    let spec = operating_point(dev);
    let lindblad = transfer_gate_error(&spec)?.primary_error;
    let mc = transfer_error_quasistatic(&spec, samples, seed, jobs)?;
    let se = mc.std_error.unwrap_or(0.0);
    Ok((mc.primary_error - lindblad).abs() / se)
}

fn dispersive_base(dev: &DeviceParams) -> TransferSpec {
    TransferSpec {
        photon_loss: dev.tlr.photon_loss_rate,
        cbjj_dephasing: dev.cbjj.dephasing_rate,
        cbjj_decay: dev.cbjj.decay_rate,
        ..TransferSpec::new(dev.g_c(), dev.delta_c())
    }
}

/// Count of adjacent pairs that violate monotonicity on a 3×3 transfer
/// grid.
fn transfer_monotonicity(dev: &DeviceParams) -> tlrsim::Result<f64> {
    let kappas = [angular(1e3), angular(1e4), angular(1e5)];
    let gammas = [angular(1e5), angular(1e6), angular(1e7)];
    let mut e = [[0.0; 3]; 3];
    for (i, &k) in kappas.iter().enumerate() {
        for (j, &g) in gammas.iter().enumerate() {
            let spec = TransferSpec {
                photon_loss: k,
                cbjj_dephasing: g,
                ..TransferSpec::new(dev.g_c(), dev.delta_c())
            };
            e[i][j] = transfer_gate_error(&spec)?.primary_error;
        }
    }
    let mut bad = 0;
    #[allow(clippy::needless_range_loop)]
    for i in 0..3 {
        for j in 0..2 {
            bad += usize::from(e[i][j + 1] < e[i][j]);
            bad += usize::from(e[j + 1][i] < e[j][i]);
        }
    }
    Ok(bad as f64)
}

/// Violations of efficiency monotonicity in Γ over a coarse grid.
fn detector_monotonicity(det: &DetectorParams) -> tlrsim::Result<f64> {
    let mut last = f64::NEG_INFINITY;
    let mut bad = 0;
    for ratio in [10.0, 100.0, 1000.0, 10000.0] {
        let p = DetectorParams {
            escape_rate: ratio * det.photon_loss,
            ..*det
        };
        let eta = detection_efficiency(&p)?.efficiency;
        bad += usize::from(eta < last - 1e-9);
        last = eta;
    }
    Ok(bad as f64)
}

fn dephasing_sensitivity(det: &DetectorParams) -> tlrsim::Result<f64> {
    let a = detection_efficiency(det)?.efficiency;
    let b = detection_efficiency(&DetectorParams {
        dephasing: det.dephasing * 10.0,
        ..*det
    })?
    .efficiency;
    Ok((a - b).abs())
}

fn unit_round_trip() -> tlrsim::Result<f64> {
    let mut bad = 0;
    for k in 0..1000 {
        let f = 1e3 * 1.0137f64.powi(k) + 0.1 * k as f64;
        bad += usize::from(to_linear(to_angular(f)) != f);
    }
    Ok(bad as f64)
}

/// Runs every check.
pub fn cmd_validate(config: &RunConfig, jobs: usize) -> Result<ValidationReport, CliError> {
    let dev = config.device()?;
    let det = config.detector_params();
    let tol: &Tolerances = &config.integrator.tolerances;
    let mut r = ValidationReport::default();

    let ratio = dev.delta_c().abs() / dev.g_c();
    r.checks.push(Check {
        id: "dispersive_regime".into(),
        status: match dispersive_regime(dev.g_c(), dev.delta_c()) {
            DispersiveRegime::Deep => Status::Pass,
            _ => Status::Warn,
        },
        measured: ratio,
        bound: format!(">={}", format_float(10.0)),
        note: (ratio < 10.0).then(|| {
            format!("|delta|/g = {ratio:.3}; the effective transfer model needs |delta| >= 5 g")
        }),
    });

    let diag = state_diagnostics(&dev, &det).map_err(|e| e.to_string());
    r.at_most(
        "trace_preservation",
        diag.as_ref().map(|w| w.drift).map_err(Clone::clone),
        tol.trace,
    );
    r.at_most(
        "hermiticity",
        diag.as_ref().map(|w| w.hermiticity).map_err(Clone::clone),
        tol.hermiticity,
    );
    r.at_least(
        "positivity",
        diag.as_ref()
            .map(|w| w.min_eigenvalue)
            .map_err(Clone::clone),
        tol.positivity_floor,
    );
    r.at_most(
        "cross_propagator",
        measured(cross_propagator(&dev, &det, config.integrator.step_s)),
        tol.cross_propagator,
    );
    r.at_most(
        "excitation_conservation",
        measured(excitation_drift(&dev)),
        tol.excitation_conservation,
    );
    r.at_most(
        "energy_conservation",
        measured(energy_drift(&dev)),
        tol.excitation_conservation,
    );
    r.at_most(
        "purity_nonincreasing",
        measured(purity_increase(&dev)),
        tol.trace,
    );
    r.at_most("rabi_return", measured(rabi_return(&det)), tol.rabi_return);
    r.at_most(
        "echo_independence",
        measured(echo_independence(&dev)),
        tol.echo_independence,
    );
    r.at_most(
        "monte_carlo_equivalence",
        measured(monte_carlo_agreement(
            &dev,
            config.noise.samples,
            config.noise.seed,
            jobs,
        )),
        tol.monte_carlo_sigmas,
    );

    let base = dispersive_base(&dev);
    let eps = 0.1;
    let leakage = transfer_full_model_error(&TransferSpec {
        detuning: base.coupling / eps * base.detuning.signum(),
        ..base
    })
    .map(|f| f.peak_excitation);
    r.at_most(
        "dispersive_leakage",
        measured(leakage),
        tol.leakage_factor * eps * eps,
    );

    let bound = format!(
        "[{},{}]",
        format_float(tol.convergence_ratio_min),
        format_float(tol.convergence_ratio_max)
    );
    let in_band = |m: f64| m >= tol.convergence_ratio_min && m <= tol.convergence_ratio_max;
    let points = dispersive_convergence(&base, &[0.1, 0.05, 0.025]).map_err(|e| e.to_string());
    for (k, id) in ["dispersive_convergence_1", "dispersive_convergence_2"]
        .iter()
        .enumerate()
    {
        let q = points
            .as_ref()
            .map(|p| p[k].difference / p[k + 1].difference)
            .map_err(Clone::clone);
        r.push(id, q, in_band, bound.clone());
    }

    r.at_most(
        "transfer_monotonicity",
        measured(transfer_monotonicity(&dev)),
        0.0,
    );
    r.at_most(
        "detector_monotonicity",
        measured(detector_monotonicity(&det)),
        0.0,
    );
    r.at_most(
        "detector_dephasing_sensitivity",
        measured(dephasing_sensitivity(&det)),
        0.01,
    );
    r.at_most("unit_round_trip", measured(unit_round_trip()), 0.0);
    Ok(r)
}
