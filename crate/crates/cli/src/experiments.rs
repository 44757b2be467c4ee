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

//! The sweep experiments and the parameter report.

use tlrsim::detector::efficiency_sweep;
use tlrsim::device::{
    angular, dispersive_regime, effective_dephasing_rate, induced_loss_rate, thermal_occupancy,
    transfer_rate, DeviceParams, DispersiveRegime,
};
use tlrsim::gates::{
    cphase_spin_echo_error, transfer_gate_error, CphaseSpec, FlipMode, TransferMode, TransferSpec,
};
use tlrsim::montecarlo::{derive_seed, run_indexed};

use crate::config::{to_hz, Flips, RunConfig, Transfers};
use crate::csv::{SweepResult, Value};
use crate::CliError;

fn text(s: &str) -> Value {
    Value::Text(s.into())
}

fn regime_warning(what: &str, g: f64, delta: f64) -> Option<String> {
    match dispersive_regime(g, delta) {
        DispersiveRegime::Deep => None,
        r => Some(format!(
            "{what} coupler |delta|/g = {:.3} ({r:?} dispersive regime)",
            delta.abs() / g
        )),
    }
}

/// Derived device quantities with units.
pub fn cmd_params(config: &RunConfig) -> Result<SweepResult, CliError> {
    let dev = config.device()?;
    let fjs = dev
        .fjs_derived()
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let (g_c, delta_c) = (dev.g_c(), dev.delta_c());
    let phys = |r: tlrsim::Result<f64>| r.map_err(|e| CliError::Invalid(e.to_string()));

    let mut out = SweepResult::new("params", &["quantity", "value", "unit"], config.noise.seed);
    out.warnings
        .extend(regime_warning("transfer", g_c, delta_c));
    out.warnings
        .extend(regime_warning("phase", dev.g_r(), dev.delta_r()));
    let rows: Vec<(&str, f64, &str)> = vec![
        ("omega0_over_2pi", to_hz(dev.omega0()), "Hz"),
        ("g_c_over_2pi", to_hz(g_c), "Hz"),
        ("g_r_over_2pi", to_hz(dev.g_r()), "Hz"),
        ("delta_c_over_2pi", to_hz(delta_c), "Hz"),
        ("detuning_over_coupling", delta_c.abs() / g_c, "1"),
        ("transfer_rate", phys(transfer_rate(g_c, delta_c))?, "Hz"),
        (
            "effective_dephasing_over_2pi",
            to_hz(phys(effective_dephasing_rate(
                g_c,
                delta_c,
                dev.cbjj.dephasing_rate,
            ))?),
            "Hz",
        ),
        (
            "induced_loss_over_2pi",
            to_hz(phys(induced_loss_rate(g_c, delta_c, dev.cbjj.decay_rate))?),
            "Hz",
        ),
        (
            "thermal_occupancy",
            phys(thermal_occupancy(dev.temperature, dev.omega0()))?,
            "1",
        ),
        ("chi", fjs.chi_c, "1"),
        ("mutual_inductance_d", dev.fjs.mutual_inductance_d, "H"),
        ("phi0", fjs.phi0, "rad"),
        ("sigma_phi", fjs.sigma_phi, "rad"),
        ("omega_s_over_2pi", to_hz(fjs.omega_s), "Hz"),
        ("delta_omega_s_over_2pi", to_hz(fjs.delta_omega_s), "Hz"),
        ("omega_int_over_2pi", to_hz(fjs.omega_int), "Hz"),
        ("delta_omega_int_relative", fjs.delta_omega_int_rel, "1"),
    ];
    for (name, value, unit) in rows {
        out.push(vec![text(name), value.into(), text(unit)]);
    }
    Ok(out)
}

fn transfer_spec(
    config: &RunConfig,
    dev: &DeviceParams,
    kappa_hz: f64,
    gamma2_hz: f64,
) -> TransferSpec {
    TransferSpec {
        photon_loss: angular(kappa_hz),
        cbjj_dephasing: angular(gamma2_hz),
        cbjj_decay: if config.transfer_sweep.include_cbjj_decay {
            dev.cbjj.decay_rate
        } else {
            0.0
        },
        integrator: config.integrator(),
        ..TransferSpec::new(dev.g_c(), dev.delta_c())
    }
}

/// Transfer error over the κ × Γ₂ grid, κ slowest.
pub fn cmd_transfer_error(config: &RunConfig, jobs: usize) -> Result<SweepResult, CliError> {
    config.validate()?;
    let dev = config.device()?;
    let kappas = &config.transfer_sweep.kappa_hz;
    let gammas = &config.transfer_sweep.gamma2_hz;
    let points: Vec<(f64, f64)> = kappas
        .iter()
        .flat_map(|&k| gammas.iter().map(move |&g| (k, g)))
        .collect();

    let results = run_indexed(points.len(), jobs, |i| {
        let (k, g) = points[i];
        transfer_gate_error(&transfer_spec(config, &dev, k, g))
            .map(|r| r.primary_error)
            .map_err(|e| {
                CliError::Experiment(format!(
                    "transfer-error at kappa_hz={k}, gamma2_hz={g}: {e}"
                ))
            })
    });

    let mut out = SweepResult::new(
        "transfer-error",
        &["kappa_hz", "gamma2_hz", "error", "neg_log10_error"],
        config.noise.seed,
    );
    out.warnings
        .extend(regime_warning("transfer", dev.g_c(), dev.delta_c()));
    for ((k, g), r) in points.iter().zip(results) {
        let e = r?;
        out.push(vec![
            (*k).into(),
            (*g).into(),
            e.into(),
            (-e.log10()).into(),
        ]);
    }
    Ok(out)
}

/// CZ error over the λ/|δω_s| grid. Point `i` runs its Monte Carlo with
/// the seed derived from `(seed, i)`.
pub fn cmd_cphase_error(config: &RunConfig, jobs: usize) -> Result<SweepResult, CliError> {
    config.validate()?;
    let dev = config.device()?;
    let fjs = dev
        .fjs_derived()
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let c = &config.cphase;
    let flip_rate = match c.flip_rate_hz {
        Some(f) => angular(f),
        None => (dev.g_c() * dev.g_c() / dev.delta_c()).abs(),
    };
    let samples = config.noise.samples;

    let mut out = SweepResult::new(
        "cphase-error",
        &["ratio", "error", "std_err", "n_samples", "seed"],
        config.noise.seed,
    );
    out.authoritative = samples >= 100;
    for (i, &ratio) in c.ratios.iter().enumerate() {
        let seed = derive_seed(config.noise.seed, i as u64);
        let spec = CphaseSpec {
            photon_loss: angular(c.kappa_hz),
            flips: match c.flips {
                Flips::Ideal => FlipMode::Ideal,
                Flips::Simulated => FlipMode::Simulated,
            },
            flip_rate,
            transfers: match c.transfers {
                Transfers::Finite => TransferMode::Finite,
                Transfers::Instantaneous => TransferMode::Instantaneous,
            },
            samples,
            seed,
            ..CphaseSpec::new(fjs, CphaseSpec::lambda_for_ratio(&fjs, ratio))
        };
        let r = cphase_spin_echo_error(&spec, jobs)
            .map_err(|e| CliError::Experiment(format!("cphase-error at ratio={ratio}: {e}")))?;
        out.push(vec![
            ratio.into(),
            r.primary_error.into(),
            r.std_error.unwrap_or(0.0).into(),
            (samples as u64).into(),
            seed.into(),
        ]);
    }
    Ok(out)
}

/// Detection efficiency over the Γ/κ grid. Rows that did not converge are
/// flagged; the command fails only if every row failed.
pub fn cmd_detector(config: &RunConfig, jobs: usize) -> Result<SweepResult, CliError> {
    config.validate()?;
    let p = config.detector_params();
    let sweep = efficiency_sweep(&p, &config.detector.ratios, jobs)
        .map_err(|e| CliError::Experiment(format!("detector: {e}")))?;
    let mut out = SweepResult::new(
        "detector",
        &[
            "gamma_over_kappa",
            "efficiency",
            "one_minus_eff",
            "converged",
            "t_final_s",
        ],
        config.noise.seed,
    );
    for (ratio, r) in &sweep {
        out.push(vec![
            (*ratio).into(),
            r.efficiency.into(),
            (1.0 - r.efficiency).into(),
            r.converged.into(),
            r.t_final.into(),
        ]);
    }
    if sweep.iter().all(|(_, r)| !r.converged) {
        out.failure = Some("detector: no grid point converged".into());
    }
    for (ratio, r) in &sweep {
        if !r.converged {
            out.warnings
                .push(format!("gamma_over_kappa={ratio} did not converge"));
        }
    }
    Ok(out)
}
