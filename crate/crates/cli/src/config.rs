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

//! Run configuration.
//!
//! A single JSON object. Every section and every key is optional; missing
//! values take the documented defaults and unknown keys are rejected.
//! Frequencies and rates are linear (Hz), passives SI, times in seconds.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use tlrsim::detector::DetectorParams;
use tlrsim::device::{
    angular, CbjjParams, CouplerParams, DeviceParams, FjsParams, TlrParams, TWO_PI,
};
use tlrsim::lindblad::Integrator;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TlrSection {
    pub inductance_h: f64,
    pub capacitance_f: f64,
    pub length_m: f64,
    pub mode_index: u32,
}

impl Default for TlrSection {
    fn default() -> Self {
        let t = TlrParams::default();
        Self {
            inductance_h: t.inductance,
            capacitance_f: t.capacitance,
            length_m: t.length,
            mode_index: t.mode_index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CbjjSection {
    pub junction_capacitance_f: f64,
    /// Δ/2π = (Ω − ω₀)/2π.
    pub detuning_hz: f64,
    /// Γ₁/2π.
    pub decay_hz: f64,
}

impl Default for CbjjSection {
    fn default() -> Self {
        Self {
            junction_capacitance_f: 0.5e-12,
            detuning_hz: 2e9,
            decay_hz: 0.1e6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplerSection {
    pub coupling_capacitance_f: f64,
    pub right_coupling_capacitance_f: f64,
}

impl Default for CouplerSection {
    fn default() -> Self {
        let c = CouplerParams::default();
        Self {
            coupling_capacitance_f: c.coupling_capacitance,
            right_coupling_capacitance_f: c.right_coupling_capacitance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FjsSection {
    pub critical_current_a: f64,
    pub junction_capacitance_f: f64,
    pub shunt_capacitance_f: f64,
    pub squid_self_inductance_h: f64,
    pub loop_inductance_h: f64,
    pub mutual_inductance_c_h: f64,
    /// `null` solves M_D so that χ_d = χ_c.
    pub mutual_inductance_d_h: Option<f64>,
    pub bias_current_a: f64,
    pub phi2_spread_scale: f64,
}

impl Default for FjsSection {
    fn default() -> Self {
        let t = TlrParams::default();
        let f = FjsParams::matched(&t, &t);
        Self {
            critical_current_a: f.critical_current,
            junction_capacitance_f: f.junction_capacitance,
            shunt_capacitance_f: f.shunt_capacitance,
            squid_self_inductance_h: f.squid_self_inductance,
            loop_inductance_h: f.loop_inductance,
            mutual_inductance_c_h: f.mutual_inductance_c,
            mutual_inductance_d_h: None,
            bias_current_a: f.bias_current,
            phi2_spread_scale: f.phi2_spread_scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    pub coupling_hz: f64,
    pub detuning_hz: f64,
    pub photon_loss_hz: f64,
    pub escape_rate_hz: f64,
    pub intra_well_decay_hz: f64,
    pub dephasing_hz: f64,
    /// Γ/κ grid, κ fixed at `photon_loss_hz`.
    pub ratios: Vec<f64>,
}

impl Default for DetectorSection {
    fn default() -> Self {
        Self {
            coupling_hz: 100e6,
            detuning_hz: 0.0,
            photon_loss_hz: 10e3,
            escape_rate_hz: 20e6,
            intra_well_decay_hz: 100e3,
            dephasing_hz: 1e6,
            ratios: vec![10.0, 100.0, 1000.0, 2000.0, 10000.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// κ/2π on every resonator.
    pub kappa_hz: f64,
    /// Γ₂/2π of the transfer coupler.
    pub gamma2_hz: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            kappa_hz: 10e3,
            gamma2_hz: 1e6,
            samples: 1000,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Expm,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub trace: f64,
    pub hermiticity: f64,
    pub positivity_floor: f64,
    pub cross_propagator: f64,
    pub excitation_conservation: f64,
    pub rabi_return: f64,
    pub echo_independence: f64,
    /// Allowed |MC − Lindblad| in standard errors.
    pub monte_carlo_sigmas: f64,
    /// Peak coupler excitation bound, in units of (g/Δ)².
    pub leakage_factor: f64,
    pub convergence_ratio_min: f64,
    pub convergence_ratio_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trace: 1e-9,
            hermiticity: 1e-9,
            positivity_floor: -1e-8,
            cross_propagator: 1e-6,
            excitation_conservation: 1e-9,
            rabi_return: 1e-9,
            echo_independence: 1e-9,
            monte_carlo_sigmas: 3.0,
            leakage_factor: 4.0,
            convergence_ratio_min: 1.5,
            convergence_ratio_max: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub method: Method,
    /// Initial RK4 step.
    pub step_s: f64,
    pub tolerances: Tolerances,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            method: Method::Expm,
            step_s: 1e-11,
            tolerances: Tolerances::default(),
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransferSweepSection {
    pub kappa_hz: Vec<f64>,
    pub gamma2_hz: Vec<f64>,
    /// Fold the coupler decay Γ₁ into the photon loss.
    pub include_cbjj_decay: bool,
}

impl Default for TransferSweepSection {
    fn default() -> Self {
        Self {
            kappa_hz: log_grid(1e3, 1e5, 5),
            gamma2_hz: log_grid(1e5, 1e7, 5),
            include_cbjj_decay: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flips {
    Ideal,
    Simulated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transfers {
    Finite,
    Instantaneous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CphaseSection {
    /// λ/|δω_s| grid.
    pub ratios: Vec<f64>,
    pub flips: Flips,
    /// Exchange rate of simulated flips; `null` uses g²/Δ of the transfer
    /// coupler.
    pub flip_rate_hz: Option<f64>,
    pub transfers: Transfers,
    /// Photon loss on the CZ resonators.
    pub kappa_hz: f64,
}

impl Default for CphaseSection {
    fn default() -> Self {
        Self {
            ratios: vec![5.0, 10.0, 20.0, 40.0, 80.0],
            flips: Flips::Ideal,
            flip_rate_hz: None,
            transfers: Transfers::Finite,
            kappa_hz: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub tlr: TlrSection,
    /// Auxiliary resonators C and D.
    pub aux_tlr: TlrSection,
    pub cbjj: CbjjSection,
    pub cbjj_right: CbjjSection,
    pub coupler: CouplerSection,
    pub fjs: FjsSection,
    pub temperature_k: f64,
    pub detector: DetectorSection,
    pub noise: NoiseSection,
    pub integrator: IntegratorSection,
    pub transfer_sweep: TransferSweepSection,
    pub cphase: CphaseSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tlr: TlrSection::default(),
            aux_tlr: TlrSection::default(),
            cbjj: CbjjSection::default(),
            cbjj_right: CbjjSection::default(),
            coupler: CouplerSection::default(),
            fjs: FjsSection::default(),
            temperature_k: 0.04,
            detector: DetectorSection::default(),
            noise: NoiseSection::default(),
            integrator: IntegratorSection::default(),
            transfer_sweep: TransferSweepSection::default(),
            cphase: CphaseSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config {
                path: if path == "." { "<root>".into() } else { path },
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Compact JSON of the effective configuration.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn device(&self) -> Result<DeviceParams, CliError> {
        let tlr = tlr_params(&self.tlr, self.noise.kappa_hz);
        let aux_tlr = tlr_params(&self.aux_tlr, self.noise.kappa_hz);
        let omega0 = tlrsim::device::mode_frequency(&tlr);
        let cbjj = CbjjParams {
            junction_capacitance: self.cbjj.junction_capacitance_f,
            level_splitting: omega0 + angular(self.cbjj.detuning_hz),
            decay_rate: angular(self.cbjj.decay_hz),
            dephasing_rate: angular(self.noise.gamma2_hz),
        };
        let cbjj_right = CbjjParams {
            junction_capacitance: self.cbjj_right.junction_capacitance_f,
            level_splitting: omega0 + angular(self.cbjj_right.detuning_hz),
            decay_rate: angular(self.cbjj_right.decay_hz),
            dephasing_rate: angular(self.noise.gamma2_hz),
        };
        let f = &self.fjs;
        let mut fjs = FjsParams {
            critical_current: f.critical_current_a,
            junction_capacitance: f.junction_capacitance_f,
            shunt_capacitance: f.shunt_capacitance_f,
            squid_self_inductance: f.squid_self_inductance_h,
            loop_inductance: f.loop_inductance_h,
            mutual_inductance_c: f.mutual_inductance_c_h,
            mutual_inductance_d: 0.0,
            bias_current: f.bias_current_a,
            phi2_spread_scale: f.phi2_spread_scale,
        };
        fjs.mutual_inductance_d = match f.mutual_inductance_d_h {
            Some(m) => m,
            None => fjs.matching_mutual_inductance_d(&aux_tlr, &aux_tlr),
        };
        let dev = DeviceParams {
            tlr,
            aux_tlr,
            cbjj,
            cbjj_right,
            coupler: CouplerParams {
                coupling_capacitance: self.coupler.coupling_capacitance_f,
                right_coupling_capacitance: self.coupler.right_coupling_capacitance_f,
            },
            fjs,
            temperature: self.temperature_k,
        };
        dev.validate()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(dev)
    }

    pub fn detector_params(&self) -> DetectorParams {
        let d = &self.detector;
        DetectorParams {
            coupling: angular(d.coupling_hz),
            detuning: angular(d.detuning_hz),
            photon_loss: angular(d.photon_loss_hz),
            escape_rate: angular(d.escape_rate_hz),
            intra_well_decay: angular(d.intra_well_decay_hz),
            dephasing: angular(d.dephasing_hz),
        }
    }

    pub fn integrator(&self) -> Integrator {
        match self.integrator.method {
            Method::Expm => Integrator::Expm,
            Method::Rk4 => Integrator::Rk4 {
                step: self.integrator.step_s,
            },
        }
    }

    /// Checks the grids and sampling settings that the device sections do
    /// not cover.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |path: &str, message: String| {
            Err(CliError::Config {
                path: path.into(),
                message,
            })
        };
        if self.integrator.method == Method::Rk4
            && !(self.integrator.step_s > 0.0 && self.integrator.step_s.is_finite())
        {
            return bad("integrator.step_s", "RK4 step must be positive".into());
        }
        for (path, grid) in [
            ("transfer_sweep.kappa_hz", &self.transfer_sweep.kappa_hz),
            ("transfer_sweep.gamma2_hz", &self.transfer_sweep.gamma2_hz),
        ] {
            if grid.is_empty() {
                return bad(path, "grid must be nonempty".into());
            }
            if let Some(v) = grid.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                return bad(
                    path,
                    format!("rates must be finite and nonnegative, got {v}"),
                );
            }
        }
        for (path, grid) in [
            ("cphase.ratios", &self.cphase.ratios),
            ("detector.ratios", &self.detector.ratios),
        ] {
            if grid.is_empty() {
                return bad(path, "grid must be nonempty".into());
            }
            if let Some(v) = grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return bad(path, format!("ratios must be positive, got {v}"));
            }
        }
        if self.noise.samples == 0 {
            return bad("noise.samples", "at least one sample is needed".into());
        }
        Ok(())
    }
}

fn tlr_params(s: &TlrSection, kappa_hz: f64) -> TlrParams {
    TlrParams {
        inductance: s.inductance_h,
        capacitance: s.capacitance_f,
        length: s.length_m,
        mode_index: s.mode_index,
        photon_loss_rate: angular(kappa_hz),
    }
}

/// Linear frequency of an angular one.
pub fn to_hz(rad_per_s: f64) -> f64 {
    rad_per_s / TWO_PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_key_reports_path() {
        let err =
            RunConfig::from_json(r#"{"cbjj": {"detuning_hz": 1e9, "detunning": 2}}"#).unwrap_err();
        match err {
            CliError::Config { path, .. } => assert_eq!(path, "cbjj.detunning"),
            other => panic!("unexpected {other:?}"),
        }
        let err = RunConfig::from_json(r#"{"noise": {"samples": "many"}}"#).unwrap_err();
        match err {
            CliError::Config { path, .. } => assert_eq!(path, "noise.samples"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let mut c = RunConfig::default();
        c.noise.seed = 99;
        c.fjs.mutual_inductance_d_h = Some(4e-10);
        c.integrator.method = Method::Rk4;
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.sha256(), c.sha256());
    }

    #[test]
    fn default_device_matches_library_defaults() {
        let dev = RunConfig::default().device().unwrap();
        let lib = DeviceParams::default();
        assert_eq!(dev.omega0(), lib.omega0());
        assert_eq!(dev.g_c(), lib.g_c());
        assert_eq!(dev.fjs, lib.fjs);
    }

    #[test]
    fn default_grids() {
        let s = TransferSweepSection::default();
        assert_eq!(s.kappa_hz.len(), 5);
        assert!((s.kappa_hz[0] - 1e3).abs() < 1e-9);
        assert!((s.kappa_hz[4] - 1e5).abs() < 1e-6);
        assert!((s.gamma2_hz[2] - 1e6).abs() < 1e-4);
    }
}
