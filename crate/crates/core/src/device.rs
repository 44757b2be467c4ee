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

//! Physical parameter records and the closed-form device calculators.
//!
//! Inputs are SI. Every frequency or rate stored in a record is angular
//! (rad/s); conversions from the linear values quoted in configuration
//! files go through [`to_angular`].

use std::f64::consts::PI;

use crate::error::{invalid, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// CODATA 2018 constants (exact where SI defines them).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub electron_charge: f64,
    pub flux_quantum: f64,
    pub boltzmann: f64,
}

pub const PLANCK: f64 = 6.626_070_15e-34;

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    electron_charge: 1.602_176_634e-19,
    flux_quantum: PLANCK / (2.0 * 1.602_176_634e-19),
    boltzmann: 1.380_649e-23,
};

/// An angular frequency that remembers the linear value it came from, so
/// that `to_linear(to_angular(f)) == f` holds bit for bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularFrequency {
    rad_per_s: f64,
    hz: f64,
}

impl AngularFrequency {
    pub fn from_rad_per_s(rad_per_s: f64) -> Self {
        Self {
            rad_per_s,
            hz: rad_per_s / TWO_PI,
        }
    }

    pub fn rad_per_s(self) -> f64 {
        self.rad_per_s
    }

    pub fn hz(self) -> f64 {
        self.hz
    }
}

/// Linear frequency (Hz) to angular.
pub fn to_angular(hz: f64) -> AngularFrequency {
    AngularFrequency {
        rad_per_s: TWO_PI * hz,
        hz,
    }
}

/// Angular frequency back to linear (Hz).
pub fn to_linear(w: AngularFrequency) -> f64 {
    w.hz
}

/// `2π · hz`, for callers that only need the angular value.
pub fn angular(hz: f64) -> f64 {
    to_angular(hz).rad_per_s
}

/// Transmission-line resonator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TlrParams {
    /// Total inductance L (H).
    pub inductance: f64,
    /// Total capacitance C (F).
    pub capacitance: f64,
    /// Physical length l (m).
    pub length: f64,
    pub mode_index: u32,
    /// κ (rad/s).
    pub photon_loss_rate: f64,
}

impl Default for TlrParams {
    fn default() -> Self {
        Self {
            inductance: 0.5e-9,
            capacitance: 5e-12,
            length: 0.01,
            mode_index: 2,
            photon_loss_rate: angular(10e3),
        }
    }
}

impl TlrParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("inductance", self.inductance),
            ("capacitance", self.capacitance),
            ("length", self.length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("TLR {name} must be positive, got {v}"));
            }
        }
        if self.mode_index < 1 {
            return invalid("TLR mode index must be >= 1");
        }
        if !(self.photon_loss_rate >= 0.0) {
            return invalid("TLR photon loss rate must be nonnegative");
        }
        Ok(())
    }
}

/// Current-biased Josephson junction used as a two-level coupler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CbjjParams {
    pub junction_capacitance: f64,
    /// Ω (rad/s).
    pub level_splitting: f64,
    /// Γ₁ (rad/s).
    pub decay_rate: f64,
    /// Γ₂ (rad/s).
    pub dephasing_rate: f64,
}

impl Default for CbjjParams {
    fn default() -> Self {
        let omega0 = mode_frequency(&TlrParams::default());
        Self {
            junction_capacitance: 0.5e-12,
            level_splitting: omega0 + angular(2e9),
            decay_rate: angular(0.1e6),
            dephasing_rate: angular(1e6),
        }
    }
}

impl CbjjParams {
    /// Δ = Ω − ω₀.
    pub fn detuning(&self, omega0: f64) -> f64 {
        self.level_splitting - omega0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("junction capacitance", self.junction_capacitance),
            ("level splitting", self.level_splitting),
            ("decay rate", self.decay_rate),
            ("dephasing rate", self.dephasing_rate),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!("CBJJ {name} must be nonnegative, got {v}"));
            }
        }
        Ok(())
    }
}

/// Coupling capacitances of the left (transfer) and right (phase) CBJJs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplerParams {
    pub coupling_capacitance: f64,
    pub right_coupling_capacitance: f64,
}

impl Default for CouplerParams {
    fn default() -> Self {
        Self {
            coupling_capacitance: 23e-15,
            right_coupling_capacitance: 23e-15,
        }
    }
}

/// Four-junction SQUID providing the cross-Kerr interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FjsParams {
    pub critical_current: f64,
    pub junction_capacitance: f64,
    pub shunt_capacitance: f64,
    pub squid_self_inductance: f64,
    pub loop_inductance: f64,
    pub mutual_inductance_c: f64,
    pub mutual_inductance_d: f64,
    pub bias_current: f64,
    /// Multiplier on the ground-state standard deviation of φ² when
    /// converting it into the shift spread δω_s.
    pub phi2_spread_scale: f64,
}

impl FjsParams {
    /// Defaults with M_D chosen so that χ_d = χ_c for the given resonators.
    pub fn matched(tlr_c: &TlrParams, tlr_d: &TlrParams) -> Self {
        let mut p = Self {
            critical_current: 50e-6,
            junction_capacitance: 1e-12,
            shunt_capacitance: 19e-12,
            squid_self_inductance: 10e-12,
            loop_inductance: 100e-12,
            mutual_inductance_c: 80e-12,
            mutual_inductance_d: 0.0,
            bias_current: 0.0,
            phi2_spread_scale: 1.0,
        };
        p.mutual_inductance_d = p.matching_mutual_inductance_d(tlr_c, tlr_d);
        p
    }

    /// The M_D that makes χ_d equal to χ_c.
    pub fn matching_mutual_inductance_d(&self, tlr_c: &TlrParams, tlr_d: &TlrParams) -> f64 {
        let k = CONSTANTS;
        let chi_c = self.chi_c(tlr_c);
        chi_c
            * (PI * (self.squid_self_inductance + self.loop_inductance) * self.critical_current
                + k.flux_quantum)
            / (PI * zero_point_current(tlr_d))
    }

    pub fn josephson_energy(&self) -> f64 {
        CONSTANTS.hbar * self.critical_current / (2.0 * CONSTANTS.electron_charge)
    }

    pub fn charging_energy(&self) -> f64 {
        let e2 = 2.0 * CONSTANTS.electron_charge;
        e2 * e2 / (4.0 * (self.junction_capacitance + self.shunt_capacitance))
    }

    fn chi_c(&self, tlr_c: &TlrParams) -> f64 {
        PI * self.mutual_inductance_c * zero_point_current(tlr_c)
            / (PI * self.squid_self_inductance * self.critical_current + CONSTANTS.flux_quantum)
    }

    fn chi_d(&self, tlr_d: &TlrParams) -> f64 {
        PI * self.mutual_inductance_d * zero_point_current(tlr_d)
            / (PI * (self.squid_self_inductance + self.loop_inductance) * self.critical_current
                + CONSTANTS.flux_quantum)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("critical current", self.critical_current),
            ("junction capacitance", self.junction_capacitance),
            ("shunt capacitance", self.shunt_capacitance),
            ("SQUID self inductance", self.squid_self_inductance),
            ("loop inductance", self.loop_inductance),
            ("mutual inductance M_C", self.mutual_inductance_c),
            ("mutual inductance M_D", self.mutual_inductance_d),
            ("phi^2 spread scale", self.phi2_spread_scale),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!("FJS {name} must be nonnegative, got {v}"));
            }
        }
        if self.critical_current == 0.0 {
            return invalid("FJS critical current must be positive");
        }
        if self.junction_capacitance + self.shunt_capacitance <= 0.0 {
            return invalid("FJS total capacitance must be positive");
        }
        let s = self.bias_current / (4.0 * self.critical_current);
        if !(s.abs() < 1.0) {
            return invalid(format!(
                "FJS bias current {} A outside the arcsin domain (|I_b| < 4 I_c)",
                self.bias_current
            ));
        }
        Ok(())
    }
}

/// Quantities derived from an [`FjsParams`] and the two resonators it
/// couples. Frequencies are angular.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FjsDerived {
    pub josephson_energy: f64,
    pub charging_energy: f64,
    pub phi0: f64,
    pub alpha: f64,
    pub sigma_phi: f64,
    pub chi_c: f64,
    pub chi_d: f64,
    /// ⟨φ²⟩ under the ground-state Gaussian.
    pub mean_phi2: f64,
    /// Standard deviation of φ² (before the spread scale).
    pub delta_phi2: f64,
    pub omega_s: f64,
    pub delta_omega_s: f64,
    pub omega_int: f64,
    pub delta_omega_int_rel: f64,
    pub phi2_spread_scale: f64,
}

impl FjsDerived {
    /// Coefficient `2E_J⁰χ_c²/ħ` (times the spread scale) that turns a φ²
    /// deviation into a mode shift.
    pub fn shift_coefficient(&self) -> f64 {
        2.0 * self.josephson_energy * self.chi_c * self.chi_c / CONSTANTS.hbar
            * self.phi2_spread_scale
    }

    /// Mode shift of C and D relative to its mean, at a sampled phase.
    pub fn shift_at(&self, phi: f64) -> f64 {
        -self.shift_coefficient() * (phi * phi - self.mean_phi2)
    }

    /// ω_int evaluated at a sampled phase.
    pub fn omega_int_at(&self, phi: f64) -> f64 {
        -4.0 * self.josephson_energy * self.chi_c * self.chi_c * self.chi_d * self.chi_d * phi.cos()
            / CONSTANTS.hbar
    }
}

pub fn fjs_derive(fjs: &FjsParams, tlr_c: &TlrParams, tlr_d: &TlrParams) -> Result<FjsDerived> {
    fjs.validate()?;
    tlr_c.validate()?;
    tlr_d.validate()?;
    let hbar = CONSTANTS.hbar;
    let ej = fjs.josephson_energy();
    let ec = fjs.charging_energy();

    // ħ I_b / (8 e E_J⁰) reduces to I_b / (4 I_c)
    let phi0 = (fjs.bias_current / (4.0 * fjs.critical_current)).asin();
    let cos0 = phi0.cos();
    let alpha = (4.0 * ej * cos0 / ec).powf(0.25);
    let sigma = 1.0 / (alpha * 2f64.sqrt());
    let s2 = sigma * sigma;

    let chi_c = fjs.chi_c(tlr_c);
    let chi_d = fjs.chi_d(tlr_d);

    let mean_phi2 = phi0 * phi0 + s2;
    let delta_phi2 = (2.0 * s2 * s2 + 4.0 * phi0 * phi0 * s2).sqrt();
    let omega_s = -2.0 * ej * (mean_phi2 * chi_c * chi_c + chi_c * chi_c * chi_d * chi_d) / hbar;
    let delta_omega_s = -2.0 * ej * chi_c * chi_c * delta_phi2 * fjs.phi2_spread_scale / hbar;
    let omega_int = -4.0 * ej * chi_c * chi_c * chi_d * chi_d * cos0 / hbar;

    // cos φ with φ ~ N(φ₀, σ²): mean cos φ₀·e^{−σ²/2}; with u = 1 − e^{−σ²}
    // the variance is u·(sin²φ₀ + u·(cos²φ₀ − ½)).
    let u = -(-s2).exp_m1();
    let var = u * (phi0.sin().powi(2) + u * (cos0 * cos0 - 0.5));
    let mean_cos = cos0 * (-0.5 * s2).exp();
    let delta_omega_int_rel = var.max(0.0).sqrt() / mean_cos.abs();

    Ok(FjsDerived {
        josephson_energy: ej,
        charging_energy: ec,
        phi0,
        alpha,
        sigma_phi: sigma,
        chi_c,
        chi_d,
        mean_phi2,
        delta_phi2,
        omega_s,
        delta_omega_s,
        omega_int,
        delta_omega_int_rel,
        phi2_spread_scale: fjs.phi2_spread_scale,
    })
}

/// ω = nπ/√(LC) (rad/s).
pub fn mode_frequency(tlr: &TlrParams) -> f64 {
    tlr.mode_index as f64 * PI / (tlr.inductance * tlr.capacitance).sqrt()
}

/// I₀ = √(ħω/L) (A).
pub fn zero_point_current(tlr: &TlrParams) -> f64 {
    (CONSTANTS.hbar * mode_frequency(tlr) / tlr.inductance).sqrt()
}

/// V₀ = √(ħω/C) (V).
pub fn zero_point_voltage(tlr: &TlrParams) -> f64 {
    (CONSTANTS.hbar * mode_frequency(tlr) / tlr.capacitance).sqrt()
}

/// Voltage and current standing-wave factors `(cos 2πx/l, sin 2πx/l)` at
/// position `x` measured from the resonator centre.
pub fn mode_profile(x: f64, tlr: &TlrParams) -> Result<(f64, f64)> {
    if !(x.abs() <= tlr.length / 2.0) {
        return invalid(format!(
            "position {x} m outside the resonator (|x| <= {} m)",
            tlr.length / 2.0
        ));
    }
    let k = TWO_PI * x / tlr.length;
    Ok((k.cos(), k.sin()))
}

/// g = ω₀C_c / √(2C(C_J + 2C_c)) (rad/s).
pub fn coupling_strength(omega0: f64, c_tlr: f64, c_coupling: f64, c_junction: f64) -> f64 {
    omega0 * c_coupling / (2.0 * c_tlr * (c_junction + 2.0 * c_coupling)).sqrt()
}

fn nonzero_detuning(delta: f64) -> Result<()> {
    if delta == 0.0 || !delta.is_finite() {
        return invalid(format!("detuning must be finite and nonzero, got {delta}"));
    }
    Ok(())
}

/// Photon exchange rate g²/(2πΔ) in Hz, from angular g and Δ.
pub fn transfer_rate(g: f64, delta: f64) -> Result<f64> {
    nonzero_detuning(delta)?;
    Ok(g * g / (TWO_PI * delta))
}

/// Effective photon dephasing 2(g/Δ)²Γ₂ (rad/s).
pub fn effective_dephasing_rate(g: f64, delta: f64, gamma2: f64) -> Result<f64> {
    nonzero_detuning(delta)?;
    let r = g / delta;
    Ok(2.0 * r * r * gamma2)
}

/// Extra photon loss (g/Δ)²Γ₁ from virtual CBJJ excitation (rad/s).
pub fn induced_loss_rate(g: f64, delta: f64, gamma1: f64) -> Result<f64> {
    nonzero_detuning(delta)?;
    let r = g / delta;
    Ok(r * r * gamma1)
}

/// Bose occupation 1/(exp(ħω/k_BT) − 1).
pub fn thermal_occupancy(temperature: f64, omega: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return invalid(format!("temperature must be positive, got {temperature}"));
    }
    let x = CONSTANTS.hbar * omega / (CONSTANTS.boltzmann * temperature);
    Ok(1.0 / x.exp_m1())
}

/// How far a coupler sits inside the dispersive regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DispersiveRegime {
    /// |Δ| ≥ 10 g.
    Deep,
    /// 5 g ≤ |Δ| < 10 g.
    Marginal,
    /// |Δ| < 5 g.
    Violated,
}

pub fn dispersive_regime(g: f64, delta: f64) -> DispersiveRegime {
    let ratio = delta.abs() / g.abs();
    if ratio >= 10.0 {
        DispersiveRegime::Deep
    } else if ratio >= 5.0 {
        DispersiveRegime::Marginal
    } else {
        DispersiveRegime::Violated
    }
}

/// All device sections together.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviceParams {
    /// Qubit resonators A, B (and E, F).
    pub tlr: TlrParams,
    /// Auxiliary resonators C, D coupled through the FJS.
    pub aux_tlr: TlrParams,
    /// Transfer CBJJ between A and B.
    pub cbjj: CbjjParams,
    /// Phase CBJJ on the right resonator.
    pub cbjj_right: CbjjParams,
    pub coupler: CouplerParams,
    pub fjs: FjsParams,
    /// Resonator temperature (K).
    pub temperature: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        let tlr = TlrParams::default();
        Self {
            tlr,
            aux_tlr: tlr,
            cbjj: CbjjParams::default(),
            cbjj_right: CbjjParams::default(),
            coupler: CouplerParams::default(),
            fjs: FjsParams::matched(&tlr, &tlr),
            temperature: 0.04,
        }
    }
}

impl DeviceParams {
    pub fn omega0(&self) -> f64 {
        mode_frequency(&self.tlr)
    }

    pub fn g_c(&self) -> f64 {
        coupling_strength(
            self.omega0(),
            self.tlr.capacitance,
            self.coupler.coupling_capacitance,
            self.cbjj.junction_capacitance,
        )
    }

    pub fn g_r(&self) -> f64 {
        coupling_strength(
            self.omega0(),
            self.tlr.capacitance,
            self.coupler.right_coupling_capacitance,
            self.cbjj_right.junction_capacitance,
        )
    }

    pub fn delta_c(&self) -> f64 {
        self.cbjj.detuning(self.omega0())
    }

    pub fn delta_r(&self) -> f64 {
        self.cbjj_right.detuning(self.omega0())
    }

    pub fn fjs_derived(&self) -> Result<FjsDerived> {
        fjs_derive(&self.fjs, &self.aux_tlr, &self.aux_tlr)
    }

    pub fn validate(&self) -> Result<()> {
        self.tlr.validate()?;
        self.aux_tlr.validate()?;
        self.cbjj.validate()?;
        self.cbjj_right.validate()?;
        self.fjs.validate()?;
        if !(self.temperature > 0.0) {
            return invalid("temperature must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_relative_eq, assert_ulps_eq};

    #[test]
    fn default_mode_frequency() {
        let w = mode_frequency(&TlrParams::default());
        assert_relative_eq!(w, 125663706143.59172, max_relative = 1e-14);
        assert_relative_eq!(w / TWO_PI, 20e9, max_relative = 1e-14);
    }

    #[test]
    fn mode_frequency_scaling() {
        let base = TlrParams::default();
        let w = mode_frequency(&base);
        let doubled = TlrParams {
            mode_index: 4,
            ..base
        };
        assert_relative_eq!(mode_frequency(&doubled), 2.0 * w, max_relative = 1e-15);
        let heavy = TlrParams {
            inductance: 4.0 * base.inductance,
            capacitance: 4.0 * base.capacitance,
            ..base
        };
        assert_relative_eq!(mode_frequency(&heavy), w / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn zero_point_amplitudes() {
        let tlr = TlrParams::default();
        assert_relative_eq!(
            zero_point_current(&tlr),
            1.6280135313860361e-07,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            zero_point_voltage(&tlr),
            1.628013531386036e-06,
            max_relative = 1e-13
        );
    }

    #[test]
    fn profile_positions() {
        let tlr = TlrParams::default();
        let (v, i) = mode_profile(tlr.length / 4.0, &tlr).unwrap();
        assert!(v.abs() < 1e-15);
        assert_relative_eq!(i, 1.0);
        let (_, i) = mode_profile(-tlr.length / 4.0, &tlr).unwrap();
        assert_relative_eq!(i, -1.0);
        let (v, i) = mode_profile(0.0, &tlr).unwrap();
        assert_eq!((v, i), (1.0, 0.0));
        assert!(mode_profile(0.6 * tlr.length, &tlr).is_err());
    }

    #[test]
    fn coupling_and_transfer_rate() {
        let dev = DeviceParams::default();
        let g = dev.g_c();
        assert_relative_eq!(g, 1236919336.1550374, max_relative = 1e-13);
        let rate = transfer_rate(g, dev.delta_c()).unwrap();
        assert_relative_eq!(rate, 19377289.37728938, max_relative = 1e-12);
        assert_eq!(coupling_strength(dev.omega0(), 5e-12, 0.0, 0.5e-12), 0.0);
        assert_relative_eq!(
            coupling_strength(2.0 * dev.omega0(), 5e-12, 23e-15, 0.5e-12),
            2.0 * g,
            max_relative = 1e-15
        );
        assert!(transfer_rate(g, 0.0).is_err());
    }

    #[test]
    fn transfer_rate_scaling() {
        let (g, d) = (angular(197e6), angular(2e9));
        let r = transfer_rate(g, d).unwrap();
        assert_relative_eq!(
            transfer_rate(g / 2.0, d).unwrap(),
            r / 4.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            transfer_rate(g, 2.0 * d).unwrap(),
            r / 2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn dephasing_and_loss() {
        let dev = DeviceParams::default();
        let (g, d) = (dev.g_c(), dev.delta_c());
        let deph = effective_dephasing_rate(g, d, angular(1e6)).unwrap();
        assert_relative_eq!(deph, 121751.09990835168, max_relative = 1e-12);
        assert_eq!(effective_dephasing_rate(g, d, 0.0).unwrap(), 0.0);
        let loss = induced_loss_rate(g, d, dev.cbjj.decay_rate).unwrap();
        assert_relative_eq!(loss, 6087.554995417584, max_relative = 1e-12);
        assert!(loss <= dev.tlr.photon_loss_rate);
    }

    #[test]
    fn thermal_occupancy_values() {
        let w = mode_frequency(&TlrParams::default());
        let n = thermal_occupancy(0.04, w).unwrap();
        assert_relative_eq!(n, 3.789449170164159e-11, max_relative = 1e-9);
        assert!(n < 1e-10);

        // classical limit at ħω/k_BT = 1e-3
        let t = 1.0;
        let w_small = 1e-3 * CONSTANTS.boltzmann * t / CONSTANTS.hbar;
        let classical = CONSTANTS.boltzmann * t / (CONSTANTS.hbar * w_small);
        assert_relative_eq!(
            thermal_occupancy(t, w_small).unwrap(),
            classical,
            max_relative = 1e-3
        );

        assert!(thermal_occupancy(0.0, w).is_err());
        assert!(thermal_occupancy(0.04, 0.5 * w).unwrap() > n);
    }

    #[test]
    fn fjs_default_numbers() {
        let dev = DeviceParams::default();
        assert_relative_eq!(
            dev.fjs.mutual_inductance_d,
            4.253599296738697e-10,
            max_relative = 1e-12
        );
        let d = dev.fjs_derived().unwrap();
        assert_eq!(d.phi0, 0.0);
        assert_relative_eq!(d.chi_c, 0.011245012774151792, max_relative = 1e-12);
        assert_relative_eq!(d.chi_d, d.chi_c, max_relative = 1e-14);
        assert_relative_eq!(d.alpha, 84.6240378293323, max_relative = 1e-12);
        assert_relative_eq!(d.sigma_phi, 0.008355861990568486, max_relative = 1e-12);
        assert_relative_eq!(d.omega_int, -9979974.204548411, max_relative = 1e-11);
        assert_relative_eq!(d.delta_omega_s, -3896521.091550905, max_relative = 1e-11);
        assert_relative_eq!(d.omega_s, -7745243.589146258, max_relative = 1e-11);
        assert_relative_eq!(
            d.delta_omega_int_rel,
            4.937049924938367e-05,
            max_relative = 1e-9
        );
    }

    #[test]
    fn fjs_biased_phase_statistics() {
        // direct quadrature of the Gaussian ground state
        let tlr = TlrParams::default();
        let fjs = FjsParams {
            bias_current: 40e-6,
            ..FjsParams::matched(&tlr, &tlr)
        };
        let d = fjs_derive(&fjs, &tlr, &tlr).unwrap();
        assert_relative_eq!(d.phi0, 0.2013579207903308, max_relative = 1e-12);
        assert_relative_eq!(
            d.delta_omega_int_rel,
            0.0017150842465125922,
            max_relative = 1e-6
        );
        assert_relative_eq!(d.mean_phi2, 0.040615548895285604, max_relative = 1e-8);
        assert_relative_eq!(d.delta_phi2, 0.0033837235395106314, max_relative = 1e-8);
        assert!(d.omega_int < 0.0);

        let bad = FjsParams {
            bias_current: 200e-6,
            ..fjs
        };
        assert!(fjs_derive(&bad, &tlr, &tlr).is_err());
    }

    #[test]
    fn unit_round_trip_is_exact() {
        for f in [0.1, 1.0, 3.3, 1e4, 19.4e6, 2e9, 20e9, 123456.789] {
            assert_ulps_eq!(to_linear(to_angular(f)), f, max_ulps = 0);
        }
    }

    #[test]
    fn regime_classification() {
        assert_eq!(dispersive_regime(1.0, 10.0), DispersiveRegime::Deep);
        assert_eq!(dispersive_regime(1.0, -7.0), DispersiveRegime::Marginal);
        assert_eq!(dispersive_regime(1.0, 2.0), DispersiveRegime::Violated);
    }
}
