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

//! Values frozen from an independent NumPy/SciPy reference implementation
//! (dense Kronecker superoperators, `scipy.linalg.expm`, Gauss–Hermite
//! quadrature for the quasi-static averages).

use approx::assert_relative_eq;

use tlrsim::detector::{detection_efficiency, efficiency_sweep, DetectorParams};
use tlrsim::device::{angular, DeviceParams};
use tlrsim::gates::{
    cphase_spin_echo_error, dispersive_convergence, transfer_full_model_error, transfer_gate_error,
    CphaseSpec, TransferSpec,
};

fn operating_point() -> TransferSpec {
    let dev = DeviceParams::default();
    TransferSpec {
        photon_loss: angular(10e3),
        cbjj_dephasing: angular(1e6),
        ..TransferSpec::new(dev.g_c(), dev.delta_c())
    }
}

#[test]
fn device_reference_values() {
    let dev = DeviceParams::default();
    assert_relative_eq!(dev.omega0(), 125663706143.59172, max_relative = 1e-14);
    assert_relative_eq!(dev.g_c(), 1236919336.1550374, max_relative = 1e-12);
    let fjs = dev.fjs_derived().unwrap();
    assert_relative_eq!(fjs.chi_c, 0.011245012778067397, max_relative = 1e-9);
    assert_relative_eq!(fjs.sigma_phi, 0.008355861990568486, max_relative = 1e-9);
    assert_relative_eq!(
        fjs.omega_int / (2.0 * std::f64::consts::PI),
        -1588362.2287958085,
        max_relative = 1e-8
    );
    assert_relative_eq!(
        fjs.delta_omega_s / (2.0 * std::f64::consts::PI),
        -620150.593014037,
        max_relative = 1e-8
    );
    assert_relative_eq!(
        fjs.delta_omega_int_rel,
        4.937049954428823e-05,
        max_relative = 1e-6
    );
    assert_relative_eq!(
        dev.fjs.mutual_inductance_d,
        4.253599297941268e-10,
        max_relative = 1e-8
    );
}

#[test]
fn transfer_reference_errors() {
    let r = transfer_gate_error(&operating_point()).unwrap();
    assert_relative_eq!(r.primary_error, 0.0023773699977402973, max_relative = 1e-8);
    assert_relative_eq!(r.average_error, 0.0019856048292704875, max_relative = 1e-8);
    assert_relative_eq!(
        operating_point().gate_time(),
        1.2901701323251418e-08,
        max_relative = 1e-12
    );

    let folded = TransferSpec {
        cbjj_decay: angular(0.1e6),
        ..operating_point()
    };
    let r = transfer_gate_error(&folded).unwrap();
    assert_relative_eq!(r.primary_error, 0.0024557200190385986, max_relative = 1e-8);
}

#[test]
fn full_model_reference_convergence() {
    let base = TransferSpec {
        cbjj_decay: angular(0.1e6),
        ..operating_point()
    };
    let pts = dispersive_convergence(&base, &[0.1, 0.05, 0.025]).unwrap();
    let reference = [
        (2.469e-3, 4.713e-3),
        (2.430e-3, 3.212e-3),
        (3.604e-3, 3.954e-3),
    ];
    for (p, (eff, full)) in pts.iter().zip(reference) {
        assert_relative_eq!(p.effective_error, eff, max_relative = 2e-3);
        assert_relative_eq!(p.full_error, full, max_relative = 2e-3);
    }
    let q1 = pts[0].difference / pts[1].difference;
    let q2 = pts[1].difference / pts[2].difference;
    assert!((q1 - 2.869).abs() < 5e-3, "{q1}");
    assert!((q2 - 2.234).abs() < 5e-3, "{q2}");

    let at_tenth = transfer_full_model_error(&TransferSpec {
        detuning: base.coupling / 0.1,
        ..base
    })
    .unwrap();
    assert!(at_tenth.peak_excitation <= 4.0 * 0.01);
}

#[test]
fn detector_reference_efficiencies() {
    let p = DetectorParams::default();
    let sweep = efficiency_sweep(&p, &[10.0, 100.0, 1000.0, 2000.0, 1e4], 0).unwrap();
    let reference = [
        0.4761902256237011,
        0.9009002067613547,
        0.9891166918928839,
        0.9945245900339693,
        0.998875712417792,
    ];
    for ((_, r), want) in sweep.iter().zip(reference) {
        assert!(r.converged);
        assert_relative_eq!(r.efficiency, want, max_relative = 1e-6);
    }
    for (gp, want) in [(1e5, 0.9945250373452201), (1e7, 0.994520116943586)] {
        let q = DetectorParams {
            dephasing: angular(gp),
            ..p
        };
        assert_relative_eq!(
            detection_efficiency(&q).unwrap().efficiency,
            want,
            max_relative = 1e-6
        );
    }
}

#[test]
fn cphase_matches_quadrature_reference() {
    let fjs = DeviceParams::default().fjs_derived().unwrap();
    // (ratio, quadrature mean error, noiseless calibration error)
    let reference = [
        (10.0, 0.05262682140311048, 0.038762939164681987),
        (20.0, 0.013467143010069904, 0.009767691179001892),
        (40.0, 0.003371748165642674, 0.0024462283912690674),
    ];
    for (ratio, mean, cal) in reference {
        let spec = CphaseSpec {
            samples: 1000,
            seed: 11,
            ..CphaseSpec::new(fjs, CphaseSpec::lambda_for_ratio(&fjs, ratio))
        };
        let r = cphase_spin_echo_error(&spec, 0).unwrap();
        let se = r.std_error.unwrap();
        assert!(
            (r.primary_error - mean).abs() < 3.0 * se,
            "ratio {ratio}: {} vs {mean} (se {se})",
            r.primary_error
        );
        assert_relative_eq!(
            r.meta("calibration_error").unwrap(),
            cal,
            max_relative = 1e-6
        );
    }
}
