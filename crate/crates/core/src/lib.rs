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

//! Simulation of dual-rail microwave-photon qubits stored in superconducting
//! transmission-line resonators and manipulated by Josephson devices.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`] builds tensor-product Hilbert spaces, operators and states.
//! * [`device`] turns circuit parameters into frequencies and couplings.
//! * [`lindblad`] builds Liouvillians and propagates density matrices;
//!   [`montecarlo`] averages over quasi-static noise.
//! * [`gates`] assembles the photon transfer, phase and controlled-phase
//!   protocols and scores them.
//! * [`detector`] models the three-level junction photodetector.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detector;
pub mod device;
pub mod error;
pub mod expm;
pub mod gates;
pub mod lindblad;
pub mod montecarlo;
pub mod quantum;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/device.md")]
    mod device {}
    #[doc = include_str!("../../../book/src/master-equation.md")]
    mod master_equation {}
    #[doc = include_str!("../../../book/src/gates.md")]
    mod gates {}
    #[doc = include_str!("../../../book/src/detector.md")]
    mod detector {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
