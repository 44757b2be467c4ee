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

use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,

    #[error("{what} violated: measured {measured:e}, bound {bound:e}")]
    Invariant {
        what: &'static str,
        measured: f64,
        bound: f64,
    },

    #[error(
        "integration failed after {halvings} step halvings: trace drift {drift:e}, \
         hermiticity {hermiticity:e}, min eigenvalue {min_eigenvalue:e} (last step {step:e} s)"
    )]
    Integration {
        halvings: u32,
        step: f64,
        drift: f64,
        hermiticity: f64,
        min_eigenvalue: f64,
    },

    #[error("state leaked out of the logical subspace: logical population {population}")]
    Leakage { population: f64 },

    #[error("Monte Carlo sample {index} (sampled value {value:e}) failed: {source}")]
    Sample {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
