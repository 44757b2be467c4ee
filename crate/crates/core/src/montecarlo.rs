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

//! Seeded Monte Carlo averaging over quasi-static classical noise.
//!
//! Sample `i` draws its Gaussian value from a ChaCha8 generator seeded with
//! the run seed and switched to stream `i`, so each sample's value depends
//! only on `(seed, i)`. Samples may run on any number of workers; results
//! are collected in index order and reduced by pairwise summation, which
//! keeps the output bit-identical regardless of the worker count.

use std::ops::Add;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::quantum::{CMatrix, DensityMatrix};

/// A Gaussian parameter held constant within each run.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiStaticNoise {
    pub parameter: String,
    pub mean: f64,
    pub std_dev: f64,
    pub samples: usize,
    pub seed: u64,
}

impl QuasiStaticNoise {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return invalid("Monte Carlo needs at least one sample");
        }
        if !(self.std_dev >= 0.0 && self.std_dev.is_finite()) {
            return invalid(format!(
                "noise std. dev. must be nonnegative, got {}",
                self.std_dev
            ));
        }
        if !self.mean.is_finite() {
            return invalid("noise mean must be finite");
        }
        Ok(())
    }

    /// The parameter value used by sample `index`.
    pub fn sample(&self, index: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let z: f64 = StandardNormal.sample(&mut rng);
        self.mean + self.std_dev * z
    }
}

/// Seed for sweep point `index` of a run seeded with `seed`. Point seeds
/// come from streams counted down from `u64::MAX`, away from the sample
/// streams used inside one point.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - index);
    rng.next_u64()
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum<T>(items: &[T]) -> Option<T>
where
    T: Clone,
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    match items.len() {
        0 => None,
        1 => Some(items[0].clone()),
        n => {
            let (l, r) = items.split_at(n / 2);
            let (l, r) = (pairwise_sum(l)?, pairwise_sum(r)?);
            Some(&l + &r)
        }
    }
}

fn pairwise_f64(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_f64(l) + pairwise_f64(r)
        }
    }
}

/// Mean and standard error of a scalar observable over the samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Estimate from per-sample values (standard error uses the N − 1
    /// sample variance; it is 0 for a single sample).
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = pairwise_f64(values) / n;
        let std_error = if values.len() < 2 {
            0.0
        } else {
            let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (pairwise_f64(&sq) / (n - 1.0) / n).sqrt()
        };
        Self { mean, std_error }
    }
}

#[derive(Clone, Debug)]
pub struct MonteCarloResult {
    pub mean_state: DensityMatrix,
    /// One estimate per observable, in the order the observable function
    /// returns them.
    pub observables: Vec<Estimate>,
    pub samples: usize,
}

/// Runs `jobs` threads (0 means rayon's default) over the sample
/// indices and returns results in index order.
pub fn run_indexed<T, F>(count: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool construction");
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

/// Evaluates `f` at every sample value, in index order. The first failing
/// sample (lowest index) is reported with its value.
pub fn sample_map<T, F>(noise: &QuasiStaticNoise, f: F, jobs: usize) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    noise.validate()?;
    run_indexed(noise.samples, jobs, |i| {
        let x = noise.sample(i);
        f(x).map_err(|e| Error::Sample {
            index: i,
            value: x,
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect()
}

/// Reduces per-sample `(state, observables)` pairs to their means.
pub fn aggregate(samples: Vec<(DensityMatrix, Vec<f64>)>) -> Result<MonteCarloResult> {
    let Some((first, first_obs)) = samples.first() else {
        return invalid("Monte Carlo needs at least one sample");
    };
    let space = first.space().clone();
    let n_obs = first_obs.len();
    let mut states: Vec<CMatrix> = Vec::with_capacity(samples.len());
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(samples.len());
    for (rho, obs) in samples {
        if rho.space() != &space {
            return Err(Error::SpaceMismatch);
        }
        if obs.len() != n_obs {
            return Err(Error::DimensionMismatch {
                expected: n_obs,
                found: obs.len(),
            });
        }
        states.push(rho.matrix().clone());
        values.push(obs);
    }
    let n = states.len();
    let mean = pairwise_sum(&states).expect("nonempty").unscale(n as f64);
    let observables = (0..n_obs)
        .map(|k| {
            let column: Vec<f64> = values.iter().map(|v| v[k]).collect();
            Estimate::from_samples(&column)
        })
        .collect();
    Ok(MonteCarloResult {
        mean_state: DensityMatrix::from_raw(space, mean),
        observables,
        samples: n,
    })
}

/// Averages `model(x)` over the quasi-static samples `x ~ N(mean, std_dev²)`.
///
/// `observables` maps each sample's final state to a list of scalars; their
/// sample means and standard errors are reported alongside the mean state.
/// The first failing sample (lowest index) is reported with its value.
pub fn monte_carlo_quasistatic<M, O>(
    noise: &QuasiStaticNoise,
    model: M,
    observables: O,
    jobs: usize,
) -> Result<MonteCarloResult>
where
    M: Fn(f64) -> Result<DensityMatrix> + Sync + Send,
    O: Fn(&DensityMatrix) -> Result<Vec<f64>> + Sync + Send,
{
    let samples = sample_map(
        noise,
        |x| {
            let rho = model(x)?;
            let obs = observables(&rho)?;
            Ok((rho, obs))
        },
        jobs,
    )?;
    aggregate(samples)
}
