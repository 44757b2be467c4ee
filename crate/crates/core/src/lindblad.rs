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

//! Liouvillian superoperators and density-matrix propagation.
//!
//! Superoperators act on column-stacked density matrices:
//! `vec(ρ)` stacks the columns of ρ, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)` and the
//! entry `ρ[(i, j)]` sits at `vec` index `j·d + i`.
//!
//! The generator is the canonical Lindblad form with ħ = 1:
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k† L_k, ρ})
//! ```
//!
//! A term written `(γ/2)·(2LρL† − L†Lρ − ρL†L)` has canonical rate γ.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::{expm, norm1};
use crate::quantum::{
    hermitian_eigenvalues, hermiticity_deviation, CMatrix, CVector, DensityMatrix, HilbertSpace,
    Operator, HERMITICITY_TOLERANCE, POSITIVITY_FLOOR, TRACE_TOLERANCE,
};

/// Tolerance on |ρ − ρ†| before the final re-Hermitization.
pub const RAW_HERMITICITY_TOLERANCE: f64 = 1e-7;
/// Step halvings attempted by [`propagate_rk4`] before giving up.
pub const MAX_HALVINGS: u32 = 20;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One dissipative channel `γ 𝒟[L]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladTerm {
    rate: f64,
    jump: Operator,
}

impl LindbladTerm {
    pub fn new(rate: f64, jump: Operator) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Lindblad rate must be finite and nonnegative, got {rate}"
            )));
        }
        Ok(Self { rate, jump })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn jump(&self) -> &Operator {
        &self.jump
    }
}

/// Dense generator of a Markovian master equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Liouvillian {
    space: HilbertSpace,
    generator: CMatrix,
}

/// Column-stacked `vec(m)`.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Builds the generator for Hamiltonian `h` (rad/s) and `terms`.
pub fn build_liouvillian(h: &Operator, terms: &[LindbladTerm]) -> Result<Liouvillian> {
    if !h.is_hermitian(HERMITICITY_TOLERANCE) {
        return Err(Error::Invariant {
            what: "Hermitian Hamiltonian",
            measured: h.hermiticity_deviation(),
            bound: HERMITICITY_TOLERANCE * h.max_abs().max(1.0),
        });
    }
    let d = h.dim();
    let id = CMatrix::identity(d, d);
    let hm = h.matrix();
    let mut gen = (id.kronecker(hm) - hm.transpose().kronecker(&id)) * (-I);
    for term in terms {
        if term.jump.space() != h.space() {
            return Err(Error::SpaceMismatch);
        }
        if term.rate == 0.0 {
            continue;
        }
        let l = term.jump.matrix();
        let ldl = l.adjoint() * l;
        let dissipator = l.conjugate().kronecker(l)
            - id.kronecker(&ldl) * Complex64::new(0.5, 0.0)
            - ldl.transpose().kronecker(&id) * Complex64::new(0.5, 0.0);
        gen += dissipator * Complex64::new(term.rate, 0.0);
    }
    Ok(Liouvillian {
        space: h.space().clone(),
        generator: gen,
    })
}

impl Liouvillian {
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn generator(&self) -> &CMatrix {
        &self.generator
    }

    /// Dimension of the underlying Hilbert space (the generator is d² × d²).
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `dρ/dt` for the given state.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.generator * vectorize(rho)), self.dim())
    }

    /// Largest |tr(L(E_ij))| over basis matrices, i.e. how far the trace
    /// functional is from annihilating the generator, relative to its norm.
    pub fn trace_residual(&self) -> f64 {
        let d = self.dim();
        let scale = norm1(&self.generator).max(1.0);
        let mut worst: f64 = 0.0;
        for col in 0..d * d {
            let s: Complex64 = (0..d).map(|i| self.generator[(i * d + i, col)]).sum();
            worst = worst.max(s.norm());
        }
        worst / scale
    }

    /// Superoperator sum; panics if the spaces differ.
    pub fn plus(&self, other: &Liouvillian) -> Liouvillian {
        assert!(self.space == other.space, "Liouvillian spaces differ");
        Liouvillian {
            space: self.space.clone(),
            generator: &self.generator + &other.generator,
        }
    }
}

/// Checks performed on every propagated state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub trace_drift: f64,
    /// |ρ − ρ†| before re-Hermitization.
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub halvings: u32,
    pub step: f64,
}

fn finish(
    space: &HilbertSpace,
    m: CMatrix,
    mut diag: Diagnostics,
) -> Result<(DensityMatrix, Diagnostics)> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Invariant {
            what: "finite state",
            measured: f64::NAN,
            bound: 0.0,
        });
    }
    diag.hermiticity = hermiticity_deviation(&m);
    if diag.hermiticity > RAW_HERMITICITY_TOLERANCE {
        return Err(Error::Invariant {
            what: "Hermiticity before symmetrization",
            measured: diag.hermiticity,
            bound: RAW_HERMITICITY_TOLERANCE,
        });
    }
    let rho = DensityMatrix::from_raw(space.clone(), m).hermitized();
    let tr = rho.trace();
    diag.trace_drift = (tr.re - 1.0).abs().max(tr.im.abs());
    diag.min_eigenvalue = rho.min_eigenvalue();
    rho.check(TRACE_TOLERANCE, HERMITICITY_TOLERANCE, POSITIVITY_FLOOR)?;
    Ok((rho, diag))
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "evolution time must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

fn check_space(l: &Liouvillian, rho: &DensityMatrix) -> Result<()> {
    if l.space() != rho.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// `exp(L t)` as a reusable map on column-stacked states.
#[derive(Clone, Debug)]
pub struct Propagator {
    space: HilbertSpace,
    map: CMatrix,
}

impl Propagator {
    pub fn new(l: &Liouvillian, t: f64) -> Result<Self> {
        check_time(t)?;
        let d2 = l.generator.nrows();
        let map = if t == 0.0 {
            CMatrix::identity(d2, d2)
        } else {
            expm(&(&l.generator * Complex64::new(t, 0.0)))
        };
        Ok(Self {
            space: l.space.clone(),
            map,
        })
    }

    /// Propagator for twice the duration.
    pub fn squared(&self) -> Self {
        Self {
            space: self.space.clone(),
            map: &self.map * &self.map,
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Propagator) -> Result<Self> {
        if self.space != next.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: self.space.clone(),
            map: &next.map * &self.map,
        })
    }

    pub fn map(&self) -> &CMatrix {
        &self.map
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(self.apply_with_diagnostics(rho)?.0)
    }

    pub fn apply_with_diagnostics(
        &self,
        rho: &DensityMatrix,
    ) -> Result<(DensityMatrix, Diagnostics)> {
        if &self.space != rho.space() {
            return Err(Error::SpaceMismatch);
        }
        let v = &self.map * vectorize(rho.matrix());
        finish(
            &self.space,
            unvectorize(&v, rho.dim()),
            Diagnostics::default(),
        )
    }
}

/// `ρ(t)` with `vec ρ(t) = exp(L t) vec ρ₀`.
pub fn propagate_expm(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_space(l, rho0)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    Propagator::new(l, t)?.apply(rho0)
}

/// A piecewise-constant stage of a protocol.
#[derive(Clone, Copy, Debug)]
pub struct Segment<'a> {
    pub generator: &'a Liouvillian,
    pub duration: f64,
}

impl<'a> Segment<'a> {
    pub fn new(generator: &'a Liouvillian, duration: f64) -> Self {
        Self {
            generator,
            duration,
        }
    }
}

fn check_schedule(schedule: &[Segment<'_>], rho0: &DensityMatrix) -> Result<()> {
    for seg in schedule {
        check_space(seg.generator, rho0)?;
        check_time(seg.duration)?;
    }
    Ok(())
}

/// Exact propagation through a schedule, one matrix exponential per segment.
pub fn propagate_schedule_expm(
    schedule: &[Segment<'_>],
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    check_schedule(schedule, rho0)?;
    let d = rho0.dim();
    let mut v = vectorize(rho0.matrix());
    for seg in schedule.iter().filter(|s| s.duration > 0.0) {
        let map = expm(&(&seg.generator.generator * Complex64::new(seg.duration, 0.0)));
        v = map * v;
    }
    Ok(finish(rho0.space(), unvectorize(&v, d), Diagnostics::default())?.0)
}

fn rk4_pass(schedule: &[Segment<'_>], v0: &CVector, d: usize, step: f64) -> (CVector, f64) {
    let trace = |v: &CVector| -> Complex64 { (0..d).map(|i| v[i * d + i]).sum() };
    let start = trace(v0);
    let mut drift: f64 = 0.0;
    let mut v = v0.clone();
    let half = Complex64::new(0.5, 0.0);
    for seg in schedule.iter().filter(|s| s.duration > 0.0) {
        let g = &seg.generator.generator;
        let n = (seg.duration / step).ceil().max(1.0) as usize;
        let h = seg.duration / n as f64;
        let hc = Complex64::new(h, 0.0);
        for _ in 0..n {
            let k1 = g * &v;
            let k2 = g * (&v + &k1 * (hc * half));
            let k3 = g * (&v + &k2 * (hc * half));
            let k4 = g * (&v + &k3 * hc);
            v += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * (hc / 6.0);
        }
        let t = trace(&v);
        drift = drift.max((t - start).norm());
        if !drift.is_finite() {
            break;
        }
    }
    (v, drift)
}

/// Fixed-step classical Runge–Kutta through a schedule.
///
/// The step is halved (at most [`MAX_HALVINGS`] times) until the trace
/// drift over the whole schedule is below 1e-9 and the final state passes
/// the Hermiticity and positivity checks.
pub fn propagate_rk4(
    schedule: &[Segment<'_>],
    rho0: &DensityMatrix,
    step: f64,
) -> Result<DensityMatrix> {
    Ok(propagate_rk4_with_diagnostics(schedule, rho0, step)?.0)
}

pub fn propagate_rk4_with_diagnostics(
    schedule: &[Segment<'_>],
    rho0: &DensityMatrix,
    step: f64,
) -> Result<(DensityMatrix, Diagnostics)> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "RK4 step must be positive, got {step}"
        )));
    }
    check_schedule(schedule, rho0)?;
    let d = rho0.dim();
    let v0 = vectorize(rho0.matrix());
    let mut last = Diagnostics::default();
    for halvings in 0..=MAX_HALVINGS {
        let h = step / f64::from(1u32 << halvings);
        let (v, drift) = rk4_pass(schedule, &v0, d, h);
        let m = unvectorize(&v, d);
        let finite = m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        last = Diagnostics {
            trace_drift: drift,
            hermiticity: if finite {
                hermiticity_deviation(&m)
            } else {
                f64::INFINITY
            },
            min_eigenvalue: if finite {
                hermitian_eigenvalues(&m).first().copied().unwrap_or(0.0)
            } else {
                f64::NEG_INFINITY
            },
            halvings,
            step: h,
        };
        if finite
            && drift < TRACE_TOLERANCE
            && last.hermiticity <= RAW_HERMITICITY_TOLERANCE
            && last.min_eigenvalue >= POSITIVITY_FLOOR
        {
            let (rho, mut diag) = finish(rho0.space(), m, last)?;
            diag.halvings = halvings;
            diag.step = h;
            return Ok((rho, diag));
        }
    }
    Err(Error::Integration {
        halvings: MAX_HALVINGS,
        step: last.step,
        drift: last.trace_drift,
        hermiticity: last.hermiticity,
        min_eigenvalue: last.min_eigenvalue,
    })
}

/// Propagation method selectable from configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Integrator {
    #[default]
    Expm,
    Rk4 {
        step: f64,
    },
}

impl Integrator {
    pub fn run(&self, schedule: &[Segment<'_>], rho0: &DensityMatrix) -> Result<DensityMatrix> {
        match *self {
            Integrator::Expm => propagate_schedule_expm(schedule, rho0),
            Integrator::Rk4 { step } => propagate_rk4(schedule, rho0, step),
        }
    }

    pub fn evolve(&self, l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        self.run(&[Segment::new(l, t)], rho0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{annihilation, embed, StateVector};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vec_convention_fixture() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let b =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(1.0, 1.0), c(-2.0, 0.0)]);
        let rho =
            CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.7, 0.0)]);
        let lhs = vectorize(&(&a * &rho * &b));
        let rhs = b.transpose().kronecker(&a) * vectorize(&rho);
        assert!((lhs - rhs).norm() < 1e-14);
        // column stacking
        assert_eq!(vectorize(&rho)[1], rho[(1, 0)]);
        assert_eq!(vectorize(&rho)[2], rho[(0, 1)]);
    }

    #[test]
    fn amplitude_damping() {
        let space = HilbertSpace::single("a", 2).unwrap();
        let a = embed(&annihilation(2).unwrap(), &space, "a").unwrap();
        let gamma = 3.0e5;
        let l = build_liouvillian(
            &Operator::zeros(&space),
            &[LindbladTerm::new(gamma, a).unwrap()],
        )
        .unwrap();
        assert!(l.trace_residual() < 1e-12);
        let rho0 = StateVector::basis(&space, &[1])
            .unwrap()
            .to_density_matrix();
        for t in [0.0, 1e-6, 3e-6, 1e-5] {
            let rho = propagate_expm(&l, &rho0, t).unwrap();
            assert_abs_diff_eq!(rho.populations()[1], (-gamma * t).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_unitary_matches_direct_exponential() {
        let space = HilbertSpace::new([("a", 2), ("b", 2)]).unwrap();
        let a = embed(&annihilation(2).unwrap(), &space, "a").unwrap();
        let b = embed(&annihilation(2).unwrap(), &space, "b").unwrap();
        let h = &(&(&a.adjoint() * &b) + &(&a * &b.adjoint())) * 7.0e7;
        let l = build_liouvillian(&h, &[]).unwrap();
        let psi = StateVector::superposition(
            &space,
            &[(&[1, 0][..], c(1.0, 0.0)), (&[0, 1][..], c(0.0, 0.6))],
        )
        .unwrap();
        let rho0 = psi.to_density_matrix();
        let t = 1.3e-8;
        let u = expm(&(h.matrix() * c(0.0, -t)));
        let want = &u * rho0.matrix() * u.adjoint();
        let got = propagate_expm(&l, &rho0, t).unwrap();
        let diff = (got.matrix() - want)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let space = HilbertSpace::single("a", 2).unwrap();
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        let h = Operator::new(space.clone(), m).unwrap();
        assert!(build_liouvillian(&h, &[]).is_err());
        assert!(LindbladTerm::new(-1.0, Operator::identity(&space)).is_err());

        let other = HilbertSpace::single("b", 2).unwrap();
        let term = LindbladTerm::new(1.0, Operator::identity(&other)).unwrap();
        assert!(matches!(
            build_liouvillian(&Operator::zeros(&space), &[term]),
            Err(Error::SpaceMismatch)
        ));

        let l = build_liouvillian(&Operator::zeros(&space), &[]).unwrap();
        let rho = DensityMatrix::maximally_mixed(&space);
        assert!(propagate_expm(&l, &rho, -1.0).is_err());
        assert_eq!(propagate_expm(&l, &rho, 0.0).unwrap(), rho);
        assert!(propagate_rk4(&[Segment::new(&l, 1.0)], &rho, 0.0).is_err());
        assert_eq!(
            propagate_rk4(&[Segment::new(&l, 0.0)], &rho, 1e-3).unwrap(),
            rho
        );
    }

    #[test]
    fn rk4_reports_failure_when_unstable() {
        // a stiff decay that RK4 cannot resolve even after 20 halvings
        let space = HilbertSpace::single("a", 2).unwrap();
        let a = embed(&annihilation(2).unwrap(), &space, "a").unwrap();
        let l = build_liouvillian(
            &Operator::zeros(&space),
            &[LindbladTerm::new(1e14, a).unwrap()],
        )
        .unwrap();
        let rho0 = StateVector::basis(&space, &[1])
            .unwrap()
            .to_density_matrix();
        let err = propagate_rk4(&[Segment::new(&l, 1.0)], &rho0, 1.0).unwrap_err();
        assert!(matches!(
            err,
            Error::Integration {
                halvings: MAX_HALVINGS,
                ..
            }
        ));
    }

    #[test]
    fn propagator_squaring_matches_doubled_time() {
        let space = HilbertSpace::single("a", 2).unwrap();
        let a = embed(&annihilation(2).unwrap(), &space, "a").unwrap();
        let h = &a.adjoint() * &a;
        let l = build_liouvillian(&(&h * 2.0e6), &[LindbladTerm::new(1e5, a).unwrap()]).unwrap();
        let p = Propagator::new(&l, 2e-6).unwrap().squared();
        let q = Propagator::new(&l, 4e-6).unwrap();
        let diff = (p.map() - q.map())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }
}
