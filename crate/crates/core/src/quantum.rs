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

//! Dense complex operator algebra on tensor-product Hilbert spaces.
//!
//! A [`HilbertSpace`] is an ordered list of labelled subsystems. The order
//! fixes the Kronecker convention used everywhere in the crate: the leftmost
//! subsystem is the slowest-varying index. For a space `[("A", 2), ("B", 3)]`
//! the basis state `|a, b⟩` sits at flat index `3 * a + b`.
//!
//! Everything here is small and dense. The largest space the simulator
//! builds has 16 basis states, so superoperators stay below 256 × 256.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Trace tolerance applied when a density matrix is constructed.
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Largest elementwise |ρ − ρ†| accepted for a density matrix.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
/// Most negative eigenvalue accepted for a density matrix.
pub const POSITIVITY_FLOOR: f64 = -1e-8;
/// Norm tolerance for state vectors.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Subsystem {
    label: String,
    dim: usize,
}

/// Ordered tensor product of labelled subsystems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    subsystems: Vec<Subsystem>,
}

impl HilbertSpace {
    /// Builds a space from `(label, dimension)` pairs. Labels must be unique
    /// and dimensions nonzero (a dimension of 1 marks a spectator).
    pub fn new<I, S>(subsystems: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let subsystems: Vec<Subsystem> = subsystems
            .into_iter()
            .map(|(label, dim)| Subsystem {
                label: label.into(),
                dim,
            })
            .collect();
        if subsystems.is_empty() {
            return invalid("a Hilbert space needs at least one subsystem");
        }
        for (i, s) in subsystems.iter().enumerate() {
            if s.dim == 0 {
                return invalid(format!("subsystem `{}` has dimension 0", s.label));
            }
            if subsystems[..i].iter().any(|o| o.label == s.label) {
                return invalid(format!("duplicate subsystem label `{}`", s.label));
            }
        }
        Ok(Self { subsystems })
    }

    /// A space with a single subsystem.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    /// Total dimension, the product of the subsystem dimensions.
    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|s| s.label.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    pub fn subsystem_dim(&self, label: &str) -> Result<usize> {
        Ok(self.subsystems[self.position(label)?].dim)
    }

    /// Flat basis index of the product state with the given per-subsystem
    /// levels.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.subsystems.len() {
            return Err(Error::DimensionMismatch {
                expected: self.subsystems.len(),
                found: levels.len(),
            });
        }
        let mut index = 0;
        for (s, &level) in self.subsystems.iter().zip(levels) {
            if level >= s.dim {
                return invalid(format!(
                    "level {level} out of range for subsystem `{}` of dimension {}",
                    s.label, s.dim
                ));
            }
            index = index * s.dim + level;
        }
        Ok(index)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.subsystems.len()];
        for (slot, s) in levels.iter_mut().zip(&self.subsystems).rev() {
            *slot = index % s.dim;
            index /= s.dim;
        }
        levels
    }

    /// The subspace made of the listed subsystems, in this space's order.
    pub fn subspace(&self, labels: &[&str]) -> Result<HilbertSpace> {
        for l in labels {
            self.position(l)?;
        }
        let kept: Vec<Subsystem> = self
            .subsystems
            .iter()
            .filter(|s| labels.contains(&s.label.as_str()))
            .cloned()
            .collect();
        if kept.is_empty() {
            return invalid("cannot keep zero subsystems");
        }
        Ok(HilbertSpace { subsystems: kept })
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .subsystems
            .iter()
            .map(|s| format!("{}({})", s.label, s.dim))
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise |m − m†|.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// A linear operator on a [`HilbertSpace`].
///
/// Arithmetic operators (`+`, `-`, `*`) panic when the operands live on
/// different spaces, in the same way nalgebra panics on shape mismatch.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    /// Operator on an anonymous single-subsystem space, for use with
    /// [`embed`].
    pub fn local(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return invalid("operator matrix must be square");
        }
        let space = HilbertSpace::single("local", matrix.nrows())?;
        Self::new(space, matrix)
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }

    /// Hermiticity check with a tolerance relative to the largest entry
    /// (Hamiltonians are expressed in rad/s and routinely reach 1e10).
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        self.hermiticity_deviation() <= rel_tol * scale
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        max_abs_diff(&prod, &CMatrix::identity(d, d)) <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues (ascending) of a Hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(1e-10) {
            return invalid("eigenvalues requested for a non-Hermitian operator");
        }
        Ok(hermitian_eigenvalues(&self.matrix))
    }

    /// `tr(self · ρ)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<Complex64> {
        if self.space != rho.space {
            return Err(Error::SpaceMismatch);
        }
        Ok((&self.matrix * &rho.matrix).trace())
    }
}

fn assert_same(a: &HilbertSpace, b: &HilbertSpace) {
    assert!(a == b, "operator spaces differ: {a} vs {b}");
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_same(&self.space, &rhs.space);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_same(&self.space, &rhs.space);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_same(&self.space, &rhs.space);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * Complex64::new(rhs, 0.0),
        }
    }
}

impl Mul<Complex64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: Complex64) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * rhs,
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self * -1.0
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Operator {
            type Output = Operator;
            fn $m(self, rhs: Operator) -> Operator {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Operator> for Operator {
            type Output = Operator;
            fn $m(self, rhs: &Operator) -> Operator {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        &self * rhs
    }
}

/// Bosonic annihilation operator truncated to `dimension` Fock levels:
/// `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(dimension: usize) -> Result<Operator> {
    if dimension < 2 {
        return invalid(format!(
            "annihilation needs dimension >= 2, got {dimension}"
        ));
    }
    let mut m = CMatrix::zeros(dimension, dimension);
    for n in 1..dimension {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Operator::local(m)
}

pub fn creation(dimension: usize) -> Result<Operator> {
    Ok(annihilation(dimension)?.adjoint())
}

/// `a†a` on `dimension` levels.
pub fn number(dimension: usize) -> Result<Operator> {
    let a = annihilation(dimension)?;
    Ok(&a.adjoint() * &a)
}

/// `|i⟩⟨j|` on a `dimension`-level system.
pub fn projector(i: usize, j: usize, dimension: usize) -> Result<Operator> {
    if i >= dimension || j >= dimension {
        return invalid(format!(
            "projector indices ({i}, {j}) out of range for dimension {dimension}"
        ));
    }
    let mut m = CMatrix::zeros(dimension, dimension);
    m[(i, j)] = ONE;
    Operator::local(m)
}

/// Lifts a single-subsystem operator onto `space`, acting as the identity
/// on every other subsystem.
pub fn embed(op: &Operator, space: &HilbertSpace, label: &str) -> Result<Operator> {
    let pos = space.position(label)?;
    let dims = space.dims();
    if op.dim() != dims[pos] {
        return Err(Error::DimensionMismatch {
            expected: dims[pos],
            found: op.dim(),
        });
    }
    let before: usize = dims[..pos].iter().product();
    let after: usize = dims[pos + 1..].iter().product();
    let m = CMatrix::identity(before, before)
        .kronecker(&op.matrix)
        .kronecker(&CMatrix::identity(after, after));
    Operator::new(space.clone(), m)
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Invariant {
                what: "state norm",
                measured: norm,
                bound: NORM_TOLERANCE,
            });
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalizes `amplitudes` before building the state.
    pub fn normalized(space: HilbertSpace, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        Self::new(space, amplitudes.unscale(norm))
    }

    /// Product basis state with the given per-subsystem levels.
    pub fn basis(space: &HilbertSpace, levels: &[usize]) -> Result<Self> {
        let idx = space.index_of(levels)?;
        let mut v = CVector::zeros(space.dim());
        v[idx] = ONE;
        Self::new(space.clone(), v)
    }

    /// Normalized superposition of product basis states.
    pub fn superposition(space: &HilbertSpace, terms: &[(&[usize], Complex64)]) -> Result<Self> {
        let mut v = CVector::zeros(space.dim());
        for (levels, amp) in terms {
            v[space.index_of(levels)?] += amp;
        }
        Self::normalized(space.clone(), v)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Applies a unitary and renormalizes away roundoff.
    pub fn evolve(&self, unitary: &CMatrix) -> Result<StateVector> {
        Self::normalized(self.space.clone(), unitary * &self.amplitudes)
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A density matrix: unit trace, Hermitian, positive semidefinite within the
/// crate tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let rho = Self { space, matrix };
        rho.check(TRACE_TOLERANCE, HERMITICITY_TOLERANCE, POSITIVITY_FLOOR)?;
        Ok(rho)
    }

    /// Skips validation; for the propagators, which run their own checks.
    pub(crate) fn from_raw(space: HilbertSpace, matrix: CMatrix) -> Self {
        Self { space, matrix }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density_matrix()
    }

    pub fn maximally_mixed(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        }
    }

    /// Validates trace, Hermiticity and positivity against the given bounds.
    pub fn check(&self, trace_tol: f64, herm_tol: f64, positivity_floor: f64) -> Result<()> {
        if self
            .matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return invalid("density matrix has non-finite entries");
        }
        let drift = (self.trace().re - 1.0).abs().max(self.trace().im.abs());
        if drift > trace_tol {
            return Err(Error::Invariant {
                what: "unit trace",
                measured: drift,
                bound: trace_tol,
            });
        }
        let herm = self.hermiticity_deviation();
        if herm > herm_tol {
            return Err(Error::Invariant {
                what: "Hermiticity",
                measured: herm,
                bound: herm_tol,
            });
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < positivity_floor {
            return Err(Error::Invariant {
                what: "positivity",
                measured: min_ev,
                bound: positivity_floor,
            });
        }
        Ok(())
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Diagonal of ρ in the product basis.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `(ρ + ρ†)/2`.
    pub fn hermitized(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let diff = &self.matrix - &other.matrix;
        Ok(0.5
            * hermitian_eigenvalues(&diff)
                .iter()
                .map(|x| x.abs())
                .sum::<f64>())
    }

    /// Product state `self ⊗ other` on the concatenated space.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let subsystems = self
            .space
            .subsystems
            .iter()
            .chain(&other.space.subsystems)
            .map(|s| (s.label.clone(), s.dim));
        let space = HilbertSpace::new(subsystems)?;
        Ok(Self {
            space,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// `⟨target|ρ|target⟩`.
pub fn fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    if rho.space != target.space {
        return Err(Error::SpaceMismatch);
    }
    let psi = &target.amplitudes;
    let value = psi.dotc(&(&rho.matrix * psi));
    if value.im.abs() >= 1e-10 {
        return Err(Error::Invariant {
            what: "real-valued fidelity",
            measured: value.im.abs(),
            bound: 1e-10,
        });
    }
    Ok(value.re)
}

/// Reduced density matrix on the subsystems in `keep`; the rest are traced
/// out. The kept subsystems retain their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    let space = &rho.space;
    let reduced = space.subspace(keep)?;
    let kept: Vec<bool> = space.labels().map(|l| keep.contains(&l)).collect();
    let d = space.dim();
    let dr = reduced.dim();
    let dims = space.dims();

    // Split every flat index into (kept index, traced index) once.
    let split: Vec<(usize, usize)> = (0..d)
        .map(|i| {
            let levels = space.levels_of(i);
            let (mut k, mut t) = (0, 0);
            for ((&lv, &dim), &is_kept) in levels.iter().zip(&dims).zip(&kept) {
                if is_kept {
                    k = k * dim + lv;
                } else {
                    t = t * dim + lv;
                }
            }
            (k, t)
        })
        .collect();

    let mut out = CMatrix::from_element(dr, dr, ZERO);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho.matrix[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_raw(reduced, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_modes() -> HilbertSpace {
        HilbertSpace::new([("A", 2), ("B", 2)]).unwrap()
    }

    #[test]
    fn annihilation_matrices() {
        let a = annihilation(2).unwrap();
        assert_eq!(a.matrix()[(0, 1)], ONE);
        assert_eq!(a.matrix()[(1, 0)], ZERO);
        assert_eq!(a.matrix()[(0, 0)], ZERO);

        let a3 = annihilation(3).unwrap();
        assert_abs_diff_eq!(a3.matrix()[(1, 2)].re, 2f64.sqrt(), epsilon = 1e-15);

        let n = number(2).unwrap();
        assert_eq!(n.matrix()[(0, 0)], ZERO);
        assert_eq!(n.matrix()[(1, 1)], ONE);

        assert!(annihilation(1).is_err());
        assert!(annihilation(0).is_err());
    }

    #[test]
    fn projectors() {
        // levels g, e, f = 0, 1, 2
        let s_ge = projector(0, 1, 3).unwrap();
        assert_eq!(s_ge.matrix()[(0, 1)], ONE);
        assert_eq!(s_ge.matrix().iter().filter(|z| **z != ZERO).count(), 1);

        let sz = &projector(1, 1, 3).unwrap() - &projector(0, 0, 3).unwrap();
        assert_eq!(sz.matrix()[(1, 1)], ONE);
        assert_eq!(sz.matrix()[(0, 0)], -ONE);
        assert_eq!(sz.matrix()[(2, 2)], ZERO);

        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    projector(i, j, 3).unwrap().adjoint(),
                    projector(j, i, 3).unwrap()
                );
            }
        }
        assert!(projector(3, 0, 3).is_err());
    }

    #[test]
    fn kronecker_order_fixture() {
        // 2 ⊗ 3: |a, b⟩ lives at 3a + b.
        let space = HilbertSpace::new([("A", 2), ("B", 3)]).unwrap();
        assert_eq!(space.index_of(&[1, 2]).unwrap(), 5);
        assert_eq!(space.index_of(&[1, 0]).unwrap(), 3);
        assert_eq!(space.levels_of(4), vec![1, 1]);

        let xa = embed(&projector(1, 0, 2).unwrap(), &space, "A").unwrap();
        let v = StateVector::basis(&space, &[0, 2]).unwrap();
        let out = xa.matrix() * v.amplitudes();
        assert_eq!(out[space.index_of(&[1, 2]).unwrap()], ONE);
    }

    #[test]
    fn embed_identity_and_commutation() {
        let space = two_modes();
        let id = embed(
            &Operator::local(CMatrix::identity(2, 2)).unwrap(),
            &space,
            "A",
        )
        .unwrap();
        assert_eq!(id, Operator::identity(&space));

        let a = embed(&annihilation(2).unwrap(), &space, "A").unwrap();
        let b = embed(&annihilation(2).unwrap(), &space, "B").unwrap();
        let comm = a.commutator(&b).unwrap();
        assert_eq!(comm.max_abs(), 0.0);

        let aad = &a * &a.adjoint();
        assert_abs_diff_eq!(aad.matrix().trace().re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn embed_errors() {
        let space = two_modes();
        assert!(matches!(
            embed(&annihilation(2).unwrap(), &space, "C"),
            Err(Error::UnknownLabel(_))
        ));
        assert!(matches!(
            embed(&annihilation(3).unwrap(), &space, "A"),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn space_validation() {
        assert!(HilbertSpace::new([("A", 2), ("A", 2)]).is_err());
        assert!(HilbertSpace::new([("A", 0)]).is_err());
        assert!(HilbertSpace::new([("A", 1), ("B", 2)]).is_ok());
        assert_eq!(
            HilbertSpace::new([("A", 2), ("B", 3), ("C", 2)])
                .unwrap()
                .dim(),
            12
        );
    }

    #[test]
    fn fidelity_examples() {
        let q = HilbertSpace::single("q", 2).unwrap();
        let psi = StateVector::superposition(&q, &[(&[0], ONE), (&[1], c(0.0, 1.0))]).unwrap();
        let rho = psi.to_density_matrix();
        assert_abs_diff_eq!(fidelity(&rho, &psi).unwrap(), 1.0, epsilon = 1e-14);

        let mixed = DensityMatrix::maximally_mixed(&q);
        assert_abs_diff_eq!(fidelity(&mixed, &psi).unwrap(), 0.5, epsilon = 1e-14);

        let q3 = HilbertSpace::single("q", 3).unwrap();
        let any = StateVector::basis(&q3, &[2]).unwrap();
        assert_abs_diff_eq!(
            fidelity(&DensityMatrix::maximally_mixed(&q3), &any).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-14
        );

        let plus = StateVector::superposition(&q, &[(&[0], ONE), (&[1], ONE)]).unwrap();
        let half = DensityMatrix::new(q.clone(), CMatrix::identity(2, 2) * c(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(fidelity(&half, &plus).unwrap(), 0.5, epsilon = 1e-15);

        let other = HilbertSpace::single("r", 2).unwrap();
        let elsewhere = StateVector::basis(&other, &[0]).unwrap();
        assert!(matches!(
            fidelity(&half, &elsewhere),
            Err(Error::SpaceMismatch)
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let qa = HilbertSpace::single("A", 2).unwrap();
        let qb = HilbertSpace::single("B", 3).unwrap();
        let ra = StateVector::superposition(&qa, &[(&[0], ONE), (&[1], c(0.3, 0.4))])
            .unwrap()
            .to_density_matrix();
        let rb = DensityMatrix::maximally_mixed(&qb);
        let prod = ra.tensor(&rb).unwrap();
        let back = prod.partial_trace(&["A"]).unwrap();
        assert!(max_abs_diff(back.matrix(), ra.matrix()) < 1e-15);
        let back_b = prod.partial_trace(&["B"]).unwrap();
        assert!(max_abs_diff(back_b.matrix(), rb.matrix()) < 1e-15);

        let space = two_modes();
        let bell = StateVector::superposition(&space, &[(&[0, 0], ONE), (&[1, 1], ONE)]).unwrap();
        let reduced = bell.to_density_matrix().partial_trace(&["A"]).unwrap();
        assert!(
            max_abs_diff(
                reduced.matrix(),
                DensityMatrix::maximally_mixed(&qa).matrix()
            ) < 1e-15
        );
        assert_abs_diff_eq!(reduced.trace().re, 1.0, epsilon = 1e-12);

        assert!(matches!(
            bell.to_density_matrix().partial_trace(&["Z"]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let q = HilbertSpace::single("q", 2).unwrap();
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(q.clone(), bad_trace).is_err());

        let mut non_herm = CMatrix::identity(2, 2) * c(0.5, 0.0);
        non_herm[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(q.clone(), non_herm).is_err());

        // diag(1.5, -0.5): unit trace, Hermitian, not positive
        let mut neg = CMatrix::zeros(2, 2);
        neg[(0, 0)] = c(1.5, 0.0);
        neg[(1, 1)] = c(-0.5, 0.0);
        assert!(matches!(
            DensityMatrix::new(q.clone(), neg),
            Err(Error::Invariant {
                what: "positivity",
                ..
            })
        ));

        // tiny negative eigenvalue within the floor is accepted
        let mut tiny = CMatrix::zeros(2, 2);
        tiny[(0, 0)] = c(1.0 + 5e-9, 0.0);
        tiny[(1, 1)] = c(-5e-9, 0.0);
        assert!(DensityMatrix::new(q, tiny).is_ok());
    }

    #[test]
    fn state_vector_norm() {
        let q = HilbertSpace::single("q", 2).unwrap();
        let v = CVector::from_vec(vec![ONE, ONE]);
        assert!(StateVector::new(q.clone(), v.clone()).is_err());
        let s = StateVector::normalized(q, v).unwrap();
        assert_abs_diff_eq!(s.amplitudes().norm(), 1.0, epsilon = 1e-15);
    }
}
