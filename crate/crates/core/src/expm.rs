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

//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13.
//!
//! Degree and squaring count follow the backward-error bounds of Higham
//! (2005): the selected approximant is accurate to unit roundoff once the
//! scaled 1-norm is below the corresponding θ.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::quantum::CMatrix;

const THETA: [f64; 5] = [
    1.495585217958292e-2,
    2.539_398_330_063_23e-1,
    9.504178996162932e-1,
    2.097847961257068,
    5.371920351148152,
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m * Complex64::new(s, 0.0)
}

/// Odd/even parts `(U, V)` of a low-degree Padé approximant from the
/// precomputed even powers of `a`.
fn low_degree(a: &CMatrix, powers: &[CMatrix], b: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let mut u = scaled(&id, b[1]);
    let mut v = scaled(&id, b[0]);
    for (k, p) in powers.iter().enumerate() {
        u += scaled(p, b[2 * k + 3]);
        v += scaled(p, b[2 * k + 2]);
    }
    (a * u, v)
}

fn degree13(a: &CMatrix) -> (CMatrix, CMatrix) {
    let b = &B13;
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]);
    let u = a
        * (&a6 * inner_u
            + scaled(&a6, b[7])
            + scaled(&a4, b[5])
            + scaled(&a2, b[3])
            + scaled(&id, b[1]));
    let inner_v = scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]);
    let v = &a6 * inner_v
        + scaled(&a6, b[6])
        + scaled(&a4, b[4])
        + scaled(&a2, b[2])
        + scaled(&id, b[0]);
    (u, v)
}

/// Solves `(V − U) X = V + U` for the Padé quotient.
fn pade_quotient(u: CMatrix, v: CMatrix) -> CMatrix {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the θ bounds")
}

/// `exp(m)` for a square complex matrix.
///
/// ```
/// use nalgebra::DMatrix;
/// use num_complex::Complex64;
/// use tlrsim::expm::expm;
///
/// // exp of a rotation generator
/// let t = 0.7;
/// let g = DMatrix::from_row_slice(2, 2, &[
///     Complex64::new(0.0, 0.0), Complex64::new(-t, 0.0),
///     Complex64::new(t, 0.0), Complex64::new(0.0, 0.0),
/// ]);
/// let r = expm(&g);
/// assert!((r[(0, 0)].re - t.cos()).abs() < 1e-15);
/// assert!((r[(1, 0)].re - t.sin()).abs() < 1e-15);
/// ```
pub fn expm(m: &CMatrix) -> CMatrix {
    assert!(m.is_square(), "expm needs a square matrix");
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let norm = norm1(m);
    if norm == 0.0 {
        return CMatrix::identity(n, n);
    }

    if norm <= THETA[3] {
        let a2 = m * m;
        let (u, v) = if norm <= THETA[0] {
            low_degree(m, &[a2], &B3)
        } else if norm <= THETA[1] {
            let a4 = &a2 * &a2;
            low_degree(m, &[a2, a4], &B5)
        } else if norm <= THETA[2] {
            let a4 = &a2 * &a2;
            let a6 = &a4 * &a2;
            low_degree(m, &[a2, a4, a6], &B7)
        } else {
            let a4 = &a2 * &a2;
            let a6 = &a4 * &a2;
            let a8 = &a6 * &a2;
            low_degree(m, &[a2, a4, a6, a8], &B9)
        };
        return pade_quotient(u, v);
    }

    let s = (norm / THETA[4]).log2().ceil().max(0.0) as i32;
    let a = scaled(m, 0.5f64.powi(s));
    let (u, v) = degree13(&a);
    let mut r = pade_quotient(u, v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_is_identity() {
        let z = CMatrix::zeros(3, 3);
        assert_eq!(expm(&z), CMatrix::identity(3, 3));
    }

    #[test]
    fn diagonal_at_every_degree() {
        // one scale per Padé branch plus one needing squarings
        for scale in [1e-3, 0.2, 0.9, 2.0, 5.0, 40.0, 900.0] {
            let d = [c(-scale, 0.3), c(0.5 * scale, -scale), c(0.0, 0.2 * scale)];
            let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.to_vec()));
            let e = expm(&m);
            for (i, z) in d.iter().enumerate() {
                let want = z.exp();
                assert!(
                    (e[(i, i)] - want).norm() <= 1e-13 * want.norm().max(1.0),
                    "scale {scale}: {} vs {want}",
                    e[(i, i)]
                );
            }
        }
    }

    #[test]
    fn nilpotent_block() {
        // exp([[0, a], [0, 0]]) = [[1, a], [0, 1]]
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(3.5, -1.0);
        let e = expm(&m);
        assert_abs_diff_eq!(e[(0, 1)].re, 3.5, epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 1)].im, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 0)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_generator_gives_unitary() {
        // -i t X with X the 2-level exchange
        let t = 123.4;
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(0.0, -t);
        m[(1, 0)] = c(0.0, -t);
        let u = expm(&m);
        assert_abs_diff_eq!(u[(0, 0)].re, t.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(u[(0, 1)].im, -t.sin(), epsilon = 1e-12);
        let prod = u.adjoint() * &u;
        assert!(max_diff(&prod, &CMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn semigroup() {
        let m = CMatrix::from_fn(4, 4, |i, j| {
            c((i as f64 - j as f64) * 0.7, (i * j) as f64 * 0.1)
        });
        let whole = expm(&(&m * c(2.0, 0.0)));
        let half = expm(&m);
        let rel = max_diff(&whole, &(&half * &half)) / norm1(&whole);
        assert!(rel < 1e-12, "{rel}");
    }
}
