//! Dense complex linear algebra for small fixed dimensions.
//!
//! Everything the simulator needs lives on a three-dimensional Hilbert space,
//! so matrices and kets are stack arrays parameterized by a const dimension.
//! Hermitian matrices are diagonalized with cyclic complex Jacobi rotations and
//! the propagator `exp(-iHt)` is assembled from the spectral decomposition.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix is not Hermitian: max|H - H^dagger| = {residual:e} exceeds {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("Jacobi iteration failed to converge (off-diagonal norm {off:e})")]
    NoConvergence { off: f64 },
}

/// Square complex matrix of dimension `D`, row-major.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix<const D: usize> {
    #[serde(with = "serde_rows")]
    entries: [[C64; D]; D],
}

/// Complex column vector of dimension `D`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ket<const D: usize> {
    #[serde(with = "serde_amps")]
    amplitudes: [C64; D],
}

/// Operators on the three-level system, basis order `{|0>, |-1>, |+1>}`.
pub type ComplexMatrix = Matrix<3>;
/// Kets on the three-level system, basis order `{|0>, |-1>, |+1>}`.
pub type StateVector = Ket<3>;

impl<const D: usize> Matrix<D> {
    pub fn zeros() -> Self {
        Self { entries: [[C64::new(0.0, 0.0); D]; D] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            m.entries[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(entries: [[C64; D]; D]) -> Self {
        Self { entries }
    }

    pub fn from_real_rows(rows: [[f64; D]; D]) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for j in 0..D {
                m.entries[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn diagonal(values: [C64; D]) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            m.entries[i][i] = values[i];
        }
        m
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &Ket<D>, b: &Ket<D>) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for j in 0..D {
                m.entries[i][j] = a.amplitudes[i] * b.amplitudes[j].conj();
            }
        }
        m
    }

    /// Matrix whose columns are the given kets.
    pub fn from_columns(cols: &[Ket<D>; D]) -> Self {
        let mut m = Self::zeros();
        for (j, col) in cols.iter().enumerate() {
            for i in 0..D {
                m.entries[i][j] = col.amplitudes[i];
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Ket<D> {
        let mut amps = [C64::new(0.0, 0.0); D];
        for (i, a) in amps.iter_mut().enumerate() {
            *a = self.entries[i][j];
        }
        Ket { amplitudes: amps }
    }

    pub fn rows(&self) -> &[[C64; D]; D] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for j in 0..D {
                m.entries[i][j] = self.entries[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.entries.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn apply(&self, v: &Ket<D>) -> Ket<D> {
        let mut out = [C64::new(0.0, 0.0); D];
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..D {
                *o += self.entries[i][j] * v.amplitudes[j];
            }
        }
        Ket { amplitudes: out }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance `max_ij |A_ij - B_ij|`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_finite()
            && self.hermiticity_residual() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// `max|U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_diff(&Self::identity())
    }

    pub fn trace(&self) -> C64 {
        (0..D).map(|i| self.entries[i][i]).sum()
    }

    /// `<a|M|b>`.
    pub fn matrix_element(&self, a: &Ket<D>, b: &Ket<D>) -> C64 {
        a.inner(&self.apply(b))
    }
}

impl<const D: usize> Default for Matrix<D> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const D: usize> Index<(usize, usize)> for Matrix<D> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i][j]
    }
}

impl<const D: usize> IndexMut<(usize, usize)> for Matrix<D> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i][j]
    }
}

impl<const D: usize> Add for Matrix<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..D {
            for j in 0..D {
                self.entries[i][j] += rhs.entries[i][j];
            }
        }
        self
    }
}

impl<const D: usize> Sub for Matrix<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..D {
            for j in 0..D {
                self.entries[i][j] -= rhs.entries[i][j];
            }
        }
        self
    }
}

impl<const D: usize> Neg for Matrix<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl<const D: usize> Mul for Matrix<D> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for k in 0..D {
                let a = self.entries[i][k];
                for j in 0..D {
                    m.entries[i][j] += a * rhs.entries[k][j];
                }
            }
        }
        m
    }
}

impl<const D: usize> fmt::Debug for Matrix<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix [")?;
        for row in &self.entries {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<const D: usize> Ket<D> {
    pub fn new(amplitudes: [C64; D]) -> Self {
        Self { amplitudes }
    }

    pub fn from_real(amplitudes: [f64; D]) -> Self {
        let mut a = [C64::new(0.0, 0.0); D];
        for (z, x) in a.iter_mut().zip(amplitudes) {
            *z = C64::new(x, 0.0);
        }
        Self { amplitudes: a }
    }

    /// Canonical basis ket `e_k`.
    pub fn basis(k: usize) -> Self {
        let mut a = [C64::new(0.0, 0.0); D];
        a[k] = C64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    pub fn amplitudes(&self) -> &[C64; D] {
        &self.amplitudes
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        self.scale(C64::new(1.0 / self.norm(), 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut k = *self;
        k.amplitudes.iter_mut().for_each(|z| *z *= s);
        k
    }

    pub fn populations(&self) -> [f64; D] {
        let mut p = [0.0; D];
        for (pi, z) in p.iter_mut().zip(self.amplitudes.iter()) {
            *pi = z.norm_sqr();
        }
        p
    }

    /// Euclidean distance to another ket.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl<const D: usize> Index<usize> for Ket<D> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.amplitudes[i]
    }
}

impl<const D: usize> Add for Ket<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..D {
            self.amplitudes[i] += rhs.amplitudes[i];
        }
        self
    }
}

impl<const D: usize> Sub for Ket<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..D {
            self.amplitudes[i] -= rhs.amplitudes[i];
        }
        self
    }
}

impl<const D: usize> fmt::Debug for Ket<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ket(")?;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, ")")
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDecomposition<const D: usize> {
    pub eigenvalues: [f64; D],
    pub eigenvectors: [Ket<D>; D],
}

impl<const D: usize> SpectralDecomposition<D> {
    /// Reassembles `V diag(f(E)) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> Matrix<D> {
        let mut out = Matrix::zeros();
        for (e, v) in self.eigenvalues.iter().zip(self.eigenvectors.iter()) {
            let w = f(*e);
            for i in 0..D {
                let vi = v.amplitudes[i] * w;
                for j in 0..D {
                    out.entries[i][j] += vi * v.amplitudes[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix<D> {
        self.reconstruct_with(|e| C64::new(e, 0.0))
    }

    /// `exp(-i H t)` for the decomposed `H`.
    pub fn propagator(&self, t: f64) -> Matrix<D> {
        self.reconstruct_with(|e| C64::from_polar(1.0, -e * t))
    }
}

/// Hermitian eigendecomposition.
///
/// Eigenvalues come back ascending; each eigenvector is rotated so that its
/// largest-modulus component (first one on ties) is real and nonnegative.
pub fn eig_hermitian<const D: usize>(h: &Matrix<D>) -> Result<SpectralDecomposition<D>, MatrixError> {
    if !h.is_finite() {
        return Err(MatrixError::NonFinite);
    }
    let scale = h.max_abs().max(1.0);
    let residual = h.hermiticity_residual();
    let tolerance = HERMITIAN_TOL * scale;
    if residual > tolerance {
        return Err(MatrixError::NotHermitian { residual, tolerance });
    }

    // Symmetrize so rounding in the input cannot bias the rotations.
    let mut a = (*h + h.adjoint()).scale_real(0.5);
    let mut v = Matrix::<D>::identity();
    let threshold = f64::EPSILON * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..D {
            for q in (p + 1)..D {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > 1e3 * threshold {
            return Err(MatrixError::NoConvergence { off });
        }
    }

    let mut order: [usize; D] = std::array::from_fn(|i| i);
    let diag: [f64; D] = std::array::from_fn(|i| a.entries[i][i].re);
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));

    let eigenvalues = std::array::from_fn(|k| diag[order[k]]);
    let eigenvectors = std::array::from_fn(|k| fix_phase(v.column(order[k])));
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// `exp(-i H t)` via the spectral decomposition of `H`.
pub fn expm_unitary<const D: usize>(h: &Matrix<D>, t: f64) -> Result<Matrix<D>, MatrixError> {
    Ok(eig_hermitian(h)?.propagator(t))
}

fn off_diagonal_norm<const D: usize>(a: &Matrix<D>) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        for j in 0..D {
            if i != j {
                s += a.entries[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn jacobi_rotate<const D: usize>(a: &mut Matrix<D>, v: &mut Matrix<D>, p: usize, q: usize) {
    let apq = a.entries[p][q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a.entries[p][p].re;
    let aqq = a.entries[q][q].re;

    // Real symmetric rotation for [[app, mag], [mag, aqq]].
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Column update R = diag(1, conj(phase)) [[c, s], [-s, c]] on (p, q).
    let r_pp = C64::new(c, 0.0);
    let r_pq = C64::new(s, 0.0);
    let r_qp = -phase.conj() * s;
    let r_qq = phase.conj() * c;

    for k in 0..D {
        let akp = a.entries[k][p];
        let akq = a.entries[k][q];
        a.entries[k][p] = akp * r_pp + akq * r_qp;
        a.entries[k][q] = akp * r_pq + akq * r_qq;
    }
    for k in 0..D {
        let apk = a.entries[p][k];
        let aqk = a.entries[q][k];
        a.entries[p][k] = r_pp.conj() * apk + r_qp.conj() * aqk;
        a.entries[q][k] = r_pq.conj() * apk + r_qq.conj() * aqk;
    }
    a.entries[p][q] = C64::new(0.0, 0.0);
    a.entries[q][p] = C64::new(0.0, 0.0);
    a.entries[p][p].im = 0.0;
    a.entries[q][q].im = 0.0;

    for k in 0..D {
        let vkp = v.entries[k][p];
        let vkq = v.entries[k][q];
        v.entries[k][p] = vkp * r_pp + vkq * r_qp;
        v.entries[k][q] = vkp * r_pq + vkq * r_qq;
    }
}

fn fix_phase<const D: usize>(k: Ket<D>) -> Ket<D> {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in k.amplitudes.iter().enumerate() {
        let m = z.norm();
        if m > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = m;
        }
    }
    if best_mag <= 0.0 {
        return k;
    }
    let z = k.amplitudes[best];
    let rot = z.conj() / z.norm();
    let mut out = k.normalized().scale(rot);
    out.amplitudes[best] = C64::new(out.amplitudes[best].norm(), 0.0);
    out
}

mod serde_rows {
    use num_complex::Complex64 as C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(
        rows: &[[C64; D]; D],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let v: Vec<Vec<[f64; 2]>> = rows
            .iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(
        d: De,
    ) -> Result<[[C64; D]; D], De::Error> {
        let v: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        if v.len() != D || v.iter().any(|r| r.len() != D) {
            return Err(serde::de::Error::custom(format!("expected {D}x{D} matrix")));
        }
        let mut out = [[C64::new(0.0, 0.0); D]; D];
        for (i, r) in v.iter().enumerate() {
            for (j, z) in r.iter().enumerate() {
                out[i][j] = C64::new(z[0], z[1]);
            }
        }
        Ok(out)
    }
}

mod serde_amps {
    use num_complex::Complex64 as C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(a: &[C64; D], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = a.iter().map(|z| [z.re, z.im]).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(
        d: De,
    ) -> Result<[C64; D], De::Error> {
        let v: Vec<[f64; 2]> = Vec::deserialize(d)?;
        if v.len() != D {
            return Err(serde::de::Error::custom(format!("expected {D} amplitudes")));
        }
        let mut out = [C64::new(0.0, 0.0); D];
        for (o, z) in out.iter_mut().zip(v) {
            *o = C64::new(z[0], z[1]);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn hermitian_from(parts: &[f64]) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros();
        let mut k = 0;
        for i in 0..3 {
            h[(i, i)] = c(parts[k], 0.0);
            k += 1;
            for j in (i + 1)..3 {
                h[(i, j)] = c(parts[k], parts[k + 1]);
                h[(j, i)] = h[(i, j)].conj();
                k += 2;
            }
        }
        h
    }

    fn projector(v: &StateVector) -> ComplexMatrix {
        ComplexMatrix::outer(v, v)
    }

    #[test]
    fn zero_matrix_gives_canonical_basis() {
        let sd = eig_hermitian(&ComplexMatrix::zeros()).unwrap();
        assert_eq!(sd.eigenvalues, [0.0; 3]);
        // degenerate: compare projectors
        let total = sd.eigenvectors.iter().fold(ComplexMatrix::zeros(), |acc, v| acc + projector(v));
        assert!(total.max_diff(&ComplexMatrix::identity()) < 1e-15);
        for (k, v) in sd.eigenvectors.iter().enumerate() {
            assert!(projector(v).max_diff(&projector(&StateVector::basis(k))) < 1e-15);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = ComplexMatrix::identity();
        h[(0, 1)] = c(1.0, 0.0);
        match eig_hermitian(&h) {
            Err(MatrixError::NotHermitian { residual, .. }) => assert!((residual - 1.0).abs() < 1e-15),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
        let mut nan = ComplexMatrix::zeros();
        nan[(2, 2)] = c(f64::NAN, 0.0);
        assert_eq!(eig_hermitian(&nan), Err(MatrixError::NonFinite));
        assert!(matches!(expm_unitary(&h, 1.0), Err(MatrixError::NotHermitian { .. })));
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let h = ComplexMatrix::diagonal([c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]);
        let sd = eig_hermitian(&h).unwrap();
        assert_eq!(sd.eigenvalues, [-1.0, 2.0, 3.0]);
        assert_eq!(sd.eigenvectors[0], StateVector::basis(1));
        assert_eq!(sd.eigenvectors[2], StateVector::basis(0));
    }

    #[test]
    fn phase_convention_largest_component_real() {
        let h = hermitian_from(&[0.3, 0.7, -1.1, 0.2, 0.5, -0.4, 0.9, 0.1, 0.6]);
        let sd = eig_hermitian(&h).unwrap();
        for v in &sd.eigenvectors {
            let (idx, _) = v
                .amplitudes()
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            assert_eq!(v[idx].im, 0.0);
            assert!(v[idx].re > 0.0);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let h = hermitian_from(&[1.0, 2.0, 0.5, -0.3, 0.1, 0.2, -2.0, 0.7, 0.4]);
        assert!(expm_unitary(&h, 0.0).unwrap().max_diff(&ComplexMatrix::identity()) < 1e-15);
    }

    #[test]
    fn two_level_rabi_matches_closed_form() {
        // H = (w/2) sigma_x on levels 0,1: exp(-iHt) = cos(wt/2) I - i sin(wt/2) sigma_x
        let w = 2.0 * PI * 4.0;
        let mut h = ComplexMatrix::zeros();
        h[(0, 1)] = c(w / 2.0, 0.0);
        h[(1, 0)] = c(w / 2.0, 0.0);
        let t = 0.037;
        let u = expm_unitary(&h, t).unwrap();
        let (cs, sn) = ((w * t / 2.0).cos(), (w * t / 2.0).sin());
        assert!((u[(0, 0)] - c(cs, 0.0)).norm() < 1e-13);
        assert!((u[(0, 1)] - c(0.0, -sn)).norm() < 1e-13);
        assert!((u[(2, 2)] - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn deterministic_output() {
        let h = hermitian_from(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        let a = eig_hermitian(&h).unwrap();
        let b = eig_hermitian(&h).unwrap();
        for k in 0..3 {
            assert_eq!(a.eigenvalues[k].to_bits(), b.eigenvalues[k].to_bits());
            for i in 0..3 {
                assert_eq!(a.eigenvectors[k][i].re.to_bits(), b.eigenvectors[k][i].re.to_bits());
                assert_eq!(a.eigenvectors[k][i].im.to_bits(), b.eigenvectors[k][i].im.to_bits());
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let h = hermitian_from(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        let s = serde_json::to_string(&h).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(h, back);
    }

    fn herm_strategy() -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec(-50.0f64..50.0, 9).prop_map(|v| hermitian_from(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn reconstruction_and_orthonormality(h in herm_strategy()) {
            let sd = eig_hermitian(&h).unwrap();
            let scale = h.max_abs().max(1.0);
            // oracle: direct multiply of returned factors
            let vmat = ComplexMatrix::from_columns(&sd.eigenvectors);
            let lam = ComplexMatrix::diagonal(sd.eigenvalues.map(|e| c(e, 0.0)));
            let rebuilt = vmat * lam * vmat.adjoint();
            prop_assert!(rebuilt.max_diff(&h) <= 1e-10 * scale);
            prop_assert!(vmat.unitarity_defect() <= 1e-12);
            prop_assert!(sd.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn propagator_is_unitary(h in herm_strategy(), t in -5.0f64..5.0) {
            let u = expm_unitary(&h, t).unwrap();
            prop_assert!(u.unitarity_defect() <= 1e-10);
            let back = expm_unitary(&h, -t).unwrap();
            prop_assert!((u * back).max_diff(&ComplexMatrix::identity()) <= 1e-10);
        }
    }
}
