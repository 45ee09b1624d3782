//! Dense complex linear algebra for small Hilbert spaces.
//!
//! States are plain amplitude vectors in a fixed orthonormal basis, operators are
//! row-major `dim × dim` matrices. Composite systems use row-major tensor ordering:
//! the first factor is the slowest index, so `|i⟩ ⊗ |j⟩` sits at `i * dim_b + j`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude; the basic scalar of every state and operator here.
pub type Amplitude = Complex64;

/// Allowed deviation from unit norm for a physical state.
pub const NORM_TOL: f64 = 1e-12;
/// Allowed `max |H_ij - conj(H_ji)|` for a Hermitian operator.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Vectors shorter than this cannot be normalized.
pub const ZERO_NORM_FLOOR: f64 = 1e-14;

fn all_finite(values: &[Amplitude]) -> bool {
    values.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// A vector of amplitudes.
///
/// Physical states carry unit norm. Differences of states (such as the change of a
/// state over a time step) are stored in the same type with `is_physical == false`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Amplitude>,
    is_physical: bool,
}

impl StateVector {
    /// Builds a physical state. The amplitudes must already have unit norm.
    pub fn new(amps: Vec<Amplitude>) -> Result<Self> {
        let v = Self::raw(amps)?;
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            is_physical: true,
            ..v
        })
    }

    /// Builds a non-physical vector with no norm constraint.
    pub fn raw(amps: Vec<Amplitude>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if !all_finite(&amps) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            amps,
            is_physical: false,
        })
    }

    /// Builds a physical state from real amplitudes, normalizing them first.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        let amps = values.iter().map(|&x| Amplitude::new(x, 0.0)).collect();
        normalize(&Self::raw(amps)?)
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut amps = vec![Amplitude::new(0.0, 0.0); dim];
        amps[index] = Amplitude::new(1.0, 0.0);
        Self {
            amps,
            is_physical: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amps: vec![Amplitude::new(0.0, 0.0); dim],
            is_physical: false,
        }
    }

    /// Wraps amplitudes produced by a norm-preserving computation without re-checking.
    pub(crate) fn from_parts(amps: Vec<Amplitude>, is_physical: bool) -> Self {
        debug_assert!(all_finite(&amps));
        Self { amps, is_physical }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn is_physical(&self) -> bool {
        self.is_physical
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Amplitude> {
        inner_product(self, other)
    }

    /// `self - other`, always non-physical.
    pub fn sub(&self, other: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), other.dim())?;
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_parts(amps, false))
    }

    /// `self + other`, always non-physical.
    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), other.dim())?;
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_parts(amps, false))
    }

    /// Multiplies by a scalar. The result stays physical only for a physical input
    /// and a unit-modulus factor.
    pub fn scale(&self, factor: Amplitude) -> StateVector {
        let amps = self.amps.iter().map(|a| a * factor).collect();
        let keeps_norm = (factor.norm() - 1.0).abs() <= NORM_TOL;
        Self::from_parts(amps, self.is_physical && keeps_norm)
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Amplitude> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

pub fn normalize(v: &StateVector) -> Result<StateVector> {
    let norm = v.norm();
    if norm <= ZERO_NORM_FLOOR || !norm.is_finite() {
        return Err(Error::ZeroVector { norm });
    }
    let amps = v.amps.iter().map(|a| a / norm).collect();
    Ok(StateVector::from_parts(amps, true))
}

/// `a ⊗ b` with the first factor as the slow index.
pub fn tensor_product_state(a: &StateVector, b: &StateVector) -> StateVector {
    let amps = a
        .amps
        .iter()
        .flat_map(|x| b.amps.iter().map(move |y| x * y))
        .collect();
    StateVector::from_parts(amps, a.is_physical && b.is_physical)
}

/// A Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl HermitianOperator {
    /// Validates shape, finiteness and Hermiticity (to [`HERMITICITY_TOL`]).
    pub fn new(dim: usize, entries: Vec<Amplitude>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        check_dims(dim * dim, entries.len())?;
        if !all_finite(&entries) {
            return Err(Error::NonFinite);
        }
        let max_deviation = hermiticity_deviation(dim, &entries);
        if max_deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_deviation });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Amplitude>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dims(dim, row.len())?;
            entries.extend(row);
        }
        Self::new(dim, entries)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut entries = vec![Amplitude::new(0.0, 0.0); dim * dim];
        for (i, &v) in values.iter().enumerate() {
            entries[i * dim + i] = Amplitude::new(v, 0.0);
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("identity is Hermitian")
    }

    pub fn zeros(dim: usize) -> Self {
        Self::diagonal(&vec![0.0; dim]).expect("zero matrix is Hermitian")
    }

    /// Rank-one projector `|v⟩⟨v|` onto the normalized direction of `v`.
    pub fn projector(v: &StateVector) -> Result<Self> {
        let u = normalize(v)?;
        let dim = u.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(u.amps[i] * u.amps[j].conj());
            }
        }
        Ok(Self::hermitize(dim, entries))
    }

    /// Symmetrizes `(M + M†)/2`; exact Hermitian output for any square input.
    pub(crate) fn hermitize(dim: usize, m: Vec<Amplitude>) -> Self {
        let mut entries = m.clone();
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = (m[i * dim + j] + m[j * dim + i].conj()) * 0.5;
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `H |v⟩`. Physicality of the result is not tracked.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dims(self.dim, v.dim())?;
        let amps = matvec(self.dim, &self.entries, &v.amps);
        Ok(StateVector::from_parts(amps, false))
    }

    /// `⟨v|H|v⟩` (real for Hermitian H; the imaginary roundoff is dropped).
    pub fn expectation(&self, v: &StateVector) -> Result<f64> {
        let hv = self.apply(v)?;
        Ok(inner_product(v, &hv)?.re)
    }

    /// Matrix product `self · other` as a plain row-major matrix.
    pub fn matmul(&self, other: &HermitianOperator) -> Result<Vec<Amplitude>> {
        check_dims(self.dim, other.dim)?;
        Ok(matmul(self.dim, &self.entries, &other.entries))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

fn hermiticity_deviation(dim: usize, m: &[Amplitude]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in i..dim {
            worst = worst.max((m[i * dim + j] - m[j * dim + i].conj()).norm());
        }
    }
    worst
}

pub(crate) fn matvec(dim: usize, m: &[Amplitude], v: &[Amplitude]) -> Vec<Amplitude> {
    (0..dim)
        .map(|i| {
            m[i * dim..(i + 1) * dim]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

pub(crate) fn matmul(dim: usize, a: &[Amplitude], b: &[Amplitude]) -> Vec<Amplitude> {
    let mut out = vec![Amplitude::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == Amplitude::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// Frobenius norm of `a - b` for two row-major matrices of equal size.
pub fn frobenius_distance(a: &[Amplitude], b: &[Amplitude]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `a ⊗ b` with the first factor as the slow index.
pub fn tensor_product_operator(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    let (da, db) = (a.dim, b.dim);
    let dim = da * db;
    let mut entries = vec![Amplitude::new(0.0, 0.0); dim * dim];
    for i in 0..da {
        for j in 0..da {
            let aij = a.entries[i * da + j];
            for k in 0..db {
                for l in 0..db {
                    entries[(i * db + k) * dim + (j * db + l)] = aij * b.entries[k * db + l];
                }
            }
        }
    }
    HermitianOperator { dim, entries }
}

/// Stopping rule for the cyclic Jacobi eigensolver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiConfig {
    pub max_sweeps: usize,
    /// Converged once the off-diagonal Frobenius norm drops to this fraction of `‖H‖_F`.
    pub off_diag_rel_tol: f64,
}

impl Default for JacobiConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 100,
            off_diag_rel_tol: 1e-14,
        }
    }
}

/// `H = V Λ V†` with eigenvalues ascending and eigenvectors in the columns of `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Row-major `dim × dim`; column `k` is the eigenvector for `eigenvalues[k]`.
    eigenvectors: Vec<Amplitude>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row-major eigenvector matrix `V`.
    pub fn eigenvector_matrix(&self) -> &[Amplitude] {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> StateVector {
        let n = self.dim();
        let amps = (0..n).map(|i| self.eigenvectors[i * n + k]).collect();
        StateVector::from_parts(amps, true)
    }

    /// `V† |v⟩`: amplitudes of `v` in the eigenbasis.
    pub fn to_eigenbasis(&self, v: &[Amplitude]) -> Vec<Amplitude> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| self.eigenvectors[i * n + k].conj() * v[i])
                    .sum()
            })
            .collect()
    }

    /// `V |c⟩`: back from eigenbasis amplitudes.
    pub fn from_eigenbasis(&self, c: &[Amplitude]) -> Vec<Amplitude> {
        matvec(self.dim(), &self.eigenvectors, c)
    }

    /// `V Λ V†` as a row-major matrix.
    pub fn reconstruct(&self) -> Vec<Amplitude> {
        let n = self.dim();
        let mut out = vec![Amplitude::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n)
                    .map(|k| {
                        self.eigenvectors[i * n + k]
                            * self.eigenvalues[k]
                            * self.eigenvectors[j * n + k].conj()
                    })
                    .sum();
            }
        }
        out
    }

    /// `‖V†V - I‖_F`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let dot: Amplitude = (0..n)
                    .map(|i| self.eigenvectors[i * n + a].conj() * self.eigenvectors[i * n + b])
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                acc += (dot - target).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

pub fn eigendecompose(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    eigendecompose_with(h, &JacobiConfig::default())
}

/// Cyclic Jacobi diagonalization of a complex Hermitian matrix.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary and then
/// applies the real symmetric Jacobi rotation, i.e. `G = D R D†` with
/// `D = diag(1, e^{-iφ})` on the `(p, q)` plane.
pub fn eigendecompose_with(
    h: &HermitianOperator,
    config: &JacobiConfig,
) -> Result<SpectralDecomposition> {
    let n = h.dim;
    let max_deviation = hermiticity_deviation(n, &h.entries);
    if max_deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian { max_deviation });
    }

    let mut a = h.entries.clone();
    let mut v = vec![Amplitude::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Amplitude::new(1.0, 0.0);
        a[i * n + i].im = 0.0;
    }
    let threshold = config.off_diag_rel_tol * h.frobenius_norm();

    let off_norm = |a: &[Amplitude]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == config.max_sweeps {
            return Err(Error::ConvergenceFailure {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let beta = apq.norm();
                if beta == 0.0 {
                    continue;
                }
                let phase = apq / beta;
                let (app, aqq) = (a[p * n + p].re, a[q * n + q].re);
                let theta = (aqq - app) / (2.0 * beta);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G_pp = c, G_pq = s e^{iφ}, G_qp = -s e^{-iφ}, G_qq = c
                let g_pq = phase * s;
                let g_qp = -phase.conj() * s;

                // A <- A G
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c + akq * g_qp;
                    a[k * n + q] = akp * g_pq + akq * c;
                }
                // A <- G† A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c + aqk * g_qp.conj();
                    a[q * n + k] = apk * g_pq.conj() + aqk * c;
                }
                a[p * n + q] = Amplitude::new(0.0, 0.0);
                a[q * n + p] = Amplitude::new(0.0, 0.0);
                a[p * n + p] = Amplitude::new(app - t * beta, 0.0);
                a[q * n + q] = Amplitude::new(aqq + t * beta, 0.0);
                // V <- V G
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c + vkq * g_qp;
                    v[k * n + q] = vkp * g_pq + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues = order.iter().map(|&k| a[k * n + k].re).collect();
    let mut eigenvectors = vec![Amplitude::new(0.0, 0.0); n * n];
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[i * n + col] = v[i * n + k];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
