//! Dense complex linear algebra for small Hilbert spaces: Hermitian
//! observables with cached spectral decompositions, density matrices, and
//! Born-rule outcome distributions p_j = tr(rho Pi_j).

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::infodiv::{AlphabetId, ProbDist};
use crate::scalar::{scaled_tol, Scalar};

mod eigen;

/// Max |M - M^H| entry allowed when a matrix claims to be Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Default gap below which eigenvalues merge into one degenerate outcome.
pub const DEFAULT_GROUP_TOL: f64 = 1e-9;
/// Tolerance for projector idempotence, orthogonality and completeness.
pub const PROJECTOR_TOL: f64 = 1e-9;
/// Tolerance for reconstructing the observable from its spectrum.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Allowed deviation of a density-matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue a density matrix may have.
pub const PSD_TOL: f64 = 1e-9;
/// Input-ket norm deviation beyond which normalization is flagged.
pub const NORM_WARNING_TOL: f64 = 1e-6;

const BORN_NEGATIVE_TOL: f64 = 1e-9;

/// Square matrix of complex numbers, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    /// Builds a matrix from rows, validating shape and finiteness.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
        }
        let data: Vec<Complex<T>> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { dim, data })
    }

    /// Outer product |v><v| of a ket.
    pub fn outer(v: &[Complex<T>]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex<T>) {
        self.data[i * self.dim + j] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must match");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                for j in 0..d {
                    out.set(i, j, out.get(i, j) + aik * rhs.get(k, j));
                }
            }
        }
        out
    }

    /// Kronecker product, row-major convention: (A kron B)[(i,k),(j,l)] = A[i][j] B[k][l].
    pub fn kron(&self, rhs: &Self) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        let mut out = Self::zeros(da * db);
        for i in 0..da {
            for j in 0..da {
                let aij = self.get(i, j);
                for k in 0..db {
                    for l in 0..db {
                        out.set(i * db + k, j * db + l, aij * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            acc = acc + self.get(i, i);
        }
        acc
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "matrix dimensions must match");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Max |M[i][j] - conj(M[j][i])| over all entries.
    pub fn hermiticity_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let dev = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    fn add_scaled(&mut self, other: &Self, factor: T) {
        let f = Complex::new(factor, T::zero());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + f * b;
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = &self.data[i * self.dim + j];
                    format!("{:?}{:+?}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// One outcome of an observable: a distinct eigenvalue with its eigenspace projector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine<T> {
    pub eigenvalue: T,
    pub projector: ComplexMatrix<T>,
}

/// Labeled Hermitian operator with its spectral decomposition cached.
///
/// The outcome alphabet is the list of distinct eigenvalues in ascending
/// order; degenerate eigenvalues are merged into rank-k projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable<T> {
    label: String,
    matrix: ComplexMatrix<T>,
    spectrum: Vec<SpectralLine<T>>,
}

impl<T: Scalar> HermitianObservable<T> {
    /// Decomposes `matrix` with the default eigenvalue grouping tolerance.
    pub fn new(label: impl Into<String>, matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::with_group_tol(label, matrix, DEFAULT_GROUP_TOL)
    }

    /// Decomposes `matrix`, merging eigenvalues closer than `group_tol`.
    pub fn with_group_tol(
        label: impl Into<String>,
        matrix: ComplexMatrix<T>,
        group_tol: f64,
    ) -> Result<Self> {
        let spectrum = spectral_decomposition(&matrix, group_tol)?;
        let obs = Self {
            label: label.into(),
            matrix,
            spectrum,
        };
        obs.check_invariants()?;
        Ok(obs)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Distinct eigenvalues in ascending order.
    pub fn alphabet(&self) -> Vec<T> {
        self.spectrum.iter().map(|line| line.eigenvalue).collect()
    }

    pub fn alphabet_id(&self) -> AlphabetId {
        let parts: Vec<String> = self
            .spectrum
            .iter()
            .map(|line| format!("{}", line.eigenvalue))
            .collect();
        AlphabetId::new(format!("({})", parts.join(",")))
    }

    pub fn num_outcomes(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectrum(&self) -> &[SpectralLine<T>] {
        &self.spectrum
    }

    /// Verifies the spectral invariants: Hermitian projectors that are
    /// idempotent, mutually orthogonal, complete, with strictly increasing
    /// eigenvalues and an accurate reconstruction of the operator.
    pub fn check_invariants(&self) -> Result<()> {
        let d = self.dim();
        let proj_tol = scaled_tol::<T>(PROJECTOR_TOL);
        let violation = |property: &'static str, deviation: T, tolerance: f64| {
            Err(Error::SpectrumInvariant {
                property,
                deviation: deviation.to_f64().unwrap_or(f64::NAN),
                tolerance,
            })
        };

        for w in self.spectrum.windows(2) {
            if w[0].eigenvalue >= w[1].eigenvalue {
                return violation(
                    "strictly increasing eigenvalues",
                    w[1].eigenvalue - w[0].eigenvalue,
                    0.0,
                );
            }
        }

        let mut completeness = ComplexMatrix::zeros(d);
        let mut reconstruction = ComplexMatrix::zeros(d);
        for (i, line) in self.spectrum.iter().enumerate() {
            let p = &line.projector;
            let herm = p.hermiticity_deviation();
            if herm > proj_tol {
                return violation("projector Hermiticity", herm, PROJECTOR_TOL);
            }
            let idem = p.mul(p).max_abs_diff(p);
            if idem > proj_tol {
                return violation("projector idempotence", idem, PROJECTOR_TOL);
            }
            for other in &self.spectrum[i + 1..] {
                let cross = p.mul(&other.projector).max_abs();
                if cross > proj_tol {
                    return violation("projector orthogonality", cross, PROJECTOR_TOL);
                }
            }
            completeness.add_scaled(p, T::one());
            reconstruction.add_scaled(p, line.eigenvalue);
        }

        let eye = ComplexMatrix::identity(d);
        let complete_err = completeness.max_abs_diff(&eye);
        if complete_err > proj_tol {
            return violation("projector completeness", complete_err, PROJECTOR_TOL);
        }
        let recon_tol = scaled_tol::<T>(RECONSTRUCTION_TOL);
        let recon_err = reconstruction.max_abs_diff(&self.matrix);
        if recon_err > recon_tol {
            return violation("operator reconstruction", recon_err, RECONSTRUCTION_TOL);
        }
        Ok(())
    }
}

/// The three Pauli observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn name(self) -> &'static str {
        match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

impl std::str::FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::UnknownObservableLabel {
                label: other.to_string(),
                line: 0,
            }),
        }
    }
}

/// Returns the 2x2 Pauli observable with alphabet (-1, +1).
pub fn pauli<T: Scalar>(name: Pauli) -> HermitianObservable<T> {
    let zero = T::zero();
    let one = T::one();
    let c = Complex::new;
    let rows = match name {
        Pauli::X => vec![
            vec![c(zero, zero), c(one, zero)],
            vec![c(one, zero), c(zero, zero)],
        ],
        Pauli::Y => vec![
            vec![c(zero, zero), c(zero, -one)],
            vec![c(zero, one), c(zero, zero)],
        ],
        Pauli::Z => vec![
            vec![c(one, zero), c(zero, zero)],
            vec![c(zero, zero), c(-one, zero)],
        ],
    };
    let matrix = ComplexMatrix::from_rows(&rows).expect("Pauli matrices are well formed");
    HermitianObservable::new(name.name(), matrix).expect("Pauli matrices are Hermitian")
}

/// Kronecker product observable labeled "A⊗B", spectrum recomputed on the
/// product matrix so degenerate eigenvalues merge into rank-k projectors.
pub fn tensor<T: Scalar>(
    a: &HermitianObservable<T>,
    b: &HermitianObservable<T>,
) -> HermitianObservable<T> {
    let matrix = a.matrix().kron(b.matrix());
    let label = format!("{}⊗{}", a.label(), b.label());
    HermitianObservable::new(label, matrix)
        .expect("Kronecker product of Hermitian observables is Hermitian")
}

/// Parses an observable spec: a Pauli name ("X") or a tensor string ("X*Y").
pub fn observable_from_spec<T: Scalar>(spec: &str) -> Result<HermitianObservable<T>> {
    let mut factors = spec.split('*').map(str::trim);
    let first: Pauli = factors
        .next()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::UnknownObservableLabel {
            label: spec.to_string(),
            line: 0,
        })?
        .parse()?;
    let mut obs = pauli::<T>(first);
    for factor in factors {
        let p: Pauli = factor.parse()?;
        obs = tensor(&obs, &pauli::<T>(p));
    }
    Ok(obs)
}

/// Spectral decomposition with eigenvalue grouping.
///
/// Eigenvalues within `group_tol` of their predecessor merge into one
/// outcome; the projector of a merged group spans its whole eigenspace.
pub fn spectral_decomposition<T: Scalar>(
    matrix: &ComplexMatrix<T>,
    group_tol: f64,
) -> Result<Vec<SpectralLine<T>>> {
    if group_tol <= 0.0 {
        return Err(Error::InvalidGroupTolerance(group_tol));
    }
    let herm_tol = scaled_tol::<T>(HERMITICITY_TOL);
    let deviation = matrix.hermiticity_deviation();
    if deviation > herm_tol {
        return Err(Error::NotHermitian {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
            tolerance: HERMITICITY_TOL,
        });
    }

    let (values, vectors) = eigen::hermitian_eigen(matrix);
    let d = matrix.dim();
    let gap = scaled_tol::<T>(group_tol);

    let mut spectrum: Vec<SpectralLine<T>> = Vec::new();
    let mut group_start = 0;
    while group_start < d {
        let mut group_end = group_start + 1;
        while group_end < d && values[group_end] - values[group_end - 1] <= gap {
            group_end += 1;
        }
        let members = group_end - group_start;
        let mut eigenvalue = T::zero();
        let mut projector = ComplexMatrix::zeros(d);
        for (col, &value) in values.iter().enumerate().take(group_end).skip(group_start) {
            eigenvalue = eigenvalue + value;
            for i in 0..d {
                for j in 0..d {
                    let term = vectors.get(i, col) * vectors.get(j, col).conj();
                    projector.set(i, j, projector.get(i, j) + term);
                }
            }
        }
        eigenvalue = eigenvalue / T::from_usize_lossy(members);
        spectrum.push(SpectralLine {
            eigenvalue,
            projector,
        });
        group_start = group_end;
    }
    Ok(spectrum)
}

/// Density matrix on a d_H-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    rho: ComplexMatrix<T>,
}

/// Result of building a density matrix from a ket.
#[derive(Debug, Clone)]
pub struct PureDensity<T> {
    pub state: QuantumState<T>,
    /// Euclidean norm of the input amplitude vector.
    pub input_norm: T,
    /// Set when the input norm deviated from 1 by more than [`NORM_WARNING_TOL`].
    pub norm_warning: bool,
}

impl<T: Scalar> QuantumState<T> {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn from_density_matrix(rho: ComplexMatrix<T>) -> Result<Self> {
        let herm_tol = scaled_tol::<T>(HERMITICITY_TOL);
        let deviation = rho.hermiticity_deviation();
        if deviation > herm_tol {
            return Err(Error::NotHermitian {
                deviation: deviation.to_f64().unwrap_or(f64::NAN),
                tolerance: HERMITICITY_TOL,
            });
        }
        let trace = rho.trace();
        let trace_err = (trace - Complex::new(T::one(), T::zero())).norm();
        if trace_err > scaled_tol::<T>(TRACE_TOL) {
            return Err(Error::InvalidTrace {
                trace: trace.re.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (values, _) = eigen::hermitian_eigen(&rho);
        let psd_tol = scaled_tol::<T>(PSD_TOL);
        if let Some(lowest) = values.first() {
            if *lowest < -psd_tol {
                return Err(Error::NotPositiveSemidefinite {
                    eigenvalue: lowest.to_f64().unwrap_or(f64::NAN),
                    tolerance: PSD_TOL,
                });
            }
        }
        Ok(Self { rho })
    }

    /// The maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut rho = ComplexMatrix::zeros(dim);
        let p = T::one() / T::from_usize_lossy(dim);
        for i in 0..dim {
            rho.set(i, i, Complex::new(p, T::zero()));
        }
        Self { rho }
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn rho(&self) -> &ComplexMatrix<T> {
        &self.rho
    }
}

/// Builds the rank-1 density matrix |psi><psi| from a ket.
///
/// With `normalize` set the amplitudes are divided by their Euclidean norm
/// first; `norm_warning` reports when that norm was off by more than
/// [`NORM_WARNING_TOL`]. Without `normalize` the input must already be a
/// unit vector or the trace validation rejects it.
pub fn pure_to_density<T: Scalar>(
    amplitudes: &[Complex<T>],
    normalize: bool,
) -> Result<PureDensity<T>> {
    let norm_sq: T = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let norm = norm_sq.sqrt();
    if norm == T::zero() {
        return Err(Error::ZeroVector);
    }
    let mut ket: Vec<Complex<T>> = amplitudes.to_vec();
    let mut norm_warning = false;
    if normalize {
        let scale = Complex::new(T::one() / norm, T::zero());
        for z in &mut ket {
            *z = *z * scale;
        }
        norm_warning = (norm - T::one()).abs() > scaled_tol::<T>(NORM_WARNING_TOL);
    }
    let state = QuantumState::from_density_matrix(ComplexMatrix::outer(&ket))?;
    Ok(PureDensity {
        state,
        input_norm: norm,
        norm_warning,
    })
}

/// Born distribution over the observable's outcome alphabet: p_j = tr(rho Pi_j).
///
/// Probabilities are checked against a small negative tolerance, clamped to
/// [0, 1] and renormalized so they sum to 1 exactly.
pub fn born_distribution<T: Scalar>(
    state: &QuantumState<T>,
    obs: &HermitianObservable<T>,
) -> Result<ProbDist<T>> {
    if state.dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: obs.dim(),
        });
    }
    let neg_tol = scaled_tol::<T>(BORN_NEGATIVE_TOL);
    let mut probs = Vec::with_capacity(obs.num_outcomes());
    for (j, line) in obs.spectrum().iter().enumerate() {
        let p = state.rho().mul(&line.projector).trace().re;
        if p < -neg_tol {
            return Err(Error::NegativeProbability {
                index: j,
                value: p.to_f64().unwrap_or(f64::NAN),
            });
        }
        probs.push(p.max(T::zero()).min(T::one()));
    }
    let sum: T = probs.iter().copied().sum();
    for p in &mut probs {
        *p = *p / sum;
    }
    // One fix-up pass pins the float sum to exactly 1.
    for _ in 0..2 {
        let residual = T::one() - probs.iter().copied().sum();
        if residual == T::zero() {
            break;
        }
        let (argmax, _) =
            probs.iter().enumerate().fold(
                (0, T::zero()),
                |acc, (i, &p)| {
                    if p > acc.1 {
                        (i, p)
                    } else {
                        acc
                    }
                },
            );
        probs[argmax] = probs[argmax] + residual;
    }
    ProbDist::new(probs, obs.alphabet_id())
}
