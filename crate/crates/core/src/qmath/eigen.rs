//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair with a complex Givens rotation;
//! for the d <= 4 matrices used here convergence takes a handful of sweeps.

use num_complex::Complex;

use crate::qmath::ComplexMatrix;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and the unitary whose columns are eigenvectors.
pub(crate) fn hermitian_eigen<T: Scalar>(matrix: &ComplexMatrix<T>) -> (Vec<T>, ComplexMatrix<T>) {
    let d = matrix.dim();
    let mut a = matrix.clone();
    let mut v = ComplexMatrix::identity(d);

    let scale = a.max_abs().max(T::one());
    let stop = T::epsilon() * scale * T::from_usize_lossy(d * d);

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .expect("eigenvalues are finite")
    });

    let values: Vec<T> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..d {
            vectors.set(row, new_col, v.get(row, old_col));
        }
    }
    (values, vectors)
}

/// Applies the unitary that zeroes the (p, q) entry: A <- U^H A U, V <- V U.
fn rotate<T: Scalar>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let phase = apq / Complex::new(r, T::zero());
    let alpha = a.get(p, p).re;
    let beta = a.get(q, q).re;

    // t = s/c solves t^2 + 2*tau*t - 1 = 0; pick the smaller-magnitude root.
    let tau = (beta - alpha) / (r + r);
    let sign = if tau >= T::zero() {
        T::one()
    } else {
        -T::one()
    };
    let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    let d = a.dim();
    let cs = Complex::new(c, T::zero());
    let s_phase = phase * s; // s * e^{i phi}
    let s_phase_conj = s_phase.conj();

    // Column update: M <- M U with U[p][p]=c, U[p][q]=s e^{i phi},
    // U[q][p]=-s e^{-i phi}, U[q][q]=c.
    for i in 0..d {
        let mip = a.get(i, p);
        let miq = a.get(i, q);
        a.set(i, p, mip * cs - miq * s_phase_conj);
        a.set(i, q, mip * s_phase + miq * cs);

        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * cs - viq * s_phase_conj);
        v.set(i, q, vip * s_phase + viq * cs);
    }
    // Row update: M <- U^H M.
    for j in 0..d {
        let mpj = a.get(p, j);
        let mqj = a.get(q, j);
        a.set(p, j, mpj * cs - mqj * s_phase);
        a.set(q, j, mpj * s_phase_conj + mqj * cs);
    }

    // The rotation zeroes (p, q) analytically; pin it, and write the rotated
    // diagonal through its closed form (alpha - t*r, beta + t*r), which avoids
    // the c^2 + s^2 rounding of the generic update.
    a.set(p, q, Complex::new(T::zero(), T::zero()));
    a.set(q, p, Complex::new(T::zero(), T::zero()));
    a.set(p, p, Complex::new(alpha - t * r, T::zero()));
    a.set(q, q, Complex::new(beta + t * r, T::zero()));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(values: &[f64], vectors: &ComplexMatrix<f64>) -> ComplexMatrix<f64> {
        let d = vectors.dim();
        let mut out = ComplexMatrix::zeros(d);
        for (col, &lambda) in values.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    let term = vectors.get(i, col) * vectors.get(j, col).conj() * lambda;
                    out.set(i, j, out.get(i, j) + term);
                }
            }
        }
        out
    }

    fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                if i == j {
                    m.set(i, i, Complex::new(rng.gen_range(-2.0..2.0), 0.0));
                } else {
                    let z = Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                    m.set(i, j, z);
                    m.set(j, i, z.conj());
                }
            }
        }
        m
    }

    #[test]
    fn reconstructs_random_hermitian_matrices() {
        for seed in 0..200 {
            for dim in [2, 3, 4] {
                let m = random_hermitian(dim, seed * 10 + dim as u64);
                let (values, vectors) = hermitian_eigen(&m);
                let back = reconstruct(&values, &vectors);
                let err = m.max_abs_diff(&back);
                assert!(err <= 1e-12, "dim {dim} seed {seed}: error {err:e}");
                for w in values.windows(2) {
                    assert!(w[0] <= w[1]);
                }
            }
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let m = random_hermitian(4, 99);
        let (_, v) = hermitian_eigen(&m);
        let gram = v.adjoint().mul(&v);
        let eye = ComplexMatrix::identity(4);
        assert!(gram.max_abs_diff(&eye) <= 1e-12);
    }
}
