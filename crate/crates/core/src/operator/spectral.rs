use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{c, hermitian_residual, CMatrix, CVector, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Real eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in the order of `values`.
    pub vectors: CMatrix,
}

impl Spectrum {
    /// `V f(Λ) V^dag`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &l) in self.values.iter().enumerate() {
            let s = f(l);
            scaled.column_mut(k).scale_mut(s);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_values(|l| l)
    }
}

pub(crate) fn eig_sorted(m: &CMatrix) -> Spectrum {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Spectrum { values, vectors }
}

/// Eigendecomposition of a raw matrix, rejecting non-Hermitian input.
pub fn eig_hermitian_matrix(m: &CMatrix) -> Result<Spectrum> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::ShapeMismatch {
            expected: "non-empty square matrix".into(),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let residual = hermitian_residual(m);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(eig_sorted(&(m + m.adjoint()).scale(0.5)))
}

/// Smallest eigenvalue and a unit eigenvector of a Hermitian matrix.
/// Closed form for 2x2, general solver otherwise.
pub fn min_eigenpair(m: &CMatrix) -> (f64, CVector) {
    if m.nrows() == 2 {
        return min_eigenpair_2x2(m);
    }
    let spec = eig_sorted(m);
    let k = m.nrows() - 1;
    (spec.values[k], spec.vectors.column(k).into_owned())
}

fn min_eigenpair_2x2(m: &CMatrix) -> (f64, CVector) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b: Complex64 = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let half_gap = ((a - d) * 0.5).hypot(b.norm());
    let lambda = (a + d) * 0.5 - half_gap;
    // Two candidate null vectors of (M - lambda); take the better conditioned one.
    let u = CVector::from_vec(vec![b, c(lambda - a, 0.0)]);
    let v = CVector::from_vec(vec![c(lambda - d, 0.0), b.conj()]);
    let (nu, nv) = (u.norm(), v.norm());
    let vec = if nu.max(nv) < 1e-300 {
        // Multiple of identity.
        CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])
    } else if nu >= nv {
        u.unscale(nu)
    } else {
        v.unscale(nv)
    };
    (lambda, vec)
}
