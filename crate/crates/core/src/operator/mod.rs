//! Dense Hermitian operators on multipartite systems.
//!
//! Basis ordering is row-major lexicographic: the first factor is the most
//! significant digit, so for two qubits the basis runs `|00>, |01>, |10>, |11>`.

mod choi;
mod json;
mod spectral;

pub use choi::ChoiOperator;
pub use json::OperatorJson;
pub use spectral::{eig_hermitian_matrix, min_eigenpair, Spectrum};

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Entrywise tolerance for Hermiticity and unitarity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalue cutoff for PSD clamping and support detection.
pub const PSD_TOL: f64 = 1e-10;

/// Largest total dimension accepted by [`SystemShape::new`]; everything is
/// stored densely.
pub const MAX_TOTAL_DIM: usize = 1 << 12;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Local dimensions of a multipartite system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SystemShape {
    dims: Vec<usize>,
}

impl SystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("no factors".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidShape(format!("local dimension {d} < 2")));
        }
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        if !total.is_some_and(|t| t <= MAX_TOTAL_DIM) {
            return Err(Error::InvalidShape(format!(
                "total dimension of {dims:?} exceeds {MAX_TOTAL_DIM}"
            )));
        }
        Ok(Self { dims })
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("at least one qubit")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &SystemShape) -> SystemShape {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SystemShape { dims }
    }

    /// Sub-shape on the given (strictly increasing) factor indices.
    pub fn select(&self, indices: &[usize]) -> Result<SystemShape> {
        SystemShape::new(indices.iter().map(|&i| self.dims[i]).collect())
    }

    /// Validates a subsystem index set; returns it sorted and deduplicated.
    pub fn check_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        let mut out = subset.to_vec();
        out.sort_unstable();
        out.dedup();
        if let Some(&bad) = out.iter().find(|&&i| i >= self.factors()) {
            return Err(Error::InvalidSubsystem {
                index: bad,
                factors: self.factors(),
            });
        }
        Ok(out)
    }

    /// Digit expansion of every basis index.
    pub(crate) fn digit_table(&self) -> Vec<Vec<usize>> {
        (0..self.total())
            .map(|mut idx| {
                let mut digits = vec![0; self.dims.len()];
                for (k, &d) in self.dims.iter().enumerate().rev() {
                    digits[k] = idx % d;
                    idx /= d;
                }
                digits
            })
            .collect()
    }

    pub(crate) fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&digit, &d)| acc * d + digit)
    }
}

impl TryFrom<Vec<usize>> for SystemShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        SystemShape::new(dims)
    }
}

impl From<SystemShape> for Vec<usize> {
    fn from(shape: SystemShape) -> Self {
        shape.dims
    }
}

impl fmt::Display for SystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join("x"))
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// A Hermitian operator tagged with the system shape it acts on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct HermitianOperator {
    shape: SystemShape,
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Wraps `matrix`, symmetrizing it when the Hermiticity residual is below
    /// [`HERMITIAN_TOL`] and rejecting it otherwise.
    pub fn new(shape: SystemShape, matrix: CMatrix) -> Result<Self> {
        let n = shape.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n} for {shape}"),
                found: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        let residual = hermitian_residual(&matrix);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self { shape, matrix })
    }

    /// Like [`HermitianOperator::new`] but accepts a looser residual, scaled to
    /// the operator norm. Used for products accumulated through pipelines.
    pub(crate) fn from_product(shape: SystemShape, matrix: CMatrix) -> Result<Self> {
        let scale = max_abs(&matrix).max(1.0);
        let residual = hermitian_residual(&matrix);
        if residual > HERMITIAN_TOL * scale * 64.0 {
            return Err(Error::NotHermitian { residual });
        }
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self { shape, matrix })
    }

    pub fn identity(shape: SystemShape) -> Self {
        let n = shape.total();
        Self {
            shape,
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(shape: SystemShape) -> Self {
        let n = shape.total();
        Self {
            shape,
            matrix: CMatrix::zeros(n, n),
        }
    }

    /// Real diagonal operator.
    pub fn diagonal(shape: SystemShape, diag: &[f64]) -> Result<Self> {
        if diag.len() != shape.total() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} diagonal entries", shape.total()),
                found: diag.len().to_string(),
            });
        }
        let d = CVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x, 0.0)));
        Ok(Self {
            shape,
            matrix: CMatrix::from_diagonal(&d),
        })
    }

    /// `|v><v|` (no normalization applied).
    pub fn outer(shape: SystemShape, v: &CVector) -> Result<Self> {
        if v.len() != shape.total() {
            return Err(Error::ShapeMismatch {
                expected: shape.total().to_string(),
                found: v.len().to_string(),
            });
        }
        let matrix = v * v.adjoint();
        Ok(Self { shape, matrix })
    }

    /// Projector onto the normalized vector `v`.
    pub fn pure(shape: SystemShape, v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Malformed("zero state vector".into()));
        }
        Self::outer(shape, &v.unscale(norm))
    }

    /// Computational basis projector `|i><i|` on `shape`.
    pub fn basis_projector(shape: SystemShape, index: usize) -> Self {
        let mut diag = vec![0.0; shape.total()];
        diag[index] = 1.0;
        Self::diagonal(shape, &diag).expect("sized by shape")
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(self * other)` for Hermitian operands, which is real.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        let (a, b) = (&self.matrix, &other.matrix);
        let n = a.nrows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (a[(i, j)] * b[(j, i)]).re;
            }
        }
        acc
    }

    /// `<v|self|v>`.
    pub fn expectation(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.matrix * v)[(0, 0)].re
    }

    /// Same entries, new factorization of the same total dimension.
    pub fn reshaped(&self, shape: SystemShape) -> Result<Self> {
        if shape.total() != self.shape.total() {
            return Err(Error::ShapeMismatch {
                expected: self.shape.to_string(),
                found: shape.to_string(),
            });
        }
        Ok(Self {
            shape,
            matrix: self.matrix.clone(),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            matrix: self.matrix.scale(factor),
        }
    }

    fn check_same_shape(&self, other: &HermitianOperator) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.to_string(),
                found: other.shape.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            shape: self.shape.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            shape: self.shape.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Kronecker product; the shape is the concatenation of both shapes.
    pub fn tensor(&self, other: &HermitianOperator) -> Self {
        Self {
            shape: self.shape.concat(&other.shape),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Tensor product of a non-empty list of factors.
    pub fn tensor_all(factors: &[HermitianOperator]) -> Result<Self> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::InvalidShape("empty tensor product".into()))?;
        Ok(rest.iter().fold(first.clone(), |acc, f| acc.tensor(f)))
    }

    /// Traces out every factor not listed in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.shape.check_subset(keep)?;
        if keep.is_empty() {
            return Err(Error::InvalidShape("partial trace must keep a factor".into()));
        }
        let out_shape = self.shape.select(&keep)?;
        let traced: Vec<usize> = (0..self.shape.factors())
            .filter(|k| !keep.contains(k))
            .collect();
        let digits = self.shape.digit_table();
        let project = |d: &[usize], idx: &[usize]| -> Vec<usize> { idx.iter().map(|&k| d[k]).collect() };
        let kept_index: Vec<usize> = digits
            .iter()
            .map(|d| out_shape.index_of(&project(d, &keep)))
            .collect();
        let traced_key: Vec<Vec<usize>> = digits.iter().map(|d| project(d, &traced)).collect();
        let n = self.dim();
        let mut out = CMatrix::zeros(out_shape.total(), out_shape.total());
        for i in 0..n {
            for j in 0..n {
                if traced_key[i] == traced_key[j] {
                    out[(kept_index[i], kept_index[j])] += self.matrix[(i, j)];
                }
            }
        }
        HermitianOperator::from_product(out_shape, out)
    }

    /// Transposes the listed factors in the computational basis.
    pub fn partial_transpose(&self, subset: &[usize]) -> Result<Self> {
        let subset = self.shape.check_subset(subset)?;
        let digits = self.shape.digit_table();
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut di = digits[i].clone();
                let mut dj = digits[j].clone();
                for &k in &subset {
                    std::mem::swap(&mut di[k], &mut dj[k]);
                }
                out[(i, j)] = self.matrix[(self.shape.index_of(&di), self.shape.index_of(&dj))];
            }
        }
        Ok(Self {
            shape: self.shape.clone(),
            matrix: out,
        })
    }

    /// Reorders the tensor factors: factor `k` of the result is factor
    /// `order[k]` of `self`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        let k = self.shape.factors();
        let mut seen = vec![false; k];
        for &f in order {
            if f >= k || std::mem::replace(&mut seen[f], true) {
                return Err(Error::InvalidSubsystem { index: f, factors: k });
            }
        }
        if order.len() != k {
            return Err(Error::InvalidShape(format!("permutation of {} entries for {k} factors", order.len())));
        }
        let shape = SystemShape {
            dims: order.iter().map(|&f| self.shape.dims[f]).collect(),
        };
        // Old index of each new basis index.
        let source: Vec<usize> = shape
            .digit_table()
            .into_iter()
            .map(|new| {
                let mut old = vec![0; k];
                for (pos, &f) in order.iter().enumerate() {
                    old[f] = new[pos];
                }
                self.shape.index_of(&old)
            })
            .collect();
        let n = self.dim();
        let matrix = CMatrix::from_fn(n, n, |i, j| self.matrix[(source[i], source[j])]);
        Ok(Self { shape, matrix })
    }

    /// Eigenvalues in descending order with orthonormal eigenvectors as columns.
    pub fn eig(&self) -> Spectrum {
        spectral::eig_sorted(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eig().values.last().expect("non-empty operator")
    }

    /// Returns `(sqrt(m), pinv(sqrt(m)))`, clamping eigenvalues in
    /// `[-PSD_TOL, 0)` to zero.
    pub fn psd_sqrt_pinv(&self) -> Result<(Self, Self)> {
        let spec = self.eig();
        let min = *spec.values.last().expect("non-empty operator");
        if min < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let sqrt = spec.map_values(|l| if l > 0.0 { l.sqrt() } else { 0.0 });
        let pinv = spec.map_values(|l| if l > PSD_TOL { 1.0 / l.sqrt() } else { 0.0 });
        Ok((
            HermitianOperator::from_product(self.shape.clone(), sqrt)?,
            HermitianOperator::from_product(self.shape.clone(), pinv)?,
        ))
    }

    /// Projector onto the span of eigenvectors with eigenvalue above `tol`.
    pub fn support_projector(&self, tol: f64) -> Result<Self> {
        let spec = self.eig();
        let min = *spec.values.last().expect("non-empty operator");
        if min < -tol {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let proj = spec.map_values(|l| if l > tol { 1.0 } else { 0.0 });
        HermitianOperator::from_product(self.shape.clone(), proj)
    }

    /// `U self U^dag`.
    pub fn conjugated(&self, u: &UnitaryOperator) -> Result<Self> {
        if u.shape != self.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.to_string(),
                found: u.shape.to_string(),
            });
        }
        let m = &u.matrix * &self.matrix * u.matrix.adjoint();
        HermitianOperator::from_product(self.shape.clone(), m)
    }

    /// `A^dag self A` for an arbitrary square matrix `A` of matching size.
    pub(crate) fn sandwich(&self, a: &CMatrix) -> Result<Self> {
        let m = a.adjoint() * &self.matrix * a;
        HermitianOperator::from_product(self.shape.clone(), m)
    }

    pub fn frobenius_distance(&self, other: &HermitianOperator) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok((&self.matrix - &other.matrix).norm())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    /// `self^2 = self` within `tol`, entrywise.
    pub fn is_projector(&self, tol: f64) -> bool {
        max_abs(&(&self.matrix * &self.matrix - &self.matrix)) <= tol
    }
}

/// A unitary matrix tagged with its system shape.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    shape: SystemShape,
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(shape: SystemShape, matrix: CMatrix) -> Result<Self> {
        let n = shape.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        let residual = max_abs(&(matrix.adjoint() * &matrix - CMatrix::identity(n, n)));
        if residual > HERMITIAN_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { shape, matrix })
    }

    pub fn identity(shape: SystemShape) -> Self {
        let n = shape.total();
        Self {
            shape,
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn tensor(&self, other: &UnitaryOperator) -> Self {
        Self {
            shape: self.shape.concat(&other.shape),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `U |v>`.
    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }
}

/// Tensor product of local vectors.
pub fn product_vector(factors: &[CVector]) -> CVector {
    let mut out = CVector::from_element(1, c(1.0, 0.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

#[cfg(test)]
mod tests;
