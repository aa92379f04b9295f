use serde::{Deserialize, Serialize};

use super::{CMatrix, HermitianOperator, SystemShape};
use crate::error::{Error, Result};

/// Choi representative `C = sum_ij |i><j| (x) L(|i><j|)` of a linear map
/// `L: in -> out`, built from the unnormalized maximally entangled vector
/// `sum_i |i>|i>`. The input factors come first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChoi", into = "RawChoi")]
pub struct ChoiOperator {
    in_shape: SystemShape,
    out_shape: SystemShape,
    op: HermitianOperator,
}

#[derive(Serialize, Deserialize)]
struct RawChoi {
    in_dims: SystemShape,
    out_dims: SystemShape,
    op: HermitianOperator,
}

impl TryFrom<RawChoi> for ChoiOperator {
    type Error = Error;

    fn try_from(raw: RawChoi) -> Result<Self> {
        ChoiOperator::new(raw.in_dims, raw.out_dims, raw.op)
    }
}

impl From<ChoiOperator> for RawChoi {
    fn from(c: ChoiOperator) -> Self {
        RawChoi {
            in_dims: c.in_shape,
            out_dims: c.out_shape,
            op: c.op,
        }
    }
}

fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(n, n);
    e[(i, j)] = super::c(1.0, 0.0);
    e
}

impl ChoiOperator {
    pub fn new(in_shape: SystemShape, out_shape: SystemShape, op: HermitianOperator) -> Result<Self> {
        let joint = in_shape.concat(&out_shape);
        if op.shape().total() != joint.total() {
            return Err(Error::ShapeMismatch {
                expected: joint.to_string(),
                found: op.shape().to_string(),
            });
        }
        let op = op.reshaped(joint)?;
        Ok(Self { in_shape, out_shape, op })
    }

    /// Builds the Choi operator of `f` by evaluating it on every matrix unit.
    /// `f` must be Hermiticity-preserving.
    pub fn from_map(
        in_shape: SystemShape,
        out_shape: SystemShape,
        f: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Self> {
        let (din, dout) = (in_shape.total(), out_shape.total());
        let mut m = CMatrix::zeros(din * dout, din * dout);
        for i in 0..din {
            for j in 0..din {
                let block = f(&unit(din, i, j));
                if block.nrows() != dout || block.ncols() != dout {
                    return Err(Error::ShapeMismatch {
                        expected: format!("{dout}x{dout}"),
                        found: format!("{}x{}", block.nrows(), block.ncols()),
                    });
                }
                m.view_mut((i * dout, j * dout), (dout, dout)).copy_from(&block);
            }
        }
        let joint = in_shape.concat(&out_shape);
        let op = HermitianOperator::from_product(joint, m)?;
        Ok(Self { in_shape, out_shape, op })
    }

    /// Choi operator of the identity channel: `|chi+><chi+|`.
    pub fn identity_channel(shape: SystemShape) -> Self {
        Self::from_map(shape.clone(), shape, |e| e.clone()).expect("identity is Hermiticity-preserving")
    }

    /// Choi operator of the transpose map, which is the swap operator.
    pub fn transpose_map(shape: SystemShape) -> Self {
        Self::from_map(shape.clone(), shape, |e| e.transpose()).expect("transpose is Hermiticity-preserving")
    }

    pub fn in_shape(&self) -> &SystemShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &SystemShape {
        &self.out_shape
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    /// The Choi operator viewed as a bipartite operator `in | out`, the cut on
    /// which block-positivity is equivalent to positivity of the map.
    pub fn bipartite_view(&self) -> HermitianOperator {
        let shape = SystemShape::new(vec![self.in_shape.total(), self.out_shape.total()])
            .expect("dimensions >= 2");
        self.op.reshaped(shape).expect("same total")
    }

    /// `L(X) = Tr_in[(X^T (x) 1) C]` on a raw matrix.
    pub(crate) fn apply_raw(&self, x: &CMatrix) -> CMatrix {
        let (din, dout) = (self.in_shape.total(), self.out_shape.total());
        let c = self.op.matrix();
        let mut out = CMatrix::zeros(dout, dout);
        for i in 0..din {
            for j in 0..din {
                let w = x[(i, j)];
                if w.norm() == 0.0 {
                    continue;
                }
                out += c.view((i * dout, j * dout), (dout, dout)) * w;
            }
        }
        out
    }

    pub fn apply(&self, input: &HermitianOperator) -> Result<HermitianOperator> {
        if input.shape() != &self.in_shape {
            return Err(Error::ShapeMismatch {
                expected: self.in_shape.to_string(),
                found: input.shape().to_string(),
            });
        }
        HermitianOperator::from_product(self.out_shape.clone(), self.apply_raw(input.matrix()))
    }

    /// `(I_head (x) L)(X)` for `X` on `head (x) in`.
    pub fn apply_on_tail(&self, head: &SystemShape, x: &HermitianOperator) -> Result<HermitianOperator> {
        let expected = head.concat(&self.in_shape);
        if x.shape().total() != expected.total() {
            return Err(Error::ShapeMismatch {
                expected: expected.to_string(),
                found: x.shape().to_string(),
            });
        }
        let (dh, din, dout) = (head.total(), self.in_shape.total(), self.out_shape.total());
        let mut out = CMatrix::zeros(dh * dout, dh * dout);
        for a in 0..dh {
            for b in 0..dh {
                let block = x.matrix().view((a * din, b * din), (din, din)).into_owned();
                out.view_mut((a * dout, b * dout), (dout, dout))
                    .copy_from(&self.apply_raw(&block));
            }
        }
        HermitianOperator::from_product(head.concat(&self.out_shape), out)
    }

    /// Choi operator of the adjoint map `L*`, defined by
    /// `Tr[L(X) Y] = Tr[X L*(Y)]`.
    pub fn adjoint(&self) -> Self {
        let (din, dout) = (self.in_shape.total(), self.out_shape.total());
        let c = self.op.matrix();
        let n = din * dout;
        let mut m = CMatrix::zeros(n, n);
        // C*[(k,a),(l,b)] = C[(b,l),(a,k)]
        for k in 0..dout {
            for a in 0..din {
                for l in 0..dout {
                    for b in 0..din {
                        m[(k * din + a, l * din + b)] = c[(b * dout + l, a * dout + k)];
                    }
                }
            }
        }
        let joint = self.out_shape.concat(&self.in_shape);
        Self {
            in_shape: self.out_shape.clone(),
            out_shape: self.in_shape.clone(),
            op: HermitianOperator::from_product(joint, m).expect("adjoint of Hermitian Choi is Hermitian"),
        }
    }

    /// Choi operator of `then . self`.
    pub fn compose(&self, then: &ChoiOperator) -> Result<Self> {
        if then.in_shape.total() != self.out_shape.total() {
            return Err(Error::ShapeMismatch {
                expected: self.out_shape.to_string(),
                found: then.in_shape.to_string(),
            });
        }
        Self::from_map(self.in_shape.clone(), then.out_shape.clone(), |e| {
            then.apply_raw(&self.apply_raw(e))
        })
    }

    /// Scalar multiple of the map.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            in_shape: self.in_shape.clone(),
            out_shape: self.out_shape.clone(),
            op: self.op.scale(factor),
        }
    }
}
