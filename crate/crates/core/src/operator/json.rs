use serde::{Deserialize, Serialize};

use super::{c, CMatrix, HermitianOperator, SystemShape};
use crate::error::{Error, Result};

/// Wire form of an operator: `{"dims": [...], "re": [[...]], "im": [[...]]}`,
/// row-major, both parts mandatory.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<OperatorJson> for HermitianOperator {
    type Error = Error;

    fn try_from(raw: OperatorJson) -> Result<Self> {
        let shape = SystemShape::new(raw.dims)?;
        let n = shape.total();
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !square(&raw.re) || !square(&raw.im) {
            return Err(Error::Malformed(format!(
                "re/im must both be {n}x{n} for dims {shape}"
            )));
        }
        if raw.re.iter().chain(&raw.im).flatten().any(|x| !x.is_finite()) {
            return Err(Error::Malformed("non-finite entry".into()));
        }
        let m = CMatrix::from_fn(n, n, |i, j| c(raw.re[i][j], raw.im[i][j]));
        HermitianOperator::new(shape, m)
    }
}

impl From<HermitianOperator> for OperatorJson {
    fn from(op: HermitianOperator) -> Self {
        let n = op.dim();
        let m = op.matrix();
        OperatorJson {
            dims: op.shape().dims().to_vec(),
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}
