//! Explicit states, unitaries and measurements.
//!
//! Two families are built here. The eight two-qubit states are the Bell
//! projectors together with their partial transposes on the second qubit;
//! they are told apart pairwise by parity measurements rotated with local
//! unitaries. The twenty-four three-qubit states are the GHZ-type projectors
//! with transposes on the second (and third) qubit; they are told apart by
//! parity measurements along local Pauli axes.

mod ghz;
mod measurement;

pub use ghz::{
    ghz_state, parity_codewords, parity_measurement_3q, printed_table2, s24, table2_cross_check,
    table2_measurement, table2_row_measurement, two_site_z_rows, GhzIndex, PauliAxis, PrintedRow, Sign, StateLabel24,
    Table2Column, Table2Divergence, TABLE2_ROWS,
};
pub use measurement::{Measurement, MEASUREMENT_TOL};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cones::{SeparableDecomposition, SeparableTerm};
use crate::error::{Error, Result};
use crate::operator::{c, CMatrix, CVector, HermitianOperator, SystemShape, UnitaryOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    fn index(self) -> usize {
        self as usize
    }

    pub fn ket(self) -> CVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = match self {
            Bell::PhiPlus => [h, 0.0, 0.0, h],
            Bell::PhiMinus => [h, 0.0, 0.0, -h],
            Bell::PsiPlus => [0.0, h, h, 0.0],
            Bell::PsiMinus => [0.0, h, -h, 0.0],
        };
        CVector::from_iterator(4, v.iter().map(|&x| c(x, 0.0)))
    }

    fn name(self) -> &'static str {
        match self {
            Bell::PhiPlus => "Phi+",
            Bell::PhiMinus => "Phi-",
            Bell::PsiPlus => "Psi+",
            Bell::PsiMinus => "Psi-",
        }
    }
}

pub fn bell_state(bell: Bell) -> HermitianOperator {
    HermitianOperator::outer(SystemShape::qubits(2), &bell.ket()).expect("4-dimensional ket")
}

/// Label of a member of the eight-state two-qubit family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateLabel8 {
    pub bell: Bell,
    pub barred: bool,
}

impl StateLabel8 {
    /// Fixed order: the four Bell states, then their partial transposes.
    pub fn all() -> Vec<StateLabel8> {
        [false, true]
            .iter()
            .flat_map(|&barred| Bell::ALL.iter().map(move |&bell| StateLabel8 { bell, barred }))
            .collect()
    }

    pub fn state(self) -> HermitianOperator {
        let s = bell_state(self.bell);
        if self.barred {
            s.partial_transpose(&[1]).expect("two-qubit operator")
        } else {
            s
        }
    }
}

impl fmt::Display for StateLabel8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.bell.name(), if self.barred { "-bar" } else { "" })
    }
}

impl FromStr for StateLabel8 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateLabel8::all()
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown two-qubit label {s:?}")))
    }
}

/// The eight-state family in [`StateLabel8::all`] order.
pub fn s8() -> Vec<(StateLabel8, HermitianOperator)> {
    StateLabel8::all().into_iter().map(|l| (l, l.state())).collect()
}

/// Local rotations used to build the two-qubit parity measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    Identity,
    /// `(1/sqrt2) [[1, -i], [-i, 1]]`
    Ax,
    /// `(1/sqrt2) [[1, -1], [1, 1]]`
    Ay,
}

impl Rotation {
    pub fn unitary(self) -> UnitaryOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = match self {
            Rotation::Identity => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            Rotation::Ax => [c(h, 0.0), c(0.0, -h), c(0.0, -h), c(h, 0.0)],
            Rotation::Ay => [c(h, 0.0), c(-h, 0.0), c(h, 0.0), c(h, 0.0)],
        };
        UnitaryOperator::new(SystemShape::qubits(1), CMatrix::from_row_slice(2, 2, &m))
            .expect("printed rotations are unitary")
    }

    fn symbol(self) -> &'static str {
        match self {
            Rotation::Identity => "1",
            Rotation::Ax => "Ax",
            Rotation::Ay => "Ay",
        }
    }
}

/// `{1, Ax, Ay}`.
pub fn rotation_unitaries() -> [UnitaryOperator; 3] {
    [
        Rotation::Identity.unitary(),
        Rotation::Ax.unitary(),
        Rotation::Ay.unitary(),
    ]
}

fn qubit_projector(v: &CVector) -> HermitianOperator {
    HermitianOperator::pure(SystemShape::qubits(1), v).expect("qubit vector")
}

fn basis_ket(i: usize) -> CVector {
    let mut v = CVector::zeros(2);
    v[i] = c(1.0, 0.0);
    v
}

fn product_certificate(terms: &[[&CVector; 2]]) -> SeparableDecomposition {
    SeparableDecomposition::new(
        terms
            .iter()
            .map(|t| SeparableTerm {
                weight: 1.0,
                factors: t.iter().map(|v| qubit_projector(v)).collect(),
            })
            .collect(),
    )
}

/// `{E_even, E_odd}` with `E_even = |00><00| + |11><11|`.
pub fn parity_measurement_2q() -> Measurement {
    let shape = SystemShape::qubits(2);
    let even = HermitianOperator::diagonal(shape.clone(), &[1.0, 0.0, 0.0, 1.0]).expect("4 entries");
    let odd = HermitianOperator::diagonal(shape, &[0.0, 1.0, 1.0, 0.0]).expect("4 entries");
    let (k0, k1) = (basis_ket(0), basis_ket(1));
    let certs = vec![
        product_certificate(&[[&k0, &k0], [&k1, &k1]]),
        product_certificate(&[[&k0, &k1], [&k1, &k0]]),
    ];
    Measurement::new("M[1(x)1]", vec![even, odd])
        .and_then(|m| m.with_certificates(certs))
        .expect("parity effects are complete")
}

/// Parity measurement conjugated by `U (x) V`.
pub fn rotated_measurement(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<Measurement> {
    let qubit = SystemShape::qubits(1);
    if u.shape() != &qubit || v.shape() != &qubit {
        return Err(Error::ShapeMismatch {
            expected: qubit.to_string(),
            found: format!("{} and {}", u.shape(), v.shape()),
        });
    }
    parity_measurement_2q().locally_rotated("M[U(x)V]", &[u.clone(), v.clone()])
}

fn rotated_by(pair: (Rotation, Rotation)) -> Measurement {
    let label = format!("M[{}(x){}]", pair.0.symbol(), pair.1.symbol());
    parity_measurement_2q()
        .locally_rotated(label, &[pair.0.unitary(), pair.1.unitary()])
        .expect("qubit rotations")
}

use Rotation::{Ax, Ay, Identity as Id};

/// Pairs within one bar level, indexed by Bell family.
const TABLE1_SAME_LEVEL: [[Option<Rotation>; 4]; 4] = [
    [None, Some(Ay), Some(Id), Some(Id)],
    [Some(Ay), None, Some(Id), Some(Id)],
    [Some(Id), Some(Id), None, Some(Ay)],
    [Some(Id), Some(Id), Some(Ay), None],
];

/// Barred state (row) against unbarred state (column).
const TABLE1_CROSS_LEVEL: [[Rotation; 4]; 4] = [
    [Ax, Ay, Id, Id],
    [Ay, Ax, Id, Id],
    [Id, Id, Ax, Ay],
    [Id, Id, Ay, Ax],
];

/// Local rotation `U = V` that the lookup table assigns to a pair.
pub fn table1_entry(i: StateLabel8, j: StateLabel8) -> Result<(Rotation, Rotation)> {
    if i == j {
        return Err(Error::SameState);
    }
    let r = if i.barred == j.barred {
        TABLE1_SAME_LEVEL[i.bell.index()][j.bell.index()].ok_or(Error::SameState)?
    } else {
        let (barred, plain) = if i.barred { (i, j) } else { (j, i) };
        TABLE1_CROSS_LEVEL[barred.bell.index()][plain.bell.index()]
    };
    Ok((r, r))
}

/// Separable measurement the lookup table assigns to a pair of the
/// eight-state family.
pub fn table1_measurement(i: StateLabel8, j: StateLabel8) -> Result<Measurement> {
    Ok(rotated_by(table1_entry(i, j)?))
}

#[cfg(test)]
mod tests;
