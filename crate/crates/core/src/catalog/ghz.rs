use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::Measurement;
use crate::cones::{SeparableDecomposition, SeparableTerm};
use crate::error::{Error, Result};
use crate::operator::{c, CVector, HermitianOperator, SystemShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    /// +1 eigenvector of the Pauli operator along this axis ("up").
    pub fn up(self) -> CVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            PauliAxis::X => CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]),
            PauliAxis::Y => CVector::from_vec(vec![c(h, 0.0), c(0.0, h)]),
            PauliAxis::Z => CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
        }
    }

    /// -1 eigenvector ("down").
    pub fn down(self) -> CVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            PauliAxis::X => CVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]),
            PauliAxis::Y => CVector::from_vec(vec![c(h, 0.0), c(0.0, -h)]),
            PauliAxis::Z => CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]),
        }
    }

    /// Single-qubit projective measurement `{|up><up|, |down><down|}`.
    pub fn measurement(self) -> Measurement {
        let shape = SystemShape::qubits(1);
        let effects = vec![
            HermitianOperator::pure(shape.clone(), &self.up()).expect("qubit vector"),
            HermitianOperator::pure(shape, &self.down()).expect("qubit vector"),
        ];
        Measurement::new(format!("sigma_{}", self.symbol()), effects).expect("orthonormal basis")
    }

    fn symbol(self) -> char {
        match self {
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        }
    }
}

/// Parity rows, in lookup order.
pub const TABLE2_ROWS: [[PauliAxis; 3]; 7] = {
    use PauliAxis::{X, Y, Z};
    [
        [Y, Y, X],
        [Y, X, Y],
        [X, X, X],
        [X, Y, Y],
        [Y, Z, Z],
        [Z, Z, Y],
        [Z, Y, Z],
    ]
};

fn axes_label(axes: &[PauliAxis; 3]) -> String {
    format!("({},{},{})", axes[0].symbol(), axes[1].symbol(), axes[2].symbol())
}

/// `{E_odd, E_even}`: projectors onto an odd / even number of "up" outcomes
/// when measuring the three qubits along `m`, `n`, `p`.
pub fn parity_measurement_3q(m: PauliAxis, n: PauliAxis, p: PauliAxis) -> Measurement {
    let axes = [m, n, p];
    let kets: Vec<[CVector; 2]> = axes.iter().map(|a| [a.up(), a.down()]).collect();
    let shape1 = SystemShape::qubits(1);
    let mut odd_terms = Vec::new();
    let mut even_terms = Vec::new();
    for bits in 0..8usize {
        // bit k set: factor k is "down"
        let downs = bits.count_ones();
        let factors: Vec<HermitianOperator> = (0..3)
            .map(|k| {
                let down = (bits >> (2 - k)) & 1;
                HermitianOperator::pure(shape1.clone(), &kets[k][down]).expect("qubit vector")
            })
            .collect();
        let term = SeparableTerm { weight: 1.0, factors };
        if (3 - downs) % 2 == 1 {
            odd_terms.push(term);
        } else {
            even_terms.push(term);
        }
    }
    let odd = SeparableDecomposition::new(odd_terms);
    let even = SeparableDecomposition::new(even_terms);
    let effects = vec![
        odd.reconstruct().expect("four terms"),
        even.reconstruct().expect("four terms"),
    ];
    Measurement::new(format!("M{}", axes_label(&axes)), effects)
        .and_then(|meas| meas.with_certificates(vec![odd, even]))
        .expect("parity projectors are complete")
}

/// The rows of [`TABLE2_ROWS`] containing two z axes, with the remaining
/// x/y factor replaced by the identity: `{P_odd (x) 1, P_even (x) 1}` where
/// `P_odd` counts z-ups on the two z sites only.
pub fn two_site_z_rows() -> Vec<(usize, Measurement)> {
    let shape1 = SystemShape::qubits(1);
    let id = HermitianOperator::identity(shape1.clone());
    let z = [PauliAxis::Z.up(), PauliAxis::Z.down()];
    TABLE2_ROWS
        .iter()
        .enumerate()
        .filter(|(_, axes)| axes.iter().filter(|&&a| a == PauliAxis::Z).count() == 2)
        .map(|(r, axes)| {
            let mut odd_terms = Vec::new();
            let mut even_terms = Vec::new();
            for bits in 0..4usize {
                let mut zk = 0;
                let factors: Vec<HermitianOperator> = axes
                    .iter()
                    .map(|&a| {
                        if a != PauliAxis::Z {
                            return id.clone();
                        }
                        let down = (bits >> zk) & 1;
                        zk += 1;
                        HermitianOperator::pure(shape1.clone(), &z[down]).expect("qubit vector")
                    })
                    .collect();
                let term = SeparableTerm { weight: 1.0, factors };
                if bits.count_ones() == 1 {
                    odd_terms.push(term);
                } else {
                    even_terms.push(term);
                }
            }
            let odd = SeparableDecomposition::new(odd_terms);
            let even = SeparableDecomposition::new(even_terms);
            let effects = vec![
                odd.reconstruct().expect("two terms"),
                even.reconstruct().expect("two terms"),
            ];
            let label = format!("M{}/zz", axes_label(axes));
            let m = Measurement::new(label, effects)
                .and_then(|m| m.with_certificates(vec![odd, even]))
                .expect("coarse-grained parity is complete");
            (r, m)
        })
        .collect()
}

/// Which component of `|g> +- |~g>` the label refers to; `g` ranges over
/// 000, 001, 010, 011.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GhzIndex(u8);

impl GhzIndex {
    pub const ALL: [GhzIndex; 4] = [GhzIndex(0), GhzIndex(1), GhzIndex(2), GhzIndex(3)];

    pub fn new(bits: u8) -> Result<Self> {
        if bits < 4 {
            Ok(Self(bits))
        } else {
            Err(Error::Malformed(format!("GHZ index {bits:03b} out of range")))
        }
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Label of a member of the twenty-four-state three-qubit family.
/// `bar_level` 1 transposes qubit 2; level 2 transposes qubits 2 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateLabel24 {
    pub ghz: GhzIndex,
    pub sign: Sign,
    pub bar_level: u8,
}

impl StateLabel24 {
    /// Order: bar level, then GHZ index, then sign.
    pub fn all() -> Vec<StateLabel24> {
        let mut out = Vec::with_capacity(24);
        for bar_level in 0..3 {
            for ghz in GhzIndex::ALL {
                for sign in [Sign::Plus, Sign::Minus] {
                    out.push(StateLabel24 { ghz, sign, bar_level });
                }
            }
        }
        out
    }

    pub fn state(self) -> HermitianOperator {
        let base = ghz_state(self.ghz, self.sign);
        match self.bar_level {
            0 => base,
            1 => base.partial_transpose(&[1]).expect("three qubits"),
            _ => base.partial_transpose(&[1, 2]).expect("three qubits"),
        }
    }
}

impl fmt::Display for StateLabel24 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = match self.bar_level {
            0 => "",
            1 => "-bar",
            _ => "-dbar",
        };
        write!(f, "Phi{}_{:03b}{}", self.sign.symbol(), self.ghz.0, suffix)
    }
}

impl FromStr for StateLabel24 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateLabel24::all()
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown three-qubit label {s:?}")))
    }
}

/// `(|g> +- |g xor 111>) / sqrt2` as a projector.
pub fn ghz_state(ghz: GhzIndex, sign: Sign) -> HermitianOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = CVector::zeros(8);
    let g = ghz.0 as usize;
    v[g] = c(h, 0.0);
    v[g ^ 0b111] = c(if sign == Sign::Plus { h } else { -h }, 0.0);
    HermitianOperator::outer(SystemShape::qubits(3), &v).expect("8-dimensional ket")
}

struct Cache {
    states: Vec<(StateLabel24, HermitianOperator)>,
    rows: Vec<Measurement>,
    /// odd[row][state]: deterministic odd-parity outcome.
    odd: Vec<Vec<Option<bool>>>,
}

/// Outcome probabilities must sit this close to 0 or 1.
const COLUMN_TOL: f64 = 1e-9;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| {
        let states: Vec<_> = StateLabel24::all().into_iter().map(|l| (l, l.state())).collect();
        let rows: Vec<_> = TABLE2_ROWS
            .iter()
            .map(|a| parity_measurement_3q(a[0], a[1], a[2]))
            .collect();
        let odd = rows
            .iter()
            .map(|m| {
                states
                    .iter()
                    .map(|(_, w)| {
                        let p = w.trace_product(&m.effects()[0]);
                        if p.abs() <= COLUMN_TOL {
                            Some(false)
                        } else if (p - 1.0).abs() <= COLUMN_TOL {
                            Some(true)
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        Cache { states, rows, odd }
    })
}

fn state_index(label: StateLabel24) -> usize {
    StateLabel24::all()
        .iter()
        .position(|&l| l == label)
        .expect("all labels enumerated")
}

/// The twenty-four-state family in [`StateLabel24::all`] order.
pub fn s24() -> Vec<(StateLabel24, HermitianOperator)> {
    cache().states.clone()
}

pub fn table2_row_measurement(row: usize) -> Option<&'static Measurement> {
    cache().rows.get(row)
}

/// Seven-bit parity codeword of each state (bit `r` set when the state lands
/// on the odd outcome of row `r`), or `None` when some outcome is not
/// deterministic.
pub fn parity_codewords() -> Vec<(StateLabel24, Option<u8>)> {
    let cache = cache();
    (0..cache.states.len())
        .map(|s| {
            let word = (0..TABLE2_ROWS.len()).try_fold(0u8, |acc, r| {
                cache.odd[r][s].map(|odd| acc | ((odd as u8) << r))
            });
            (cache.states[s].0, word)
        })
        .collect()
}

/// First parity row whose odd/even outcome separates `i` from `j`, computed
/// from the states themselves.
pub fn table2_measurement(i: StateLabel24, j: StateLabel24) -> Result<(Measurement, usize)> {
    if i == j {
        return Err(Error::SameState);
    }
    let cache = cache();
    let (si, sj) = (state_index(i), state_index(j));
    for (r, column) in cache.odd.iter().enumerate() {
        if let (Some(a), Some(b)) = (column[si], column[sj]) {
            if a != b {
                return Ok((cache.rows[r].clone(), r));
            }
        }
    }
    Err(Error::NoSeparatingRow(i.to_string(), j.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table2Column {
    Odd,
    Even,
}

/// Column listing of one printed parity row.
#[derive(Clone, Debug)]
pub struct PrintedRow {
    pub axes: [PauliAxis; 3],
    pub odd: Vec<StateLabel24>,
    pub even: Vec<StateLabel24>,
}

// Per row: odd column for bar levels 0, 1, 2, then the even column.
const PRINTED: [[&str; 6]; 7] = [
    [
        "-000 -001 +010 +011",
        "+000 +001 -010 -011",
        "+000 +001 -010 -011",
        "+000 +001 -010 -011",
        "-000 -001 +010 +011",
        "-000 -001 +010 +011",
    ],
    [
        "-000 +001 -010 +011",
        "-000 +001 -010 +011",
        "+000 -001 +010 -011",
        "+000 -001 +010 -011",
        "+000 -001 +010 -011",
        "-000 +001 -010 +011",
    ],
    [
        "+000 +001 +010 +011",
        "+000 +001 +010 +011",
        "+000 +001 +010 +011",
        "-000 -001 -010 -011",
        "-000 -001 -010 -011",
        "-000 -001 -010 -011",
    ],
    [
        "-000 +001 +010 -011",
        "+000 -001 -010 +011",
        "-000 +001 +010 -011",
        "+000 -001 -010 +011",
        "-000 +001 +010 -011",
        "+000 -001 -010 +011",
    ],
    [
        "+000 -000 +011 -011",
        "+000 -000 +011 -011",
        "+000 -000 +011 -011",
        "+001 -001 +010 -010",
        "+001 -001 +010 -010",
        "+001 -001 +010 -010",
    ],
    [
        "+000 -000 +001 -011",
        "+000 -000 +001 -001",
        "+000 -000 +001 -001",
        "+010 -010 +011 -011",
        "+010 -010 +011 -011",
        "+010 -010 +011 -011",
    ],
    [
        "+000 -000 +010 -010",
        "+000 -000 +010 -010",
        "+000 -000 +010 -010",
        "+001 -001 +011 -011",
        "+001 -001 +011 -011",
        "+001 -001 +011 -011",
    ],
];

fn parse_cell(cell: &str, bar_level: u8) -> Vec<StateLabel24> {
    cell.split_whitespace()
        .map(|tok| {
            let sign = if tok.starts_with('+') { Sign::Plus } else { Sign::Minus };
            let bits = u8::from_str_radix(&tok[1..], 2).expect("binary GHZ index");
            StateLabel24 {
                ghz: GhzIndex(bits),
                sign,
                bar_level,
            }
        })
        .collect()
}

/// The published parity table, kept as a cross-check corpus.
pub fn printed_table2() -> Vec<PrintedRow> {
    PRINTED
        .iter()
        .zip(TABLE2_ROWS)
        .map(|(cells, axes)| PrintedRow {
            axes,
            odd: (0..3).flat_map(|b| parse_cell(cells[b], b as u8)).collect(),
            even: (0..3).flat_map(|b| parse_cell(cells[3 + b], b as u8)).collect(),
        })
        .collect()
}

/// A state whose printed placement disagrees with the computed one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Table2Divergence {
    pub axes: String,
    pub state: String,
    pub printed: Vec<Table2Column>,
    pub computed: Option<Table2Column>,
}

/// Compares the printed table with the recomputed odd/even partition.
pub fn table2_cross_check() -> Vec<Table2Divergence> {
    let cache = cache();
    let mut out = Vec::new();
    for (r, row) in printed_table2().iter().enumerate() {
        for (s, (label, _)) in cache.states.iter().enumerate() {
            let mut printed = Vec::new();
            if row.odd.contains(label) {
                printed.push(Table2Column::Odd);
            }
            if row.even.contains(label) {
                printed.push(Table2Column::Even);
            }
            let computed = cache.odd[r][s].map(|odd| if odd { Table2Column::Odd } else { Table2Column::Even });
            if printed.len() != 1 || Some(printed[0]) != computed {
                out.push(Table2Divergence {
                    axes: axes_label(&row.axes),
                    state: label.to_string(),
                    printed,
                    computed,
                });
            }
        }
    }
    out
}
