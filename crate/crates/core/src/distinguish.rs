//! Perfect distinguishability checks and dimension counting.
//!
//! A family of states is pairwise distinguishable when every pair has a
//! measurement answering each state with certainty; it is distinguishable in
//! a single measurement when one measurement does this for the whole family.
//! The largest sizes of such families are the information and operational
//! dimensions. The helpers here verify both notions numerically, count
//! dimensions over finite pools and evaluate the counting identities behind
//! the operational-dimension bound.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, Measurement, StateLabel24, StateLabel8};
use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, PSD_TOL};

/// Default tolerance on `|Tr(E W) - delta|`.
pub const DISTINGUISH_TOL: f64 = 1e-9;

/// Largest pool accepted by the exhaustive clique searches.
pub const MAX_POOL: usize = 32;

/// Above this many outcomes the assignment is read off the row maxima
/// instead of enumerating permutations.
const PERMUTATION_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishReport {
    /// `prob_matrix[state][effect] = Tr(W E)`, clamped to `[0, 1]`.
    pub prob_matrix: Vec<Vec<f64>>,
    pub pass: bool,
    /// Deviation from the closest permuted identity, on unclamped values.
    pub max_deviation: f64,
    /// `outcome_permutation[state] = effect` for the closest assignment.
    pub outcome_permutation: Option<Vec<usize>>,
    /// Largest `|sum_e Tr(W E) - 1|` over states.
    pub row_sum_defect: f64,
}

/// Checks that `m` tells every state in `states` apart in one shot.
pub fn verify_single_measurement(
    states: &[HermitianOperator],
    m: &Measurement,
    tol: f64,
) -> Result<DistinguishReport> {
    if states.len() != m.len() {
        return Err(Error::CountMismatch(format!(
            "{} states for {} effects",
            states.len(),
            m.len()
        )));
    }
    let shape = m.effects()[0].shape();
    if let Some(w) = states.iter().find(|w| w.shape() != shape) {
        return Err(Error::ShapeMismatch {
            expected: shape.to_string(),
            found: w.shape().to_string(),
        });
    }
    let raw: Vec<Vec<f64>> = states
        .iter()
        .map(|w| m.effects().iter().map(|e| w.trace_product(e)).collect())
        .collect();
    let row_sum_defect = raw
        .iter()
        .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let (permutation, max_deviation) = best_assignment(&raw);
    let prob_matrix = raw
        .iter()
        .map(|row| row.iter().map(|p| p.clamp(0.0, 1.0)).collect())
        .collect();
    Ok(DistinguishReport {
        prob_matrix,
        pass: max_deviation <= tol,
        max_deviation,
        outcome_permutation: Some(permutation),
        row_sum_defect,
    })
}

fn deviation(raw: &[Vec<f64>], perm: &[usize]) -> f64 {
    raw.iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(e, p)| (p - if perm[i] == e { 1.0 } else { 0.0 }).abs())
        })
        .fold(0.0, f64::max)
}

fn best_assignment(raw: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = raw.len();
    if n <= PERMUTATION_LIMIT {
        return (0..n)
            .permutations(n)
            .map(|p| {
                let d = deviation(raw, &p);
                (p, d)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one state");
    }
    let argmax: Vec<usize> = raw
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(e, _)| e)
                .expect("non-empty row")
        })
        .collect();
    if argmax.iter().all_unique() {
        let d = deviation(raw, &argmax);
        (argmax, d)
    } else {
        let identity: Vec<usize> = (0..n).collect();
        let d = deviation(raw, &identity).max(1.0);
        (identity, d)
    }
}

/// Two-state version of [`verify_single_measurement`].
pub fn verify_pair(
    w1: &HermitianOperator,
    w2: &HermitianOperator,
    m: &Measurement,
    tol: f64,
) -> Result<DistinguishReport> {
    if m.len() != 2 {
        return Err(Error::InvalidMeasurement(format!(
            "pair verification needs 2 effects, got {}",
            m.len()
        )));
    }
    verify_single_measurement(&[w1.clone(), w2.clone()], m, tol)
}

/// Result for one unordered pair of a family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairEntry {
    pub first: String,
    pub second: String,
    pub measurement: Option<String>,
    pub report: Option<DistinguishReport>,
    /// Lookup failure, kept as a finding.
    pub error: Option<String>,
}

impl PairEntry {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.pass)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairwiseCertificate {
    pub labels: Vec<String>,
    pub pairs: Vec<PairEntry>,
    pub complete: bool,
    pub max_deviation: f64,
}

impl PairwiseCertificate {
    pub fn failures(&self) -> impl Iterator<Item = &PairEntry> {
        self.pairs.iter().filter(|p| !p.passed())
    }
}

/// Verifies every unordered pair `(i, j)`, `i < j`, with the measurement
/// returned by `lookup(i, j)`. Lookup errors are recorded per pair.
pub fn verify_family(
    states: &[(String, HermitianOperator)],
    lookup: impl Fn(usize, usize) -> Result<Measurement>,
    tol: f64,
) -> Result<PairwiseCertificate> {
    let mut pairs = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for (i, j) in (0..states.len()).tuple_combinations() {
        let (first, second) = (states[i].0.clone(), states[j].0.clone());
        let entry = match lookup(i, j) {
            Ok(m) => {
                let report = verify_pair(&states[i].1, &states[j].1, &m, tol)?;
                max_deviation = max_deviation.max(report.max_deviation);
                PairEntry {
                    first,
                    second,
                    measurement: Some(m.label().to_string()),
                    report: Some(report),
                    error: None,
                }
            }
            Err(e) => PairEntry {
                first,
                second,
                measurement: None,
                report: None,
                error: Some(e.to_string()),
            },
        };
        pairs.push(entry);
    }
    Ok(PairwiseCertificate {
        labels: states.iter().map(|(l, _)| l.clone()).collect(),
        complete: pairs.iter().all(PairEntry::passed),
        pairs,
        max_deviation,
    })
}

/// The eight two-qubit states under the rotated parity lookup.
pub fn verify_s8(tol: f64) -> Result<PairwiseCertificate> {
    let labels = StateLabel8::all();
    let states: Vec<_> = catalog::s8().into_iter().map(|(l, w)| (l.to_string(), w)).collect();
    verify_family(&states, |i, j| catalog::table1_measurement(labels[i], labels[j]), tol)
}

/// The twenty-four three-qubit states under the Pauli parity lookup.
pub fn verify_s24(tol: f64) -> Result<PairwiseCertificate> {
    let labels = StateLabel24::all();
    let states: Vec<_> = catalog::s24().into_iter().map(|(l, w)| (l.to_string(), w)).collect();
    verify_family(
        &states,
        |i, j| catalog::table2_measurement(labels[i], labels[j]).map(|(m, _)| m),
        tol,
    )
}

/// The twenty-four states under the four x/y parity rows plus the two-site
/// z-parity variants of the three z rows. Each pair uses the first row that
/// puts the two states in opposite columns.
pub fn verify_s24_two_site_z(tol: f64) -> Result<PairwiseCertificate> {
    let family = catalog::s24();
    let mut rows: Vec<Measurement> = (0..4)
        .map(|r| catalog::table2_row_measurement(r).expect("x/y row").clone())
        .collect();
    rows.extend(catalog::two_site_z_rows().into_iter().map(|(_, m)| m));
    let states: Vec<_> = family.iter().map(|(l, w)| (l.to_string(), w.clone())).collect();
    verify_family(
        &states,
        |i, j| {
            rows.iter()
                .find(|m| {
                    let odd = &m.effects()[0];
                    (family[i].1.trace_product(odd) - family[j].1.trace_product(odd)).abs() >= 1.0 - tol
                })
                .cloned()
                .ok_or_else(|| Error::NoSeparatingRow(states[i].0.clone(), states[j].0.clone()))
        },
        tol,
    )
}

/// Maximum clique of a graph on at most [`MAX_POOL`] vertices given as
/// neighbour bitmasks. Returns the members in increasing order.
fn max_clique(adjacency: &[u64]) -> Vec<usize> {
    fn expand(adj: &[u64], r: u64, mut p: u64, mut x: u64, best: &mut u64) {
        if p == 0 {
            if x == 0 && r.count_ones() > best.count_ones() {
                *best = r;
            }
            return;
        }
        if r.count_ones() + p.count_ones() <= best.count_ones() {
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut candidates = p & !adj[pivot];
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            let bit = 1u64 << v;
            expand(adj, r | bit, p & adj[v], x & adj[v], best);
            p &= !bit;
            x |= bit;
            candidates &= !bit;
        }
    }
    let n = adjacency.len();
    if n == 0 {
        return Vec::new();
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0u64;
    expand(adjacency, 0, all, 0, &mut best);
    (0..n).filter(|&v| best >> v & 1 == 1).collect()
}

fn check_pool(n: usize) -> Result<()> {
    if n > MAX_POOL {
        return Err(Error::InvalidConfig(format!(
            "pool of {n} states exceeds the exhaustive limit {MAX_POOL}"
        )));
    }
    Ok(())
}

fn adjacency(n: usize, edge: impl Fn(usize, usize) -> Result<bool>) -> Result<Vec<u64>> {
    let mut adj = vec![0u64; n];
    for (i, j) in (0..n).tuple_combinations() {
        if edge(i, j)? {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
    }
    Ok(adj)
}

/// Largest set of pairwise perfectly distinguishable quantum states in the
/// pool: a maximum clique of the support-orthogonality graph.
pub fn quantum_information_dimension(states: &[HermitianOperator], tol: f64) -> Result<(usize, Vec<usize>)> {
    check_pool(states.len())?;
    let mut supports = Vec::with_capacity(states.len());
    for w in states {
        let min_eigenvalue = w.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        supports.push(w.support_projector(PSD_TOL)?);
    }
    let adj = adjacency(states.len(), |i, j| {
        let overlap = states[i].trace_product(&states[j]);
        let product = (supports[i].matrix() * supports[j].matrix()).norm();
        Ok(overlap <= tol && product <= DISTINGUISH_TOL)
    })?;
    let clique = max_clique(&adj);
    Ok((clique.len(), clique))
}

/// Largest subset whose pairs all pass under `lookup`; lookup failures count
/// as non-distinguished pairs.
pub fn info_dim_lower_bound(
    states: &[HermitianOperator],
    lookup: impl Fn(usize, usize) -> Result<Measurement>,
    tol: f64,
) -> Result<(usize, Vec<usize>)> {
    check_pool(states.len())?;
    let adj = adjacency(states.len(), |i, j| match lookup(i, j) {
        Ok(m) => Ok(verify_pair(&states[i], &states[j], &m, tol)?.pass),
        Err(_) => Ok(false),
    })?;
    let clique = max_clique(&adj);
    Ok((clique.len(), clique))
}

/// Counting record `d = sum_i Tr(E_i) >= sum_i Tr(E_i W_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Accounting {
    pub sum_tr_e: f64,
    pub sum_diag: f64,
    pub slack: f64,
}

pub fn theorem2_accounting(states: &[HermitianOperator], m: &Measurement) -> Result<Theorem2Accounting> {
    if states.len() != m.len() {
        return Err(Error::CountMismatch(format!(
            "{} states for {} effects",
            states.len(),
            m.len()
        )));
    }
    let dimension = m.effects()[0].dim() as f64;
    let sum_tr_e: f64 = m.effects().iter().map(HermitianOperator::trace).sum();
    if (sum_tr_e - dimension).abs() > 1e-8 {
        return Err(Error::InvalidMeasurement(format!(
            "effect traces sum to {sum_tr_e}, expected {dimension}"
        )));
    }
    let mut sum_diag = 0.0;
    for (w, e) in states.iter().zip(m.effects()) {
        if w.shape() != e.shape() {
            return Err(Error::ShapeMismatch {
                expected: e.shape().to_string(),
                found: w.shape().to_string(),
            });
        }
        sum_diag += w.trace_product(e);
    }
    Ok(Theorem2Accounting {
        sum_tr_e,
        sum_diag,
        slack: sum_tr_e - sum_diag,
    })
}

/// `n_a n_b sum_i e_i(w') - sum_i e_i(w_i)` for an evaluation table
/// `table[i][j] = e_i(w_j)` of a distinguishing family.
pub fn proposition3_inequality(table: &[Vec<f64>], reference: &[f64], n_a: usize, n_b: usize) -> Result<f64> {
    let n = table.len();
    if n == 0 || table.iter().any(|row| row.len() != n) {
        return Err(Error::Malformed("evaluation table must be square and non-empty".into()));
    }
    if reference.len() != n {
        return Err(Error::Malformed(format!(
            "reference column has {} entries for a {n}x{n} table",
            reference.len()
        )));
    }
    if let Some(i) = (0..n).find(|&i| (table[i][i] - 1.0).abs() > DISTINGUISH_TOL) {
        return Err(Error::Malformed(format!("diagonal entry {i} is {}", table[i][i])));
    }
    if let Some(x) = reference.iter().find(|x| !(-DISTINGUISH_TOL..=1.0 + DISTINGUISH_TOL).contains(*x)) {
        return Err(Error::Malformed(format!("reference value {x} outside [0, 1]")));
    }
    let diag: f64 = (0..n).map(|i| table[i][i]).sum();
    Ok((n_a * n_b) as f64 * reference.iter().sum::<f64>() - diag)
}

/// Evaluation table and maximally mixed reference column for a family that
/// passed [`verify_single_measurement`], with effects reordered so that
/// effect `i` answers state `i`.
pub fn proposition3_instance(
    states: &[HermitianOperator],
    m: &Measurement,
    report: &DistinguishReport,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let perm = report
        .outcome_permutation
        .as_ref()
        .filter(|_| report.pass)
        .ok_or_else(|| Error::InvalidMeasurement("family is not distinguished by the measurement".into()))?;
    let effects: Vec<&HermitianOperator> = perm.iter().map(|&e| &m.effects()[e]).collect();
    let table = effects
        .iter()
        .map(|e| states.iter().map(|w| w.trace_product(e)).collect())
        .collect();
    let d = m.effects()[0].dim() as f64;
    let reference = effects.iter().map(|e| e.trace() / d).collect();
    Ok((table, reference))
}
