//! Cone membership for composite systems.
//!
//! The maximal composition admits every unit-trace Hermitian operator whose
//! expectation on product states is non-negative (POPT). Membership is decided
//! by minimizing `<a (x) b (x) ...| W |a (x) b (x) ...>` over unit product
//! vectors. Each sweep fixes all but one factor and solves the remaining
//! quadratic form exactly with a minimum eigenvector; the problem is still
//! nonconvex, so the search combines seeded random restarts with a
//! deterministic Bloch-sphere grid on qubit factors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c, min_eigenpair, product_vector, CMatrix, CVector, HermitianOperator};
use crate::sampling;

/// Tolerance on `|Tr W - 1|` for normalized states.
pub const TRACE_TOL: f64 = 1e-9;

/// Reconstruction tolerance for separable certificates.
pub const CERTIFICATE_TOL: f64 = 1e-10;

const GRID_POLAR: usize = 12;
const GRID_AZIMUTH: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoptSearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub convergence_tol: f64,
    /// Membership threshold: a minimum above `-membership_tol` counts as
    /// non-negative.
    pub membership_tol: f64,
    pub seed: u64,
}

impl Default for PoptSearchConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 500,
            convergence_tol: 1e-12,
            membership_tol: 1e-9,
            seed: 0,
        }
    }
}

impl PoptSearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be >= 1".into()));
        }
        if !(self.convergence_tol > 0.0 && self.membership_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of the product-state minimization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoptReport {
    pub min_value: f64,
    /// Minimizing unit vector for each factor.
    pub argmin: Vec<Vec<Complex64>>,
    pub is_member: bool,
    /// `|min_value| <= membership_tol`: the operator touches the cone boundary.
    pub boundary: bool,
    /// Final value of each random restart, in restart order.
    pub restart_values: Vec<f64>,
    /// Polished grid optimum, when every factor is a qubit.
    pub grid_value: Option<f64>,
}

impl PoptReport {
    pub fn argmin_vectors(&self) -> Vec<CVector> {
        self.argmin.iter().map(|v| CVector::from_vec(v.clone())).collect()
    }

    /// Spread of the restart values above the reported minimum.
    pub fn restart_dispersion(&self) -> f64 {
        self.restart_values
            .iter()
            .map(|v| v - self.min_value)
            .fold(0.0, f64::max)
    }
}

/// Three-way classification of a unit-trace Hermitian operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateClass {
    /// Density operator.
    Quantum,
    /// POPT but not PSD: a state of the maximal composition only.
    WitnessState,
    /// Negative on some product state.
    NotAState,
}

/// Effective single-factor operator `X_k^dag W X_k`, where column `b` of
/// `X_k` is the product vector with factor `k` replaced by `|b>`.
fn effective_operator(w: &CMatrix, dims: &[usize], vecs: &[CVector], k: usize) -> CMatrix {
    let dk = dims[k];
    let mut x = CMatrix::zeros(w.nrows(), dk);
    for b in 0..dk {
        let mut basis = CVector::zeros(dk);
        basis[b] = c(1.0, 0.0);
        let factors: Vec<CVector> = vecs
            .iter()
            .enumerate()
            .map(|(l, v)| if l == k { basis.clone() } else { v.clone() })
            .collect();
        x.set_column(b, &product_vector(&factors));
    }
    x.adjoint() * w * x
}

fn product_expectation(w: &CMatrix, vecs: &[CVector]) -> f64 {
    let v = product_vector(vecs);
    (v.adjoint() * w * &v)[(0, 0)].re
}

fn alternating_minimization(
    w: &CMatrix,
    dims: &[usize],
    mut vecs: Vec<CVector>,
    cfg: &PoptSearchConfig,
) -> (f64, Vec<CVector>) {
    let mut value = product_expectation(w, &vecs);
    for _ in 0..cfg.max_iters {
        let previous = value;
        for k in 0..dims.len() {
            let (lambda, v) = min_eigenpair(&effective_operator(w, dims, &vecs, k));
            vecs[k] = v;
            value = lambda;
        }
        if previous - value < cfg.convergence_tol {
            break;
        }
    }
    (product_expectation(w, &vecs), vecs)
}

fn bloch_grid() -> Vec<CVector> {
    let mut out = Vec::with_capacity(GRID_POLAR * GRID_AZIMUTH);
    for i in 0..GRID_POLAR {
        let theta = std::f64::consts::PI * i as f64 / (GRID_POLAR - 1) as f64;
        for j in 0..GRID_AZIMUTH {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / GRID_AZIMUTH as f64;
            let (s, co) = (theta / 2.0).sin_cos();
            out.push(CVector::from_vec(vec![c(co, 0.0), Complex64::from_polar(s, phi)]));
        }
    }
    out
}

/// `(<a| (x) 1) W (|a> (x) 1)` for a vector `a` on the leading factor.
fn contract_leading(w: &CMatrix, a: &CVector) -> CMatrix {
    let d = a.len();
    let rest = w.nrows() / d;
    let mut out = CMatrix::zeros(rest, rest);
    for p in 0..d {
        for q in 0..d {
            let coef = a[p].conj() * a[q];
            if coef.norm() == 0.0 {
                continue;
            }
            out += w.view((p * rest, q * rest), (rest, rest)) * coef;
        }
    }
    out
}

/// Grid over every factor but the last; the last is solved exactly.
fn grid_search(w: &CMatrix, factors: usize, grid: &[CVector]) -> (f64, Vec<CVector>) {
    if factors == 1 {
        let (l, v) = min_eigenpair(w);
        return (l, vec![v]);
    }
    let mut best = (f64::INFINITY, Vec::new());
    for a in grid {
        let (value, mut tail) = grid_search(&contract_leading(w, a), factors - 1, grid);
        if value < best.0 {
            tail.insert(0, a.clone());
            best = (value, tail);
        }
    }
    best
}

/// Minimum of `<p|W|p>` over unit product vectors `p`.
pub fn min_product_expectation(w: &HermitianOperator, cfg: &PoptSearchConfig) -> Result<PoptReport> {
    cfg.validate()?;
    let dims = w.shape().dims();
    if dims.len() < 2 {
        return Err(Error::InvalidShape(format!(
            "product minimization needs at least 2 factors, got {}",
            w.shape()
        )));
    }
    let m = w.matrix();
    let mut best: (f64, Vec<CVector>) = (f64::INFINITY, Vec::new());

    let grid_value = if dims.iter().all(|&d| d == 2) {
        let (_, start) = grid_search(m, dims.len(), &bloch_grid());
        let polished = alternating_minimization(m, dims, start, cfg);
        let value = polished.0;
        best = polished;
        Some(value)
    } else {
        None
    };

    let mut restart_values = Vec::with_capacity(cfg.restarts);
    for r in 0..cfg.restarts {
        let mut rng = sampling::rng(cfg.seed, r as u64);
        let start: Vec<CVector> = dims.iter().map(|&d| sampling::unit_vector(&mut rng, d)).collect();
        let (value, vecs) = alternating_minimization(m, dims, start, cfg);
        restart_values.push(value);
        if value < best.0 {
            best = (value, vecs);
        }
    }

    let (min_value, vecs) = best;
    Ok(PoptReport {
        min_value,
        argmin: vecs.iter().map(|v| v.iter().copied().collect()).collect(),
        is_member: min_value >= -cfg.membership_tol,
        boundary: min_value.abs() <= cfg.membership_tol,
        restart_values,
        grid_value,
    })
}

/// POPT test; with `normalized` the trace must also be one.
pub fn is_popt(w: &HermitianOperator, cfg: &PoptSearchConfig, normalized: bool) -> Result<(bool, PoptReport)> {
    let report = min_product_expectation(w, cfg)?;
    let trace_ok = !normalized || (w.trace() - 1.0).abs() <= TRACE_TOL;
    Ok((report.is_member && trace_ok, report))
}

pub fn is_psd(w: &HermitianOperator, tol: f64) -> bool {
    w.min_eigenvalue() >= -tol
}

pub fn classify_state(w: &HermitianOperator, cfg: &PoptSearchConfig) -> Result<StateClass> {
    let trace = w.trace();
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::NonUnitTrace { trace });
    }
    if is_psd(w, cfg.membership_tol) {
        return Ok(StateClass::Quantum);
    }
    let (popt, _) = is_popt(w, cfg, true)?;
    Ok(if popt {
        StateClass::WitnessState
    } else {
        StateClass::NotAState
    })
}

/// Checks that `1 - W` is positive on product tests.
pub fn complement_in_popt_cone(w: &HermitianOperator, cfg: &PoptSearchConfig) -> Result<bool> {
    let trace = w.trace();
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::NonUnitTrace { trace });
    }
    let complement = HermitianOperator::identity(w.shape().clone()).sub(w)?;
    Ok(min_product_expectation(&complement, cfg)?.is_member)
}

/// One weighted product term of a separable operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub weight: f64,
    pub factors: Vec<HermitianOperator>,
}

/// Explicit certificate `sum_i w_i A_i (x) B_i (x) ...` with PSD factors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeparableDecomposition {
    pub terms: Vec<SeparableTerm>,
}

impl SeparableDecomposition {
    pub fn new(terms: Vec<SeparableTerm>) -> Self {
        Self { terms }
    }

    pub fn reconstruct(&self) -> Result<HermitianOperator> {
        let mut acc: Option<HermitianOperator> = None;
        for term in &self.terms {
            let t = HermitianOperator::tensor_all(&term.factors)?.scale(term.weight);
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        acc.ok_or_else(|| Error::Malformed("empty separable decomposition".into()))
    }

    /// True iff every weight is non-negative, every factor is PSD and the
    /// weighted sum matches `target` entrywise within [`CERTIFICATE_TOL`].
    pub fn verify(&self, target: &HermitianOperator) -> Result<bool> {
        for term in &self.terms {
            let shape = term
                .factors
                .iter()
                .skip(1)
                .fold(term.factors.first().map(|f| f.shape().clone()), |acc, f| {
                    acc.map(|s| s.concat(f.shape()))
                });
            if shape.as_ref() != Some(target.shape()) {
                return Err(Error::ShapeMismatch {
                    expected: target.shape().to_string(),
                    found: shape.map_or_else(|| "no factors".into(), |s| s.to_string()),
                });
            }
        }
        if self.terms.is_empty() {
            return Ok(false);
        }
        let factors_ok = self.terms.iter().all(|t| {
            t.weight >= 0.0 && t.factors.iter().all(|f| is_psd(f, CERTIFICATE_TOL))
        });
        if !factors_ok {
            return Ok(false);
        }
        Ok(self.reconstruct()?.max_abs_diff(target)? <= CERTIFICATE_TOL)
    }
}
