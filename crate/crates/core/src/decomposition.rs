//! POPT states as positive unital maps applied to one half of a pure state.
//!
//! The pipeline pads `W` on the kernel of its reduction, normalizes the
//! reduction to the identity, reads the result as the Choi operator of a
//! positive map `U`, and dilates `U` with an ancilla qubit `C` and the two
//! Kraus operators of a measure-and-prepare map `Y` so that
//! `W = (I (x) Lambda)(psi)`, `Lambda = Y . (U (x) I_C)`.
//!
//! Kraus normalization: `V_B = sqrt(d_S) W_B^{1/2}`. The extra `sqrt(d_S)`
//! compensates the `1/d_S` weight of the maximally entangled `psi` so that
//! the reconstruction is exact; `V_B' = sqrt(1 - V_B^dag V_B)` then exists
//! (and `Lambda` is unital) exactly when `d_S W_B <= 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::Measurement;
use crate::cones::{is_popt, is_psd, min_product_expectation, PoptSearchConfig, TRACE_TOL};
use crate::error::{Error, Result};
use crate::operator::{c, CMatrix, CVector, ChoiOperator, HermitianOperator, SystemShape};

/// Reconstruction, unitality and correlation tolerance.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Tolerance for the intermediate identities of the pipeline.
pub const INVARIANT_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-10;
const ANCILLA: usize = 2;

/// Every intermediate of the pipeline. `S` is a copy of `A`, `R = S (x) C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop1Decomposition {
    /// The decomposed state, on the cut `[d_A, d_B]`.
    pub input: HermitianOperator,
    pub w_prime: HermitianOperator,
    pub p_b: HermitianOperator,
    pub p_b_perp: HermitianOperator,
    pub w_prime_b: HermitianOperator,
    pub w_double_prime: HermitianOperator,
    pub v_b: HermitianOperator,
    pub v_b_prime: HermitianOperator,
    /// Smallest eigenvalue of `1 - V_B^dag V_B` before clamping.
    pub kraus_margin: f64,
    pub choi_u: ChoiOperator,
    pub choi_lambda: ChoiOperator,
    pub psi_ar: HermitianOperator,
}

/// Views `w` on the cut first factor | remaining factors.
fn bipartite(w: &HermitianOperator) -> Result<HermitianOperator> {
    let dims = w.shape().dims();
    if dims.len() < 2 {
        return Err(Error::InvalidShape(format!(
            "decomposition needs a composite system, got {}",
            w.shape()
        )));
    }
    let da = dims[0];
    w.reshaped(SystemShape::new(vec![da, w.dim() / da])?)
}

/// Moves factor `a` to the front and groups the remaining factors into one:
/// the cut `a | rest` with shape `[d_a, d_rest]`.
pub fn bipartition(w: &HermitianOperator, a: usize) -> Result<HermitianOperator> {
    let k = w.shape().factors();
    if a >= k {
        return Err(Error::InvalidSubsystem { index: a, factors: k });
    }
    let order: Vec<usize> = std::iter::once(a).chain((0..k).filter(|&f| f != a)).collect();
    bipartite(&w.permute_factors(&order)?)
}

/// Factors `a` for which `w` is positive on products across `a | rest`.
pub fn popt_cuts(w: &HermitianOperator, cfg: &PoptSearchConfig) -> Result<Vec<usize>> {
    let mut cuts = Vec::new();
    for a in 0..w.shape().factors() {
        if is_popt(&bipartition(w, a)?, cfg, false)?.0 {
            cuts.push(a);
        }
    }
    Ok(cuts)
}

fn factor(n: usize) -> SystemShape {
    SystemShape::new(vec![n]).expect("local dimension >= 2")
}

fn hermitian(shape: SystemShape, m: CMatrix) -> Result<HermitianOperator> {
    HermitianOperator::new(shape, (&m + m.adjoint()).scale(0.5))
}

/// `Lambda = Y . (U (x) I_C)` with `Y(M) = V^dag <0|M|0> V + V'^dag <1|M|1> V'`.
fn lambda_choi(u: &ChoiOperator, v: &CMatrix, v_prime: &CMatrix) -> Result<ChoiOperator> {
    let (s, b) = (u.in_shape().clone(), u.out_shape().clone());
    let ancilla = SystemShape::qubits(1);
    let (ds, db, dc) = (s.total(), b.total(), ANCILLA);
    let u_prime = ChoiOperator::from_map(s.concat(&ancilla), b.concat(&ancilla), |x| {
        let mut out = CMatrix::zeros(db * dc, db * dc);
        for c1 in 0..dc {
            for c2 in 0..dc {
                let block = CMatrix::from_fn(ds, ds, |i, j| x[(i * dc + c1, j * dc + c2)]);
                let image = u.apply_raw(&block);
                for i in 0..db {
                    for j in 0..db {
                        out[(i * dc + c1, j * dc + c2)] = image[(i, j)];
                    }
                }
            }
        }
        out
    })?;
    let kraus = [v, v_prime];
    let y = ChoiOperator::from_map(b.concat(&ancilla), b, |m| {
        let mut out = CMatrix::zeros(db, db);
        for (k, op) in kraus.iter().enumerate() {
            let block = CMatrix::from_fn(db, db, |i, j| m[(i * dc + k, j * dc + k)]);
            out += op.adjoint() * block * *op;
        }
        out
    })?;
    u_prime.compose(&y)
}

/// `(1/sqrt(d)) |chi+>_AS |0>_C`.
fn psi(da: usize) -> HermitianOperator {
    let shape = SystemShape::new(vec![da, da, ANCILLA]).expect("dims >= 2");
    let mut v = CVector::zeros(shape.total());
    let amp = 1.0 / (da as f64).sqrt();
    for i in 0..da {
        v[(i * da + i) * ANCILLA] = c(amp, 0.0);
    }
    HermitianOperator::outer(shape, &v).expect("sized by shape")
}

/// Runs the pipeline on a unit-trace POPT state. The first tensor factor is
/// `A`, the remaining factors form `B`.
pub fn prop1_decompose(w: &HermitianOperator, cfg: &PoptSearchConfig) -> Result<Prop1Decomposition> {
    let trace = w.trace();
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::NonUnitTrace { trace });
    }
    let w = bipartite(w)?;
    let (popt, report) = is_popt(&w, cfg, true)?;
    if !popt {
        return Err(Error::NotPopt {
            min_value: report.min_value,
        });
    }
    let (da, db) = (w.shape().dims()[0], w.shape().dims()[1]);
    let (a, b) = (factor(da), factor(db));
    let id_a = HermitianOperator::identity(a.clone());
    let id_b = HermitianOperator::identity(b.clone());

    let w_b = w.partial_trace(&[1])?;
    let p_b = w_b.support_projector(SUPPORT_TOL)?;
    let p_b_perp = id_b.sub(&p_b)?;
    let w_prime = w.add(&id_a.tensor(&p_b_perp))?;
    let w_prime_b = w_b.add(&p_b_perp.scale(da as f64))?;
    let (sqrt_b, inv_sqrt_b) = w_prime_b.psd_sqrt_pinv()?;
    let w_double_prime = w_prime.sandwich(id_a.tensor(&inv_sqrt_b).matrix())?;
    let choi_u = ChoiOperator::new(a, b.clone(), w_double_prime.clone())?;

    let v_b = hermitian(b.clone(), (sqrt_b.matrix() * p_b.matrix()).scale((da as f64).sqrt()))?;
    let defect = id_b.sub(&id_b.sandwich(v_b.matrix())?)?;
    let spectrum = defect.eig();
    let kraus_margin = *spectrum.values.last().expect("non-empty");
    let v_b_prime = hermitian(b, spectrum.map_values(|x| x.max(0.0).sqrt()))?;

    let choi_lambda = lambda_choi(&choi_u, v_b.matrix(), v_b_prime.matrix())?;
    Ok(Prop1Decomposition {
        input: w,
        w_prime,
        p_b,
        p_b_perp,
        w_prime_b,
        w_double_prime,
        v_b,
        v_b_prime,
        kraus_margin,
        choi_u,
        choi_lambda,
        psi_ar: psi(da),
    })
}

impl Prop1Decomposition {
    /// `(I_A (x) Lambda)(psi)`.
    pub fn reconstruct(&self) -> Result<HermitianOperator> {
        let a = factor(self.psi_ar.shape().dims()[0]);
        self.choi_lambda.apply_on_tail(&a, &self.psi_ar)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Prop1Verification {
    pub reconstruction_residual: f64,
    pub unitality_residual: f64,
    /// Product-state minimum of the Choi operator of `Lambda` on `R | B`.
    pub lambda_min_product: f64,
    pub lambda_argmin: Vec<Vec<Complex64>>,
    pub lambda_positive: bool,
    pub lambda_completely_positive: bool,
    /// `max |Tr_A W'' - 1_B|`.
    pub trace_a_residual: f64,
    /// `max |V^dag V + V'^dag V' - 1_B|`.
    pub kraus_residual: f64,
    pub kraus_margin: f64,
    /// Stored Choi of `Lambda` against the one rebuilt from `U`, `V`, `V'`.
    pub consistency_residual: f64,
    pub psi_trace: f64,
    pub psi_rank_one: bool,
    pub reconstruction_ok: bool,
    pub unital_ok: bool,
    pub invariants_ok: bool,
    pub pass: bool,
}

/// Re-checks a decomposition of `w` without trusting its derived fields.
pub fn verify_prop1(
    w: &HermitianOperator,
    d: &Prop1Decomposition,
    cfg: &PoptSearchConfig,
) -> Result<Prop1Verification> {
    let w = bipartite(w)?;
    let reconstruction_residual = d.reconstruct()?.frobenius_distance(&w)?;

    let lambda = &d.choi_lambda;
    let unit_in = HermitianOperator::identity(lambda.in_shape().clone());
    let unitality_residual = lambda
        .apply(&unit_in)?
        .max_abs_diff(&HermitianOperator::identity(lambda.out_shape().clone()))?;
    let view = lambda.bipartite_view();
    let positivity = min_product_expectation(&view, cfg)?;
    let lambda_completely_positive = is_psd(&view, cfg.membership_tol);

    let id_b = HermitianOperator::identity(d.v_b.shape().clone());
    let trace_a_residual = d.w_double_prime.partial_trace(&[1])?.max_abs_diff(&id_b)?;
    let kraus_sum = id_b
        .sandwich(d.v_b.matrix())?
        .add(&id_b.sandwich(d.v_b_prime.matrix())?)?;
    let kraus_residual = kraus_sum.max_abs_diff(&id_b)?;
    let rebuilt = lambda_choi(&d.choi_u, d.v_b.matrix(), d.v_b_prime.matrix())?;
    let consistency_residual = rebuilt.op().max_abs_diff(lambda.op())?;

    let psi_trace = d.psi_ar.trace();
    let values = d.psi_ar.eig().values;
    let psi_rank_one = (values[0] - 1.0).abs() <= INVARIANT_TOL
        && values[1..].iter().all(|v| v.abs() <= INVARIANT_TOL);

    let reconstruction_ok = reconstruction_residual <= RECONSTRUCTION_TOL;
    let unital_ok = unitality_residual <= RECONSTRUCTION_TOL;
    let invariants_ok = trace_a_residual <= INVARIANT_TOL
        && kraus_residual <= INVARIANT_TOL
        && consistency_residual <= INVARIANT_TOL
        && (psi_trace - 1.0).abs() <= INVARIANT_TOL
        && psi_rank_one;
    Ok(Prop1Verification {
        reconstruction_residual,
        unitality_residual,
        lambda_min_product: positivity.min_value,
        lambda_argmin: positivity.argmin.clone(),
        lambda_positive: positivity.is_member,
        lambda_completely_positive,
        trace_a_residual,
        kraus_residual,
        kraus_margin: d.kraus_margin,
        consistency_residual,
        psi_trace,
        psi_rank_one,
        reconstruction_ok,
        unital_ok,
        invariants_ok,
        pass: reconstruction_ok && unital_ok && positivity.is_member && invariants_ok,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
    /// `Tr[W (pi_a|x (x) pi_b|y)]`
    pub direct: f64,
    /// `Tr[psi (pi_a|x (x) Lambda*(pi_b|y))]`
    pub simulated: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub entries: Vec<CorrelationEntry>,
    pub max_deviation: f64,
    /// Per setting `y`: `max |sum_b Lambda*(pi_b|y) - 1_R|`.
    pub normalization_defect: Vec<f64>,
    /// All direct probabilities lie in `[-1e-9, 1 + 1e-9]`.
    pub probabilities_in_range: bool,
}

/// Evaluates every joint outcome probability directly from `W` and through
/// the decomposition with the adjoint of `Lambda` acting on Bob's effects.
pub fn correlation_identity_check(
    w: &HermitianOperator,
    povms_a: &[Measurement],
    povms_b: &[Measurement],
    d: &Prop1Decomposition,
) -> Result<CorrelationReport> {
    let w = bipartite(w)?;
    let (a_shape, b_shape) = (factor(w.shape().dims()[0]), factor(w.shape().dims()[1]));
    let local = |m: &Measurement, shape: &SystemShape| -> Result<Vec<HermitianOperator>> {
        m.effects().iter().map(|e| e.reshaped(shape.clone())).collect()
    };
    let alice = povms_a
        .iter()
        .map(|m| local(m, &a_shape))
        .collect::<Result<Vec<_>>>()?;
    let bob = povms_b
        .iter()
        .map(|m| local(m, &b_shape))
        .collect::<Result<Vec<_>>>()?;
    let adjoint = d.choi_lambda.adjoint();
    let unit_r = HermitianOperator::identity(adjoint.out_shape().clone());
    let mut pulled = Vec::with_capacity(bob.len());
    let mut normalization_defect = Vec::with_capacity(bob.len());
    for effects in &bob {
        let images = effects
            .iter()
            .map(|e| adjoint.apply(e))
            .collect::<Result<Vec<_>>>()?;
        let mut sum = HermitianOperator::zeros(unit_r.shape().clone());
        for img in &images {
            sum = sum.add(img)?;
        }
        normalization_defect.push(sum.max_abs_diff(&unit_r)?);
        pulled.push(images);
    }
    let mut entries = Vec::new();
    for (x, pa) in alice.iter().enumerate() {
        for (y, pb) in bob.iter().enumerate() {
            for (a, ea) in pa.iter().enumerate() {
                for (b, eb) in pb.iter().enumerate() {
                    let direct = w.trace_product(&ea.tensor(eb));
                    let simulated = d.psi_ar.trace_product(&ea.tensor(&pulled[y][b]));
                    entries.push(CorrelationEntry {
                        x,
                        y,
                        a,
                        b,
                        direct,
                        simulated,
                    });
                }
            }
        }
    }
    let max_deviation = entries
        .iter()
        .map(|e| (e.direct - e.simulated).abs())
        .fold(0.0, f64::max);
    let probabilities_in_range = entries
        .iter()
        .all(|e| (-INVARIANT_TOL..=1.0 + INVARIANT_TOL).contains(&e.direct));
    Ok(CorrelationReport {
        entries,
        max_deviation,
        normalization_defect,
        probabilities_in_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bell_state, Bell, PauliAxis};
    use crate::sampling;

    fn cfg() -> PoptSearchConfig {
        PoptSearchConfig::default()
    }

    fn swap_half() -> HermitianOperator {
        bell_state(Bell::PhiPlus).partial_transpose(&[1]).unwrap()
    }

    fn xz() -> Vec<Measurement> {
        vec![PauliAxis::X.measurement(), PauliAxis::Z.measurement()]
    }

    #[test]
    fn bell_state_reconstructs() {
        let w = bell_state(Bell::PhiPlus);
        let d = prop1_decompose(&w, &cfg()).unwrap();
        let v = verify_prop1(&w, &d, &cfg()).unwrap();
        assert!(v.reconstruction_residual <= 1e-8);
        assert!(v.pass, "{v:?}");
        assert!(v.lambda_completely_positive);
    }

    #[test]
    fn swap_half_is_a_positive_not_completely_positive_map() {
        let w = swap_half();
        let d = prop1_decompose(&w, &cfg()).unwrap();
        let v = verify_prop1(&w, &d, &cfg()).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(!v.lambda_completely_positive);
        assert!(!is_psd(d.choi_lambda.op(), 1e-10));
    }

    #[test]
    fn full_rank_reduction_needs_no_padding() {
        let w = HermitianOperator::identity(SystemShape::qubits(2)).scale(0.25);
        let d = prop1_decompose(&w, &cfg()).unwrap();
        assert_eq!(d.p_b_perp.frobenius_norm(), 0.0);
        assert!(d.w_prime.max_abs_diff(&w).unwrap() == 0.0);
        assert!(verify_prop1(&w, &d, &cfg()).unwrap().pass);
    }

    #[test]
    fn rank_deficient_reduction_is_padded() {
        let w = HermitianOperator::basis_projector(SystemShape::qubits(2), 0);
        let d = prop1_decompose(&w, &cfg()).unwrap();
        assert!((d.p_b_perp.trace() - 1.0).abs() < 1e-12);
        let v = verify_prop1(&w, &d, &cfg()).unwrap();
        assert!(v.reconstruction_ok && v.lambda_positive);
        assert!(v.trace_a_residual < 1e-12);
        // d_A W_B = 2|0><0| exceeds the identity.
        assert!((d.kraus_margin + 1.0).abs() < 1e-12);
        assert!(!v.unital_ok);
    }

    #[test]
    fn tampered_kraus_operator_is_caught() {
        // Qubit (x) qutrit: d_A W_B = 2/3 < 1, so V_B' is non-zero.
        let w = HermitianOperator::identity(SystemShape::new(vec![2, 3]).unwrap()).scale(1.0 / 6.0);
        let mut d = prop1_decompose(&w, &cfg()).unwrap();
        assert!(verify_prop1(&w, &d, &cfg()).unwrap().pass);
        d.v_b_prime = HermitianOperator::zeros(d.v_b_prime.shape().clone());
        let v = verify_prop1(&w, &d, &cfg()).unwrap();
        assert!(!v.invariants_ok && !v.pass);
        assert!(v.kraus_residual > 0.1);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let not_popt = bell_state(Bell::PhiPlus)
            .scale(2.0)
            .sub(&swap_half())
            .unwrap();
        assert!(matches!(prop1_decompose(&not_popt, &cfg()), Err(Error::NotPopt { .. })));
        let w = HermitianOperator::identity(SystemShape::qubits(2));
        assert!(matches!(prop1_decompose(&w, &cfg()), Err(Error::NonUnitTrace { .. })));
        let q = HermitianOperator::identity(SystemShape::qubits(1)).scale(0.5);
        assert!(prop1_decompose(&q, &cfg()).is_err());
    }

    #[test]
    fn unitality_tracks_the_reduced_state() {
        let mut rng = sampling::rng(21, 0);
        for _ in 0..10 {
            let rho = sampling::density(&mut rng, &SystemShape::qubits(2));
            let d = prop1_decompose(&rho, &cfg()).unwrap();
            let v = verify_prop1(&rho, &d, &cfg()).unwrap();
            assert!(v.reconstruction_ok && v.lambda_positive && v.lambda_completely_positive);
            let lambda_max = rho.partial_trace(&[1]).unwrap().eig().values[0];
            assert_eq!(v.unital_ok, 2.0 * lambda_max <= 1.0 + 1e-9);
            assert!((d.kraus_margin - (1.0 - 2.0 * lambda_max)).abs() < 1e-9);
        }
    }

    #[test]
    fn decomposition_round_trips_through_json() {
        let d = prop1_decompose(&swap_half(), &cfg()).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        let back: Prop1Decomposition = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn adjoint_pairing_through_lambda() {
        let d = prop1_decompose(&swap_half(), &cfg()).unwrap();
        let adjoint = d.choi_lambda.adjoint();
        let a = SystemShape::qubits(1);
        let mut rng = sampling::rng(8, 0);
        for _ in 0..20 {
            let x = sampling::hermitian(&mut rng, d.psi_ar.shape());
            let ea = sampling::hermitian(&mut rng, &a);
            let eb = sampling::hermitian(&mut rng, d.choi_lambda.out_shape());
            let lhs = d.choi_lambda.apply_on_tail(&a, &x).unwrap().trace_product(&ea.tensor(&eb));
            let rhs = x.trace_product(&ea.tensor(&adjoint.apply(&eb).unwrap()));
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn correlations_of_swap_half() {
        let w = swap_half();
        let d = prop1_decompose(&w, &cfg()).unwrap();
        let r = correlation_identity_check(&w, &xz(), &xz(), &d).unwrap();
        assert_eq!(r.entries.len(), 16);
        assert!(r.max_deviation <= 1e-8);
        assert!(r.probabilities_in_range);
    }

    #[test]
    fn correlations_of_phi_plus() {
        let w = bell_state(Bell::PhiPlus);
        let d = prop1_decompose(&w, &cfg()).unwrap();
        let r = correlation_identity_check(&w, &xz(), &xz(), &d).unwrap();
        assert!(r.max_deviation <= 1e-8);
        let zz = |a, b| r.entries.iter().find(|e| e.x == 1 && e.y == 1 && e.a == a && e.b == b).unwrap().direct;
        assert!((zz(0, 0) - 0.5).abs() < 1e-12 && zz(0, 1).abs() < 1e-12);
    }

    #[test]
    fn correlations_of_maximally_mixed_state_factorize() {
        let w = HermitianOperator::identity(SystemShape::qubits(2)).scale(0.25);
        let d = prop1_decompose(&w, &cfg()).unwrap();
        let r = correlation_identity_check(&w, &xz(), &xz(), &d).unwrap();
        assert!(r.entries.iter().all(|e| (e.direct - 0.25).abs() < 1e-12));
        assert!(r.max_deviation <= 1e-8);
        // Lambda is unital, so only its adjoint is trace preserving.
        assert!(r.normalization_defect.iter().all(|&x| x > 0.1));
    }

    #[test]
    fn three_qubit_cuts() {
        use crate::catalog::StateLabel24;
        let bar: StateLabel24 = "Phi+_010-bar".parse().unwrap();
        let dbar: StateLabel24 = "Phi-_001-dbar".parse().unwrap();
        let plain: StateLabel24 = "Phi+_000".parse().unwrap();
        assert_eq!(popt_cuts(&bar.state(), &cfg()).unwrap(), vec![1]);
        assert_eq!(popt_cuts(&dbar.state(), &cfg()).unwrap(), vec![0]);
        assert_eq!(popt_cuts(&plain.state(), &cfg()).unwrap(), vec![0, 1, 2]);
        let w = bipartition(&bar.state(), 1).unwrap();
        assert_eq!(w.shape().dims(), &[2, 4]);
        let d = prop1_decompose(&w, &cfg()).unwrap();
        assert!(verify_prop1(&w, &d, &cfg()).unwrap().pass);
        assert!(matches!(prop1_decompose(&bar.state(), &cfg()), Err(Error::NotPopt { .. })));
        assert!(bipartition(&bar.state(), 3).is_err());
    }
}
