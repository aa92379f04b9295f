use proptest::prelude::*;

use super::json::OperatorJson;
use super::spectral::eig_hermitian_matrix;
use super::*;
use crate::catalog::{bell_state, Bell};
use crate::sampling;

fn diag(values: &[f64]) -> HermitianOperator {
    let shape = SystemShape::new(vec![values.len()]).unwrap();
    HermitianOperator::diagonal(shape, values).unwrap()
}

fn qubit_diag(values: &[f64]) -> HermitianOperator {
    HermitianOperator::diagonal(SystemShape::qubits(1), values).unwrap()
}

fn close(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> bool {
    a.matrix().shape() == b.matrix().shape() && (a.matrix() - b.matrix()).camax() <= tol
}

#[test]
fn shape_validation() {
    assert!(SystemShape::new(vec![]).is_err());
    assert!(SystemShape::new(vec![2, 1]).is_err());
    let s = SystemShape::new(vec![2, 3]).unwrap();
    assert_eq!(s.total(), 6);
    assert_eq!(s.to_string(), "[2x3]");
    assert!(s.check_subset(&[2]).is_err());
    assert_eq!(s.check_subset(&[1, 0, 1]).unwrap(), vec![0, 1]);
}

#[test]
fn construction_checks_hermiticity() {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = c(1.0, 0.0);
    assert!(matches!(
        HermitianOperator::new(SystemShape::qubits(1), m),
        Err(Error::NotHermitian { .. })
    ));
    let mut m = CMatrix::identity(2, 2);
    m[(0, 1)] = c(1e-13, 0.0);
    let h = HermitianOperator::new(SystemShape::qubits(1), m).unwrap();
    assert_eq!(h.matrix()[(0, 1)], h.matrix()[(1, 0)].conj());
    assert!(HermitianOperator::new(SystemShape::qubits(2), CMatrix::identity(2, 2)).is_err());
}

#[test]
fn tensor_examples() {
    let id = HermitianOperator::identity(SystemShape::qubits(1));
    assert_eq!(id.tensor(&id), HermitianOperator::identity(SystemShape::qubits(2)));
    let z = qubit_diag(&[1.0, -1.0]);
    assert_eq!(z.tensor(&z).matrix(), qubit_diag(&[1.0, -1.0]).tensor(&z).matrix());
    assert_eq!(
        z.tensor(&z).matrix().diagonal().map(|x| x.re).as_slice(),
        &[1.0, -1.0, -1.0, 1.0]
    );
    let p = qubit_diag(&[1.0, 0.0]).tensor(&qubit_diag(&[0.0, 1.0]));
    assert_eq!(p.shape(), &SystemShape::qubits(2));
    assert_eq!(p.matrix().diagonal().map(|x| x.re).as_slice(), &[0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn partial_trace_examples() {
    let phi = bell_state(Bell::PhiPlus);
    let reduced = phi.partial_trace(&[1]).unwrap();
    assert!(close(&reduced, &HermitianOperator::identity(SystemShape::qubits(1)).scale(0.5), 1e-15));
    let id4 = HermitianOperator::identity(SystemShape::qubits(2));
    assert!(close(
        &id4.partial_trace(&[1]).unwrap(),
        &HermitianOperator::identity(SystemShape::qubits(1)).scale(2.0),
        0.0
    ));
    assert!(matches!(phi.partial_trace(&[2]), Err(Error::InvalidSubsystem { .. })));
    assert!(phi.partial_trace(&[]).is_err());
}

#[test]
fn partial_trace_on_uneven_factors() {
    let mut rng = sampling::rng(3, 0);
    let a = sampling::hermitian(&mut rng, &SystemShape::new(vec![3]).unwrap());
    let b = sampling::hermitian(&mut rng, &SystemShape::new(vec![2]).unwrap());
    let d = sampling::hermitian(&mut rng, &SystemShape::new(vec![4]).unwrap());
    let abd = HermitianOperator::tensor_all(&[a.clone(), b.clone(), d.clone()]).unwrap();
    let kept = abd.partial_trace(&[0, 2]).unwrap();
    assert!(close(&kept, &a.tensor(&d).scale(b.trace()), 1e-12));
    let kept = abd.partial_trace(&[1]).unwrap();
    assert!(close(&kept, &b.scale(a.trace() * d.trace()), 1e-12));
}

#[test]
fn partial_transpose_examples() {
    let swap_half = bell_state(Bell::PhiPlus).partial_transpose(&[1]).unwrap();
    let mut swap = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(i, j)] = c(0.5, 0.0);
    }
    assert!((swap_half.matrix() - swap).camax() < 1e-15);
    let values = swap_half.eig().values;
    for (v, e) in values.iter().zip([0.5, 0.5, 0.5, -0.5]) {
        assert!((v - e).abs() < 1e-12);
    }
    let mut rng = sampling::rng(5, 0);
    let q = SystemShape::qubits(1);
    let (a, b) = (sampling::hermitian(&mut rng, &q), sampling::hermitian(&mut rng, &q));
    let bt = HermitianOperator::new(q.clone(), b.matrix().transpose()).unwrap();
    assert!(close(&a.tensor(&b).partial_transpose(&[1]).unwrap(), &a.tensor(&bt), 1e-15));
}

#[test]
fn eig_examples() {
    assert_eq!(diag(&[1.0, 3.0]).eig().values, vec![3.0, 1.0]);
    let values = bell_state(Bell::PhiPlus).eig().values;
    for (v, e) in values.iter().zip([1.0, 0.0, 0.0, 0.0]) {
        assert!((v - e).abs() < 1e-12);
    }
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = c(0.0, 1.0);
    assert!(eig_hermitian_matrix(&m).is_err());
}

#[test]
fn min_eigenpair_matches_full_solver() {
    let mut rng = sampling::rng(11, 0);
    for n in [1usize, 2, 3] {
        let shape = SystemShape::new(vec![n.max(2) + if n == 3 { 1 } else { 0 }]).unwrap();
        for _ in 0..50 {
            let h = sampling::hermitian(&mut rng, &shape);
            let (value, vector) = spectral::min_eigenpair(h.matrix());
            assert!((value - h.min_eigenvalue()).abs() < 1e-10);
            let residual = (h.matrix() * &vector - &vector * c(value, 0.0)).norm();
            assert!(residual < 1e-9, "residual {residual}");
        }
    }
    let degenerate = CMatrix::identity(2, 2);
    let (value, vector) = spectral::min_eigenpair(&degenerate);
    assert!((value - 1.0).abs() < 1e-15 && (vector.norm() - 1.0).abs() < 1e-15);
}

#[test]
fn sqrt_and_pseudo_inverse() {
    let (sqrt, _) = diag(&[4.0, 9.0]).psd_sqrt_pinv().unwrap();
    assert!(close(&sqrt, &diag(&[2.0, 3.0]), 1e-14));
    let (_, pinv) = diag(&[4.0, 0.0]).psd_sqrt_pinv().unwrap();
    assert!(close(&pinv, &diag(&[0.5, 0.0]), 1e-14));
    let p = bell_state(Bell::PsiPlus);
    let (sqrt, pinv) = p.psd_sqrt_pinv().unwrap();
    assert!(close(&sqrt, &p, 1e-12) && close(&pinv, &p, 1e-12));
    assert!(matches!(diag(&[1.0, -0.5]).psd_sqrt_pinv(), Err(Error::NotPsd { .. })));
    let clamped = diag(&[1.0, -1e-11]).psd_sqrt_pinv().unwrap().0;
    assert!(close(&clamped, &diag(&[1.0, 0.0]), 1e-14));
}

#[test]
fn support_projectors() {
    assert!(close(&diag(&[2.0, 0.0]).support_projector(1e-10).unwrap(), &diag(&[1.0, 0.0]), 1e-14));
    let mut rng = sampling::rng(2, 0);
    let rho = sampling::density(&mut rng, &SystemShape::qubits(2));
    let p = rho.support_projector(1e-10).unwrap();
    assert!(close(&p, &HermitianOperator::identity(SystemShape::qubits(2)), 1e-10));
    let zero = HermitianOperator::zeros(SystemShape::qubits(1));
    assert!(close(&zero.support_projector(1e-10).unwrap(), &zero, 0.0));
    assert!(diag(&[1.0, -1.0]).support_projector(1e-10).is_err());
}

#[test]
fn choi_examples() {
    let q = SystemShape::qubits(1);
    let mut rng = sampling::rng(9, 0);
    let rho = sampling::density(&mut rng, &q);
    let id = ChoiOperator::identity_channel(q.clone());
    assert!(close(&id.apply(&rho).unwrap(), &rho, 1e-15));
    let t = ChoiOperator::transpose_map(q.clone());
    let rho_t = HermitianOperator::new(q.clone(), rho.matrix().transpose()).unwrap();
    assert!(close(&t.apply(&rho).unwrap(), &rho_t, 1e-15));
    let mut swap = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(i, j)] = c(1.0, 0.0);
    }
    assert_eq!(t.op().matrix(), &swap);
    let depol = ChoiOperator::from_map(q.clone(), q.clone(), |x| CMatrix::identity(2, 2) * (x.trace() / 2.0)).unwrap();
    let out = depol.apply(&HermitianOperator::basis_projector(q.clone(), 0)).unwrap();
    assert!(close(&out, &HermitianOperator::identity(q.clone()).scale(0.5), 1e-15));
    assert!(id.apply(&HermitianOperator::identity(SystemShape::qubits(2))).is_err());
}

#[test]
fn choi_adjoint_examples() {
    let q = SystemShape::qubits(2);
    let id = ChoiOperator::identity_channel(q.clone());
    assert_eq!(id.adjoint(), id);
    let mut rng = sampling::rng(4, 0);
    let u = sampling::unitary(&mut rng, &q);
    let unital = ChoiOperator::from_map(q.clone(), q.clone(), |x| u.matrix() * x * u.matrix().adjoint()).unwrap();
    let image = unital.adjoint().apply(&HermitianOperator::identity(q.clone())).unwrap();
    assert!((image.trace() - 4.0).abs() < 1e-12);
    let general = ChoiOperator::new(q.clone(), SystemShape::new(vec![3]).unwrap(), sampling::hermitian(&mut rng, &SystemShape::new(vec![12]).unwrap())).unwrap();
    assert_eq!(general.adjoint().adjoint(), general);
}

#[test]
fn choi_apply_on_tail_and_compose() {
    let q = SystemShape::qubits(1);
    let t = ChoiOperator::transpose_map(q.clone());
    let phi = bell_state(Bell::PhiPlus);
    let out = t.apply_on_tail(&q, &phi).unwrap();
    assert!(close(&out, &phi.partial_transpose(&[1]).unwrap(), 1e-15));
    let tt = t.compose(&t).unwrap();
    assert!(close(tt.op(), ChoiOperator::identity_channel(q.clone()).op(), 1e-15));
    let wide = ChoiOperator::identity_channel(SystemShape::qubits(2));
    assert!(t.compose(&wide).is_err());
}

#[test]
fn frobenius_examples() {
    let a = diag(&[1.0, 0.0]);
    assert_eq!(a.frobenius_distance(&a).unwrap(), 0.0);
    assert!((a.frobenius_distance(&diag(&[0.0, 1.0])).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    let d = bell_state(Bell::PhiPlus)
        .frobenius_distance(&bell_state(Bell::PhiMinus))
        .unwrap();
    assert!((d - 2f64.sqrt()).abs() < 1e-15);
    assert!(a.frobenius_distance(&HermitianOperator::identity(SystemShape::qubits(2))).is_err());
}

#[test]
fn unitary_checks() {
    let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(matches!(
        UnitaryOperator::new(SystemShape::qubits(1), m),
        Err(Error::NotUnitary { .. })
    ));
}

#[test]
fn json_rejects_bad_payloads() {
    let bad_size = r#"{"dims":[2],"re":[[1,0]],"im":[[0,0]]}"#;
    let raw: OperatorJson = serde_json::from_str(bad_size).unwrap();
    assert!(HermitianOperator::try_from(raw).is_err());
    let not_hermitian = r#"{"dims":[2],"re":[[1,1],[0,1]],"im":[[0,0],[0,0]]}"#;
    assert!(serde_json::from_str::<HermitianOperator>(not_hermitian).is_err());
    let extra = r#"{"dims":[2],"re":[[1,0],[0,1]],"im":[[0,0],[0,0]],"x":1}"#;
    assert!(serde_json::from_str::<HermitianOperator>(extra).is_err());
    let missing_im = r#"{"dims":[2],"re":[[1,0],[0,1]]}"#;
    assert!(serde_json::from_str::<HermitianOperator>(missing_im).is_err());
}

fn shape_strategy() -> impl Strategy<Value = SystemShape> {
    prop::collection::vec(2usize..=3, 1..=2).prop_map(|d| SystemShape::new(d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tensor_is_associative(seed in any::<u64>(), s in shape_strategy()) {
        let mut rng = sampling::rng(seed, 0);
        let q = SystemShape::qubits(1);
        let (a, b, d) = (sampling::hermitian(&mut rng, &s), sampling::hermitian(&mut rng, &q), sampling::hermitian(&mut rng, &s));
        let left = a.tensor(&b).tensor(&d);
        let right = a.tensor(&b.tensor(&d));
        prop_assert!((left.matrix() - right.matrix()).camax() <= 1e-14);
        prop_assert!((a.tensor(&b).trace() - a.trace() * b.trace()).abs() <= 1e-10);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), sa in shape_strategy(), sb in shape_strategy()) {
        let mut rng = sampling::rng(seed, 0);
        let (a, b) = (sampling::hermitian(&mut rng, &sa), sampling::hermitian(&mut rng, &sb));
        let keep: Vec<usize> = (0..sa.factors()).collect();
        let reduced = a.tensor(&b).partial_trace(&keep).unwrap();
        prop_assert!((reduced.matrix() - a.scale(b.trace()).matrix()).camax() <= 1e-10);
    }

    #[test]
    fn partial_transpose_is_an_isometric_involution(seed in any::<u64>(), s in shape_strategy(), mask in 0usize..4) {
        let mut rng = sampling::rng(seed, 0);
        let joint = s.concat(&SystemShape::qubits(1));
        let w = sampling::hermitian(&mut rng, &joint);
        let subset: Vec<usize> = (0..joint.factors()).filter(|k| mask >> k & 1 == 1).collect();
        let once = w.partial_transpose(&subset).unwrap();
        let twice = once.partial_transpose(&subset).unwrap();
        prop_assert_eq!(&twice, &w);
        prop_assert!((once.trace() - w.trace()).abs() <= 1e-12);
        prop_assert!((once.frobenius_norm() - w.frobenius_norm()).abs() <= 1e-12);
    }

    #[test]
    fn adjoint_pairing(seed in any::<u64>(), din in 2usize..=4, dout in 2usize..=3) {
        let mut rng = sampling::rng(seed, 0);
        let (si, so) = (SystemShape::new(vec![din]).unwrap(), SystemShape::new(vec![dout]).unwrap());
        let choi = ChoiOperator::new(si.clone(), so.clone(), sampling::hermitian(&mut rng, &si.concat(&so))).unwrap();
        let x = sampling::hermitian(&mut rng, &si);
        let y = sampling::hermitian(&mut rng, &so);
        let lhs = choi.apply(&x).unwrap().trace_product(&y);
        let rhs = x.trace_product(&choi.adjoint().apply(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 2usize..=16) {
        let mut rng = sampling::rng(seed, 0);
        let h = sampling::hermitian(&mut rng, &SystemShape::new(vec![n]).unwrap());
        let spec = h.eig();
        prop_assert!(spec.values.windows(2).all(|w| w[0] >= w[1]));
        let residual = (spec.reconstruct() - h.matrix()).norm();
        prop_assert!(residual <= 1e-10 * h.frobenius_norm());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), s in shape_strategy()) {
        let mut rng = sampling::rng(seed, 0);
        let h = sampling::hermitian(&mut rng, &s);
        let text = serde_json::to_string(&h).unwrap();
        let back: HermitianOperator = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, h);
    }
}

#[test]
fn oversized_shapes_are_rejected() {
    assert!(SystemShape::new(vec![1 << 32, 1 << 32]).is_err());
    assert!(SystemShape::new(vec![2; 13]).is_err());
    assert!(SystemShape::new(vec![2; 12]).is_ok());
}

#[test]
fn permuting_factors_of_a_product() {
    let mut rng = sampling::rng(44, 0);
    let a = sampling::hermitian(&mut rng, &SystemShape::qubits(1));
    let b = sampling::hermitian(&mut rng, &SystemShape::new(vec![3]).unwrap());
    let c = sampling::hermitian(&mut rng, &SystemShape::qubits(1));
    let abc = a.tensor(&b).tensor(&c);
    let bca = b.tensor(&c).tensor(&a);
    assert!(abc.permute_factors(&[1, 2, 0]).unwrap().max_abs_diff(&bca).unwrap() < 1e-14);
    assert_eq!(abc.permute_factors(&[0, 1, 2]).unwrap(), abc);
    assert!(abc.permute_factors(&[0, 0, 1]).is_err());
    assert!(abc.permute_factors(&[0, 1]).is_err());
}
