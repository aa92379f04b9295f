use super::*;
use crate::cones::{classify_state, min_product_expectation, PoptSearchConfig, StateClass};

fn swap() -> HermitianOperator {
    let mut m = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(i, j)] = c(1.0, 0.0);
    }
    HermitianOperator::new(SystemShape::qubits(2), m).unwrap()
}

fn label8(s: &str) -> StateLabel8 {
    s.parse().unwrap()
}

fn label24(s: &str) -> StateLabel24 {
    s.parse().unwrap()
}

#[test]
fn bell_state_entries() {
    let phi = bell_state(Bell::PhiPlus);
    for i in 0..4 {
        for j in 0..4 {
            let expected = if [0, 3].contains(&i) && [0, 3].contains(&j) { 0.5 } else { 0.0 };
            assert!((phi.matrix()[(i, j)] - c(expected, 0.0)).norm() < 1e-15);
        }
    }
    let psi = bell_state(Bell::PsiMinus);
    assert!((psi.trace_product(&swap()) + 1.0).abs() < 1e-15);
    assert_eq!(phi.trace_product(&bell_state(Bell::PhiMinus)), 0.0);
}

#[test]
fn barred_bell_states() {
    let states = s8();
    assert_eq!(states.len(), 8);
    let phi_bar = label8("Phi+-bar").state();
    assert!(phi_bar.max_abs_diff(&swap().scale(0.5)).unwrap() < 1e-15);
    let psi_bar = label8("Psi--bar").state();
    // (1 - SWAP)/2 is the singlet itself; its transpose is 1/2 - Phi+.
    let singlet = HermitianOperator::identity(SystemShape::qubits(2))
        .sub(&swap())
        .unwrap()
        .scale(0.5);
    assert!(singlet.max_abs_diff(&bell_state(Bell::PsiMinus)).unwrap() < 1e-15);
    let expected = HermitianOperator::identity(SystemShape::qubits(2))
        .scale(0.5)
        .sub(&bell_state(Bell::PhiPlus))
        .unwrap();
    assert!(psi_bar.max_abs_diff(&expected).unwrap() < 1e-15);
    let spec = phi_bar.eig();
    for (v, e) in spec.values.iter().zip([0.5, 0.5, 0.5, -0.5]) {
        assert!((v - e).abs() < 1e-10);
    }
}

#[test]
fn eight_state_classification() {
    let cfg = PoptSearchConfig::default();
    for (label, w) in s8() {
        assert!((w.trace() - 1.0).abs() < 1e-12);
        let class = classify_state(&w, &cfg).unwrap();
        let expected = if label.barred { StateClass::WitnessState } else { StateClass::Quantum };
        assert_eq!(class, expected, "{label}");
        if label.barred {
            assert!(w.min_eigenvalue() <= -0.1);
        }
    }
}

#[test]
fn labels_round_trip() {
    for l in StateLabel8::all() {
        assert_eq!(label8(&l.to_string()), l);
    }
    for l in StateLabel24::all() {
        assert_eq!(label24(&l.to_string()), l);
    }
    assert!("Phi+bar".parse::<StateLabel8>().is_err());
    assert!("Phi+_100".parse::<StateLabel24>().is_err());
    assert!(GhzIndex::new(4).is_err());
}

#[test]
fn rotations_as_printed() {
    let [id, ax, ay] = rotation_unitaries();
    assert_eq!(id.matrix(), &CMatrix::identity(2, 2));
    let prod = ax.matrix() * ax.matrix().adjoint();
    assert!((prod - CMatrix::identity(2, 2)).norm() < 1e-15);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = ay.apply(&basis_ket(0));
    assert!((v[0] - c(h, 0.0)).norm() < 1e-15 && (v[1] - c(h, 0.0)).norm() < 1e-15);
}

#[test]
fn two_qubit_parity() {
    let m = parity_measurement_2q();
    let shape = SystemShape::qubits(2);
    assert_eq!(m.effects()[0], HermitianOperator::diagonal(shape.clone(), &[1.0, 0.0, 0.0, 1.0]).unwrap());
    assert_eq!(m.effects()[1], HermitianOperator::diagonal(shape, &[0.0, 1.0, 1.0, 0.0]).unwrap());
    assert!(m.verify_certificates());
}

#[test]
fn rotated_parity() {
    let [id, _, ay] = rotation_unitaries();
    let plain = rotated_measurement(&id, &id).unwrap();
    assert_eq!(plain.effects(), parity_measurement_2q().effects());
    let m = rotated_measurement(&ay, &ay).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
    let minus = CVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]);
    let pp = HermitianOperator::outer(SystemShape::qubits(2), &crate::operator::product_vector(&[plus.clone(), plus.clone()])).unwrap();
    let mm = HermitianOperator::outer(SystemShape::qubits(2), &crate::operator::product_vector(&[minus.clone(), minus])).unwrap();
    assert!(m.effects()[0].max_abs_diff(&pp.add(&mm).unwrap()).unwrap() < 1e-15);
    for e in m.effects() {
        assert!(e.is_projector(1e-10));
    }
    assert!(m.verify_certificates());
    let three = UnitaryOperator::identity(SystemShape::qubits(2));
    assert!(rotated_measurement(&three, &id).is_err());
}

#[test]
fn table1_examples() {
    assert_eq!(table1_entry(label8("Phi+"), label8("Phi-")).unwrap(), (Rotation::Ay, Rotation::Ay));
    assert_eq!(table1_entry(label8("Phi+-bar"), label8("Phi+")).unwrap(), (Rotation::Ax, Rotation::Ax));
    assert_eq!(table1_entry(label8("Phi+"), label8("Phi+-bar")).unwrap(), (Rotation::Ax, Rotation::Ax));
    assert_eq!(table1_entry(label8("Phi+"), label8("Psi+")).unwrap(), (Rotation::Identity, Rotation::Identity));
    assert_eq!(
        table1_entry(label8("Psi+"), label8("Psi-")).unwrap(),
        table1_entry(label8("Psi+-bar"), label8("Psi--bar")).unwrap()
    );
    assert!(matches!(table1_measurement(label8("Psi-"), label8("Psi-")), Err(Error::SameState)));
    let m = table1_measurement(label8("Phi+"), label8("Phi-")).unwrap();
    assert_eq!(m.label(), "M[Ay(x)Ay]");
}

#[test]
fn ghz_family() {
    let states = s24();
    assert_eq!(states.len(), 24);
    let w = label24("Phi+_001").state();
    let mut expected = CMatrix::zeros(8, 8);
    for (i, j) in [(1, 1), (1, 6), (6, 1), (6, 6)] {
        expected[(i, j)] = c(0.5, 0.0);
    }
    assert!((w.matrix() - expected).norm() < 1e-15);
    for (_, w) in &states {
        assert!((w.trace() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn barred_ghz_is_popt_but_not_psd() {
    let w = label24("Phi+_000-bar").state();
    assert!(w.min_eigenvalue() < -0.1);
    let report = min_product_expectation(&w, &PoptSearchConfig::default()).unwrap();
    assert!(report.min_value >= -1e-9);
    assert!(report.grid_value.unwrap() >= -1e-9);
}

#[test]
fn three_qubit_parity() {
    use PauliAxis::{X, Y, Z};
    let m = parity_measurement_3q(Z, Z, Z);
    // |0> is "up": odd ups among computational strings 000, 011, 101, 110.
    let odd = HermitianOperator::diagonal(SystemShape::qubits(3), &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
    assert!(m.effects()[0].max_abs_diff(&odd).unwrap() < 1e-15);
    let sum = m.effects()[0].add(&m.effects()[1]).unwrap();
    assert!(sum.max_abs_diff(&HermitianOperator::identity(SystemShape::qubits(3))).unwrap() < 1e-15);
    let m = parity_measurement_3q(Y, Y, X);
    let phi_minus = label24("Phi-_000").state();
    assert!((phi_minus.trace_product(&m.effects()[0]) - 1.0).abs() < 1e-12);
    assert!(phi_minus.trace_product(&m.effects()[1]).abs() < 1e-12);
    let phi_plus = label24("Phi+_000").state();
    assert!(phi_plus.trace_product(&m.effects()[0]).abs() < 1e-12);
    for row in 0..TABLE2_ROWS.len() {
        let m = table2_row_measurement(row).unwrap();
        assert!(m.verify_certificates());
        assert!(m.effects().iter().all(|e| e.is_projector(1e-10)));
        assert!((m.effects()[0].trace() - 4.0).abs() < 1e-12);
    }
    assert!(table2_row_measurement(7).is_none());
}

#[test]
fn table2_examples() {
    let (_, row) = table2_measurement(label24("Phi+_000"), label24("Phi-_000")).unwrap();
    assert_eq!(row, 0);
    // (y,x,y) is the first row that separates this pair; the printed (z,y,z)
    // row also lists them in opposite columns.
    let (a, b) = (label24("Phi+_000-dbar"), label24("Phi+_001-dbar"));
    assert_eq!(table2_measurement(a, b).unwrap().1, 1);
    let printed = &printed_table2()[6];
    assert!(printed.odd.contains(&a) && printed.even.contains(&b));
    assert!(matches!(table2_measurement(a, a), Err(Error::SameState)));
}

#[test]
fn printed_xy_rows_match_recomputation() {
    let divergences = table2_cross_check();
    assert!(divergences.iter().all(|d| d.axes.contains('z')));
    let typo = divergences
        .iter()
        .find(|d| d.axes == "(z,z,y)" && d.state == "Phi-_011")
        .unwrap();
    assert_eq!(typo.printed, vec![Table2Column::Odd, Table2Column::Even]);
}

#[test]
fn z_rows_are_not_deterministic() {
    for (label, w) in s24() {
        for row in 4..7 {
            let p = w.trace_product(&table2_row_measurement(row).unwrap().effects()[0]);
            assert!((p - 0.5).abs() < 1e-12, "{label} row {row}: {p}");
        }
    }
    assert!(parity_codewords().iter().all(|(_, w)| w.is_none()));
}

#[test]
fn two_site_z_parity_completes_the_separation() {
    let coarse = two_site_z_rows();
    assert_eq!(coarse.iter().map(|(r, _)| *r).collect::<Vec<_>>(), vec![4, 5, 6]);
    let xy: Vec<&Measurement> = (0..4).map(|r| table2_row_measurement(r).unwrap()).collect();
    let rows: Vec<&Measurement> = xy.into_iter().chain(coarse.iter().map(|(_, m)| m)).collect();
    let mut words = Vec::new();
    for (label, w) in s24() {
        let mut word = 0u8;
        for (r, m) in rows.iter().enumerate() {
            assert!(m.verify_certificates());
            let p = w.trace_product(&m.effects()[0]);
            assert!(p.abs() < 1e-9 || (p - 1.0).abs() < 1e-9, "{label}: {p}");
            word |= ((p > 0.5) as u8) << r;
        }
        words.push(word);
    }
    words.sort_unstable();
    words.dedup();
    assert_eq!(words.len(), 24);
}
