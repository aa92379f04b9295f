//! Information dimension of two-qubit pools and the counting bound behind
//! the operational dimension.
//!
//! ```bash
//! cargo run --release --example dimension_bounds
//! ```

use poptlab::catalog::{self, Measurement, StateLabel8};
use poptlab::distinguish::{info_dim_lower_bound, quantum_information_dimension, theorem2_accounting, DISTINGUISH_TOL};
use poptlab::{sampling, HermitianOperator, SystemShape};

fn main() -> poptlab::Result<()> {
    let shape = SystemShape::qubits(2);
    let mut rng = sampling::rng(3, 0);
    let mut pool: Vec<HermitianOperator> = catalog::s8().into_iter().filter(|(l, _)| !l.barred).map(|(_, w)| w).collect();
    pool.extend((0..12).map(|_| sampling::pure_state(&mut rng, &shape)));
    let (dim, members) = quantum_information_dimension(&pool, DISTINGUISH_TOL)?;
    println!("quantum pool of {}: information dimension {dim}, clique {members:?}", pool.len());

    let labels = StateLabel8::all();
    let s8: Vec<HermitianOperator> = catalog::s8().into_iter().map(|(_, w)| w).collect();
    let (dim, _) = info_dim_lower_bound(&s8, |i, j| catalog::table1_measurement(labels[i], labels[j]), DISTINGUISH_TOL)?;
    println!("eight POPT states under separable parity measurements: information dimension >= {dim}");

    let basis: Vec<HermitianOperator> = (0..4).map(|k| HermitianOperator::basis_projector(shape.clone(), k)).collect();
    let m = Measurement::new("computational basis", basis.clone())?;
    let acc = theorem2_accounting(&s8[4..], &m)?;
    println!(
        "four witness states against the basis measurement: sum Tr E = {}, sum Tr(E_i W_i) = {:.3}, slack {:.3}",
        acc.sum_tr_e, acc.sum_diag, acc.slack
    );
    println!("basis states against it: slack {}", theorem2_accounting(&basis, &m)?.slack);
    Ok(())
}
