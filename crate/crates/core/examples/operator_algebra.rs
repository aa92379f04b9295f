//! Partial transpose, partial trace and Choi maps on two qubits.
//!
//! ```bash
//! cargo run --example operator_algebra
//! ```

use poptlab::catalog::{bell_state, Bell};
use poptlab::{ChoiOperator, HermitianOperator, SystemShape};

fn main() -> poptlab::Result<()> {
    let phi = bell_state(Bell::PhiPlus);
    let phi_bar = phi.partial_transpose(&[1])?;
    println!("spectrum of Phi+:     {:?}", phi.eig().values.as_slice());
    println!("spectrum of Phi+^T_B: {:?}", phi_bar.eig().values.as_slice());

    let reduced = phi_bar.partial_trace(&[0])?;
    println!("Tr_B Phi+^T_B = 1/2? {}", reduced.max_abs_diff(&HermitianOperator::identity(SystemShape::qubits(1)).scale(0.5))? < 1e-15);

    // (I (x) T)(Phi+) from the transpose map's Choi operator.
    let t = ChoiOperator::transpose_map(SystemShape::qubits(1));
    let via_map = t.apply_on_tail(&SystemShape::qubits(1), &phi)?;
    println!("map and partial transpose agree: {}", via_map.max_abs_diff(&phi_bar)? < 1e-15);
    println!("transpose Choi is block positive but not PSD: min eigenvalue {}", t.op().min_eigenvalue());
    Ok(())
}
