//! Classify a few two-qubit operators: quantum state, POPT witness state, or
//! not a state at all.
//!
//! ```bash
//! cargo run --release --example popt_membership
//! ```

use poptlab::catalog::{bell_state, Bell};
use poptlab::cones::{classify_state, min_product_expectation, PoptSearchConfig};
use poptlab::{sampling, HermitianOperator, SystemShape};

fn main() -> poptlab::Result<()> {
    let cfg = PoptSearchConfig::default();
    let shape = SystemShape::qubits(2);
    let phi = bell_state(Bell::PhiPlus);
    let mut rng = sampling::rng(1, 0);

    let candidates: Vec<(&str, HermitianOperator)> = vec![
        ("Phi+", phi.clone()),
        ("Phi+ transposed on B", phi.partial_transpose(&[1])?),
        ("random POPT", sampling::popt_state(&mut rng)),
        ("1 - 2 Phi+ renormalized", HermitianOperator::identity(shape).sub(&phi.scale(2.0))?.scale(0.5)),
    ];
    for (name, w) in candidates {
        let report = min_product_expectation(&w, &cfg)?;
        println!(
            "{name:>26}: {:?}  min eigenvalue {:+.4}  min product value {:+.4}  restart spread {:.1e}",
            classify_state(&w, &cfg)?,
            w.min_eigenvalue(),
            report.min_value,
            report.restart_dispersion()
        );
    }
    Ok(())
}
