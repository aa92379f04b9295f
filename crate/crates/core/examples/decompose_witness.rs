//! Write a POPT state as `(I (x) Lambda)(psi)` with a positive map `Lambda`,
//! then reproduce its Pauli correlations through the adjoint map.
//!
//! ```bash
//! cargo run --release --example decompose_witness
//! ```

use poptlab::catalog::{PauliAxis, StateLabel24, StateLabel8};
use poptlab::cones::PoptSearchConfig;
use poptlab::decomposition::{bipartition, correlation_identity_check, popt_cuts, prop1_decompose, verify_prop1};

fn main() -> poptlab::Result<()> {
    let cfg = PoptSearchConfig::default();
    let w: StateLabel8 = "Phi+-bar".parse()?;
    let w = w.state();
    let d = prop1_decompose(&w, &cfg)?;
    let v = verify_prop1(&w, &d, &cfg)?;
    println!(
        "Phi+-bar: reconstruction {:e}, unitality {:e}, Choi min product {:+e}, completely positive {}",
        v.reconstruction_residual, v.unitality_residual, v.lambda_min_product, v.lambda_completely_positive
    );

    let paulis = [PauliAxis::X.measurement(), PauliAxis::Z.measurement()];
    let r = correlation_identity_check(&w, &paulis, &paulis, &d)?;
    for e in r.entries.iter().filter(|e| e.a == 0 && e.b == 0) {
        println!("  P(up, up | {}, {}) = {:.3} direct, {:.3} simulated", ["x", "z"][e.x], ["x", "z"][e.y], e.direct, e.simulated);
    }

    // A three-qubit state is decomposed across a cut on which it is POPT.
    let label: StateLabel24 = "Phi-_010-bar".parse()?;
    let cuts = popt_cuts(&label.state(), &cfg)?;
    let w3 = bipartition(&label.state(), cuts[0])?;
    let v3 = verify_prop1(&w3, &prop1_decompose(&w3, &cfg)?, &cfg)?;
    println!("{label}: POPT cuts {cuts:?}, pass on cut {} | rest: {}", cuts[0], v3.pass);
    Ok(())
}
