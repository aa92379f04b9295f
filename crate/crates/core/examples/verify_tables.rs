//! Pairwise certificates for the eight two-qubit states and the
//! twenty-four three-qubit states.
//!
//! ```bash
//! cargo run --release --example verify_tables
//! ```

use poptlab::catalog::table2_cross_check;
use poptlab::distinguish::{verify_s24, verify_s24_two_site_z, verify_s8, DISTINGUISH_TOL};

fn main() -> poptlab::Result<()> {
    let s8 = verify_s8(DISTINGUISH_TOL)?;
    println!(
        "eight states: {}/{} pairs, max deviation {:e}",
        s8.pairs.iter().filter(|p| p.passed()).count(),
        s8.pairs.len(),
        s8.max_deviation
    );
    if let Some(p) = s8.pairs.first() {
        println!("  e.g. {} vs {} with {}", p.first, p.second, p.measurement.as_deref().unwrap_or("-"));
    }

    let literal = verify_s24(DISTINGUISH_TOL)?;
    println!(
        "twenty-four states, printed parity rows: {}/{} pairs",
        literal.pairs.len() - literal.failures().count(),
        literal.pairs.len()
    );
    for p in literal.failures().take(3) {
        println!("  unseparated: {} vs {}", p.first, p.second);
    }
    let coarse = verify_s24_two_site_z(DISTINGUISH_TOL)?;
    println!(
        "twenty-four states, two-site z rows: {}/{} pairs",
        coarse.pairs.len() - coarse.failures().count(),
        coarse.pairs.len()
    );
    println!("printed table memberships that differ from recomputation: {}", table2_cross_check().len());
    Ok(())
}
