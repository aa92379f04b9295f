//! Exact and sampled win rates of the pairwise-distinguishability game.
//!
//! ```bash
//! cargo run --release --example pairwise_game
//! ```

use poptlab::game::{builtin_quantum_baseline, builtin_sepbar8, exact_win_probability, simulate, GameSpec};

fn main() -> poptlab::Result<()> {
    for n in [4, 5, 8] {
        let g = GameSpec::uniform(n)?;
        let quantum = builtin_quantum_baseline(n)?;
        let sepbar = builtin_sepbar8().truncated(n)?;
        let sampled = simulate(&quantum, &g, 200_000, 7)?;
        println!(
            "n = {n}: quantum exact {:.6} sampled {:.6} (3 sigma {:.4}), witness states exact {}",
            exact_win_probability(&quantum, &g)?,
            sampled.empirical_win_rate.unwrap_or(f64::NAN),
            sampled.three_sigma,
            exact_win_probability(&sepbar, &g)?
        );
    }
    Ok(())
}
