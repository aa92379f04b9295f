//! Seeded random operators for property suites and randomized instances.
//!
//! Every generator draws from a caller-supplied RNG; [`rng`] derives an
//! independent ChaCha stream per `(seed, stream)` pair.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{c, CMatrix, CVector, HermitianOperator, SystemShape, UnitaryOperator};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn gaussian<R: Rng>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random unit vector.
pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v.unscale(norm)
}

pub fn hermitian<R: Rng>(rng: &mut R, shape: &SystemShape) -> HermitianOperator {
    let n = shape.total();
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let h = (&g + g.adjoint()).scale(0.5);
    HermitianOperator::new(shape.clone(), h).expect("symmetrized")
}

pub fn pure_state<R: Rng>(rng: &mut R, shape: &SystemShape) -> HermitianOperator {
    HermitianOperator::outer(shape.clone(), &unit_vector(rng, shape.total())).expect("sized by shape")
}

/// Full-rank density operator `G G^dag / Tr(G G^dag)`.
pub fn density<R: Rng>(rng: &mut R, shape: &SystemShape) -> HermitianOperator {
    let n = shape.total();
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    HermitianOperator::new(shape.clone(), m.unscale(tr)).expect("Gram matrix")
}

/// Haar-random unitary via QR with phase correction.
pub fn unitary<R: Rng>(rng: &mut R, shape: &SystemShape) -> UnitaryOperator {
    let n = shape.total();
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    UnitaryOperator::new(shape.clone(), q).expect("QR factor is unitary")
}

/// Two-qubit POPT state: a partially transposed random pure state mixed with
/// the maximally mixed state at weight `lambda` drawn from `[0.5, 1]`.
/// Positive on product tests for every draw; usually not PSD.
pub fn popt_state<R: Rng>(rng: &mut R) -> HermitianOperator {
    let shape = SystemShape::qubits(2);
    let phi = pure_state(rng, &shape);
    let lambda: f64 = rng.gen_range(0.5..=1.0);
    let pt = phi.partial_transpose(&[1]).expect("valid subsystem");
    let mixed = HermitianOperator::identity(shape).scale((1.0 - lambda) / 4.0);
    pt.scale(lambda).add(&mixed).expect("same shape")
}
