//! The pairwise-distinguishability game.
//!
//! Alice receives a message `eta` out of `n` and sends one system prepared in
//! `enc(eta)`. The referee then tells Bob an unordered pair `{eta, eta'}`
//! containing the true message, and Bob measures to decide which of the two
//! it was. A round is won when Bob names `eta`.
//!
//! Scoring is per round: the win probability averages over `eta` and over
//! `eta' != eta` with the distributions of a [`GameSpec`]. Perfect play
//! (probability exactly one) does not depend on those distributions.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::catalog::{self, bell_state, Bell, Measurement, StateLabel8};
use crate::cones::{is_popt, is_psd, PoptSearchConfig, TRACE_TOL};
use crate::distinguish::{verify_family, verify_pair, PairwiseCertificate, DISTINGUISH_TOL};
use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, SystemShape, PSD_TOL};
use crate::sampling;

/// Normalization tolerance for game distributions.
pub const DIST_TOL: f64 = 1e-12;

/// Outcome probabilities down to this value are clamped to zero when
/// sampling; anything more negative aborts the simulation.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// Message and question distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub n: usize,
    pub message_dist: Vec<f64>,
    /// `question_dist[eta][eta']`, zero on the diagonal.
    pub question_dist: Vec<Vec<f64>>,
}

impl GameSpec {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("a game needs n >= 2 messages, got {n}")));
        }
        let q = 1.0 / (n - 1) as f64;
        Ok(Self {
            n,
            message_dist: vec![1.0 / n as f64; n],
            question_dist: (0..n)
                .map(|eta| (0..n).map(|k| if k == eta { 0.0 } else { q }).collect())
                .collect(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("a game needs n >= 2 messages, got {}", self.n)));
        }
        check_dist(&self.message_dist, self.n, "message distribution")?;
        if self.question_dist.len() != self.n {
            return Err(Error::InvalidConfig(format!(
                "{} question distributions for {} messages",
                self.question_dist.len(),
                self.n
            )));
        }
        for (eta, q) in self.question_dist.iter().enumerate() {
            check_dist(q, self.n, "question distribution")?;
            if q[eta] != 0.0 {
                return Err(Error::InvalidConfig(format!("question distribution {eta} puts weight on itself")));
            }
        }
        Ok(())
    }
}

fn check_dist(p: &[f64], n: usize, what: &str) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidConfig(format!("{what} has {} entries, expected {n}", p.len())));
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidConfig(format!("{what} has a negative or non-finite entry")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > DIST_TOL {
        return Err(Error::InvalidConfig(format!("{what} sums to {sum}")));
    }
    Ok(())
}

/// Theory the strategy claims to live in; decides what [`GameStrategy::validate`] checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theory {
    /// PSD states, ordinary effects.
    Quantum,
    /// POPT states, effects with separable certificates.
    SepBar,
    /// Diagonal states and effects.
    Classical,
}

/// Bob's two-outcome measurement for one pair and the message named by each
/// outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDecoder {
    pub measurement: Measurement,
    pub answers: [usize; 2],
}

#[derive(Clone, Debug)]
pub struct GameStrategy {
    pub name: String,
    pub theory: Theory,
    pub encoder: Vec<HermitianOperator>,
    decoder: BTreeMap<(usize, usize), PairDecoder>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl GameStrategy {
    pub fn new(name: impl Into<String>, theory: Theory, encoder: Vec<HermitianOperator>) -> Self {
        Self {
            name: name.into(),
            theory,
            encoder,
            decoder: BTreeMap::new(),
        }
    }

    /// Registers the decoder for `{a, b}`. The answers must be exactly `a` and `b`.
    pub fn set_decoder(&mut self, a: usize, b: usize, decoder: PairDecoder) -> Result<()> {
        if a == b {
            return Err(Error::SameState);
        }
        let n = self.encoder.len();
        if a >= n || b >= n {
            return Err(Error::InvalidConfig(format!("pair ({a}, {b}) outside {n} messages")));
        }
        if decoder.measurement.len() != 2 {
            return Err(Error::InvalidMeasurement(format!(
                "decoder needs 2 effects, got {}",
                decoder.measurement.len()
            )));
        }
        let mut answers = decoder.answers;
        answers.sort_unstable();
        if answers != [a.min(b), a.max(b)] {
            return Err(Error::InvalidConfig(format!(
                "answers {:?} do not name the pair ({a}, {b})",
                decoder.answers
            )));
        }
        self.decoder.insert(key(a, b), decoder);
        Ok(())
    }

    pub fn decoder(&self, a: usize, b: usize) -> Result<&PairDecoder> {
        self.decoder.get(&key(a, b)).ok_or(Error::UndefinedPair(a.min(b), a.max(b)))
    }

    /// Restricted to the first `n` messages.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.encoder.len() {
            return Err(Error::InvalidConfig(format!(
                "strategy encodes {} messages, {n} requested",
                self.encoder.len()
            )));
        }
        Ok(Self {
            name: self.name.clone(),
            theory: self.theory,
            encoder: self.encoder[..n].to_vec(),
            decoder: self
                .decoder
                .iter()
                .filter(|((_, b), _)| *b < n)
                .map(|(k, d)| (*k, d.clone()))
                .collect(),
        })
    }

    /// Checks the states and effects against the tagged theory and that
    /// every pair among the first `n` messages has a decoder.
    pub fn validate(&self, n: usize, cfg: &PoptSearchConfig) -> Result<()> {
        if n > self.encoder.len() {
            return Err(Error::InvalidConfig(format!(
                "strategy encodes {} messages, game has {n}",
                self.encoder.len()
            )));
        }
        for (eta, w) in self.encoder[..n].iter().enumerate() {
            let trace = w.trace();
            if (trace - 1.0).abs() > TRACE_TOL {
                return Err(Error::NonUnitTrace { trace });
            }
            match self.theory {
                Theory::Quantum => require_psd(w)?,
                Theory::Classical => {
                    require_psd(w)?;
                    require_diagonal(w, &format!("message {eta}"))?;
                }
                Theory::SepBar => {
                    let (ok, report) = is_popt(w, cfg, true)?;
                    if !ok {
                        return Err(Error::NotPopt {
                            min_value: report.min_value,
                        });
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                let d = self.decoder(a, b)?;
                let m = &d.measurement;
                if m.effects()[0].shape() != self.encoder[a].shape() {
                    return Err(Error::ShapeMismatch {
                        expected: self.encoder[a].shape().to_string(),
                        found: m.effects()[0].shape().to_string(),
                    });
                }
                match self.theory {
                    Theory::Quantum => {}
                    Theory::Classical => {
                        for e in m.effects() {
                            require_diagonal(e, m.label())?;
                        }
                    }
                    Theory::SepBar => {
                        if !m.verify_certificates() {
                            return Err(Error::InvalidMeasurement(format!(
                                "{} lacks a valid separable certificate",
                                m.label()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs the pairwise verification over the first `n` encoded states with
    /// the strategy's own decoders.
    pub fn certificate(&self, n: usize, tol: f64) -> Result<PairwiseCertificate> {
        let states: Vec<(String, HermitianOperator)> = self.encoder[..n.min(self.encoder.len())]
            .iter()
            .enumerate()
            .map(|(i, w)| (i.to_string(), w.clone()))
            .collect();
        verify_family(&states, |a, b| Ok(self.decoder(a, b)?.measurement.clone()), tol)
    }

    /// Clamped probability that Bob answers `eta` when asked `{eta, other}`.
    pub fn success_probability(&self, eta: usize, other: usize) -> Result<f64> {
        let d = self.decoder(eta, other)?;
        let w = self.encoder.get(eta).ok_or(Error::UndefinedPair(eta, other))?;
        Ok(d.measurement
            .effects()
            .iter()
            .zip(d.answers)
            .filter(|(_, answer)| *answer == eta)
            .map(|(e, _)| w.trace_product(e).clamp(0.0, 1.0))
            .sum())
    }
}

fn require_psd(w: &HermitianOperator) -> Result<()> {
    if is_psd(w, PSD_TOL) {
        Ok(())
    } else {
        Err(Error::NotPsd {
            min_eigenvalue: w.min_eigenvalue(),
        })
    }
}

fn require_diagonal(w: &HermitianOperator, what: &str) -> Result<()> {
    let m = w.matrix();
    let off = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).filter(move |j| *j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .fold(0.0, f64::max);
    if off > PSD_TOL {
        return Err(Error::InvalidConfig(format!("{what} is not diagonal (off-diagonal {off:e})")));
    }
    Ok(())
}

/// Per-round win probability.
pub fn exact_win_probability(s: &GameStrategy, g: &GameSpec) -> Result<f64> {
    g.validate()?;
    if g.n > s.encoder.len() {
        return Err(Error::InvalidConfig(format!(
            "strategy encodes {} messages, game has {}",
            s.encoder.len(),
            g.n
        )));
    }
    let mut total = 0.0;
    for eta in 0..g.n {
        for other in 0..g.n {
            if other != eta {
                let weight = g.message_dist[eta] * g.question_dist[eta][other];
                total += weight * s.success_probability(eta, other)?;
            }
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub strategy: String,
    pub n: usize,
    pub exact_win_prob: f64,
    pub empirical_win_rate: Option<f64>,
    pub rounds: u64,
    pub wins: u64,
    pub seed: u64,
    /// Three binomial standard deviations at the exact probability.
    pub three_sigma: f64,
    pub within_three_sigma: bool,
}

/// Outcome distribution for one ordered question; `None` when the decoder
/// produces a probability below `-NEGATIVITY_TOL`.
fn outcome_weights(s: &GameStrategy, eta: usize, other: usize) -> Result<Option<[f64; 2]>> {
    let d = s.decoder(eta, other)?;
    let w = &s.encoder[eta];
    let raw = [
        w.trace_product(&d.measurement.effects()[0]),
        w.trace_product(&d.measurement.effects()[1]),
    ];
    if raw.iter().any(|p| *p < -NEGATIVITY_TOL) {
        return Ok(None);
    }
    let clamped = raw.map(|p| p.clamp(0.0, 1.0));
    let sum = clamped[0] + clamped[1];
    if sum <= 0.0 {
        return Ok(None);
    }
    Ok(Some(clamped.map(|p| p / sum)))
}

/// Monte-Carlo estimate of the win rate. Round `r` draws from its own
/// stream of `seed`, so results do not depend on evaluation order.
pub fn simulate(s: &GameStrategy, g: &GameSpec, rounds: u64, seed: u64) -> Result<GameResult> {
    if rounds == 0 {
        return Err(Error::InvalidConfig("rounds must be >= 1".into()));
    }
    let exact = exact_win_probability(s, g)?;
    let messages = WeightedIndex::new(&g.message_dist)
        .map_err(|e| Error::InvalidConfig(format!("message distribution: {e}")))?;
    let questions = g
        .question_dist
        .iter()
        .map(|q| WeightedIndex::new(q).map_err(|e| Error::InvalidConfig(format!("question distribution: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut table = vec![vec![None; g.n]; g.n];
    for (eta, row) in table.iter_mut().enumerate() {
        for (other, cell) in row.iter_mut().enumerate() {
            if other != eta {
                *cell = Some(outcome_weights(s, eta, other)?);
            }
        }
    }

    let mut wins = 0u64;
    for r in 0..rounds {
        let mut rng = sampling::rng(seed, r);
        let eta = messages.sample(&mut rng);
        let other = questions[eta].sample(&mut rng);
        let probs = table[eta][other]
            .flatten()
            .ok_or_else(|| Error::InvalidMeasurement(format!("negative outcome probability for question ({eta}, {other})")))?;
        let outcome = usize::from(rand::Rng::gen::<f64>(&mut rng) >= probs[0]);
        if s.decoder(eta, other)?.answers[outcome] == eta {
            wins += 1;
        }
    }
    let rate = wins as f64 / rounds as f64;
    let three_sigma = 3.0 * (exact * (1.0 - exact) / rounds as f64).sqrt();
    Ok(GameResult {
        strategy: s.name.clone(),
        n: g.n,
        exact_win_prob: exact,
        empirical_win_rate: Some(rate),
        rounds,
        wins,
        seed,
        three_sigma,
        within_three_sigma: (rate - exact).abs() <= three_sigma + 1e-12,
    })
}

/// The eight two-qubit states with the rotated parity decoders.
pub fn builtin_sepbar8() -> GameStrategy {
    let family = catalog::s8();
    let labels: Vec<StateLabel8> = family.iter().map(|(l, _)| *l).collect();
    let encoder: Vec<HermitianOperator> = family.into_iter().map(|(_, w)| w).collect();
    let mut s = GameStrategy::new("sepbar8", Theory::SepBar, encoder);
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            let m = catalog::table1_measurement(labels[a], labels[b]).expect("distinct labels");
            let report = verify_pair(&s.encoder[a], &s.encoder[b], &m, DISTINGUISH_TOL).expect("two effects");
            // outcome_permutation[state] = effect, inverted into effect -> message.
            let perm = report.outcome_permutation.expect("always assigned");
            let mut answers = [a, b];
            answers[perm[0]] = a;
            answers[perm[1]] = b;
            s.set_decoder(a, b, PairDecoder { measurement: m, answers })
                .expect("valid pair");
        }
    }
    s
}

fn coin_flip(shape: &SystemShape) -> Measurement {
    let half = HermitianOperator::identity(shape.clone()).scale(0.5);
    Measurement::new("coin", vec![half.clone(), half]).expect("halves of the identity")
}

/// Projective decoder `{W, 1 - W}` for a pure encoded state `W`.
fn projective_decoder(w: &HermitianOperator, label: String) -> Result<Measurement> {
    let rest = HermitianOperator::identity(w.shape().clone()).sub(w)?;
    Measurement::new(label, vec![w.clone(), rest])
}

/// Message `k` goes to Bell state `k mod 4`. Distinct states are told apart
/// by projecting onto the first; colliding pairs are guessed.
pub fn builtin_quantum_baseline(n: usize) -> Result<GameStrategy> {
    if !(2..=8).contains(&n) {
        return Err(Error::Unsupported(format!(
            "quantum baseline is defined for 2 <= n <= 8, got {n}"
        )));
    }
    let bells: Vec<Bell> = (0..n).map(|k| Bell::ALL[k % 4]).collect();
    let encoder = bells.iter().map(|b| bell_state(*b)).collect();
    let mut s = GameStrategy::new("quantum-baseline", Theory::Quantum, encoder);
    let shape = SystemShape::qubits(2);
    for a in 0..n {
        for b in a + 1..n {
            let measurement = if bells[a] == bells[b] {
                coin_flip(&shape)
            } else {
                projective_decoder(&s.encoder[a], format!("proj[{a}]"))?
            };
            s.set_decoder(a, b, PairDecoder { measurement, answers: [a, b] })?;
        }
    }
    Ok(s)
}

/// One classical bit for two messages.
pub fn builtin_classical_bit() -> GameStrategy {
    let shape = SystemShape::new(vec![2]).expect("one bit");
    let zero = HermitianOperator::basis_projector(shape.clone(), 0);
    let one = HermitianOperator::basis_projector(shape, 1);
    let m = Measurement::new("bit", vec![zero.clone(), one.clone()]).expect("basis projectors");
    let mut s = GameStrategy::new("classical-bit", Theory::Classical, vec![zero, one]);
    s.set_decoder(0, 1, PairDecoder { measurement: m, answers: [0, 1] })
        .expect("valid pair");
    s
}
