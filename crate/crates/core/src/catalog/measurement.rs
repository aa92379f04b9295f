use serde::{Deserialize, Serialize};

use crate::cones::{SeparableDecomposition, SeparableTerm};
use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, UnitaryOperator};

/// Completeness and effect-range tolerance.
pub const MEASUREMENT_TOL: f64 = 1e-10;

/// A finite list of effects summing to the identity, optionally carrying a
/// separable certificate for each effect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    label: String,
    effects: Vec<HermitianOperator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificates: Option<Vec<SeparableDecomposition>>,
}

impl Measurement {
    pub fn new(label: impl Into<String>, effects: Vec<HermitianOperator>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("no effects".into()))?;
        let shape = first.shape().clone();
        let mut sum = HermitianOperator::zeros(shape.clone());
        for e in &effects {
            if e.shape() != &shape {
                return Err(Error::InvalidMeasurement(format!(
                    "effect shape {} differs from {}",
                    e.shape(),
                    shape
                )));
            }
            let spec = e.eig();
            let (hi, lo) = (spec.values[0], *spec.values.last().expect("non-empty"));
            if lo < -MEASUREMENT_TOL || hi > 1.0 + MEASUREMENT_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "effect spectrum [{lo:e}, {hi:e}] leaves [0, 1]"
                )));
            }
            sum = sum.add(e)?;
        }
        let defect = sum.max_abs_diff(&HermitianOperator::identity(shape))?;
        if defect > MEASUREMENT_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "effects sum to identity only within {defect:e}"
            )));
        }
        Ok(Self {
            label: label.into(),
            effects,
            certificates: None,
        })
    }

    /// Attaches one separable certificate per effect.
    pub fn with_certificates(mut self, certificates: Vec<SeparableDecomposition>) -> Result<Self> {
        if certificates.len() != self.effects.len() {
            return Err(Error::CountMismatch(format!(
                "{} certificates for {} effects",
                certificates.len(),
                self.effects.len()
            )));
        }
        self.certificates = Some(certificates);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn certificates(&self) -> Option<&[SeparableDecomposition]> {
        self.certificates.as_deref()
    }

    /// True iff a certificate is attached and each one reproduces its effect.
    pub fn verify_certificates(&self) -> bool {
        match &self.certificates {
            None => false,
            Some(certs) => certs
                .iter()
                .zip(&self.effects)
                .all(|(cert, e)| cert.verify(e).unwrap_or(false)),
        }
    }

    /// Conjugates every effect by `U_1 (x) U_2 (x) ...`, rotating the
    /// certificates factor by factor.
    pub fn locally_rotated(&self, label: impl Into<String>, locals: &[UnitaryOperator]) -> Result<Self> {
        let (first, rest) = locals
            .split_first()
            .ok_or_else(|| Error::InvalidMeasurement("no local unitaries".into()))?;
        let global = rest.iter().fold(first.clone(), |acc, u| acc.tensor(u));
        let effects = self
            .effects
            .iter()
            .map(|e| e.conjugated(&global))
            .collect::<Result<Vec<_>>>()?;
        let certificates = match &self.certificates {
            None => None,
            Some(certs) => Some(
                certs
                    .iter()
                    .map(|cert| rotate_certificate(cert, locals))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(Self {
            label: label.into(),
            effects,
            certificates,
        })
    }
}

fn rotate_certificate(cert: &SeparableDecomposition, locals: &[UnitaryOperator]) -> Result<SeparableDecomposition> {
    let terms = cert
        .terms
        .iter()
        .map(|t| {
            if t.factors.len() != locals.len() {
                return Err(Error::CountMismatch(format!(
                    "{} factors for {} local unitaries",
                    t.factors.len(),
                    locals.len()
                )));
            }
            let factors = t
                .factors
                .iter()
                .zip(locals)
                .map(|(f, u)| f.conjugated(u))
                .collect::<Result<Vec<_>>>()?;
            Ok(SeparableTerm {
                weight: t.weight,
                factors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeparableDecomposition::new(terms))
}
