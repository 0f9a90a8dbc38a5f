use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::index_set::IndexSet;
use crate::scalar::{ParseScalarError, Scalar};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FormError {
    #[error("form has {found} coefficients, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("coefficient {index} = {value} is not positive")]
    NonPositive { index: usize, value: String },
    #[error(transparent)]
    Parse(#[from] ParseScalarError),
}

/// An invariant symmetric form `Σ z_i π*_{m_i} Q` with `z_i > 0` on its
/// support. Used both for the prescribed tensor `T` and for metrics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalForm {
    coeffs: Vec<Scalar>,
    #[serde(skip)]
    support: IndexSet,
}

impl DiagonalForm {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self, FormError> {
        let support = IndexSet::full(coeffs.len());
        Self::restricted(coeffs, support)
    }

    /// A form that only needs to be positive on `support`; the remaining
    /// coefficients are carried along but ignored.
    pub fn restricted(coeffs: Vec<Scalar>, support: IndexSet) -> Result<Self, FormError> {
        for i in support.iter() {
            let Some(v) = coeffs.get(i) else {
                return Err(FormError::LengthMismatch {
                    expected: support.upper_bound(),
                    found: coeffs.len(),
                });
            };
            if !(v.is_positive() && v.is_finite()) {
                return Err(FormError::NonPositive {
                    index: i + 1,
                    value: v.to_string(),
                });
            }
        }
        Ok(DiagonalForm { coeffs, support })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self, FormError> {
        Self::new(values.iter().map(|&v| Scalar::float(v)).collect())
    }

    /// Parses a comma-separated list such as `1,1,0.1` or `1/2,3`.
    pub fn parse(list: &str, force_exact: bool) -> Result<Self, FormError> {
        let coeffs = list
            .split(',')
            .map(|tok| Scalar::parse(tok, force_exact))
            .collect::<Result<Vec<_>, _>>()?;
        let uniform = if coeffs.iter().all(Scalar::is_exact) {
            coeffs
        } else {
            coeffs.iter().map(Scalar::to_float).collect()
        };
        Self::new(uniform)
    }

    /// Errors unless the form has exactly `s` coefficients.
    pub fn expect_len(self, s: usize) -> Result<Self, FormError> {
        if self.coeffs.len() != s {
            return Err(FormError::LengthMismatch {
                expected: s,
                found: self.coeffs.len(),
            });
        }
        Ok(self)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn support(&self) -> IndexSet {
        self.support
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Scalar::to_f64).collect()
    }

    pub fn scaled(&self, factor: &Scalar) -> DiagonalForm {
        DiagonalForm {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            support: self.support,
        }
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists() {
        let t = DiagonalForm::parse("1,1,1", false).unwrap();
        assert!(t.coeffs().iter().all(Scalar::is_exact));
        let t = DiagonalForm::parse("1, 1/2, 0.1", false).unwrap();
        assert!(t.coeffs().iter().all(|c| !c.is_exact()));
        let t = DiagonalForm::parse("1,1,0.1", true).unwrap();
        assert_eq!(t.coeffs()[2], Scalar::ratio(1, 10));
        assert_eq!(t.to_string(), "1,1,1/10");
        assert!(matches!(
            DiagonalForm::parse("1,0,2", false),
            Err(FormError::NonPositive { index: 2, .. })
        ));
        assert!(matches!(DiagonalForm::parse("1,x", false), Err(FormError::Parse(_))));
        assert!(DiagonalForm::parse("1,2", false).unwrap().expect_len(3).is_err());
    }

    #[test]
    fn restricted_support_ignores_outside() {
        let f = DiagonalForm::restricted(
            vec![Scalar::one(), Scalar::zero(), Scalar::int(2)],
            IndexSet::from_indices([0, 2]),
        )
        .unwrap();
        assert_eq!(f.support().len(), 2);
        let scaled = f.scaled(&Scalar::int(3));
        assert_eq!(scaled.coeffs()[2], Scalar::int(6));
    }
}
