//! Simple chains `g ⊇ k ⊋ k′ ⊋ h`, their obstruction numbers `η(k, k′)` and
//! the sufficient conditions for solvability of `Ric g = cT` built on them.
//!
//! Subalgebras containing `h` are identified with index sets (see
//! [`crate::model::enumerate_subalgebras`]); `k′` is maximal in `k` when no
//! lattice member lies strictly between them.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::curvature::form_stats;
use crate::form::DiagonalForm;
use crate::index_set::IndexSet;
use crate::model::{
    check_hypothesis, classify_cor_all, enumerate_subalgebras, Arithmetic, HypothesisVerdict,
    ModelError, SpaceModel, SubalgebraLattice, Verdict,
};
use crate::scalar::Scalar;

/// Margins at or below this count as failures in float arithmetic.
pub const MARGIN_EPSILON: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ChainError {
    #[error("η({k}, {kprime}) has a vanishing denominator; the model violates requirement 2 of the hypothesis")]
    ZeroDenominator { k: IndexSet, kprime: IndexSet },
    #[error("({k}, {kprime}) is not a valid pair: need ∅ ≠ k′ ⊊ k")]
    InvalidPair { k: IndexSet, kprime: IndexSet },
    #[error("hypothesis violated: summand {summand} commutes with the subalgebra {subalgebra}")]
    HypothesisViolated { subalgebra: IndexSet, summand: usize },
    #[error("T has {found} coefficients, expected {expected}")]
    FormLength { expected: usize, found: usize },
    #[error("the two-summand condition needs s = 2, got s = {s}")]
    NotTwoSummands { s: usize },
}

fn as_decimal<S: Serializer>(v: &Scalar, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_f64(v.to_f64())
}

/// `η(k, k′)` with its parts. `numerator` and `denominator` are reported
/// with the sign that makes them non-negative; `omega = min_{j∈J_k′} d_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eta {
    pub value: Scalar,
    pub numerator: Scalar,
    pub denominator: Scalar,
    pub omega: u32,
}

fn validate_pair(model: &SpaceModel, k: IndexSet, kprime: IndexSet) -> Result<(), ChainError> {
    if kprime.is_empty() || !kprime.is_proper_subset(k) || k.upper_bound() > model.s() {
        return Err(ChainError::InvalidPair { k, kprime });
    }
    Ok(())
}

fn omega(model: &SpaceModel, kprime: IndexSet) -> u32 {
    kprime.iter().map(|j| model.dim(j)).min().unwrap_or(0)
}

fn weighted_killing_trace(model: &SpaceModel, set: IndexSet) -> Scalar {
    set.iter()
        .map(|j| Scalar::int(model.dim(j) as i64) * &model.killing()[j])
        .sum::<Scalar>()
}

/// `η` from its defining expression in traces of the Killing form and
/// bracket norms:
///
/// `(2 tr_Q B|_n + 2⟨n j′ j′⟩ + ⟨nnn⟩) / (ω(n) (2 tr_Q B|_l + ⟨lll⟩ + 2⟨l j j⟩))`
///
/// with `tr_Q B|_u = −Σ_{j∈J_u} d_j b_j`.
pub fn eta_from_killing(model: &SpaceModel, k: IndexSet, kprime: IndexSet) -> Result<Eta, ChainError> {
    validate_pair(model, k, kprime)?;
    let s = model.s();
    let n = kprime;
    let l = k.difference(kprime);
    let j = k.complement(s);
    let jprime = kprime.complement(s);
    let two = Scalar::int(2);
    let om = omega(model, kprime);

    let trace_n = -weighted_killing_trace(model, n);
    let trace_l = -weighted_killing_trace(model, l);
    let num = &two * &trace_n + &two * model.bracket(n, jprime, jprime) + model.bracket(n, n, n);
    let den = Scalar::int(om as i64)
        * (&two * &trace_l + model.bracket(l, l, l) + &two * model.bracket(l, j, j));

    // The zero test uses the ζ-form, whose denominator is a sum of
    // non-negative terms and therefore vanishes exactly.
    let zeta_form = eta_from_casimir(model, k, kprime)?;
    let value = model.coerce(&(&num / &den));
    Ok(Eta {
        value,
        numerator: -num,
        denominator: -den,
        omega: zeta_form.omega,
    })
}

/// `η` rewritten through the Casimir identity:
///
/// `Σ_{j∈J_k′}(4 d_j ζ_j + Σ_{k,l∈J_k′}[jkl])` over
/// `ω(n) Σ_{j∈J_l}(4 d_j ζ_j + Σ_{k,l∈J_l}[jkl] + 4 Σ_{k∈J_k′} Σ_{l∈J_l}[jkl])`.
pub fn eta_from_casimir(model: &SpaceModel, k: IndexSet, kprime: IndexSet) -> Result<Eta, ChainError> {
    validate_pair(model, k, kprime)?;
    let l = k.difference(kprime);
    let four = Scalar::int(4);
    let om = omega(model, kprime);
    let casimir_part = |j: usize| four.clone() * Scalar::int(model.dim(j) as i64) * &model.casimir()[j];

    let num: Scalar = kprime
        .iter()
        .map(|j| casimir_part(j) + model.bracket(IndexSet::singleton(j), kprime, kprime))
        .sum();
    let den_sum: Scalar = l
        .iter()
        .map(|j| {
            let single = IndexSet::singleton(j);
            casimir_part(j) + model.bracket(single, l, l) + &four * model.bracket(single, kprime, l)
        })
        .sum();
    let den = Scalar::int(om as i64) * den_sum;
    if den.is_zero() {
        return Err(ChainError::ZeroDenominator { k, kprime });
    }
    Ok(Eta {
        value: model.coerce(&(&num / &den)),
        numerator: num,
        denominator: den,
        omega: om,
    })
}

/// `η(k, k′)`, evaluated from the defining expression.
pub fn eta(model: &SpaceModel, k: IndexSet, kprime: IndexSet) -> Result<Eta, ChainError> {
    eta_from_killing(model, k, kprime)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimpleChain {
    pub k: IndexSet,
    pub kprime: IndexSet,
    pub eta: Eta,
    #[serde(skip)]
    s: usize,
}

impl SimpleChain {
    pub fn new(model: &SpaceModel, k: IndexSet, kprime: IndexSet) -> Result<Self, ChainError> {
        Ok(SimpleChain {
            k,
            kprime,
            eta: eta(model, k, kprime)?,
            s: model.s(),
        })
    }

    /// `J_l = J_k \ J_k′`.
    pub fn l(&self) -> IndexSet {
        self.k.difference(self.kprime)
    }

    /// `J_j = J_g \ J_k`.
    pub fn j(&self) -> IndexSet {
        self.k.complement(self.s)
    }

    /// `J_j′ = J_g \ J_k′`.
    pub fn jprime(&self) -> IndexSet {
        self.kprime.complement(self.s)
    }

    /// `J_n = J_k′`.
    pub fn n(&self) -> IndexSet {
        self.kprime
    }
}

/// All `(J_k, J_k′)` with `∅ ≠ J_k′ ⊊ J_k`, both in the lattice and nothing
/// in the lattice strictly between. Ordered by `J_k` from the largest down,
/// then by `J_k′`.
pub fn simple_chain_pairs(lattice: &SubalgebraLattice) -> Vec<(IndexSet, IndexSet)> {
    let members = lattice.members();
    let mut pairs = Vec::new();
    for &k in members.iter().rev() {
        for &kprime in members {
            if kprime.is_empty() || !kprime.is_proper_subset(k) {
                continue;
            }
            let between = members
                .iter()
                .any(|&m| kprime.is_proper_subset(m) && m.is_proper_subset(k));
            if !between {
                pairs.push((k, kprime));
            }
        }
    }
    pairs
}

pub fn enumerate_simple_chains(
    model: &SpaceModel,
    lattice: &SubalgebraLattice,
) -> Result<Vec<SimpleChain>, ChainError> {
    simple_chain_pairs(lattice)
        .into_iter()
        .map(|(k, kprime)| SimpleChain::new(model, k, kprime))
        .collect()
}

/// Everything the condition checks need, computed once per model.
#[derive(Clone, Debug)]
pub struct Analysis {
    model: SpaceModel,
    lattice: SubalgebraLattice,
    hypothesis: HypothesisVerdict,
    chains: Result<Vec<SimpleChain>, ChainError>,
    cor_all: bool,
}

impl Analysis {
    pub fn new(model: SpaceModel) -> Result<Analysis, ModelError> {
        let lattice = enumerate_subalgebras(&model)?;
        let hypothesis = check_hypothesis(&model, &lattice);
        let chains = match hypothesis.verdict() {
            Verdict::Violated {
                subalgebra,
                summand,
            } => Err(ChainError::HypothesisViolated {
                subalgebra,
                summand,
            }),
            _ => enumerate_simple_chains(&model, &lattice),
        };
        let cor_all = classify_cor_all(&model, &lattice);
        Ok(Analysis {
            model,
            lattice,
            hypothesis,
            chains,
            cor_all,
        })
    }

    pub fn model(&self) -> &SpaceModel {
        &self.model
    }

    pub fn lattice(&self) -> &SubalgebraLattice {
        &self.lattice
    }

    pub fn hypothesis(&self) -> &HypothesisVerdict {
        &self.hypothesis
    }

    pub fn chains(&self) -> Result<&[SimpleChain], ChainError> {
        self.chains.as_deref().map_err(Clone::clone)
    }

    /// Whether the model has the structure under which every `T` admits a
    /// solution (one trivial one-dimensional summand spanning the only
    /// intermediate subalgebra).
    pub fn solvable_for_every_t(&self) -> bool {
        self.cor_all
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// `λ₋(T|_n) / tr_Q T|_l > η(k, k′)`.
    Theorem,
    /// `λ₋(T|_n) / λ₊(T|_l) > η(k, k′) dim l`.
    CorollaryLambda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    /// The sufficient condition holds: a maximizer of `S` on `M_T` exists.
    Exists,
    /// The condition fails but is only known to be sufficient.
    Inconclusive,
    /// Two inequivalent summands: the condition is also necessary.
    Nonexistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainCheck {
    pub k: IndexSet,
    pub kprime: IndexSet,
    pub lambda_min: Scalar,
    /// `tr_Q T|_l` for the theorem, `λ₊(T|_l)` for the corollary.
    pub scale: Scalar,
    pub eta: Scalar,
    /// Right-hand side: `η` or `η · dim l`.
    pub threshold: Scalar,
    /// Left-hand side: `λ₋ / scale`.
    pub ratio: Scalar,
    #[serde(serialize_with = "as_decimal")]
    pub margin: Scalar,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    pub chains: Vec<ChainCheck>,
    pub pass: bool,
    /// Index into `chains` of the first failing chain.
    pub first_failure: Option<usize>,
    pub hypothesis: Verdict,
    /// Set when requirement 1 of the hypothesis could not be confirmed.
    pub caveat: bool,
    pub conclusion: Conclusion,
}

fn margin_positive(margin: &Scalar) -> bool {
    match margin {
        Scalar::Exact(_) => margin.is_positive(),
        Scalar::Float(m) => *m > MARGIN_EPSILON,
    }
}

fn check_form(model: &SpaceModel, t: &DiagonalForm) -> Result<(), ChainError> {
    if t.len() != model.s() {
        return Err(ChainError::FormLength {
            expected: model.s(),
            found: t.len(),
        });
    }
    Ok(())
}

fn run_check(analysis: &Analysis, t: &DiagonalForm, kind: ConditionKind) -> Result<ConditionReport, ChainError> {
    let model = analysis.model();
    check_form(model, t)?;
    let chains = analysis.chains()?;
    let z: Vec<Scalar> = match model.arithmetic() {
        Arithmetic::Exact => t.coeffs().to_vec(),
        Arithmetic::Float => t.coeffs().iter().map(Scalar::to_float).collect(),
    };
    let mut checks = Vec::with_capacity(chains.len());
    for chain in chains {
        let n_stats = form_stats(model, &z, chain.n()).expect("k′ is non-empty");
        let l_stats = form_stats(model, &z, chain.l()).expect("l is non-empty");
        let (scale, threshold) = match kind {
            ConditionKind::Theorem => (l_stats.trace, chain.eta.value.clone()),
            ConditionKind::CorollaryLambda => (
                l_stats.lambda_max,
                &chain.eta.value * Scalar::int(model.dim_of(chain.l()) as i64),
            ),
        };
        let ratio = &n_stats.lambda_min / &scale;
        let margin = &ratio - &threshold;
        checks.push(ChainCheck {
            k: chain.k,
            kprime: chain.kprime,
            lambda_min: n_stats.lambda_min,
            scale,
            eta: chain.eta.value.clone(),
            threshold,
            ratio,
            pass: margin_positive(&margin),
            margin,
        });
    }
    let first_failure = checks.iter().position(|c| !c.pass);
    let pass = first_failure.is_none();
    let conclusion = if pass {
        Conclusion::Exists
    } else if kind == ConditionKind::Theorem
        && model.s() == 2
        && model.pairwise_inequivalent()
        && checks.len() == 1
    {
        Conclusion::Nonexistent
    } else {
        Conclusion::Inconclusive
    };
    let hypothesis = analysis.hypothesis().verdict();
    Ok(ConditionReport {
        kind,
        chains: checks,
        pass,
        first_failure,
        caveat: hypothesis == Verdict::Unknown,
        hypothesis,
        conclusion,
    })
}

/// Evaluates `λ₋(T|_n) / tr_Q T|_l > η(k, k′)` on every simple chain. With
/// no simple chains (`h` maximal) the check passes.
pub fn check_theorem(analysis: &Analysis, t: &DiagonalForm) -> Result<ConditionReport, ChainError> {
    run_check(analysis, t, ConditionKind::Theorem)
}

/// Evaluates the alternative `λ₋(T|_n) / λ₊(T|_l) > η(k, k′) dim l`, which
/// implies the theorem's condition since `tr_Q T|_l ≤ λ₊(T|_l) dim l`.
pub fn check_corollary_lambda(analysis: &Analysis, t: &DiagonalForm) -> Result<ConditionReport, ChainError> {
    run_check(analysis, t, ConditionKind::CorollaryLambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoSummandCase {
    /// Exactly one of `h ⊕ m_1`, `h ⊕ m_2` is a subalgebra; the condition is
    /// necessary and sufficient.
    OneSubalgebra,
    /// `h` is maximal: every `T` is solvable.
    Maximal,
    /// Both are subalgebras. The Ricci tensor is the same for all metrics,
    /// so `T` is solvable iff it is proportional to it.
    BothSubalgebras,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoSummandReport {
    pub case: TwoSummandCase,
    /// 1-based index `a` of the summand with `h ⊕ m_a` a subalgebra.
    pub subalgebra: Option<usize>,
    pub eta: Option<Scalar>,
    /// `d_b η`, compared against `z_a / z_b`.
    pub threshold: Option<Scalar>,
    pub ratio: Option<Scalar>,
    pub pass: bool,
}

/// Existence test for two inequivalent summands: with `h ⊕ m_a` the only
/// intermediate subalgebra and `b` the other index, `Ric g = cT` is
/// solvable iff `z_a / z_b > d_b η(g, h ⊕ m_a)`.
pub fn two_summand_condition(analysis: &Analysis, t: &DiagonalForm) -> Result<TwoSummandReport, ChainError> {
    let model = analysis.model();
    if model.s() != 2 {
        return Err(ChainError::NotTwoSummands { s: model.s() });
    }
    check_form(model, t)?;
    let z: Vec<Scalar> = t.coeffs().iter().map(|v| model.coerce(v)).collect();
    let lattice = analysis.lattice();
    let closed = [
        lattice.contains(IndexSet::singleton(0)),
        lattice.contains(IndexSet::singleton(1)),
    ];
    match closed {
        [false, false] => Ok(TwoSummandReport {
            case: TwoSummandCase::Maximal,
            subalgebra: None,
            eta: None,
            threshold: None,
            ratio: None,
            pass: true,
        }),
        [true, true] => {
            // Only [111] and [222] can be nonzero; r_i = b_i/2 − [iii]/(4 d_i).
            let r: Vec<Scalar> = (0..2)
                .map(|i| {
                    let d = Scalar::int(model.dim(i) as i64);
                    &model.killing()[i] / Scalar::int(2) - model.triple(i, i, i) / (Scalar::int(4) * d)
                })
                .collect();
            let cross = &z[0] * &r[1] - &z[1] * &r[0];
            let proportional = match &cross {
                Scalar::Exact(_) => cross.is_zero(),
                Scalar::Float(c) => c.abs() <= MARGIN_EPSILON * (1.0 + r[0].to_f64().abs() + r[1].to_f64().abs()),
            };
            Ok(TwoSummandReport {
                case: TwoSummandCase::BothSubalgebras,
                subalgebra: None,
                eta: None,
                threshold: None,
                ratio: Some(&z[0] / &z[1]),
                pass: proportional && r[0].is_positive(),
            })
        }
        [a_closed, _] => {
            let (a, b) = if a_closed { (0, 1) } else { (1, 0) };
            let eta = eta(model, model.full_set(), IndexSet::singleton(a))?.value;
            let threshold = Scalar::int(model.dim(b) as i64) * &eta;
            let ratio = &z[a] / &z[b];
            let pass = margin_positive(&(&ratio - &threshold));
            Ok(TwoSummandReport {
                case: TwoSummandCase::OneSubalgebra,
                subalgebra: Some(a + 1),
                eta: Some(eta),
                threshold: Some(threshold),
                ratio: Some(ratio),
                pass,
            })
        }
    }
}
