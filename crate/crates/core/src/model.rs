//! Combinatorial description of a homogeneous space `G/H`.
//!
//! A [`SpaceModel`] is what remains of `G/H` once a `Q`-orthogonal
//! decomposition `m = m_1 ⊕ … ⊕ m_s` into irreducible, pairwise inequivalent
//! summands is fixed: the dimensions `d_i`, the Casimir eigenvalues `ζ_i`,
//! the Killing-form coefficients `b_i` and the structure constants `[ijk]`.
//! Models are built from a [`ModelInput`] through [`validate`], after which
//! they are immutable.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::index_set::{IndexSet, MAX_SUMMANDS};
use crate::scalar::Scalar;

/// Absolute tolerance on the Casimir identity for float input.
pub const CASIMIR_TOLERANCE: f64 = 1e-9;

/// A structure constant `[ijk]` with 1-based indices `i ≤ j ≤ k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Scalar,
}

impl Triple {
    pub fn new(i: usize, j: usize, k: usize, value: Scalar) -> Self {
        Triple { i, j, k, value }
    }
}

/// Unvalidated model data, as read from a file or produced by the catalog.
#[derive(Clone, Debug, Default)]
pub struct ModelInput {
    pub name: String,
    pub dims: Vec<u32>,
    pub casimir: Option<Vec<Scalar>>,
    pub killing: Option<Vec<Scalar>>,
    pub triples: Vec<Triple>,
    pub pairwise_inequivalent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Float,
}

/// Which of `ζ`/`b` was filled in from the Casimir identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivedField {
    Casimir,
    Killing,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Violation {
    #[error("model has no summands")]
    NoSummands,
    #[error("model has {s} summands; at most {MAX_SUMMANDS} are supported")]
    TooManySummands { s: usize },
    #[error("dims[{index}] is zero")]
    ZeroDimension { index: usize },
    #[error("total dimension {total} is below 3")]
    DimensionTooSmall { total: u64 },
    #[error("{field} has {found} entries, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("neither casimir nor killing values were supplied")]
    MissingCasimirAndKilling,
    #[error("triple [{i}{j}{k}] refers to a summand outside 1..={s}")]
    TripleIndexOutOfRange { i: usize, j: usize, k: usize, s: usize },
    #[error("triple [{i}{j}{k}] is not in canonical order i <= j <= k")]
    NonCanonicalTriple { i: usize, j: usize, k: usize },
    #[error("triple [{i}{j}{k}] is listed more than once")]
    DuplicateTriple { i: usize, j: usize, k: usize },
    #[error("triple [{i}{j}{k}] = {value} is negative")]
    NegativeTriple {
        i: usize,
        j: usize,
        k: usize,
        value: String,
    },
    #[error("{field}[{index}] = {value} is not a finite number")]
    NonFinite {
        field: &'static str,
        index: usize,
        value: String,
    },
    #[error("casimir[{index}] = {value} is negative")]
    NegativeCasimir { index: usize, value: String },
    #[error("killing[{index}] = {value} is negative")]
    NegativeKilling { index: usize, value: String },
    #[error("derived casimir[{index}] = {value} is negative")]
    DerivedCasimirNegative { index: usize, value: String },
    #[error("Casimir identity fails at summand {index}: residual {residual}")]
    CasimirResidual { index: usize, residual: String },
}

/// Outcome of [`validate`]. `model` is present exactly when `violations`
/// is empty.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub model: Option<SpaceModel>,
    pub violations: Vec<Violation>,
    pub derived: Option<DerivedField>,
    pub arithmetic: Arithmetic,
    /// Largest `|d_i b_i - 2 d_i ζ_i - Σ_{j,k}[ijk]|` when both were given.
    pub max_casimir_residual: Option<Scalar>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<SpaceModel, ModelError> {
        match self.model {
            Some(model) => Ok(model),
            None => Err(ModelError::Invalid(self.violations)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("model has {s} summands; subalgebra enumeration is capped at {MAX_SUMMANDS}")]
    TooManySummands { s: usize },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// A validated homogeneous-space model. Indices are 0-based internally.
#[derive(Clone, Debug)]
pub struct SpaceModel {
    name: String,
    dims: Vec<u32>,
    casimir: Vec<Scalar>,
    killing: Vec<Scalar>,
    canonical: Vec<Triple>,
    tensor: Vec<Scalar>,
    tensor_f64: Vec<f64>,
    nonzero: Vec<(usize, usize, usize, f64)>,
    triple_sums: Vec<Scalar>,
    pairwise_inequivalent: bool,
    arithmetic: Arithmetic,
}

impl SpaceModel {
    pub fn from_input(input: ModelInput) -> Result<SpaceModel, ModelError> {
        validate(input, CASIMIR_TOLERANCE).into_result()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of irreducible summands.
    pub fn s(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> u32 {
        self.dims[i]
    }

    /// `n = Σ d_i`.
    pub fn total_dim(&self) -> u64 {
        self.dims.iter().map(|&d| d as u64).sum()
    }

    /// `Σ_{i∈J} d_i`.
    pub fn dim_of(&self, set: IndexSet) -> u64 {
        set.iter().map(|i| self.dims[i] as u64).sum()
    }

    pub fn casimir(&self) -> &[Scalar] {
        &self.casimir
    }

    pub fn killing(&self) -> &[Scalar] {
        &self.killing
    }

    pub fn pairwise_inequivalent(&self) -> bool {
        self.pairwise_inequivalent
    }

    pub fn arithmetic(&self) -> Arithmetic {
        self.arithmetic
    }

    pub fn full_set(&self) -> IndexSet {
        IndexSet::full(self.s())
    }

    /// Nonzero structure constants with 1-based `i ≤ j ≤ k`, sorted.
    pub fn canonical_triples(&self) -> &[Triple] {
        &self.canonical
    }

    /// `[ijk]` for 0-based indices in any order.
    pub fn triple(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.tensor[self.offset(i, j, k)]
    }

    pub fn triple_f64(&self, i: usize, j: usize, k: usize) -> f64 {
        self.tensor_f64[self.offset(i, j, k)]
    }

    /// Ordered index triples `(i, j, k)` with `[ijk] ≠ 0`, all permutations
    /// included.
    pub fn nonzero_triples(&self) -> &[(usize, usize, usize, f64)] {
        &self.nonzero
    }

    /// `Σ_{j,k} [ijk]`.
    pub fn triple_sum(&self, i: usize) -> &Scalar {
        &self.triple_sums[i]
    }

    /// `⟨uvw⟩ = Σ_{i∈U, j∈V, k∈W} [ijk]`.
    pub fn bracket(&self, u: IndexSet, v: IndexSet, w: IndexSet) -> Scalar {
        let mut acc = self.coerce(&Scalar::zero());
        for i in u.iter() {
            for j in v.iter() {
                for k in w.iter() {
                    let t = self.triple(i, j, k);
                    if !t.is_zero() {
                        acc = acc + t;
                    }
                }
            }
        }
        acc
    }

    /// Converts any scalar to the model's arithmetic.
    pub fn coerce(&self, v: &Scalar) -> Scalar {
        match self.arithmetic {
            Arithmetic::Exact => v.clone(),
            Arithmetic::Float => v.to_float(),
        }
    }

    pub fn to_input(&self) -> ModelInput {
        ModelInput {
            name: self.name.clone(),
            dims: self.dims.clone(),
            casimir: Some(self.casimir.clone()),
            killing: Some(self.killing.clone()),
            triples: self.canonical.clone(),
            pairwise_inequivalent: self.pairwise_inequivalent,
        }
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        let s = self.s();
        (i * s + j) * s + k
    }
}

impl fmt::Display for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (s = {}, dims = {:?})", self.name, self.s(), self.dims)
    }
}

fn check_values(field: &'static str, values: &[Scalar], out: &mut Vec<Violation>) {
    for (index, v) in values.iter().enumerate() {
        if !v.is_finite() {
            out.push(Violation::NonFinite {
                field,
                index: index + 1,
                value: v.to_string(),
            });
        } else if v.is_negative() {
            let value = v.to_string();
            out.push(match field {
                "casimir" => Violation::NegativeCasimir {
                    index: index + 1,
                    value,
                },
                _ => Violation::NegativeKilling {
                    index: index + 1,
                    value,
                },
            });
        }
    }
}

/// Validates model data and, if exactly one of `ζ`/`b` is present, derives
/// the other from `d_i b_i = 2 d_i ζ_i + Σ_{j,k}[ijk]`.
///
/// Exact input is checked exactly; as soon as any value is a float the whole
/// model is converted to floats and the Casimir identity is checked to
/// `tolerance`.
pub fn validate(input: ModelInput, tolerance: f64) -> ValidationReport {
    let mut violations = Vec::new();
    let s = input.dims.len();

    let all_values = input
        .casimir
        .iter()
        .flatten()
        .chain(input.killing.iter().flatten())
        .chain(input.triples.iter().map(|t| &t.value));
    let arithmetic = if all_values.into_iter().all(Scalar::is_exact) {
        Arithmetic::Exact
    } else {
        Arithmetic::Float
    };
    let coerce = |v: &Scalar| match arithmetic {
        Arithmetic::Exact => v.clone(),
        Arithmetic::Float => v.to_float(),
    };
    let mut report = ValidationReport {
        model: None,
        violations: Vec::new(),
        derived: None,
        arithmetic,
        max_casimir_residual: None,
    };

    if s == 0 {
        violations.push(Violation::NoSummands);
    }
    if s > MAX_SUMMANDS {
        violations.push(Violation::TooManySummands { s });
    }
    for (index, &d) in input.dims.iter().enumerate() {
        if d == 0 {
            violations.push(Violation::ZeroDimension { index: index + 1 });
        }
    }
    let total: u64 = input.dims.iter().map(|&d| d as u64).sum();
    if s > 0 && total < 3 {
        violations.push(Violation::DimensionTooSmall { total });
    }
    for (field, values) in [("casimir", &input.casimir), ("killing", &input.killing)] {
        if let Some(values) = values {
            if values.len() != s {
                violations.push(Violation::LengthMismatch {
                    field,
                    expected: s,
                    found: values.len(),
                });
            }
            check_values(field, values, &mut violations);
        }
    }
    if input.casimir.is_none() && input.killing.is_none() {
        violations.push(Violation::MissingCasimirAndKilling);
    }

    let mut seen = std::collections::HashSet::new();
    for t in &input.triples {
        let (i, j, k) = (t.i, t.j, t.k);
        if [i, j, k].iter().any(|&x| x == 0 || x > s) {
            violations.push(Violation::TripleIndexOutOfRange { i, j, k, s });
            continue;
        }
        if !(i <= j && j <= k) {
            violations.push(Violation::NonCanonicalTriple { i, j, k });
            continue;
        }
        if !seen.insert((i, j, k)) {
            violations.push(Violation::DuplicateTriple { i, j, k });
        }
        if !t.value.is_finite() {
            violations.push(Violation::NonFinite {
                field: "triples",
                index: 0,
                value: t.value.to_string(),
            });
        } else if t.value.is_negative() {
            violations.push(Violation::NegativeTriple {
                i,
                j,
                k,
                value: t.value.to_string(),
            });
        }
    }

    if !violations.is_empty() {
        report.violations = violations;
        return report;
    }

    // Full symmetric tensor.
    let mut tensor = vec![coerce(&Scalar::zero()); s * s * s];
    let mut canonical = Vec::new();
    for t in &input.triples {
        let value = coerce(&t.value);
        if value.is_zero() {
            continue;
        }
        let (i, j, k) = (t.i - 1, t.j - 1, t.k - 1);
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            tensor[(a * s + b) * s + c] = value.clone();
        }
        canonical.push(Triple::new(t.i, t.j, t.k, value));
    }
    canonical.sort_by_key(|t| (t.i, t.j, t.k));

    let triple_sums: Vec<Scalar> = (0..s)
        .map(|i| {
            tensor[i * s * s..(i + 1) * s * s]
                .iter()
                .filter(|v| !v.is_zero())
                .sum()
        })
        .collect();

    let within = |residual: &Scalar| match residual {
        Scalar::Exact(_) => residual.is_zero(),
        Scalar::Float(r) => r.abs() <= tolerance,
    };

    let dims_s: Vec<Scalar> = input.dims.iter().map(|&d| Scalar::int(d as i64)).collect();
    let two = Scalar::int(2);
    let (casimir, killing) = match (input.casimir, input.killing) {
        (Some(zeta), Some(b)) => {
            let zeta: Vec<Scalar> = zeta.iter().map(coerce).collect();
            let b: Vec<Scalar> = b.iter().map(coerce).collect();
            let mut worst = coerce(&Scalar::zero());
            for i in 0..s {
                let residual = &dims_s[i] * &b[i] - &two * &dims_s[i] * &zeta[i] - &triple_sums[i];
                if !within(&residual) {
                    violations.push(Violation::CasimirResidual {
                        index: i + 1,
                        residual: residual.to_string(),
                    });
                }
                if residual.abs() > worst {
                    worst = residual.abs();
                }
            }
            report.max_casimir_residual = Some(worst);
            (zeta, b)
        }
        (Some(zeta), None) => {
            let zeta: Vec<Scalar> = zeta.iter().map(coerce).collect();
            let b = (0..s)
                .map(|i| (&two * &dims_s[i] * &zeta[i] + &triple_sums[i]) / &dims_s[i])
                .collect();
            report.derived = Some(DerivedField::Killing);
            (zeta, b)
        }
        (None, Some(b)) => {
            let b: Vec<Scalar> = b.iter().map(coerce).collect();
            let mut zeta = Vec::with_capacity(s);
            for i in 0..s {
                let mut z = (&dims_s[i] * &b[i] - &triple_sums[i]) / (&two * &dims_s[i]);
                if z.is_negative() {
                    if !z.is_exact() && z.to_f64() >= -tolerance {
                        z = Scalar::float(0.0);
                    } else {
                        violations.push(Violation::DerivedCasimirNegative {
                            index: i + 1,
                            value: z.to_string(),
                        });
                    }
                }
                zeta.push(z);
            }
            report.derived = Some(DerivedField::Casimir);
            (zeta, b)
        }
        (None, None) => unreachable!("checked above"),
    };

    if !violations.is_empty() {
        report.violations = violations;
        return report;
    }

    let tensor_f64: Vec<f64> = tensor.iter().map(Scalar::to_f64).collect();
    let mut nonzero = Vec::new();
    for i in 0..s {
        for j in 0..s {
            for k in 0..s {
                let v = tensor_f64[(i * s + j) * s + k];
                if v != 0.0 {
                    nonzero.push((i, j, k, v));
                }
            }
        }
    }

    report.model = Some(SpaceModel {
        name: input.name,
        dims: input.dims,
        casimir,
        killing,
        canonical,
        tensor,
        tensor_f64,
        nonzero,
        triple_sums,
        pairwise_inequivalent: input.pairwise_inequivalent,
        arithmetic,
    });
    report
}

/// All index sets `J` for which `h ⊕ ⊕_{j∈J} m_j` is closed under the
/// bracket, sorted by size and then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubalgebraLattice {
    s: usize,
    members: Vec<IndexSet>,
}

impl SubalgebraLattice {
    pub fn members(&self) -> &[IndexSet] {
        &self.members
    }

    pub fn contains(&self, set: IndexSet) -> bool {
        self.members.binary_search_by(|m| m.canonical_cmp(&set)).is_ok()
    }

    /// Members other than `∅` and the full set.
    pub fn proper_nontrivial(&self) -> impl Iterator<Item = IndexSet> + '_ {
        let full = IndexSet::full(self.s);
        self.members
            .iter()
            .copied()
            .filter(move |m| !m.is_empty() && *m != full)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Whether `J` is closed: `[ijk] = 0` whenever `i ∉ J` and `j, k ∈ J`.
pub fn is_closed(model: &SpaceModel, set: IndexSet) -> bool {
    let outside = set.complement(model.s());
    for i in outside.iter() {
        for j in set.iter() {
            for k in set.iter().filter(|&k| k >= j) {
                if !model.triple(i, j, k).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

pub fn enumerate_subalgebras(model: &SpaceModel) -> Result<SubalgebraLattice, ModelError> {
    let s = model.s();
    if s > MAX_SUMMANDS {
        return Err(ModelError::TooManySummands { s });
    }
    let mut members: Vec<IndexSet> = IndexSet::all_subsets(s)
        .filter(|&set| is_closed(model, set))
        .collect();
    members.sort_by(IndexSet::canonical_cmp);
    Ok(SubalgebraLattice { s, members })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Requirement1 {
    Satisfied,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated { subalgebra: IndexSet, summand: usize },
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisVerdict {
    pub requirement1: Requirement1,
    /// First `(J, j)` with `d_j = 1`, `j ∉ J` and `[m_j, h ⊕ m_J] = 0`;
    /// `j` is 0-based.
    #[serde(skip)]
    pub requirement2_violation: Option<(IndexSet, usize)>,
}

impl HypothesisVerdict {
    pub fn verdict(&self) -> Verdict {
        match (self.requirement2_violation, self.requirement1) {
            (Some((subalgebra, summand)), _) => Verdict::Violated {
                subalgebra,
                summand: summand + 1,
            },
            (None, Requirement1::Satisfied) => Verdict::Satisfied,
            (None, Requirement1::Unknown) => Verdict::Unknown,
        }
    }

    pub fn is_violated(&self) -> bool {
        self.requirement2_violation.is_some()
    }
}

/// Checks the two requirements on every subalgebra strictly containing `h`.
///
/// Requirement 2 is decided from the data: a one-dimensional summand `m_j`
/// outside `J` commutes with `h ⊕ m_J` iff `ζ_j = 0` and `[jkl] = 0` for all
/// `k ∈ J` and all `l`. Requirement 1 is only known through the
/// pairwise-inequivalence flag.
pub fn check_hypothesis(model: &SpaceModel, lattice: &SubalgebraLattice) -> HypothesisVerdict {
    let s = model.s();
    let mut violation = None;
    'outer: for set in lattice.members().iter().filter(|m| !m.is_empty()) {
        for j in set.complement(s).iter().filter(|&j| model.dim(j) == 1) {
            if model.casimir()[j].is_positive() {
                continue;
            }
            let commutes = set
                .iter()
                .all(|k| (0..s).all(|l| model.triple(j, k, l).is_zero()));
            if commutes {
                violation = Some((*set, j));
                break 'outer;
            }
        }
    }
    HypothesisVerdict {
        requirement1: if model.pairwise_inequivalent() {
            Requirement1::Satisfied
        } else {
            Requirement1::Unknown
        },
        requirement2_violation: violation,
    }
}

/// The structure of the corollary guaranteeing solvability for every `T`:
/// exactly one summand `m_i` has trivial isotropy action (so `d_i = 1`),
/// and `h ⊕ m_i` is the only proper subalgebra strictly containing `h`.
pub fn classify_cor_all(model: &SpaceModel, lattice: &SubalgebraLattice) -> bool {
    let trivial: Vec<usize> = (0..model.s())
        .filter(|&i| model.casimir()[i].is_zero())
        .collect();
    let [i] = trivial[..] else {
        return false;
    };
    if model.dim(i) != 1 {
        return false;
    }
    let proper: Vec<IndexSet> = lattice.proper_nontrivial().collect();
    proper == [IndexSet::singleton(i)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2u2_input() -> ModelInput {
        ModelInput {
            name: "G2/U(2)".into(),
            dims: vec![4, 2, 4],
            casimir: None,
            killing: Some(vec![Scalar::one(); 3]),
            triples: vec![
                Triple::new(1, 1, 2, Scalar::ratio(2, 3)),
                Triple::new(1, 2, 3, Scalar::ratio(1, 2)),
            ],
            pairwise_inequivalent: true,
        }
    }

    #[test]
    fn derives_casimir_for_single_summand() {
        let input = ModelInput {
            name: "sphere".into(),
            dims: vec![3],
            casimir: None,
            killing: Some(vec![Scalar::one()]),
            triples: vec![],
            pairwise_inequivalent: true,
        };
        let report = validate(input, CASIMIR_TOLERANCE);
        assert_eq!(report.derived, Some(DerivedField::Casimir));
        let model = report.into_result().unwrap();
        assert_eq!(model.casimir()[0], Scalar::ratio(1, 2));
    }

    #[test]
    fn derives_g2u2_casimir_values() {
        let model = SpaceModel::from_input(g2u2_input()).unwrap();
        assert_eq!(model.arithmetic(), Arithmetic::Exact);
        assert_eq!(
            model.casimir(),
            &[Scalar::ratio(5, 24), Scalar::ratio(1, 12), Scalar::ratio(3, 8)]
        );
        assert_eq!(model.triple_sum(0), &Scalar::ratio(7, 3));
        assert_eq!(model.triple_sum(1), &Scalar::ratio(5, 3));
        assert_eq!(model.triple_sum(2), &Scalar::one());
        assert_eq!(model.triple(2, 0, 1), &Scalar::ratio(1, 2));
        assert_eq!(model.triple(1, 0, 0), &Scalar::ratio(2, 3));
    }

    #[test]
    fn rejects_inconsistent_killing() {
        let mut input = g2u2_input();
        input.casimir = Some(vec![
            Scalar::ratio(5, 24),
            Scalar::ratio(1, 12),
            Scalar::ratio(3, 8),
        ]);
        input.killing = Some(vec![Scalar::int(1), Scalar::int(1), Scalar::int(2)]);
        let report = validate(input, CASIMIR_TOLERANCE);
        assert!(!report.is_valid());
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            report.violations[0],
            Violation::CasimirResidual { index: 3, .. }
        ));
    }

    #[test]
    fn float_tolerance_applies() {
        let mut input = g2u2_input();
        input.casimir = Some(vec![
            Scalar::float(5.0 / 24.0),
            Scalar::float(1.0 / 12.0),
            Scalar::float(3.0 / 8.0),
        ]);
        input.killing = Some(vec![Scalar::float(1.0 + 1e-12); 3]);
        let report = validate(input.clone(), CASIMIR_TOLERANCE);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.arithmetic, Arithmetic::Float);
        input.killing = Some(vec![Scalar::float(1.0 + 1e-9); 3]);
        // The residual d_i * 1e-9 exceeds 1e-9 on every summand.
        let report = validate(input, CASIMIR_TOLERANCE);
        assert_eq!(report.violations.len(), 3);
    }

    #[test]
    fn reports_every_structural_violation() {
        let input = ModelInput {
            name: "bad".into(),
            dims: vec![1, 1],
            casimir: Some(vec![Scalar::int(-1), Scalar::zero()]),
            killing: None,
            triples: vec![
                Triple::new(2, 1, 1, Scalar::one()),
                Triple::new(1, 1, 3, Scalar::one()),
                Triple::new(1, 2, 2, Scalar::int(-2)),
                Triple::new(1, 2, 2, Scalar::int(1)),
            ],
            pairwise_inequivalent: true,
        };
        let report = validate(input, CASIMIR_TOLERANCE);
        let v = &report.violations;
        assert!(v.contains(&Violation::DimensionTooSmall { total: 2 }));
        assert!(v.iter().any(|x| matches!(x, Violation::NegativeCasimir { index: 1, .. })));
        assert!(v.contains(&Violation::NonCanonicalTriple { i: 2, j: 1, k: 1 }));
        assert!(v.iter().any(|x| matches!(x, Violation::TripleIndexOutOfRange { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::NegativeTriple { .. })));
        assert!(v.contains(&Violation::DuplicateTriple { i: 1, j: 2, k: 2 }));
        assert!(report.model.is_none());
    }

    #[test]
    fn derived_negative_casimir_is_an_error() {
        let input = ModelInput {
            name: "neg".into(),
            dims: vec![2, 2],
            casimir: None,
            killing: Some(vec![Scalar::ratio(1, 10), Scalar::one()]),
            triples: vec![Triple::new(1, 2, 2, Scalar::one())],
            pairwise_inequivalent: true,
        };
        let report = validate(input, CASIMIR_TOLERANCE);
        assert!(matches!(
            report.violations[..],
            [Violation::DerivedCasimirNegative { index: 1, .. }]
        ));
    }

    #[test]
    fn missing_casimir_and_killing() {
        let input = ModelInput {
            name: "empty".into(),
            dims: vec![3],
            ..Default::default()
        };
        let report = validate(input, CASIMIR_TOLERANCE);
        assert_eq!(report.violations, vec![Violation::MissingCasimirAndKilling]);
    }

    #[test]
    fn g2u2_lattice() {
        let model = SpaceModel::from_input(g2u2_input()).unwrap();
        let lattice = enumerate_subalgebras(&model).unwrap();
        let listed: Vec<Vec<usize>> = lattice.members().iter().map(|m| m.to_one_based()).collect();
        assert_eq!(listed, vec![vec![], vec![2], vec![3], vec![1, 2, 3]]);
        assert!(!classify_cor_all(&model, &lattice));
        let verdict = check_hypothesis(&model, &lattice);
        assert_eq!(verdict.verdict(), Verdict::Satisfied);
    }

    #[test]
    fn vanishing_triples_give_boolean_lattice() {
        let input = ModelInput {
            name: "torus-like".into(),
            dims: vec![1, 2, 3],
            casimir: Some(vec![Scalar::zero(), Scalar::one(), Scalar::one()]),
            killing: None,
            triples: vec![],
            pairwise_inequivalent: true,
        };
        let model = SpaceModel::from_input(input).unwrap();
        assert_eq!(enumerate_subalgebras(&model).unwrap().len(), 8);
    }

    #[test]
    fn two_summand_lattice_follows_zero_pattern() {
        let input = ModelInput {
            name: "two".into(),
            dims: vec![2, 4],
            casimir: Some(vec![Scalar::ratio(1, 5), Scalar::ratio(3, 10)]),
            killing: None,
            triples: vec![Triple::new(1, 1, 2, Scalar::one())],
            pairwise_inequivalent: true,
        };
        let model = SpaceModel::from_input(input).unwrap();
        let lattice = enumerate_subalgebras(&model).unwrap();
        // [122] = 0 so {2} is closed; [112] > 0 so {1} is not.
        assert!(lattice.contains(IndexSet::singleton(1)));
        assert!(!lattice.contains(IndexSet::singleton(0)));
        assert_eq!(lattice.len(), 3);
    }

    #[test]
    fn hypothesis_requirement_two_violation() {
        // m_1 is one-dimensional, trivial and brackets to nothing.
        let input = ModelInput {
            name: "bad-hyp".into(),
            dims: vec![1, 3],
            casimir: Some(vec![Scalar::zero(), Scalar::one()]),
            killing: None,
            triples: vec![Triple::new(2, 2, 2, Scalar::one())],
            pairwise_inequivalent: true,
        };
        let model = SpaceModel::from_input(input).unwrap();
        let lattice = enumerate_subalgebras(&model).unwrap();
        let verdict = check_hypothesis(&model, &lattice);
        assert_eq!(
            verdict.verdict(),
            Verdict::Violated {
                subalgebra: IndexSet::singleton(1),
                summand: 1
            }
        );
    }

    #[test]
    fn inequivalence_flag_drives_requirement_one() {
        let mut input = g2u2_input();
        input.pairwise_inequivalent = false;
        let model = SpaceModel::from_input(input).unwrap();
        let lattice = enumerate_subalgebras(&model).unwrap();
        let verdict = check_hypothesis(&model, &lattice);
        assert_eq!(verdict.requirement1, Requirement1::Unknown);
        assert_eq!(verdict.verdict(), Verdict::Unknown);
    }

    #[test]
    fn corollary_structure_detection() {
        // ζ = (0, 3/10, 2/5), d = (1, 4, 4); {1} closed, nothing else proper.
        let input = ModelInput {
            name: "cor".into(),
            dims: vec![1, 4, 4],
            casimir: Some(vec![Scalar::zero(), Scalar::ratio(3, 10), Scalar::ratio(2, 5)]),
            killing: None,
            triples: vec![
                Triple::new(1, 2, 3, Scalar::one()),
                Triple::new(2, 2, 3, Scalar::one()),
                Triple::new(2, 3, 3, Scalar::one()),
            ],
            pairwise_inequivalent: true,
        };
        let model = SpaceModel::from_input(input).unwrap();
        let lattice = enumerate_subalgebras(&model).unwrap();
        let listed: Vec<Vec<usize>> = lattice.members().iter().map(|m| m.to_one_based()).collect();
        assert_eq!(listed, vec![vec![], vec![1], vec![1, 2, 3]]);
        assert!(classify_cor_all(&model, &lattice));

        let all_positive = ModelInput {
            name: "pos".into(),
            dims: vec![1, 4, 4],
            casimir: Some(vec![Scalar::ratio(1, 10), Scalar::ratio(3, 10), Scalar::ratio(2, 5)]),
            killing: None,
            triples: vec![
                Triple::new(1, 2, 3, Scalar::one()),
                Triple::new(2, 2, 3, Scalar::one()),
                Triple::new(2, 3, 3, Scalar::one()),
            ],
            pairwise_inequivalent: true,
        };
        let model = SpaceModel::from_input(all_positive).unwrap();
        let lattice = enumerate_subalgebras(&model).unwrap();
        assert!(!classify_cor_all(&model, &lattice));
    }
}
