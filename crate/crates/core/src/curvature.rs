//! Scalar curvature, the modified functional `Ŝ`, and the Ricci tensor of
//! diagonal metrics `g = Σ x_i π*_{m_i} Q`.
//!
//! Coefficient vectors are passed as slices of length `s` indexed by summand;
//! entries outside the index set an operation works on are ignored. All
//! functions here are pure and run in `f64`.

use serde::Serialize;
use thiserror::Error;

use crate::index_set::IndexSet;
use crate::model::{SpaceModel, SubalgebraLattice};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CurvatureError {
    #[error("coefficient vector has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index {index} is outside 1..={s}")]
    IndexOutOfRange { index: usize, s: usize },
    #[error("coefficient {index} = {value} is not positive")]
    NonPositive { index: usize, value: f64 },
    #[error("index set is empty")]
    EmptySet,
    #[error("{inner} is not contained in {outer}")]
    NotNested { inner: IndexSet, outer: IndexSet },
    #[error("{0} is not a subalgebra")]
    NotSubalgebra(IndexSet),
}

fn check_set(model: &SpaceModel, set: IndexSet) -> Result<(), CurvatureError> {
    let s = model.s();
    if set.upper_bound() > s {
        return Err(CurvatureError::IndexOutOfRange {
            index: set.upper_bound(),
            s,
        });
    }
    Ok(())
}

fn check_coeffs(model: &SpaceModel, set: IndexSet, x: &[f64]) -> Result<(), CurvatureError> {
    check_set(model, set)?;
    if x.len() != model.s() {
        return Err(CurvatureError::LengthMismatch {
            expected: model.s(),
            found: x.len(),
        });
    }
    for i in set.iter() {
        if !(x[i] > 0.0 && x[i].is_finite()) {
            return Err(CurvatureError::NonPositive {
                index: i + 1,
                value: x[i],
            });
        }
    }
    Ok(())
}

fn killing_term(model: &SpaceModel, set: IndexSet, x: &[f64]) -> f64 {
    set.iter()
        .map(|i| model.dim(i) as f64 * model.killing()[i].to_f64() / x[i])
        .sum::<f64>()
        / 2.0
}

/// `Σ_{i,j,k∈J} [ijk] x_k / (x_i x_j)`.
fn bracket_term(model: &SpaceModel, set: IndexSet, x: &[f64]) -> f64 {
    model
        .nonzero_triples()
        .iter()
        .filter(|&&(i, j, k, _)| set.contains(i) && set.contains(j) && set.contains(k))
        .map(|&(i, j, k, v)| v * x[k] / (x[i] * x[j]))
        .sum()
}

/// Scalar curvature of the metric `Σ_{i∈J} x_i π*_{m_i} Q` on `⊕_{i∈J} m_i`:
/// `S = ½ Σ d_i b_i / x_i − ¼ Σ [ijk] x_k / (x_i x_j)`, all indices in `J`.
pub fn scalar_curvature(model: &SpaceModel, set: IndexSet, x: &[f64]) -> Result<f64, CurvatureError> {
    check_coeffs(model, set, x)?;
    Ok(killing_term(model, set, x) - bracket_term(model, set, x) / 4.0)
}

/// `Ŝ` on `k ⊖ h = ⊕_{i∈K} m_i`: the scalar curvature minus half the
/// `QgQ`-norm of the bracket component landing in `j = g ⊖ k`.
pub fn hat_scalar_curvature(
    model: &SpaceModel,
    k_set: IndexSet,
    x: &[f64],
) -> Result<f64, CurvatureError> {
    check_coeffs(model, k_set, x)?;
    let outside = k_set.complement(model.s());
    let mut leak = 0.0;
    for i in k_set.iter() {
        let mut row = 0.0;
        for j in outside.iter() {
            for k in outside.iter() {
                row += model.triple_f64(i, j, k);
            }
        }
        leak += row / x[i];
    }
    Ok(killing_term(model, k_set, x) - leak / 2.0 - bracket_term(model, k_set, x) / 4.0)
}

/// Scalar curvature and Ricci eigenvalues relative to `Q` in one pass.
pub(crate) fn scalar_and_ricci(model: &SpaceModel, x: &[f64]) -> (f64, Vec<f64>) {
    let s = model.s();
    let mut ricci: Vec<f64> = (0..s).map(|i| model.killing()[i].to_f64() / 2.0).collect();
    let mut bracket = 0.0;
    for &(i, j, k, v) in model.nonzero_triples() {
        let t = v * x[k] / (x[i] * x[j]);
        bracket += t;
        // ∂/∂x_k of x_k/(x_i x_j) and ∂/∂x_i of the same, folded into r.
        ricci[k] += v * x[k] * x[k] / (4.0 * model.dim(k) as f64 * x[i] * x[j]);
        ricci[i] -= v * x[k] / (2.0 * model.dim(i) as f64 * x[j]);
    }
    let full = IndexSet::full(s);
    (killing_term(model, full, x) - bracket / 4.0, ricci)
}

/// Ricci tensor of a diagonal metric, `Ric g = Σ r_i π*_{m_i} Q`, with
/// `r_i = −(x_i² / d_i) ∂S/∂x_i`.
pub fn ricci(model: &SpaceModel, x: &[f64]) -> Result<Vec<f64>, CurvatureError> {
    check_coeffs(model, model.full_set(), x)?;
    Ok(scalar_and_ricci(model, x).1)
}

/// Analytic gradient of `S` in the metric coefficients.
pub fn scalar_gradient(model: &SpaceModel, x: &[f64]) -> Result<Vec<f64>, CurvatureError> {
    let r = ricci(model, x)?;
    Ok(r.iter()
        .enumerate()
        .map(|(i, r)| -(model.dim(i) as f64) * r / (x[i] * x[i]))
        .collect())
}

/// `Σ_{i∈J} d_i z_i / x_i`, the trace of `T` with respect to `g` on `J`.
pub fn trace_with_respect_to(model: &SpaceModel, set: IndexSet, z: &[f64], x: &[f64]) -> f64 {
    set.iter().map(|i| model.dim(i) as f64 * z[i] / x[i]).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormStats {
    pub lambda_min: Scalar,
    pub lambda_max: Scalar,
    pub trace: Scalar,
}

/// Extremal eigenvalues and `Q`-trace of `Σ z_i π*_{m_i} Q` restricted to
/// `⊕_{i∈J} m_i`.
pub fn form_stats(model: &SpaceModel, z: &[Scalar], set: IndexSet) -> Result<FormStats, CurvatureError> {
    check_set(model, set)?;
    if z.len() != model.s() {
        return Err(CurvatureError::LengthMismatch {
            expected: model.s(),
            found: z.len(),
        });
    }
    let mut members = set.iter();
    let first = members.next().ok_or(CurvatureError::EmptySet)?;
    let mut lambda_min = z[first].clone();
    let mut lambda_max = z[first].clone();
    for i in members {
        lambda_min = lambda_min.min(&z[i]).clone();
        lambda_max = lambda_max.max(&z[i]).clone();
    }
    let trace = set
        .iter()
        .map(|i| Scalar::int(model.dim(i) as i64) * &z[i])
        .sum();
    Ok(FormStats {
        lambda_min,
        lambda_max,
        trace,
    })
}

/// A model together with a subalgebra `k ⊇ h` and optionally a smaller
/// subalgebra `k′` with `h ⊂ k′ ⊊ k`. Exposes the derived index sets
/// `J_j = J_g \ J_k`, `J_j′ = J_g \ J_k′`, `J_l = J_k \ J_k′` and
/// `J_n = J_k′`.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureContext<'a> {
    model: &'a SpaceModel,
    k: IndexSet,
    kprime: Option<IndexSet>,
}

impl<'a> CurvatureContext<'a> {
    pub fn new(model: &'a SpaceModel) -> Self {
        CurvatureContext {
            model,
            k: model.full_set(),
            kprime: None,
        }
    }

    pub fn for_subalgebra(
        model: &'a SpaceModel,
        lattice: &SubalgebraLattice,
        k: IndexSet,
    ) -> Result<Self, CurvatureError> {
        check_set(model, k)?;
        if !lattice.contains(k) {
            return Err(CurvatureError::NotSubalgebra(k));
        }
        Ok(CurvatureContext {
            model,
            k,
            kprime: None,
        })
    }

    pub fn for_pair(
        model: &'a SpaceModel,
        lattice: &SubalgebraLattice,
        k: IndexSet,
        kprime: IndexSet,
    ) -> Result<Self, CurvatureError> {
        let mut ctx = Self::for_subalgebra(model, lattice, k)?;
        if !lattice.contains(kprime) {
            return Err(CurvatureError::NotSubalgebra(kprime));
        }
        if !kprime.is_proper_subset(k) {
            return Err(CurvatureError::NotNested {
                inner: kprime,
                outer: k,
            });
        }
        ctx.kprime = Some(kprime);
        Ok(ctx)
    }

    pub fn model(&self) -> &'a SpaceModel {
        self.model
    }

    pub fn k(&self) -> IndexSet {
        self.k
    }

    pub fn kprime(&self) -> IndexSet {
        self.kprime.unwrap_or(IndexSet::EMPTY)
    }

    pub fn j(&self) -> IndexSet {
        self.k.complement(self.model.s())
    }

    pub fn jprime(&self) -> IndexSet {
        self.kprime().complement(self.model.s())
    }

    pub fn l(&self) -> IndexSet {
        self.k.difference(self.kprime())
    }

    pub fn n(&self) -> IndexSet {
        self.kprime()
    }

    pub fn scalar(&self, x: &[f64]) -> Result<f64, CurvatureError> {
        scalar_curvature(self.model, self.k, x)
    }

    pub fn hat(&self, x: &[f64]) -> Result<f64, CurvatureError> {
        hat_scalar_curvature(self.model, self.k, x)
    }

    /// `Ŝ` relative to `k′` of the restriction `g|_n`.
    pub fn hat_on_n(&self, x: &[f64]) -> Result<f64, CurvatureError> {
        hat_scalar_curvature(self.model, self.n(), x)
    }

    /// `S(g|_l)`.
    pub fn scalar_on_l(&self, x: &[f64]) -> Result<f64, CurvatureError> {
        scalar_curvature(self.model, self.l(), x)
    }

    /// `ψ = tr_Q T|_{k⊖h} = Σ_{i∈J_k} d_i z_i`; the metric `ψ Q` lies in
    /// `M_T(k)`.
    pub fn psi(&self, z: &[f64]) -> f64 {
        self.k.iter().map(|i| self.model.dim(i) as f64 * z[i]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_subalgebras, ModelInput, Triple};

    fn g2u2() -> SpaceModel {
        SpaceModel::from_input(ModelInput {
            name: "G2/U(2)".into(),
            dims: vec![4, 2, 4],
            casimir: None,
            killing: Some(vec![Scalar::one(); 3]),
            triples: vec![
                Triple::new(1, 1, 2, Scalar::ratio(2, 3)),
                Triple::new(1, 2, 3, Scalar::ratio(1, 2)),
            ],
            pairwise_inequivalent: true,
        })
        .unwrap()
    }

    fn symmetric() -> SpaceModel {
        SpaceModel::from_input(ModelInput {
            name: "irreducible".into(),
            dims: vec![3],
            casimir: None,
            killing: Some(vec![Scalar::one()]),
            triples: vec![],
            pairwise_inequivalent: true,
        })
        .unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn single_summand_values() {
        let m = symmetric();
        let full = m.full_set();
        assert_eq!(scalar_curvature(&m, full, &[1.0]).unwrap(), 1.5);
        assert_eq!(scalar_curvature(&m, full, &[3.0]).unwrap(), 0.5);
        assert_eq!(scalar_gradient(&m, &[1.0]).unwrap(), vec![-1.5]);
        for x in [0.3, 1.0, 7.5] {
            assert_eq!(ricci(&m, &[x]).unwrap(), vec![0.5]);
        }
    }

    #[test]
    fn g2u2_golden_values() {
        let m = g2u2();
        let one = [1.0; 3];
        assert!(close(scalar_curvature(&m, m.full_set(), &one).unwrap(), 15.0 / 4.0, 1e-15));
        let r = ricci(&m, &one).unwrap();
        let expected = [17.0 / 48.0, 7.0 / 24.0, 7.0 / 16.0];
        for (a, b) in r.iter().zip(expected) {
            assert!(close(*a, b, 1e-15));
        }
        let g = scalar_gradient(&m, &one).unwrap();
        let expected = [-4.0 * 17.0 / 48.0, -2.0 * 7.0 / 24.0, -4.0 * 7.0 / 16.0];
        for (a, b) in g.iter().zip(expected) {
            assert!(close(*a, b, 1e-15));
        }
        let hat = hat_scalar_curvature(&m, IndexSet::singleton(1), &one).unwrap();
        assert!(close(hat, 1.0 / 6.0, 1e-15));
    }

    #[test]
    fn hat_equals_scalar_on_full_set() {
        let m = g2u2();
        let x = [0.7, 1.9, 3.1];
        let full = m.full_set();
        assert_eq!(
            hat_scalar_curvature(&m, full, &x).unwrap(),
            scalar_curvature(&m, full, &x).unwrap()
        );
    }

    #[test]
    fn homogeneity_and_scale_invariance() {
        let m = g2u2();
        let x = [0.7, 1.9, 3.1];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let full = m.full_set();
        let s1 = scalar_curvature(&m, full, &x).unwrap();
        let s2 = scalar_curvature(&m, full, &x2).unwrap();
        assert!(close(s2, s1 / 2.0, 1e-14));
        let r1 = ricci(&m, &x).unwrap();
        let x3: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let r3 = ricci(&m, &x3).unwrap();
        for (a, b) in r1.iter().zip(&r3) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn rejects_bad_coefficients() {
        let m = g2u2();
        let full = m.full_set();
        assert_eq!(
            scalar_curvature(&m, full, &[1.0, 0.0, 1.0]),
            Err(CurvatureError::NonPositive { index: 2, value: 0.0 })
        );
        assert!(matches!(
            scalar_curvature(&m, full, &[1.0, 1.0]),
            Err(CurvatureError::LengthMismatch { .. })
        ));
        assert!(matches!(
            scalar_curvature(&m, IndexSet::singleton(3), &[1.0; 3]),
            Err(CurvatureError::IndexOutOfRange { .. })
        ));
        // Entries outside the set are ignored.
        assert!(scalar_curvature(&m, IndexSet::singleton(0), &[1.0, -1.0, 0.0]).is_ok());
        assert!(ricci(&m, &[1.0, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn form_stats_examples() {
        let m = g2u2();
        let z = [Scalar::int(1), Scalar::int(2), Scalar::int(3)];
        let stats = form_stats(&m, &z, IndexSet::from_indices([0, 2])).unwrap();
        assert_eq!(stats.lambda_min, Scalar::int(1));
        assert_eq!(stats.lambda_max, Scalar::int(3));
        assert_eq!(stats.trace, Scalar::int(16));
        let c = [Scalar::ratio(5, 2), Scalar::ratio(5, 2), Scalar::ratio(5, 2)];
        let stats = form_stats(&m, &c, m.full_set()).unwrap();
        assert_eq!(stats.lambda_min, Scalar::ratio(5, 2));
        assert_eq!(stats.lambda_max, Scalar::ratio(5, 2));
        assert_eq!(stats.trace, Scalar::int(25));
        let q = [Scalar::one(), Scalar::one(), Scalar::one()];
        let stats = form_stats(&m, &q, IndexSet::from_indices([0, 2])).unwrap();
        assert_eq!(stats.trace, Scalar::int(8));
        assert_eq!(form_stats(&m, &q, IndexSet::EMPTY), Err(CurvatureError::EmptySet));
    }

    #[test]
    fn context_rejects_non_subalgebras() {
        let m = g2u2();
        let lattice = enumerate_subalgebras(&m).unwrap();
        assert!(CurvatureContext::for_subalgebra(&m, &lattice, IndexSet::singleton(0)).is_err());
        let ctx =
            CurvatureContext::for_pair(&m, &lattice, m.full_set(), IndexSet::singleton(2)).unwrap();
        assert_eq!(ctx.l(), IndexSet::from_indices([0, 1]));
        assert_eq!(ctx.jprime(), IndexSet::from_indices([0, 1]));
        assert_eq!(ctx.j(), IndexSet::EMPTY);
        assert!(matches!(
            CurvatureContext::for_pair(&m, &lattice, IndexSet::singleton(1), IndexSet::singleton(2)),
            Err(CurvatureError::NotNested { .. })
        ));
    }

    #[test]
    fn sup_point_is_nonnegative_on_g2u2() {
        let m = g2u2();
        let lattice = enumerate_subalgebras(&m).unwrap();
        let z = [0.3, 2.0, 0.9];
        for &k in lattice.members().iter().filter(|k| !k.is_empty()) {
            let ctx = CurvatureContext::for_subalgebra(&m, &lattice, k).unwrap();
            let psi = ctx.psi(&z);
            assert!(ctx.hat(&[psi; 3]).unwrap() >= 0.0);
        }
    }
}
