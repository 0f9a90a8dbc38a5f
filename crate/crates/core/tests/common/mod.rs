//! Independent oracles and random model generators shared by the
//! integration tests. Nothing here calls the library's curvature or chain
//! formulas; quantities are recomputed from the raw triple list.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use prc_core::model::{ModelInput, Triple};
use prc_core::Scalar;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Raw data in 0-based form with exact values.
#[derive(Clone, Debug)]
pub struct RawModel {
    pub dims: Vec<u32>,
    pub zeta: Vec<BigRational>,
    pub killing: Vec<BigRational>,
    /// Canonical `(i ≤ j ≤ k, value)`, 0-based, values positive.
    pub triples: Vec<(usize, usize, usize, BigRational)>,
}

impl RawModel {
    pub fn s(&self) -> usize {
        self.dims.len()
    }

    /// Full symmetric tensor `[ijk]` built by expanding every permutation.
    pub fn tensor(&self) -> Vec<Vec<Vec<BigRational>>> {
        let s = self.s();
        let mut t = vec![vec![vec![BigRational::zero(); s]; s]; s];
        for (i, j, k, v) in &self.triples {
            for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                t[*a][*b][*c] = v.clone();
            }
        }
        t
    }

    pub fn tensor_f64(&self) -> Vec<Vec<Vec<f64>>> {
        self.tensor()
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|v| v.to_f64().unwrap()).collect()).collect())
            .collect()
    }

    fn input_with(&self, f: impl Fn(&BigRational) -> Scalar, casimir: bool, killing: bool) -> ModelInput {
        ModelInput {
            name: "random".into(),
            dims: self.dims.clone(),
            casimir: casimir.then(|| self.zeta.iter().map(&f).collect()),
            killing: killing.then(|| self.killing.iter().map(&f).collect()),
            triples: self
                .triples
                .iter()
                .map(|(i, j, k, v)| Triple::new(i + 1, j + 1, k + 1, f(v)))
                .collect(),
            pairwise_inequivalent: true,
        }
    }

    /// Exact input carrying both `ζ` and `b`.
    pub fn exact_input(&self) -> ModelInput {
        self.input_with(|v| Scalar::Exact(v.clone()), true, true)
    }

    /// Float input carrying both `ζ` and `b`.
    pub fn float_input(&self) -> ModelInput {
        self.input_with(|v| Scalar::float(v.to_f64().unwrap()), true, true)
    }

    /// Exact input with only `ζ`, leaving `b` to be derived.
    pub fn casimir_only_input(&self) -> ModelInput {
        self.input_with(|v| Scalar::Exact(v.clone()), true, false)
    }
}

/// `b_i = 2 ζ_i + Σ_{j,k}[ijk] / d_i`, straight from the Casimir identity.
pub fn killing_from_casimir(dims: &[u32], zeta: &[BigRational], tensor: &[Vec<Vec<BigRational>>]) -> Vec<BigRational> {
    (0..dims.len())
        .map(|i| {
            let d = BigRational::from_integer(dims[i].into());
            let mut sum = BigRational::zero();
            for row in &tensor[i] {
                for v in row {
                    sum += v;
                }
            }
            q(2, 1) * &zeta[i] + sum / d
        })
        .collect()
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    q(rng.gen_range(1..=12), rng.gen_range(1..=12))
}

/// A random Casimir-consistent model with `1 ≤ s ≤ max_s`.
///
/// Respects the structure any actual homogeneous space has: a
/// one-dimensional summand brackets trivially with itself, `ζ_i = 0` only
/// for a one-dimensional summand (at most one such), and a summand on which
/// `H` acts trivially only has nonzero `[ijj]`.
pub fn random_model(rng: &mut ChaCha8Rng, max_s: usize) -> RawModel {
    loop {
        let s = rng.gen_range(1..=max_s);
        let dims: Vec<u32> = (0..s).map(|_| rng.gen_range(1..=6)).collect();
        if dims.iter().sum::<u32>() < 3 {
            continue;
        }
        let mut trivial = None;
        let zeta: Vec<BigRational> = (0..s)
            .map(|i| {
                if dims[i] == 1 && trivial.is_none() && rng.gen_bool(0.4) {
                    trivial = Some(i);
                    BigRational::zero()
                } else {
                    small_rational(rng)
                }
            })
            .collect();
        let density = rng.gen_range(0.2..0.8);
        let mut triples = Vec::new();
        for i in 0..s {
            for j in i..s {
                for k in j..s {
                    let idx = [i, j, k];
                    let repeated_line = (0..s).any(|a| dims[a] == 1 && idx.iter().filter(|&&x| x == a).count() >= 2);
                    let bad_trivial = match trivial {
                        Some(t) if idx.contains(&t) => {
                            let others: Vec<usize> = idx.iter().cloned().filter(|&x| x != t).collect();
                            others.len() != 2 || others[0] != others[1]
                        }
                        _ => false,
                    };
                    if repeated_line || bad_trivial || !rng.gen_bool(density) {
                        continue;
                    }
                    triples.push((i, j, k, small_rational(rng)));
                }
            }
        }
        let mut raw = RawModel {
            dims,
            zeta,
            killing: Vec::new(),
            triples,
        };
        let tensor = raw.tensor();
        raw.killing = killing_from_casimir(&raw.dims, &raw.zeta, &tensor);
        return raw;
    }
}

/// Closure by definition: `J` is closed iff no `[ijk] > 0` with `j, k ∈ J`
/// and `i ∉ J`.
pub fn closed_by_definition(raw: &RawModel, set: u32) -> bool {
    let t = raw.tensor();
    let s = raw.s();
    let inside = |i: usize| set & (1 << i) != 0;
    for i in 0..s {
        for j in 0..s {
            for k in 0..s {
                if !inside(i) && inside(j) && inside(k) && !t[i][j][k].is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// All closed subsets, as bit masks.
pub fn lattice_by_definition(raw: &RawModel) -> Vec<u32> {
    (0u32..(1 << raw.s())).filter(|&m| closed_by_definition(raw, m)).collect()
}

/// Pairs `(K, K′)` of lattice members with `∅ ≠ K′ ⊊ K` and nothing in the
/// lattice strictly between, checked by exhaustive search.
pub fn chains_by_betweenness(members: &[u32]) -> Vec<(u32, u32)> {
    let sub = |a: u32, b: u32| a & !b == 0 && a != b;
    let mut out = Vec::new();
    for &k in members {
        for &kp in members {
            if kp == 0 || !sub(kp, k) {
                continue;
            }
            if !members.iter().any(|&m| sub(kp, m) && sub(m, k)) {
                out.push((k, kp));
            }
        }
    }
    out.sort();
    out
}

/// `S = ½ Σ d_i b_i / x_i − ¼ Σ [ijk] x_k / (x_i x_j)` over indices in `set`,
/// by brute-force summation over all ordered triples.
pub fn scalar_by_summation(raw: &RawModel, set: u32, x: &[f64]) -> f64 {
    let t = raw.tensor_f64();
    let s = raw.s();
    let inside = |i: usize| set & (1 << i) != 0;
    let mut first = 0.0;
    let mut second = 0.0;
    for i in (0..s).filter(|&i| inside(i)) {
        first += raw.dims[i] as f64 * raw.killing[i].to_f64().unwrap() / x[i];
        for j in (0..s).filter(|&j| inside(j)) {
            for k in (0..s).filter(|&k| inside(k)) {
                second += t[i][j][k] * x[k] / (x[i] * x[j]);
            }
        }
    }
    first / 2.0 - second / 4.0
}

/// Central differences with absolute step `h`.
pub fn finite_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[i] += h;
            minus[i] -= h;
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

/// Threshold `d_2 η` for `z_1/z_2` on a two-summand space with `h ⊕ m_1`
/// a subalgebra: `d_2 (4 d_1 ζ_1 + [111]) / (d_1 (4 d_2 ζ_2 + [222] + 4[122]))`.
pub fn two_summand_threshold(
    d1: u32,
    d2: u32,
    zeta1: &BigRational,
    zeta2: &BigRational,
    t111: &BigRational,
    t122: &BigRational,
    t222: &BigRational,
) -> BigRational {
    let d1 = BigRational::from_integer(d1.into());
    let d2 = BigRational::from_integer(d2.into());
    let four = q(4, 1);
    let num = &d2 * (&four * &d1 * zeta1 + t111);
    let den = &d1 * (&four * &d2 * zeta2 + t222 + &four * t122);
    num / den
}

pub fn random_positive(rng: &mut ChaCha8Rng, s: usize) -> Vec<f64> {
    (0..s).map(|_| rng.gen_range(0.2..5.0)).collect()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}
