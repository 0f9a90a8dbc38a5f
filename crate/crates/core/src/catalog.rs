//! Closed-form model generators.
//!
//! `flag3` covers generalized flag manifolds `G/H` with three isotropy
//! summands whose second Betti number is one (for instance `G₂/U(2)`), in the
//! normalization `Q = −B`. `two_summand` builds a two-summand space in which
//! `h ⊕ m_1` is a subalgebra.

use thiserror::Error;

use crate::model::{ModelError, ModelInput, SpaceModel, Triple};
use crate::scalar::{ParseScalarError, Scalar};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CatalogError {
    #[error("dimensions must be positive")]
    ZeroDimension,
    #[error("[112] = {0} is negative for these dimensions")]
    NegativeTriple(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
    #[error("{name} has no closed form here; supply its structure constants in a model file")]
    Placeholder { name: &'static str },
    #[error(transparent)]
    Parse(#[from] ParseScalarError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Three-summand flag manifold with `b_i = 1` and
///
/// `[112] = (d1 d2 + 2 d1 d3 − d2 d3) / (d1 + 4 d2 + 9 d3)`,
/// `[123] = (d1 + d2) d3 / (d1 + 4 d2 + 9 d3)`,
///
/// all other canonical triples zero. `ζ` is derived from the Casimir identity.
pub fn flag3(d1: u32, d2: u32, d3: u32) -> Result<SpaceModel, CatalogError> {
    if d1 == 0 || d2 == 0 || d3 == 0 {
        return Err(CatalogError::ZeroDimension);
    }
    let (a, b, c) = (d1 as i64, d2 as i64, d3 as i64);
    let den = a + 4 * b + 9 * c;
    let t112 = Scalar::ratio(a * b + 2 * a * c - b * c, den);
    if t112.is_negative() {
        return Err(CatalogError::NegativeTriple(t112.to_string()));
    }
    let t123 = Scalar::ratio((a + b) * c, den);
    let model = SpaceModel::from_input(ModelInput {
        name: format!("flag3({d1},{d2},{d3})"),
        dims: vec![d1, d2, d3],
        casimir: None,
        killing: Some(vec![Scalar::one(); 3]),
        triples: vec![Triple::new(1, 1, 2, t112), Triple::new(1, 2, 3, t123)],
        pairwise_inequivalent: true,
    })?;
    Ok(model)
}

/// `G₂/U(2)`, the flag manifold with `d = (4, 2, 4)`.
pub fn g2u2() -> SpaceModel {
    let mut input = flag3(4, 2, 4).expect("valid dimensions").to_input();
    input.name = "G2/U(2)".into();
    SpaceModel::from_input(input).expect("valid model")
}

/// Parameters of a two-summand space with `h ⊕ m_1` a subalgebra, so
/// `[112] = 0` and `[122] > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSummandParams {
    pub d1: u32,
    pub d2: u32,
    pub zeta1: Scalar,
    pub zeta2: Scalar,
    pub t111: Scalar,
    pub t122: Scalar,
    pub t222: Scalar,
}

impl TwoSummandParams {
    /// Parses `d1,d2,ζ1,ζ2,[111],[122],[222]`.
    pub fn parse(list: &str, force_exact: bool) -> Result<Self, CatalogError> {
        let parts: Vec<&str> = list.split(',').map(str::trim).collect();
        if parts.len() != 7 {
            return Err(CatalogError::InvalidParameters(format!(
                "expected 7 comma-separated values d1,d2,zeta1,zeta2,t111,t122,t222, got {}",
                parts.len()
            )));
        }
        let dim = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| CatalogError::InvalidParameters(format!("`{s}` is not a dimension")))
        };
        let num = |s: &str| Scalar::parse(s, force_exact);
        Ok(TwoSummandParams {
            d1: dim(parts[0])?,
            d2: dim(parts[1])?,
            zeta1: num(parts[2])?,
            zeta2: num(parts[3])?,
            t111: num(parts[4])?,
            t122: num(parts[5])?,
            t222: num(parts[6])?,
        })
    }
}

/// Builds the two-summand model, deriving `b` from the Casimir identity:
/// `d1 b1 = 2 d1 ζ1 + [111] + [122]` and `d2 b2 = 2 d2 ζ2 + [222] + 2[122]`.
pub fn two_summand(p: &TwoSummandParams) -> Result<SpaceModel, CatalogError> {
    if p.d1 == 0 || p.d2 == 0 {
        return Err(CatalogError::ZeroDimension);
    }
    let bad = |msg: &str| Err(CatalogError::InvalidParameters(msg.to_string()));
    if !p.t122.is_positive() {
        return bad("[122] must be positive, otherwise h ⊕ m_2 is a subalgebra as well");
    }
    for (d, zeta, t, i) in [(p.d1, &p.zeta1, &p.t111, 1), (p.d2, &p.zeta2, &p.t222, 2)] {
        if d == 1 && !t.is_zero() {
            return Err(CatalogError::InvalidParameters(format!(
                "[{i}{i}{i}] must vanish for a one-dimensional summand"
            )));
        }
        if zeta.is_zero() && d != 1 {
            return Err(CatalogError::InvalidParameters(format!(
                "zeta{i} = 0 forces d{i} = 1 for an irreducible summand"
            )));
        }
    }
    let model = SpaceModel::from_input(ModelInput {
        name: format!(
            "twosum({},{},{},{},{},{},{})",
            p.d1, p.d2, p.zeta1, p.zeta2, p.t111, p.t122, p.t222
        ),
        dims: vec![p.d1, p.d2],
        casimir: Some(vec![p.zeta1.clone(), p.zeta2.clone()]),
        killing: None,
        triples: vec![
            Triple::new(1, 1, 1, p.t111.clone()),
            Triple::new(1, 2, 2, p.t122.clone()),
            Triple::new(2, 2, 2, p.t222.clone()),
        ]
        .into_iter()
        .filter(|t| !t.value.is_zero())
        .collect(),
        pairwise_inequivalent: true,
    })?;
    Ok(model)
}

/// A space known to admit a solution for every `T`, listed by name only:
/// its structure constants are not generated here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Placeholder {
    pub name: &'static str,
    pub note: &'static str,
}

pub const PLACEHOLDERS: &[Placeholder] = &[
    Placeholder {
        name: "SO(2k)/SU(k)",
        note: "k odd; m_1 is the one-dimensional centre direction",
    },
    Placeholder {
        name: "SU(k+l)/SU(k)xSU(l)",
        note: "k ≠ l; m_1 is the one-dimensional centre direction",
    },
    Placeholder {
        name: "Sp(k)/SU(k)",
        note: "m_1 is the one-dimensional centre direction",
    },
    Placeholder {
        name: "E7/E6",
        note: "m_1 is the one-dimensional centre direction",
    },
];

/// Resolves a catalog alias: `g2u2`, `flag3:d1,d2,d3` or
/// `twosum:d1,d2,zeta1,zeta2,t111,t122,t222`. Returns `None` when `name` is
/// not an alias (it is then treated as a file path).
pub fn resolve(name: &str, force_exact: bool) -> Option<Result<SpaceModel, CatalogError>> {
    if name == "g2u2" {
        return Some(Ok(g2u2()));
    }
    if let Some(rest) = name.strip_prefix("flag3:") {
        return Some(parse_flag3(rest).and_then(|(a, b, c)| flag3(a, b, c)));
    }
    if let Some(rest) = name.strip_prefix("twosum:") {
        return Some(TwoSummandParams::parse(rest, force_exact).and_then(|p| two_summand(&p)));
    }
    if let Some(p) = PLACEHOLDERS.iter().find(|p| p.name == name) {
        return Some(Err(CatalogError::Placeholder { name: p.name }));
    }
    None
}

pub fn parse_flag3(list: &str) -> Result<(u32, u32, u32), CatalogError> {
    let dims: Vec<u32> = list
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| CatalogError::InvalidParameters(format!("`{list}` is not a list of dimensions")))?;
    match dims[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err(CatalogError::InvalidParameters(format!(
            "flag3 needs three dimensions, got {}",
            dims.len()
        ))),
    }
}
