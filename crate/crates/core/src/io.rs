//! JSON model files.
//!
//! ```json
//! {
//!   "name": "G2/U(2)",
//!   "s": 3,
//!   "dims": [4, 2, 4],
//!   "killing": [1, 1, 1],
//!   "triples": [
//!     [1, 1, 2, "2/3"],
//!     [1, 2, 3, "1/2"]
//!   ],
//!   "pairwise_inequivalent": true
//! }
//! ```
//!
//! Values are JSON numbers or `"p/q"` strings. Integers and rational strings
//! are exact; numbers with a fraction or exponent are floats unless exact
//! reading is forced, in which case they are read as the decimal they print
//! as. Triples are 1-based with `i ≤ j ≤ k`; omitted triples are zero.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::model::{ModelInput, Triple};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("`s` is {s} but `dims` has {dims} entries")]
    CountMismatch { s: usize, dims: usize },
    #[error("{field}: `{value}` is not a number or a rational string")]
    BadNumber { field: String, value: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: String,
    s: usize,
    dims: Vec<u32>,
    #[serde(default)]
    casimir: Option<Vec<Value>>,
    #[serde(default)]
    killing: Option<Vec<Value>>,
    #[serde(default)]
    triples: Vec<(usize, usize, usize, Value)>,
    pairwise_inequivalent: bool,
}

fn scalar_from_json(v: &Value, field: &str, force_exact: bool) -> Result<Scalar, FileError> {
    let bad = || FileError::BadNumber {
        field: field.to_string(),
        value: v.to_string(),
    };
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Scalar::int(i))
            } else {
                let f = Scalar::float(n.as_f64().ok_or_else(bad)?);
                if force_exact {
                    f.to_exact().ok_or_else(bad)
                } else {
                    Ok(f)
                }
            }
        }
        Value::String(s) => Scalar::parse(s, force_exact).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn scalar_list(values: &Option<Vec<Value>>, field: &str, force_exact: bool) -> Result<Option<Vec<Scalar>>, FileError> {
    values
        .as_ref()
        .map(|vs| {
            vs.iter()
                .enumerate()
                .map(|(i, v)| scalar_from_json(v, &format!("{field}[{}]", i + 1), force_exact))
                .collect()
        })
        .transpose()
}

/// Parses a model file. Structural checks on triples and values are left to
/// [`crate::model::validate`].
pub fn parse_model(text: &str, force_exact: bool) -> Result<ModelInput, FileError> {
    let raw: RawModel = serde_json::from_str(text)?;
    if raw.s != raw.dims.len() {
        return Err(FileError::CountMismatch {
            s: raw.s,
            dims: raw.dims.len(),
        });
    }
    let triples = raw
        .triples
        .iter()
        .map(|(i, j, k, v)| {
            let value = scalar_from_json(v, &format!("triples[{i},{j},{k}]"), force_exact)?;
            Ok(Triple::new(*i, *j, *k, value))
        })
        .collect::<Result<_, FileError>>()?;
    Ok(ModelInput {
        name: raw.name,
        casimir: scalar_list(&raw.casimir, "casimir", force_exact)?,
        killing: scalar_list(&raw.killing, "killing", force_exact)?,
        dims: raw.dims,
        triples,
        pairwise_inequivalent: raw.pairwise_inequivalent,
    })
}

pub fn read_model(path: &Path, force_exact: bool) -> Result<ModelInput, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text, force_exact)
}

fn scalar_token(v: &Scalar) -> String {
    match v {
        Scalar::Exact(r) if r.is_integer() => r.to_integer().to_string(),
        Scalar::Exact(_) => format!("\"{v}\""),
        Scalar::Float(f) => serde_json::to_string(f).expect("finite float"),
    }
}

fn scalar_array(values: &[Scalar]) -> String {
    let parts: Vec<String> = values.iter().map(scalar_token).collect();
    format!("[{}]", parts.join(", "))
}

/// Canonical text of a model file; parsing it back and writing again gives
/// the same bytes.
pub fn to_canonical_json(input: &ModelInput) -> String {
    let mut out = String::from("{\n");
    let name = serde_json::to_string(&input.name).expect("string");
    let dims: Vec<String> = input.dims.iter().map(u32::to_string).collect();
    let _ = writeln!(out, "  \"name\": {name},");
    let _ = writeln!(out, "  \"s\": {},", input.dims.len());
    let _ = writeln!(out, "  \"dims\": [{}],", dims.join(", "));
    if let Some(c) = &input.casimir {
        let _ = writeln!(out, "  \"casimir\": {},", scalar_array(c));
    }
    if let Some(b) = &input.killing {
        let _ = writeln!(out, "  \"killing\": {},", scalar_array(b));
    }
    if input.triples.is_empty() {
        out.push_str("  \"triples\": [],\n");
    } else {
        out.push_str("  \"triples\": [\n");
        for (n, t) in input.triples.iter().enumerate() {
            let sep = if n + 1 == input.triples.len() { "" } else { "," };
            let _ = writeln!(
                out,
                "    [{}, {}, {}, {}]{sep}",
                t.i,
                t.j,
                t.k,
                scalar_token(&t.value)
            );
        }
        out.push_str("  ],\n");
    }
    let _ = writeln!(out, "  \"pairwise_inequivalent\": {}", input.pairwise_inequivalent);
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpaceModel;

    const G2U2: &str = r#"{
  "name": "G2/U(2)",
  "s": 3,
  "dims": [4, 2, 4],
  "killing": [1, 1, 1],
  "triples": [
    [1, 1, 2, "2/3"],
    [1, 2, 3, "1/2"]
  ],
  "pairwise_inequivalent": true
}
"#;

    #[test]
    fn canonical_round_trip() {
        let input = parse_model(G2U2, false).unwrap();
        assert_eq!(to_canonical_json(&input), G2U2);
        let model = SpaceModel::from_input(input).unwrap();
        assert_eq!(model.casimir()[1], Scalar::ratio(1, 12));
    }

    #[test]
    fn floats_and_forced_exact() {
        let text = G2U2.replace("\"2/3\"", "0.6666666666666666").replace("\"1/2\"", "0.5");
        let input = parse_model(&text, false).unwrap();
        assert!(!input.triples[1].value.is_exact());
        assert_eq!(to_canonical_json(&input), text);
        let exact = parse_model(&text, true).unwrap();
        assert_eq!(exact.triples[1].value, Scalar::ratio(1, 2));
    }

    #[test]
    fn rejects_bad_files() {
        let unknown = G2U2.replace("\"s\": 3,", "\"s\": 3, \"extra\": 1,");
        assert!(matches!(parse_model(&unknown, false), Err(FileError::Json(_))));
        let count = G2U2.replace("\"s\": 3,", "\"s\": 2,");
        assert!(matches!(
            parse_model(&count, false),
            Err(FileError::CountMismatch { s: 2, dims: 3 })
        ));
        let bad = G2U2.replace("\"1/2\"", "\"half\"");
        assert!(matches!(parse_model(&bad, false), Err(FileError::BadNumber { .. })));
        assert!(matches!(parse_model("{", false), Err(FileError::Json(_))));
        // Non-canonical and duplicate triples parse but fail validation.
        let swapped = G2U2.replace("[1, 1, 2, \"2/3\"]", "[2, 1, 1, \"2/3\"]");
        assert!(SpaceModel::from_input(parse_model(&swapped, false).unwrap()).is_err());
        let dup = G2U2.replace("[1, 2, 3, \"1/2\"]", "[1, 1, 2, \"1/2\"]");
        assert!(SpaceModel::from_input(parse_model(&dup, false).unwrap()).is_err());
    }
}
