//! Law documents: `{"kind": "matrix", "dim": d, "entries": [...]}` or
//! `{"kind": "coaxial", "lambda": l, "mu": m, "h": [h11, h22, h33, h12, h13, h23]}`.

use fitzlaw::coaxial::{CoaxialLaw, SymTensor3};
use fitzlaw::LinearLaw;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LawDoc {
    Matrix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        dim: usize,
        entries: Entries,
    },
    Coaxial {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        lambda: f64,
        mu: f64,
        h: [f64; 6],
    },
}

/// Row-major entries, flat or as nested rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl Entries {
    fn flatten(&self, dim: usize) -> Result<Vec<f64>, Failure> {
        match self {
            Entries::Flat(v) => {
                if v.len() != dim * dim {
                    return Err(Failure::Parse(format!(
                        "field `entries`: expected {} numbers for dim {dim}, got {}",
                        dim * dim,
                        v.len()
                    )));
                }
                Ok(v.clone())
            }
            Entries::Rows(rows) => {
                if rows.len() != dim {
                    return Err(Failure::Parse(format!(
                        "field `entries`: expected {dim} rows, got {}",
                        rows.len()
                    )));
                }
                if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
                    return Err(Failure::Parse(format!(
                        "field `entries[{i}]`: expected {dim} numbers, got {}",
                        r.len()
                    )));
                }
                Ok(rows.concat())
            }
        }
    }
}

/// A parsed and validated law.
#[derive(Debug, Clone)]
pub enum Law {
    Matrix(LinearLaw),
    Coaxial(CoaxialLaw),
}

impl Law {
    /// Matrix form; coaxial laws use orthonormal 6-vector coordinates.
    pub fn linear(&self) -> LinearLaw {
        match self {
            Law::Matrix(l) => l.clone(),
            Law::Coaxial(c) => c.to_linear_law(),
        }
    }
}

impl LawDoc {
    pub fn name(&self) -> Option<&str> {
        match self {
            LawDoc::Matrix { name, .. } | LawDoc::Coaxial { name, .. } => name.as_deref(),
        }
    }

    /// Canonical form: flat row-major entries.
    pub fn canonical(&self) -> Result<LawDoc, Failure> {
        Ok(match self {
            LawDoc::Matrix { name, dim, entries } => LawDoc::Matrix {
                name: name.clone(),
                dim: *dim,
                entries: Entries::Flat(entries.flatten(*dim)?),
            },
            other => other.clone(),
        })
    }

    pub fn build(&self) -> Result<Law, Failure> {
        match self {
            LawDoc::Matrix { dim, entries, .. } => {
                if *dim == 0 {
                    return Err(Failure::Parse("field `dim`: must be at least 1".into()));
                }
                let flat = entries.flatten(*dim)?;
                let law = LinearLaw::from_row_slice(*dim, &flat)
                    .map_err(|e| Failure::Invariant(e.to_string()))?;
                Ok(Law::Matrix(law))
            }
            LawDoc::Coaxial { lambda, mu, h, .. } => {
                let law = CoaxialLaw::new(*lambda, *mu, SymTensor3(*h))
                    .map_err(|e| Failure::Invariant(e.to_string()))?;
                Ok(Law::Coaxial(law))
            }
        }
    }
}

/// Parses a law document. A report carrying a `law` field is accepted too,
/// so analysis output can be fed back in.
pub fn parse_law(text: &str) -> Result<LawDoc, Failure> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Failure::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let doc = match &value {
        Value::Object(map) if !map.contains_key("kind") && map.contains_key("law") => {
            map["law"].clone()
        }
        _ => value,
    };
    let Value::Object(map) = &doc else {
        return Err(Failure::Parse(
            "expected a JSON object describing a law".into(),
        ));
    };
    match map.get("kind") {
        None => return Err(Failure::Parse("missing field `kind`".into())),
        Some(Value::String(k)) if k == "matrix" || k == "coaxial" => {}
        Some(other) => {
            return Err(Failure::Parse(format!(
                "field `kind`: expected \"matrix\" or \"coaxial\", got {other}"
            )))
        }
    }
    serde_json::from_value(doc).map_err(|e| Failure::Parse(format!("law document: {e}")))
}

pub fn read_law(path: &std::path::Path) -> Result<LawDoc, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_law(&text).map_err(|f| match f {
        Failure::Parse(m) => Failure::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}
