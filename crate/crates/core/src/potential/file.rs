//! JSON potential files.
//!
//! ```json
//! {"space":"radial","dimension":2,"pieces":[{"from":0,"to":1,"expr":"-0.1"},{"from":1,"to":"inf","expr":"0"}]}
//! ```
//!
//! Integral endpoints are written as integers and infinities as `"inf"` /
//! `"-inf"`. Optional keys (`coupling`, `part`, `epsilon`, `derivation`) are
//! omitted at their defaults, so a file written by `to_json` reads back to
//! the same bytes.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use super::{Part, Piece, Potential, Space};
use crate::error::{Error, Result};
use crate::expr::parse;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Endpoint(f64);

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.0;
        if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else if v.fract() == 0.0 && v.abs() < 9.0e15 && !(v == 0.0 && v.is_sign_negative()) {
            s.serialize_i64(v as i64)
        } else {
            s.serialize_f64(v)
        }
    }
}

impl<'de> Deserialize<'de> for Endpoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Endpoint;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Endpoint, E> {
                Ok(Endpoint(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Endpoint, E> {
                Ok(Endpoint(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Endpoint, E> {
                Ok(Endpoint(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Endpoint, E> {
                match v {
                    "inf" | "+inf" => Ok(Endpoint(f64::INFINITY)),
                    "-inf" => Ok(Endpoint(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceRepr {
    from: Endpoint,
    to: Endpoint,
    expr: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    space: String,
    dimension: u32,
    pieces: Vec<PieceRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    part: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    derivation: Vec<String>,
}

impl Potential {
    pub fn to_json(&self) -> String {
        let repr = FileRepr {
            space: match self.space {
                Space::Line => "line".into(),
                Space::Radial => "radial".into(),
            },
            dimension: self.dimension,
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceRepr {
                    from: Endpoint(p.from),
                    to: Endpoint(p.to),
                    expr: p.source.clone(),
                })
                .collect(),
            coupling: (self.coupling != 1.0).then_some(self.coupling),
            part: match self.part {
                Part::Full => None,
                Part::Negative => Some("negative".into()),
                Part::Attractive => Some("attractive".into()),
            },
            epsilon: self.epsilon,
            derivation: self.derivation.clone(),
        };
        serde_json::to_string(&repr).expect("potential serializes")
    }

    pub fn from_json(text: &str) -> Result<Potential> {
        let repr: FileRepr =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let space = match repr.space.as_str() {
            "line" => Space::Line,
            "radial" => Space::Radial,
            s => return Err(Error::Format(format!("unknown space '{s}'"))),
        };
        let part = match repr.part.as_deref() {
            None | Some("full") => Part::Full,
            Some("negative") => Part::Negative,
            Some("attractive") => Part::Attractive,
            Some(s) => return Err(Error::Format(format!("unknown part '{s}'"))),
        };
        let mut pieces = Vec::with_capacity(repr.pieces.len());
        for (k, p) in repr.pieces.into_iter().enumerate() {
            let expr = parse(&p.expr).map_err(|e| match e {
                Error::Parse {
                    line,
                    column,
                    message,
                } => Error::Parse {
                    line,
                    column,
                    message: format!("piece {k}: {message}"),
                },
                other => other,
            })?;
            pieces.push(Piece {
                from: p.from.0,
                to: p.to.0,
                source: p.expr,
                expr,
            });
        }
        let v = Potential {
            space,
            dimension: repr.dimension,
            pieces,
            coupling: repr.coupling.unwrap_or(1.0),
            part,
            epsilon: repr.epsilon,
            derivation: repr.derivation,
        };
        v.validate()?;
        Ok(v)
    }
}
