//! Domain spec files.
//!
//! ```json
//! { "dim": 2, "shape": "polygon", "vertices": [[0,0],[1,0],[1,1],[0,1]] }
//! { "dim": 1, "shape": "interval_union", "intervals": [[-1,0],[0.5,2]] }
//! { "dim": 3, "shape": "ball", "center": [0,0,0], "radius": 1 }
//! { "dim": 3, "shape": "box", "min": [0,0,0], "max": [1,1,1] }
//! { "dim": 2, "shape": "polytope", "halfspaces": [{"a": [1,0], "b": 1}, ...] }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::Domain;
use crate::error::{Error, Result};

/// A validated domain together with the digest of its source text.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub domain: Domain,
    pub sha256: String,
}

#[derive(Serialize, Deserialize)]
struct HalfSpaceJson {
    a: Vec<f64>,
    b: f64,
}

fn perr(path: &str, reason: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), reason: reason.into() }
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(&format!("$.{key}"), "missing field"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(path, "expected a number"))
}

fn vector(v: &Value, path: &str, len: Option<usize>) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| perr(path, "expected an array of numbers"))?;
    if let Some(n) = len {
        if arr.len() != n {
            return Err(perr(path, format!("expected {n} coordinates, found {}", arr.len())));
        }
    }
    arr.iter().enumerate().map(|(i, c)| number(c, &format!("{path}[{i}]"))).collect()
}

/// Parses and validates a domain spec; reports the first violation with its JSON path.
pub fn parse_domain_spec(text: &str) -> Result<DomainSpec> {
    let root: Value = serde_json::from_str(text).map_err(|e| perr("$", e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| perr("$", "expected an object"))?;
    let dim_v = field(obj, "dim")?;
    let dim = dim_v
        .as_u64()
        .filter(|d| (1..=3).contains(d))
        .ok_or_else(|| perr("$.dim", "dim must be 1, 2 or 3"))? as usize;
    let shape = field(obj, "shape")?.as_str().ok_or_else(|| perr("$.shape", "expected a string"))?;
    let domain = match shape {
        "interval_union" => {
            if dim != 1 {
                return Err(perr("$.dim", "interval_union requires dim 1"));
            }
            let arr = field(obj, "intervals")?
                .as_array()
                .ok_or_else(|| perr("$.intervals", "expected an array"))?;
            let iv = arr
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let p = vector(v, &format!("$.intervals[{i}]"), Some(2))?;
                    Ok((p[0], p[1]))
                })
                .collect::<Result<Vec<_>>>()?;
            Domain::interval_union(iv)?
        }
        "polygon" => {
            if dim != 2 {
                return Err(perr("$.dim", "polygon requires dim 2"));
            }
            let arr = field(obj, "vertices")?
                .as_array()
                .ok_or_else(|| perr("$.vertices", "expected an array"))?;
            let verts = arr
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let p = vector(v, &format!("$.vertices[{i}]"), Some(2))?;
                    Ok([p[0], p[1]])
                })
                .collect::<Result<Vec<_>>>()?;
            Domain::polygon(verts)?
        }
        "ball" => {
            let c = vector(field(obj, "center")?, "$.center", Some(dim))?;
            let r = number(field(obj, "radius")?, "$.radius")?;
            Domain::ball(c, r)?
        }
        "box" => {
            let lo = vector(field(obj, "min")?, "$.min", Some(dim))?;
            let hi = vector(field(obj, "max")?, "$.max", Some(dim))?;
            Domain::axis_box(lo, hi)?
        }
        "polytope" => {
            let arr = field(obj, "halfspaces")?
                .as_array()
                .ok_or_else(|| perr("$.halfspaces", "expected an array"))?;
            let hs = arr
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let o = v
                        .as_object()
                        .ok_or_else(|| perr(&format!("$.halfspaces[{i}]"), "expected an object"))?;
                    let a = o
                        .get("a")
                        .ok_or_else(|| perr(&format!("$.halfspaces[{i}].a"), "missing field"))?;
                    let b = o
                        .get("b")
                        .ok_or_else(|| perr(&format!("$.halfspaces[{i}].b"), "missing field"))?;
                    Ok((
                        vector(a, &format!("$.halfspaces[{i}].a"), Some(dim))?,
                        number(b, &format!("$.halfspaces[{i}].b"))?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Domain::convex_polytope(hs)?
        }
        other => return Err(perr("$.shape", format!("unknown shape {other:?}"))),
    };
    if domain.dim() != dim {
        return Err(perr("$.dim", format!("shape has dimension {}", domain.dim())));
    }
    let sha256 = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok(DomainSpec { domain, sha256 })
}

pub fn load_domain_file(path: &Path) -> Result<DomainSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_domain_spec(&text)
}

impl Domain {
    /// Serializes the domain into the spec-file schema.
    pub fn to_spec_json(&self) -> String {
        use super::Shape;
        let v = match self.shape() {
            Shape::IntervalUnion(iv) => serde_json::json!({
                "dim": 1, "shape": "interval_union",
                "intervals": iv.iter().map(|(a, b)| [*a, *b]).collect::<Vec<_>>()
            }),
            Shape::Polygon(v) => serde_json::json!({"dim": 2, "shape": "polygon", "vertices": v}),
            Shape::Ball { center, radius } => serde_json::json!({
                "dim": self.dim(), "shape": "ball", "center": center, "radius": radius
            }),
            Shape::AxisBox { min, max } => serde_json::json!({
                "dim": self.dim(), "shape": "box", "min": min, "max": max
            }),
            Shape::ConvexPolytope(hs) => serde_json::json!({
                "dim": self.dim(), "shape": "polytope",
                "halfspaces": hs.iter().map(|h| HalfSpaceJson { a: h.normal.clone(), b: h.offset }).collect::<Vec<_>>()
            }),
        };
        v.to_string()
    }
}
