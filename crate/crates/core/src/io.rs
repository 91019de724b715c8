//! Canonical JSON for structures, functionals and elements.
//!
//! Keys are sorted, floats are written with 17 significant digits, and sparse
//! tensors list `[i, j, k, re, im]` for entries with modulus at least `1e-15`.
//! A functional file names its host by the SHA-256 of the host's canonical text.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{CVector, ComplexMatrix, Tensor3, Tolerance, C64};
use crate::qgroup::{QuantumStructure, StructureParts};
use crate::states::Functional;

/// Entries below this modulus are omitted from sparse tensors.
pub const SPARSE_CUTOFF: f64 = 1e-15;

fn float(x: f64) -> Value {
    Value::Number(Number::from_f64(x).expect("finite"))
}

fn complex(z: C64) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

/// `[[re, im], ...]`.
pub fn vector_value(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

fn matrix(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect())).collect())
}

fn sparse(t: &Tensor3) -> Value {
    Value::Array(
        t.nonzeros()
            .filter(|(_, _, _, v)| v.norm() >= SPARSE_CUTOFF)
            .map(|(i, j, k, v)| Value::Array(vec![i.into(), j.into(), k.into(), float(v.re), float(v.im)]))
            .collect(),
    )
}

fn structure_map(g: &QuantumStructure) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("dim".into(), g.dim().into());
    m.insert("basis_labels".into(), Value::Array(g.basis_labels().iter().map(|l| Value::String(l.clone())).collect()));
    m.insert("mult".into(), sparse(g.mult()));
    m.insert("coproduct".into(), sparse(g.coproduct_tensor()));
    m.insert("unit".into(), vector_value(g.unit()));
    m.insert("invol".into(), matrix(g.invol()));
    m.insert("counit".into(), vector_value(g.counit()));
    m.insert("antipode".into(), matrix(g.antipode()));
    m.insert("haar".into(), vector_value(g.haar()));
    m.insert("haar_element".into(), vector_value(g.haar_element()));
    m
}

/// The structure as a JSON value; the flag is included when given.
pub fn structure_to_value(g: &QuantumStructure, coproduct_multiplicative: Option<bool>) -> Value {
    let mut m = structure_map(g);
    if let Some(flag) = coproduct_multiplicative {
        m.insert("coproduct_multiplicative".into(), Value::Bool(flag));
    }
    Value::Object(m)
}

/// Canonical text of a structure file.
pub fn structure_to_string(g: &QuantumStructure, coproduct_multiplicative: Option<bool>) -> String {
    canonical_string(&structure_to_value(g, coproduct_multiplicative))
}

/// SHA-256 (hex) of the canonical text of `g` without the multiplicativity flag.
pub fn host_hash(g: &QuantumStructure) -> &str {
    g.fingerprint.get_or_init(|| {
        let text = canonical_string(&Value::Object(structure_map(g)));
        hex::encode(Sha256::digest(text.as_bytes()))
    })
}

/// A structure file and its optional multiplicativity flag.
#[derive(Debug)]
pub struct StructureFile {
    pub structure: QuantumStructure,
    pub coproduct_multiplicative: Option<bool>,
}

pub fn read_structure(text: &str, tol: &Tolerance) -> Result<StructureFile> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc.as_object().ok_or_else(|| Error::Format("structure file must be an object".into()))?;
    let labels = obj
        .get("basis_labels")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Format("missing \"basis_labels\"".into()))?
        .iter()
        .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| Error::Format("basis labels must be strings".into())))
        .collect::<Result<Vec<_>>>()?;
    let n = labels.len();
    if let Some(dim) = obj.get("dim") {
        let dim = dim.as_u64().ok_or_else(|| Error::Format("\"dim\" must be an integer".into()))? as usize;
        if dim != n {
            return Err(Error::DimensionMismatch { expected: dim, got: n });
        }
    }
    let required = |key: &str| obj.get(key).ok_or_else(|| Error::Format(format!("missing \"{key}\"")));
    let optional_vec = |key: &str| obj.get(key).map(|v| parse_vector(v, n, key)).transpose();
    let parts = StructureParts {
        mult: parse_sparse(required("mult")?, n, "mult")?,
        coproduct: parse_sparse(required("coproduct")?, n, "coproduct")?,
        unit: parse_vector(required("unit")?, n, "unit")?,
        invol: parse_matrix(required("invol")?, n, "invol")?,
        counit: optional_vec("counit")?,
        antipode: obj.get("antipode").map(|v| parse_matrix(v, n, "antipode")).transpose()?,
        haar: optional_vec("haar")?,
        haar_element: optional_vec("haar_element")?,
        basis_labels: labels,
    };
    let coproduct_multiplicative = match obj.get("coproduct_multiplicative") {
        None => None,
        Some(Value::Bool(b)) => Some(*b),
        Some(_) => return Err(Error::Format("\"coproduct_multiplicative\" must be a boolean".into())),
    };
    Ok(StructureFile { structure: QuantumStructure::from_parts(parts, tol)?, coproduct_multiplicative })
}

fn parse_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Format(format!("{what}: expected a number")))
}

fn parse_complex(v: &Value, what: &str) -> Result<C64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(C64::new(parse_f64(re, what)?, parse_f64(im, what)?)),
        _ => Err(Error::Format(format!("{what}: expected [re, im]"))),
    }
}

fn parse_vector(v: &Value, n: usize, what: &str) -> Result<CVector> {
    let items = v.as_array().ok_or_else(|| Error::Format(format!("{what}: expected an array")))?;
    if items.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: items.len() });
    }
    let values = items.iter().map(|z| parse_complex(z, what)).collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(values))
}

fn parse_matrix(v: &Value, n: usize, what: &str) -> Result<ComplexMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::Format(format!("{what}: expected an array of rows")))?;
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rows.len() });
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = parse_vector(row, n, what)?;
        m.row_mut(i).copy_from(&row.transpose());
    }
    Ok(m)
}

fn parse_sparse(v: &Value, n: usize, what: &str) -> Result<Tensor3> {
    let items = v.as_array().ok_or_else(|| Error::Format(format!("{what}: expected sparse triples")))?;
    let mut t = Tensor3::zeros(n, n, n);
    for item in items {
        let e = item.as_array().map(Vec::as_slice);
        let Some([i, j, k, re, im]) = e else {
            return Err(Error::Format(format!("{what}: entries are [i, j, k, re, im]")));
        };
        let idx = |x: &Value| -> Result<usize> {
            let x = x.as_u64().ok_or_else(|| Error::Format(format!("{what}: indices must be integers")))? as usize;
            if x < n {
                Ok(x)
            } else {
                Err(Error::Format(format!("{what}: index {x} out of range")))
            }
        };
        t.add(idx(i)?, idx(j)?, idx(k)?, C64::new(parse_f64(re, what)?, parse_f64(im, what)?));
    }
    Ok(t)
}

fn coeff_file(host: &QuantumStructure, coeffs: &CVector) -> String {
    let mut m = Map::new();
    m.insert("host_hash".into(), Value::String(host_hash(host).to_owned()));
    m.insert("coeffs".into(), vector_value(coeffs));
    canonical_string(&Value::Object(m))
}

/// Functional file: values on the host basis, in basis order.
pub fn functional_to_string(f: &Functional<'_>) -> String {
    coeff_file(f.host(), f.coeffs())
}

/// Element file: coefficients of an element of the host.
pub fn element_to_string(host: &QuantumStructure, a: &CVector) -> String {
    coeff_file(host, a)
}

/// Coefficients of a functional or element file, checked against `host`.
pub fn read_coeffs(host: &QuantumStructure, text: &str) -> Result<CVector> {
    let doc: Value = serde_json::from_str(text)?;
    let hash = doc
        .get("host_hash")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Format("missing \"host_hash\"".into()))?;
    if hash != host_hash(host) {
        return Err(Error::HostMismatch);
    }
    parse_vector(doc.get("coeffs").ok_or_else(|| Error::Format("missing \"coeffs\"".into()))?, host.dim(), "coeffs")
}

pub fn read_functional<'h>(host: &'h QuantumStructure, text: &str) -> Result<Functional<'h>> {
    Functional::new(host, read_coeffs(host, text)?)
}

/// Sorted keys, 17 significant digits, one sparse entry or matrix row per line.
pub fn canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0, false);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_scalar(out: &mut String, v: &Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let _ = write!(out, "{:.16e}", if x == 0.0 { 0.0 } else { x });
        }
        other => out.push_str(&other.to_string()),
    }
}

fn write_inline(out: &mut String, v: &Value) {
    match v {
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_inline(out, item);
            }
            out.push(']');
        }
        other => write_scalar(out, other),
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize, in_array: bool) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String((*key).clone()));
                write_value(out, &map[*key], indent + 1, false);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) => {
            let flat = items.iter().all(is_scalar);
            let rows_of_scalars = items.iter().all(|x| matches!(x, Value::Array(a) if a.iter().all(is_scalar)));
            if items.is_empty() || flat || (in_array && rows_of_scalars) {
                write_inline(out, v);
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1, true);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        other => write_scalar(out, other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_sekine, cyclic, build_function_algebra, sekine_phi_l};

    #[test]
    fn float_format_has_17_digits() {
        let s = canonical_string(&serde_json::json!({"b": [0.1, -0.0], "a": 1}));
        assert_eq!(s, "{\n  \"a\": 1,\n  \"b\": [1.0000000000000001e-1, 0.0000000000000000e0]\n}\n");
    }

    #[test]
    fn structure_round_trip_is_byte_identical() {
        let tol = Tolerance::default();
        let a2 = build_sekine(2, &tol).unwrap();
        let text = structure_to_string(&a2, None);
        let back = read_structure(&text, &tol).unwrap();
        assert_eq!(structure_to_string(&back.structure, None), text);
        assert_eq!(host_hash(&back.structure), host_hash(&a2));
        assert_eq!(back.coproduct_multiplicative, None);
    }

    #[test]
    fn functional_round_trip_and_host_check() {
        let tol = Tolerance::default();
        let a2 = build_sekine(2, &tol).unwrap();
        let phi = sekine_phi_l(&a2, 1, &tol).unwrap();
        let text = functional_to_string(&phi);
        let back = read_functional(&a2, &text).unwrap();
        assert_eq!(back.coeffs(), phi.coeffs());
        let other = build_function_algebra(&cyclic(8), &tol).unwrap();
        assert!(matches!(read_functional(&other, &text), Err(Error::HostMismatch)));
    }

    #[test]
    fn malformed_files() {
        let tol = Tolerance::default();
        assert!(matches!(read_structure("[]", &tol), Err(Error::Format(_))));
        assert!(matches!(read_structure("{", &tol), Err(Error::Json(_))));
        let doc = r#"{"basis_labels": ["a"], "mult": [[0,0,5,1,0]], "coproduct": [], "unit": [[1,0]], "invol": [[[1,0]]]}"#;
        assert!(matches!(read_structure(doc, &tol), Err(Error::Format(_))));
    }
}
