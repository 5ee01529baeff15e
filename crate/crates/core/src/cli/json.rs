use serde_json::Value;

use crate::exact::{parse_rational, PrimeSet, Rational, RationalMatrix};
use crate::padiclin::SignMatrix;

/// The forms and optional data read from an input document.
#[derive(Debug, Clone)]
pub struct InputDoc {
    pub f: RationalMatrix,
    pub g: RationalMatrix,
    pub sigma: Option<RationalMatrix>,
    pub big_sigma: Option<RationalMatrix>,
    pub primes: Option<Vec<u64>>,
    pub tau_hat: Option<RationalMatrix>,
    pub u: Option<RationalMatrix>,
    pub tau_signs: Option<SignMatrix>,
}

fn parse_scalar(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| format!("not a rational: {s:?}")),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        Value::Number(n) if n.is_u64() => Ok(Rational::from_integer(n.as_u64().unwrap().into())),
        other => Err(format!("expected a rational string, found {other}")),
    }
}

pub fn parse_matrix(v: &Value) -> Result<RationalMatrix, String> {
    let rows = v.as_array().ok_or("matrix must be an array of rows")?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| "matrix row must be an array".to_string())?
                .iter()
                .map(parse_scalar)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    RationalMatrix::from_rows(rows).map_err(|e| e.to_string())
}

/// Parses `"2,3,5"`.
pub fn parse_prime_list(s: &str) -> Result<Vec<u64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| format!("not a prime: {t:?}")))
        .collect()
}

pub fn prime_set(primes: Vec<u64>) -> Result<PrimeSet, String> {
    PrimeSet::new(primes).map_err(|e| e.to_string())
}

fn optional_matrix(doc: &Value, key: &str) -> Result<Option<RationalMatrix>, String> {
    doc.get(key)
        .filter(|v| !v.is_null())
        .map(|v| parse_matrix(v).map_err(|e| format!("{key}: {e}")))
        .transpose()
}

fn required_matrix(doc: &Value, key: &str) -> Result<RationalMatrix, String> {
    optional_matrix(doc, key)?.ok_or_else(|| format!("missing field {key:?}"))
}

pub fn parse_input(text: &str) -> Result<InputDoc, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    if !doc.is_object() {
        return Err("input must be a JSON object".into());
    }
    let primes = match doc.get("primes") {
        None | Some(Value::Null) => None,
        Some(Value::Array(items)) => Some(
            items
                .iter()
                .map(|v| match v {
                    Value::Number(n) => n.as_u64().ok_or_else(|| format!("bad prime {n}")),
                    Value::String(s) => s.parse().map_err(|_| format!("bad prime {s:?}")),
                    other => Err(format!("bad prime {other}")),
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(other) => return Err(format!("primes must be an array, found {other}")),
    };
    let tau_signs = match doc.get("tau_signs") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let signs = v
                .as_array()
                .ok_or("tau_signs must be an array")?
                .iter()
                .map(|s| s.as_i64().map(|x| x as i8).ok_or("tau_signs entries must be integers"))
                .collect::<Result<Vec<_>, _>>()?;
            Some(SignMatrix::new(signs).map_err(|e| e.to_string())?)
        }
    };
    Ok(InputDoc {
        f: required_matrix(&doc, "F")?,
        g: required_matrix(&doc, "G")?,
        sigma: optional_matrix(&doc, "sigma")?,
        big_sigma: optional_matrix(&doc, "Sigma")?,
        primes,
        tau_hat: optional_matrix(&doc, "tau_hat")?,
        u: optional_matrix(&doc, "U")?,
        tau_signs,
    })
}
