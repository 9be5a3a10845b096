//! Deterministic JSON output helpers.
//!
//! Report structs serialize their keys in declaration order; floats go
//! through [`f64_17`] so every value is printed with 17 significant digits.
//! Non-finite values are written as the strings `"inf"`, `"-inf"`, `"nan"`.

use serde::Serialize;
use serde_json::value::RawValue;

/// Formats a finite float with 17 significant digits in scientific notation.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "\"inf\"".to_string()
        } else {
            "\"-inf\"".to_string()
        }
    } else {
        // `{:e}` never emits a leading '+' on the exponent, which keeps the
        // output a valid JSON number.
        format!("{:.16e}", x)
    }
}

pub fn f64_17<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format_f64(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn opt_f64_17<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => f64_17(v, s),
        None => s.serialize_none(),
    }
}

pub fn vec_f64_17<S: serde::Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        let raw = RawValue::from_string(format_f64(*x)).map_err(serde::ser::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = serde_json::to_string_pretty(value)?;
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        #[serde(serialize_with = "f64_17")]
        x: f64,
        #[serde(serialize_with = "opt_f64_17")]
        y: Option<f64>,
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(2.0), "2.0000000000000000e0");
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(f64::INFINITY), "\"inf\"");
        let s = serde_json::to_string(&Sample { x: -1.5, y: None }).unwrap();
        assert_eq!(s, r#"{"x":-1.5000000000000000e0,"y":null}"#);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"].as_f64(), Some(-1.5));
    }
}
