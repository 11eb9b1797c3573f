//! Canonical JSON and CSV output.
//!
//! JSON objects are written with sorted keys, floats as `%.17g`, complex numbers
//! as `{"re": .., "im": ..}` and non-finite floats as the strings `"inf"`,
//! `"-inf"`, `"nan"`. Parsing a canonical document and writing it again gives
//! the same bytes.

use serde_json::{json, Map, Number, Value};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::types::{CheckReport, Diagnostics, EvalResult, C64};

pub const SCHEMA: u64 = 1;

/// C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    // negative zero prints as 0 so that parsed documents re-serialize identically
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan" } else if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A float as a JSON value; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn complex(z: C64) -> Value {
    json!({"re": num(z.re), "im": num(z.im)})
}

pub fn diagnostics_value(d: &Diagnostics) -> Value {
    json!({
        "nodes": d.nodes,
        "terms": d.terms,
        "truncation": d.truncation.map(num).unwrap_or(Value::Null),
        "refinements": d.refinements,
        "warnings": d.warnings,
    })
}

pub fn eval_value(r: &EvalResult) -> Value {
    json!({
        "value": complex(r.value),
        "err_estimate": num(r.err_estimate),
        "backend": r.backend.as_str(),
        "diagnostics": diagnostics_value(&r.diagnostics),
    })
}

pub fn check_value(r: &CheckReport) -> Value {
    json!({
        "identity_name": r.identity_name,
        "params": r.params,
        "residual": num(r.residual),
        "tolerance": num(r.tolerance),
        "pass": r.pass,
    })
}

/// `{schema, command, config, results, summary}`.
pub fn envelope(command: &str, config: Value, results: Vec<Value>, summary: Value) -> Value {
    json!({"schema": SCHEMA, "command": command, "config": config, "results": results, "summary": summary})
}

/// Canonical serialization, newline terminated.
pub fn to_canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                out.push_str(&fmt_g17(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(xs) => {
            out.push('[');
            for (j, x) in xs.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write_value(x, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (j, k) in keys.into_iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push(':');
                write_value(&map[k], out);
            }
            out.push('}');
        }
    }
}

/// Parse then re-serialize canonically.
pub fn recanonicalize(text: &str) -> Result<String> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Usage(format!("invalid JSON: {e}")))?;
    Ok(to_canonical(&v))
}

/// CSV with a header row; fields quoted only when needed.
pub fn to_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Usage(format!("csv: {e}")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Usage(format!("csv: {e}"))
}

/// Object from key/value pairs, for building configs.
pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g17_matches_c() {
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(-0.268_941_421_369_995_1), "-0.2689414213699951");
        assert_eq!(fmt_g17(2.5e-5), "2.5000000000000001e-05");
        assert_eq!(fmt_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt_g17(1e-10), "1e-10");
        assert_eq!(fmt_g17(1.5e20), "1.5e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.0001), "0.0001");
        assert_eq!(fmt_g17(1e16), "10000000000000000");
        assert_eq!(fmt_g17(1e17), "1e+17");
        assert_eq!(fmt_g17(f64::INFINITY), "inf");
        assert_eq!(fmt_g17(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_g17(f64::NAN), "nan");
    }

    #[test]
    fn keys_sorted_and_nonfinite_strings() {
        let v = json!({"b": 1, "a": [num(f64::INFINITY), num(0.5)]});
        assert_eq!(to_canonical(&v), "{\"a\":[\"inf\",0.5],\"b\":1}\n");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let s = to_csv(&["x".into(), "y,z".into()], &[vec!["1".into(), "a\"b".into()]]).unwrap();
        assert_eq!(s, "x,\"y,z\"\r\n1,\"a\"\"b\"\r\n");
    }

    proptest! {
        #[test]
        fn g17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = fmt_g17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }

        #[test]
        fn canonical_json_round_trips(xs in proptest::collection::vec(-1e300f64..1e300, 0..8), k in 0u64..1000) {
            let v = json!({"vals": xs.iter().map(|x| num(*x)).collect::<Vec<_>>(), "k": k, "z": complex(C64::new(k as f64 / 7.0, -0.1))});
            let s = to_canonical(&v);
            prop_assert_eq!(recanonicalize(&s).unwrap(), s);
        }
    }
}
