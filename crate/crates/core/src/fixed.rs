//! Serde helpers that write fractions as JSON numbers with exactly six
//! decimal places (`0.500000`, not `0.5`).

use serde::Serializer;
use serde_json::value::RawValue;

pub fn six_places(x: f64) -> String {
    format!("{x:.6}")
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(six_places(x)).expect("formatted float is valid JSON")
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&raw(*x))
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&raw(*v)),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use serde::Serialize;

    #[derive(Serialize)]
    struct Row {
        #[serde(serialize_with = "super::serialize")]
        a: f64,
        #[serde(serialize_with = "super::option::serialize")]
        b: Option<f64>,
        #[serde(serialize_with = "super::option::serialize")]
        c: Option<f64>,
    }

    #[test]
    fn writes_six_places() {
        let json = serde_json::to_string(&Row {
            a: 0.5,
            b: Some(5.0 / 7.0),
            c: None,
        })
        .unwrap();
        assert_eq!(json, r#"{"a":0.500000,"b":0.714286,"c":null}"#);
    }
}
