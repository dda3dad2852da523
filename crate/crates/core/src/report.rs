//! Named verification results.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One check: `fail ⟺ max_violation > tolerance` unless skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    /// The inequality or identity under test, as a formula.
    pub statement: String,
    pub status: Status,
    #[serde(with = "lenient_f64")]
    pub max_violation: f64,
    #[serde(with = "lenient_f64")]
    pub tolerance: f64,
    #[serde(default)]
    pub details: BTreeMap<String, Value>,
}

impl CheckReport {
    /// A decided report; the status follows from the two numbers. A NaN
    /// violation fails.
    pub fn decided(name: &str, statement: &str, max_violation: f64, tolerance: f64) -> Self {
        let status = if max_violation <= tolerance { Status::Pass } else { Status::Fail };
        CheckReport {
            name: name.into(),
            statement: statement.into(),
            status,
            max_violation,
            tolerance,
            details: BTreeMap::new(),
        }
    }

    pub fn skipped(name: &str, statement: &str, reason: &str) -> Self {
        let mut r = CheckReport {
            name: name.into(),
            statement: statement.into(),
            status: Status::Skipped,
            max_violation: 0.0,
            tolerance: 0.0,
            details: BTreeMap::new(),
        };
        r.details.insert("reason".into(), Value::from(reason));
        r
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.into(), value.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// A float as JSON, with non-finite values spelled out.
pub fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::from("nan")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

/// Non-finite floats travel as the strings `inf`, `-inf` and `nan`.
mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        super::json_f64(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => n.as_f64().ok_or_else(|| serde::de::Error::custom("bad number")),
            Value::String(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
            other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_numbers() {
        assert!(CheckReport::decided("a", "x <= 0", 0.0, 0.0).passed());
        assert!(CheckReport::decided("a", "x <= 0", 1e-3, 1e-4).failed());
        assert!(CheckReport::decided("a", "x <= 0", f64::NAN, 1.0).failed());
        let s = CheckReport::skipped("a", "x <= 0", "no data");
        assert_eq!(s.status, Status::Skipped);
    }

    #[test]
    fn json_shape() {
        let r = CheckReport::decided("r-convexity", "R'' >= 0", 0.5, 1.0).with("nodes", 3);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["details"]["nodes"], 3);
        let back: CheckReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
        let inf = CheckReport::decided("x", "y", f64::INFINITY, 1.0);
        let text = serde_json::to_string(&inf).unwrap();
        assert!(text.contains("\"max_violation\":\"inf\""));
        let back: CheckReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.max_violation, f64::INFINITY);
    }
}
