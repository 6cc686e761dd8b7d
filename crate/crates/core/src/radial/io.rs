//! JSON and CSV forms of a radial measure.

use serde::{Deserialize, Serialize};

use super::{Atom, DiscreteRadialMeasure, TruncationRecord};
use crate::error::{Error, Result};

pub const SCHEMA: &str = "aqfock/1";

/// Versioned JSON document for a radial measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDocument {
    pub schema: String,
    pub alpha: f64,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub atoms: Vec<Atom>,
    pub truncation: TruncationRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl MeasureDocument {
    pub fn new(alpha: f64, q: f64, measure: &DiscreteRadialMeasure) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            alpha,
            q,
            t: None,
            atoms: measure.atoms().to_vec(),
            truncation: measure.truncation(),
            warning: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("malformed measure document: {e}")))?;
        if doc.schema != SCHEMA {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                doc.schema
            )));
        }
        Ok(doc)
    }

    pub fn measure(&self) -> Result<DiscreteRadialMeasure> {
        DiscreteRadialMeasure::from_atoms(self.atoms.clone(), self.truncation)
    }
}

/// Shortest round-trip decimal; scientific notation outside `[1e-4, 1e15)`.
pub fn format_float(v: f64) -> String {
    let m = v.abs();
    if m == 0.0 || !m.is_finite() || (1e-4..1e15).contains(&m) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// `r,w` header followed by one atom per row, positions ascending.
pub fn to_csv(measure: &DiscreteRadialMeasure) -> String {
    let mut out = String::from("r,w\n");
    for a in measure.atoms() {
        out.push_str(&format!("{},{}\n", format_float(a.r), format_float(a.w)));
    }
    out
}

pub fn from_csv(text: &str) -> Result<DiscreteRadialMeasure> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("r,w") {
        return Err(Error::InvalidArgument("expected header \"r,w\"".into()));
    }
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
    };
    let mut atoms = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let (r, w) = line
            .split_once(',')
            .ok_or_else(|| Error::InvalidArgument(format!("bad row {line:?}")))?;
        atoms.push(Atom {
            r: parse(r)?,
            w: parse(w)?,
        });
    }
    let n = atoms.len();
    DiscreteRadialMeasure::from_atoms(atoms, TruncationRecord::exact(n))
}

/// JSON has no infinity; an unbounded residual is written as `null`.
pub(super) mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::{QParams, TruncationPolicy};
    use crate::radial::rho_nu_alpha_q;
    use proptest::prelude::*;

    #[test]
    fn float_format_switches_to_exponent_at_extremes() {
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-2.5e-20), "-2.5e-20");
        assert_eq!(format_float(3e20), "3e20");
    }

    proptest! {
        #[test]
        fn float_format_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_shape() {
        let m = rho_nu_alpha_q(QParams::new(-0.5, 0.0).unwrap(), &TruncationPolicy::default()).unwrap();
        let doc = MeasureDocument::new(-0.5, 0.0, &m);
        let v: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(v["schema"], "aqfock/1");
        assert_eq!(v["atoms"][0]["r"], 0.0);
        assert_eq!(v["atoms"][0]["w"], 0.5);
        assert_eq!(v["atoms"][1]["r"], 1.0);
        assert_eq!(v["truncation"]["terms"], 2);
        assert!(v.get("warning").is_none());
    }

    #[test]
    fn infinite_residual_round_trips_through_null() {
        let m = DiscreteRadialMeasure::from_atoms(
            vec![Atom { r: 1.0, w: 1.0 }],
            TruncationRecord {
                tol: 1e-16,
                terms: 1,
                residual: f64::INFINITY,
            },
        )
        .unwrap();
        let doc = MeasureDocument::new(0.1, 0.2, &m);
        let json = doc.to_json();
        assert!(json.contains("\"residual\": null"));
        assert_eq!(
            MeasureDocument::from_json(&json).unwrap().truncation.residual,
            f64::INFINITY
        );
    }

    #[test]
    fn rejects_foreign_schema() {
        let text = r#"{"schema":"other/2","alpha":0,"q":0,"atoms":[],"truncation":{"tol":0,"terms":0,"residual":0}}"#;
        assert!(MeasureDocument::from_json(text).is_err());
        assert!(from_csv("x,y\n1,2\n").is_err());
    }

    proptest! {
        #[test]
        fn json_and_csv_round_trip(atoms in prop::collection::vec((0.0f64..10.0, -1.0f64..1.0), 0..20)) {
            let atoms: Vec<Atom> = atoms.into_iter().map(|(r, w)| Atom { r, w }).collect();
            let n = atoms.len();
            let m = DiscreteRadialMeasure::from_atoms(atoms, TruncationRecord::exact(n)).unwrap();
            let doc = MeasureDocument::new(0.25, -0.5, &m);
            let back = MeasureDocument::from_json(&doc.to_json()).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.measure().unwrap(), m.clone());
            let csv = from_csv(&to_csv(&m)).unwrap();
            prop_assert_eq!(csv.atoms(), m.atoms());
        }
    }
}
