//! Versioned JSON documents for every object the CLI reads or writes.
//!
//! ```json
//! {"kind": "multiplicity", "version": 1, "payload": {"N": 2, "breakpoints": ["0", "1/4"], "values": [1, 0]}}
//! ```
//!
//! Filter banks key their filters by `"i,j"` (1-based) under `h` and `g`;
//! M-systems key components `M_a` by `"a,j"`. Scalar-valued payloads carry
//! `"scalar": "exact" | "float"`. Breakpoints are always exact rationals.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{GmraError, Result};
use crate::loopgroup::LoopElement;
use crate::matrix::Matrix;
use crate::msystem::{DimensionProfile, GeneralizedFilterBank, MSystem};
use crate::multiplicity::MultiplicityFunction;
use crate::scalar::{Exact, Scalar};
use crate::torus::{CellValue, PiecewiseFn};
use crate::wavelet::{ClassicalMSystem, FrequencyGridFn};

pub const VERSION: u32 = 1;

/// Anything that can be a report payload.
pub use serde::Serialize as Serializable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Multiplicity,
    Bank,
    Msystem,
    LoopElement,
    ClassicalMsystem,
    GridFunction,
    Report,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Multiplicity => "multiplicity",
            Kind::Bank => "bank",
            Kind::Msystem => "msystem",
            Kind::LoopElement => "loop-element",
            Kind::ClassicalMsystem => "classical-msystem",
            Kind::GridFunction => "grid-function",
            Kind::Report => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub kind: Kind,
    pub version: u32,
    pub payload: Value,
}

/// A document's scalar field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Exact,
    Float,
}

impl Document {
    pub fn new(kind: Kind, payload: Value) -> Self {
        Document {
            kind,
            version: VERSION,
            payload,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Document =
            serde_json::from_str(text).map_err(|e| GmraError::Parse(format!("not a document: {e}")))?;
        if doc.version != VERSION {
            return Err(GmraError::Parse(format!(
                "unsupported document version {} (expected {VERSION})",
                doc.version
            )));
        }
        Ok(doc)
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn expect_kind(&self, kinds: &[Kind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            let names: Vec<_> = kinds.iter().map(|k| k.name()).collect();
            Err(GmraError::Parse(format!(
                "expected a {} document, got {}",
                names.join(" or "),
                self.kind.name()
            )))
        }
    }

    pub fn scalar_kind(&self) -> Result<ScalarKind> {
        match self.payload.get("scalar").and_then(Value::as_str) {
            Some("exact") => Ok(ScalarKind::Exact),
            Some("float") => Ok(ScalarKind::Float),
            Some(other) => Err(GmraError::Parse(format!("unknown scalar field {other:?}"))),
            None => Err(GmraError::Parse("missing \"scalar\"".into())),
        }
    }

    pub fn multiplicity(mf: &MultiplicityFunction) -> Self {
        Document::new(Kind::Multiplicity, multiplicity_payload(mf))
    }

    pub fn to_multiplicity(&self) -> Result<MultiplicityFunction> {
        self.expect_kind(&[Kind::Multiplicity])?;
        parse_multiplicity(&self.payload)
    }

    pub fn bank<S: Scalar + CellValue>(bank: &GeneralizedFilterBank<S>) -> Self {
        let p = bank.profile();
        let mut payload = header::<S>(p);
        let copies = p.c();
        let keyed = |rows: usize, get: fn(&GeneralizedFilterBank<S>, usize, usize) -> &PiecewiseFn<S>| {
            let mut m = Map::new();
            for i in 0..rows {
                for j in 0..copies {
                    m.insert(format!("{},{}", i + 1, j + 1), get(bank, i, j).to_json());
                }
            }
            Value::Object(m)
        };
        payload.insert("h".into(), keyed(p.c(), GeneralizedFilterBank::h));
        payload.insert("g".into(), keyed(p.d(), GeneralizedFilterBank::g));
        Document::new(Kind::Bank, Value::Object(payload))
    }

    pub fn to_bank<S: Scalar + CellValue>(&self) -> Result<GeneralizedFilterBank<S>> {
        self.expect_kind(&[Kind::Bank])?;
        let profile = parse_profile(&self.payload)?;
        let h = keyed_filters::<S>(&self.payload, "h", profile.c(), profile.c())?;
        let g = keyed_filters::<S>(&self.payload, "g", profile.d(), profile.c())?;
        GeneralizedFilterBank::new(profile, h, g)
    }

    pub fn msystem<S: Scalar + CellValue>(m: &MSystem<S>) -> Self {
        let mut payload = header::<S>(m.profile());
        let mut comps = Map::new();
        for (a, row) in m.components().iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                comps.insert(format!("{},{}", a + 1, j + 1), f.to_json());
            }
        }
        payload.insert("components".into(), Value::Object(comps));
        Document::new(Kind::Msystem, Value::Object(payload))
    }

    /// Reads an M-system from an `msystem` or `bank` document, without
    /// verifying it.
    pub fn to_msystem<S: Scalar + CellValue>(&self) -> Result<MSystem<S>> {
        self.expect_kind(&[Kind::Msystem, Kind::Bank])?;
        if self.kind == Kind::Bank {
            return Ok(self.to_bank::<S>()?.flatten_unchecked());
        }
        let profile = parse_profile(&self.payload)?;
        let rows = profile.c() + profile.d();
        let comps = keyed_filters::<S>(&self.payload, "components", rows, profile.c())?;
        MSystem::from_components_unchecked(profile, comps)
    }

    pub fn loop_element<S: Scalar + CellValue>(k: &LoopElement<S>) -> Self {
        let mut payload = header::<S>(k.profile());
        payload.insert("section".into(), k.section().to_json());
        Document::new(Kind::LoopElement, Value::Object(payload))
    }

    pub fn to_loop_element<S: Scalar + CellValue>(&self) -> Result<LoopElement<S>> {
        self.expect_kind(&[Kind::LoopElement])?;
        let profile = parse_profile(&self.payload)?;
        let section = self
            .payload
            .get("section")
            .ok_or_else(|| GmraError::Parse("missing \"section\"".into()))
            .and_then(PiecewiseFn::<Matrix<S>>::from_json)?;
        LoopElement::new(profile, section)
    }

    pub fn classical(sys: &ClassicalMSystem) -> Self {
        Document::new(Kind::ClassicalMsystem, sys.to_json())
    }

    pub fn to_classical(&self) -> Result<ClassicalMSystem> {
        self.expect_kind(&[Kind::ClassicalMsystem])?;
        ClassicalMSystem::from_json(&self.payload)
    }

    pub fn grid_function<S: Scalar + CellValue>(f: &FrequencyGridFn<S>) -> Self {
        let mut payload = f.to_json();
        payload["scalar"] = json!(S::KIND);
        Document::new(Kind::GridFunction, payload)
    }

    pub fn to_grid_function<S: Scalar + CellValue>(&self) -> Result<FrequencyGridFn<S>> {
        self.expect_kind(&[Kind::GridFunction])?;
        FrequencyGridFn::from_json(&self.payload)
    }

    pub fn report<T: Serialize>(report: &T) -> Self {
        Document::new(
            Kind::Report,
            serde_json::to_value(report).expect("reports serialize"),
        )
    }
}

fn multiplicity_payload(mf: &MultiplicityFunction) -> Value {
    let mut v = mf.mu().to_json();
    v["N"] = json!(mf.dilation());
    v
}

fn parse_multiplicity(v: &Value) -> Result<MultiplicityFunction> {
    let n = v
        .get("N")
        .and_then(Value::as_u64)
        .ok_or_else(|| GmraError::Parse("missing dilation \"N\"".into()))?;
    let n = u32::try_from(n).map_err(|_| GmraError::InvalidDilation(u32::MAX))?;
    MultiplicityFunction::new(PiecewiseFn::<u32>::from_json(v)?, n)
}

fn header<S: Scalar + CellValue>(p: &DimensionProfile) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("scalar".into(), json!(S::KIND));
    m.insert("multiplicity".into(), multiplicity_payload(p.multiplicity()));
    m
}

fn parse_profile(payload: &Value) -> Result<DimensionProfile> {
    let mu = payload
        .get("multiplicity")
        .ok_or_else(|| GmraError::Parse("missing \"multiplicity\"".into()))?;
    DimensionProfile::new(parse_multiplicity(mu)?)
}

/// Reads `rows × copies` filters keyed `"r,j"`; missing keys are the zero function.
fn keyed_filters<S: Scalar + CellValue>(payload: &Value, field: &str, rows: usize, copies: usize) -> Result<Vec<Vec<PiecewiseFn<S>>>> {
    let empty = Map::new();
    let obj = match payload.get(field) {
        Some(Value::Object(o)) => o,
        Some(_) => return Err(GmraError::Parse(format!("\"{field}\" must be an object"))),
        None if rows == 0 => &empty,
        None => return Err(GmraError::Parse(format!("missing \"{field}\""))),
    };
    let mut parsed: BTreeMap<(usize, usize), PiecewiseFn<S>> = BTreeMap::new();
    for (key, value) in obj {
        let idx = key
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
            .filter(|&(a, b)| (1..=rows).contains(&a) && (1..=copies).contains(&b))
            .ok_or_else(|| GmraError::Parse(format!("bad index {key:?} in \"{field}\"")))?;
        parsed.insert(idx, PiecewiseFn::from_json(value)?);
    }
    Ok((1..=rows)
        .map(|a| {
            (1..=copies)
                .map(|j| {
                    parsed
                        .remove(&(a, j))
                        .unwrap_or_else(|| PiecewiseFn::constant(S::zero()))
                })
                .collect()
        })
        .collect())
}

/// A float copy of a document payload's M-system regardless of its field.
pub fn msystem_as_float(doc: &Document) -> Result<MSystem<Complex64>> {
    doc.to_msystem::<Complex64>()
}

/// An exact M-system when the document is exact.
pub fn msystem_as_exact(doc: &Document) -> Result<Option<MSystem<Exact>>> {
    match doc.scalar_kind()? {
        ScalarKind::Exact => doc.to_msystem::<Exact>().map(Some),
        ScalarKind::Float => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{journe_bank, journe_msystem};
    use crate::random::{random_loop_element, random_msystem};

    fn round_trip(doc: &Document) -> Document {
        Document::parse(&doc.to_pretty()).unwrap()
    }

    #[test]
    fn multiplicity_round_trip() {
        let mf = crate::fixtures::journe_multiplicity();
        let back = round_trip(&Document::multiplicity(&mf)).to_multiplicity().unwrap();
        assert_eq!(back.mu(), mf.mu());
        assert_eq!(back.dilation(), 2);
    }

    #[test]
    fn exact_msystem_round_trip() {
        let m = journe_msystem();
        let back: MSystem<Exact> = round_trip(&Document::msystem(&m)).to_msystem().unwrap();
        assert_eq!(back, m);
        let bank = journe_bank();
        let doc = round_trip(&Document::bank(&bank));
        assert_eq!(doc.to_bank::<Exact>().unwrap(), bank);
        assert_eq!(doc.to_msystem::<Exact>().unwrap(), m);
        // exact documents also load as floats
        assert!(doc.to_msystem::<Complex64>().is_ok());
    }

    #[test]
    fn float_documents_round_trip_bit_for_bit() {
        let p = journe_bank().profile().clone();
        let m = random_msystem(&p, 9);
        assert_eq!(round_trip(&Document::msystem(&m)).to_msystem::<Complex64>().unwrap(), m);
        let k = random_loop_element(&p, 4);
        let back = round_trip(&Document::loop_element(&k)).to_loop_element::<Complex64>().unwrap();
        assert_eq!(back.section(), k.section());
    }

    #[test]
    fn schema_errors() {
        assert!(Document::parse("{}").is_err());
        assert!(Document::parse(r#"{"kind":"msystem","version":7,"payload":{}}"#).is_err());
        let doc = Document::multiplicity(&crate::fixtures::journe_multiplicity());
        assert!(doc.to_msystem::<Exact>().is_err());
        let mut bad = Document::msystem(&journe_msystem());
        bad.payload["components"]["9,1"] = json!({"breakpoints": ["0"], "values": [["0", "0"]]});
        assert!(bad.to_msystem::<Exact>().is_err());
    }
}
