//! Versioned JSON documents.
//!
//! ```json
//! {"version": "1", "kind": "blowup_bundle",
//!  "payload": {"matrix": [[[{"t": 1, "x": 0, "re": "1", "im": "0"}], []],
//!                         [[], [{"t": -1, "x": 0, "re": "1", "im": "0"}]]],
//!              "jet_order": 4}}
//! ```
//!
//! Polynomials are arrays of terms, matrices row-major nested arrays,
//! profiles arrays of `{"rank", "slope", "label"?}`. Rationals are strings
//! `"p"` or `"p/q"`; output is always in lowest terms with the sign on the
//! numerator. Unknown fields are rejected everywhere.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::blowup_bundle::BlowupBundle;
use crate::error::{Error, Result};
use crate::exact_algebra::{
    format_rational, parse_rational, JetLaurentMatrix, JetLaurentPoly, Rational, Scalar,
};
use crate::hn_profile::{Block, HNProfile};
use crate::p1_bundle::P1Transition;

pub const FORMAT_VERSION: &str = "1";

/// Joins merged block labels when a block is written back out.
const LABEL_JOIN: &str = " + ";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    P1Transition,
    BlowupBundle,
    HnProfile,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::P1Transition => "p1_transition",
            Kind::BlowupBundle => "blowup_bundle",
            Kind::HnProfile => "hn_profile",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "p1_transition" => Ok(Kind::P1Transition),
            "blowup_bundle" => Ok(Kind::BlowupBundle),
            "hn_profile" => Ok(Kind::HnProfile),
            other => Err(Error::schema(
                "kind",
                format!(
                    "unknown kind {other:?}; expected p1_transition, blowup_bundle or hn_profile"
                ),
            )),
        }
    }
}

/// A parsed, validated document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    P1Transition(P1Transition),
    /// The bundle and the jet order given in the file, if any.
    BlowupBundle(BlowupBundle, Option<u32>),
    HnProfile(HNProfile),
}

impl Document {
    pub fn kind(&self) -> Kind {
        match self {
            Document::P1Transition(_) => Kind::P1Transition,
            Document::BlowupBundle(..) => Kind::BlowupBundle,
            Document::HnProfile(_) => Kind::HnProfile,
        }
    }

    pub fn to_json(&self) -> Value {
        let payload = match self {
            Document::P1Transition(t) => {
                serde_json::json!({ "matrix": matrix_to_json(t.matrix()) })
            }
            Document::BlowupBundle(b, jet) => {
                let mut v = serde_json::json!({ "matrix": matrix_to_json(b.transition()) });
                if let Some(n) = jet {
                    v["jet_order"] = (*n).into();
                }
                v
            }
            Document::HnProfile(p) => profile_payload(p),
        };
        serde_json::json!({
            "version": FORMAT_VERSION,
            "kind": self.kind().as_str(),
            "payload": payload,
        })
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("json values serialize")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    version: String,
    kind: String,
    payload: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    t: i64,
    x: u32,
    re: String,
    im: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixPayload {
    matrix: Vec<Vec<Vec<TermDoc>>>,
    #[serde(default)]
    jet_order: Option<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockDoc {
    rank: u32,
    slope: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfilePayload {
    blocks: Vec<BlockDoc>,
    #[serde(default)]
    base_dimension: Option<u32>,
}

/// Parses any document, checking envelope, version and schema.
pub fn parse_document(text: &str) -> Result<Document> {
    let envelope: Envelope = serde_json::from_str(text).map_err(|e| serde_error("document", e))?;
    if envelope.version != FORMAT_VERSION {
        return Err(Error::schema(
            "version",
            format!(
                "unsupported version {:?}; expected {FORMAT_VERSION:?}",
                envelope.version
            ),
        ));
    }
    match Kind::parse(&envelope.kind)? {
        Kind::P1Transition => {
            let payload: MatrixPayload = from_payload(envelope.payload)?;
            if payload.jet_order.is_some() {
                return Err(Error::schema(
                    "payload.jet_order",
                    "not allowed for p1_transition",
                ));
            }
            let m = matrix_from_doc(&payload.matrix, 0)?;
            Ok(Document::P1Transition(P1Transition::new(m)?))
        }
        Kind::BlowupBundle => {
            let payload: MatrixPayload = from_payload(envelope.payload)?;
            let m = matrix_from_doc(&payload.matrix, u32::MAX)?;
            let m = match payload.jet_order {
                Some(n) => {
                    if let Some(d) = m.x_degree().filter(|&d| d > n) {
                        return Err(Error::schema(
                            "payload.jet_order",
                            format!("{n} is below the highest x-power {d} present"),
                        ));
                    }
                    m.with_jet_order(n)
                }
                None => m.with_jet_order(BlowupBundle::default_jet_order(&m)?),
            };
            Ok(Document::BlowupBundle(
                BlowupBundle::new(m)?,
                payload.jet_order,
            ))
        }
        Kind::HnProfile => {
            let payload: ProfilePayload = from_payload(envelope.payload)?;
            Ok(Document::HnProfile(profile_from_doc(payload)?))
        }
    }
}

/// Parses a document that must be of kind `expected`.
pub fn parse_expecting(text: &str, expected: &[Kind]) -> Result<Document> {
    let doc = parse_document(text)?;
    if !expected.contains(&doc.kind()) {
        let names: Vec<&str> = expected.iter().map(|k| k.as_str()).collect();
        return Err(Error::schema(
            "kind",
            format!(
                "got {:?}, expected {}",
                doc.kind().as_str(),
                names.join(" or ")
            ),
        ));
    }
    Ok(doc)
}

fn serde_error(context: &str, e: serde_json::Error) -> Error {
    Error::schema(context, e.to_string())
}

fn from_payload<T: for<'de> Deserialize<'de>>(payload: Value) -> Result<T> {
    serde_json::from_value(payload).map_err(|e| serde_error("payload", e))
}

fn rational_field(s: &str, field: impl Fn() -> String) -> Result<Rational> {
    let q = parse_rational(s).map_err(|e| Error::schema(field(), e.to_string()))?;
    Ok(q)
}

fn matrix_from_doc(rows: &[Vec<Vec<TermDoc>>], jet_order: u32) -> Result<JetLaurentMatrix> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::schema("payload.matrix", "empty matrix"));
    }
    let mut out = Vec::with_capacity(r);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != r {
            return Err(Error::schema(
                format!("payload.matrix[{i}]"),
                format!("row has {} entries, expected {r}", row.len()),
            ));
        }
        let mut prow = Vec::with_capacity(r);
        for (j, terms) in row.iter().enumerate() {
            let mut parsed = Vec::with_capacity(terms.len());
            for (k, term) in terms.iter().enumerate() {
                let path = |f: &str| format!("payload.matrix[{i}][{j}][{k}].{f}");
                let re = rational_field(&term.re, || path("re"))?;
                let im = rational_field(&term.im, || path("im"))?;
                parsed.push((term.t, term.x, Scalar::new(re, im)));
            }
            let jet = if jet_order == u32::MAX {
                parsed.iter().map(|(_, x, _)| *x).max().unwrap_or(0)
            } else {
                jet_order
            };
            if jet_order == 0 {
                if let Some(k) = parsed.iter().position(|(_, x, _)| *x > 0) {
                    return Err(Error::schema(
                        format!("payload.matrix[{i}][{j}][{k}].x"),
                        "p1_transition entries must have x = 0",
                    ));
                }
            }
            prow.push(JetLaurentPoly::from_terms(parsed, jet));
        }
        out.push(prow);
    }
    let max_x = out
        .iter()
        .flatten()
        .map(|p| p.jet_order())
        .max()
        .unwrap_or(0);
    let out = out
        .into_iter()
        .map(|row| row.into_iter().map(|p| p.with_jet_order(max_x)).collect())
        .collect();
    JetLaurentMatrix::from_rows(out)
}

fn profile_from_doc(payload: ProfilePayload) -> Result<HNProfile> {
    let mut blocks = Vec::with_capacity(payload.blocks.len());
    for (i, b) in payload.blocks.into_iter().enumerate() {
        let slope = rational_field(&b.slope, || format!("payload.blocks[{i}].slope"))?;
        if b.rank == 0 {
            return Err(Error::schema(
                format!("payload.blocks[{i}].rank"),
                "rank must be positive",
            ));
        }
        blocks.push(match b.label {
            Some(l) => Block::labelled(b.rank, slope, l),
            None => Block::new(b.rank, slope),
        });
    }
    HNProfile::new(blocks, payload.base_dimension.unwrap_or(2))
}

pub fn term_to_json(t: i64, x: u32, c: &Scalar) -> Value {
    serde_json::to_value(TermDoc {
        t,
        x,
        re: format_rational(&c.re),
        im: format_rational(&c.im),
    })
    .expect("terms serialize")
}

pub fn poly_to_json(p: &JetLaurentPoly) -> Value {
    Value::Array(p.terms().map(|(m, c)| term_to_json(m.t, m.x, c)).collect())
}

pub fn matrix_to_json(m: &JetLaurentMatrix) -> Value {
    Value::Array(
        m.rows()
            .map(|row| Value::Array(row.iter().map(poly_to_json).collect()))
            .collect(),
    )
}

pub fn blocks_to_json(p: &HNProfile) -> Value {
    Value::Array(
        p.blocks()
            .iter()
            .map(|b| {
                serde_json::to_value(BlockDoc {
                    rank: b.rank,
                    slope: format_rational(&b.slope),
                    label: (!b.labels.is_empty()).then(|| b.labels.join(LABEL_JOIN)),
                })
                .expect("blocks serialize")
            })
            .collect(),
    )
}

fn profile_payload(p: &HNProfile) -> Value {
    let mut v = serde_json::json!({ "blocks": blocks_to_json(p) });
    if p.base_dimension() != 2 {
        v["base_dimension"] = p.base_dimension().into();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING: &str = r#"{"version":"1","kind":"blowup_bundle","payload":{"matrix":[
        [[{"t":1,"x":0,"re":"1","im":"0"}],[{"t":0,"x":1,"re":"1","im":"0"}]],
        [[],[{"t":-1,"x":0,"re":"1","im":"0"}]]]}}"#;

    fn round_trip(doc: &Document) {
        let text = doc.to_string_pretty();
        let back = parse_document(&text).unwrap();
        assert_eq!(&back, doc);
        assert_eq!(back.to_string_pretty(), text);
    }

    #[test]
    fn parses_running_example_with_default_jet_order() {
        let Document::BlowupBundle(b, jet) = parse_document(RUNNING).unwrap() else {
            panic!("wrong kind");
        };
        assert_eq!(jet, None);
        assert_eq!(b.jet_order(), 4);
        assert_eq!(b.phi(), 2);
    }

    #[test]
    fn round_trips() {
        let doc = parse_document(RUNNING).unwrap();
        let Document::BlowupBundle(b, _) = doc else {
            unreachable!()
        };
        round_trip(&Document::BlowupBundle(b, Some(4)));
        let profile = HNProfile::new(
            vec![
                Block::labelled(1, Rational::from_integer(2.into()), "O(2)"),
                Block::new(2, Rational::new(3.into(), 2.into())),
            ],
            3,
        )
        .unwrap();
        round_trip(&Document::HnProfile(profile));
        let t = P1Transition::new(JetLaurentMatrix::t_diagonal(&[2, -1], 0)).unwrap();
        round_trip(&Document::P1Transition(t));
    }

    #[test]
    fn rationals_are_canonical() {
        let text = r#"{"version":"1","kind":"hn_profile","payload":{"blocks":[
            {"rank":2,"slope":"6/4"},{"rank":1,"slope":"-0/5"}]}}"#;
        let doc = parse_document(text).unwrap();
        let out = doc.to_json();
        assert_eq!(out["payload"]["blocks"][0]["slope"], "3/2");
        assert_eq!(out["payload"]["blocks"][1]["slope"], "0");
        let neg = r#"{"version":"1","kind":"hn_profile","payload":{"blocks":[{"rank":2,"slope":"1/-2"}]}}"#;
        let out = parse_document(neg).unwrap().to_json();
        assert_eq!(out["payload"]["blocks"][0]["slope"], "-1/2");
    }

    fn schema_field(text: &str) -> String {
        match parse_document(text) {
            Err(Error::Schema { field, message }) => format!("{field}: {message}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad_rational = RUNNING.replacen(r#""re":"1""#, r#""re":"one""#, 1);
        assert!(schema_field(&bad_rational).starts_with("payload.matrix[0][0][0].re"));
        let unknown = RUNNING.replacen(r#""matrix""#, r#""matrx""#, 1);
        assert!(schema_field(&unknown).contains("matrx"));
        let version = RUNNING.replacen(r#""version":"1""#, r#""version":"2""#, 1);
        assert!(schema_field(&version).starts_with("version"));
        let kind = RUNNING.replacen("blowup_bundle", "sheaf", 1);
        assert!(schema_field(&kind).starts_with("kind"));
        let extra = RUNNING.replacen(r#""version":"1","#, r#""version":"1","extra":0,"#, 1);
        assert!(schema_field(&extra).contains("extra"));
        let zero_den = r#"{"version":"1","kind":"hn_profile","payload":{"blocks":[{"rank":1,"slope":"1/0"}]}}"#;
        assert!(schema_field(zero_den).starts_with("payload.blocks[0].slope"));
        let ragged =
            r#"{"version":"1","kind":"p1_transition","payload":{"matrix":[[[],[]],[[]]]}}"#;
        assert!(schema_field(ragged).starts_with("payload.matrix[1]"));
    }

    #[test]
    fn invalid_profiles_and_bundles() {
        let increasing = r#"{"version":"1","kind":"hn_profile","payload":{"blocks":[
            {"rank":1,"slope":"0"},{"rank":1,"slope":"1"}]}}"#;
        assert!(matches!(
            parse_document(increasing),
            Err(Error::InvalidProfile(_))
        ));
        let bad_den = r#"{"version":"1","kind":"hn_profile","payload":{"blocks":[{"rank":2,"slope":"1/3"}]}}"#;
        assert!(matches!(
            parse_document(bad_den),
            Err(Error::InvalidProfile(_))
        ));
        let singular = r#"{"version":"1","kind":"blowup_bundle","payload":{"matrix":[
            [[{"t":0,"x":0,"re":"1","im":"0"}],[{"t":0,"x":0,"re":"1","im":"0"}]],
            [[{"t":0,"x":0,"re":"1","im":"0"}],[{"t":0,"x":0,"re":"1","im":"0"}]]]}}"#;
        assert_eq!(parse_document(singular), Err(Error::NotInvertible));
    }

    #[test]
    fn kind_mismatch() {
        let err = parse_expecting(RUNNING, &[Kind::HnProfile]).unwrap_err();
        assert!(matches!(err, Error::Schema { ref field, .. } if field == "kind"));
    }

    #[test]
    fn explicit_jet_order_below_input_is_rejected() {
        let text = RUNNING.replacen(r#""payload":{"#, r#""payload":{"jet_order":0,"#, 1);
        assert!(schema_field(&text).starts_with("payload.jet_order"));
    }
}
