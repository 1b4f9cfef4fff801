//! The structured text input format shared between the library and the
//! command line tool.
//!
//! A document is a JSON object holding either a map or a form:
//!
//! ```json
//! {"map":  {"n": 2, "m": 2, "field": "real",
//!           "coeffs": [{"j": 1, "exponents": [2, 0], "value": "1"}]}}
//! {"form": {"n": 3, "degree": 3,
//!           "terms": [{"exponents": [1, 1, 1], "value": "1"}]}}
//! ```
//!
//! Component indices `j` are one-based. Values are decimal strings or exact
//! rationals `"p/q"`; inputs whose values are all integers or fractions take
//! the exact rational path, a decimal anywhere selects floating point.

use crate::error::{Error, Result};
use crate::tensor::{Form, HomogeneousMap};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldTag {
    Real,
    Complex,
}

/// A parsed input object; rational unless the document carried decimals.
#[derive(Debug, Clone)]
pub enum InputObject {
    RationalMap(HomogeneousMap<BigRational>),
    FloatMap(HomogeneousMap<f64>),
    RationalForm(Form<BigRational>),
    FloatForm(Form<f64>),
}

#[derive(Debug, Clone)]
pub struct ParsedInput {
    pub object: InputObject,
    pub field: FieldTag,
    /// All values were given as integers or `p/q` fractions.
    pub exact: bool,
}

#[derive(Serialize, Deserialize)]
struct Doc {
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<MapDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    form: Option<FormDoc>,
}

#[derive(Serialize, Deserialize)]
struct MapDoc {
    n: usize,
    m: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    coeffs: Vec<CoeffEntry>,
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    j: usize,
    exponents: Vec<u32>,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct FormDoc {
    n: usize,
    degree: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    terms: Vec<TermEntry>,
}

#[derive(Serialize, Deserialize)]
struct TermEntry {
    exponents: Vec<u32>,
    value: String,
}

fn parse_value(s: &str, at: &str) -> Result<(BigRational, bool)> {
    let s = s.trim();
    let exact = !s.contains('.') && !s.contains('e') && !s.contains('E');
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt =
            p.trim().parse().map_err(|_| Error::Parse(format!("{}: bad rational '{}'", at, s)))?;
        let q: BigInt =
            q.trim().parse().map_err(|_| Error::Parse(format!("{}: bad rational '{}'", at, s)))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("{}: zero denominator", at)));
        }
        return Ok((BigRational::new(p, q), true));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("{}: bad decimal '{}'", at, s)))?;
        let den = BigInt::from(10).pow(frac.len() as u32);
        let r = BigRational::new(num, den);
        return Ok((if int.starts_with('-') { -r } else { r }, exact));
    }
    let p: BigInt =
        s.parse().map_err(|_| Error::Parse(format!("{}: bad number '{}'", at, s)))?;
    Ok((BigRational::from_integer(p), exact))
}

fn parse_field(tag: &Option<String>) -> Result<FieldTag> {
    match tag.as_deref() {
        None | Some("real") => Ok(FieldTag::Real),
        Some("complex") => Ok(FieldTag::Complex),
        Some(other) => Err(Error::Parse(format!("unknown field '{}'", other))),
    }
}

/// Parse a map or form document, preserving exact rationals and validating
/// dimensions and exponent sums entry by entry.
pub fn parse_input(text: &str) -> Result<ParsedInput> {
    let doc: Doc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad document: {}", e)))?;
    match (doc.map, doc.form) {
        (Some(m), None) => parse_map(m),
        (None, Some(f)) => parse_form(f),
        (Some(_), Some(_)) => Err(Error::Parse("document holds both a map and a form".into())),
        (None, None) => Err(Error::Parse("document holds neither map nor form".into())),
    }
}

fn parse_map(doc: MapDoc) -> Result<ParsedInput> {
    let field = parse_field(&doc.field)?;
    let mut exact = true;
    let mut entries: Vec<(usize, Vec<u32>, BigRational)> = Vec::new();
    for (idx, e) in doc.coeffs.iter().enumerate() {
        let at = format!("coeffs[{}]", idx);
        if e.j < 1 || e.j > doc.n {
            return Err(Error::Parse(format!(
                "{}: component index {} outside 1..={}",
                at, e.j, doc.n
            )));
        }
        if e.exponents.len() != doc.n {
            return Err(Error::Parse(format!(
                "{}: {} exponents, expected {}",
                at,
                e.exponents.len(),
                doc.n
            )));
        }
        let sum: u32 = e.exponents.iter().sum();
        if sum != doc.m {
            return Err(Error::Parse(format!(
                "{}: exponents {:?} sum to {}, expected degree {}",
                at, e.exponents, sum, doc.m
            )));
        }
        let (v, ex) = parse_value(&e.value, &at)?;
        exact &= ex;
        entries.push((e.j - 1, e.exponents.clone(), v));
    }
    let map = HomogeneousMap::from_entries(doc.n, doc.m, entries)?;
    let object = if exact {
        InputObject::RationalMap(map)
    } else {
        InputObject::FloatMap(map.to_f64())
    };
    Ok(ParsedInput { object, field, exact })
}

fn parse_form(doc: FormDoc) -> Result<ParsedInput> {
    let field = parse_field(&doc.field)?;
    let mut exact = true;
    let mut terms: Vec<(Vec<u32>, BigRational)> = Vec::new();
    for (idx, e) in doc.terms.iter().enumerate() {
        let at = format!("terms[{}]", idx);
        if e.exponents.len() != doc.n {
            return Err(Error::Parse(format!(
                "{}: {} exponents, expected {}",
                at,
                e.exponents.len(),
                doc.n
            )));
        }
        let sum: u32 = e.exponents.iter().sum();
        if sum != doc.degree {
            return Err(Error::Parse(format!(
                "{}: exponents {:?} sum to {}, expected degree {}",
                at, e.exponents, sum, doc.degree
            )));
        }
        let (v, ex) = parse_value(&e.value, &at)?;
        exact &= ex;
        terms.push((e.exponents.clone(), v));
    }
    let form = Form::from_terms(doc.n, doc.degree, terms)?;
    let object =
        if exact { InputObject::RationalForm(form) } else { InputObject::FloatForm(form.to_f64()) };
    Ok(ParsedInput { object, field, exact })
}

fn rat_value_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serialize a rational map back to the document format (round-trip exact).
pub fn map_to_document(map: &HomogeneousMap<BigRational>, field: FieldTag) -> String {
    let coeffs = map
        .components()
        .iter()
        .enumerate()
        .flat_map(|(j, form)| {
            form.terms().map(move |(mi, c)| CoeffEntry {
                j: j + 1,
                exponents: mi.0.clone(),
                value: rat_value_string(c),
            })
        })
        .collect();
    let doc = Doc {
        map: Some(MapDoc {
            n: map.n(),
            m: map.degree(),
            field: Some(field_name(field).into()),
            coeffs,
        }),
        form: None,
    };
    serde_json::to_string(&doc).expect("serialization")
}

/// Serialize a float map; values use the shortest round-trip representation.
pub fn map_to_document_f64(map: &HomogeneousMap<f64>, field: FieldTag) -> String {
    let coeffs = map
        .components()
        .iter()
        .enumerate()
        .flat_map(|(j, form)| {
            form.terms().map(move |(mi, c)| CoeffEntry {
                j: j + 1,
                exponents: mi.0.clone(),
                value: f64_value_string(*c),
            })
        })
        .collect();
    let doc = Doc {
        map: Some(MapDoc {
            n: map.n(),
            m: map.degree(),
            field: Some(field_name(field).into()),
            coeffs,
        }),
        form: None,
    };
    serde_json::to_string(&doc).expect("serialization")
}

/// Serialize a rational form back to the document format (round-trip exact).
pub fn form_to_document(form: &Form<BigRational>, field: FieldTag) -> String {
    let terms = form
        .terms()
        .map(|(mi, c)| TermEntry { exponents: mi.0.clone(), value: rat_value_string(c) })
        .collect();
    let doc = Doc {
        map: None,
        form: Some(FormDoc {
            n: form.n(),
            degree: form.degree(),
            field: Some(field_name(field).into()),
            terms,
        }),
    };
    serde_json::to_string(&doc).expect("serialization")
}

fn field_name(f: FieldTag) -> &'static str {
    match f {
        FieldTag::Real => "real",
        FieldTag::Complex => "complex",
    }
}

fn f64_value_string(v: f64) -> String {
    let s = format!("{}", v);
    // the decimal point marks the value as floating point on the way back in
    if s.contains('.') || s.contains('e') {
        s
    } else {
        format!("{}.0", s)
    }
}

/// Convenience accessors over the parsed object.
impl ParsedInput {
    pub fn as_real_map_f64(&self) -> Result<HomogeneousMap<f64>> {
        match &self.object {
            InputObject::RationalMap(m) => Ok(m.to_f64()),
            InputObject::FloatMap(m) => Ok(m.clone()),
            _ => Err(Error::Parse("expected a map document".into())),
        }
    }

    pub fn as_form_f64(&self) -> Result<Form<f64>> {
        match &self.object {
            InputObject::RationalForm(f) => Ok(f.to_f64()),
            InputObject::FloatForm(f) => Ok(f.clone()),
            _ => Err(Error::Parse("expected a form document".into())),
        }
    }

    pub fn as_rational_form(&self) -> Result<Form<BigRational>> {
        match &self.object {
            InputObject::RationalForm(f) => Ok(f.clone()),
            InputObject::FloatForm(f) => Ok(f.to_rational()),
            _ => Err(Error::Parse("expected a form document".into())),
        }
    }
}
