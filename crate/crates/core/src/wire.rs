//! JSON shapes for rings, elements, matrices, presentations and results.
//!
//! Elements are encoded per ring: integers as decimal strings (plain JSON integers are
//! accepted on input), `F_p[x]` elements as ascending coefficient arrays of integers, and
//! `Q[x]` elements as ascending arrays of `"a"` or `"a/b"` strings. A bare scalar is
//! accepted as a constant polynomial.
//!
//! ```json
//! {"ring": "int", "generators": 2, "relations": [["2", "0"], ["0", "0"]]}
//! {"ring": "fpx:5", "n": 2, "generators": 1, "relations": [[[[[0, 1], 0], [0, [0, 1]]]]]}
//! {"components": [{"n": 2, "base": "int"}, {"n": 1, "base": "qx"}]}
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::arith::{Element, Poly, PrimeField, Rationals, RingTag};
use crate::matring::{MatModPresentation, MatrixRingSpec, MatringError, ProductRingSpec};
use crate::modpid::{Presentation, StructureDescriptor};
use crate::smith::MatrixOverDomain;
use crate::taxonomy::{Summand, SummandTag, Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("at {path}: {detail}")]
    Invalid { path: String, detail: String },
}

impl WireError {
    fn invalid(path: impl Into<String>, detail: impl Into<String>) -> Self {
        WireError::Invalid { path: path.into(), detail: detail.into() }
    }
}

impl From<serde_json::Error> for WireError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        WireError::Syntax { line: e.line(), column: e.column(), message }
    }
}

/// Parses JSON text into `T`, reporting syntax and shape errors with line and column.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, WireError> {
    Ok(serde_json::from_str(text)?)
}

fn int_from_value(v: &Value, path: &str) -> Result<BigInt, WireError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| WireError::invalid(path, format!("{n} is not an integer"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| WireError::invalid(path, format!("{s:?} is not an integer"))),
        other => Err(WireError::invalid(path, format!("expected an integer, found {other}"))),
    }
}

fn rational_from_value(v: &Value, path: &str) -> Result<BigRational, WireError> {
    if let Value::String(s) = v {
        if let Some((a, b)) = s.split_once('/') {
            let num = int_from_value(&Value::String(a.into()), path)?;
            let den = int_from_value(&Value::String(b.into()), path)?;
            if den.is_zero() {
                return Err(WireError::invalid(path, "zero denominator"));
            }
            return Ok(BigRational::new(num, den));
        }
    }
    Ok(BigRational::from_integer(int_from_value(v, path)?))
}

fn coefficient_list(v: &Value) -> Vec<(usize, &Value)> {
    match v {
        Value::Array(items) => items.iter().enumerate().collect(),
        scalar => vec![(0, scalar)],
    }
}

pub fn element_from_json(ring: RingTag, v: &Value, path: &str) -> Result<Element, WireError> {
    match ring {
        RingTag::Integers => Ok(Element::Int(int_from_value(v, path)?)),
        RingTag::PolyOverPrimeField(p) => {
            let field = PrimeField::new(p);
            let coeffs = coefficient_list(v)
                .into_iter()
                .map(|(i, c)| Ok(field.reduce_bigint(&int_from_value(c, &format!("{path}[{i}]"))?)))
                .collect::<Result<Vec<_>, WireError>>()?;
            Ok(Element::Fp(Poly::new(field, coeffs)))
        }
        RingTag::PolyOverRationals => {
            let coeffs = coefficient_list(v)
                .into_iter()
                .map(|(i, c)| rational_from_value(c, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Element::Rat(Poly::new(Rationals, coeffs)))
        }
    }
}

pub fn element_to_json(e: &Element) -> Value {
    match e {
        Element::Int(n) => Value::String(n.to_string()),
        Element::Fp(f) => Value::Array(f.coeffs().iter().map(|&c| Value::from(c)).collect()),
        Element::Rat(f) => Value::Array(
            f.coeffs()
                .iter()
                .map(|c| {
                    if c.denom().is_one() {
                        Value::String(c.numer().to_string())
                    } else {
                        Value::String(format!("{}/{}", c.numer(), c.denom()))
                    }
                })
                .collect(),
        ),
    }
}

fn ring_or(ring: Option<RingTag>, fallback: Option<RingTag>) -> RingTag {
    ring.or(fallback).unwrap_or(RingTag::Integers)
}

fn matrix_from_rows(
    ring: RingTag,
    cols: usize,
    rows: &[Vec<Value>],
    path: &str,
) -> Result<MatrixOverDomain, WireError> {
    let mut entries = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(WireError::invalid(
                format!("{path}[{i}]"),
                format!("row has {} entries, expected {cols}", row.len()),
            ));
        }
        entries.push(
            row.iter()
                .enumerate()
                .map(|(j, v)| element_from_json(ring, v, &format!("{path}[{i}][{j}]")))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    MatrixOverDomain::from_rows(ring, cols, entries).map_err(|e| WireError::invalid(path, e.to_string()))
}

fn rows_to_json(m: &MatrixOverDomain) -> Vec<Vec<Value>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(element_to_json).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub entries: Vec<Vec<Value>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &MatrixOverDomain) -> Self {
        MatrixJson { ring: Some(m.ring()), rows: Some(m.rows()), cols: Some(m.cols()), entries: rows_to_json(m) }
    }

    pub fn to_matrix(&self, fallback: Option<RingTag>) -> Result<MatrixOverDomain, WireError> {
        let ring = ring_or(self.ring, fallback);
        let cols = self.cols.or_else(|| self.entries.first().map(Vec::len)).unwrap_or(0);
        if let Some(r) = self.rows.filter(|&r| r != self.entries.len()) {
            return Err(WireError::invalid("rows", format!("declared {r}, found {}", self.entries.len())));
        }
        matrix_from_rows(ring, cols, &self.entries, "entries")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresentationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingTag>,
    pub generators: usize,
    #[serde(default)]
    pub relations: Vec<Vec<Value>>,
}

impl PresentationJson {
    pub fn from_presentation(p: &Presentation) -> Self {
        PresentationJson {
            ring: Some(p.ring()),
            generators: p.generators(),
            relations: rows_to_json(p.relations()),
        }
    }

    pub fn to_presentation(&self, fallback: Option<RingTag>) -> Result<Presentation, WireError> {
        let ring = ring_or(self.ring, fallback);
        let m = matrix_from_rows(ring, self.generators, &self.relations, "relations")?;
        Presentation::new(ring, self.generators, m).map_err(|e| WireError::invalid("relations", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorJson {
    pub ring: RingTag,
    pub free_rank: usize,
    pub invariant_factors: Vec<Value>,
    /// Human-readable form; ignored on input.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub text: String,
}

impl DescriptorJson {
    pub fn from_descriptor(s: &StructureDescriptor) -> Self {
        DescriptorJson {
            ring: s.ring(),
            free_rank: s.free_rank(),
            invariant_factors: s.invariant_factors().iter().map(element_to_json).collect(),
            text: s.to_string(),
        }
    }

    /// Accepts factors in any order and unnormalized; they are canonicalized.
    pub fn to_descriptor(&self) -> Result<StructureDescriptor, WireError> {
        let entries = self
            .invariant_factors
            .iter()
            .enumerate()
            .map(|(i, v)| element_from_json(self.ring, v, &format!("invariant_factors[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        StructureDescriptor::from_diagonal(self.ring, self.free_rank, &entries)
            .map_err(|e| WireError::invalid("invariant_factors", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub n: usize,
    pub base: RingTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpecJson {
    pub components: Vec<ComponentJson>,
}

impl RingSpecJson {
    pub fn from_spec(spec: &ProductRingSpec) -> Self {
        RingSpecJson {
            components: spec.components().iter().map(|c| ComponentJson { n: c.n(), base: c.base() }).collect(),
        }
    }

    pub fn to_spec(&self) -> Result<ProductRingSpec, WireError> {
        let comps = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                MatrixRingSpec::new(c.n, c.base).map_err(|e| WireError::invalid(format!("components[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ProductRingSpec::new(comps).map_err(|e| WireError::invalid("components", e.to_string()))
    }
}

/// Module over `M_n(ring)`: `relations[i][j]` is an `n x n` block (list of rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatModJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingTag>,
    pub n: usize,
    pub generators: usize,
    #[serde(default)]
    pub relations: Vec<Vec<Vec<Vec<Value>>>>,
}

impl MatModJson {
    pub fn from_presentation(m: &MatModPresentation) -> Self {
        let spec = m.spec();
        MatModJson {
            ring: Some(spec.base()),
            n: spec.n(),
            generators: m.generators(),
            relations: (0..m.relation_count())
                .map(|i| (0..m.generators()).map(|j| rows_to_json(&m.block(i, j))).collect())
                .collect(),
        }
    }

    pub fn to_presentation(&self, fallback: Option<RingTag>) -> Result<MatModPresentation, WireError> {
        let ring = ring_or(self.ring, fallback);
        let spec = MatrixRingSpec::new(self.n, ring).map_err(|e| WireError::invalid("n", e.to_string()))?;
        let mut blocks = Vec::with_capacity(self.relations.len());
        for (i, row) in self.relations.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, block) in row.iter().enumerate() {
                let path = format!("relations[{i}][{j}]");
                if block.len() != self.n {
                    return Err(WireError::invalid(path, format!("block has {} rows, expected {}", block.len(), self.n)));
                }
                out.push(matrix_from_rows(ring, self.n, block, &path)?);
            }
            blocks.push(out);
        }
        MatModPresentation::from_blocks(spec, self.generators, &blocks).map_err(|e: MatringError| {
            WireError::invalid("relations", e.to_string())
        })
    }
}

/// Anything `analyze` accepts.
#[derive(Debug, Clone, PartialEq)]
pub enum ModuleInput {
    Presentation(Presentation),
    MatMod(MatModPresentation),
    Descriptor(StructureDescriptor),
}

/// Reads a presentation (`generators` + `relations`), a matrix-ring module (with `n`),
/// or a descriptor (`free_rank` + `invariant_factors`).
pub fn parse_module(text: &str, fallback: Option<RingTag>) -> Result<ModuleInput, WireError> {
    let v: Value = parse_json(text)?;
    let Some(obj) = v.as_object() else {
        return Err(WireError::invalid("$", "expected a JSON object"));
    };
    if obj.contains_key("n") {
        let m: MatModJson = serde_json::from_value(v).map_err(|e| WireError::invalid("$", e.to_string()))?;
        Ok(ModuleInput::MatMod(m.to_presentation(fallback)?))
    } else if obj.contains_key("invariant_factors") || obj.contains_key("free_rank") {
        let mut obj = obj.clone();
        if !obj.contains_key("ring") {
            obj.insert("ring".into(), Value::String(ring_or(None, fallback).to_string()));
        }
        let d: DescriptorJson =
            serde_json::from_value(Value::Object(obj)).map_err(|e| WireError::invalid("$", e.to_string()))?;
        Ok(ModuleInput::Descriptor(d.to_descriptor()?))
    } else {
        let p: PresentationJson = serde_json::from_value(v).map_err(|e| WireError::invalid("$", e.to_string()))?;
        Ok(ModuleInput::Presentation(p.to_presentation(fallback)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessJson {
    SquareFactor { base: Value, factor: Value },
    Submodule { descriptor: DescriptorJson },
    Quotient { descriptor: DescriptorJson },
    NonHomocyclic { prime: Value, exponents: Vec<u32> },
    FreePart { rank: usize },
    ZeroModule,
}

impl WitnessJson {
    pub fn from_witness(w: &Witness) -> Self {
        match w {
            Witness::SquareFactor { base, factor } => {
                WitnessJson::SquareFactor { base: element_to_json(base), factor: element_to_json(factor) }
            }
            Witness::Submodule(s) => WitnessJson::Submodule { descriptor: DescriptorJson::from_descriptor(s) },
            Witness::Quotient(s) => WitnessJson::Quotient { descriptor: DescriptorJson::from_descriptor(s) },
            Witness::NonHomocyclic { prime, exponents } => {
                WitnessJson::NonHomocyclic { prime: element_to_json(prime), exponents: exponents.clone() }
            }
            Witness::FreePart { rank } => WitnessJson::FreePart { rank: *rank },
            Witness::ZeroModule => WitnessJson::ZeroModule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub predicate: String,
    pub value: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    pub citation: String,
}

impl VerdictJson {
    pub fn from_verdict(v: &Verdict) -> Self {
        VerdictJson {
            predicate: v.predicate.to_string(),
            value: v.value,
            witness: v.witness.as_ref().map(WitnessJson::from_witness),
            citation: v.citation.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummandJson {
    pub descriptor: DescriptorJson,
    pub tag: SummandTag,
}

impl SummandJson {
    pub fn from_summand(s: &Summand) -> Self {
        SummandJson { descriptor: DescriptorJson::from_descriptor(&s.descriptor), tag: s.tag }
    }
}
