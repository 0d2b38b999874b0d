//! Report types and command implementations behind the `virtmod` binary.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use virtmod::arith::RingTag;
use virtmod::matring::{
    is_virtually_simple_matmod, ring_analyze, transport_to_base, MatringError, MatrixRingSpec, RingReport,
    VDomainStatus,
};
use virtmod::modpid::{embeds, structure, ModError, StructureDescriptor};
use virtmod::oracle::{validate, OracleConfig, OracleError, ValidationReport};
use virtmod::smith::{invariant_factors, smith_normal_form, verify_snf};
use virtmod::taxonomy::{
    all_verdicts, citation, decompose_virtually_simple, ks_certify, VirtualError, Witness,
};
use virtmod::wire::{
    element_to_json, parse_json, parse_module, DescriptorJson, MatrixJson, ModuleInput, PresentationJson,
    RingSpecJson, SummandJson, VerdictJson, WireError, WitnessJson,
};

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable file or malformed input; exit code 1.
    #[error("{0}")]
    Input(String),
    /// The input is well formed but the operation is refused; exit code 2.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

impl From<WireError> for CliError {
    fn from(e: WireError) -> Self {
        CliError::Input(e.to_string())
    }
}

macro_rules! domain_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}
domain_errors!(ModError, VirtualError, MatringError, OracleError);

pub fn read_input(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateFailure {
    pub predicate: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecompositionJson {
    Decomposed { summands: Vec<SummandJson> },
    NotDecomposable { witness: WitnessJson },
    Unavailable { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: Value,
    /// `presentation`, `matrix_module` or `descriptor`.
    pub input_kind: String,
    /// Set for modules over `M_n(D)`; the descriptor is then that of the transported
    /// module over `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_ring: Option<ComponentJsonOut>,
    pub descriptor: DescriptorJson,
    pub verdicts: Vec<VerdictJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undecided: Vec<PredicateFailure>,
    pub decomposition: DecompositionJson,
    pub citations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJsonOut {
    pub n: usize,
    pub base: RingTag,
}

impl AnalysisReport {
    pub fn render(&self) -> String {
        let mut out = format!("module: {}", self.descriptor.text);
        if let Some(m) = &self.matrix_ring {
            out += &format!(" (transported from M_{}({}))", m.n, m.base);
        }
        out.push('\n');
        for v in &self.verdicts {
            out += &format!("  {:<32} {}", v.predicate, v.value);
            if let Some(w) = &v.witness {
                out += &format!("  [witness: {}]", witness_text(w));
            }
            out.push('\n');
        }
        for f in &self.undecided {
            out += &format!("  {:<32} undecided: {}\n", f.predicate, f.error);
        }
        match &self.decomposition {
            DecompositionJson::Decomposed { summands } => {
                let parts: Vec<&str> = summands.iter().map(|s| s.descriptor.text.as_str()).collect();
                out += &format!("decomposition: {}\n", if parts.is_empty() { "(empty)".into() } else { parts.join(" + ") });
            }
            DecompositionJson::NotDecomposable { witness } => {
                out += &format!("decomposition: none [witness: {}]\n", witness_text(witness));
            }
            DecompositionJson::Unavailable { error } => out += &format!("decomposition: unavailable ({error})\n"),
        }
        out += "citations:\n";
        for c in &self.citations {
            out += &format!("  - {c}\n");
        }
        out
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn witness_text(w: &WitnessJson) -> String {
    match w {
        WitnessJson::SquareFactor { base, factor } => {
            format!("({})^2 divides {}", value_text(base), value_text(factor))
        }
        WitnessJson::Submodule { descriptor } => format!("submodule {}", descriptor.text),
        WitnessJson::Quotient { descriptor } => format!("quotient {}", descriptor.text),
        WitnessJson::NonHomocyclic { prime, exponents } => {
            format!("exponents {:?} at {}", exponents, value_text(prime))
        }
        WitnessJson::FreePart { rank } => format!("free part of rank {rank}"),
        WitnessJson::ZeroModule => "zero module".into(),
    }
}

fn descriptor_of(input: &ModuleInput) -> (StructureDescriptor, &'static str, Option<MatrixRingSpec>) {
    match input {
        ModuleInput::Presentation(p) => (structure(p), "presentation", None),
        ModuleInput::MatMod(m) => (structure(&transport_to_base(m)), "matrix_module", Some(m.spec())),
        ModuleInput::Descriptor(d) => (d.clone(), "descriptor", None),
    }
}

pub fn cmd_analyze(text: &str, ring: Option<RingTag>) -> Result<AnalysisReport, CliError> {
    let input = parse_module(text, ring)?;
    let echo: Value = parse_json(text)?;
    let (descriptor, kind, spec) = descriptor_of(&input);
    let (verdicts, failures) = all_verdicts(&descriptor);
    if let ModuleInput::MatMod(m) = &input {
        let direct = is_virtually_simple_matmod(m)?;
        if let Some(v) = verdicts.iter().find(|v| v.predicate == "virtually_simple") {
            if v.value != direct {
                return Err(CliError::Domain("virtual simplicity is not Morita invariant here".into()));
            }
        }
    }
    let decomposition = match decompose_virtually_simple(&descriptor) {
        Ok(d) => DecompositionJson::Decomposed { summands: d.summands.iter().map(SummandJson::from_summand).collect() },
        Err(VirtualError::NotDecomposable { base, factor }) => DecompositionJson::NotDecomposable {
            witness: WitnessJson::from_witness(&Witness::SquareFactor { base, factor }),
        },
        Err(e) => DecompositionJson::Unavailable { error: e.to_string() },
    };
    let mut citations: Vec<String> = Vec::new();
    let mut cite = |c: &str| {
        if !citations.iter().any(|x| x == c) {
            citations.push(c.to_string());
        }
    };
    for v in &verdicts {
        cite(v.citation);
    }
    if !matches!(decomposition, DecompositionJson::Unavailable { .. }) {
        cite(citation::DECOMPOSITION);
    }
    if spec.is_some() {
        cite(citation::MATRIX_RINGS);
    }
    Ok(AnalysisReport {
        input: echo,
        input_kind: kind.into(),
        matrix_ring: spec.map(|s| ComponentJsonOut { n: s.n(), base: s.base() }),
        descriptor: DescriptorJson::from_descriptor(&descriptor),
        verdicts: verdicts.iter().map(VerdictJson::from_verdict).collect(),
        undecided: failures
            .into_iter()
            .map(|(p, e)| PredicateFailure { predicate: p.into(), error: e.to_string() })
            .collect(),
        decomposition,
        citations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnfReport {
    pub ring: RingTag,
    pub s: MatrixJson,
    pub u: MatrixJson,
    pub v: MatrixJson,
    pub invariant_factors: Vec<Value>,
    pub rank: usize,
    pub verified: bool,
}

impl SnfReport {
    pub fn render(&self) -> String {
        let show = |m: &MatrixJson| -> String {
            m.entries
                .iter()
                .map(|row| format!("  [{}]\n", row.iter().map(value_text).collect::<Vec<_>>().join(", ")))
                .collect()
        };
        let factors: Vec<String> = self.invariant_factors.iter().map(value_text).collect();
        format!(
            "ring: {}\nS =\n{}U =\n{}V =\n{}rank: {}\ninvariant factors: [{}]\nverified: {}\n",
            self.ring,
            show(&self.s),
            show(&self.u),
            show(&self.v),
            self.rank,
            factors.join(", "),
            self.verified
        )
    }
}

/// Accepts a bare matrix (`entries`) or a presentation, whose relation matrix is used.
pub fn cmd_snf(text: &str, ring: Option<RingTag>) -> Result<SnfReport, CliError> {
    let v: Value = parse_json(text)?;
    let m = if v.get("entries").is_some() {
        let m: MatrixJson = serde_json::from_value(v).map_err(|e| CliError::Input(e.to_string()))?;
        m.to_matrix(ring)?
    } else {
        let p: PresentationJson = serde_json::from_value(v).map_err(|e| CliError::Input(e.to_string()))?;
        p.to_presentation(ring)?.relations().clone()
    };
    let r = smith_normal_form(&m);
    let verified = verify_snf(&m, &r).map_err(|e| CliError::Domain(e.to_string()))?;
    Ok(SnfReport {
        ring: m.ring(),
        rank: r.diagonal().iter().filter(|d| !d.is_zero()).count(),
        invariant_factors: invariant_factors(&m).iter().map(element_to_json).collect(),
        s: MatrixJson::from_matrix(&r.s),
        u: MatrixJson::from_matrix(&r.u),
        v: MatrixJson::from_matrix(&r.v),
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedsReport {
    pub left: DescriptorJson,
    pub right: DescriptorJson,
    pub embeds: bool,
}

pub fn module_descriptor(text: &str, ring: Option<RingTag>) -> Result<StructureDescriptor, CliError> {
    Ok(descriptor_of(&parse_module(text, ring)?).0)
}

pub fn cmd_embeds(a: &str, b: &str, ring: Option<RingTag>) -> Result<EmbedsReport, CliError> {
    let (a, b) = (module_descriptor(a, ring)?, module_descriptor(b, ring)?);
    Ok(EmbedsReport {
        embeds: embeds(&a, &b)?,
        left: DescriptorJson::from_descriptor(&a),
        right: DescriptorJson::from_descriptor(&b),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub left: Vec<DescriptorJson>,
    pub right: Vec<DescriptorJson>,
    /// `[i, j]` pairs entry `i` on the left with entry `j` on the right.
    pub pairing: Vec<(usize, usize)>,
    pub verified: bool,
    pub citation: String,
}

/// Each file holds a JSON array of modules in any accepted input form.
fn module_list(text: &str, ring: Option<RingTag>) -> Result<Vec<StructureDescriptor>, CliError> {
    let v: Value = parse_json(text)?;
    let Value::Array(items) = v else {
        return Err(CliError::Input("expected a JSON array of modules".into()));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            module_descriptor(&item.to_string(), ring).map_err(|e| match e {
                CliError::Input(m) => CliError::Input(format!("[{i}]: {m}")),
                other => other,
            })
        })
        .collect()
}

pub fn cmd_ks(a: &str, b: &str, ring: Option<RingTag>) -> Result<KsReport, CliError> {
    let (left, right) = (module_list(a, ring)?, module_list(b, ring)?);
    let cert = ks_certify(&left, &right)?;
    Ok(KsReport {
        verified: cert.verify(&left, &right),
        left: left.iter().map(DescriptorJson::from_descriptor).collect(),
        right: right.iter().map(DescriptorJson::from_descriptor).collect(),
        pairing: cert.pairing,
        citation: citation::KRULL_SCHMIDT.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReportJson {
    pub n: usize,
    pub base: RingTag,
    pub v_domain_status: VDomainStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub non_vss_witness: Option<DescriptorJson>,
    pub regular_decomposition: Vec<SummandJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingReportJson {
    pub ring: RingSpecJson,
    pub is_semisimple: bool,
    pub is_left_completely_vss: bool,
    pub all_fg_modules_vss: bool,
    pub components: Vec<ComponentReportJson>,
    pub citations: Vec<String>,
}

impl RingReportJson {
    pub fn from_report(r: &RingReport) -> Self {
        RingReportJson {
            ring: RingSpecJson::from_spec(&r.wedderburn_data),
            is_semisimple: r.is_semisimple,
            is_left_completely_vss: r.is_left_completely_vss,
            all_fg_modules_vss: r.all_fg_modules_vss,
            components: r
                .components
                .iter()
                .map(|c| ComponentReportJson {
                    n: c.spec.n(),
                    base: c.spec.base(),
                    v_domain_status: c.v_domain_status,
                    non_vss_witness: c.non_vss_witness.as_ref().map(DescriptorJson::from_descriptor),
                    regular_decomposition: c.regular_decomposition.summands.iter().map(SummandJson::from_summand).collect(),
                })
                .collect(),
            citations: r.citations.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn render(&self) -> String {
        let names: Vec<String> = self.components.iter().map(|c| format!("M_{}({})", c.n, c.base)).collect();
        let mut out = format!("ring: {}\n", names.join(" x "));
        out += &format!("  semisimple                       {}\n", self.is_semisimple);
        out += &format!("  completely virtually semisimple  {}\n", self.is_left_completely_vss);
        out += &format!("  all f.g. modules vss             {}\n", self.all_fg_modules_vss);
        for (name, c) in names.iter().zip(&self.components) {
            let status = match c.v_domain_status {
                VDomainStatus::Field => "field",
                VDomainStatus::NotVDomain => "not a V-domain",
            };
            out += &format!("  {name}: base is {status}");
            if let Some(w) = &c.non_vss_witness {
                out += &format!("; {} is not virtually semisimple", w.text);
            }
            out += &format!("; regular module = {} copies of the column module\n", c.regular_decomposition.len());
        }
        out += "citations:\n";
        for c in &self.citations {
            out += &format!("  - {c}\n");
        }
        out
    }
}

pub fn cmd_ring(text: &str) -> Result<RingReportJson, CliError> {
    let spec: RingSpecJson = parse_json(text)?;
    let spec = spec.to_spec()?;
    Ok(RingReportJson::from_report(&ring_analyze(&spec)?))
}

pub fn cmd_validate(predicate: &str, bound: usize, max_order: Option<usize>) -> Result<ValidationReport, CliError> {
    let config = max_order.map(OracleConfig::with_max_order).unwrap_or_default();
    Ok(validate(predicate, bound, &config)?)
}

pub fn render_validation(r: &ValidationReport) -> String {
    let mut out = format!(
        "{}: {} inputs up to order {}, {} mismatches\n",
        r.predicate,
        r.checked,
        r.bound,
        r.mismatches.len()
    );
    for m in &r.mismatches {
        out += &format!("  {}: fast {}, oracle {}\n", m.input, m.fast, m.oracle);
    }
    out
}
