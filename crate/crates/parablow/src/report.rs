//! JSON reports for the `verdict` and `destabilize` commands.
//!
//! All exact rationals are serialized as strings (`"-1/3"`); every such
//! field is accompanied by a `*_decimal` rendering to 12 significant digits
//! where a human will want magnitude at a glance. Reports carry no timing
//! data so identical inputs produce identical bytes.

use serde::Serialize;

use crate::futaki::DestabilizationCertificate;
use crate::lattice::PositivityReport;
use crate::rational::{render_decimal, render_rat, Rat};
use crate::surface::{CentralFiberModel, Side, StabilityVerdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub slopes: Vec<SlopeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            verdict: None,
            slopes: Vec::new(),
            certificate: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[derive(Debug, Serialize)]
pub struct SlopeEntry {
    pub section: String,
    pub slope: String,
    pub slope_decimal: String,
}

impl SlopeEntry {
    pub fn new(section: &str, slope: &Rat) -> Self {
        SlopeEntry {
            section: section.to_string(),
            slope: render_rat(slope),
            slope_decimal: render_decimal(slope, 12),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictReport {
    UnstableWitness { section: String, slope: String },
    PolystablePair { first: String, second: String },
    StableRelativeToFamily,
    Indeterminate,
}

impl From<&StabilityVerdict> for VerdictReport {
    fn from(verdict: &StabilityVerdict) -> Self {
        match verdict {
            StabilityVerdict::UnstableWitness { section, slope } => {
                VerdictReport::UnstableWitness {
                    section: section.clone(),
                    slope: render_rat(slope),
                }
            }
            StabilityVerdict::PolystablePair { first, second } => VerdictReport::PolystablePair {
                first: first.clone(),
                second: second.clone(),
            },
            StabilityVerdict::StableRelativeToFamily => VerdictReport::StableRelativeToFamily,
            StabilityVerdict::Indeterminate => VerdictReport::Indeterminate,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CertificateReport {
    pub section: String,
    pub slope: String,
    pub c_base: String,
    pub tau_minus: String,
    pub tau_plus: String,
    pub futaki: String,
    pub futaki_decimal: String,
    pub donaldson_futaki: String,
    pub donaldson_futaki_decimal: String,
    pub volume: String,
    pub multi_fiber_additive: bool,
    pub cremona_steps: Vec<CremonaStepReport>,
    pub model: ModelReport,
    pub positivity: PositivityJson,
}

#[derive(Debug, Serialize)]
pub struct CremonaStepReport {
    pub fiber: String,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Serialize)]
pub struct ModelReport {
    pub genus: u32,
    pub deg_plus: i64,
    pub deg_minus: i64,
    pub points: Vec<ModelPointReport>,
}

#[derive(Debug, Serialize)]
pub struct ModelPointReport {
    pub fiber: String,
    pub weight: String,
    pub side: String,
}

#[derive(Debug, Serialize)]
pub struct PositivityJson {
    pub pass: bool,
    pub items: Vec<PositivityItemJson>,
}

#[derive(Debug, Serialize)]
pub struct PositivityItemJson {
    pub label: String,
    pub value: String,
    pub ok: bool,
}

fn model_report(model: &CentralFiberModel) -> ModelReport {
    ModelReport {
        genus: model.genus,
        deg_plus: model.deg_plus,
        deg_minus: model.deg_minus,
        points: model
            .points
            .iter()
            .map(|p| ModelPointReport {
                fiber: p.fiber.clone(),
                weight: p.weight.to_string(),
                side: match p.side {
                    Side::Plus => "S+".to_string(),
                    Side::Minus => "S-".to_string(),
                },
            })
            .collect(),
    }
}

fn positivity_json(report: &PositivityReport) -> PositivityJson {
    PositivityJson {
        pass: report.pass,
        items: report
            .items
            .iter()
            .map(|item| PositivityItemJson {
                label: item.label.clone(),
                value: render_rat(&item.value),
                ok: item.ok,
            })
            .collect(),
    }
}

impl From<&DestabilizationCertificate> for CertificateReport {
    fn from(cert: &DestabilizationCertificate) -> Self {
        CertificateReport {
            section: cert.section.clone(),
            slope: render_rat(&cert.slope),
            c_base: render_rat(&cert.c_base),
            tau_minus: render_rat(&cert.tau_minus),
            tau_plus: render_rat(&cert.tau_plus),
            futaki: render_rat(&cert.futaki),
            futaki_decimal: render_decimal(&cert.futaki, 12),
            donaldson_futaki: render_rat(&cert.donaldson_futaki),
            donaldson_futaki_decimal: render_decimal(&cert.donaldson_futaki, 12),
            volume: render_rat(&cert.volume),
            multi_fiber_additive: cert.multi_fiber_additive,
            cremona_steps: cert
                .cremona_steps
                .iter()
                .map(|step| CremonaStepReport {
                    fiber: step.fiber.clone(),
                    before: step.before.to_string(),
                    after: step.after.to_string(),
                })
                .collect(),
            model: model_report(&cert.model),
            positivity: positivity_json(&cert.positivity),
        }
    }
}
