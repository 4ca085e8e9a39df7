//! Surface descriptions as TOML files.
//!
//! ```toml
//! genus = 2
//! deg_E = 0
//! experimental_multi_point = true
//!
//! [[marked]]
//! fiber = "y1"
//! weight = "1/3"
//! on_sections = ["s"]
//!
//! [[section]]
//! id = "s"
//! self_int = 0
//! contains = ["y1"]
//!
//! [[pairing]]
//! a = "s"
//! b = "t"
//! value = 0
//! ```
//!
//! Incidence may be declared from either end (`on_sections` on the point or
//! `contains` on the section); the loader merges the two views and the
//! surface validator then demands they agree.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::fractions::{FractionError, Weight};
use crate::surface::{MarkedPoint, ParabolicSurface, SectionData, SurfaceError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("marked point `{fiber}`: {source}")]
    BadWeight {
        fiber: String,
        source: FractionError,
    },
    #[error("duplicate pairing for sections `{0}`, `{1}`")]
    DuplicatePairing(String, String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    genus: u32,
    #[serde(rename = "deg_E", default)]
    deg_e: i64,
    #[serde(default)]
    marked: Vec<RawMarked>,
    #[serde(default, rename = "section")]
    sections: Vec<RawSection>,
    #[serde(default, rename = "pairing")]
    pairings: Vec<RawPairing>,
    #[serde(default)]
    no_vector_fields: bool,
    #[serde(default)]
    experimental_multi_point: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarked {
    fiber: String,
    weight: String,
    #[serde(default)]
    on_sections: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    id: String,
    self_int: i64,
    #[serde(default)]
    contains: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPairing {
    a: String,
    b: String,
    value: i64,
}

/// Parses and validates a surface description.
pub fn parse_surface(text: &str) -> Result<ParabolicSurface, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;

    let mut marked = Vec::with_capacity(raw.marked.len());
    for point in &raw.marked {
        let weight = Weight::parse(&point.weight).map_err(|source| ConfigError::BadWeight {
            fiber: point.fiber.clone(),
            source,
        })?;
        marked.push(MarkedPoint {
            fiber: point.fiber.clone(),
            weight,
            incidence: point.on_sections.iter().cloned().collect(),
        });
    }

    let mut sections: Vec<SectionData> = raw
        .sections
        .iter()
        .map(|s| SectionData {
            id: s.id.clone(),
            self_int: s.self_int,
            contains: s.contains.iter().cloned().collect(),
        })
        .collect();

    // Merge the two incidence views for every known cross-reference; unknown
    // names are left in place for the validator to report.
    for section in &mut sections {
        for point in &mut marked {
            if point.incidence.contains(&section.id) {
                section.contains.insert(point.fiber.clone());
            }
            if section.contains.contains(&point.fiber) {
                point.incidence.insert(section.id.clone());
            }
        }
    }

    let mut pairings = BTreeMap::new();
    for pairing in &raw.pairings {
        let (a, b) = if pairing.a <= pairing.b {
            (pairing.a.clone(), pairing.b.clone())
        } else {
            (pairing.b.clone(), pairing.a.clone())
        };
        if pairings
            .insert((a.clone(), b.clone()), pairing.value)
            .is_some()
        {
            return Err(ConfigError::DuplicatePairing(a, b));
        }
    }

    let surface = ParabolicSurface {
        genus: raw.genus,
        deg_e: raw.deg_e,
        marked,
        sections,
        pairings,
        no_vector_fields: raw.no_vector_fields,
        experimental_multi_point: raw.experimental_multi_point,
    };
    surface.validate()?;
    Ok(surface)
}

pub fn load_surface(path: &Path) -> Result<ParabolicSurface, ConfigError> {
    parse_surface(&std::fs::read_to_string(path)?)
}
