//! Parabolic ruled surface data model.
//!
//! A surface carries a genus, the degree of its rank-2 bundle, marked points
//! with rational weights in distinct fibers, and a user-supplied family of
//! candidate sections with known self-intersections and incidences.
//! Stability is always judged *relative to that family*: the tool reports
//! an unstable witness or a polystable pair when it finds one, and otherwise
//! only claims stability relative to the supplied sections, never
//! unconditionally.
//!
//! Degenerating along a section produces a split central-fiber model with
//! two distinguished sections `S+` and `S-`; Cremona moves push every marked
//! point onto `S+` while preserving both parabolic slopes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::blowup::{cremona, CremonaData};
use crate::fractions::Weight;
use crate::rational::{rint, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("unknown section id `{0}`")]
    UnknownSection(String),
    #[error("duplicate section id `{0}`")]
    DuplicateSection(String),
    #[error("marked points share fiber `{0}`")]
    DuplicateFiber(String),
    #[error("section `{section}` lists unknown fiber `{fiber}`")]
    UnknownFiber { section: String, fiber: String },
    #[error("marked point in fiber `{fiber}` lists unknown section `{section}`")]
    UnknownIncidence { fiber: String, section: String },
    #[error("fiber `{fiber}` and section `{section}` disagree on incidence")]
    IncidenceMismatch { fiber: String, section: String },
    #[error("section `{id}`: self-intersection {self_int} and bundle degree {deg_e} differ mod 2")]
    SectionParity {
        id: String,
        self_int: i64,
        deg_e: i64,
    },
    #[error("pairing references unknown section `{0}`")]
    UnknownPairingSection(String),
    #[error("duplicate pairing for sections `{0}`, `{1}`")]
    DuplicatePairing(String, String),
    #[error("pairing of section `{0}` with itself is its self-intersection; omit it")]
    SelfPairing(String),
    #[error("bundle degree {deg_e} and self-intersection {s_sq} differ mod 2")]
    ParityViolation { deg_e: i64, s_sq: i64 },
}

/// Which of the two split sections a point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Minus => write!(f, "S-"),
            Side::Plus => write!(f, "S+"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MarkedPoint {
    pub fiber: String,
    pub weight: Weight,
    /// Ids of the supplied sections passing through this point.
    pub incidence: BTreeSet<String>,
}

#[derive(Clone, Debug)]
pub struct SectionData {
    pub id: String,
    pub self_int: i64,
    /// Fibers whose marked point lies on this section.
    pub contains: BTreeSet<String>,
}

#[derive(Clone, Debug, Default)]
pub struct ParabolicSurface {
    pub genus: u32,
    pub deg_e: i64,
    pub marked: Vec<MarkedPoint>,
    pub sections: Vec<SectionData>,
    /// Mutual intersection numbers, keyed by the sorted id pair.
    pub pairings: BTreeMap<(String, String), i64>,
    /// User-declared hypothesis: the surface admits no nontrivial
    /// holomorphic vector fields.
    pub no_vector_fields: bool,
    /// Opt-in gate for multi-point destabilizer search and scans.
    pub experimental_multi_point: bool,
}

impl ParabolicSurface {
    pub fn section(&self, id: &str) -> Result<&SectionData, SurfaceError> {
        self.sections
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| SurfaceError::UnknownSection(id.to_string()))
    }

    /// Supplied intersection number of two distinct sections, if any.
    pub fn pairing(&self, a: &str, b: &str) -> Option<i64> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.pairings
            .get(&(key.0.to_string(), key.1.to_string()))
            .copied()
    }

    /// Structural consistency: distinct fibers, matching incidence data,
    /// section parity, pairings over known ids.
    pub fn validate(&self) -> Result<(), SurfaceError> {
        let mut fibers = BTreeSet::new();
        for point in &self.marked {
            if !fibers.insert(point.fiber.as_str()) {
                return Err(SurfaceError::DuplicateFiber(point.fiber.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for section in &self.sections {
            if !ids.insert(section.id.as_str()) {
                return Err(SurfaceError::DuplicateSection(section.id.clone()));
            }
            if (section.self_int - self.deg_e) % 2 != 0 {
                return Err(SurfaceError::SectionParity {
                    id: section.id.clone(),
                    self_int: section.self_int,
                    deg_e: self.deg_e,
                });
            }
            for fiber in &section.contains {
                if !fibers.contains(fiber.as_str()) {
                    return Err(SurfaceError::UnknownFiber {
                        section: section.id.clone(),
                        fiber: fiber.clone(),
                    });
                }
            }
        }
        for point in &self.marked {
            for id in &point.incidence {
                if !ids.contains(id.as_str()) {
                    return Err(SurfaceError::UnknownIncidence {
                        fiber: point.fiber.clone(),
                        section: id.clone(),
                    });
                }
            }
        }
        for section in &self.sections {
            for point in &self.marked {
                let on_section = section.contains.contains(&point.fiber);
                let on_point = point.incidence.contains(&section.id);
                if on_section != on_point {
                    return Err(SurfaceError::IncidenceMismatch {
                        fiber: point.fiber.clone(),
                        section: section.id.clone(),
                    });
                }
            }
        }
        for (a, b) in self.pairings.keys() {
            if a == b {
                return Err(SurfaceError::SelfPairing(a.clone()));
            }
            for id in [a, b] {
                if !ids.contains(id.as_str()) {
                    return Err(SurfaceError::UnknownPairingSection(id.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Parabolic slope `S^2 + sum(off-S weights) - sum(on-S weights)`.
pub fn par_slope(surface: &ParabolicSurface, section_id: &str) -> Result<Rat, SurfaceError> {
    let section = surface.section(section_id)?;
    let mut slope = rint(section.self_int);
    for point in &surface.marked {
        let alpha = point.weight.as_rat();
        if section.contains.contains(&point.fiber) {
            slope -= alpha;
        } else {
            slope += alpha;
        }
    }
    Ok(slope)
}

/// Stability of the surface relative to the supplied section family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityVerdict {
    /// A supplied section of non-positive slope with no polystable partner.
    UnstableWitness { section: String, slope: Rat },
    /// Two disjoint supplied sections of slope zero.
    PolystablePair { first: String, second: String },
    /// Every supplied section has positive slope; sections outside the
    /// family are not ruled out.
    StableRelativeToFamily,
    /// No sections were supplied.
    Indeterminate,
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityVerdict::UnstableWitness { section, slope } => {
                write!(f, "unstable (witness {section}, slope {slope})")
            }
            StabilityVerdict::PolystablePair { first, second } => {
                write!(f, "polystable (pair {first}, {second})")
            }
            StabilityVerdict::StableRelativeToFamily => {
                write!(f, "stable relative to the supplied family")
            }
            StabilityVerdict::Indeterminate => write!(f, "indeterminate (no sections supplied)"),
        }
    }
}

/// Classifies against the supplied family:
/// any negative slope wins as an unstable witness; a zero-slope section
/// needs a disjoint zero-slope partner (known pairing 0), else it is itself
/// a witness; two partnered zero-slope sections give a polystable pair;
/// all-positive slopes give stability relative to the family.
pub fn classify_stability(surface: &ParabolicSurface) -> StabilityVerdict {
    if surface.sections.is_empty() {
        return StabilityVerdict::Indeterminate;
    }
    let slopes: Vec<(String, Rat)> = surface
        .sections
        .iter()
        .map(|s| {
            let slope = par_slope(surface, &s.id).expect("section from the surface itself");
            (s.id.clone(), slope)
        })
        .collect();

    let mut worst: Option<&(String, Rat)> = None;
    for entry in &slopes {
        if entry.1.is_negative() && worst.is_none_or(|w| entry.1 < w.1) {
            worst = Some(entry);
        }
    }
    if let Some((section, slope)) = worst {
        return StabilityVerdict::UnstableWitness {
            section: section.clone(),
            slope: slope.clone(),
        };
    }

    let zeros: Vec<&String> = slopes
        .iter()
        .filter(|(_, slope)| slope.is_zero())
        .map(|(id, _)| id)
        .collect();
    let partner_of = |id: &String| {
        zeros
            .iter()
            .find(|other| **other != id && surface.pairing(id, other) == Some(0))
            .map(|other| (*other).clone())
    };
    for id in &zeros {
        if partner_of(id).is_none() {
            return StabilityVerdict::UnstableWitness {
                section: (*id).clone(),
                slope: Rat::zero(),
            };
        }
    }
    if let Some(first) = zeros.first() {
        let second = partner_of(first).expect("checked above");
        return StabilityVerdict::PolystablePair {
            first: (*first).clone(),
            second,
        };
    }
    StabilityVerdict::StableRelativeToFamily
}

/// A marked point of the split model, attached to one of the two sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelPoint {
    pub fiber: String,
    pub weight: Weight,
    pub side: Side,
}

/// Split central fiber `P(L+ + L-)` with the degenerated parabolic data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralFiberModel {
    pub genus: u32,
    pub deg_plus: i64,
    pub deg_minus: i64,
    pub points: Vec<ModelPoint>,
}

impl CentralFiberModel {
    pub fn deg_e(&self) -> i64 {
        self.deg_plus + self.deg_minus
    }

    pub fn s_plus_sq(&self) -> i64 {
        self.deg_minus - self.deg_plus
    }

    pub fn s_minus_sq(&self) -> i64 {
        self.deg_plus - self.deg_minus
    }

    fn signed_weight_sum(&self, on: Side) -> Rat {
        let mut sum = Rat::zero();
        for point in &self.points {
            let alpha = point.weight.as_rat();
            if point.side == on {
                sum -= alpha;
            } else {
                sum += alpha;
            }
        }
        sum
    }

    pub fn slope_plus(&self) -> Rat {
        rint(self.s_plus_sq()) + self.signed_weight_sum(Side::Plus)
    }

    pub fn slope_minus(&self) -> Rat {
        rint(self.s_minus_sq()) + self.signed_weight_sum(Side::Minus)
    }

    /// Parabolic degree of `L+` in the convention where a point contributes
    /// its weight to the bundle it lies on.
    pub fn par_deg_plus(&self) -> Rat {
        let mut deg = rint(self.deg_plus);
        for point in &self.points {
            if point.side == Side::Plus {
                deg += point.weight.as_rat();
            }
        }
        deg
    }

    pub fn par_deg_minus(&self) -> Rat {
        let mut deg = rint(self.deg_minus);
        for point in &self.points {
            if point.side == Side::Minus {
                deg += point.weight.as_rat();
            }
        }
        deg
    }

    /// Parabolic degree of the full rank-2 bundle.
    pub fn par_deg_e(&self) -> Rat {
        let mut deg = rint(self.deg_e());
        for point in &self.points {
            deg += point.weight.as_rat();
        }
        deg
    }
}

/// Degenerates the surface along the given section.
///
/// The limit is the split model with `deg L+ = (deg E - S^2)/2` and
/// `deg L- = (deg E + S^2)/2`; points on the section land on `S+`, the rest
/// on `S-`, so `par_slope` of the section is preserved exactly.
pub fn central_fiber(
    surface: &ParabolicSurface,
    section_id: &str,
) -> Result<CentralFiberModel, SurfaceError> {
    let section = surface.section(section_id)?;
    if (surface.deg_e - section.self_int) % 2 != 0 {
        return Err(SurfaceError::ParityViolation {
            deg_e: surface.deg_e,
            s_sq: section.self_int,
        });
    }
    let deg_plus = (surface.deg_e - section.self_int) / 2;
    let deg_minus = (surface.deg_e + section.self_int) / 2;
    let points = surface
        .marked
        .iter()
        .map(|point| ModelPoint {
            fiber: point.fiber.clone(),
            weight: point.weight,
            side: if section.contains.contains(&point.fiber) {
                Side::Plus
            } else {
                Side::Minus
            },
        })
        .collect();
    Ok(CentralFiberModel {
        genus: surface.genus,
        deg_plus,
        deg_minus,
        points,
    })
}

/// One elementary Cremona move applied to a fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CremonaStep {
    pub fiber: String,
    pub before: Weight,
    pub after: Weight,
}

/// Moves every marked point onto `S+` by Cremona transformations.
///
/// Each move complements the weight of one point and shifts one unit of
/// degree onto `L-`, so `S+^2` grows and `S-^2` drops by one per step while
/// both parabolic slopes stay fixed.
pub fn normalize_to_splus(model: &CentralFiberModel) -> (CentralFiberModel, Vec<CremonaStep>) {
    let mut out = model.clone();
    let mut steps = Vec::new();
    for idx in 0..out.points.len() {
        if out.points[idx].side != Side::Minus {
            continue;
        }
        let before = out.points[idx].weight;
        let data = CremonaData {
            side: Side::Minus,
            weight: before,
            s_minus_sq: out.s_minus_sq(),
            s_plus_sq: out.s_plus_sq(),
        };
        let moved = cremona(&data);
        out.points[idx].weight = moved.weight;
        out.points[idx].side = moved.side;
        out.deg_minus += 1;
        debug_assert_eq!(out.s_plus_sq(), moved.s_plus_sq);
        debug_assert_eq!(out.s_minus_sq(), moved.s_minus_sq);
        steps.push(CremonaStep {
            fiber: out.points[idx].fiber.clone(),
            before,
            after: moved.weight,
        });
    }
    (out, steps)
}
