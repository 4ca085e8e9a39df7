//! Exact Futaki invariants of split central fibers.
//!
//! Everything is normalized so that the fiber has symplectic area one; the
//! moment coordinate is rescaled to live in `[-1, 1]`, which clears every
//! power of pi from the formulas and keeps all evaluation in `Rat`.
//!
//! Two evaluation paths are provided and tested against each other:
//!
//! * the *assembled* path: [`integral_t`] and [`integral_st`] over a
//!   [`FutakiInput`] carrying arbitrary critical-value profiles, combined by
//!   [`futaki`];
//! * the *closed* path for the two-parameter family of Kähler classes with
//!   end-curve areas `tau-`/`tau+` ([`Futs2Family`], [`futaki_futs2`]).
//!
//! The two paths agree at `tau = 0` and differ in general by a quadratic
//! stabilizer-order correction (a quarter of the weighted difference of the
//! squared boundary values); `closed_matches_assembled` pins that relation
//! exactly.
//!
//! # Invariants
//! - All results are exact rationals; a floating-point oracle cross-checks
//!   randomized inputs to 1e-10 relative accuracy.
//! - `futaki_closed(0,0)` equals `futaki_limit(r, slope)` exactly.
//! - The sign of the closed invariant matches the sign of the slope for
//!   large base scale and small `tau` (and both signs occur near zero when
//!   the slope vanishes).

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::blowup::FiberChain;
use crate::lattice::{
    chi_orbifold, kahler_from_areas, kahler_necessary_check, section_classes, ChainAreas, H2Class,
    KahlerBuild, LatticeError, PositivityReport, SectionClasses, SurfaceLattice,
};
use crate::rational::{pow2, rat, render_rat, rint, Rat};
use crate::surface::{
    central_fiber, normalize_to_splus, par_slope, CentralFiberModel, CremonaStep, ParabolicSurface,
    Side, SurfaceError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FutakiError {
    #[error("tau parameter {0} out of range (0, 1)")]
    OutOfRange(String),
    #[error("profile invalid: {0}")]
    ProfileInvalid(String),
    #[error("model is not normalized: a marked point still lies on S-")]
    ModelNotNormalized,
    #[error("section has positive slope {0}; it does not destabilize")]
    NotDestabilizing(String),
    #[error("{points} marked points require the experimental multi-point flag")]
    MultiPointRequiresFlag { points: usize },
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("derivative signs failed to stabilize")]
    IndeterminateSign,
    #[error("certificate field `{field}` mismatch: stored {stored}, recomputed {recomputed}")]
    VerificationMismatch {
        field: &'static str,
        stored: String,
        recomputed: String,
    },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Sign of an exact rational value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(value: &Rat) -> Sign {
        if value.is_negative() {
            Sign::Negative
        } else if value.is_zero() {
            Sign::Zero
        } else {
            Sign::Positive
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Negative => write!(f, "-"),
            Sign::Zero => write!(f, "0"),
            Sign::Positive => write!(f, "+"),
        }
    }
}

fn cube(x: &Rat) -> Rat {
    x * x * x
}

fn square(x: &Rat) -> Rat {
    x * x
}

/// Critical-value profile of one marked fiber's chain.
///
/// `weights` are the multiplicities of the chain curves left to right
/// (`weights[e0]` is the central denominator `q`); `t_profile[i]` is the
/// normalized critical value at the vertex between curves `i` and `i+1`,
/// so it has one entry less than `weights`.
#[derive(Clone, Debug)]
pub struct FiberProfile {
    pub weights: Vec<u64>,
    pub e0: usize,
    pub t_profile: Vec<Rat>,
}

impl FiberProfile {
    fn validate(&self) -> Result<(), FutakiError> {
        if self.weights.is_empty() || self.e0 >= self.weights.len() {
            return Err(FutakiError::ProfileInvalid(
                "central curve index out of range".to_string(),
            ));
        }
        if self.t_profile.len() + 1 != self.weights.len() {
            return Err(FutakiError::ProfileInvalid(format!(
                "{} critical values for {} curves",
                self.t_profile.len(),
                self.weights.len()
            )));
        }
        if self.weights.contains(&0) {
            return Err(FutakiError::ProfileInvalid("zero weight".to_string()));
        }
        let one = Rat::one();
        for t in &self.t_profile {
            if t < &-one.clone() || t > &one {
                return Err(FutakiError::ProfileInvalid(format!(
                    "critical value {} outside [-1, 1]",
                    render_rat(t)
                )));
            }
        }
        let monotone = |range: std::ops::Range<usize>| {
            range
                .clone()
                .zip(range.skip(1))
                .all(|(i, j)| self.t_profile[i] <= self.t_profile[j])
        };
        if !monotone(0..self.e0) || !monotone(self.e0..self.t_profile.len()) {
            return Err(FutakiError::ProfileInvalid(
                "critical values must be nondecreasing on each side".to_string(),
            ));
        }
        Ok(())
    }
}

/// Scalar data for the assembled Futaki formula.
#[derive(Clone, Debug)]
pub struct FutakiInput {
    pub fibers: Vec<FiberProfile>,
    pub s_hat_plus_sq: i64,
    pub s_hat_minus_sq: i64,
    /// The section-difference slot of the formula; for the two-parameter
    /// family this is `par deg L+ - par deg L-` plus the linear tau terms.
    pub omega_shat_diff: Rat,
    /// Mean scalar curvature ratio `r`.
    pub mean_scalar: Rat,
    pub omega_sq: Rat,
}

impl FutakiInput {
    pub fn new(
        fibers: Vec<FiberProfile>,
        s_hat_plus_sq: i64,
        s_hat_minus_sq: i64,
        omega_shat_diff: Rat,
        mean_scalar: Rat,
        omega_sq: Rat,
    ) -> Result<Self, FutakiError> {
        for fiber in &fibers {
            fiber.validate()?;
        }
        Ok(FutakiInput {
            fibers,
            s_hat_plus_sq,
            s_hat_minus_sq,
            omega_shat_diff,
            mean_scalar,
            omega_sq,
        })
    }
}

/// Moment-coordinate integral: `r_t` with `int t dmu = r_t / pi`.
///
/// `r_t = (1/96)(S-^2 - S+^2 + 6*diff - sum t_i^3/(w_i w_{i+1}))`, the cubic
/// sum running over the chain vertices of every fiber.
pub fn integral_t(input: &FutakiInput) -> Rat {
    let mut acc = rint(input.s_hat_minus_sq - input.s_hat_plus_sq);
    acc += rint(6) * &input.omega_shat_diff;
    for fiber in &input.fibers {
        for (i, t) in fiber.t_profile.iter().enumerate() {
            let denom = rint((fiber.weights[i] * fiber.weights[i + 1]) as i64);
            acc -= cube(t) / denom;
        }
    }
    acc / rint(96)
}

/// Weighted integral of the scalar-curvature moment product.
///
/// Each curve owns the moment interval between its two adjacent vertices
/// (the outer boundary values being -1 and +1); curves of multiplicity one
/// contribute nothing.
pub fn integral_st(input: &FutakiInput) -> Rat {
    let mut acc = input.omega_shat_diff.clone();
    let quarter = rat(1, 4);
    for fiber in &input.fibers {
        let mut lower = -Rat::one();
        for (c, &w) in fiber.weights.iter().enumerate() {
            let upper = if c < fiber.t_profile.len() {
                fiber.t_profile[c].clone()
            } else {
                Rat::one()
            };
            if w > 1 {
                let factor = rat(1, w as i64) - Rat::one();
                acc += &quarter * factor * (square(&upper) - square(&lower));
            }
            lower = upper;
        }
    }
    acc
}

/// Assembled Futaki invariant `8 r * integral_t - integral_st`.
pub fn futaki(input: &FutakiInput) -> Rat {
    rint(8) * &input.mean_scalar * integral_t(input) - integral_st(input)
}

/// Degenerate-limit value `(1 - (2/3) r) * slope`.
pub fn futaki_limit(r: &Rat, slope: &Rat) -> Rat {
    (Rat::one() - rat(2, 3) * r) * slope
}

/// Donaldson-Futaki normalization `futaki / (4 vol)`.
pub fn donaldson_futaki(
    lattice: &SurfaceLattice,
    futaki_value: &Rat,
    omega: &H2Class,
) -> Result<Rat, FutakiError> {
    let vol = lattice.volume(omega)?;
    Ok(futaki_value / (rint(4) * vol))
}

/// The two-parameter family of Kähler classes on a normalized central fiber.
///
/// Each marked fiber's chain gets area `tau-` on its far `S-`-side end
/// curve, `tau+` on its far `S+`-side end curve, and zero on interior string
/// curves; the base scale `c_base` fixes the section area.  The class is
/// affine in `(tau-, tau+)`, which the constructor exploits by solving the
/// area system three times and differencing.
#[derive(Clone, Debug)]
pub struct Futs2Family {
    model: CentralFiberModel,
    lattice: SurfaceLattice,
    chains: Vec<FiberChain>,
    sections: SectionClasses,
    c_base: Rat,
    omega_zero: H2Class,
    dir_minus: H2Class,
    dir_plus: H2Class,
    slope: Rat,
    weight_sum: Rat,
}

impl Futs2Family {
    pub fn new(model: &CentralFiberModel, c_base: &Rat) -> Result<Self, FutakiError> {
        if model.points.iter().any(|p| p.side == Side::Minus) {
            return Err(FutakiError::ModelNotNormalized);
        }
        let mut lattice = SurfaceLattice::new(model.genus, model.deg_plus, model.deg_minus);
        let chains: Vec<FiberChain> = model
            .points
            .iter()
            .map(|p| build_chain_for(p.weight, &mut lattice))
            .collect();
        let sections = section_classes(&lattice, model, &chains)?;

        let build_at = |tm: &Rat, tp: &Rat| -> Result<H2Class, FutakiError> {
            let areas: Vec<ChainAreas> = chains
                .iter()
                .map(|c| ChainAreas::two_parameter(c, tm, tp))
                .collect();
            Ok(kahler_from_areas(&lattice, &chains, c_base, &areas)?.class)
        };
        let omega_zero = build_at(&Rat::zero(), &Rat::zero())?;
        let dir_minus = &build_at(&Rat::one(), &Rat::zero())? - &omega_zero;
        let dir_plus = &build_at(&Rat::zero(), &Rat::one())? - &omega_zero;

        let weight_sum = model
            .points
            .iter()
            .fold(Rat::zero(), |acc, p| acc + p.weight.as_rat());
        Ok(Futs2Family {
            slope: model.slope_plus(),
            model: model.clone(),
            lattice,
            chains,
            sections,
            c_base: c_base.clone(),
            omega_zero,
            dir_minus,
            dir_plus,
            weight_sum,
        })
    }

    pub fn model(&self) -> &CentralFiberModel {
        &self.model
    }

    pub fn lattice(&self) -> &SurfaceLattice {
        &self.lattice
    }

    pub fn chains(&self) -> &[FiberChain] {
        &self.chains
    }

    pub fn sections(&self) -> &SectionClasses {
        &self.sections
    }

    pub fn c_base(&self) -> &Rat {
        &self.c_base
    }

    /// Normalized slope of `S+` (the destabilizing direction's sign source).
    pub fn slope(&self) -> &Rat {
        &self.slope
    }

    pub fn multiplicity(&self) -> usize {
        self.model.points.len()
    }

    /// Sum of the marked weights.
    pub fn weight_sum(&self) -> &Rat {
        &self.weight_sum
    }

    /// The family class at the given parameters.
    pub fn omega(&self, tau_minus: &Rat, tau_plus: &Rat) -> H2Class {
        &(&self.omega_zero + &self.dir_minus.scale(tau_minus)) + &self.dir_plus.scale(tau_plus)
    }

    /// Full area solve at the given parameters, with derived central areas.
    pub fn omega_build(&self, tau_minus: &Rat, tau_plus: &Rat) -> Result<KahlerBuild, FutakiError> {
        let areas: Vec<ChainAreas> = self
            .chains
            .iter()
            .map(|c| ChainAreas::two_parameter(c, tau_minus, tau_plus))
            .collect();
        Ok(kahler_from_areas(
            &self.lattice,
            &self.chains,
            &self.c_base,
            &areas,
        )?)
    }

    pub fn mean_scalar_at(&self, tau_minus: &Rat, tau_plus: &Rat) -> Result<Rat, FutakiError> {
        Ok(self.lattice.mean_scalar(&self.omega(tau_minus, tau_plus))?)
    }

    pub fn positivity(
        &self,
        tau_minus: &Rat,
        tau_plus: &Rat,
    ) -> Result<PositivityReport, FutakiError> {
        Ok(kahler_necessary_check(
            &self.lattice,
            &self.chains,
            &self.sections,
            &self.omega(tau_minus, tau_plus),
        )?)
    }

    fn check_range(tau_minus: &Rat, tau_plus: &Rat, closed: bool) -> Result<(), FutakiError> {
        let lower_ok = |t: &Rat| {
            if closed {
                !t.is_negative()
            } else {
                t.is_positive()
            }
        };
        for t in [tau_minus, tau_plus] {
            if !lower_ok(t) || *t >= Rat::one() {
                return Err(FutakiError::OutOfRange(render_rat(t)));
            }
        }
        Ok(())
    }

    /// Linear weight term `sum_f (a_f tau- + (a_f - 1) tau+)`.
    fn linear_term(&self, tau_minus: &Rat, tau_plus: &Rat) -> Rat {
        let m = rint(self.multiplicity() as i64);
        &self.weight_sum * tau_minus + (&self.weight_sum - m) * tau_plus
    }

    /// Cubic saddle term `sum_f (a_f ((tau- - 1)^3 + 1) + (1-a_f)((1 - tau+)^3 - 1))`.
    fn cubic_term(&self, tau_minus: &Rat, tau_plus: &Rat) -> Rat {
        let left = cube(&(tau_minus - Rat::one())) + Rat::one();
        let right = cube(&(Rat::one() - tau_plus)) - Rat::one();
        let m = rint(self.multiplicity() as i64);
        &self.weight_sum * left + (m - &self.weight_sum) * right
    }

    /// Stabilizer-order correction separating the two evaluation paths:
    /// `sum_f (1/q_f - 1)((1 - tau+)^2 - (tau- - 1)^2)`.
    pub fn order_correction(&self, tau_minus: &Rat, tau_plus: &Rat) -> Rat {
        let spread = square(&(Rat::one() - tau_plus)) - square(&(tau_minus - Rat::one()));
        self.model
            .points
            .iter()
            .map(|p| (rat(1, p.weight.denom() as i64) - Rat::one()) * &spread)
            .sum()
    }

    /// Closed-form invariant of the family, valid on `0 <= tau < 1`
    /// (the boundary value is the degenerate limit).
    pub fn futaki_closed(&self, tau_minus: &Rat, tau_plus: &Rat) -> Result<Rat, FutakiError> {
        Self::check_range(tau_minus, tau_plus, true)?;
        let r = self.mean_scalar_at(tau_minus, tau_plus)?;
        let linear = self.linear_term(tau_minus, tau_plus);
        let cubic = self.cubic_term(tau_minus, tau_plus);
        Ok((Rat::one() - rat(2, 3) * &r) * &self.slope
            - (Rat::one() - &r / rint(2)) * linear
            - &r / rint(12) * cubic)
    }

    /// Assembled-path input carrying the same data as `futaki_closed`.
    pub fn futaki_input(
        &self,
        tau_minus: &Rat,
        tau_plus: &Rat,
    ) -> Result<FutakiInput, FutakiError> {
        Self::check_range(tau_minus, tau_plus, true)?;
        let fibers = self
            .chains
            .iter()
            .map(|chain| {
                let weights = chain.flattened_weights();
                let left = &*tau_minus - Rat::one();
                let right = Rat::one() - tau_plus;
                let t_profile = (0..weights.len() - 1)
                    .map(|i| {
                        if i < chain.e0_index {
                            left.clone()
                        } else {
                            right.clone()
                        }
                    })
                    .collect();
                FiberProfile {
                    weights,
                    e0: chain.e0_index,
                    t_profile,
                }
            })
            .collect();
        let omega = self.omega(tau_minus, tau_plus);
        let s_hat_plus_sq = self
            .lattice
            .pair(&self.sections.s_hat_plus, &self.sections.s_hat_plus)?;
        let s_hat_minus_sq = self
            .lattice
            .pair(&self.sections.s_hat_minus, &self.sections.s_hat_minus)?;
        let diff = (self.model.par_deg_plus() - self.model.par_deg_minus())
            + self.linear_term(tau_minus, tau_plus);
        FutakiInput::new(
            fibers,
            to_i64(&s_hat_plus_sq),
            to_i64(&s_hat_minus_sq),
            diff,
            self.mean_scalar_at(tau_minus, tau_plus)?,
            self.lattice.pair(&omega, &omega)?,
        )
    }

    /// Exact gradient of `futaki_closed` at the origin, including the
    /// variation of the mean scalar curvature through the class.
    pub fn gradient_at_zero(&self) -> Result<(Rat, Rat), FutakiError> {
        let zero = Rat::zero();
        let r0 = self.mean_scalar_at(&zero, &zero)?;
        let c1 = self.lattice.canonical_first_chern();
        let omega_sq = self.lattice.pair(&self.omega_zero, &self.omega_zero)?;
        let c1_omega = self.lattice.pair(&c1, &self.omega_zero)?;
        let r_prime = |dir: &H2Class| -> Result<Rat, FutakiError> {
            let c1_d = self.lattice.pair(&c1, dir)?;
            let omega_d = self.lattice.pair(&self.omega_zero, dir)?;
            Ok((c1_d * &omega_sq - &c1_omega * rint(2) * omega_d) / square(&omega_sq))
        };
        let m = rint(self.multiplicity() as i64);
        let slope_factor = rat(-2, 3) * &self.slope;
        let weight_factor = Rat::one() - &r0 / rint(4);
        let d_minus = &slope_factor * r_prime(&self.dir_minus)? - &weight_factor * &self.weight_sum;
        let d_plus =
            slope_factor * r_prime(&self.dir_plus)? + weight_factor * (m - &self.weight_sum);
        Ok((d_minus, d_plus))
    }
}

fn build_chain_for(weight: crate::fractions::Weight, lattice: &mut SurfaceLattice) -> FiberChain {
    crate::blowup::build_chain(weight, lattice).0
}

fn to_i64(value: &Rat) -> i64 {
    use num_traits::ToPrimitive;
    debug_assert!(value.is_integer());
    value.to_integer().to_i64().expect("small integer")
}

/// Closed-form Futaki invariant of the two-parameter family; strict domain
/// `0 < tau < 1`.
pub fn futaki_futs2(
    model: &CentralFiberModel,
    c_base: &Rat,
    tau_minus: &Rat,
    tau_plus: &Rat,
) -> Result<Rat, FutakiError> {
    Futs2Family::check_range(tau_minus, tau_plus, false)?;
    Futs2Family::new(model, c_base)?.futaki_closed(tau_minus, tau_plus)
}

/// Result of the difference-quotient sign probe at the origin.
#[derive(Clone, Debug)]
pub struct GradientReport {
    pub minus: Sign,
    pub plus: Sign,
    /// Step size at which the signs stabilized.
    pub step: Rat,
    /// Scale threshold the probe ran at.
    pub c_base: Rat,
}

/// Signs of the one-sided derivatives of the closed invariant at `tau = 0`,
/// found by halving exact difference quotients until three consecutive
/// agreeing sign pairs appear.
pub fn gradient_signs(
    model: &CentralFiberModel,
    c_base: &Rat,
) -> Result<GradientReport, FutakiError> {
    let family = Futs2Family::new(model, c_base)?;
    let zero = Rat::zero();
    let base = family.futaki_closed(&zero, &zero)?;
    let mut h = rat(1, 64);
    let mut stable: Option<(Sign, Sign)> = None;
    let mut streak = 0;
    for _ in 0..40 {
        let q_minus = (family.futaki_closed(&h, &zero)? - &base) / &h;
        let q_plus = (family.futaki_closed(&zero, &h)? - &base) / &h;
        let pair = (Sign::of(&q_minus), Sign::of(&q_plus));
        if stable == Some(pair) {
            streak += 1;
            if streak >= 3 {
                return Ok(GradientReport {
                    minus: pair.0,
                    plus: pair.1,
                    step: h,
                    c_base: c_base.clone(),
                });
            }
        } else {
            stable = Some(pair);
            streak = 1;
        }
        h /= rint(2);
    }
    Err(FutakiError::IndeterminateSign)
}

/// Exact destabilization data, reproducible bit for bit.
#[derive(Clone, Debug)]
pub struct DestabilizationCertificate {
    pub section: String,
    pub slope: Rat,
    pub model: CentralFiberModel,
    pub cremona_steps: Vec<CremonaStep>,
    pub c_base: Rat,
    pub tau_minus: Rat,
    pub tau_plus: Rat,
    pub futaki: Rat,
    pub donaldson_futaki: Rat,
    pub volume: Rat,
    pub positivity: PositivityReport,
    /// True when the invariant was summed over several marked fibers
    /// (experimental extension of the one-point formula).
    pub multi_fiber_additive: bool,
}

const C_BASE_START: i64 = 1000;
const C_BASE_DOUBLINGS: u32 = 12;
const SHRINK_BUDGET: i32 = 60;

/// Searches the two-parameter family for a negative Futaki invariant.
///
/// Negative slope: the degenerate limit already has the right sign, so
/// equal small `tau` at a large enough scale works.  Zero slope: the
/// invariant vanishes at the origin and the search follows the descent
/// direction `tau- > tau+` with the ratio chosen from the weight sum.
pub fn destabilize(
    surface: &ParabolicSurface,
    section_id: &str,
) -> Result<DestabilizationCertificate, FutakiError> {
    let slope = par_slope(surface, section_id)?;
    if slope.is_positive() {
        return Err(FutakiError::NotDestabilizing(render_rat(&slope)));
    }
    let (model, cremona_steps) = normalize_to_splus(&central_fiber(surface, section_id)?);
    let points = model.points.len();
    if points > 1 && !surface.experimental_multi_point {
        return Err(FutakiError::MultiPointRequiresFlag { points });
    }
    if points == 0 && slope.is_zero() {
        return Err(FutakiError::SearchExhausted(
            "no marked points and slope zero: the invariant vanishes identically".to_string(),
        ));
    }
    debug_assert_eq!(&slope, &model.slope_plus());

    let tau_pairs: Vec<(Rat, Rat)> = if slope.is_negative() {
        (2..=SHRINK_BUDGET).map(|n| (pow2(-n), pow2(-n))).collect()
    } else {
        // Zero slope: pick tau+ = c tau- with c small enough that the linear
        // descent term stays bounded below by half its tau- part.
        let weight_sum: Rat = model.points.iter().map(|p| p.weight.as_rat()).sum();
        let off_sum = rint(points as i64) - &weight_sum;
        debug_assert!(off_sum.is_positive());
        let c = (weight_sum / (rint(2) * off_sum)).min(rat(1, 2));
        (4..=SHRINK_BUDGET)
            .map(|n| {
                let tau_minus = pow2(-n);
                let tau_plus = &c * &tau_minus;
                (tau_minus, tau_plus)
            })
            .collect()
    };

    let mut last_value: Option<Rat> = None;
    for doubling in 0..=C_BASE_DOUBLINGS {
        let c_base = rint(C_BASE_START) * pow2(doubling as i32);
        let family = Futs2Family::new(&model, &c_base)?;
        for (tau_minus, tau_plus) in &tau_pairs {
            let value = family.futaki_closed(tau_minus, tau_plus)?;
            if !value.is_negative() {
                last_value = Some(value);
                continue;
            }
            let report = family.positivity(tau_minus, tau_plus)?;
            if !report.pass {
                last_value = Some(value);
                continue;
            }
            let omega = family.omega(tau_minus, tau_plus);
            let volume = family.lattice().volume(&omega)?;
            let df = donaldson_futaki(family.lattice(), &value, &omega)?;
            return Ok(DestabilizationCertificate {
                section: section_id.to_string(),
                slope,
                model,
                cremona_steps,
                c_base,
                tau_minus: tau_minus.clone(),
                tau_plus: tau_plus.clone(),
                futaki: value,
                donaldson_futaki: df,
                volume,
                positivity: report,
                multi_fiber_additive: points > 1,
            });
        }
    }
    Err(FutakiError::SearchExhausted(format!(
        "no negative invariant with passing positivity up to scale {} (last value {})",
        C_BASE_START as u128 * (1u128 << C_BASE_DOUBLINGS),
        last_value.map_or_else(|| "none".to_string(), |v| render_rat(&v)),
    )))
}

/// Recomputes every certificate field from scratch and demands exact
/// equality.
pub fn verify_certificate(cert: &DestabilizationCertificate) -> Result<(), FutakiError> {
    let family = Futs2Family::new(&cert.model, &cert.c_base)?;
    let mismatch = |field: &'static str, stored: &Rat, recomputed: &Rat| {
        Err(FutakiError::VerificationMismatch {
            field,
            stored: render_rat(stored),
            recomputed: render_rat(recomputed),
        })
    };
    let value = family.futaki_closed(&cert.tau_minus, &cert.tau_plus)?;
    if value != cert.futaki {
        return mismatch("futaki", &cert.futaki, &value);
    }
    if !value.is_negative() {
        return Err(FutakiError::VerificationMismatch {
            field: "futaki",
            stored: render_rat(&value),
            recomputed: "a negative value".to_string(),
        });
    }
    let omega = family.omega(&cert.tau_minus, &cert.tau_plus);
    let volume = family.lattice().volume(&omega)?;
    if volume != cert.volume {
        return mismatch("volume", &cert.volume, &volume);
    }
    let df = donaldson_futaki(family.lattice(), &value, &omega)?;
    if df != cert.donaldson_futaki {
        return mismatch("donaldson_futaki", &cert.donaldson_futaki, &df);
    }
    let report = family.positivity(&cert.tau_minus, &cert.tau_plus)?;
    if !report.pass || !cert.positivity.pass {
        return Err(FutakiError::VerificationMismatch {
            field: "positivity",
            stored: cert.positivity.pass.to_string(),
            recomputed: report.pass.to_string(),
        });
    }
    let slope = cert.model.slope_plus();
    if slope != cert.slope {
        return mismatch("slope", &cert.slope, &slope);
    }
    Ok(())
}

/// Mean scalar ratio of the orbifold family, re-exported shape used by the
/// degenerate-limit comparisons.
pub fn orbifold_limit_coefficient(model: &CentralFiberModel, c: &Rat) -> Rat {
    let orders: Vec<u64> = model.points.iter().map(|p| p.weight.denom()).collect();
    let chi = chi_orbifold(model.genus, &orders);
    let r = crate::lattice::orbifold_mean_scalar(&model.par_deg_e(), &chi, c);
    Rat::one() - rat(2, 3) * r
}
