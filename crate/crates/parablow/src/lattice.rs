//! Intersection lattice of the blown-up split ruled surface.
//!
//! Classes live in the basis `{C, F, E_i}`: hyperplane class `C`, fiber
//! class `F`, and one total-transform exceptional class per blowup.  The
//! pairing is `C*C = deg L+ + deg L-`, `C*F = 1`, `F*F = 0`,
//! `E_i*E_j = -delta_ij`, everything else zero.
//!
//! Kähler classes are assembled as `C + C_base*F` plus corrections along the
//! chain curves solving prescribed areas; the string Gram matrices are
//! negative definite, so the exact rational solve cannot degenerate.
//!
//! # Invariants
//! - `H2Class` coefficient maps are zero-pruned, so structural equality is
//!   value equality.
//! - Classes carry the identity of their owning lattice; pairing classes
//!   from different lattices is an error, not a silent wrong answer.

use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

use crate::blowup::FiberChain;
use crate::rational::{rat, render_rat, rint, Rat};
use crate::surface::{CentralFiberModel, Side};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("classes belong to different lattices")]
    LatticeMismatch,
    #[error("class has non-positive self-intersection {0}")]
    NonPositiveSquare(String),
    #[error("chain-curve system is singular")]
    SingularSystem,
    #[error("a first blowup center is not on S+; normalize the model first")]
    CenterNotOnSPlus,
    #[error("expected {expected} area vectors / chains, got {got}")]
    ChainCountMismatch { expected: usize, got: usize },
    #[error("area vector for a chain with strings ({k},{l}) has lengths ({got_minus},{got_plus})")]
    AreaLengthMismatch {
        k: usize,
        l: usize,
        got_minus: usize,
        got_plus: usize,
    },
}

static NEXT_LATTICE_ID: AtomicU64 = AtomicU64::new(1);

/// A second-cohomology class with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2Class {
    lattice: u64,
    c: Rat,
    f: Rat,
    e: BTreeMap<usize, Rat>,
}

impl H2Class {
    fn zero(lattice: u64) -> Self {
        H2Class {
            lattice,
            c: Rat::zero(),
            f: Rat::zero(),
            e: BTreeMap::new(),
        }
    }

    pub fn coeff_c(&self) -> &Rat {
        &self.c
    }

    pub fn coeff_f(&self) -> &Rat {
        &self.f
    }

    pub fn coeff_e(&self, id: usize) -> Rat {
        self.e.get(&id).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.f.is_zero() && self.e.is_empty()
    }

    pub fn scale(&self, k: &Rat) -> H2Class {
        if k.is_zero() {
            return H2Class::zero(self.lattice);
        }
        H2Class {
            lattice: self.lattice,
            c: &self.c * k,
            f: &self.f * k,
            e: self.e.iter().map(|(i, v)| (*i, v * k)).collect(),
        }
    }

    fn prune(mut self) -> Self {
        self.e.retain(|_, v| !v.is_zero());
        self
    }

    /// In-place `self -= E_id`; avoids rebuilding the coefficient map on the
    /// chain builder's hot path.
    pub(crate) fn sub_exceptional(&mut self, id: usize) {
        use std::collections::btree_map::Entry;
        match self.e.entry(id) {
            Entry::Vacant(slot) => {
                slot.insert(-Rat::one());
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() -= Rat::one();
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }
}

impl Add for &H2Class {
    type Output = H2Class;

    fn add(self, rhs: &H2Class) -> H2Class {
        assert_eq!(self.lattice, rhs.lattice, "mixed-lattice class arithmetic");
        let mut e = self.e.clone();
        for (i, v) in &rhs.e {
            let entry = e.entry(*i).or_insert_with(Rat::zero);
            *entry += v;
        }
        H2Class {
            lattice: self.lattice,
            c: &self.c + &rhs.c,
            f: &self.f + &rhs.f,
            e,
        }
        .prune()
    }
}

impl Sub for &H2Class {
    type Output = H2Class;

    fn sub(self, rhs: &H2Class) -> H2Class {
        self + &(-rhs)
    }
}

impl Neg for &H2Class {
    type Output = H2Class;

    fn neg(self) -> H2Class {
        self.scale(&rat(-1, 1))
    }
}

impl fmt::Display for H2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, coeff: &Rat, symbol: String| {
            if coeff.is_zero() {
                return Ok(());
            }
            let sign = if coeff.is_negative() { "-" } else { "+" };
            let mag = coeff.abs();
            if first {
                first = false;
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "{symbol}")
            } else {
                write!(f, "{}{symbol}", render_rat(&mag))
            }
        };
        term(f, &self.c, "C".to_string())?;
        term(f, &self.f, "F".to_string())?;
        for (i, v) in &self.e {
            term(f, v, format!("E{}", i + 1))?;
        }
        Ok(())
    }
}

/// Lattice descriptor: base genus, degrees of the two line bundles, and the
/// number of exceptional classes allocated so far.
#[derive(Clone, Debug)]
pub struct SurfaceLattice {
    id: u64,
    genus: u32,
    deg_plus: i64,
    deg_minus: i64,
    blowups: usize,
}

impl SurfaceLattice {
    pub fn new(genus: u32, deg_plus: i64, deg_minus: i64) -> Self {
        SurfaceLattice {
            id: NEXT_LATTICE_ID.fetch_add(1, Ordering::Relaxed),
            genus,
            deg_plus,
            deg_minus,
            blowups: 0,
        }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn deg_plus(&self) -> i64 {
        self.deg_plus
    }

    pub fn deg_minus(&self) -> i64 {
        self.deg_minus
    }

    pub fn blowup_count(&self) -> usize {
        self.blowups
    }

    pub fn zero_class(&self) -> H2Class {
        H2Class::zero(self.id)
    }

    pub fn hyperplane(&self) -> H2Class {
        let mut cls = H2Class::zero(self.id);
        cls.c = Rat::one();
        cls
    }

    pub fn fiber(&self) -> H2Class {
        let mut cls = H2Class::zero(self.id);
        cls.f = Rat::one();
        cls
    }

    /// Total-transform exceptional class of blowup `id`.
    pub fn exceptional(&self, id: usize) -> H2Class {
        assert!(id < self.blowups, "exceptional class {id} not allocated");
        let mut cls = H2Class::zero(self.id);
        cls.e.insert(id, Rat::one());
        cls
    }

    /// Registers a fresh blowup and returns its basis index.
    pub fn alloc_blowup(&mut self) -> usize {
        let id = self.blowups;
        self.blowups += 1;
        id
    }

    /// Exact intersection pairing.
    pub fn pair(&self, a: &H2Class, b: &H2Class) -> Result<Rat, LatticeError> {
        if a.lattice != self.id || b.lattice != self.id {
            return Err(LatticeError::LatticeMismatch);
        }
        let mut value = &a.c * &b.c * rint(self.deg_plus + self.deg_minus);
        value += &a.c * &b.f + &a.f * &b.c;
        for (i, av) in &a.e {
            if let Some(bv) = b.e.get(i) {
                value -= av * bv;
            }
        }
        Ok(value)
    }

    /// Section class of the sub-bundle of degree `deg_plus`.
    pub fn s_plus(&self) -> H2Class {
        &self.hyperplane() - &self.fiber().scale(&rint(self.deg_plus))
    }

    /// Section class of the sub-bundle of degree `deg_minus`.
    pub fn s_minus(&self) -> H2Class {
        &self.hyperplane() - &self.fiber().scale(&rint(self.deg_minus))
    }

    /// Anticanonical class of the blown-up surface.
    pub fn canonical_first_chern(&self) -> H2Class {
        let mut cls = self.hyperplane().scale(&rint(2));
        let f_coeff = self.deg_plus + self.deg_minus - (2 - 2 * self.genus as i64);
        cls = &cls - &self.fiber().scale(&rint(f_coeff));
        for id in 0..self.blowups {
            cls = &cls - &self.exceptional(id);
        }
        cls
    }

    /// Symplectic volume `omega^2 / 2`.
    pub fn volume(&self, omega: &H2Class) -> Result<Rat, LatticeError> {
        let square = self.pair(omega, omega)?;
        if !square.is_positive() {
            return Err(LatticeError::NonPositiveSquare(render_rat(&square)));
        }
        Ok(square / rint(2))
    }

    /// Mean scalar curvature ratio `r = c1.omega / omega^2` (the average
    /// scalar curvature is `8*pi*r`).
    pub fn mean_scalar(&self, omega: &H2Class) -> Result<Rat, LatticeError> {
        let square = self.pair(omega, omega)?;
        if !square.is_positive() {
            return Err(LatticeError::NonPositiveSquare(render_rat(&square)));
        }
        Ok(self.pair(&self.canonical_first_chern(), omega)? / square)
    }
}

/// Orbifold Euler characteristic `(2 - 2g) + sum(1/q_j - 1)`.
pub fn chi_orbifold(genus: u32, orders: &[u64]) -> Rat {
    let mut chi = rint(2 - 2 * genus as i64);
    for &q in orders {
        chi += rat(1, q as i64) - Rat::one();
    }
    chi
}

/// Mean scalar curvature ratio of the orbifold family at scale `c`:
/// `(par_deg_e + chi_orb + 2c) / (par_deg_e + 2c)`.
pub fn orbifold_mean_scalar(par_deg_e: &Rat, chi_orb: &Rat, c: &Rat) -> Rat {
    let two_c = c * rint(2);
    let denom = par_deg_e + &two_c;
    debug_assert!(
        denom.is_positive(),
        "orbifold class has non-positive square"
    );
    (par_deg_e + chi_orb + two_c) / denom
}

/// Prescribed areas for the two contracted strings of one chain, ordered
/// from the far end inward on each side (`E1` first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainAreas {
    pub minus: Vec<Rat>,
    pub plus: Vec<Rat>,
}

impl ChainAreas {
    pub fn zero(chain: &FiberChain) -> Self {
        ChainAreas {
            minus: vec![Rat::zero(); chain.k()],
            plus: vec![Rat::zero(); chain.l()],
        }
    }

    /// The two-parameter family: the end curve of each string gets the full
    /// area (`tau-` on the left, `tau+` on the right), interior curves zero.
    pub fn two_parameter(chain: &FiberChain, tau_minus: &Rat, tau_plus: &Rat) -> Self {
        let mut areas = ChainAreas::zero(chain);
        if let Some(first) = areas.minus.first_mut() {
            *first = tau_minus.clone();
        }
        if let Some(first) = areas.plus.first_mut() {
            *first = tau_plus.clone();
        }
        areas
    }
}

/// A Kähler candidate class together with the derived central areas.
#[derive(Clone, Debug)]
pub struct KahlerBuild {
    pub class: H2Class,
    /// `omega * E_0` per chain, in input order.
    pub e0_areas: Vec<Rat>,
    /// Set when some derived central area is non-positive; the class is then
    /// certainly not Kähler, but it is still returned for inspection.
    pub negative_derived_area: bool,
}

/// Solves `omega * E = area` for corrections along the string curves.
///
/// `omega = C + c_base*F + sum y_j [E_j]` where the `[E_j]` run over both
/// strings of every chain (never `E_0`); `omega * F = 1` holds automatically
/// in this basis, and the area of each `E_0` is determined by the fiber
/// decomposition.
pub fn kahler_from_areas(
    lattice: &SurfaceLattice,
    chains: &[FiberChain],
    c_base: &Rat,
    areas: &[ChainAreas],
) -> Result<KahlerBuild, LatticeError> {
    if chains.len() != areas.len() {
        return Err(LatticeError::ChainCountMismatch {
            expected: chains.len(),
            got: areas.len(),
        });
    }
    let mut omega = &lattice.hyperplane() + &lattice.fiber().scale(c_base);
    for (chain, area) in chains.iter().zip(areas) {
        if area.minus.len() != chain.k() || area.plus.len() != chain.l() {
            return Err(LatticeError::AreaLengthMismatch {
                k: chain.k(),
                l: chain.l(),
                got_minus: area.minus.len(),
                got_plus: area.plus.len(),
            });
        }
        let string_nodes: Vec<usize> = (0..chain.nodes.len())
            .filter(|&i| i != chain.e0_index)
            .collect();
        let n = string_nodes.len();
        let mut gram = vec![vec![Rat::zero(); n]; n];
        let mut rhs = vec![Rat::zero(); n];
        for (row, &i) in string_nodes.iter().enumerate() {
            for (col, &j) in string_nodes.iter().enumerate() {
                gram[row][col] = lattice.pair(&chain.nodes[i].cls, &chain.nodes[j].cls)?;
            }
            let requested = if i < chain.e0_index {
                &area.minus[i]
            } else {
                // Right-string curves are numbered from the far end inward.
                &area.plus[chain.nodes.len() - 1 - i]
            };
            // omega_0 * E_i = F-coefficient of the curve class.
            rhs[row] = requested - chain.nodes[i].cls.coeff_f();
        }
        let solution = solve_exact(gram, rhs).ok_or(LatticeError::SingularSystem)?;
        for (&i, y) in string_nodes.iter().zip(&solution) {
            omega = &omega + &chain.nodes[i].cls.scale(y);
        }
    }

    let mut e0_areas = Vec::with_capacity(chains.len());
    let mut negative = false;
    for chain in chains {
        let value = lattice.pair(&omega, &chain.nodes[chain.e0_index].cls)?;
        negative |= !value.is_positive();
        e0_areas.push(value);
    }
    Ok(KahlerBuild {
        class: omega,
        e0_areas,
        negative_derived_area: negative,
    })
}

/// Gaussian elimination over the rationals with partial pivoting.
fn solve_exact(mut m: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            let (head, tail) = m.split_at_mut(r);
            let (pivot_row, row) = (&head[col], &mut tail[0]);
            for (c, entry) in pivot_row.iter().enumerate().skip(col) {
                let delta = &factor * entry;
                row[c] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    let mut x = vec![Rat::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for c in row + 1..n {
            acc -= &m[row][c] * &x[c];
        }
        x[row] = acc / &m[row][row];
    }
    Some(x)
}

/// The four distinguished section classes of a normalized model.
#[derive(Clone, Debug)]
pub struct SectionClasses {
    pub s_plus: H2Class,
    pub s_minus: H2Class,
    pub s_hat_plus: H2Class,
    pub s_hat_minus: H2Class,
}

/// Proper transforms of the split sections: `S+` loses one exceptional class
/// per marked fiber (every blowup center sits on it after normalization),
/// `S-` is untouched.
pub fn section_classes(
    lattice: &SurfaceLattice,
    model: &CentralFiberModel,
    chains: &[FiberChain],
) -> Result<SectionClasses, LatticeError> {
    if model.points.iter().any(|p| p.side == Side::Minus) {
        return Err(LatticeError::CenterNotOnSPlus);
    }
    if model.points.len() != chains.len() {
        return Err(LatticeError::ChainCountMismatch {
            expected: model.points.len(),
            got: chains.len(),
        });
    }
    let mut s_hat_plus = lattice.s_plus();
    for chain in chains {
        s_hat_plus = &s_hat_plus - &lattice.exceptional(chain.first_blowup());
    }
    Ok(SectionClasses {
        s_plus: lattice.s_plus(),
        s_minus: lattice.s_minus(),
        s_hat_plus,
        s_hat_minus: lattice.s_minus(),
    })
}

#[derive(Clone, Debug)]
pub struct PositivityItem {
    pub label: String,
    pub value: Rat,
    pub ok: bool,
}

/// Necessary positivity conditions for a Kähler class, one line per pairing.
#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub items: Vec<PositivityItem>,
    pub pass: bool,
}

/// Checks the necessary conditions `omega^2 > 0`, `omega*F > 0`, strict
/// positivity on each `E_0`, on both chain-end curves, and on both
/// transformed sections.  Interior string curves are the ones the orbifold
/// limit contracts: the two-parameter family keeps them at area exactly
/// zero, so they are only required to be nonnegative.  This is not an
/// ampleness test; failing is conclusive, passing is not.
pub fn kahler_necessary_check(
    lattice: &SurfaceLattice,
    chains: &[FiberChain],
    sections: &SectionClasses,
    omega: &H2Class,
) -> Result<PositivityReport, LatticeError> {
    let mut items = Vec::new();
    let mut push = |label: String, value: Rat, strict: bool| {
        let ok = if strict {
            value.is_positive()
        } else {
            !value.is_negative()
        };
        items.push(PositivityItem { label, value, ok });
    };
    push("omega^2".to_string(), lattice.pair(omega, omega)?, true);
    push(
        "omega*F".to_string(),
        lattice.pair(omega, &lattice.fiber())?,
        true,
    );
    for (ci, chain) in chains.iter().enumerate() {
        let last = chain.nodes.len() - 1;
        for (ni, node) in chain.nodes.iter().enumerate() {
            let label = if ni == chain.e0_index {
                format!("omega*E0[chain {ci}]")
            } else {
                format!("omega*E[chain {ci}, node {ni}]")
            };
            let strict = ni == chain.e0_index || ni == 0 || ni == last;
            push(label, lattice.pair(omega, &node.cls)?, strict);
        }
    }
    push(
        "omega*S+hat".to_string(),
        lattice.pair(omega, &sections.s_hat_plus)?,
        true,
    );
    push(
        "omega*S-hat".to_string(),
        lattice.pair(omega, &sections.s_hat_minus)?,
        true,
    );
    let pass = items.iter().all(|item| item.ok);
    Ok(PositivityReport { items, pass })
}
