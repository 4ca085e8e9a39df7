//! Iterated blowup over a marked fiber and Cremona transformations.
//!
//! Blowing up a marked point of weight `p/q` and then iterating at the
//! successive intersection points produces a chain of rational curves: a
//! string with self-intersections `-e_i` (the expansion of `p/q`), a central
//! `-1` curve `E_0`, and a second string for the complementary weight.  The
//! left/right choices follow the Stern-Brocot mediant rule on the pair
//! `(w, v)` of multiplicities carried by the current `-1` curve.
//!
//! # Invariants
//! - Exactly one node has self-intersection `-1` (at `e0_index`); it carries
//!   `w = q`, `v = p`.
//! - Node weights `w` are the multiplicities of the fiber class `F` in the
//!   chain, `v` those of the first exceptional class; both satisfy the chain
//!   recurrence `w_{j-1} - e_j w_j + w_{j+1} = 0`.
//! - End nodes have `w = 1`; the left end has `v = 0`, the right end `v = 1`.

use crate::fractions::Weight;
use crate::lattice::{H2Class, SurfaceLattice};
use crate::rational::{rat, Rat};
use crate::surface::Side;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlowupError {
    #[error("Cremona transformation to S+ requires the marked point on S-")]
    PointNotOnSMinus,
}

/// Which neighbour of the current `-1` curve is blown up next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainSide {
    Left,
    Right,
}

/// One rational curve in the exceptional chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveNode {
    pub self_int: i64,
    /// Multiplicity in the decomposition of the fiber class.
    pub w: u64,
    /// Multiplicity in the decomposition of the first exceptional class.
    pub v: u64,
    pub cls: H2Class,
}

/// The full exceptional chain over one marked fiber, ordered left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberChain {
    pub weight: Weight,
    pub nodes: Vec<CurveNode>,
    pub e0_index: usize,
    /// Exceptional basis indices in creation order; the first one is the
    /// blowup at the marked point itself.
    pub blowup_ids: Vec<usize>,
}

/// The left/right decisions taken after the two forced initial blowups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupTrace {
    pub choices: Vec<ChainSide>,
}

/// Exact values of the two telescoping weight sums of a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightIdentities {
    /// `sum 1/(w_n w_{n+1})` over consecutive pairs from the left end to
    /// `E_0`; equals the fiber weight.
    pub left_sum: Rat,
    /// Same sum from `E_0` to the right end; equals one minus the weight.
    pub right_sum: Rat,
}

impl FiberChain {
    /// Number of curves strictly left of `E_0`.
    pub fn k(&self) -> usize {
        self.e0_index
    }

    /// Number of curves strictly right of `E_0`.
    pub fn l(&self) -> usize {
        self.nodes.len() - 1 - self.e0_index
    }

    pub fn q(&self) -> u64 {
        self.weight.denom()
    }

    /// Basis index of the blowup at the marked point.
    pub fn first_blowup(&self) -> usize {
        self.blowup_ids[0]
    }

    pub fn flattened_weights(&self) -> Vec<u64> {
        self.nodes.iter().map(|n| n.w).collect()
    }

    pub fn self_ints(&self) -> Vec<i64> {
        self.nodes.iter().map(|n| n.self_int).collect()
    }

    /// Entries `e_1..e_k` read off the left string (negated self-ints).
    pub fn minus_string(&self) -> Vec<u64> {
        self.nodes[..self.e0_index]
            .iter()
            .map(|n| (-n.self_int) as u64)
            .collect()
    }

    /// Entries `e_1..e_l` of the right string, numbered from the far end
    /// inward (chain order reversed).
    pub fn plus_string(&self) -> Vec<u64> {
        self.nodes[self.e0_index + 1..]
            .iter()
            .rev()
            .map(|n| (-n.self_int) as u64)
            .collect()
    }

    /// `sum w_j [E_j]`; equals the fiber class exactly.
    pub fn fiber_decomposition(&self) -> H2Class {
        self.weighted_sum(|n| n.w)
    }

    /// `sum v_j [E_j]`; equals the first exceptional class exactly.
    pub fn ehat_decomposition(&self) -> H2Class {
        self.weighted_sum(|n| n.v)
    }

    fn weighted_sum(&self, coeff: impl Fn(&CurveNode) -> u64) -> H2Class {
        let mut acc = self.nodes[0]
            .cls
            .scale(&rat(coeff(&self.nodes[0]) as i64, 1));
        for node in &self.nodes[1..] {
            acc = &acc + &node.cls.scale(&rat(coeff(node) as i64, 1));
        }
        acc
    }
}

/// Builds the exceptional chain for a marked point of the given weight,
/// allocating fresh exceptional classes in `lattice`.
pub fn build_chain(alpha: Weight, lattice: &mut SurfaceLattice) -> (FiberChain, BlowupTrace) {
    descend(alpha, lattice, None)
}

/// Replays a recorded choice sequence; the result must reproduce the chain.
pub fn replay_chain(
    trace: &BlowupTrace,
    alpha: Weight,
    lattice: &mut SurfaceLattice,
) -> FiberChain {
    descend(alpha, lattice, Some(&trace.choices)).0
}

fn descend(
    alpha: Weight,
    lattice: &mut SurfaceLattice,
    follow: Option<&[ChainSide]>,
) -> (FiberChain, BlowupTrace) {
    let mut ids = Vec::new();

    // Start from the fiber itself, then the two forced blowups: first at the
    // marked point, then at the intersection of the two resulting curves.
    let mut nodes = vec![CurveNode {
        self_int: 0,
        w: 1,
        v: 0,
        cls: lattice.fiber(),
    }];
    let first = lattice.alloc_blowup();
    ids.push(first);
    let e_first = lattice.exceptional(first);
    nodes[0].self_int -= 1;
    nodes[0].cls.sub_exceptional(first);
    nodes.push(CurveNode {
        self_int: -1,
        w: 1,
        v: 1,
        cls: e_first,
    });
    insert_blowup(lattice, &mut nodes, &mut ids, 0);

    let mut cur = 1usize;
    let mut choices = Vec::new();
    let (p, q) = (alpha.numer() as u128, alpha.denom() as u128);
    loop {
        let (w, v) = (nodes[cur].w as u128, nodes[cur].v as u128);
        debug_assert_eq!(nodes[cur].self_int, -1);
        if v * q == p * w {
            break;
        }
        let side = match follow {
            Some(list) => list[choices.len()],
            // Mediant rule: descend toward the side of v/w that alpha is on.
            None if p * w < v * q => ChainSide::Left,
            None => ChainSide::Right,
        };
        choices.push(side);
        match side {
            ChainSide::Left => insert_blowup(lattice, &mut nodes, &mut ids, cur - 1),
            ChainSide::Right => {
                insert_blowup(lattice, &mut nodes, &mut ids, cur);
                cur += 1;
            }
        }
    }

    let chain = FiberChain {
        weight: alpha,
        nodes,
        e0_index: cur,
        blowup_ids: ids,
    };
    (chain, BlowupTrace { choices })
}

/// Blows up the intersection point of `nodes[at]` and `nodes[at + 1]`.
fn insert_blowup(
    lattice: &mut SurfaceLattice,
    nodes: &mut Vec<CurveNode>,
    ids: &mut Vec<usize>,
    at: usize,
) {
    let id = lattice.alloc_blowup();
    ids.push(id);
    let e_new = lattice.exceptional(id);
    let (w, v) = (nodes[at].w + nodes[at + 1].w, nodes[at].v + nodes[at + 1].v);
    for node in &mut nodes[at..=at + 1] {
        node.self_int -= 1;
        node.cls.sub_exceptional(id);
    }
    nodes.insert(
        at + 1,
        CurveNode {
            self_int: -1,
            w,
            v,
            cls: e_new,
        },
    );
}

/// Evaluates the two exact telescoping sums of a chain.
pub fn weight_identities(chain: &FiberChain) -> WeightIdentities {
    let w = chain.flattened_weights();
    let segment_sum = |range: std::ops::Range<usize>| {
        range
            .map(|i| rat(1, (w[i] * w[i + 1]) as i64))
            .fold(rat(0, 1), |acc, term| acc + term)
    };
    WeightIdentities {
        left_sum: segment_sum(0..chain.e0_index),
        right_sum: segment_sum(chain.e0_index..w.len() - 1),
    }
}

/// Per-fiber data transformed by a Cremona move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CremonaData {
    pub side: Side,
    pub weight: Weight,
    pub s_minus_sq: i64,
    pub s_plus_sq: i64,
}

/// Elementary transformation at the marked fiber: the point switches
/// sections, its weight flips to the complement, the self-intersection of
/// the section that held the point drops by one and the other grows by one.
/// Applying it twice is the identity.
pub fn cremona(data: &CremonaData) -> CremonaData {
    let (d_minus, d_plus) = match data.side {
        Side::Minus => (-1, 1),
        Side::Plus => (1, -1),
    };
    CremonaData {
        side: match data.side {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        },
        weight: data.weight.complement(),
        s_minus_sq: data.s_minus_sq + d_minus,
        s_plus_sq: data.s_plus_sq + d_plus,
    }
}

/// Cremona move restricted to its normalizing direction.
pub fn cremona_to_splus(data: &CremonaData) -> Result<CremonaData, BlowupError> {
    if data.side != Side::Minus {
        return Err(BlowupError::PointNotOnSMinus);
    }
    Ok(cremona(data))
}
