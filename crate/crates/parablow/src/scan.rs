//! Exact grid scans of the two-parameter invariant, rendered as CSV.
//!
//! Every entry is computed in exact rational arithmetic and the rows are
//! emitted in a fixed row-major order, so the output is byte-identical no
//! matter how many threads do the work.

use num_traits::{One, Signed};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::futaki::{FutakiError, Futs2Family, Sign};
use crate::rational::{rat, render_decimal, render_rat, Rat};

#[derive(Clone, Debug)]
pub struct ScanSpec {
    /// Samples per axis.
    pub grid: u32,
    /// Open upper bound for both parameters; must lie in `(0, 1)`.
    pub tau_max: Rat,
    pub c_base: Rat,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec {
            grid: 16,
            tau_max: rat(1, 16),
            c_base: rat(1000, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub tau_minus: Rat,
    pub tau_plus: Rat,
    pub futaki: Rat,
}

/// The sample positions for one axis: `i * tau_max / (n + 1)` for
/// `i = 1, ..., n`, strictly inside `(0, tau_max)`.
pub fn grid_points(spec: &ScanSpec) -> Result<Vec<Rat>, FutakiError> {
    if !spec.tau_max.is_positive() || spec.tau_max >= Rat::one() {
        return Err(FutakiError::OutOfRange(format!(
            "tau_max must lie in (0, 1), got {}",
            render_rat(&spec.tau_max)
        )));
    }
    let step = &spec.tau_max / rat(i64::from(spec.grid) + 1, 1);
    Ok((1..=i64::from(spec.grid))
        .map(|i| rat(i, 1) * &step)
        .collect())
}

fn evaluate(family: &Futs2Family, pair: &(Rat, Rat)) -> Result<ScanRow, FutakiError> {
    Ok(ScanRow {
        tau_minus: pair.0.clone(),
        tau_plus: pair.1.clone(),
        futaki: family.futaki_closed(&pair.0, &pair.1)?,
    })
}

fn grid_pairs(spec: &ScanSpec) -> Result<Vec<(Rat, Rat)>, FutakiError> {
    let points = grid_points(spec)?;
    let mut pairs = Vec::with_capacity(points.len() * points.len());
    for minus in &points {
        for plus in &points {
            pairs.push((minus.clone(), plus.clone()));
        }
    }
    Ok(pairs)
}

/// Single-threaded scan, kept unconditionally for benchmark comparison.
pub fn scan_rows_sequential(
    family: &Futs2Family,
    spec: &ScanSpec,
) -> Result<Vec<ScanRow>, FutakiError> {
    grid_pairs(spec)?
        .iter()
        .map(|pair| evaluate(family, pair))
        .collect()
}

/// Scans the grid in row-major order (`tau_minus` outer).  With the
/// `parallel` feature the cells are computed on the rayon pool; the indexed
/// collect keeps the ordering, so results match the sequential path exactly.
#[cfg(feature = "parallel")]
pub fn scan_rows(family: &Futs2Family, spec: &ScanSpec) -> Result<Vec<ScanRow>, FutakiError> {
    grid_pairs(spec)?
        .par_iter()
        .map(|pair| evaluate(family, pair))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn scan_rows(family: &Futs2Family, spec: &ScanSpec) -> Result<Vec<ScanRow>, FutakiError> {
    scan_rows_sequential(family, spec)
}

/// Renders rows as CSV with a fixed header.  `sign` is `-1`, `0`, or `1`;
/// the decimal column is the invariant to 12 significant digits.
pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("tau_minus,tau_plus,futaki,futaki_decimal,sign\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            render_rat(&row.tau_minus),
            render_rat(&row.tau_plus),
            render_rat(&row.futaki),
            render_decimal(&row.futaki, 12),
            Sign::of(&row.futaki).as_i8(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::fractions::Weight;
    use crate::surface::{CentralFiberModel, ModelPoint, Side};

    fn balanced_family() -> Futs2Family {
        let model = CentralFiberModel {
            genus: 0,
            deg_plus: 0,
            deg_minus: 1,
            points: vec![
                ModelPoint {
                    fiber: "y1".to_string(),
                    weight: Weight::new(1, 2).unwrap(),
                    side: Side::Plus,
                },
                ModelPoint {
                    fiber: "y2".to_string(),
                    weight: Weight::new(1, 2).unwrap(),
                    side: Side::Plus,
                },
            ],
        };
        Futs2Family::new(&model, &rat(1000, 1)).unwrap()
    }

    #[test]
    fn grid_point_positions() {
        let spec = ScanSpec {
            grid: 3,
            tau_max: rat(1, 16),
            c_base: rat(1000, 1),
        };
        assert_eq!(
            grid_points(&spec).unwrap(),
            vec![rat(1, 64), rat(1, 32), rat(3, 64)]
        );
    }

    #[test]
    fn rejects_tau_max_outside_unit_interval() {
        for bad in [rat(0, 1), rat(1, 1), rat(3, 2), rat(-1, 16)] {
            let spec = ScanSpec {
                grid: 2,
                tau_max: bad,
                c_base: rat(1000, 1),
            };
            assert!(matches!(
                grid_points(&spec),
                Err(FutakiError::OutOfRange(_))
            ));
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let family = balanced_family();
        let spec = ScanSpec {
            grid: 4,
            ..ScanSpec::default()
        };
        let seq = scan_rows_sequential(&family, &spec).unwrap();
        let par = scan_rows(&family, &spec).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 16);
        assert_eq!(rows_to_csv(&seq), rows_to_csv(&par));
    }

    #[test]
    fn rows_are_row_major_and_diagonal_vanishes() {
        let family = balanced_family();
        let spec = ScanSpec {
            grid: 3,
            ..ScanSpec::default()
        };
        let rows = scan_rows(&family, &spec).unwrap();
        let points = grid_points(&spec).unwrap();
        assert_eq!(rows[0].tau_minus, points[0]);
        assert_eq!(rows[0].tau_plus, points[0]);
        assert_eq!(rows[1].tau_minus, points[0]);
        assert_eq!(rows[1].tau_plus, points[1]);
        assert_eq!(rows[3].tau_minus, points[1]);
        // Equal parameters are a symmetry axis of this model.
        for i in 0..3 {
            assert!(rows[4 * i].futaki.is_zero());
        }
        // Off the diagonal the invariant is nonzero with antisymmetric sign:
        // it decreases in tau_minus and increases in tau_plus.
        assert!(rows[1].futaki.is_positive());
        assert!(rows[3].futaki.is_negative());
    }

    #[test]
    fn csv_layout() {
        let rows = vec![ScanRow {
            tau_minus: rat(1, 64),
            tau_plus: rat(1, 32),
            futaki: rat(-1, 3),
        }];
        let csv = rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "tau_minus,tau_plus,futaki,futaki_decimal,sign"
        );
        assert_eq!(lines.next().unwrap(), "1/64,1/32,-1/3,-0.333333333333,-1");
        assert!(lines.next().is_none());
    }
}
