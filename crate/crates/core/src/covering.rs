//! Upper-bound machinery: δ-covers and their sums Σ|Uᵢ|ˢ, the box-to-ball
//! sandwich, grid box counting, and log-log regression estimates.
//!
//! Cover sums over the natural cell covers exhibit the phase transition that
//! defines the dimension: (Σᵢ rᵢˢ)^depth stays at 1 exactly at the critical
//! exponent, decays above it and blows up below it.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::dimension::{DimensionEstimate, Method};
use crate::fmt::sig17;
use crate::geometry::{AxisBox, Ball, Point};
use crate::ifs::Ifs;
use crate::{Error, Result};

/// One element of a cover, with its diameter cached at construction.
#[derive(Debug, Clone)]
pub struct CoverElement {
    shape: Shape,
    diameter: f64,
}

#[derive(Debug, Clone)]
pub enum Shape {
    Box(AxisBox),
    Ball(Ball),
}

impl CoverElement {
    pub fn from_box(b: AxisBox) -> Self {
        let diameter = b.diameter();
        Self {
            shape: Shape::Box(b),
            diameter,
        }
    }

    pub fn from_ball(b: Ball) -> Self {
        let diameter = b.diameter();
        Self {
            shape: Shape::Ball(b),
            diameter,
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.shape, Shape::Ball(_))
    }
}

/// A finite δ-cover: δ is the largest element diameter.
#[derive(Debug, Clone)]
pub struct Cover {
    elements: Vec<CoverElement>,
    delta: f64,
}

impl Cover {
    pub fn new(elements: Vec<CoverElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidCover("cover needs at least one element"));
        }
        let delta = elements
            .iter()
            .map(CoverElement::diameter)
            .fold(f64::NEG_INFINITY, f64::max);
        if delta <= 0.0 {
            return Err(Error::InvalidCover("cover delta must be positive"));
        }
        Ok(Self { elements, delta })
    }

    pub fn from_boxes(boxes: Vec<AxisBox>) -> Result<Self> {
        Self::new(boxes.into_iter().map(CoverElement::from_box).collect())
    }

    pub fn elements(&self) -> &[CoverElement] {
        &self.elements
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The value Σ diameterᵢˢ over a cover, with the scale it came from.
#[derive(Debug, Clone, Copy)]
pub struct CoverSum {
    pub s: f64,
    pub value: f64,
    /// Provenance scalar: the cover's δ, or the refinement depth for tables
    /// built over natural covers.
    pub depth_or_delta: f64,
}

/// Box counts per scale; deltas strictly decrease and counts never do.
#[derive(Debug, Clone)]
pub struct BoxCountSeries {
    entries: Vec<(f64, usize)>,
}

impl BoxCountSeries {
    /// Count occupied grid cells of the same cloud at every scale.
    pub fn from_points(points: &[Point], deltas: &[f64]) -> Result<Self> {
        validate_deltas(deltas, 1)?;
        let mut entries = Vec::with_capacity(deltas.len());
        for &delta in deltas {
            entries.push((delta, box_count(points, delta)?));
        }
        for pair in entries.windows(2) {
            if pair[1].1 < pair[0].1 {
                return Err(Error::InvalidScales(format!(
                    "count dropped from {} to {} as delta shrank from {} to {}",
                    pair[0].1, pair[1].1, pair[0].0, pair[1].0
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    /// CSV with header `delta,count`, LF newlines, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,count\n");
        for (delta, count) in &self.entries {
            let _ = writeln!(out, "{},{count}", sig17(*delta));
        }
        out
    }
}

/// Σ diameterᵢˢ. At s = 0 this is the element count.
pub fn cover_sum(c: &Cover, s: f64) -> Result<CoverSum> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::NegativeExponent(s));
    }
    let value = c.elements.iter().map(|e| e.diameter().powf(s)).sum();
    Ok(CoverSum {
        s,
        value,
        depth_or_delta: c.delta,
    })
}

/// The cells of `refine(ifs, depth)` as a cover; its δ is the largest cell
/// diameter.
pub fn natural_cover(ifs: &Ifs, depth: usize) -> Result<Cover> {
    let cells = ifs.refine(depth)?;
    Cover::from_boxes(cells.cells().iter().map(|c| c.bounds.clone()).collect())
}

/// The N² closed grid squares of side 1/n tiling the unit square.
pub fn grid_cover(n: usize) -> Result<Cover> {
    if n == 0 {
        return Err(Error::InvalidScales("grid needs n >= 1".into()));
    }
    let step = |i: usize| i as f64 / n as f64;
    let mut boxes = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            boxes.push(AxisBox::rect(
                (step(i), step(i + 1)),
                (step(j), step(j + 1)),
            )?);
        }
    }
    Cover::from_boxes(boxes)
}

/// Cover sums over natural covers at every requested (depth, s) pair.
pub fn cover_sum_table(
    ifs: &Ifs,
    depths: &[usize],
    exponents: &[f64],
) -> Result<Vec<(usize, f64, f64)>> {
    let mut rows = Vec::with_capacity(depths.len() * exponents.len());
    for &depth in depths {
        let cover = natural_cover(ifs, depth)?;
        for &s in exponents {
            rows.push((depth, s, cover_sum(&cover, s)?.value));
        }
    }
    Ok(rows)
}

/// CSV with header `depth,s,cover_sum` over [`cover_sum_table`] rows.
pub fn cover_sum_table_csv(rows: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("depth,s,cover_sum\n");
    for (depth, s, value) in rows {
        let _ = writeln!(out, "{depth},{},{}", sig17(*s), sig17(*value));
    }
    out
}

/// Smallest exponent above which the natural cover sums vanish with depth,
/// so dim ≤ s for every s above the result.
///
/// Equal-ratio systems admit the analytic transition N·rˢ = 1. Unequal
/// ratios are bracketed by bisection on the decay predicate
/// `sum(depth_max, s) < sum(depth_min, s)`, which flips exactly at the Moran
/// root because the depth-d sum is (Σᵢ rᵢˢ)^d · diam(seed)ˢ.
pub fn upper_bound_exponent(
    ifs: &Ifs,
    depths: &[usize],
    tolerance: f64,
) -> Result<DimensionEstimate> {
    if depths.len() < 2 {
        return Err(Error::InvalidDepths("need at least two depths".into()));
    }
    if depths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidDepths("depths must strictly increase".into()));
    }
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(Error::InvalidSampling("tolerance must be positive".into()));
    }

    let ratios = ifs.ratios();
    let n = ratios.len() as f64;
    let r_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let equal = ratios.iter().all(|r| (r - r_max).abs() <= 1e-14);

    let (value, uncertainty) = if equal {
        (n.ln() / (1.0 / r_max).ln(), 0.0)
    } else {
        let shallow = natural_cover(ifs, depths[0])?;
        let deep = natural_cover(ifs, *depths.last().expect("nonempty"))?;
        let decays = |s: f64| -> Result<bool> {
            Ok(cover_sum(&deep, s)?.value < cover_sum(&shallow, s)?.value)
        };
        let mut lo = 0.0;
        let mut hi = n.ln() / (1.0 / r_max).ln();
        debug_assert!(decays(hi)?);
        while hi - lo > tolerance {
            let mid = 0.5 * (lo + hi);
            if decays(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (0.5 * (lo + hi), hi - lo)
    };

    let mut metadata = String::from("cover sums at the transition exponent:");
    for &depth in depths {
        let sum = cover_sum(&natural_cover(ifs, depth)?, value)?.value;
        let _ = write!(metadata, " depth {depth}: {sum};");
    }
    Ok(DimensionEstimate {
        value,
        method: Method::BoundCertificate,
        uncertainty,
        metadata,
    })
}

/// Replace every box by its enclosing ball of radius diam(box), doubling
/// every diameter and hence scaling any cover sum by exactly 2ˢ.
pub fn cover_to_balls(c: &Cover) -> Result<Cover> {
    let mut elements = Vec::with_capacity(c.len());
    for (index, element) in c.elements().iter().enumerate() {
        match element.shape() {
            Shape::Box(b) => elements.push(CoverElement::from_ball(b.enclosing_ball())),
            Shape::Ball(_) => return Err(Error::ElementAlreadyBall { index }),
        }
    }
    Cover::new(elements)
}

/// Number of occupied cells of the grid δ·ℤⁿ anchored at the origin; a point
/// occupies the cell indexed floor(coord/δ) per axis.
pub fn box_count(points: &[Point], delta: f64) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::EmptyPoints);
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidScales(format!("delta {delta} must be positive")));
    }
    let dim = points[0].dim();
    let mut occupied: HashSet<[i64; 2]> = HashSet::new();
    for p in points {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let mut key = [0i64; 2];
        for (axis, &c) in p.coords().iter().enumerate() {
            key[axis] = (c / delta).floor() as i64;
        }
        occupied.insert(key);
    }
    Ok(occupied.len())
}

/// Least-squares slope of log(count) against log(1/δ); the empirical
/// box-counting dimension. Uncertainty is the standard error of the slope.
pub fn boxcount_dimension(points: &[Point], deltas: &[f64]) -> Result<DimensionEstimate> {
    validate_deltas(deltas, 3)?;
    let series = BoxCountSeries::from_points(points, deltas)?;
    regress_series(&series)
}

/// Regression half of [`boxcount_dimension`], reusable when the counts are
/// already in hand.
pub fn regress_series(series: &BoxCountSeries) -> Result<DimensionEstimate> {
    let entries = series.entries();
    if entries.len() < 3 {
        return Err(Error::InvalidScales("need at least three scales".into()));
    }
    let first = entries[0].1;
    if entries.iter().all(|(_, c)| *c == first) {
        return Err(Error::DegenerateRegression);
    }

    let xs: Vec<f64> = entries.iter().map(|(d, _)| (1.0 / d).ln()).collect();
    let ys: Vec<f64> = entries.iter().map(|(_, c)| (*c as f64).ln()).collect();
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let stderr = (ss_res / (n - 2.0) / sxx).sqrt();

    Ok(DimensionEstimate {
        value: slope,
        method: Method::BoxcountRegression,
        uncertainty: stderr,
        metadata: format!(
            "least squares over {} scales, delta in [{}, {}]",
            entries.len(),
            entries.last().expect("nonempty").0,
            entries[0].0,
        ),
    })
}

fn validate_deltas(deltas: &[f64], minimum: usize) -> Result<()> {
    if deltas.len() < minimum {
        return Err(Error::InvalidScales(format!(
            "need at least {minimum} scales, got {}",
            deltas.len()
        )));
    }
    if deltas.iter().any(|d| !d.is_finite() || *d <= 0.0) {
        return Err(Error::InvalidScales("scales must be positive".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidScales("scales must strictly decrease".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{cantor_preset, square_preset};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Stage-n middle-thirds intervals built by direct endpoint subdivision,
    /// independent of the map-composition path in `Ifs::refine`.
    fn cantor_stage_intervals(n: usize) -> Vec<(f64, f64)> {
        let mut intervals = vec![(0.0, 1.0)];
        for _ in 0..n {
            intervals = intervals
                .iter()
                .flat_map(|&(lo, hi)| {
                    let third = (hi - lo) / 3.0;
                    [(lo, lo + third), (hi - third, hi)]
                })
                .collect();
        }
        intervals
    }

    #[test]
    fn cantor_cover_sum_is_one_at_the_critical_exponent() {
        let s = 2.0_f64.ln() / 3.0_f64.ln();
        let ifs = cantor_preset(1.0 / 3.0).unwrap();
        let cover = natural_cover(&ifs, 1).unwrap();
        assert_relative_eq!(cover_sum(&cover, s).unwrap().value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn grid_cover_sum_matches_the_analytic_formula() {
        let cover = grid_cover(10).unwrap();
        assert_eq!(cover.len(), 100);
        assert_relative_eq!(cover_sum(&cover, 2.0).unwrap().value, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn cover_sum_at_zero_counts_elements() {
        let cover = grid_cover(7).unwrap();
        assert_eq!(cover_sum(&cover, 0.0).unwrap().value, 49.0);
    }

    #[test]
    fn cover_sum_rejects_negative_exponents() {
        let cover = grid_cover(2).unwrap();
        assert!(matches!(
            cover_sum(&cover, -0.5),
            Err(Error::NegativeExponent(_))
        ));
    }

    #[test]
    fn natural_cover_shapes() {
        let cantor = cantor_preset(1.0 / 3.0).unwrap();
        for n in [1usize, 4, 7] {
            let cover = natural_cover(&cantor, n).unwrap();
            assert_eq!(cover.len(), 1 << n);
            assert_relative_eq!(cover.delta(), 3.0_f64.powi(-(n as i32)), max_relative = 1e-12);
        }

        let square = natural_cover(&square_preset(), 1).unwrap();
        assert_eq!(square.len(), 4);
        assert_relative_eq!(square.delta(), 2.0_f64.sqrt() / 2.0, max_relative = 1e-15);

        let seed_only = natural_cover(&cantor, 0).unwrap();
        assert_eq!(seed_only.len(), 1);
    }

    #[test]
    fn phase_transition_around_the_critical_exponent() {
        // Sums are (2·3^-s)^n: constant 1 at s*, geometric decay above,
        // geometric growth below.
        let s_star = 2.0_f64.ln() / 3.0_f64.ln();
        let ifs = cantor_preset(1.0 / 3.0).unwrap();
        let mut above_prev = f64::INFINITY;
        let mut below_prev = 0.0;
        for depth in 1..=12 {
            let cover = natural_cover(&ifs, depth).unwrap();
            let at = cover_sum(&cover, s_star).unwrap().value;
            assert_relative_eq!(at, 1.0, max_relative = 1e-12);

            let above = cover_sum(&cover, s_star + 0.1).unwrap().value;
            assert!(above < above_prev);
            above_prev = above;

            let below = cover_sum(&cover, s_star - 0.1).unwrap().value;
            assert!(below > below_prev);
            below_prev = below;
        }
    }

    #[test]
    fn upper_bound_exponent_equal_ratio_presets() {
        let cantor = cantor_preset(1.0 / 3.0).unwrap();
        let est = upper_bound_exponent(&cantor, &[1, 2, 3, 4], 1e-10).unwrap();
        assert_eq!(est.method, Method::BoundCertificate);
        assert!((est.value - 2.0_f64.ln() / 3.0_f64.ln()).abs() <= 1e-15);

        let square = upper_bound_exponent(&square_preset(), &[1, 3], 1e-10).unwrap();
        assert_eq!(square.value, 2.0);

        // alpha = 1/2 gives ratio 1/4, transition log 2/log 4 = 1/2.
        let half = cantor_preset(0.5).unwrap();
        let est = upper_bound_exponent(&half, &[1, 2, 3], 1e-10).unwrap();
        assert_eq!(est.value, 0.5);
    }

    #[test]
    fn upper_bound_matches_similarity_dimension_for_equal_ratios() {
        use crate::dimension::similarity_dimension;
        for ifs in [cantor_preset(1.0 / 3.0).unwrap(), cantor_preset(0.7).unwrap(), square_preset()] {
            let bound = upper_bound_exponent(&ifs, &[1, 2], 1e-10).unwrap();
            assert_eq!(bound.value, similarity_dimension(&ifs).value);
        }
    }

    #[test]
    fn upper_bound_exponent_unequal_ratios_finds_the_moran_root() {
        use crate::geometry::Point;
        use crate::ifs::Similitude;
        let maps = vec![
            Similitude::scaling(0.5, Point::x(0.0)).unwrap(),
            Similitude::scaling(0.25, Point::x(0.75)).unwrap(),
        ];
        let ifs = Ifs::new(maps, None, AxisBox::interval(0.0, 1.0).unwrap()).unwrap();
        let est = upper_bound_exponent(&ifs, &[2, 8], 1e-9).unwrap();
        let analytic = ((1.0 + 5.0_f64.sqrt()) / 2.0).ln() / 2.0_f64.ln();
        assert!(
            (est.value - analytic).abs() <= 1e-9 + 1e-12,
            "got {}, want {analytic}",
            est.value
        );
        assert!(est.uncertainty <= 1e-9);
    }

    #[test]
    fn upper_bound_exponent_validates_depths() {
        let ifs = cantor_preset(1.0 / 3.0).unwrap();
        assert!(upper_bound_exponent(&ifs, &[3], 1e-9).is_err());
        assert!(upper_bound_exponent(&ifs, &[3, 2], 1e-9).is_err());
        assert!(upper_bound_exponent(&ifs, &[2, 3], 0.0).is_err());
    }

    #[test]
    fn cover_to_balls_doubles_diameters() {
        let ifs = cantor_preset(1.0 / 3.0).unwrap();
        let boxes = natural_cover(&ifs, 1).unwrap();
        let balls = cover_to_balls(&boxes).unwrap();
        assert_eq!(balls.len(), 2);
        for element in balls.elements() {
            assert_relative_eq!(element.diameter(), 2.0 / 3.0, max_relative = 1e-12);
        }
        assert_relative_eq!(balls.delta(), 2.0 * boxes.delta(), max_relative = 1e-15);

        assert!(matches!(
            cover_to_balls(&balls),
            Err(Error::ElementAlreadyBall { index: 0 })
        ));
    }

    #[test]
    fn point_boxes_become_zero_radius_balls() {
        let cover = Cover::from_boxes(vec![
            AxisBox::interval(0.0, 0.5).unwrap(),
            AxisBox::interval(0.7, 0.7).unwrap(),
            AxisBox::interval(0.9, 0.9).unwrap(),
        ])
        .unwrap();
        let balls = cover_to_balls(&cover).unwrap();
        for s in [0.5, 1.0, 2.0] {
            let plain = cover_sum(&cover, s).unwrap().value;
            let balled = cover_sum(&balls, s).unwrap().value;
            assert_relative_eq!(balled, 2.0_f64.powf(s) * plain, max_relative = 1e-12);
        }
    }

    #[test]
    fn box_count_examples() {
        let points = vec![Point::x(0.1), Point::x(0.9)];
        assert_eq!(box_count(&points, 0.5).unwrap(), 2);
        let close = vec![Point::x(0.1), Point::x(0.2)];
        assert_eq!(box_count(&close, 0.5).unwrap(), 1);
        assert!(matches!(box_count(&[], 0.5), Err(Error::EmptyPoints)));
    }

    #[test]
    fn box_count_of_cantor_midpoints_matches_cell_enumeration() {
        for n in 1..=8usize {
            let midpoints: Vec<Point> = cantor_stage_intervals(n)
                .iter()
                .map(|(lo, hi)| Point::x(0.5 * (lo + hi)))
                .collect();
            let count = box_count(&midpoints, 3.0_f64.powi(-(n as i32))).unwrap();
            assert_eq!(count, 1 << n, "depth {n}");
        }
    }

    #[test]
    fn box_counts_never_drop_at_finer_nested_scales() {
        let points = cantor_preset(1.0 / 3.0).unwrap().chaos_game(5000, 3).unwrap();
        let deltas: Vec<f64> = (1..=6).map(|n| 3.0_f64.powi(-n)).collect();
        let series = BoxCountSeries::from_points(&points, &deltas).unwrap();
        for pair in series.entries().windows(2) {
            assert!(pair[1].1 >= pair[0].1);
        }
    }

    #[test]
    fn regression_on_exact_cell_midpoints_recovers_the_dimension() {
        // Midpoints of the depth-8 cells occupy exactly 2^n grid cells at
        // delta = 3^-n, so the slope is log 2/log 3 up to rounding.
        let midpoints: Vec<Point> = cantor_stage_intervals(8)
            .iter()
            .map(|(lo, hi)| Point::x(0.5 * (lo + hi)))
            .collect();
        let deltas: Vec<f64> = (1..=6).map(|n| 3.0_f64.powi(-n)).collect();
        let est = boxcount_dimension(&midpoints, &deltas).unwrap();
        assert_eq!(est.method, Method::BoxcountRegression);
        assert_relative_eq!(est.value, 2.0_f64.ln() / 3.0_f64.ln(), max_relative = 1e-12);
        assert!(est.uncertainty <= 1e-12);
    }

    #[test]
    fn regression_rejects_flat_counts() {
        let points = vec![Point::x(0.5)];
        let deltas = [0.5, 0.25, 0.125];
        assert!(matches!(
            boxcount_dimension(&points, &deltas),
            Err(Error::DegenerateRegression)
        ));
    }

    #[test]
    fn regression_needs_three_scales() {
        let points = vec![Point::x(0.1), Point::x(0.9)];
        assert!(matches!(
            boxcount_dimension(&points, &[0.5, 0.25]),
            Err(Error::InvalidScales(_))
        ));
    }

    #[test]
    fn series_csv_round_trips() {
        let points = vec![Point::x(0.1), Point::x(0.6), Point::x(0.9)];
        let series = BoxCountSeries::from_points(&points, &[0.5, 0.25]).unwrap();
        let csv = series.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("delta,count"));
        for (line, (delta, count)) in lines.zip(series.entries()) {
            let (d, c) = line.split_once(',').unwrap();
            assert_eq!(d.parse::<f64>().unwrap(), *delta);
            assert_eq!(c.parse::<usize>().unwrap(), *count);
        }
    }

    fn arb_cover() -> impl Strategy<Value = Cover> {
        proptest::collection::vec((-5.0..5.0f64, 1e-3..2.0f64, -5.0..5.0f64, 1e-3..2.0f64), 1..20)
            .prop_map(|boxes| {
                Cover::from_boxes(
                    boxes
                        .into_iter()
                        .map(|(x, lx, y, ly)| AxisBox::rect((x, x + lx), (y, y + ly)).unwrap())
                        .collect(),
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn sandwich_identity_for_random_covers(cover in arb_cover()) {
            let balls = cover_to_balls(&cover).unwrap();
            for s in [0.0, 0.5, 1.0, 2.0] {
                let plain = cover_sum(&cover, s).unwrap().value;
                let balled = cover_sum(&balls, s).unwrap().value;
                let scale = 2.0_f64.powf(s) * plain;
                prop_assert!((balled - scale).abs() <= 1e-12 * scale.abs().max(1.0));
            }
        }
    }
}
