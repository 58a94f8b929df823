//! Euclidean primitives in ambient dimension n ∈ {1, 2}: points, axis-aligned
//! boxes, balls, and diameters.
//!
//! Boxes are closed. Open-set semantics (needed by the open set condition)
//! are expressed through interior-disjointness tests rather than a separate
//! open-box type.

use smallvec::SmallVec;

use crate::{Error, Result};

/// Inline coordinate storage; no heap allocation for n ≤ 2.
pub type Coords = SmallVec<[f64; 2]>;

/// A point of ℝⁿ, n fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Coords,
}

impl Point {
    pub fn new(coords: impl Into<Coords>) -> Result<Self> {
        let coords = coords.into();
        if coords.is_empty() || coords.len() > 2 {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NotFinite("point coordinate"));
        }
        Ok(Self { coords })
    }

    /// 1-D point.
    pub fn x(x: f64) -> Self {
        Self::new([x].as_slice()).expect("finite coordinate")
    }

    /// 2-D point.
    pub fn xy(x: f64, y: f64) -> Self {
        Self::new([x, y].as_slice()).expect("finite coordinates")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean distance to another point of the same dimension.
    pub fn distance(&self, other: &Point) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

/// A closed axis-aligned box: the product of per-axis intervals [loᵢ, hiᵢ].
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    lo: Coords,
    hi: Coords,
}

impl AxisBox {
    pub fn new(lo: impl Into<Coords>, hi: impl Into<Coords>) -> Result<Self> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() || lo.len() > 2 {
            return Err(Error::UnsupportedDimension(lo.len()));
        }
        for (axis, (&l, &h)) in lo.iter().zip(hi.iter()).enumerate() {
            if !l.is_finite() || !h.is_finite() {
                return Err(Error::NotFinite("box endpoint"));
            }
            if l > h {
                return Err(Error::InvalidBox { axis, lo: l, hi: h });
            }
        }
        Ok(Self { lo, hi })
    }

    /// 1-D closed interval [lo, hi].
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new([lo].as_slice(), [hi].as_slice())
    }

    /// 2-D rectangle [x0, x1] × [y0, y1].
    pub fn rect(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        Self::new([x.0, y.0].as_slice(), [x.1, y.1].as_slice())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Euclidean length of the box diagonal: sqrt(Σ (hiᵢ − loᵢ)²).
    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(self.hi.iter())
            .map(|(l, h)| (h - l) * (h - l))
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Point {
        let coords: Coords = self
            .lo
            .iter()
            .zip(self.hi.iter())
            .map(|(l, h)| 0.5 * (l + h))
            .collect();
        Point { coords }
    }

    /// True when some axis interval is a single point.
    pub fn is_degenerate(&self) -> bool {
        self.lo.iter().zip(self.hi.iter()).any(|(l, h)| l == h)
    }

    /// Ball centered at the box center with radius equal to the full box
    /// diameter, so diameter(ball) = 2 · diameter(box).
    pub fn enclosing_ball(&self) -> Ball {
        Ball {
            center: self.center(),
            radius: self.diameter(),
        }
    }

    /// Intersection box, or `None` when boundaries and interiors share no
    /// point. Boxes touching only along a face yield a degenerate box.
    pub fn intersect(&self, other: &AxisBox) -> Result<Option<AxisBox>> {
        check_dim(self.dim(), other.dim())?;
        let mut lo = Coords::new();
        let mut hi = Coords::new();
        for axis in 0..self.dim() {
            let l = self.lo[axis].max(other.lo[axis]);
            let h = self.hi[axis].min(other.hi[axis]);
            if l > h {
                return Ok(None);
            }
            lo.push(l);
            hi.push(h);
        }
        Ok(Some(AxisBox { lo, hi }))
    }

    /// Closed containment: every point of `other` lies in `self`.
    pub fn contains_box(&self, other: &AxisBox) -> Result<bool> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .lo
            .iter()
            .zip(self.hi.iter())
            .zip(other.lo.iter().zip(other.hi.iter()))
            .all(|((sl, sh), (ol, oh))| sl <= ol && oh <= sh))
    }

    pub fn contains_point(&self, p: &Point) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(self
            .lo
            .iter()
            .zip(self.hi.iter())
            .zip(p.coords())
            .all(|((l, h), c)| *l <= *c && *c <= *h))
    }

    /// True when the open interiors are disjoint; sharing a boundary face is
    /// allowed. Degenerate boxes have empty interior and are disjoint from
    /// everything.
    pub fn interiors_disjoint(&self, other: &AxisBox) -> Result<bool> {
        check_dim(self.dim(), other.dim())?;
        if self.is_degenerate() || other.is_degenerate() {
            return Ok(true);
        }
        Ok(self
            .lo
            .iter()
            .zip(self.hi.iter())
            .zip(other.lo.iter().zip(other.hi.iter()))
            .any(|((sl, sh), (ol, oh))| sh <= ol || oh <= sl))
    }
}

impl std::fmt::Display for AxisBox {
    /// Renders as a product of intervals, e.g. `[0, 1]×[0, 1]`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (axis, (l, h)) in self.lo.iter().zip(self.hi.iter()).enumerate() {
            if axis > 0 {
                write!(f, "x")?;
            }
            write!(f, "[{l}, {h}]")?;
        }
        Ok(())
    }
}

/// A closed ball B(center, radius).
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::NotFinite("ball radius"));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
