//! Similitudes and iterated function systems.
//!
//! An attractor is represented two ways: deterministically, as the cells
//! obtained by expanding every word of map indices up to a depth
//! ([`Ifs::refine`]), and statistically, as a seeded chaos-game point cloud
//! ([`Ifs::chaos_game`]). Cells give rigorous covers; point clouds feed box
//! counting.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::geometry::{check_dim, AxisBox, Coords, Point};
use crate::{Error, Result};

/// Cap on the total number of cells a refinement may produce (≈ 10⁶; chosen
/// as 2²⁰ so a 2-map system can be expanded to depth 20).
pub const MAX_CELLS: u64 = 1 << 20;

/// Iterations discarded before chaos-game samples are collected.
pub const CHAOS_BURN_IN: usize = 100;

const AXIS_ALIGN_TOL: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-12;
const SEED_INVARIANCE_TOL: f64 = 1e-9;

/// A contraction x ↦ r·Q(x) + t with ratio r ∈ (0, 1) and Q orthogonal.
///
/// In 2-D, Q is a rotation by `rotation` radians, optionally preceded by a
/// reflection about the x-axis. In 1-D the reflection flag is the sign ±1
/// and the rotation must be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Similitude {
    ratio: f64,
    rotation: f64,
    reflect: bool,
    translation: Point,
}

impl Similitude {
    pub fn new(ratio: f64, rotation: f64, reflect: bool, translation: Point) -> Result<Self> {
        if !ratio.is_finite() || ratio <= 0.0 || ratio >= 1.0 {
            return Err(Error::RatioOutOfRange(ratio));
        }
        if !rotation.is_finite() {
            return Err(Error::NotFinite("rotation angle"));
        }
        if translation.dim() == 1 && rotation != 0.0 {
            return Err(Error::NotFinite("1-D similitudes take no rotation"));
        }
        Ok(Self {
            ratio,
            rotation,
            reflect,
            translation,
        })
    }

    /// Axis-aligned 1-D or 2-D map r·x + t with no rotation or reflection.
    pub fn scaling(ratio: f64, translation: Point) -> Result<Self> {
        Self::new(ratio, 0.0, false, translation)
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn reflect(&self) -> bool {
        self.reflect
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    /// Quarter-turn index (0..4) when the rotation is a multiple of π/2,
    /// within 1e-12. Such maps send axis boxes to axis boxes exactly.
    fn quarter_turns(&self) -> Option<u8> {
        if self.dim() == 1 {
            return Some(0);
        }
        let k = (self.rotation / FRAC_PI_2).round();
        if (self.rotation - k * FRAC_PI_2).abs() <= AXIS_ALIGN_TOL {
            Some((k as i64).rem_euclid(4) as u8)
        } else {
            None
        }
    }

    /// True when the map takes axis-aligned boxes to axis-aligned boxes.
    pub fn is_axis_aligned(&self) -> bool {
        self.quarter_turns().is_some()
    }

    /// Apply the map to a point: r·Q(p) + t.
    ///
    /// Quarter-turn rotations are applied with exact {0, ±1} entries so the
    /// presets stay free of trigonometric rounding.
    pub fn apply(&self, p: &Point) -> Result<Point> {
        check_dim(self.dim(), p.dim())?;
        let t = self.translation.coords();
        let coords: Coords = match p.coords() {
            [x] => {
                let sx = if self.reflect { -x } else { *x };
                SmallVec::from_slice(&[self.ratio * sx + t[0]])
            }
            [x, y] => {
                let (x, y) = (*x, if self.reflect { -y } else { *y });
                let (rx, ry) = match self.quarter_turns() {
                    Some(0) => (x, y),
                    Some(1) => (-y, x),
                    Some(2) => (-x, -y),
                    Some(3) => (y, -x),
                    _ => {
                        let (sin, cos) = self.rotation.sin_cos();
                        (cos * x - sin * y, sin * x + cos * y)
                    }
                };
                SmallVec::from_slice(&[self.ratio * rx + t[0], self.ratio * ry + t[1]])
            }
            _ => unreachable!("dimension validated at construction"),
        };
        Point::new(coords)
    }

    /// Axis-aligned bounding box of the image of `b`.
    ///
    /// For axis-aligned maps this is the exact image; for other rotations it
    /// strictly contains it (still valid as a cover element, but not tight).
    pub fn map_box(&self, b: &AxisBox) -> Result<AxisBox> {
        check_dim(self.dim(), b.dim())?;
        let corners: Vec<Point> = match b.dim() {
            1 => vec![Point::x(b.lo()[0]), Point::x(b.hi()[0])],
            2 => vec![
                Point::xy(b.lo()[0], b.lo()[1]),
                Point::xy(b.hi()[0], b.lo()[1]),
                Point::xy(b.lo()[0], b.hi()[1]),
                Point::xy(b.hi()[0], b.hi()[1]),
            ],
            _ => unreachable!(),
        };
        let mut lo = Coords::from_slice(&[f64::INFINITY; 2][..b.dim()]);
        let mut hi = Coords::from_slice(&[f64::NEG_INFINITY; 2][..b.dim()]);
        for corner in &corners {
            let image = self.apply(corner)?;
            for (axis, &c) in image.coords().iter().enumerate() {
                lo[axis] = lo[axis].min(c);
                hi[axis] = hi[axis].max(c);
            }
        }
        AxisBox::new(lo, hi)
    }
}

/// Word of map indices generating a cell.
pub type Word = SmallVec<[u16; 12]>;

/// One cell of a refinement: the (bounding) box of the image of the seed box
/// under the word's map composition, tagged with the product of ratios.
#[derive(Debug, Clone)]
pub struct Cell {
    pub bounds: AxisBox,
    pub word: Word,
    pub ratio: f64,
}

/// All cells of one refinement depth.
#[derive(Debug, Clone)]
pub struct CellSet {
    depth: usize,
    cells: Vec<Cell>,
    tight: bool,
}

impl CellSet {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// False when some map is rotated off-axis, in which case cells are
    /// bounding boxes rather than exact images.
    pub fn is_tight(&self) -> bool {
        self.tight
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// A finite list of similitudes with branch weights and a box known to
/// contain the attractor.
#[derive(Debug, Clone, PartialEq)]
pub struct Ifs {
    maps: Vec<Similitude>,
    weights: Vec<f64>,
    seed_box: AxisBox,
}

impl Ifs {
    /// Validates that the maps agree on dimension, the weights form a
    /// probability vector, and every map sends the seed box into itself.
    pub fn new(
        maps: Vec<Similitude>,
        weights: Option<Vec<f64>>,
        seed_box: AxisBox,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::EmptyMapList);
        }
        for map in &maps {
            check_dim(seed_box.dim(), map.dim())?;
        }
        let weights = match weights {
            Some(w) => {
                if w.len() != maps.len() {
                    return Err(Error::InvalidWeights(format!(
                        "{} weights for {} maps",
                        w.len(),
                        maps.len()
                    )));
                }
                if w.iter().any(|p| !p.is_finite() || *p <= 0.0) {
                    return Err(Error::InvalidWeights("weights must be positive".into()));
                }
                let sum: f64 = w.iter().sum();
                if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
                }
                w
            }
            None => vec![1.0 / maps.len() as f64; maps.len()],
        };
        let slack = SEED_INVARIANCE_TOL * (1.0 + seed_box.diameter());
        for (map_index, map) in maps.iter().enumerate() {
            let image = map.map_box(&seed_box)?;
            let inside = seed_box
                .lo()
                .iter()
                .zip(seed_box.hi().iter())
                .zip(image.lo().iter().zip(image.hi().iter()))
                .all(|((sl, sh), (il, ih))| *il >= sl - slack && *ih <= sh + slack);
            if !inside {
                return Err(Error::SeedNotInvariant { map_index });
            }
        }
        Ok(Self {
            maps,
            weights,
            seed_box,
        })
    }

    pub fn maps(&self) -> &[Similitude] {
        &self.maps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn seed_box(&self) -> &AxisBox {
        &self.seed_box
    }

    /// Number of maps N.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.seed_box.dim()
    }

    /// Contraction ratios r₁, …, r_N in map order.
    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(Similitude::ratio).collect()
    }

    pub fn is_axis_aligned(&self) -> bool {
        self.maps.iter().all(Similitude::is_axis_aligned)
    }

    /// Expand all N^depth words into cells.
    ///
    /// Depth 0 yields the seed box under the empty word. Fails when the cell
    /// count would exceed [`MAX_CELLS`].
    pub fn refine(&self, depth: usize) -> Result<CellSet> {
        let n = self.maps.len() as u128;
        let requested = n
            .checked_pow(depth.min(u32::MAX as usize) as u32)
            .unwrap_or(u128::MAX);
        if requested > MAX_CELLS as u128 {
            return Err(Error::CellCountExceeded {
                requested,
                cap: MAX_CELLS,
            });
        }
        let mut cells = vec![Cell {
            bounds: self.seed_box.clone(),
            word: Word::new(),
            ratio: 1.0,
        }];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(cells.len() * self.maps.len());
            for cell in &cells {
                for (index, map) in self.maps.iter().enumerate() {
                    let mut word = cell.word.clone();
                    word.push(index as u16);
                    next.push(Cell {
                        bounds: map.map_box(&cell.bounds)?,
                        word,
                        ratio: cell.ratio * map.ratio(),
                    });
                }
            }
            cells = next;
        }
        Ok(CellSet {
            depth,
            cells,
            tight: self.is_axis_aligned(),
        })
    }

    /// Seeded chaos game: iterate x ← f_I(x) with I drawn by the branch
    /// weights, starting from the seed-box center and discarding
    /// [`CHAOS_BURN_IN`] iterations. Identical seeds give identical clouds.
    pub fn chaos_game(&self, count: usize, rng_seed: u64) -> Result<Vec<Point>> {
        if count == 0 {
            return Err(Error::InvalidSampling("chaos game needs count >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut x = self.seed_box.center();
        let mut points = Vec::with_capacity(count);
        for step in 0..CHAOS_BURN_IN + count {
            let map = &self.maps[self.draw_index(&mut rng)];
            x = map.apply(&x)?;
            if step >= CHAOS_BURN_IN {
                points.push(x.clone());
            }
        }
        Ok(points)
    }

    fn draw_index(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.weights.len() - 1
    }

    /// Serialize to the plain-text description format understood by
    /// [`Ifs::from_description`].
    pub fn to_description(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dim={}", self.dim());
        let seed: Vec<String> = self
            .seed_box
            .lo()
            .iter()
            .zip(self.seed_box.hi().iter())
            .flat_map(|(l, h)| [format!("{l:?}"), format!("{h:?}")])
            .collect();
        let _ = writeln!(out, "seed={}", seed.join(","));
        for (map, weight) in self.maps.iter().zip(&self.weights) {
            let t = map.translation().coords();
            let _ = write!(
                out,
                "map ratio={:?} rot={:?} reflect={} tx={:?}",
                map.ratio(),
                map.rotation(),
                u8::from(map.reflect()),
                t[0],
            );
            if t.len() == 2 {
                let _ = write!(out, " ty={:?}", t[1]);
            }
            let _ = writeln!(out, " weight={weight:?}");
        }
        out
    }

    /// Parse the plain-text description format.
    ///
    /// Lines: `dim=<1|2>`, `seed=<lo,hi[,lo,hi]>`, then one
    /// `map ratio=<r> rot=<radians> reflect=<0|1> tx=<..> [ty=<..>] [weight=<p>]`
    /// per similitude. `#` starts a comment. Errors carry 1-based line
    /// numbers.
    pub fn from_description(text: &str) -> Result<Ifs> {
        let mut dim: Option<usize> = None;
        let mut seed: Option<AxisBox> = None;
        let mut maps: Vec<Similitude> = Vec::new();
        let mut weights: Vec<Option<f64>> = Vec::new();

        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(value) = content.strip_prefix("dim=") {
                let d: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad dim value {value:?}")))?;
                if d != 1 && d != 2 {
                    return Err(parse_err(line, format!("dim must be 1 or 2, got {d}")));
                }
                dim = Some(d);
            } else if let Some(value) = content.strip_prefix("seed=") {
                let d = dim.ok_or_else(|| parse_err(line, "seed= before dim=".to_string()))?;
                let nums = parse_floats(line, value)?;
                if nums.len() != 2 * d {
                    return Err(parse_err(
                        line,
                        format!("seed needs {} numbers for dim={d}, got {}", 2 * d, nums.len()),
                    ));
                }
                let lo: Coords = nums.iter().step_by(2).copied().collect();
                let hi: Coords = nums.iter().skip(1).step_by(2).copied().collect();
                seed = Some(
                    AxisBox::new(lo, hi).map_err(|e| parse_err(line, format!("bad seed: {e}")))?,
                );
            } else if let Some(rest) = content.strip_prefix("map") {
                let d = dim.ok_or_else(|| parse_err(line, "map before dim=".to_string()))?;
                let (map, weight) = parse_map_line(line, d, rest)?;
                maps.push(map);
                weights.push(weight);
            } else {
                return Err(parse_err(line, format!("unrecognized line {content:?}")));
            }
        }

        let seed = seed.ok_or_else(|| parse_err(text.lines().count(), "missing seed= line".into()))?;
        if maps.is_empty() {
            return Err(parse_err(text.lines().count(), "no map lines".into()));
        }
        let weights = if weights.iter().all(Option::is_none) {
            None
        } else if weights.iter().all(Option::is_some) {
            Some(weights.into_iter().flatten().collect())
        } else {
            return Err(parse_err(
                text.lines().count(),
                "either every map line carries weight= or none does".into(),
            ));
        };
        Ifs::new(maps, weights, seed)
    }
}

fn parse_err(line: usize, message: String) -> Error {
    Error::Parse { line, message }
}

fn parse_floats(line: usize, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad number {tok:?}")))
        })
        .collect()
}

fn parse_map_line(line: usize, dim: usize, rest: &str) -> Result<(Similitude, Option<f64>)> {
    let mut ratio = None;
    let mut rot = 0.0;
    let mut reflect = false;
    let mut tx = None;
    let mut ty = None;
    let mut weight = None;
    for token in rest.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, got {token:?}")))?;
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad number {value:?} for {key}")))
        };
        match key {
            "ratio" => ratio = Some(num()?),
            "rot" => rot = num()?,
            "reflect" => {
                reflect = match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(parse_err(line, format!("reflect must be 0 or 1, got {value:?}"))),
                }
            }
            "tx" => tx = Some(num()?),
            "ty" => ty = Some(num()?),
            "weight" => weight = Some(num()?),
            _ => return Err(parse_err(line, format!("unknown key {key:?}"))),
        }
    }
    let ratio = ratio.ok_or_else(|| parse_err(line, "map line missing ratio=".into()))?;
    let tx = tx.ok_or_else(|| parse_err(line, "map line missing tx=".into()))?;
    let translation = match (dim, ty) {
        (1, None) => Point::x(tx),
        (1, Some(_)) => return Err(parse_err(line, "ty= given for dim=1".into())),
        (2, Some(ty)) => Point::xy(tx, ty),
        (2, None) => return Err(parse_err(line, "map line missing ty= for dim=2".into())),
        _ => unreachable!(),
    };
    let map = Similitude::new(ratio, rot, reflect, translation)
        .map_err(|e| parse_err(line, format!("bad map: {e}")))?;
    Ok((map, weight))
}

/// The two-map middle-Cantor family: remove the open middle `alpha` fraction
/// of [0, 1] at every stage. `alpha = 1/3` is the middle-thirds set.
pub fn cantor_preset(alpha: f64) -> Result<Ifs> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let ratio = (1.0 - alpha) / 2.0;
    let maps = vec![
        Similitude::scaling(ratio, Point::x(0.0))?,
        Similitude::scaling(ratio, Point::x((1.0 + alpha) / 2.0))?,
    ];
    Ifs::new(maps, None, AxisBox::interval(0.0, 1.0)?)
}

/// The four half-side quadrant maps of the unit square.
pub fn square_preset() -> Ifs {
    let maps = vec![
        Similitude::scaling(0.5, Point::xy(0.0, 0.0)).expect("valid ratio"),
        Similitude::scaling(0.5, Point::xy(0.5, 0.0)).expect("valid ratio"),
        Similitude::scaling(0.5, Point::xy(0.0, 0.5)).expect("valid ratio"),
        Similitude::scaling(0.5, Point::xy(0.5, 0.5)).expect("valid ratio"),
    ];
    let seed = AxisBox::rect((0.0, 1.0), (0.0, 1.0)).expect("valid box");
    Ifs::new(maps, None, seed).expect("square preset is a valid IFS")
}
