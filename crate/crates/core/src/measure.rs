//! Lower-bound machinery: self-similar mass distributions with rigorous
//! two-sided interval-mass bounds, the planar Lebesgue mass of the unit
//! square, empirical mass-distribution-principle certificates, and the
//! normalization constant α(s) = π^(s/2)/Γ(s/2 + 1).
//!
//! The principle needs an upper bound on μ(U), so the `upper` side of a
//! [`MassBound`] is the load-bearing one; `lower` certifies how tight the
//! recursion got.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::covering::{cover_sum, Cover, CoverSum};
use crate::dimension::{check_osc, DimensionEstimate, Method};
use crate::fmt::sig17;
use crate::geometry::{check_dim, AxisBox, Coords};
use crate::ifs::{Ifs, Word};
use crate::{Error, Result};

mod gamma;

pub use gamma::gamma;

/// The measure splitting mass among IFS branches by the branch weights at
/// every level; the Cantor measure uses weights 1/2, 1/2.
///
/// Construction requires interior-disjoint images of the seed box, since
/// overlapping branches would double-count mass.
#[derive(Debug, Clone)]
pub struct SelfSimilarMeasure {
    ifs: Ifs,
}

impl SelfSimilarMeasure {
    pub fn new(ifs: Ifs) -> Result<Self> {
        let report = check_osc(&ifs, ifs.seed_box())?;
        if let Some(violation) = report.violation() {
            return Err(Error::NotInteriorDisjoint(violation.to_string()));
        }
        Ok(Self { ifs })
    }

    pub fn ifs(&self) -> &Ifs {
        &self.ifs
    }

    /// Rigorous enclosure of μ(u) by recursive descent over cells.
    ///
    /// Cells disjoint from `u` contribute nothing; cells contained in `u`
    /// contribute their full cylinder weight to both sides; cells still
    /// straddling the boundary at `max_depth` contribute to `upper` only.
    /// Deepening `max_depth` never widens the bracket.
    ///
    /// Cell boxes are reproduced with the identical arithmetic `Ifs::refine`
    /// uses, so querying a refine cell recognizes it bit-for-bit.
    pub fn mu_box(&self, u: &AxisBox, max_depth: usize) -> Result<MassBound> {
        if max_depth == 0 {
            return Err(Error::InvalidSampling("mu_box needs max_depth >= 1".into()));
        }
        check_dim(self.ifs.dim(), u.dim())?;

        let seed = self.ifs.seed_box();
        if seed.intersect(u)?.is_none() {
            return Ok(MassBound { lower: 0.0, upper: 0.0 });
        }
        if u.contains_box(seed)? {
            return Ok(MassBound { lower: 1.0, upper: 1.0 });
        }

        let mut lower = 0.0;
        let mut upper = 0.0;
        // Straddling cells, identified by refine words. The sub-cells of the
        // cell f_wd ∘ … ∘ f_w1 (seed) are the words (j, w1, …, wd), so
        // descending prepends a letter and replays the composition.
        let mut straddling: Vec<(Word, f64)> = vec![(Word::new(), 1.0)];
        for level in 1..=max_depth {
            let mut next = Vec::new();
            for (word, weight) in &straddling {
                for (j, p) in self.ifs.weights().iter().enumerate() {
                    let mut child = Word::with_capacity(word.len() + 1);
                    child.push(j as u16);
                    child.extend_from_slice(word);
                    let bounds = self.replay_cell(&child)?;
                    let w = weight * p;
                    if bounds.intersect(u)?.is_none() {
                        continue;
                    }
                    if u.contains_box(&bounds)? {
                        lower += w;
                        upper += w;
                    } else if level == max_depth {
                        upper += w;
                    } else {
                        next.push((child, w));
                    }
                }
            }
            straddling = next;
            if straddling.is_empty() {
                break;
            }
        }
        Ok(MassBound {
            lower: lower.min(1.0),
            upper: upper.min(1.0),
        })
    }

    /// The cell box of a refine word: maps applied first-letter innermost,
    /// matching `Ifs::refine` operation for operation.
    fn replay_cell(&self, word: &[u16]) -> Result<AxisBox> {
        let mut bounds = self.ifs.seed_box().clone();
        for &index in word {
            bounds = self.ifs.maps()[index as usize].map_box(&bounds)?;
        }
        Ok(bounds)
    }
}

/// Two-sided enclosure of a mass value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassBound {
    pub lower: f64,
    pub upper: f64,
}

/// Empirical record of a mass-distribution-principle scan: the largest
/// observed ratio μ(U)/|U|ˢ over the sampled boxes.
///
/// The principle quantifies over all small sets, so `c` is a lower bound on
/// the true supremum; the analytic constants (4 for the Cantor measure at
/// s = log 2/log 3, π/4 for the square at s = 2) are the targets it is
/// checked against.
#[derive(Debug, Clone, Copy)]
pub struct MddCertificate {
    pub s: f64,
    /// Largest sampled μ(U)/|U|ˢ.
    pub c: f64,
    pub samples: usize,
    /// (min, max) sampled diameters.
    pub delta_range: (f64, f64),
    pub rng_seed: u64,
    /// μ(A)/c with μ(A) = 1, the implied bound H^s(A) ≥ 1/c.
    pub implied_measure_lower_bound: f64,
}

impl MddCertificate {
    pub fn csv_header() -> &'static str {
        "s,c,samples,delta_min,delta_max,rng_seed,hs_lower_bound"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            sig17(self.s),
            sig17(self.c),
            self.samples,
            sig17(self.delta_range.0),
            sig17(self.delta_range.1),
            self.rng_seed,
            sig17(self.implied_measure_lower_bound),
        )
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}\n", Self::csv_header(), self.to_csv_row())
    }
}

/// Exact area of u ∩ [0,1]².
pub fn lebesgue_square_mass(u: &AxisBox) -> Result<f64> {
    check_dim(2, u.dim())?;
    let mut area = 1.0;
    for axis in 0..2 {
        let lo = u.lo()[axis].max(0.0);
        let hi = u.hi()[axis].min(1.0);
        if hi <= lo {
            return Ok(0.0);
        }
        area *= hi - lo;
    }
    Ok(area)
}

/// Scan the scaling condition μ(U) ≤ c·|U|ˢ over seeded random boxes.
///
/// Samples are square boxes with center uniform over `support` and diameter
/// log-uniform in `delta_range`; `mass_upper` supplies an upper bound on
/// μ(U) for each. Identical seeds give identical certificates.
pub fn mdd_check(
    mass_upper: impl Fn(&AxisBox) -> Result<f64>,
    support: &AxisBox,
    s: f64,
    delta_range: (f64, f64),
    samples: usize,
    rng_seed: u64,
) -> Result<MddCertificate> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::NegativeExponent(s));
    }
    let (delta_min, delta_max) = delta_range;
    let range_ok = delta_min > 0.0 && delta_min <= delta_max && delta_max.is_finite();
    if !range_ok {
        return Err(Error::InvalidSampling(format!(
            "need 0 < delta_min <= delta_max, got ({delta_min}, {delta_max})"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidSampling("need samples >= 1".into()));
    }

    let dim = support.dim();
    let side_per_diameter = 1.0 / (dim as f64).sqrt();
    let (ln_min, ln_max) = (delta_min.ln(), delta_max.ln());
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut c: f64 = 0.0;

    for _ in 0..samples {
        let diameter = (ln_min + rng.random::<f64>() * (ln_max - ln_min)).exp();
        let half_side = 0.5 * diameter * side_per_diameter;
        let mut lo = Coords::new();
        let mut hi = Coords::new();
        for axis in 0..dim {
            let center =
                support.lo()[axis] + rng.random::<f64>() * (support.hi()[axis] - support.lo()[axis]);
            lo.push(center - half_side);
            hi.push(center + half_side);
        }
        let sample_box = AxisBox::new(lo, hi)?;
        let ratio = mass_upper(&sample_box)? / sample_box.diameter().powf(s);
        c = c.max(ratio);
    }

    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidSampling(
            "no sampled box carried mass; certificate would be vacuous".into(),
        ));
    }
    Ok(MddCertificate {
        s,
        c,
        samples,
        delta_range,
        rng_seed,
        implied_measure_lower_bound: 1.0 / c,
    })
}

/// Read a certificate as the dimension bound it implies: dim ≥ s with
/// H^s(A) ≥ 1/c.
pub fn lower_bound_dimension(cert: &MddCertificate) -> DimensionEstimate {
    let mut metadata = String::from("mass distribution principle over ");
    let _ = write!(
        metadata,
        "{} samples, c = {}, implied H^s lower bound {}",
        cert.samples, cert.c, cert.implied_measure_lower_bound,
    );
    DimensionEstimate {
        value: cert.s,
        method: Method::BoundCertificate,
        uncertainty: 0.0,
        metadata,
    }
}

/// α(s) = π^(s/2) / Γ(s/2 + 1), the constant normalizing Hausdorff measure
/// to agree with Lebesgue measure at integer dimensions.
pub fn alpha_constant(s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::NegativeExponent(s));
    }
    Ok(std::f64::consts::PI.powf(s / 2.0) / gamma(s / 2.0 + 1.0))
}

/// Σ α(s)·(diamᵢ/2)ˢ, the normalized flavor of [`cover_sum`]; relates to it
/// by the exact factor α(s)/2ˢ.
pub fn normalized_cover_sum(c: &Cover, s: f64) -> Result<CoverSum> {
    let alpha = alpha_constant(s)?;
    let plain = cover_sum(c, s)?;
    Ok(CoverSum {
        s,
        value: alpha * plain.value / 2.0_f64.powf(s),
        depth_or_delta: plain.depth_or_delta,
    })
}
