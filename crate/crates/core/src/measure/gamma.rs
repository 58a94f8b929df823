//! Gamma function via the Lanczos approximation analyzed in Pugh (2004),
//! accurate to ~16 significant digits over the range α(s) needs
//! (arguments s/2 + 1 with s ∈ [0, 20]).

use std::f64::consts::{E, PI};

/// 2·sqrt(e/π).
const TWO_SQRT_E_OVER_PI: f64 = 1.8603827342052657;

/// Lanczos partial-fraction coefficients for r = 10.900511.
const LANCZOS_DK: &[f64] = &[
    2.4857408913875355e-5,
    1.0514237858172197,
    -3.4568709722201625,
    4.512277094668948,
    -2.9828522532357664,
    1.056397115771267,
    -1.9542877319164587e-1,
    1.709705434044412e-2,
    -5.719261174043057e-4,
    4.633994733599057e-6,
    -2.7199490848860772e-9,
];

const LANCZOS_R: f64 = 10.900511;

/// Γ(x) for finite x; poles at nonpositive integers return non-finite values
/// through the reflection sine.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |acc, (i, d)| acc + d / (i as f64 - x));
        PI / ((PI * x).sin() * s * TWO_SQRT_E_OVER_PI * ((0.5 - x + LANCZOS_R) / E).powf(0.5 - x))
    } else {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |acc, (i, d)| acc + d / (x + i as f64 - 1.0));
        s * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_R) / E).powf(x - 0.5)
    }
}
