//! Exact ratios and half-up decimal rendering.

use alloc::string::String;
use core::fmt::Write;

pub use num_rational::Ratio;

pub type Rational = Ratio<u64>;

/// `numer / denom`, or zero when `denom` is zero.
pub fn ratio_or_zero(numer: u64, denom: u64) -> Rational {
    if denom == 0 {
        Rational::from_integer(0)
    } else {
        Rational::new(numer, denom)
    }
}

/// Renders a non-negative ratio with `decimals` places, rounding half up.
///
/// ```
/// use corefmark_core::rational::{render_half_up, Rational};
/// assert_eq!(render_half_up(Rational::new(117 * 100, 1216), 1), "9.6");
/// assert_eq!(render_half_up(Rational::new(1, 4), 1), "0.3");
/// ```
pub fn render_half_up(value: Rational, decimals: u32) -> String {
    let scale = 10u128.pow(decimals);
    let numer = u128::from(*value.numer());
    let denom = u128::from(*value.denom());
    let scaled = (2 * numer * scale + denom) / (2 * denom);
    let (int, frac) = (scaled / scale, scaled % scale);
    let mut out = String::new();
    let _ = write!(out, "{int}");
    if decimals > 0 {
        let _ = write!(out, ".{frac:0width$}", width = decimals as usize);
    }
    out
}

/// Renders `value` as a percentage with `decimals` places and a `%` sign.
pub fn render_percent(value: Rational, decimals: u32) -> String {
    let mut s = render_half_up(value * Rational::from_integer(100), decimals);
    s.push('%');
    s
}

pub fn to_f64(value: Rational) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}
