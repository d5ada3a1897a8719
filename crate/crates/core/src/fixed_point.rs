//! Exact evaluation of the Logistic map digitized to n-bit fixed point.
//!
//! A state `i` in `0..=2^n` stands for the real value `i / 2^n`. With a dyadic
//! control parameter `mu = N / 2^e`, the scaled image `f_n(i) * 2^n` equals
//! `N * i * (2^n - i) / 2^(e + n)`, a dyadic rational that is carried around
//! unreduced in a [`ExactRatio`] and quantized once per step. Nothing on this
//! path touches floating point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported precision. `N * i * (2^n - i)` stays below `2^(3n + 2)`,
/// which fits a `u128` for every `n` up to this cap.
pub const MAX_BITS: u32 = 40;

/// Dyadic control parameter `mu = numerator / 2^exponent`, kept with an odd
/// numerator and `0 < mu < 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ControlParameter {
    numerator: u64,
    exponent: u32,
}

impl ControlParameter {
    /// Builds `numerator / 2^exponent`, stripping common factors of two.
    pub fn new(numerator: u64, exponent: u32) -> Result<Self> {
        if numerator == 0 {
            return Err(Error::ControlParameter("numerator must be positive".into()));
        }
        let shift = numerator.trailing_zeros().min(exponent);
        let (numerator, exponent) = (numerator >> shift, exponent - shift);
        if numerator % 2 == 0 {
            return Err(Error::ControlParameter(format!(
                "mu = {numerator} has no odd-numerator dyadic form with a non-negative exponent"
            )));
        }
        if exponent > MAX_BITS {
            return Err(Error::ControlParameter(format!(
                "exponent {exponent} exceeds the precision cap {MAX_BITS}"
            )));
        }
        // mu < 4  <=>  numerator < 2^(exponent + 2)
        if u128::from(numerator) >= 1u128 << (exponent + 2) {
            return Err(Error::ControlParameter(format!(
                "mu = {numerator}/2^{exponent} is not below 4"
            )));
        }
        Ok(ControlParameter {
            numerator,
            exponent,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Nearest `f64`; for display only.
    pub fn approx(&self) -> f64 {
        self.numerator as f64 / (1u64 << self.exponent) as f64
    }
}

impl fmt::Display for ControlParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

/// Number of fractional bits `n`; nodes are `0..=2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Precision {
    bits: u32,
}

impl Precision {
    /// Validates `mu.exponent() <= bits <= MAX_BITS`.
    pub fn new(bits: u32, mu: &ControlParameter) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::Precision(format!(
                "{bits} bits is outside 1..={MAX_BITS}"
            )));
        }
        if bits < mu.exponent() {
            return Err(Error::Precision(format!(
                "{bits} bits is below the exponent of mu = {mu}"
            )));
        }
        Ok(Precision { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `2^n`, the largest node label.
    pub fn scale(&self) -> u64 {
        1u64 << self.bits
    }

    /// `2^n + 1`.
    pub fn node_count(&self) -> u64 {
        self.scale() + 1
    }

    /// Precision with one more bit, if still under the cap.
    pub fn finer(&self) -> Option<Precision> {
        (self.bits < MAX_BITS).then_some(Precision {
            bits: self.bits + 1,
        })
    }
}

/// Integer quantizer applied to the scaled image.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantizationMode {
    /// Nearest integer, ties upward (half away from zero on this domain).
    #[default]
    Round,
    Floor,
    Ceil,
}

impl QuantizationMode {
    pub const ALL: [QuantizationMode; 3] = [
        QuantizationMode::Round,
        QuantizationMode::Floor,
        QuantizationMode::Ceil,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            QuantizationMode::Round => "round",
            QuantizationMode::Floor => "floor",
            QuantizationMode::Ceil => "ceil",
        }
    }
}

impl fmt::Display for QuantizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuantizationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "round" => Ok(QuantizationMode::Round),
            "floor" => Ok(QuantizationMode::Floor),
            "ceil" => Ok(QuantizationMode::Ceil),
            other => Err(format!("unknown quantization mode {other:?}")),
        }
    }
}

/// Non-negative dyadic rational `num / 2^log2_den`, not reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExactRatio {
    pub num: u128,
    pub log2_den: u32,
}

impl ExactRatio {
    pub fn new(num: u128, log2_den: u32) -> Self {
        debug_assert!(log2_den < 126);
        ExactRatio { num, log2_den }
    }

    pub fn integer(k: u128) -> Self {
        ExactRatio::new(k, 0)
    }

    pub fn floor(&self) -> u128 {
        self.num >> self.log2_den
    }

    pub fn ceil(&self) -> u128 {
        self.floor() + u128::from(self.frac_num() != 0)
    }

    /// `floor(x + 1/2)`, i.e. `floor((2 num + 2^d) / 2^(d + 1))`.
    pub fn round(&self) -> u128 {
        let d = self.log2_den;
        // same quotient as the textbook formula without the doubled numerator
        if d == 0 {
            return self.num;
        }
        (self.num + (1u128 << (d - 1))) >> d
    }

    pub fn quantize(&self, mode: QuantizationMode) -> u128 {
        match mode {
            QuantizationMode::Round => self.round(),
            QuantizationMode::Floor => self.floor(),
            QuantizationMode::Ceil => self.ceil(),
        }
    }

    /// Numerator of the fractional part, over the same denominator.
    pub fn frac_num(&self) -> u128 {
        self.num & ((1u128 << self.log2_den) - 1)
    }

    pub fn frac(&self) -> ExactRatio {
        ExactRatio::new(self.frac_num(), self.log2_den)
    }

    /// `floor(4 * frac(x))`: 0 for `[0, 1/4)`, 1 for `[1/4, 1/2)`, 2 for
    /// `[1/2, 3/4)`, 3 for `[3/4, 1)`.
    pub fn frac_quarter(&self) -> u8 {
        ((self.frac_num() << 2) >> self.log2_den) as u8
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.log2_den)
    }
}

fn check_node(i: u64, n: Precision) -> Result<()> {
    if i > n.scale() {
        return Err(Error::NodeOutOfRange {
            node: i,
            max: n.scale(),
        });
    }
    Ok(())
}

/// `f_n(i) * 2^n` as the exact ratio `N * i * (2^n - i) / 2^(e + n)`.
pub fn exact_value(i: u64, mu: &ControlParameter, n: Precision) -> Result<ExactRatio> {
    check_node(i, n)?;
    Ok(scaled_image(i, mu, n))
}

#[inline]
fn scaled_image(i: u64, mu: &ControlParameter, n: Precision) -> ExactRatio {
    let i = u128::from(i);
    let num = u128::from(mu.numerator) * i * (u128::from(n.scale()) - i);
    ExactRatio::new(num, mu.exponent + n.bits())
}

pub fn quantize(r: ExactRatio, mode: QuantizationMode) -> u128 {
    r.quantize(mode)
}

/// One step of the digitized map, `F_n(i) = R(f_n(i) * 2^n)`.
pub fn logistic_step(
    i: u64,
    mu: &ControlParameter,
    n: Precision,
    mode: QuantizationMode,
) -> Result<u64> {
    check_node(i, n)?;
    Ok(step_unchecked(i, mu, n, mode))
}

/// Same as [`logistic_step`] without the range check. The image of an
/// in-range node is always in range because `mu < 4`.
#[inline]
pub(crate) fn step_unchecked(
    i: u64,
    mu: &ControlParameter,
    n: Precision,
    mode: QuantizationMode,
) -> u64 {
    scaled_image(i, mu, n).quantize(mode) as u64
}

/// Bundles the three parameters that fix one digitized map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LogisticMap {
    pub mu: ControlParameter,
    pub precision: Precision,
    pub mode: QuantizationMode,
}

impl LogisticMap {
    pub fn new(mu: ControlParameter, precision: Precision, mode: QuantizationMode) -> Self {
        LogisticMap {
            mu,
            precision,
            mode,
        }
    }

    pub fn step(&self, i: u64) -> Result<u64> {
        logistic_step(i, &self.mu, self.precision, self.mode)
    }

    pub fn exact(&self, i: u64) -> Result<ExactRatio> {
        exact_value(i, &self.mu, self.precision)
    }

    /// `m`-fold iterate `F_n^(m)(i)`.
    pub fn iterate(&self, i: u64, m: u32) -> Result<u64> {
        check_node(i, self.precision)?;
        Ok((0..m).fold(i, |x, _| {
            step_unchecked(x, &self.mu, self.precision, self.mode)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mu121() -> ControlParameter {
        ControlParameter::new(121, 5).unwrap()
    }

    fn bits(n: u32) -> Precision {
        Precision::new(n, &mu121()).unwrap()
    }

    #[test]
    fn normalizes_even_numerators() {
        let mu = ControlParameter::new(484, 7).unwrap();
        assert_eq!((mu.numerator(), mu.exponent()), (121, 5));
        let mu = ControlParameter::new(15488, 12).unwrap();
        assert_eq!(mu, mu121());
        let mu = ControlParameter::new(12, 4).unwrap();
        assert_eq!((mu.numerator(), mu.exponent()), (3, 2));
        assert_eq!(ControlParameter::new(3, 0).unwrap().exponent(), 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ControlParameter::new(0, 3).is_err());
        assert!(ControlParameter::new(4, 0).is_err()); // mu = 4
        assert!(ControlParameter::new(129, 5).is_err()); // > 4
        assert!(ControlParameter::new(128, 5).is_err()); // exactly 4
        assert!(ControlParameter::new(2, 0).is_err()); // no odd form
        assert!(ControlParameter::new(127, 5).is_ok());
    }

    #[test]
    fn precision_bounds() {
        let mu = mu121();
        assert!(Precision::new(4, &mu).is_err());
        assert!(Precision::new(5, &mu).is_ok());
        assert!(Precision::new(40, &mu).is_ok());
        assert!(Precision::new(41, &mu).is_err());
        assert!(Precision::new(0, &ControlParameter::new(3, 0).unwrap()).is_err());
    }

    #[test]
    fn exact_value_examples() {
        let (mu, n) = (mu121(), bits(5));
        assert_eq!(exact_value(0, &mu, n).unwrap(), ExactRatio::new(0, 10));
        assert_eq!(exact_value(16, &mu, n).unwrap(), ExactRatio::new(30976, 10));
        assert_eq!(exact_value(8, &mu, n).unwrap(), ExactRatio::new(23232, 10));
        assert!(matches!(
            exact_value(33, &mu, n),
            Err(Error::NodeOutOfRange { node: 33, max: 32 })
        ));
    }

    #[test]
    fn quantize_examples() {
        use QuantizationMode::*;
        assert_eq!(quantize(ExactRatio::new(30976, 10), Round), 30);
        assert_eq!(quantize(ExactRatio::new(30976, 10), Floor), 30);
        assert_eq!(quantize(ExactRatio::new(30976, 10), Ceil), 31);
        // 60.5 is a tie and goes up
        assert_eq!(quantize(ExactRatio::new(123904, 11), Round), 61);
        for mode in QuantizationMode::ALL {
            assert_eq!(quantize(ExactRatio::integer(17), mode), 17);
            assert_eq!(quantize(ExactRatio::new(17 << 9, 9), mode), 17);
        }
    }

    #[test]
    fn frac_quarters() {
        assert_eq!(ExactRatio::new(30976, 10).frac_quarter(), 1); // .25
        assert_eq!(ExactRatio::new(123904, 11).frac_quarter(), 2); // .5
        assert_eq!(ExactRatio::new(23232, 10).frac_quarter(), 2); // .6875
        assert_eq!(ExactRatio::new(1023, 10).frac_quarter(), 3);
        assert_eq!(ExactRatio::integer(5).frac_quarter(), 0);
    }

    #[test]
    fn step_examples() {
        let mu = mu121();
        for nb in 5..=12 {
            let n = bits(nb);
            for mode in QuantizationMode::ALL {
                assert_eq!(logistic_step(0, &mu, n, mode).unwrap(), 0);
                assert_eq!(logistic_step(n.scale(), &mu, n, mode).unwrap(), 0);
            }
        }
        assert_eq!(
            logistic_step(16, &mu, bits(5), QuantizationMode::Round).unwrap(),
            30
        );
        assert_eq!(
            logistic_step(32, &mu, bits(6), QuantizationMode::Round).unwrap(),
            61
        );
        assert_eq!(
            logistic_step(23, &mu, bits(5), QuantizationMode::Round).unwrap(),
            24
        );
        assert_eq!(
            logistic_step(24, &mu, bits(5), QuantizationMode::Round).unwrap(),
            23
        );
    }

    #[test]
    fn widest_precision_does_not_overflow() {
        let mu = ControlParameter::new((1 << 42) - 1, 40).unwrap();
        let n = Precision::new(40, &mu).unwrap();
        let mid = n.scale() / 2;
        let peak = logistic_step(mid, &mu, n, QuantizationMode::Ceil).unwrap();
        assert!(peak <= n.scale());
        assert_eq!(peak, n.scale()); // mu * 2^38 just below 2^40
    }

    #[test]
    fn iterate_composes_steps() {
        let map = LogisticMap::new(mu121(), bits(5), QuantizationMode::Round);
        assert_eq!(map.iterate(23, 2).unwrap(), 23);
        assert_eq!(map.iterate(16, 0).unwrap(), 16);
        assert_eq!(map.iterate(16, 1).unwrap(), 30);
    }

    fn any_map() -> impl Strategy<Value = (ControlParameter, Precision)> {
        (1u32..=12, 0u32..=12)
            .prop_flat_map(|(e, extra)| {
                let hi = 1u64 << (e + 2);
                (Just(e), Just(extra), (0..hi / 2).prop_map(|k| 2 * k + 1))
            })
            .prop_map(|(e, extra, num)| {
                let mu = ControlParameter::new(num, e).unwrap();
                let n = Precision::new((e + extra).max(1), &mu).unwrap();
                (mu, n)
            })
    }

    proptest! {
        #[test]
        fn symmetric_and_in_range((mu, n) in any_map(), frac in 0.0f64..=1.0) {
            let i = (frac * n.scale() as f64) as u64;
            for mode in QuantizationMode::ALL {
                let a = logistic_step(i, &mu, n, mode).unwrap();
                let b = logistic_step(n.scale() - i, &mu, n, mode).unwrap();
                prop_assert_eq!(a, b);
                prop_assert!(a <= n.scale());
            }
        }

        #[test]
        fn modes_are_ordered((mu, n) in any_map(), frac in 0.0f64..=1.0) {
            let i = (frac * n.scale() as f64) as u64;
            let lo = logistic_step(i, &mu, n, QuantizationMode::Floor).unwrap();
            let mid = logistic_step(i, &mu, n, QuantizationMode::Round).unwrap();
            let hi = logistic_step(i, &mu, n, QuantizationMode::Ceil).unwrap();
            prop_assert!(lo <= mid && mid <= hi && hi - lo <= 1);
        }
    }
}
