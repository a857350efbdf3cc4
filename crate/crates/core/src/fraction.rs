//! Exact weights and values as `num/den` text.

use num_integer::Integer;
use num_rational::Ratio;

pub type Fraction = Ratio<u64>;

/// Parses `"num/den"` (or a bare integer) into a reduced fraction.
pub fn parse_fraction(text: &str) -> Result<Fraction, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: u64 = num
        .parse()
        .map_err(|_| format!("invalid fraction numerator in {text:?}"))?;
    let den: u64 = den
        .parse()
        .map_err(|_| format!("invalid fraction denominator in {text:?}"))?;
    if den == 0 {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Fraction::new(num, den))
}

/// Lowest-terms rendering, always with a denominator.
pub fn format_fraction(f: &Fraction) -> String {
    format!("{}/{}", f.numer(), f.denom())
}

/// Renders `f` over `den` when `den` is a multiple of the reduced denominator,
/// e.g. 13/14 over 28 becomes `26/28`.
pub fn format_over(f: &Fraction, den: u64) -> String {
    if den != 0 && den.is_multiple_of(*f.denom()) {
        format!("{}/{}", f.numer() * (den / f.denom()), den)
    } else {
        format_fraction(f)
    }
}

/// Least common multiple of the denominators, or `None` on overflow.
pub fn common_denominator<'a>(fs: impl IntoIterator<Item = &'a Fraction>) -> Option<u64> {
    let mut l = 1u64;
    for f in fs {
        let d = *f.denom();
        let g = l.gcd(&d);
        l = (l / g).checked_mul(d)?;
    }
    Some(l)
}

/// Overflow-checked sum.
pub fn checked_add(a: &Fraction, b: &Fraction) -> Option<Fraction> {
    let l = common_denominator([a, b])?;
    let an = a.numer().checked_mul(l / a.denom())?;
    let bn = b.numer().checked_mul(l / b.denom())?;
    Some(Fraction::new(an.checked_add(bn)?, l))
}

pub(crate) mod serde_fraction {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(f: &Fraction, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_fraction(f))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fraction, D::Error> {
        let text = String::deserialize(d)?;
        parse_fraction(&text).map_err(serde::de::Error::custom)
    }
}
