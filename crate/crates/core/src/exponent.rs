//! Extended-real exponents `p ∈ [1, ∞]` and their Hölder conjugates.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent `p ≥ 1`, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }

    /// Hölder conjugate, `1/p + 1/p* = 1`.
    pub fn dual(self) -> Exponent {
        if self.is_one() {
            Exponent::INF
        } else if self.is_inf() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        if self.is_inf() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `2`, `1.5`, `inf`, `infinity`, `∞`, and the same with an `l` prefix (`linf`, `l1`).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix('l').unwrap_or(&t);
        match t {
            "inf" | "infinity" | "∞" => Ok(Exponent::INF),
            _ => t
                .parse::<f64>()
                .map_err(|_| Error::ParseExponent(s.to_string()))
                .and_then(Exponent::new),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_inf() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExpVisitor;

        impl Visitor<'_> for ExpVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExpVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_involution_on_sampled_exponents() {
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let e = Exponent::new(p).unwrap();
            assert_eq!(e.dual().dual(), e, "p = {p}");
        }
    }

    #[test]
    fn conjugate_reciprocals_sum_to_one() {
        for p in [1.0, 1.25, 2.0, 4.0, 17.0, f64::INFINITY] {
            let e = Exponent::new(p).unwrap();
            assert!((e.reciprocal() + e.dual().reciprocal() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_sub_unit_exponents() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
    }

    #[test]
    fn parses_common_spellings() {
        assert_eq!("linf".parse::<Exponent>().unwrap(), Exponent::INF);
        assert_eq!("l1".parse::<Exponent>().unwrap(), Exponent::ONE);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::TWO);
        assert_eq!("∞".parse::<Exponent>().unwrap(), Exponent::INF);
        assert!("abc".parse::<Exponent>().is_err());
    }

    #[test]
    fn serde_accepts_strings_and_numbers() {
        let e: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert!(e.is_inf());
        let e: Exponent = serde_json::from_str("\"2\"").unwrap();
        assert!(e.is_two());
        let e: Exponent = serde_json::from_str("1.5").unwrap();
        assert_eq!(e.value(), 1.5);
        assert_eq!(serde_json::to_string(&Exponent::INF).unwrap(), "\"inf\"");
    }
}
