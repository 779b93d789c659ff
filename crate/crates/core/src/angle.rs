//! Spider phases.
//!
//! Angles written as rational multiples of π stay exact until a numeric value
//! is needed; anything else is kept in radians.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Debug, Clone, Copy)]
pub enum Angle {
    /// `num/den · π`, reduced, `den > 0`.
    PiRatio {
        num: i64,
        den: i64,
    },
    Radians(f64),
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Angle {
    pub const ZERO: Angle = Angle::PiRatio { num: 0, den: 1 };

    pub fn pi_ratio(num: i64, den: i64) -> Angle {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num, den).max(1);
        Angle::PiRatio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn radians(value: f64) -> Angle {
        if value == 0.0 {
            Angle::ZERO
        } else {
            Angle::Radians(value)
        }
    }

    pub fn to_radians(self) -> f64 {
        match self {
            Angle::PiRatio { num, den } => num as f64 * PI / den as f64,
            Angle::Radians(r) => r,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Angle::PiRatio { num, .. } => num == 0,
            Angle::Radians(r) => r == 0.0,
        }
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::ZERO
    }
}

impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Angle::PiRatio { num: a, den: b }, Angle::PiRatio { num: c, den: d }) => {
                a == c && b == d
            }
            (Angle::Radians(a), Angle::Radians(b)) => a == b,
            _ => false,
        }
    }
}

impl Neg for Angle {
    type Output = Angle;

    fn neg(self) -> Angle {
        match self {
            Angle::PiRatio { num, den } => Angle::PiRatio { num: -num, den },
            Angle::Radians(r) => Angle::Radians(-r),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::PiRatio { num: 0, .. } => write!(f, "0"),
            Angle::PiRatio { num, den } => {
                let sign = if num < 0 { "-" } else { "" };
                let n = num.abs();
                let coef = if n == 1 { String::new() } else { n.to_string() };
                if den == 1 {
                    write!(f, "{sign}{coef}pi")
                } else {
                    write!(f, "{sign}{coef}pi/{den}")
                }
            }
            Angle::Radians(r) => write!(f, "{r:?}"),
        }
    }
}

/// Accepts `0`, `1.25`, `pi`, `-pi/2`, `3pi/4`, `3*pi/4`.
impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |message: &str| Error::Parse {
            offset: 0,
            message: format!("bad angle {s:?}: {message}"),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.as_str()),
        };
        if body.is_empty() {
            return Err(err("empty"));
        }
        let Some(pos) = body.find("pi") else {
            let v: f64 = body.parse().map_err(|_| err("not a number"))?;
            return Ok(Angle::radians(if neg { -v } else { v }));
        };
        let coef = body[..pos].trim_end_matches('*');
        let num: i64 = if coef.is_empty() {
            1
        } else {
            coef.parse()
                .map_err(|_| err("coefficient of pi must be an integer"))?
        };
        let rest = &body[pos + 2..];
        let den: i64 = if rest.is_empty() {
            1
        } else {
            let d = rest.strip_prefix('/').ok_or_else(|| err("expected '/'"))?;
            d.parse()
                .map_err(|_| err("denominator must be an integer"))?
        };
        if den == 0 {
            return Err(err("zero denominator"));
        }
        Ok(Angle::pi_ratio(if neg { -num } else { num }, den))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Angle::PiRatio { .. } => s.serialize_str(&self.to_string()),
            Angle::Radians(r) => s.serialize_f64(*r),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Angle::radians(v)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pi_forms() {
        assert_eq!("pi".parse::<Angle>().unwrap(), Angle::pi_ratio(1, 1));
        assert_eq!("-pi/2".parse::<Angle>().unwrap(), Angle::pi_ratio(-1, 2));
        assert_eq!("3*pi/4".parse::<Angle>().unwrap(), Angle::pi_ratio(3, 4));
        assert_eq!("6pi/8".parse::<Angle>().unwrap(), Angle::pi_ratio(3, 4));
        assert_eq!("0".parse::<Angle>().unwrap(), Angle::ZERO);
        assert_eq!("0.5".parse::<Angle>().unwrap(), Angle::Radians(0.5));
        assert!("pi/0".parse::<Angle>().is_err());
        assert!("x".parse::<Angle>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for a in [
            Angle::pi_ratio(1, 4),
            Angle::pi_ratio(-3, 2),
            Angle::pi_ratio(1, 1),
            Angle::ZERO,
            Angle::Radians(0.25),
        ] {
            assert_eq!(a.to_string().parse::<Angle>().unwrap(), a);
        }
    }

    #[test]
    fn negation_is_involutive() {
        let a = Angle::pi_ratio(1, 2);
        assert_eq!(-a, Angle::pi_ratio(-1, 2));
        assert_eq!(-(-a), a);
        assert!((a.to_radians() - PI / 2.0).abs() < 1e-15);
    }
}
