//! Identifier newtypes and the fixed-point level coordinate used by charts.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed identifier `{0}`")]
pub struct IdParseError(pub String);

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident, $prefix:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub const PREFIX: &'static str = $prefix;
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = IdParseError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.strip_prefix($prefix)
                    .filter(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|rest| rest.parse().ok())
                    .map($name)
                    .ok_or_else(|| IdParseError(s.to_string()))
            }
        }
    };
}

id_type!(
    /// A block of the assembly (one foliated piece).
    BlockId,
    "b"
);
id_type!(
    /// A gluing between two interfaces or two spots.
    GluingId,
    "g"
);
id_type!(
    /// A center or conic singularity.
    SingId,
    "s"
);
id_type!(
    /// A declared leaf descriptor.
    LeafId,
    "l"
);
id_type!(
    /// A transverse disc on the boundary of a block.
    SpotId,
    "p"
);

/// Position of a level set inside a chart, in thousandths.
///
/// Morse modifications only relocate the cone level, so exact arithmetic is
/// all that is needed; the textual form is a plain decimal such as `-0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Level(pub i64);

impl Level {
    pub const SCALE: i64 = 1000;

    pub fn from_thousandths(v: i64) -> Self {
        Level(v)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / Self::SCALE as u64;
        let frac = abs % Self::SCALE as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:03}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl FromStr for Level {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || IdParseError(s.to_string());
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        if frac.len() > 3 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let whole: i64 = whole.parse().map_err(|_| err())?;
        let mut frac_val: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| err())?
        };
        for _ in frac.len()..3 {
            frac_val *= 10;
        }
        let v = whole
            .checked_mul(Self::SCALE)
            .and_then(|w| w.checked_add(frac_val))
            .ok_or_else(err)?;
        Ok(Level(if neg { -v } else { v }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip_through_text() {
        assert_eq!("b12".parse::<BlockId>().unwrap(), BlockId(12));
        assert_eq!(SpotId(3).to_string(), "p3");
        assert!("b".parse::<BlockId>().is_err());
        assert!("g1".parse::<BlockId>().is_err());
        assert!("b-1".parse::<BlockId>().is_err());
    }

    #[test]
    fn levels_print_as_short_decimals() {
        assert_eq!(Level(-500).to_string(), "-0.5");
        assert_eq!(Level(0).to_string(), "0");
        assert_eq!(Level(1250).to_string(), "1.25");
        assert_eq!(Level(-3).to_string(), "-0.003");
        for text in ["-0.5", "0", "1.25", "-0.003", "7"] {
            assert_eq!(text.parse::<Level>().unwrap().to_string(), text);
        }
        assert!("0.0001".parse::<Level>().is_err());
        assert!("".parse::<Level>().is_err());
    }
}
