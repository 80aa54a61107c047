//! Perfect K_k-packings of dense r-partite graphs.
//!
//! `graph` holds the graph model and interchange formats, `structure` the
//! extremal-structure detectors and lattices, `matching` the balanced
//! matching and packing tools, `pipeline` the staged packing construction
//! and `oracle` the exact reference checks.

pub mod graph;
pub mod matching;
pub mod oracle;
pub mod pipeline;
pub mod structure;

/// Exact rational used for every density and threshold.
pub type Rational = num_rational::Ratio<i64>;

/// Parse "num/den" or a plain integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?);
            (b != 0).then(|| Rational::new(a, b))
        }
        None => s.parse::<i64>().ok().map(Rational::from_integer),
    }
}

pub fn format_rational(q: Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Serde adapter writing rationals as "num/den" strings.
pub mod rational_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(*q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/4"), Some(Rational::new(3, 4)));
        assert_eq!(parse_rational("2"), Some(Rational::from_integer(2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(Rational::new(2, 4)), "1/2");
    }
}
