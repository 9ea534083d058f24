//! File formats: exact numbers travel as strings, floats as hexadecimal
//! literals so every bound round-trips bit for bit.

mod hexfloat;

pub use hexfloat::{format_hex, parse_hex};

/// Serde adapter writing big integers as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing `f64` values as hexadecimal float strings.
pub mod hex {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_hex(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_hex(&s).map_err(serde::de::Error::custom)
    }

    /// An `f64` that serializes as a hexadecimal float string.
    #[derive(Clone, Copy, Debug, PartialEq)]
    pub struct Hex(pub f64);

    impl serde::Serialize for Hex {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize(&self.0, s)
        }
    }

    impl<'de> Deserialize<'de> for Hex {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            deserialize(d).map(Hex)
        }
    }
}

/// Serde adapter for complex numbers as `[re, im]` hexadecimal pairs.
pub mod hex_complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [super::format_hex(v.re), super::format_hex(v.im)].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[String; 2]>::deserialize(d)?;
        let p = |s: &str| super::parse_hex(s).map_err(serde::de::Error::custom);
        Ok(Complex64::new(p(&re)?, p(&im)?))
    }
}

/// Serde adapter for vectors of complex numbers.
pub mod hex_complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[String; 2]> =
            v.iter().map(|z| [super::format_hex(z.re), super::format_hex(z.im)]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[String; 2]>::deserialize(d)?;
        let p = |s: &str| super::parse_hex(s).map_err(serde::de::Error::custom);
        pairs.iter().map(|[re, im]| Ok(Complex64::new(p(re)?, p(im)?))).collect()
    }
}
