//! Serde adapters: integers are written as JSON numbers when they fit in
//! `i64` and as decimal strings otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Wire {
    Small(i64),
    Big(String),
}

fn to_wire(x: &BigInt) -> Wire {
    match x.to_i64() {
        Some(v) => Wire::Small(v),
        None => Wire::Big(x.to_string()),
    }
}

fn from_wire<E: serde::de::Error>(w: Wire) -> Result<BigInt, E> {
    match w {
        Wire::Small(v) => Ok(BigInt::from(v)),
        Wire::Big(s) => s.parse().map_err(|_| E::custom(format!("not an integer: {s}"))),
    }
}

pub mod big {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        to_wire(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_wire(Wire::deserialize(d)?)
    }
}

pub mod big_vec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(to_wire).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Wire>::deserialize(d)?.into_iter().map(from_wire).collect()
    }
}

pub mod big_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        x.iter()
            .map(|row| row.iter().map(to_wire).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Vec::<Vec<Wire>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(from_wire).collect())
            .collect()
    }
}
