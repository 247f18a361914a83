//! Serialization helpers shared by the JSON reports.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serializer;

/// Rounds to 9 significant digits so reports are stable across platforms.
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

pub fn sig9<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig9(*x))
}

/// Emits the integer as a JSON number while it fits in `u128`, else as a
/// decimal string.
pub fn biguint<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match x.to_u128() {
        Some(v) => s.serialize_u128(v),
        None => s.serialize_str(&x.to_str_radix(10)),
    }
}
