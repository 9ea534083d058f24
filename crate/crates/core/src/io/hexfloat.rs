use crate::error::{FanoError, Result};

/// C99 `%a`-style text for an `f64`: `0x1.8p+1`, `-0x0p+0`, `0x1p-1074`, `inf`, `nan`.
pub fn format_hex(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    let sign = if v.is_sign_negative() { "-" } else { "" };
    if v.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = v.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 { (0, -1022) } else { (1, exp_bits - 1023) };
    let mut frac = format!("{mant:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    let dot = if frac.is_empty() { String::new() } else { format!(".{frac}") };
    let esign = if exp >= 0 { "+" } else { "-" };
    format!("{sign}0x{lead}{dot}p{esign}{}", exp.abs())
}

/// Inverse of [`format_hex`]; exact for every finite input it produces, and
/// for any hex literal representable in `f64` without rounding.
pub fn parse_hex(s: &str) -> Result<f64> {
    let bad = || FanoError::Parse(format!("bad hex float `{s}`"));
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let apply = |x: f64| if neg { -x } else { x };
    match body {
        "inf" => return Ok(apply(f64::INFINITY)),
        "nan" => return Ok(f64::NAN),
        _ => {}
    }
    let body = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")).ok_or_else(bad)?;
    let (digits, exp) = body.split_once(['p', 'P']).ok_or_else(bad)?;
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let mut mant: u128 = 0;
    let mut scale = exp;
    for (i, c) in int.chars().chain(frac.chars()).enumerate() {
        let d = c.to_digit(16).ok_or_else(bad)? as u128;
        if mant >> 120 != 0 {
            return Err(bad());
        }
        mant = mant * 16 + d;
        if i >= int.len() {
            scale -= 4;
        }
    }
    if mant == 0 {
        return Ok(apply(0.0));
    }
    // normalize to at most 53 significant bits; reject anything inexact
    while mant & 1 == 0 {
        mant >>= 1;
        scale += 1;
    }
    if mant >> 53 != 0 {
        return Err(bad());
    }
    let mut x = mant as f64;
    // scale in steps that keep intermediate values exact
    while scale > 0 {
        let step = scale.min(1000);
        x *= 2f64.powi(step as i32);
        scale -= step;
    }
    while scale < 0 {
        let step = (-scale).min(1000);
        let y = x * 2f64.powi(-(step as i32));
        if y != 0.0 && y.is_finite() && y * 2f64.powi(step as i32) != x {
            return Err(bad());
        }
        x = y;
        scale += step;
    }
    if x == 0.0 || x.is_infinite() {
        return Err(bad());
    }
    Ok(apply(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(format_hex(1.0), "0x1p+0");
        assert_eq!(format_hex(3.0), "0x1.8p+1");
        assert_eq!(format_hex(-0.5), "-0x1p-1");
        assert_eq!(format_hex(0.1), "0x1.999999999999ap-4");
        assert_eq!(format_hex(-0.0), "-0x0p+0");
        assert_eq!(format_hex(f64::from_bits(1)), "0x0.0000000000001p-1022");
        assert_eq!(parse_hex("0x1.8p+1").unwrap(), 3.0);
        assert_eq!(parse_hex("0x10p-4").unwrap(), 1.0);
        assert!(parse_hex("1.5").is_err());
        assert!(parse_hex("0x1.00000000000001p+0").is_err());
    }

    #[test]
    fn round_trips_bitwise() {
        let specials = [0.0, -0.0, f64::MIN_POSITIVE, f64::MAX, -f64::MAX, 1e-310, f64::INFINITY];
        for v in specials {
            assert_eq!(parse_hex(&format_hex(v)).unwrap().to_bits(), v.to_bits(), "{v}");
        }
        let mut x = 0x9e3779b97f4a7c15u64;
        for _ in 0..10_000 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let v = f64::from_bits(x);
            if v.is_finite() {
                assert_eq!(parse_hex(&format_hex(v)).unwrap().to_bits(), v.to_bits(), "{v:e}");
            }
        }
    }
}
