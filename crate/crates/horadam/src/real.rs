//! Arbitrary-precision real numbers with explicit bit precision.
//!
//! Thin wrapper over `astro_float::BigFloat` exposing only the operations the
//! rest of the crate needs, plus deterministic decimal serialization: a value
//! of precision P prints with ceil(P*log10(2)) significant digits, so output
//! is byte-identical across runs for identical inputs.

use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Exponent, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_traits::{One, Zero};

use crate::error::Error;

/// Guard bits used for internal computations before rounding back to the
/// requested precision.
pub const GUARD_BITS: u32 = 32;

const RM: RoundingMode = RoundingMode::ToEven;

/// Number of significant decimal digits carried by a precision of `p` bits:
/// ceil(p * log10(2)), computed in integer arithmetic.
pub fn decimal_digits_for(p: u32) -> usize {
    // 30103/100000 < log10(2); the difference is < 3e-8 per bit, far below
    // the +99999 ceiling slack for any realistic p.
    (p as u64 * 30103).div_ceil(100000) as usize
}

/// A finite arbitrary-precision real. Operations never produce NaN or
/// infinity for the inputs this crate feeds them; this is debug-asserted.
#[derive(Clone, Debug)]
pub struct Real(BigFloat);

impl Real {
    pub fn zero(p: u32) -> Self {
        Real(BigFloat::new(p as usize))
    }

    pub fn one(p: u32) -> Self {
        Self::from_i64(1, p)
    }

    pub fn from_i64(v: i64, p: u32) -> Self {
        Real(BigFloat::from_i64(v, p as usize))
    }

    pub fn from_u64(v: u64, p: u32) -> Self {
        Real(BigFloat::from_u64(v, p as usize))
    }

    /// Exact conversion from a big integer, then rounding to `p` bits.
    pub fn from_bigint(v: &BigInt, p: u32) -> Self {
        let (sign, mag) = v.clone().into_parts();
        let mut r = Self::from_biguint_magnitude(&mag, p);
        if sign == IntSign::Minus {
            r = r.neg();
        }
        r
    }

    pub fn from_biguint(v: &BigUint, p: u32) -> Self {
        Self::from_biguint_magnitude(v, p)
    }

    fn from_biguint_magnitude(mag: &BigUint, p: u32) -> Self {
        if mag.is_zero() {
            return Self::zero(p);
        }
        let words: Vec<Word> = mag.iter_u64_digits().map(|d| d as Word).collect();
        let e = (words.len() * 64) as Exponent;
        let mut f = BigFloat::from_words(&words, Sign::Pos, e);
        f.set_precision(p as usize, RM).expect("set_precision");
        debug_assert!(!f.is_nan());
        Real(f)
    }

    /// Parses a decimal string of the form `[+-]ddd[.ddd][e[+-]ddd]` and
    /// rounds it to `p` bits.
    pub fn from_decimal_str(s: &str, p: u32) -> Result<Self, Error> {
        let bad = || Error::InvalidNumber(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(bad());
        }
        let (neg, rest) = match t.as_bytes()[0] {
            b'+' => (false, &t[1..]),
            b'-' => (true, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp10): (&str, i64) = match rest.find(['e', 'E']) {
            Some(i) => (
                &rest[..i],
                rest[i + 1..].parse::<i64>().map_err(|_| bad())?,
            ),
            None => (rest, 0),
        };
        let (int_part, frac_part) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let digits: String = format!("{int_part}{frac_part}");
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let m = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
        let scale = exp10 - frac_part.len() as i64;
        let wp = p + GUARD_BITS;
        let mut r = if scale >= 0 {
            let scaled = &m * BigUint::from(10u32).pow(scale as u32);
            Self::from_biguint_magnitude(&scaled, p)
        } else {
            let num = Self::from_biguint_magnitude(&m, wp);
            let den =
                Self::from_biguint_magnitude(&BigUint::from(10u32).pow((-scale) as u32), wp);
            num.div(&den, wp).with_precision(p)
        };
        if neg {
            r = r.neg();
        }
        Ok(r)
    }

    pub fn add(&self, o: &Real, p: u32) -> Real {
        Real(self.0.add(&o.0, p as usize, RM))
    }

    pub fn sub(&self, o: &Real, p: u32) -> Real {
        Real(self.0.sub(&o.0, p as usize, RM))
    }

    pub fn mul(&self, o: &Real, p: u32) -> Real {
        Real(self.0.mul(&o.0, p as usize, RM))
    }

    pub fn div(&self, o: &Real, p: u32) -> Real {
        let r = self.0.div(&o.0, p as usize, RM);
        debug_assert!(!r.is_nan() && !r.is_inf(), "division produced non-finite");
        Real(r)
    }

    pub fn recip(&self, p: u32) -> Real {
        let r = self.0.reciprocal(p as usize, RM);
        debug_assert!(!r.is_nan() && !r.is_inf(), "reciprocal of zero");
        Real(r)
    }

    pub fn sqrt(&self, p: u32) -> Real {
        debug_assert!(!self.0.is_negative(), "sqrt of negative");
        Real(self.0.sqrt(p as usize, RM))
    }

    /// Integer power by binary exponentiation, computed with guard bits and
    /// rounded once to `p`.
    pub fn powi(&self, e: u64, p: u32) -> Real {
        if e == 0 {
            return Self::one(p);
        }
        let wp = (p + GUARD_BITS) as usize;
        let r = self.0.powi(e as usize, wp, RM);
        let mut r = r;
        r.set_precision(p as usize, RM).expect("set_precision");
        Real(r)
    }

    pub fn neg(&self) -> Real {
        Real(self.0.neg())
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    /// Rounds to `p` bits.
    pub fn with_precision(&self, p: u32) -> Real {
        let mut f = self.0.clone();
        f.set_precision(p as usize, RM).expect("set_precision");
        Real(f)
    }

    pub fn prec(&self) -> u32 {
        self.0.mantissa_max_bit_len().unwrap_or(64) as u32
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn cmp(&self, o: &Real) -> Ordering {
        match self.0.cmp(&o.0) {
            Some(v) if v < 0 => Ordering::Less,
            Some(v) if v > 0 => Ordering::Greater,
            Some(_) => Ordering::Equal,
            None => panic!("comparison involving NaN"),
        }
    }

    pub fn lt(&self, o: &Real) -> bool {
        self.cmp(o) == Ordering::Less
    }

    pub fn le(&self, o: &Real) -> bool {
        self.cmp(o) != Ordering::Greater
    }

    pub fn gt(&self, o: &Real) -> bool {
        self.cmp(o) == Ordering::Greater
    }

    pub fn ge(&self, o: &Real) -> bool {
        self.cmp(o) != Ordering::Less
    }

    /// 2^k at precision `p`; `k` may be negative.
    pub fn pow2(k: i64, p: u32) -> Real {
        let mut f = BigFloat::from_i64(1, p as usize);
        let e = f.exponent().expect("finite") as i64 + k;
        f.set_exponent(e as Exponent);
        Real(f)
    }

    /// Approximate natural log as f64, safe far outside f64's exponent range.
    pub fn ln_f64(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (words, n, _, e, _) = self.0.as_raw_parts().expect("finite");
        let top = words[words.len() - 1];
        // |x| = 0.M * 2^e with M normalized to n bits; top word holds the
        // leading 64 bits.
        let frac = top as f64 / 2f64.powi(64);
        let _ = n;
        frac.ln() + (e as f64) * std::f64::consts::LN_2
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let (words, _, s, e, _) = self.0.as_raw_parts().expect("finite");
        let top = words[words.len() - 1];
        let mag = top as f64 * 2f64.powi(e - 64);
        if s == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// Renders with exactly `digits` significant decimal digits as
    /// `d.ddd...e{k}`. Rounding is exact (half-to-even) via big integers.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        assert!(digits >= 1);
        if self.0.is_zero() {
            return "0".to_string();
        }
        let (words, n, sign, e, _) = self.0.as_raw_parts().expect("finite");
        let mut m = BigUint::zero();
        for w in words.iter().rev() {
            m = (m << 64) | BigUint::from(*w);
        }
        // |x| = m * 2^e2 where m has n significant bits (top bit set).
        let e2 = e as i64 - n as i64;
        let b = n as i64 - 1 + e2; // 2^b <= |x| < 2^(b+1)
        let mut k = ((b as i128 * 30103).div_euclid(100000)) as i64;
        let ten = BigUint::from(10u32);
        let lo = ten.pow((digits - 1) as u32);
        let hi = &lo * &ten;
        let mut r;
        let mut iter = 0;
        loop {
            let t = digits as i64 - 1 - k;
            let mut num = m.clone();
            let mut den = BigUint::one();
            if t >= 0 {
                num *= ten.pow(t as u32);
            } else {
                den *= ten.pow((-t) as u32);
            }
            if e2 >= 0 {
                num <<= e2 as u64;
            } else {
                den <<= (-e2) as u64;
            }
            r = div_round_half_even(&num, &den);
            if r >= hi {
                k += 1;
            } else if r < lo {
                k -= 1;
            } else {
                break;
            }
            iter += 1;
            assert!(iter < 4, "decimal exponent search failed to converge");
        }
        let ds = r.to_str_radix(10);
        let (first, rest) = ds.split_at(1);
        let sign_str = if sign == Sign::Neg { "-" } else { "" };
        if rest.is_empty() {
            format!("{sign_str}{first}e{k}")
        } else {
            format!("{sign_str}{first}.{rest}e{k}")
        }
    }

    /// Decimal rendering with the digit count implied by this value's own
    /// precision.
    pub fn to_decimal_default(&self) -> String {
        self.to_decimal_string(decimal_digits_for(self.prec()))
    }
}

fn div_round_half_even(num: &BigUint, den: &BigUint) -> BigUint {
    let (q, r) = num_integer::Integer::div_rem(num, den);
    let twice: BigUint = &r << 1;
    match twice.cmp(den) {
        Ordering::Less => q,
        Ordering::Greater => q + 1u32,
        Ordering::Equal => {
            if (&q % 2u32).is_zero() {
                q
            } else {
                q + 1u32
            }
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_default())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl serde::Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_default())
    }
}
