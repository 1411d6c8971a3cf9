use crate::error::{CoreError, Result};
use num_rational::Ratio;
use std::fmt;

/// A p-adic number in fixed-modulus form: `unit * p^val` where the unit part
/// is kept modulo `p^n`. The normalization `|p| = p^{-1}` is used throughout.
///
/// Canonical form: either the zero sentinel (`unit == 0`), or `unit` lies in
/// `[1, p^n)` and is coprime to `p`. Valuations are tracked exactly and may
/// be negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u64,
    n: u32,
    val: i64,
    unit: u64,
}

/// A norm value of the form `p^exp` (or zero). Exponents are rational so
/// that bounds like `p^{|j|/(p-1)}` compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PNorm {
    Zero,
    PExp(Ratio<i64>),
}

impl PNorm {
    pub fn one() -> Self {
        PNorm::PExp(Ratio::new(0, 1))
    }

    pub fn from_valuation(v: i64) -> Self {
        PNorm::PExp(Ratio::new(-v, 1))
    }

    pub fn mul(self, other: PNorm) -> PNorm {
        match (self, other) {
            (PNorm::Zero, _) | (_, PNorm::Zero) => PNorm::Zero,
            (PNorm::PExp(a), PNorm::PExp(b)) => PNorm::PExp(a + b),
        }
    }

    pub fn pow(self, k: i64) -> PNorm {
        match self {
            PNorm::Zero => {
                if k == 0 {
                    PNorm::one()
                } else {
                    PNorm::Zero
                }
            }
            PNorm::PExp(a) => PNorm::PExp(a * Ratio::new(k, 1)),
        }
    }

    pub fn exponent(self) -> Option<Ratio<i64>> {
        match self {
            PNorm::Zero => None,
            PNorm::PExp(a) => Some(a),
        }
    }
}

impl PartialOrd for PNorm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PNorm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (PNorm::Zero, PNorm::Zero) => std::cmp::Ordering::Equal,
            (PNorm::Zero, _) => std::cmp::Ordering::Less,
            (_, PNorm::Zero) => std::cmp::Ordering::Greater,
            (PNorm::PExp(a), PNorm::PExp(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::Zero => write!(f, "0"),
            PNorm::PExp(a) => {
                if *a == Ratio::new(0, 1) {
                    write!(f, "1")
                } else if a.is_integer() {
                    write!(f, "p^{}", a.numer())
                } else {
                    write!(f, "p^({}/{})", a.numer(), a.denom())
                }
            }
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` where `m = p^n` and `gcd(a, p) = 1`.
fn inv_mod(a: u64, m: u64) -> u64 {
    // extended Euclid on i128
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "inverse of non-unit");
    (s0.rem_euclid(m as i128)) as u64
}

impl PadicScalar {
    pub fn zero(p: u64, n: u32) -> Self {
        PadicScalar { p, n, val: 0, unit: 0 }
    }

    pub fn one(p: u64, n: u32) -> Self {
        PadicScalar { p, n, val: 0, unit: 1 }
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.n)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    /// Build from a residue `r` (taken mod `p^n`) times `p^val`, then
    /// canonicalize.
    pub fn from_residue(p: u64, n: u32, r: i128, val: i64) -> Self {
        let m = p.pow(n) as i128;
        let r = r.rem_euclid(m) as u64;
        Self::canonical(p, n, r, val)
    }

    pub fn from_i64(p: u64, n: u32, x: i64) -> Self {
        Self::from_residue(p, n, x as i128, 0)
    }

    /// Exact rational `num/den` as a scalar (used for series constants like
    /// `1/m` and `1/m!`). `den` must be nonzero.
    pub fn from_ratio(p: u64, n: u32, num: i64, den: i64) -> Self {
        assert!(den != 0);
        if num == 0 {
            return Self::zero(p, n);
        }
        let (vn, un) = split_val(p, num.unsigned_abs());
        let (vd, ud) = split_val(p, den.unsigned_abs());
        let m = p.pow(n);
        let mut unit = mul_mod(un % m, inv_mod(ud % m, m), m);
        if (num < 0) != (den < 0) {
            unit = (m - unit) % m;
        }
        Self::canonical(p, n, unit, vn as i64 - vd as i64)
    }

    fn canonical(p: u64, n: u32, mut r: u64, mut val: i64) -> Self {
        let m = p.pow(n);
        r %= m;
        if r == 0 {
            return Self::zero(p, n);
        }
        while r % p == 0 {
            r /= p;
            val += 1;
        }
        PadicScalar { p, n, val, unit: r }
    }

    pub fn is_zero(&self) -> bool {
        self.unit == 0
    }

    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn unit_part(&self) -> u64 {
        self.unit
    }

    /// The norm `p^{-val}` (`0` for the zero element).
    pub fn norm(&self) -> PNorm {
        match self.valuation() {
            None => PNorm::Zero,
            Some(v) => PNorm::from_valuation(v),
        }
    }

    /// Residue of the whole value modulo `p^k`, for values with `val >= 0`.
    /// Returns `None` if the valuation is negative.
    pub fn residue(&self, k: u32) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        if self.val < 0 {
            return None;
        }
        let m = self.p.pow(k.min(self.n + self.val as u32));
        let shift = pow_mod(self.p, self.val as u64, m);
        Some(mul_mod(self.unit % m, shift, m) % self.p.pow(k))
    }

    fn compat(&self, other: &Self) {
        debug_assert_eq!(self.p, other.p, "mixed primes");
        debug_assert_eq!(self.n, other.n, "mixed precisions");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.compat(other);
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let m = self.modulus();
        let v = self.val.min(other.val);
        let d1 = (self.val - v) as u32;
        let d2 = (other.val - v) as u32;
        let t1 = if d1 >= self.n { 0 } else { mul_mod(self.unit, self.p.pow(d1), m) };
        let t2 = if d2 >= self.n { 0 } else { mul_mod(other.unit, other.p.pow(d2), m) };
        Self::canonical(self.p, self.n, (t1 + t2) % m, v)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let m = self.modulus();
        PadicScalar { unit: m - self.unit, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.compat(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p, self.n);
        }
        PadicScalar {
            p: self.p,
            n: self.n,
            val: self.val + other.val,
            unit: mul_mod(self.unit, other.unit, self.modulus()),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(CoreError::InversionOfZero);
        }
        Ok(PadicScalar {
            p: self.p,
            n: self.n,
            val: -self.val,
            unit: inv_mod(self.unit, self.modulus()),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one(self.p, self.n));
        }
        let base = if k < 0 { self.inv()? } else { *self };
        if base.is_zero() {
            return Ok(base);
        }
        let e = k.unsigned_abs();
        Ok(PadicScalar {
            p: base.p,
            n: base.n,
            val: base.val * e as i64,
            unit: pow_mod(base.unit, e, base.modulus()),
        })
    }

    /// Multiply by `p^k` (exact on the ledger).
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return *self;
        }
        PadicScalar { val: self.val + k, ..*self }
    }

    /// Balanced signed representative of the unit part, for printing.
    fn signed_unit(&self) -> i128 {
        let m = self.modulus() as i128;
        let u = self.unit as i128;
        if u > m / 2 {
            u - m
        } else {
            u
        }
    }

    /// Parse the wire syntax produced by `Display`: `0`, `u`, `p`, `p^v`,
    /// `u*p^v`, with optional leading `-` and negative exponents.
    pub fn parse(p: u64, n: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        let err = |msg: &str| CoreError::ParseError {
            line: 1,
            col: 1,
            msg: format!("{msg}: {s:?}"),
        };
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, s),
        };
        let (unit_str, val_str) = match body.split_once('*') {
            Some((u, rest)) => {
                let v = rest
                    .trim()
                    .strip_prefix('p')
                    .ok_or_else(|| err("expected p-power after '*'"))?;
                (u.trim(), v)
            }
            None => {
                if let Some(v) = body.strip_prefix('p') {
                    ("1", v)
                } else {
                    (body, "")
                }
            }
        };
        let val: i64 = if val_str.is_empty() {
            if body.starts_with('p') || body.contains("*p") {
                1
            } else {
                0
            }
        } else {
            let v = val_str.strip_prefix('^').ok_or_else(|| err("expected '^'"))?;
            v.parse().map_err(|_| err("bad exponent"))?
        };
        let unit: i128 = unit_str.parse().map_err(|_| err("bad unit"))?;
        let unit = if neg { -unit } else { unit };
        Ok(Self::from_residue(p, n, unit, val))
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let u = self.signed_unit();
        match (u, self.val) {
            (_, 0) => write!(f, "{u}"),
            (1, 1) => write!(f, "p"),
            (1, v) => write!(f, "p^{v}"),
            (-1, 1) => write!(f, "-p"),
            (-1, v) => write!(f, "-p^{v}"),
            (_, 1) => write!(f, "{u}*p"),
            (_, v) => write!(f, "{u}*p^{v}"),
        }
    }
}

/// Split `x = p^v * u` with `u` coprime to `p`.
fn split_val(p: u64, mut x: u64) -> (u32, u64) {
    debug_assert!(x != 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_canonicalizes() {
        // (p=3, N=4): 5 + 22 = 27 -> valuation 3, unit 1
        let a = PadicScalar::from_i64(3, 4, 5);
        let b = PadicScalar::from_i64(3, 4, 22);
        let s = a.add(&b);
        assert_eq!(s.valuation(), Some(3));
        assert_eq!(s.unit_part(), 1);
    }

    #[test]
    fn norm_of_p() {
        let p = PadicScalar::from_i64(3, 4, 3);
        assert_eq!(p.norm(), PNorm::PExp(Ratio::new(-1, 1)));
    }

    #[test]
    fn geometric_series_inverse() {
        // inv(1 - p) = sum_{i<N} p^i mod p^N
        for (p, n) in [(3u64, 5u32), (2, 7), (5, 4)] {
            let one_minus_p = PadicScalar::from_i64(p, n, 1 - p as i64);
            let inv = one_minus_p.inv().unwrap();
            let mut expect = PadicScalar::zero(p, n);
            for i in 0..n {
                expect = expect.add(&PadicScalar::one(p, n).shift(i as i64));
            }
            assert_eq!(inv, expect);
        }
    }

    #[test]
    fn rational_constants() {
        // 1/2 at p=3: unit = inverse of 2 mod 3^4 = 41
        let half = PadicScalar::from_ratio(3, 4, 1, 2);
        assert_eq!(half.valuation(), Some(0));
        assert_eq!(half.mul(&PadicScalar::from_i64(3, 4, 2)), PadicScalar::one(3, 4));
        // 1/3 has valuation -1
        let third = PadicScalar::from_ratio(3, 4, 1, 3);
        assert_eq!(third.valuation(), Some(-1));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "1", "-2", "p", "p^3", "p^-2", "5*p^2", "-7*p^-1"] {
            let x = PadicScalar::parse(3, 6, s).unwrap();
            let y = PadicScalar::parse(3, 6, &x.to_string()).unwrap();
            assert_eq!(x, y, "roundtrip failed for {s}");
        }
    }

    #[test]
    fn zero_inversion_rejected() {
        assert_eq!(
            PadicScalar::zero(5, 3).inv(),
            Err(CoreError::InversionOfZero)
        );
    }

    #[test]
    fn ultrametric_inequality() {
        let cases = [(0i64, 0i64), (1, 2), (3, 6), (9, 9), (-4, 13)];
        for (x, y) in cases {
            let a = PadicScalar::from_i64(3, 6, x);
            let b = PadicScalar::from_i64(3, 6, y);
            let s = a.add(&b);
            assert!(s.norm() <= a.norm().max(b.norm()));
            if a.norm() != b.norm() {
                assert_eq!(s.norm(), a.norm().max(b.norm()));
            }
        }
    }
}
