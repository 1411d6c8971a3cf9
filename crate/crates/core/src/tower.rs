//! Finite-level model of the ambient ring of integers that hosts the
//! compatible root systems: p-power roots of unity, of `p`, of `h = 1 + pT`,
//! and of the circle coordinate `T`.
//!
//! Presentation. Let `M` be the ambient level and `q = p^M`. The ring is
//! generated by `om`, `up`, `hc`, `P`, `S` over the p-adic integers subject
//! to
//!
//! * `P^q = p`;
//! * `om^{p-1} = up * P`, and `up^{p^{M-1}} = sum_{j<phi} (-c_j/p) P^j om^j`
//!   (right side re-normalized), the saturated forms of
//!   `Phi_q(1 + P*om) = 0` where `c_j = [x^j] Phi_q(1+x)`; together they
//!   make `zeta := 1 + P*om` an exact primitive `q`-th root of unity;
//! * `G(hc) = 0`, the saturated form of `(1 + P*hc)^q = 1 + p*S^q`, so that
//!   `eta_h := 1 + P*hc` is an exact `q`-th root of `h = 1 + pT` with
//!   `T := S^q`.
//!
//! Saturation (dividing each defining equation by the largest `P`-power that
//! divides it) exposes the divisibility relations between `zeta_{p^m} - 1`,
//! `h^{1/p^m} - 1` and the roots of `p` that the kernel division algorithms
//! rely on: the auxiliary unit `up = om^{p-1}/P` makes monomial
//! `P`-divisibility at the residue level agree with valuation divisibility.
//! Monomial normal forms are unique: every rewrite strictly decreases the
//! `(hc, (p-1) up + om, om, pe)` lexicographic order.

use crate::error::{CoreError, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Coefficient abstraction: fixed-modulus residues for production, exact
/// integers for the ghost-component oracle.
pub trait TowerCoeff: Clone + PartialEq + Eq + fmt::Debug {
    type Ctx: Copy + fmt::Debug + PartialEq;
    fn from_i64(ctx: Self::Ctx, x: i64) -> Self;
    fn from_bigint(ctx: Self::Ctx, x: &BigInt) -> Self;
    fn ctx(&self) -> Self::Ctx;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Exact division by `p` on the stored representative. For residue
    /// coefficients the modulus is kept; callers that divide are expected to
    /// work with buffer digits and publish at a smaller modulus.
    fn div_p_exact(&self, p: u64) -> Option<Self>;
}

/// Residue class modulo an explicit `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zm {
    pub v: u64,
    pub m: u64,
}

impl TowerCoeff for Zm {
    type Ctx = u64;

    fn from_i64(m: u64, x: i64) -> Self {
        Zm { v: (x as i128).rem_euclid(m as i128) as u64, m }
    }

    fn from_bigint(m: u64, x: &BigInt) -> Self {
        let r = x % BigInt::from(m);
        let r = if r.is_negative() { r + BigInt::from(m) } else { r };
        let digits = r.to_u64_digits().1;
        Zm { v: digits.first().copied().unwrap_or(0), m }
    }

    fn ctx(&self) -> u64 {
        self.m
    }

    fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.m, o.m);
        Zm { v: (self.v + o.v) % self.m, m: self.m }
    }

    fn neg(&self) -> Self {
        Zm { v: (self.m - self.v) % self.m, m: self.m }
    }

    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.m, o.m);
        Zm { v: ((self.v as u128 * o.v as u128) % self.m as u128) as u64, m: self.m }
    }

    fn div_p_exact(&self, p: u64) -> Option<Self> {
        if self.v % p == 0 {
            Some(Zm { v: self.v / p, m: self.m })
        } else {
            None
        }
    }
}

impl TowerCoeff for BigInt {
    type Ctx = ();

    fn from_i64(_: (), x: i64) -> Self {
        BigInt::from(x)
    }

    fn from_bigint(_: (), x: &BigInt) -> Self {
        x.clone()
    }

    fn ctx(&self) {}

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn neg(&self) -> Self {
        -self
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn div_p_exact(&self, p: u64) -> Option<Self> {
        let p = BigInt::from(p);
        if Zero::is_zero(&(self % &p)) {
            Some(self / p)
        } else {
            None
        }
    }
}

/// Monomial `om^om * up^up * hc^hc * P^pe * S^se` in normal form
/// (`om < p-1`, `up < p^{M-1}`, `hc < q`, `pe < q` after reduction,
/// `se` unbounded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TowerMono {
    pub om: u32,
    pub up: u32,
    pub hc: u32,
    pub pe: u32,
    pub se: i64,
}

impl TowerMono {
    pub fn one() -> Self {
        TowerMono { om: 0, up: 0, hc: 0, pe: 0, se: 0 }
    }

    pub fn gen_om() -> Self {
        TowerMono { om: 1, ..Self::one() }
    }

    pub fn gen_p(e: u32) -> Self {
        TowerMono { pe: e, ..Self::one() }
    }

    pub fn gen_s(e: i64) -> Self {
        TowerMono { se: e, ..Self::one() }
    }
}

impl fmt::Display for TowerMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [
            ("om", self.om as i64),
            ("up", self.up as i64),
            ("hc", self.hc as i64),
            ("P", self.pe as i64),
            ("S", self.se),
        ] {
            if e != 0 {
                parts.push(if e == 1 { name.to_string() } else { format!("{name}^{e}") });
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Reduction worklist key: rewrites strictly decrease this lexicographic
/// tuple, so popping max-first terminates and merges parallel branches.
type SortKey = (u32, u32, u32, u32, i64);

fn sort_key(m: &TowerMono, p: u64) -> SortKey {
    (m.hc, (p as u32 - 1) * m.up + m.om, m.om, m.pe, m.se)
}

fn mono_of_key(k: &SortKey, p: u64) -> TowerMono {
    let (hc, m2, om, pe, se) = *k;
    TowerMono { om, up: (m2 - om) / (p as u32 - 1), hc, pe, se }
}

/// Shared presentation data for one `(p, m_amb)` pair.
#[derive(Debug, Clone)]
pub struct TowerCtx {
    pub p: u64,
    pub m_amb: u32,
    /// `phi(p^m_amb)`
    pub phi: u32,
    /// `p^m_amb`
    pub q: u32,
    /// `p^{m_amb - 1}` (cap for the `up` exponent)
    pub pm1: u32,
    /// RHS of `up^{p^{M-1}} = sum coeff * om^om * up^up * P^pe`
    upsilon_rhs: Vec<(u32, u32, u32, BigInt)>,
    /// RHS of `hc^q = sum coeff * P^pe * hc^hc * S^se`
    chi_rhs: Vec<(u32, u32, i64, BigInt)>,
}

impl TowerCtx {
    pub fn new(p: u64, m_amb: u32) -> Result<Self> {
        let q64 = p
            .checked_pow(m_amb)
            .filter(|&q| q <= 1 << 20)
            .ok_or_else(|| CoreError::InvalidContext("ambient level too large".into()))?;
        let q = q64 as u32;
        let phi = (q64 - q64 / p) as u32;
        let pm1 = (q64 / p) as u32;
        let pbig = BigInt::from(p);

        // c_j = [x^j] Phi_q(1 + x) = sum_{i<p} C(i * p^{M-1}, j). The
        // saturated relation om^phi = sum_{j<phi} (-c_j/p) P^{q+j-phi} om^j
        // divides by P^{q-phi} = P^{p^{M-1}} to give
        //   up^{p^{M-1}} = sum_{j<phi} (-c_j/p) (P om)^j,
        // and each om^j is re-normalized as om^{j mod (p-1)} (up P)^{j/(p-1)}.
        let step = q64 / p;
        let mut upsilon_rhs = Vec::new();
        for j in 0..phi {
            let mut cj = BigInt::zero();
            for i in 0..p {
                cj += binom(i * step, j as u64);
            }
            debug_assert!(Zero::is_zero(&(&cj % &pbig)), "Phi(1+x) is Eisenstein");
            let coeff = -(cj / &pbig);
            if !Zero::is_zero(&coeff) {
                let om = j % (p as u32 - 1);
                let up = j / (p as u32 - 1);
                upsilon_rhs.push((om, up, j + up, coeff));
            }
        }

        // Saturated h-root relation from (1 + P*hc)^q = 1 + p S^q:
        //   hc^q = S^q - sum_{1<=k<q} (C(q,k)/p) * P^k * hc^k
        let mut chi_rhs = vec![(0u32, 0u32, q as i64, BigInt::one())];
        for k in 1..q {
            let c = binom(q as u64, k as u64);
            debug_assert!(Zero::is_zero(&(&c % &pbig)));
            let coeff = -(c / &pbig);
            if !Zero::is_zero(&coeff) {
                chi_rhs.push((k, k, 0, coeff));
            }
        }

        Ok(TowerCtx { p, m_amb, phi, q, pm1, upsilon_rhs, chi_rhs })
    }

    pub fn pm(&self, k: u32) -> u64 {
        self.p.pow(k)
    }
}

/// Sparse element of the tower ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerElement<C: TowerCoeff> {
    pub cctx: C::Ctx,
    pub terms: BTreeMap<TowerMono, C>,
}

fn merge_into<C: TowerCoeff>(map: &mut BTreeMap<SortKey, C>, key: SortKey, c: C) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get().add(&c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl<C: TowerCoeff> TowerElement<C> {
    pub fn zero(cctx: C::Ctx) -> Self {
        TowerElement { cctx, terms: BTreeMap::new() }
    }

    pub fn from_i64(cctx: C::Ctx, x: i64) -> Self {
        let mut e = Self::zero(cctx);
        let c = C::from_i64(cctx, x);
        if !c.is_zero() {
            e.terms.insert(TowerMono::one(), c);
        }
        e
    }

    pub fn one(cctx: C::Ctx) -> Self {
        Self::from_i64(cctx, 1)
    }

    pub fn monomial(cctx: C::Ctx, ctx: &TowerCtx, m: TowerMono, c: C) -> Self {
        let mut e = Self::zero(cctx);
        e.accumulate(ctx, m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn merge(&mut self, m: TowerMono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Push `c * m` through the rewrite rules into normal form and merge.
    pub fn accumulate(&mut self, ctx: &TowerCtx, m: TowerMono, c: C) {
        let mut work: BTreeMap<SortKey, C> = BTreeMap::new();
        merge_into(&mut work, sort_key(&m, ctx.p), c);
        self.drain_reduce(ctx, &mut work);
    }

    fn drain_reduce(&mut self, ctx: &TowerCtx, work: &mut BTreeMap<SortKey, C>) {
        let p32 = ctx.p as u32;
        while let Some((&key, _)) = work.last_key_value() {
            let c = work.remove(&key).expect("key just observed");
            if c.is_zero() {
                continue;
            }
            let m = mono_of_key(&key, ctx.p);
            if m.pe >= ctx.q {
                // P^q = p
                let k = m.pe / ctx.q;
                let mm = TowerMono { pe: m.pe % ctx.q, ..m };
                let mut c2 = c;
                for _ in 0..k {
                    c2 = c2.mul(&C::from_i64(self.cctx, ctx.p as i64));
                    if c2.is_zero() {
                        break;
                    }
                }
                merge_into(work, sort_key(&mm, ctx.p), c2);
                continue;
            }
            if m.om >= p32 - 1 {
                // om^{p-1} = up * P
                let k = m.om / (p32 - 1);
                let mm = TowerMono {
                    om: m.om % (p32 - 1),
                    up: m.up + k,
                    pe: m.pe + k,
                    ..m
                };
                merge_into(work, sort_key(&mm, ctx.p), c);
                continue;
            }
            if m.up >= ctx.pm1 {
                // up^{p^{M-1}} = sum coeff * om^a up^b P^e
                let rest = m.up - ctx.pm1;
                for (om2, up2, pe2, cf) in &ctx.upsilon_rhs {
                    let mm = TowerMono {
                        om: m.om + om2,
                        up: rest + up2,
                        hc: m.hc,
                        pe: m.pe + pe2,
                        se: m.se,
                    };
                    merge_into(work, sort_key(&mm, ctx.p), c.mul(&C::from_bigint(self.cctx, cf)));
                }
                continue;
            }
            if m.hc >= ctx.q {
                let rest = m.hc - ctx.q;
                for (hc2, pe2, se2, cf) in &ctx.chi_rhs {
                    let mm = TowerMono {
                        om: m.om,
                        up: m.up,
                        hc: rest + hc2,
                        pe: m.pe + pe2,
                        se: m.se + se2,
                    };
                    merge_into(work, sort_key(&mm, ctx.p), c.mul(&C::from_bigint(self.cctx, cf)));
                }
                continue;
            }
            self.merge(m, c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.merge(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.cctx);
        for (m, c) in &self.terms {
            out.terms.insert(*m, c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.cctx);
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            let prod = a.mul(c);
            if !prod.is_zero() {
                out.terms.insert(*m, prod);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self, ctx: &TowerCtx) -> Self {
        let mut raw: BTreeMap<SortKey, C> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1.mul(c2);
                if c.is_zero() {
                    continue;
                }
                let m = TowerMono {
                    om: m1.om + m2.om,
                    up: m1.up + m2.up,
                    hc: m1.hc + m2.hc,
                    pe: m1.pe + m2.pe,
                    se: m1.se + m2.se,
                };
                merge_into(&mut raw, sort_key(&m, ctx.p), c);
            }
        }
        let mut out = Self::zero(self.cctx);
        out.drain_reduce(ctx, &mut raw);
        out
    }

    pub fn pow(&self, mut e: u64, ctx: &TowerCtx) -> Self {
        let mut acc = Self::one(self.cctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ctx);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, ctx);
            }
        }
        acc
    }

    /// Multiply by `p^k`.
    pub fn mul_p_pow(&self, k: u32, ctx: &TowerCtx) -> Self {
        let mut c = C::from_i64(self.cctx, 1);
        for _ in 0..k {
            c = c.mul(&C::from_i64(self.cctx, ctx.p as i64));
        }
        self.scale(&c)
    }

    /// Exact division by `p^k` on every coefficient representative.
    pub fn div_p_pow(&self, k: u32, ctx: &TowerCtx) -> Result<Self> {
        let mut out = Self::zero(self.cctx);
        for (m, c) in &self.terms {
            let mut q = c.clone();
            for _ in 0..k {
                q = q.div_p_exact(ctx.p).ok_or_else(|| {
                    CoreError::TiltDivisionFailure(format!("coefficient of {m} not divisible by p"))
                })?;
            }
            out.terms.insert(*m, q);
        }
        Ok(out)
    }

    /// Divide by `P^j`. A term `c * P^i` with `i < j` borrows: it equals
    /// `(c/p^k) * P^{i + k q}` for `k = ceil((j - i)/q)`, provided `p^k`
    /// divides `c`.
    pub fn div_ppow(&self, j: u64, ctx: &TowerCtx) -> Result<Self> {
        let q = ctx.q as u64;
        let mut out = Self::zero(self.cctx);
        for (m, c) in &self.terms {
            let i = m.pe as u64;
            let (k, new_pe) = if i >= j {
                (0u64, i - j)
            } else {
                let k = (j - i).div_ceil(q);
                (k, i + k * q - j)
            };
            let mut cc = c.clone();
            for _ in 0..k {
                cc = cc.div_p_exact(ctx.p).ok_or_else(|| {
                    CoreError::TiltDivisionFailure(format!(
                        "monomial {m} is not divisible by P^{j}"
                    ))
                })?;
            }
            let mm = TowerMono { pe: new_pe as u32, ..*m };
            out.accumulate(ctx, mm, cc);
        }
        Ok(out)
    }

    /// Substitute generator images (a ring endomorphism).
    pub fn map_generators(&self, ctx: &TowerCtx, images: &GeneratorImages<C>) -> Self {
        let mut cache: BTreeMap<(u8, u64), Self> = BTreeMap::new();
        let pw = |which: u8, base: &Self, e: u64, ctx: &TowerCtx, cache: &mut BTreeMap<(u8, u64), Self>| -> Self {
            if e == 0 {
                return Self::one(self.cctx);
            }
            if let Some(hit) = cache.get(&(which, e)) {
                return hit.clone();
            }
            let v = base.pow(e, ctx);
            cache.insert((which, e), v.clone());
            v
        };
        let mut out = Self::zero(self.cctx);
        for (m, c) in &self.terms {
            let mut t = Self::from_i64(self.cctx, 1).scale(c);
            for (which, base, e) in [
                (0u8, &images.om, m.om as u64),
                (1, &images.up, m.up as u64),
                (2, &images.hc, m.hc as u64),
                (3, &images.pe, m.pe as u64),
                (4, &images.se, m.se.max(0) as u64),
                (5, &images.se_inv, (-m.se).max(0) as u64),
            ] {
                if e > 0 && !t.is_zero() {
                    t = t.mul(&pw(which, base, e, ctx, &mut cache), ctx);
                }
            }
            out = out.add(&t);
        }
        out
    }
}

impl TowerElement<Zm> {
    /// Reduce all coefficients to a smaller modulus.
    pub fn reduce_modulus(&self, new_m: u64) -> Self {
        let mut out = TowerElement::zero(new_m);
        for (m, c) in &self.terms {
            let v = c.v % new_m;
            if v != 0 {
                out.terms.insert(*m, Zm { v, m: new_m });
            }
        }
        out
    }

    /// Freshman Frobenius `x -> x^p` at modulus `p` (exponent-scaling).
    pub fn frobenius_mod_p(&self, ctx: &TowerCtx) -> Self {
        debug_assert_eq!(self.cctx, ctx.p, "frobenius_mod_p needs modulus p");
        let mut out = TowerElement::zero(self.cctx);
        let p = ctx.p as u32;
        for (m, c) in &self.terms {
            // a^p = a in F_p
            let mm = TowerMono {
                om: m.om * p,
                up: m.up * p,
                hc: m.hc * p,
                pe: m.pe * p,
                se: m.se * p as i64,
            };
            out.accumulate(ctx, mm, *c);
        }
        out
    }
}

/// Generator images defining a ring endomorphism.
pub struct GeneratorImages<C: TowerCoeff> {
    pub om: TowerElement<C>,
    pub up: TowerElement<C>,
    pub hc: TowerElement<C>,
    pub pe: TowerElement<C>,
    pub se: TowerElement<C>,
    pub se_inv: TowerElement<C>,
}

/// Designated elements of the tower at a given level `m <= m_amb`.
pub struct Designated;

impl Designated {
    /// `zeta_{p^m} = (1 + P * om)^{p^{m_amb - m}}`
    pub fn zeta<C: TowerCoeff>(cctx: C::Ctx, ctx: &TowerCtx, m: u32) -> TowerElement<C> {
        let base = Self::zeta_top(cctx, ctx);
        base.pow(ctx.pm(ctx.m_amb - m), ctx)
    }

    pub fn zeta_top<C: TowerCoeff>(cctx: C::Ctx, ctx: &TowerCtx) -> TowerElement<C> {
        let mut e = TowerElement::from_i64(cctx, 1);
        e.accumulate(
            ctx,
            TowerMono { om: 1, up: 0, hc: 0, pe: 1, se: 0 },
            C::from_i64(cctx, 1),
        );
        e
    }

    /// `p^{1/p^m} = P^{p^{m_amb - m}}`
    pub fn root_p<C: TowerCoeff>(cctx: C::Ctx, ctx: &TowerCtx, m: u32) -> TowerElement<C> {
        let e64 = ctx.pm(ctx.m_amb - m);
        TowerElement::monomial(cctx, ctx, TowerMono::gen_p(e64 as u32), C::from_i64(cctx, 1))
    }

    /// `h^{1/p^m} = (1 + P * hc)^{p^{m_amb - m}}` where `h = 1 + p S^q`
    pub fn root_h<C: TowerCoeff>(cctx: C::Ctx, ctx: &TowerCtx, m: u32) -> TowerElement<C> {
        let mut base = TowerElement::from_i64(cctx, 1);
        base.accumulate(
            ctx,
            TowerMono { om: 0, up: 0, hc: 1, pe: 1, se: 0 },
            C::from_i64(cctx, 1),
        );
        base.pow(ctx.pm(ctx.m_amb - m), ctx)
    }

    /// `T^{1/p^m} = S^{p^{m_amb - m}}`
    pub fn root_t<C: TowerCoeff>(cctx: C::Ctx, ctx: &TowerCtx, m: u32, exponent: i64) -> TowerElement<C> {
        let e64 = ctx.pm(ctx.m_amb - m) as i64;
        TowerElement::monomial(cctx, ctx, TowerMono::gen_s(e64 * exponent), C::from_i64(cctx, 1))
    }
}

/// Generator images for the Galois substitution determined by
/// `(chi, c, eta)`: `zeta -> zeta^chi`, `P -> zeta^c * P`,
/// `(1 + P hc) -> zeta^eta * (1 + P hc)`, `S -> S`.
pub struct GaloisTowerMaps<C: TowerCoeff> {
    pub images: GeneratorImages<C>,
}

impl<C: TowerCoeff> GaloisTowerMaps<C> {
    pub fn new(cctx: C::Ctx, ctx: &TowerCtx, chi: u64, c: u64, eta: u64) -> Result<Self> {
        if chi % ctx.p == 0 {
            return Err(CoreError::NonCocycle("chi must be a unit".into()));
        }
        let q = ctx.q as u64;
        let zeta = Designated::zeta_top::<C>(cctx, ctx);
        let one = TowerElement::from_i64(cctx, 1);
        // g(1 + P*om) = zeta^chi with g(P) = zeta^c P forces
        // g(om) = zeta^{-c} (zeta^chi - 1)/P.
        let zeta_minus_c = zeta.pow((q - c % q) % q, ctx);
        let g_om = zeta_minus_c
            .mul(&zeta.pow(chi % q, ctx).sub(&one), ctx)
            .div_ppow(1, ctx)?;
        // g(up) = g(om)^{p-1} / g(P) = zeta^{-c} g(om)^{p-1} / P
        let g_up = zeta_minus_c
            .mul(&g_om.pow(ctx.p - 1, ctx), ctx)
            .div_ppow(1, ctx)?;
        // g(P) = zeta^c * P
        let pgen = TowerElement::monomial(cctx, ctx, TowerMono::gen_p(1), C::from_i64(cctx, 1));
        let g_pe = zeta.pow(c % q, ctx).mul(&pgen, ctx);
        // g(1 + P*hc) = zeta^eta (1 + P hc), so
        // g(hc) = zeta^{-c} (zeta^eta (1 + P hc) - 1)/P.
        let mut h_root = TowerElement::from_i64(cctx, 1);
        h_root.accumulate(
            ctx,
            TowerMono { om: 0, up: 0, hc: 1, pe: 1, se: 0 },
            C::from_i64(cctx, 1),
        );
        let g_hc = zeta_minus_c
            .mul(&zeta.pow(eta % q, ctx).mul(&h_root, ctx).sub(&one), ctx)
            .div_ppow(1, ctx)?;
        let g_se = TowerElement::monomial(cctx, ctx, TowerMono::gen_s(1), C::from_i64(cctx, 1));
        let g_se_inv = TowerElement::monomial(cctx, ctx, TowerMono::gen_s(-1), C::from_i64(cctx, 1));
        Ok(GaloisTowerMaps {
            images: GeneratorImages {
                om: g_om,
                up: g_up,
                hc: g_hc,
                pe: g_pe,
                se: g_se,
                se_inv: g_se_inv,
            },
        })
    }

    pub fn apply(&self, x: &TowerElement<C>, ctx: &TowerCtx) -> TowerElement<C> {
        x.map_generators(ctx, &self.images)
    }
}

impl<C: TowerCoeff> fmt::Display for TowerElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c:?}*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
