//! Truncated Witt vectors over the tilt: the finite-precision model of the
//! infinitesimal period ring, with the theta map, the sharp map, and exact
//! division by the distinguished kernel generator `xi = [pflat] - p`.

use crate::error::{CoreError, Result};
use crate::tilt::{TiltElement, TiltMonoid};
use crate::tower::{TowerCoeff, TowerCtx, TowerElement, Zm};
use crate::witt::{witt_laws, WittLaws};
use num_bigint::BigInt;
use std::sync::Arc;

/// Length-`len` Witt vector of tilt elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInfElement {
    pub slots: Vec<TiltElement>,
}

/// Shared handles for Witt arithmetic at one `(p, len, depth)`.
#[derive(Clone)]
pub struct WittCtx {
    pub tower: Arc<TowerCtx>,
    pub laws: Arc<WittLaws>,
    pub depth: u32,
}

impl WittCtx {
    pub fn new(p: u64, len: usize, depth: u32, m_amb: u32) -> Result<Self> {
        if depth + 1 > m_amb + 1 {
            return Err(CoreError::InvalidContext(
                "tilt depth exceeds ambient level".into(),
            ));
        }
        Ok(WittCtx {
            tower: Arc::new(TowerCtx::new(p, m_amb)?),
            laws: witt_laws(p, len)?,
            depth,
        })
    }

    pub fn p(&self) -> u64 {
        self.laws.p
    }

    pub fn len(&self) -> usize {
        self.laws.len
    }

    /// Effective theta precision: `min(len, depth + 1)` p-adic digits.
    pub fn theta_precision(&self) -> u32 {
        (self.laws.len as u32).min(self.depth + 1)
    }
}

impl AInfElement {
    pub fn zero(w: &WittCtx) -> Self {
        AInfElement { slots: vec![TiltElement::zero(w.p(), w.depth); w.len()] }
    }

    pub fn one(w: &WittCtx) -> Self {
        let mut z = Self::zero(w);
        z.slots[0] = TiltElement::one(w.p(), w.depth);
        z
    }

    /// Teichmueller lift: coordinates `(x, 0, ..., 0)`.
    pub fn teichmuller(x: TiltElement, w: &WittCtx) -> Self {
        let mut z = Self::zero(w);
        z.slots[0] = x;
        z
    }

    /// `-1` as a Witt vector: the Teichmueller lift of `-1` for odd `p`,
    /// the all-ones vector for `p = 2`.
    pub fn minus_one(w: &WittCtx) -> Self {
        if w.p() == 2 {
            AInfElement { slots: vec![TiltElement::one(2, w.depth); w.len()] }
        } else {
            Self::teichmuller(TiltElement::constant(w.p(), w.depth, -1), w)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(|s| s.is_zero())
    }

    pub fn add(&self, other: &Self, w: &WittCtx) -> Self {
        let len = w.len();
        let depth = w.depth as usize;
        let mut out = Self::zero(w);
        // componentwise per tuple level: the tilt ring operations are
        // componentwise, so the universal polynomials evaluate levelwise
        for m in 0..=depth {
            let args: Vec<TowerElement<Zm>> = self
                .slots
                .iter()
                .map(|s| s.comps[m].clone())
                .chain(other.slots.iter().map(|s| s.comps[m].clone()))
                .collect();
            for i in 0..len {
                out.slots[i].comps[m] = w.laws.sum[i].eval(&args, &w.tower, w.p());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self, w: &WittCtx) -> Self {
        let len = w.len();
        let depth = w.depth as usize;
        let mut out = Self::zero(w);
        for m in 0..=depth {
            let args: Vec<TowerElement<Zm>> = self
                .slots
                .iter()
                .map(|s| s.comps[m].clone())
                .chain(other.slots.iter().map(|s| s.comps[m].clone()))
                .collect();
            for i in 0..len {
                out.slots[i].comps[m] = w.laws.prod[i].eval(&args, &w.tower, w.p());
            }
        }
        out
    }

    pub fn neg(&self, w: &WittCtx) -> Self {
        if w.p() == 2 {
            self.mul(&Self::minus_one(w), w)
        } else {
            AInfElement { slots: self.slots.iter().map(|s| s.neg()).collect() }
        }
    }

    pub fn sub(&self, other: &Self, w: &WittCtx) -> Self {
        self.add(&other.neg(w), w)
    }

    /// Witt vector Frobenius (functorial lift of `x -> x^p`): slotwise tilt
    /// Frobenius on a perfect-model coefficient ring.
    pub fn frobenius(&self, w: &WittCtx) -> Self {
        AInfElement { slots: self.slots.iter().map(|s| s.frobenius(&w.tower)).collect() }
    }

    /// Verschiebung shift by `k`.
    pub fn vshift(&self, k: usize, w: &WittCtx) -> Self {
        let mut out = Self::zero(w);
        for i in 0..w.len().saturating_sub(k) {
            out.slots[i + k] = self.slots[i].clone();
        }
        out
    }

    /// Multiplication by `p`: `V(F(x))`, exact.
    pub fn mul_p(&self, w: &WittCtx) -> Self {
        self.frobenius(w).vshift(1, w)
    }

    /// Multiplication by a small nonnegative integer scalar via p-adic
    /// digits.
    pub fn mul_scalar(&self, a: u64, w: &WittCtx) -> Self {
        let mut out = Self::zero(w);
        let mut shifted = self.clone();
        let mut a = a;
        for _ in 0..w.len() {
            if a == 0 {
                break;
            }
            let digit = a % w.p();
            for _ in 0..digit {
                out = out.add(&shifted, w);
            }
            shifted = shifted.mul_p(w);
            a /= w.p();
        }
        out
    }

    /// `xi = [pflat] - p`.
    pub fn xi(w: &WittCtx) -> Result<Self> {
        let pf = TiltMonoid::pflat(&w.tower, w.depth)?;
        let p_elem = Self::one(w).mul_p(w);
        Ok(Self::teichmuller(pf, w).sub(&p_elem, w))
    }

    /// Sharp map on a tilt element: lift the top component to `p^k` digits
    /// and raise it to `p^depth`. Valid modulo `p^{min(k, depth+1)}`.
    pub fn sharp(x: &TiltElement, k: u32, w: &WittCtx) -> TowerElement<Zm> {
        Self::sharp_shifted(x, k, 0, w)
    }

    /// Sharp of the `p^shift`-th root of a tilt element, read off its top
    /// component: `lift(x_depth)^{p^{depth - shift}}`. Valid modulo
    /// `p^{min(k, depth - shift + 1)}`.
    fn sharp_shifted(x: &TiltElement, k: u32, shift: u32, w: &WittCtx) -> TowerElement<Zm> {
        let modulus = w.p().pow(k);
        let depth = x.depth();
        debug_assert!(shift <= depth);
        let mut lift = TowerElement::zero(modulus);
        for (mono, c) in &x.comps[depth as usize].terms {
            lift.terms.insert(*mono, Zm { v: c.v, m: modulus });
        }
        lift.pow(w.p().pow(depth - shift), &w.tower)
    }

    /// Theta: for Witt coordinates `(x_0, x_1, ...)` the Teichmueller digits
    /// are `y_i = x_i^{1/p^i}`, so
    /// `theta = sum_i p^i * lift(x_i at top level)^{p^{depth-i}}`,
    /// valid modulo `p^{min(k, depth+1)}` when `k` digits are requested.
    pub fn theta(&self, k: u32, w: &WittCtx) -> TowerElement<Zm> {
        let modulus = w.p().pow(k);
        let mut acc = TowerElement::zero(modulus);
        for (i, slot) in self.slots.iter().enumerate() {
            if i as u32 >= k || i as u32 > w.depth {
                break;
            }
            let term = Self::sharp_shifted(slot, k, i as u32, w).mul_p_pow(i as u32, &w.tower);
            acc = acc.add(&term);
        }
        acc
    }

    /// Exact division by `xi`, the mod-p peel-off done slotwise and
    /// root-free: the `k`-th output slot is `d_k / pflat^{p^k}` where `d`
    /// is the running remainder.
    pub fn divide_by_xi(&self, w: &WittCtx) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let prec = w.theta_precision();
        if !self.theta(prec, w).is_zero() {
            return Err(CoreError::NotInKernel);
        }
        let xi = Self::xi(w)?;
        let mut d = self.clone();
        let mut out = Self::zero(w);
        for k in 0..w.len() {
            if d.is_zero() {
                break;
            }
            let ck = &d.slots[k];
            let q_k = if ck.is_zero() {
                TiltElement::zero(w.p(), w.depth)
            } else {
                ck.div_pflat(w.p().pow(k as u32), &w.tower)?
            };
            out.slots[k] = q_k.clone();
            // subtract xi * V^k([q_k])
            let correction = xi.mul(&Self::teichmuller(q_k, w).vshift(k, w), w);
            d = d.sub(&correction, w);
            for s in d.slots.iter().take(k + 1) {
                if !s.is_zero() {
                    return Err(CoreError::TiltDivisionFailure(format!(
                        "peel-off left a nonzero slot at index <= {k}"
                    )));
                }
            }
        }
        if !d.is_zero() {
            return Err(CoreError::PrecisionExhausted(
                "remainder after all Witt slots were peeled".into(),
            ));
        }
        Ok(out)
    }

    /// Stable debug dump: Witt coordinates as nested lists of
    /// monomial -> residue maps.
    pub fn debug_dump(&self) -> String {
        let slots: Vec<serde_json::Value> = self
            .slots
            .iter()
            .map(|slot| {
                let comps: Vec<serde_json::Value> = slot
                    .comps
                    .iter()
                    .map(|c| {
                        let terms: Vec<serde_json::Value> = c
                            .terms
                            .iter()
                            .map(|(m, z)| {
                                serde_json::json!({ "monomial": m.to_string(), "residue": z.v })
                            })
                            .collect();
                        serde_json::Value::Array(terms)
                    })
                    .collect();
                serde_json::Value::Array(comps)
            })
            .collect();
        serde_json::Value::Array(slots).to_string()
    }
}

/// Exact ghost-component oracle: computes Witt sums/products by lifting the
/// components to exact integer coefficients, working with ghost vectors, and
/// back-solving the triangular ghost relations with exact division. Entirely
/// independent of the universal polynomial tables.
pub struct GhostOracle;

impl GhostOracle {
    fn lift(x: &TowerElement<Zm>) -> TowerElement<BigInt> {
        let mut out = TowerElement::zero(());
        for (m, c) in &x.terms {
            out.terms.insert(*m, BigInt::from(c.v));
        }
        out
    }

    fn reduce(x: &TowerElement<BigInt>, p: u64, ctx: &TowerCtx) -> TowerElement<Zm> {
        let mut out = TowerElement::zero(p);
        for (m, c) in &x.terms {
            let z = Zm::from_bigint(p, c);
            if !TowerCoeff::is_zero(&z) {
                out.accumulate(ctx, *m, z);
            }
        }
        out
    }

    fn ghosts(slots: &[TowerElement<BigInt>], p: u64, ctx: &TowerCtx) -> Vec<TowerElement<BigInt>> {
        let len = slots.len();
        (0..len)
            .map(|n| {
                let mut acc = TowerElement::zero(());
                for (i, s) in slots.iter().enumerate().take(n + 1) {
                    let t = s
                        .pow(p.pow((n - i) as u32), ctx)
                        .mul_p_pow(i as u32, ctx);
                    acc = acc.add(&t);
                }
                acc
            })
            .collect()
    }

    fn unghost(ghosts: &[TowerElement<BigInt>], p: u64, ctx: &TowerCtx) -> Result<Vec<TowerElement<BigInt>>> {
        let len = ghosts.len();
        let mut slots: Vec<TowerElement<BigInt>> = Vec::with_capacity(len);
        for n in 0..len {
            let mut rem = ghosts[n].clone();
            for (i, z) in slots.iter().enumerate().take(n) {
                let t = z.pow(p.pow((n - i) as u32), ctx).mul_p_pow(i as u32, ctx);
                rem = rem.sub(&t);
            }
            slots.push(rem.div_p_pow(n as u32, ctx).map_err(|_| {
                CoreError::TiltDivisionFailure("ghost back-solve division was inexact".into())
            })?);
        }
        Ok(slots)
    }

    fn binop(x: &AInfElement, y: &AInfElement, w: &WittCtx, product: bool) -> Result<AInfElement> {
        let ctx = &w.tower;
        let p = w.p();
        let mut out = AInfElement::zero(w);
        for m in 0..=w.depth as usize {
            let xs: Vec<TowerElement<BigInt>> =
                x.slots.iter().map(|s| Self::lift(&s.comps[m])).collect();
            let ys: Vec<TowerElement<BigInt>> =
                y.slots.iter().map(|s| Self::lift(&s.comps[m])).collect();
            let gx = Self::ghosts(&xs, p, ctx);
            let gy = Self::ghosts(&ys, p, ctx);
            let gz: Vec<TowerElement<BigInt>> = gx
                .iter()
                .zip(&gy)
                .map(|(a, b)| if product { a.mul(b, ctx) } else { a.add(b) })
                .collect();
            let zs = Self::unghost(&gz, p, ctx)?;
            for (i, z) in zs.iter().enumerate() {
                out.slots[i].comps[m] = Self::reduce(z, p, ctx);
            }
        }
        Ok(out)
    }

    pub fn add(x: &AInfElement, y: &AInfElement, w: &WittCtx) -> Result<AInfElement> {
        Self::binop(x, y, w, false)
    }

    pub fn mul(x: &AInfElement, y: &AInfElement, w: &WittCtx) -> Result<AInfElement> {
        Self::binop(x, y, w, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wctx(p: u64, len: usize) -> WittCtx {
        WittCtx::new(p, len, 2, 3).unwrap()
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let w = wctx(3, 3);
        let a = TiltMonoid::eps(&w.tower, 2).unwrap();
        let b = TiltMonoid::hflat(&w.tower, 2).unwrap();
        let lhs = AInfElement::teichmuller(a.clone(), &w).mul(&AInfElement::teichmuller(b.clone(), &w), &w);
        let rhs = AInfElement::teichmuller(a.mul(&b, &w.tower), &w);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn eps_times_eps_inverse_is_one() {
        let w = wctx(3, 3);
        let e = TiltMonoid::eps_pow(&w.tower, 2, 1, 0).unwrap();
        let einv = TiltMonoid::eps_pow(&w.tower, 2, -1, 0).unwrap();
        let prod = AInfElement::teichmuller(e, &w).mul(&AInfElement::teichmuller(einv, &w), &w);
        assert_eq!(prod, AInfElement::one(&w));
    }

    #[test]
    fn minus_one_works_for_p2() {
        let w = wctx(2, 3);
        let m1 = AInfElement::minus_one(&w);
        let sum = AInfElement::one(&w).add(&m1, &w);
        assert!(sum.is_zero());
    }

    #[test]
    fn frobenius_commutes_with_teichmuller() {
        let w = wctx(3, 3);
        let x = TiltMonoid::hflat(&w.tower, 2).unwrap();
        let lhs = AInfElement::teichmuller(x.clone(), &w).frobenius(&w);
        let rhs = AInfElement::teichmuller(x.pow(3, &w.tower), &w);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn theta_of_xi_is_zero_and_theta_of_p_eps() {
        let w = wctx(3, 3);
        let xi = AInfElement::xi(&w).unwrap();
        let prec = w.theta_precision();
        assert!(xi.theta(prec, &w).is_zero());
        // theta(p * [eps]) = p
        let pe = AInfElement::teichmuller(TiltMonoid::eps(&w.tower, 2).unwrap(), &w).mul_p(&w);
        let t = pe.theta(prec, &w);
        assert_eq!(t, TowerElement::from_i64(w.p().pow(prec), 3));
    }

    #[test]
    fn sharp_examples() {
        let w = wctx(3, 3);
        let prec = w.theta_precision();
        // sharp(pflat) = p
        let pf = TiltMonoid::pflat(&w.tower, 2).unwrap();
        assert_eq!(
            AInfElement::sharp(&pf, prec, &w),
            TowerElement::from_i64(w.p().pow(prec), 3)
        );
        // sharp(eps) = 1
        let eps = TiltMonoid::eps(&w.tower, 2).unwrap();
        assert_eq!(
            AInfElement::sharp(&eps, prec, &w),
            TowerElement::from_i64(w.p().pow(prec), 1)
        );
        // sharp(hflat) = 1 + p*T = 1 + p*S^q
        let hf = TiltMonoid::hflat(&w.tower, 2).unwrap();
        let sharp_h = AInfElement::sharp(&hf, prec, &w);
        let modulus = w.p().pow(prec);
        let mut expect = TowerElement::from_i64(modulus, 1);
        expect.accumulate(
            &w.tower,
            crate::tower::TowerMono::gen_s(w.tower.q as i64),
            Zm::from_i64(modulus, 3),
        );
        assert_eq!(sharp_h, expect);
    }

    #[test]
    fn theta_of_hflat_minus_one() {
        // theta([hflat] - 1) = pT
        let w = wctx(3, 3);
        let prec = w.theta_precision();
        let hf = AInfElement::teichmuller(TiltMonoid::hflat(&w.tower, 2).unwrap(), &w);
        let x = hf.sub(&AInfElement::one(&w), &w);
        let t = x.theta(prec, &w);
        let modulus = w.p().pow(prec);
        let mut expect = TowerElement::zero(modulus);
        expect.accumulate(
            &w.tower,
            crate::tower::TowerMono::gen_s(w.tower.q as i64),
            Zm::from_i64(modulus, 3),
        );
        assert_eq!(t, expect);
    }

    #[test]
    fn divide_xi_by_xi() {
        let w = wctx(3, 3);
        let xi = AInfElement::xi(&w).unwrap();
        let q = xi.divide_by_xi(&w).unwrap();
        assert_eq!(q, AInfElement::one(&w));
        // and zero
        assert!(AInfElement::zero(&w).divide_by_xi(&w).unwrap().is_zero());
    }

    #[test]
    fn divide_eps_minus_one_roundtrip() {
        for p in [2u64, 3] {
            let w = wctx(p, 3);
            let e = AInfElement::teichmuller(TiltMonoid::eps(&w.tower, 2).unwrap(), &w);
            let x = e.sub(&AInfElement::one(&w), &w);
            let y = x.divide_by_xi(&w).unwrap();
            let xi = AInfElement::xi(&w).unwrap();
            assert_eq!(xi.mul(&y, &w), x, "multiply-back failed at p={p}");
        }
    }

    #[test]
    fn non_kernel_rejected() {
        let w = wctx(3, 3);
        let one = AInfElement::one(&w);
        assert!(matches!(one.divide_by_xi(&w), Err(CoreError::NotInKernel)));
    }

    #[test]
    fn tables_match_ghost_oracle_on_designated() {
        for p in [2u64, 3] {
            let w = wctx(p, 3);
            let a = AInfElement::teichmuller(TiltMonoid::eps(&w.tower, 2).unwrap(), &w)
                .add(&AInfElement::one(&w).mul_p(&w), &w);
            let b = AInfElement::teichmuller(TiltMonoid::hflat(&w.tower, 2).unwrap(), &w);
            assert_eq!(a.add(&b, &w), GhostOracle::add(&a, &b, &w).unwrap());
            assert_eq!(a.mul(&b, &w), GhostOracle::mul(&a, &b, &w).unwrap());
        }
    }

    #[test]
    fn debug_dump_is_stable() {
        let w = wctx(3, 2);
        let x = AInfElement::teichmuller(TiltMonoid::pflat(&w.tower, 2).unwrap(), &w);
        let d1 = x.debug_dump();
        let d2 = x.debug_dump();
        assert_eq!(d1, d2);
        assert!(d1.contains("monomial"));
    }
}
