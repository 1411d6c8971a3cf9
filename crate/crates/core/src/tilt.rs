//! Tilt elements: compatible p-power-root tuples at finite depth.
//!
//! A [`TiltElement`] of depth `d` stores components `x_0, ..., x_d` in the
//! residue tower ring (coefficients mod `p`) with `x_{m+1}^p = x_m`. Ring
//! operations are componentwise; the Frobenius is exact. The distinguished
//! elements `eps`, `pflat`, `hflat`, `tflat` are built from the designated
//! root systems of the tower and carry exact fractional exponents.

use crate::error::{CoreError, Result};
use crate::tower::{Designated, TowerCtx, TowerElement, Zm};
use num_rational::Ratio;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiltElement {
    /// components at levels `0..=depth`, coefficients mod `p`
    pub comps: Vec<TowerElement<Zm>>,
}

impl TiltElement {
    pub fn depth(&self) -> u32 {
        (self.comps.len() - 1) as u32
    }

    pub fn zero(p: u64, depth: u32) -> Self {
        TiltElement { comps: vec![TowerElement::zero(p); depth as usize + 1] }
    }

    pub fn one(p: u64, depth: u32) -> Self {
        TiltElement { comps: vec![TowerElement::from_i64(p, 1); depth as usize + 1] }
    }

    pub fn constant(p: u64, depth: u32, x: i64) -> Self {
        // constants of F_p are fixed by Frobenius
        TiltElement { comps: vec![TowerElement::from_i64(p, x); depth as usize + 1] }
    }

    /// Build from a free choice of top component: lower levels are filled by
    /// the Frobenius, so compatibility holds by construction.
    pub fn from_top(top: TowerElement<Zm>, depth: u32, ctx: &TowerCtx) -> Self {
        let mut comps = vec![top; depth as usize + 1];
        for m in (0..depth as usize).rev() {
            comps[m] = comps[m + 1].frobenius_mod_p(ctx);
        }
        TiltElement { comps }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Verify `x_{m+1}^p = x_m` on all levels.
    pub fn check_compatible(&self, ctx: &TowerCtx) -> bool {
        self.comps
            .windows(2)
            .all(|w| w[1].frobenius_mod_p(ctx) == w[0])
    }

    pub fn add(&self, other: &Self, _ctx: &TowerCtx) -> Self {
        assert_eq!(self.comps.len(), other.comps.len());
        TiltElement {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TiltElement { comps: self.comps.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, other: &Self, ctx: &TowerCtx) -> Self {
        self.add(&other.neg(), ctx)
    }

    pub fn mul(&self, other: &Self, ctx: &TowerCtx) -> Self {
        assert_eq!(self.comps.len(), other.comps.len());
        TiltElement {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.mul(b, ctx))
                .collect(),
        }
    }

    pub fn pow(&self, e: u64, ctx: &TowerCtx) -> Self {
        TiltElement { comps: self.comps.iter().map(|c| c.pow(e, ctx)).collect() }
    }

    /// The tilt Frobenius `x -> x^p`, exact.
    pub fn frobenius(&self, ctx: &TowerCtx) -> Self {
        TiltElement { comps: self.comps.iter().map(|c| c.frobenius_mod_p(ctx)).collect() }
    }

    /// Division by `pflat^j` for an integer `j >= 1`. Levels `m` with
    /// `p^m > j` divide directly by the monomial `P^{j p^{m_amb - m}}`; lower
    /// levels (where the divisor component vanishes mod p) are re-derived by
    /// the Frobenius from the level above.
    pub fn div_pflat(&self, j: u64, ctx: &TowerCtx) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let depth = self.depth();
        let mut comps = vec![TowerElement::zero(ctx.p); depth as usize + 1];
        let mut top_done: Option<usize> = None;
        for m in (0..=depth as usize).rev() {
            if ctx.p.pow(m as u32) > j {
                let shift = j * ctx.pm(ctx.m_amb - m as u32);
                comps[m] = self.comps[m].div_ppow(shift, ctx).map_err(|_| {
                    CoreError::TiltDivisionFailure(format!(
                        "pflat^{j} does not divide the level-{m} component"
                    ))
                })?;
                if top_done.is_none() {
                    top_done = Some(m);
                }
            } else {
                // divisor vanishes at this level; use compatibility
                comps[m] = comps[m + 1].frobenius_mod_p(ctx);
            }
        }
        if top_done.is_none() {
            return Err(CoreError::PrecisionExhausted(format!(
                "tilt depth {depth} cannot divide by pflat^{j}"
            )));
        }
        Ok(TiltElement { comps })
    }

    /// Valuation of a tilt element read off the top component, in units
    /// where `v(pflat) = 1`: `v = p^depth * (min monomial valuation)`.
    /// (`up`, `hc`, `S` are units; `v(om) = 1/phi - 1/q`.)
    pub fn flat_valuation(&self, ctx: &TowerCtx) -> Option<Ratio<i64>> {
        let depth = self.depth();
        let top = &self.comps[depth as usize];
        let v_omega = Ratio::new(1i64, ctx.phi as i64) - Ratio::new(1i64, ctx.q as i64);
        top.terms
            .keys()
            .map(|m| {
                Ratio::new(m.pe as i64, ctx.q as i64) + Ratio::new(m.om as i64, 1) * v_omega
            })
            .min()
            .map(|v| v * Ratio::new(ctx.p.pow(depth) as i64, 1))
    }
}

/// Distinguished tilt monoid: `eps^(a/p^k) pflat^(b/p^k) hflat^(c/p^k)
/// tflat^(d/p^k)` with exact exponent bookkeeping. Constructing a tuple
/// requires `depth + k <= m_amb`.
pub struct TiltMonoid;

impl TiltMonoid {
    fn check_depth(depth: u32, k: u32, ctx: &TowerCtx) -> Result<()> {
        if depth + k > ctx.m_amb {
            return Err(CoreError::PrecisionExhausted(format!(
                "root depth {depth}+{k} exceeds ambient level {}",
                ctx.m_amb
            )));
        }
        Ok(())
    }

    /// `eps^(a/p^k)`: component at level m is `zeta_{p^{m+k}}^a`.
    pub fn eps_pow(ctx: &TowerCtx, depth: u32, a: i64, k: u32) -> Result<TiltElement> {
        Self::check_depth(depth, k, ctx)?;
        let comps = (0..=depth)
            .map(|m| {
                let level = m + k;
                let order = ctx.pm(level) as i64;
                let e = a.rem_euclid(order) as u64;
                Designated::zeta::<Zm>(ctx.p, ctx, level).pow(e, ctx)
            })
            .collect();
        Ok(TiltElement { comps })
    }

    /// `pflat^(b/p^k)` for `b >= 0`.
    pub fn pflat_pow(ctx: &TowerCtx, depth: u32, b: u64, k: u32) -> Result<TiltElement> {
        Self::check_depth(depth, k, ctx)?;
        let comps = (0..=depth)
            .map(|m| Designated::root_p::<Zm>(ctx.p, ctx, m + k).pow(b, ctx))
            .collect();
        Ok(TiltElement { comps })
    }

    /// `hflat^(c/p^k)` for `c >= 0`.
    pub fn hflat_pow(ctx: &TowerCtx, depth: u32, c: u64, k: u32) -> Result<TiltElement> {
        Self::check_depth(depth, k, ctx)?;
        let comps = (0..=depth)
            .map(|m| Designated::root_h::<Zm>(ctx.p, ctx, m + k).pow(c, ctx))
            .collect();
        Ok(TiltElement { comps })
    }

    /// `tflat^(d/p^k)`, any integer `d` (the circle coordinate is a unit).
    pub fn tflat_pow(ctx: &TowerCtx, depth: u32, d: i64, k: u32) -> Result<TiltElement> {
        Self::check_depth(depth, k, ctx)?;
        let comps = (0..=depth)
            .map(|m| Designated::root_t::<Zm>(ctx.p, ctx, m + k, d))
            .collect();
        Ok(TiltElement { comps })
    }

    pub fn eps(ctx: &TowerCtx, depth: u32) -> Result<TiltElement> {
        Self::eps_pow(ctx, depth, 1, 0)
    }

    pub fn pflat(ctx: &TowerCtx, depth: u32) -> Result<TiltElement> {
        Self::pflat_pow(ctx, depth, 1, 0)
    }

    pub fn hflat(ctx: &TowerCtx, depth: u32) -> Result<TiltElement> {
        Self::hflat_pow(ctx, depth, 1, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx3() -> TowerCtx {
        TowerCtx::new(3, 3).unwrap()
    }

    #[test]
    fn designated_tuples_are_compatible() {
        let ctx = ctx3();
        for t in [
            TiltMonoid::eps(&ctx, 2).unwrap(),
            TiltMonoid::pflat(&ctx, 2).unwrap(),
            TiltMonoid::hflat(&ctx, 2).unwrap(),
            TiltMonoid::eps_pow(&ctx, 1, 5, 1).unwrap(),
            TiltMonoid::tflat_pow(&ctx, 2, -2, 0).unwrap(),
        ] {
            assert!(t.check_compatible(&ctx));
        }
    }

    #[test]
    fn eps_bottom_component_is_one() {
        let ctx = ctx3();
        let eps = TiltMonoid::eps(&ctx, 2).unwrap();
        assert_eq!(eps.comps[0], TowerElement::from_i64(3, 1));
        assert_ne!(eps.comps[1], TowerElement::from_i64(3, 1));
    }

    #[test]
    fn from_top_random_is_compatible() {
        let ctx = ctx3();
        let mut top = TowerElement::zero(3);
        top.accumulate(&ctx, crate::tower::TowerMono { om: 1, up: 1, hc: 1, pe: 3, se: -1 }, Zm { v: 2, m: 3 });
        top.accumulate(&ctx, crate::tower::TowerMono { om: 0, up: 0, hc: 0, pe: 1, se: 2 }, Zm { v: 1, m: 3 });
        let t = TiltElement::from_top(top, 2, &ctx);
        assert!(t.check_compatible(&ctx));
    }

    #[test]
    fn eps_minus_one_divides_by_pflat() {
        let ctx = ctx3();
        let eps = TiltMonoid::eps(&ctx, 2).unwrap();
        let num = eps.sub(&TiltElement::one(3, 2), &ctx);
        let q = num.div_pflat(1, &ctx).unwrap();
        assert!(q.check_compatible(&ctx));
        let back = q.mul(&TiltMonoid::pflat(&ctx, 2).unwrap(), &ctx);
        assert_eq!(back, num);
    }

    #[test]
    fn hflat_minus_one_divides_by_pflat() {
        let ctx = ctx3();
        let h = TiltMonoid::hflat(&ctx, 2).unwrap();
        let num = h.sub(&TiltElement::one(3, 2), &ctx);
        let q = num.div_pflat(1, &ctx).unwrap();
        let back = q.mul(&TiltMonoid::pflat(&ctx, 2).unwrap(), &ctx);
        assert_eq!(back, num);
    }

    #[test]
    fn pflat_valuation_is_one() {
        let ctx = ctx3();
        let pf = TiltMonoid::pflat(&ctx, 2).unwrap();
        assert_eq!(pf.flat_valuation(&ctx), Some(Ratio::new(1, 1)));
        let eps_m1 = TiltMonoid::eps(&ctx, 2)
            .unwrap()
            .sub(&TiltElement::one(3, 2), &ctx);
        // v(eps - 1) = p/(p-1)
        assert_eq!(eps_m1.flat_valuation(&ctx), Some(Ratio::new(3, 2)));
    }

    #[test]
    fn monoid_multiplicativity() {
        let ctx = ctx3();
        let a = TiltMonoid::eps_pow(&ctx, 2, 2, 1).unwrap();
        let b = TiltMonoid::eps_pow(&ctx, 2, 4, 1).unwrap();
        let prod = a.mul(&b, &ctx);
        let direct = TiltMonoid::eps_pow(&ctx, 2, 6, 1).unwrap();
        assert_eq!(prod, direct);
        // eps^{1/3} * eps^{2/3} = eps
        let c = TiltMonoid::eps_pow(&ctx, 2, 1, 1).unwrap();
        let d = TiltMonoid::eps_pow(&ctx, 2, 2, 1).unwrap();
        assert_eq!(c.mul(&d, &ctx), TiltMonoid::eps(&ctx, 2).unwrap());
    }
}
