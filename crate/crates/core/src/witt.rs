//! Universal p-typical Witt vector arithmetic.
//!
//! The sum and product of length-`len` Witt vectors are given by universal
//! integer polynomials `S_0..S_{len-1}`, `P_0..P_{len-1}` in the coordinates
//! `x_0..x_{len-1}, y_0..y_{len-1}`, characterized by the ghost identities
//! `w_n(S) = w_n(x) + w_n(y)` and `w_n(P) = w_n(x) * w_n(y)` where
//! `w_n(z) = sum_{i<=n} p^i z_i^{p^{n-i}}`.
//!
//! The tables are derived once per `(p, len)` by the ghost recursion over
//! exact rationals; integrality of the result is asserted before the table
//! is cached for the session.

use crate::error::{CoreError, Result};
use crate::tower::{TowerCoeff, TowerCtx, TowerElement};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Default maximum Witt length for table generation.
pub const MAX_WITT_LEN: usize = 4;

/// Exact multivariate polynomial over the rationals, used only during table
/// derivation.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct QPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl QPoly {
    pub(crate) fn zero(nvars: usize) -> Self {
        QPoly { nvars, terms: BTreeMap::new() }
    }

    pub(crate) fn var(i: usize, nvars: usize) -> Self {
        let mut exps = vec![0u32; nvars];
        exps[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, BigRational::one());
        QPoly { nvars, terms }
    }

    pub(crate) fn insert(&mut self, exps: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub(crate) fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), -c.clone());
        }
        out
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        let mut out = QPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exps: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(exps, c1 * c2);
            }
        }
        out
    }

    pub(crate) fn pow(&self, mut e: u64) -> Self {
        let mut acc = QPoly::zero(self.nvars);
        acc.insert(vec![0; self.nvars], BigRational::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub(crate) fn scale(&self, c: &BigRational) -> Self {
        let mut out = QPoly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a * c);
        }
        out
    }

    pub(crate) fn into_int(self) -> Result<WittPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in self.terms {
            if !c.denom().is_one() {
                return Err(CoreError::InvalidContext(
                    "Witt law polynomial is not integral".into(),
                ));
            }
            terms.push((e, c.numer().clone()));
        }
        Ok(WittPoly { terms })
    }
}

/// Integer polynomial in `x_0..x_{len-1}, y_0..y_{len-1}` (variables indexed
/// `0..2 len`).
#[derive(Clone, Debug, PartialEq)]
pub struct WittPoly {
    pub terms: Vec<(Vec<u32>, BigInt)>,
}

impl WittPoly {
    /// Evaluate over any coefficient ring hosted by the tower model.
    pub fn eval<C: TowerCoeff>(
        &self,
        args: &[TowerElement<C>],
        ctx: &TowerCtx,
        cctx: C::Ctx,
    ) -> TowerElement<C> {
        // memoized powers per variable
        let mut pows: Vec<BTreeMap<u32, TowerElement<C>>> = vec![BTreeMap::new(); args.len()];
        let mut out = TowerElement::zero(cctx);
        for (exps, coeff) in &self.terms {
            let mut term = TowerElement::from_i64(cctx, 1).scale(&C::from_bigint(cctx, coeff));
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if term.is_zero() {
                    break;
                }
                let pw = pows[i]
                    .entry(e)
                    .or_insert_with(|| args[i].pow(e as u64, ctx))
                    .clone();
                term = term.mul(&pw, ctx);
            }
            out = out.add(&term);
        }
        out
    }
}

/// Cached sum/product tables for one `(p, len)`.
#[derive(Debug)]
pub struct WittLaws {
    pub p: u64,
    pub len: usize,
    pub sum: Vec<WittPoly>,
    pub prod: Vec<WittPoly>,
}

pub(crate) fn ghost(vars: &[QPoly], n: usize, p: u64) -> QPoly {
    // w_n = sum_{i<=n} p^i vars[i]^{p^{n-i}}
    let nvars = vars[0].nvars;
    let mut acc = QPoly::zero(nvars);
    for (i, v) in vars.iter().enumerate().take(n + 1) {
        let c = BigRational::from(BigInt::from(p).pow(i as u32));
        acc = acc.add(&v.pow(p.pow((n - i) as u32) as u64).scale(&c));
    }
    acc
}

fn derive_laws(p: u64, len: usize) -> Result<WittLaws> {
    let nvars = 2 * len;
    let xs: Vec<QPoly> = (0..len).map(|i| QPoly::var(i, nvars)).collect();
    let ys: Vec<QPoly> = (0..len).map(|i| QPoly::var(len + i, nvars)).collect();

    let mut sum_q: Vec<QPoly> = Vec::with_capacity(len);
    let mut prod_q: Vec<QPoly> = Vec::with_capacity(len);
    for n in 0..len {
        let gx = ghost(&xs, n, p);
        let gy = ghost(&ys, n, p);
        let mut s = gx.add(&gy);
        let mut pr = gx.mul(&gy);
        // subtract sum_{i<n} p^i {S,P}_i^{p^{n-i}} and divide by p^n
        for i in 0..n {
            let c = BigRational::from(BigInt::from(p).pow(i as u32));
            s = s.sub(&sum_q[i].pow(p.pow((n - i) as u32) as u64).scale(&c));
            pr = pr.sub(&prod_q[i].pow(p.pow((n - i) as u32) as u64).scale(&c));
        }
        let inv = BigRational::new(BigInt::one(), BigInt::from(p).pow(n as u32));
        sum_q.push(s.scale(&inv));
        prod_q.push(pr.scale(&inv));
    }

    let sum = sum_q.into_iter().map(QPoly::into_int).collect::<Result<Vec<_>>>()?;
    let prod = prod_q.into_iter().map(QPoly::into_int).collect::<Result<Vec<_>>>()?;
    Ok(WittLaws { p, len, sum, prod })
}

static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<WittLaws>>>> = OnceLock::new();

/// Fetch (deriving and caching on first use) the Witt law tables.
pub fn witt_laws(p: u64, len: usize) -> Result<Arc<WittLaws>> {
    if len == 0 || len > MAX_WITT_LEN {
        return Err(CoreError::LengthTooLarge(len, MAX_WITT_LEN));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("witt law cache poisoned");
    if let Some(l) = guard.get(&(p, len)) {
        return Ok(l.clone());
    }
    let laws = Arc::new(derive_laws(p, len)?);
    guard.insert((p, len), laws.clone());
    Ok(laws)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_of(expr: &WittPoly) -> BTreeMap<Vec<u32>, BigInt> {
        expr.terms.iter().cloned().collect()
    }

    #[test]
    fn s0_is_plain_sum() {
        for p in [2u64, 3, 5] {
            let laws = witt_laws(p, 2).unwrap();
            let s0 = poly_of(&laws.sum[0]);
            assert_eq!(s0.len(), 2);
            assert_eq!(s0[&vec![1, 0, 0, 0]], BigInt::from(1));
            assert_eq!(s0[&vec![0, 0, 1, 0]], BigInt::from(1));
        }
    }

    #[test]
    fn s1_matches_carry_formula() {
        // S_1 = x_1 + y_1 + (x_0^p + y_0^p - (x_0+y_0)^p)/p
        for p in [2u64, 3, 5] {
            let laws = witt_laws(p, 2).unwrap();
            let nv = 4;
            let x0 = QPoly::var(0, nv);
            let x1 = QPoly::var(1, nv);
            let y0 = QPoly::var(2, nv);
            let y1 = QPoly::var(3, nv);
            let carry = x0
                .pow(p)
                .add(&y0.pow(p))
                .sub(&x0.add(&y0).pow(p))
                .scale(&BigRational::new(BigInt::one(), BigInt::from(p)));
            let expect = x1.add(&y1).add(&carry).into_int().unwrap();
            assert_eq!(poly_of(&laws.sum[1]), poly_of(&expect));
        }
    }

    #[test]
    fn p1_matches_formula() {
        // P_1 = x_0^p y_1 + y_0^p x_1 + p x_1 y_1
        for p in [2u64, 3, 5] {
            let laws = witt_laws(p, 2).unwrap();
            let nv = 4;
            let x0 = QPoly::var(0, nv);
            let x1 = QPoly::var(1, nv);
            let y0 = QPoly::var(2, nv);
            let y1 = QPoly::var(3, nv);
            let expect = x0
                .pow(p)
                .mul(&y1)
                .add(&y0.pow(p).mul(&x1))
                .add(&x1.mul(&y1).scale(&BigRational::from(BigInt::from(p))))
                .into_int()
                .unwrap();
            assert_eq!(poly_of(&laws.prod[1]), poly_of(&expect));
        }
    }

    #[test]
    fn ghost_identities_hold_symbolically() {
        for (p, len) in [(2u64, 3usize), (3, 3), (5, 2)] {
            let laws = witt_laws(p, len).unwrap();
            let nv = 2 * len;
            let xs: Vec<QPoly> = (0..len).map(|i| QPoly::var(i, nv)).collect();
            let ys: Vec<QPoly> = (0..len).map(|i| QPoly::var(len + i, nv)).collect();
            let as_q = |w: &WittPoly| {
                let mut q = QPoly::zero(nv);
                for (e, c) in &w.terms {
                    q.insert(e.clone(), BigRational::from(c.clone()));
                }
                q
            };
            let sums: Vec<QPoly> = laws.sum.iter().map(&as_q).collect();
            let prods: Vec<QPoly> = laws.prod.iter().map(&as_q).collect();
            for n in 0..len {
                let lhs = ghost(&sums, n, p);
                let rhs = ghost(&xs, n, p).add(&ghost(&ys, n, p));
                assert_eq!(lhs, rhs, "sum ghost identity at n={n}, p={p}");
                let lhs = ghost(&prods, n, p);
                let rhs = ghost(&xs, n, p).mul(&ghost(&ys, n, p));
                assert_eq!(lhs, rhs, "prod ghost identity at n={n}, p={p}");
            }
        }
    }

    #[test]
    fn length_cap_enforced() {
        assert!(matches!(witt_laws(3, 5), Err(CoreError::LengthTooLarge(5, 4))));
        assert!(matches!(witt_laws(3, 0), Err(CoreError::LengthTooLarge(0, 4))));
    }
}
