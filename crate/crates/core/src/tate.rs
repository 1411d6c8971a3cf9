use crate::error::{CoreError, Result};
use crate::scalar::{PNorm, PadicScalar};
use std::collections::BTreeMap;
use std::fmt;

/// Truncated multivariate Tate/Laurent series.
///
/// Coefficients are [`PadicScalar`]s; exponent vectors are bounded above by a
/// total positive degree cap `d_t` (terms beyond it are dropped, as in a
/// truncated power series ring) and below by the Laurent window `-d_laurent`
/// (crossing it is a hard error, never a silent wraparound).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TateSeries {
    p: u64,
    n: u32,
    vars: Vec<String>,
    d_t: u32,
    d_laurent: u32,
    coeffs: BTreeMap<Vec<i32>, PadicScalar>,
}

fn pos_degree(exps: &[i32]) -> i64 {
    exps.iter().map(|&e| if e > 0 { e as i64 } else { 0 }).sum()
}

impl TateSeries {
    pub fn zero(p: u64, n: u32, vars: Vec<String>, d_t: u32, d_laurent: u32) -> Self {
        TateSeries { p, n, vars, d_t, d_laurent, coeffs: BTreeMap::new() }
    }

    /// One-variable Laurent series ring in `T`, the default coefficient ring
    /// for the period algebra.
    pub fn laurent_t(p: u64, n: u32, d_t: u32, d_laurent: u32) -> Self {
        Self::zero(p, n, vec!["T".into()], d_t, d_laurent)
    }

    pub fn from_const(&self, c: PadicScalar) -> Self {
        let mut s = self.clone_empty();
        if !c.is_zero() {
            s.coeffs.insert(vec![0; self.vars.len()], c);
        }
        s
    }

    pub fn clone_empty(&self) -> Self {
        TateSeries { coeffs: BTreeMap::new(), ..self.clone() }
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn degree_cap(&self) -> u32 {
        self.d_t
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &PadicScalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, exps: &[i32]) -> PadicScalar {
        self.coeffs
            .get(exps)
            .copied()
            .unwrap_or_else(|| PadicScalar::zero(self.p, self.n))
    }

    fn check_window(&self, exps: &[i32]) -> Result<bool> {
        for &e in exps {
            if e < -(self.d_laurent as i32) {
                return Err(CoreError::LaurentOverflow {
                    exp: e as i64,
                    min: -(self.d_laurent as i64),
                    max: self.d_t as i64,
                });
            }
        }
        Ok(pos_degree(exps) <= self.d_t as i64)
    }

    /// Insert `c * T^exps`, truncating above the degree cap and erroring
    /// below the Laurent window.
    pub fn add_term(&mut self, exps: Vec<i32>, c: PadicScalar) -> Result<()> {
        debug_assert_eq!(exps.len(), self.vars.len());
        if c.is_zero() {
            return Ok(());
        }
        if !self.check_window(&exps)? {
            return Ok(()); // beyond the degree cap: truncated away
        }
        let entry = self.coeffs.entry(exps);
        match entry {
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
        Ok(())
    }

    pub fn monomial(&self, exps: Vec<i32>, c: PadicScalar) -> Result<Self> {
        let mut s = self.clone_empty();
        s.add_term(exps, c)?;
        Ok(s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut s = self.clone();
        for (e, c) in &other.coeffs {
            s.add_term(e.clone(), *c)?;
        }
        Ok(s)
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone_empty();
        for (e, c) in &self.coeffs {
            s.coeffs.insert(e.clone(), c.neg());
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        let mut s = self.clone_empty();
        if c.is_zero() {
            return s;
        }
        for (e, a) in &self.coeffs {
            let prod = a.mul(c);
            if !prod.is_zero() {
                s.coeffs.insert(e.clone(), prod);
            }
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut s = self.clone_empty();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let prod = c1.mul(c2);
                if prod.is_zero() {
                    continue;
                }
                let exps: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                s.add_term(exps, prod)?;
            }
        }
        Ok(s)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = self.from_const(PadicScalar::one(self.p, self.n));
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Gauss norm: max over coefficients of the coefficient norm.
    pub fn gauss_norm(&self) -> PNorm {
        self.coeffs
            .values()
            .map(|c| c.norm())
            .max()
            .unwrap_or(PNorm::Zero)
    }

    /// Minimal coefficient valuation, `None` for the zero series.
    pub fn min_valuation(&self) -> Option<i64> {
        self.coeffs.values().filter_map(|c| c.valuation()).min()
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Result<Self> {
        let mut s = self.clone_empty();
        for (e, c) in &self.coeffs {
            let k = e[i];
            if k == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[i] = k - 1;
            s.add_term(exps, c.mul(&PadicScalar::from_i64(self.p, self.n, k as i64)))?;
        }
        Ok(s)
    }

    /// Value at the origin. Errors if a monomial with a negative exponent is
    /// present.
    pub fn eval_at_zero(&self) -> Result<PadicScalar> {
        for e in self.coeffs.keys() {
            if e.iter().any(|&x| x < 0) {
                return Err(CoreError::InvalidInput(
                    "evaluation at the origin of a Laurent series with poles".into(),
                ));
            }
        }
        Ok(self.coeff(&vec![0; self.vars.len()]))
    }

    /// Substitute `T_i -> p^l T_i` for every variable (requires nonnegative
    /// exponents). Used to pass to a shrunk polydisk.
    pub fn rescale_all(&self, l: u32) -> Result<Self> {
        let mut s = self.clone_empty();
        for (e, c) in &self.coeffs {
            let deg = pos_degree(e);
            if e.iter().any(|&x| x < 0) {
                return Err(CoreError::InvalidInput("rescaling a Laurent series".into()));
            }
            s.add_term(e.clone(), c.shift(l as i64 * deg))?;
        }
        Ok(s)
    }

    /// Equality modulo terms whose guaranteed valuation exceeds the working
    /// precision (the sense in which truncated series identities hold).
    pub fn eq_mod_precision(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d
                .coeffs
                .values()
                .all(|c| c.valuation().is_none_or(|v| v > self.n as i64)),
            Err(_) => false,
        }
    }

    /// Re-truncate to a different degree cap.
    pub fn with_degree_cap(&self, d_t: u32) -> Self {
        let mut s = self.clone();
        s.d_t = d_t;
        s.coeffs.retain(|e, _| pos_degree(e) <= d_t as i64);
        s
    }

    /// Truncated `log(1 + x)` for `x = self`: every monomial must have
    /// strictly positive valuation.
    pub fn log1p(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone_empty());
        }
        let vmin = self.min_valuation().unwrap();
        if vmin <= 0 {
            return Err(CoreError::ConvergenceError(format!(
                "log1p needs termwise valuation > 0, found {vmin}"
            )));
        }
        let mut acc = self.clone_empty();
        let mut xp = self.from_const(PadicScalar::one(self.p, self.n));
        let mut m: i64 = 0;
        loop {
            m += 1;
            // terms from index m on have valuation >= m*vmin - ilog_p(m),
            // nondecreasing in m; stop when it exceeds the precision
            if m as u64 > 1 && m * vmin - ilog(self.p, m as u64) as i64 > self.n as i64 {
                break;
            }
            xp = xp.mul(self)?;
            if xp.is_zero() {
                break;
            }
            let sign = if m % 2 == 1 { 1 } else { -1 };
            let c = PadicScalar::from_ratio(self.p, self.n, sign, m);
            acc = acc.add(&xp.scale(&c))?;
        }
        Ok(acc)
    }

    /// Truncated `exp(x)`: requires termwise valuation `> 1/(p-1)`.
    pub fn exp(&self) -> Result<Self> {
        let one = self.from_const(PadicScalar::one(self.p, self.n));
        if self.is_zero() {
            return Ok(one);
        }
        let vmin = self.min_valuation().unwrap();
        if vmin * (self.p as i64 - 1) <= 1 {
            return Err(CoreError::ConvergenceError(format!(
                "exp needs termwise valuation > 1/(p-1), found {vmin}"
            )));
        }
        let mut acc = one;
        let mut xp = self.from_const(PadicScalar::one(self.p, self.n));
        let mut fact_val: i64 = 0; // v_p(m!)
        let mut m: i64 = 0;
        loop {
            m += 1;
            fact_val += val_p(self.p, m as u64) as i64;
            // v(x^m / m!) >= m*vmin - v_p(m!), and with vmin > 1/(p-1) this
            // lower bound tends to infinity
            if m * vmin - fact_val > self.n as i64 + 1 {
                break;
            }
            xp = xp.mul(self)?;
            if xp.is_zero() {
                break;
            }
            let mut c = PadicScalar::one(self.p, self.n).shift(-fact_val);
            // unit part of 1/m!: invert m!/p^{v_p(m!)} incrementally
            c = c.mul(&inv_fact_unit(self.p, self.n, m as u64)?);
            acc = acc.add(&xp.scale(&c))?;
        }
        Ok(acc)
    }
}

/// p-adic valuation of `m`.
fn val_p(p: u64, mut m: u64) -> u32 {
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// floor(log_p(m))
fn ilog(p: u64, m: u64) -> u32 {
    let mut k = 0;
    let mut acc = p;
    while acc <= m {
        acc *= p;
        k += 1;
    }
    k
}

/// `1/m!` as a scalar (valuation tracked exactly).
fn inv_fact_unit(p: u64, n: u32, m: u64) -> Result<PadicScalar> {
    let mut acc = PadicScalar::one(p, n);
    for k in 1..=m {
        acc = acc.mul(&PadicScalar::from_ratio(p, n, 1, k as i64));
    }
    // acc = 1/m! including the p-power part; strip it out since the caller
    // tracked the valuation separately
    Ok(acc.shift(-acc.valuation().unwrap_or(0)))
}

impl fmt::Display for TateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(k, _)| **k != 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, n: u32) -> TateSeries {
        TateSeries::laurent_t(p, n, 12, 4)
    }

    fn t_var(r: &TateSeries) -> TateSeries {
        r.monomial(vec![1], PadicScalar::one(r.prime(), r.precision())).unwrap()
    }

    #[test]
    fn gauss_norm_examples() {
        let r = ring(3, 6);
        let p = PadicScalar::from_i64(3, 6, 3);
        // pT + T^2 -> 1
        let f = r
            .monomial(vec![1], p)
            .unwrap()
            .add(&r.monomial(vec![2], PadicScalar::one(3, 6)).unwrap())
            .unwrap();
        assert_eq!(f.gauss_norm(), PNorm::one());
        // 0 -> 0
        assert_eq!(r.gauss_norm(), PNorm::Zero);
        // p^{-1} T^3 -> p
        let g = r.monomial(vec![3], PadicScalar::one(3, 6).shift(-1)).unwrap();
        assert_eq!(g.gauss_norm(), PNorm::from_valuation(-1));
    }

    #[test]
    fn log_of_one_plus_p_t() {
        // x = pT: log(1+pT) = sum (-1)^{m-1} p^m/m T^m
        let r = ring(3, 6);
        let x = r.monomial(vec![1], PadicScalar::from_i64(3, 6, 3)).unwrap();
        let l = x.log1p().unwrap();
        assert_eq!(l.coeff(&[1]), PadicScalar::from_i64(3, 6, 3));
        assert_eq!(l.coeff(&[2]), PadicScalar::from_ratio(3, 6, -9, 2));
        assert_eq!(l.coeff(&[3]), PadicScalar::from_ratio(3, 6, 27, 3));
        assert!(!l.is_zero());
    }

    #[test]
    fn log_additivity() {
        // log((1+x)(1+y)) = log(1+x) + log(1+y) with x = pT, y = pT^2
        let r = ring(3, 4);
        let p = PadicScalar::from_i64(3, 4, 3);
        let x = r.monomial(vec![1], p).unwrap();
        let y = r.monomial(vec![2], p).unwrap();
        // (1+x)(1+y) - 1 = x + y + xy
        let z = x.add(&y).unwrap().add(&x.mul(&y).unwrap()).unwrap();
        let lhs = z.log1p().unwrap();
        let rhs = x.log1p().unwrap().add(&y.log1p().unwrap()).unwrap();
        assert!(lhs.eq_mod_precision(&rhs));
    }

    #[test]
    fn exp_log_inverse() {
        // p=3: exp(log1p(3)) = 4
        let r = ring(3, 6);
        let three = r.from_const(PadicScalar::from_i64(3, 6, 3));
        let l = three.log1p().unwrap();
        let e = l.exp().unwrap();
        assert_eq!(e, r.from_const(PadicScalar::from_i64(3, 6, 4)));
        // and exp(0) = 1
        assert_eq!(
            r.exp().unwrap(),
            r.from_const(PadicScalar::one(3, 6))
        );
    }

    #[test]
    fn exp_domain_boundary() {
        // p=2: exp(2) diverges (valuation 1 = 1/(p-1) is excluded)
        let r = ring(2, 6);
        let two = r.from_const(PadicScalar::from_i64(2, 6, 2));
        assert!(matches!(two.exp(), Err(CoreError::ConvergenceError(_))));
        // but exp(4) converges
        let four = r.from_const(PadicScalar::from_i64(2, 6, 4));
        assert!(four.exp().is_ok());
    }

    #[test]
    fn laurent_window_is_hard() {
        let r = ring(3, 4);
        let tinv = r
            .monomial(vec![-4], PadicScalar::one(3, 4))
            .unwrap();
        assert!(matches!(
            tinv.mul(&tinv),
            Err(CoreError::LaurentOverflow { .. })
        ));
    }

    #[test]
    fn derivatives_commute() {
        let mut r = TateSeries::zero(3, 5, vec!["T1".into(), "T2".into()], 8, 0);
        r.add_term(vec![2, 1], PadicScalar::from_i64(3, 5, 4)).unwrap();
        r.add_term(vec![1, 3], PadicScalar::from_i64(3, 5, -2)).unwrap();
        r.add_term(vec![0, 2], PadicScalar::from_i64(3, 5, 7)).unwrap();
        let d12 = r.derivative(0).unwrap().derivative(1).unwrap();
        let d21 = r.derivative(1).unwrap().derivative(0).unwrap();
        assert_eq!(d12, d21);
    }

    #[test]
    fn gauss_norm_multiplicative_on_safe_degrees() {
        let r = ring(5, 4);
        let t = t_var(&r);
        let f = t
            .scale(&PadicScalar::from_i64(5, 4, 5))
            .add(&r.from_const(PadicScalar::from_i64(5, 4, 2)))
            .unwrap();
        let g = t.pow(2).unwrap().add(&r.from_const(PadicScalar::from_i64(5, 4, 15))).unwrap();
        let prod = f.mul(&g).unwrap();
        assert_eq!(prod.gauss_norm(), f.gauss_norm().mul(g.gauss_norm()));
    }
}
