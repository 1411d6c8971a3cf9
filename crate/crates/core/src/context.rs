use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// All truncation parameters in one place.
///
/// * `p` — the prime.
/// * `f` — residue degree of the unramified base `K = W(F_{p^f})[1/p]`.
///   Only `f = 1` is supported by the arithmetic in this version.
/// * `n` — p-adic working precision: coefficient arithmetic is modulo `p^n`.
/// * `m_base` — tower level of the theta target ring.
/// * `m_tilt` — depth of tilt tuples (number of p-power roots below an
///   element that its tilt stores).
/// * `d_x` — kernel-adic truncation order for the completed period rings.
/// * `d_u` — degree bound for the monodromy variable.
/// * `d_t` — total-degree cap for Tate series.
/// * `d_laurent` — how far below zero Laurent exponents may go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub p: u64,
    #[serde(default = "default_f")]
    pub f: u32,
    pub n: u32,
    pub m_base: u32,
    pub m_tilt: u32,
    pub d_x: u32,
    pub d_u: u32,
    pub d_t: u32,
    pub d_laurent: u32,
}

fn default_f() -> u32 {
    1
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrecisionContext {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        let ctx = PrecisionContext {
            p,
            f: 1,
            n,
            m_base: 1,
            m_tilt: 2,
            d_x: 3,
            d_u: 2,
            d_t: 12,
            d_laurent: 4,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with(
        p: u64,
        n: u32,
        m_base: u32,
        m_tilt: u32,
        d_x: u32,
        d_u: u32,
        d_t: u32,
        d_laurent: u32,
    ) -> Result<Self> {
        let ctx = PrecisionContext {
            p,
            f: 1,
            n,
            m_base,
            m_tilt,
            d_x,
            d_u,
            d_t,
            d_laurent,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(CoreError::InvalidContext(format!("p = {} is not prime", self.p)));
        }
        if self.f != 1 {
            return Err(CoreError::InvalidContext(
                "residue degree f > 1 is not supported in this version".into(),
            ));
        }
        if self.n < 1 {
            return Err(CoreError::InvalidContext("need n >= 1".into()));
        }
        if self.m_tilt < 1 {
            return Err(CoreError::InvalidContext("need m_tilt >= 1".into()));
        }
        if self.m_base < 1 {
            return Err(CoreError::InvalidContext("need m_base >= 1".into()));
        }
        if self.d_x < 1 {
            return Err(CoreError::InvalidContext("need d_x >= 1".into()));
        }
        // p^n must fit comfortably in u64 arithmetic (products are taken in u128).
        let bits = (self.p as f64).log2() * (self.n as f64 + self.m_tilt as f64 + 2.0);
        if bits > 62.0 {
            return Err(CoreError::InvalidContext(format!(
                "p^(n + m_tilt + 2) = {}^{} does not fit in u64",
                self.p,
                self.n + self.m_tilt + 2
            )));
        }
        let amb = self.m_base + self.m_tilt;
        if self.p.checked_pow(amb).is_none() || self.p.pow(amb) > 1 << 20 {
            return Err(CoreError::InvalidContext(format!(
                "ambient tower level p^{amb} too large"
            )));
        }
        Ok(())
    }

    /// Ambient tower level: tilt tuples of level-`m_base` elements need roots
    /// this deep.
    pub fn m_ambient(&self) -> u32 {
        self.m_base + self.m_tilt
    }

    /// Effective precision of theta outputs: `min(n, m_tilt + 1)`.
    pub fn theta_precision(&self) -> u32 {
        self.n.min(self.m_tilt + 1)
    }

    /// `p^k` as u64 (caller guarantees fit; `validate` bounds the exponents
    /// used internally).
    pub fn pp(&self, k: u32) -> u64 {
        self.p.pow(k)
    }

    /// Working modulus `p^n`.
    pub fn modulus(&self) -> u64 {
        self.pp(self.n)
    }
}
