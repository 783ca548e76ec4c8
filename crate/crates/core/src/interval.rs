//! Closed intervals with arbitrary-precision rational endpoints.
//!
//! Used wherever a quantity leaves `Q(phi_k)` (logarithms, limits) and for
//! evaluating field elements against a root bracket.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn point(q: BigRational) -> Self {
        Self {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// True when every point of the interval is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Self { lo, hi }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        self.mul(&Self::point(q.clone()))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(Self {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Widens the endpoints onto the dyadic grid `2^-bits`.
    pub fn round_outward(&self, bits: u64) -> Self {
        Self {
            lo: round_dyadic(&self.lo, bits, false),
            hi: round_dyadic(&self.hi, bits, true),
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
        to_f64(&mid)
    }

    /// Certified enclosure of the natural logarithm. Requires a positive
    /// interval; the result is accurate to roughly `2^-bits`.
    pub fn ln(&self, bits: u64) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::NonPositive);
        }
        let (lo, _) = ln_bounds(&self.lo, bits);
        let (_, hi) = ln_bounds(&self.hi, bits);
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.15e}, {:.15e}]", to_f64(&self.lo), to_f64(&self.hi))
    }
}

pub(crate) fn to_f64(q: &BigRational) -> f64 {
    // Scale to keep both halves in f64 range before dividing.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 60 {
        q / BigRational::from_integer(BigInt::one() << (shift - 60) as usize)
    } else if shift < -60 {
        q * BigRational::from_integer(BigInt::one() << (-shift - 60) as usize)
    } else {
        q.clone()
    };
    let (n, d) = (scaled.numer().clone(), scaled.denom().clone());
    // Trim both to ~64 significant bits.
    let excess = (n.bits().max(d.bits()) as i64 - 64).max(0) as usize;
    let n = (n >> excess).to_f64().unwrap_or(0.0);
    let d = (d >> excess).to_f64().unwrap_or(1.0);
    let base = if d == 0.0 { 0.0 } else { n / d };
    if shift > 60 {
        base * 2f64.powi((shift - 60) as i32)
    } else if shift < -60 {
        base / 2f64.powi((-shift - 60) as i32)
    } else {
        base
    }
}

pub(crate) fn round_dyadic(q: &BigRational, bits: u64, up: bool) -> BigRational {
    let scale = BigInt::one() << bits as usize;
    let scaled = q.numer() * &scale;
    let (quot, rem) = scaled.div_mod_floor(q.denom());
    let n = if up && !rem.is_zero() { quot + 1 } else { quot };
    BigRational::new(n, scale)
}

/// Returns `(lower, upper)` with `lower <= ln(q) <= upper`, `q > 0`.
pub(crate) fn ln_bounds(q: &BigRational, bits: u64) -> (BigRational, BigRational) {
    assert!(q.is_positive());
    // q = 2^e * w with w in [1, 2)
    let mut e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    let mut w = q / pow2(e);
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    while w < one {
        w *= &two;
        e -= 1;
    }
    while w >= two {
        w /= &two;
        e += 1;
    }
    let work = bits + 16;
    let (ln2_lo, ln2_hi) = ln2_bounds(work);
    let (w_lo, w_hi) = ln_near_one(&w, work);
    let e_q = BigRational::from_integer(e.into());
    let (lo, hi) = if e >= 0 {
        (&e_q * &ln2_lo + w_lo, &e_q * &ln2_hi + w_hi)
    } else {
        (&e_q * &ln2_hi + w_lo, &e_q * &ln2_lo + w_hi)
    };
    (round_dyadic(&lo, bits, false), round_dyadic(&hi, bits, true))
}

fn ln2_bounds(bits: u64) -> (BigRational, BigRational) {
    let third = BigRational::new(1.into(), 3.into());
    let (lo, hi) = atanh_bounds(&third, &third, bits);
    let two = BigRational::from_integer(2.into());
    (&lo * &two, &hi * &two)
}

/// ln(w) for w in [1, 2) via 2*atanh((w-1)/(w+1)); the argument is at most 1/3.
fn ln_near_one(w: &BigRational, bits: u64) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let u = (w - &one) / (w + &one);
    let u_lo = round_dyadic(&u, bits + 8, false).max(BigRational::zero());
    let u_hi = round_dyadic(&u, bits + 8, true);
    let (lo, hi) = atanh_bounds(&u_lo, &u_hi, bits);
    let two = BigRational::from_integer(2.into());
    (&lo * &two, &hi * &two)
}

/// Bounds on atanh over [u_lo, u_hi] with 0 <= u_lo <= u_hi <= 1/3.
fn atanh_bounds(u_lo: &BigRational, u_hi: &BigRational, bits: u64) -> (BigRational, BigRational) {
    let terms = bits / 3 + 2;
    let series = |u: &BigRational| -> (BigRational, BigRational) {
        let u2 = u * u;
        let mut power = u.clone();
        let mut sum = BigRational::zero();
        for j in 0..terms {
            sum += &power / BigRational::from_integer((2 * j + 1).into());
            power = round_dyadic(&(&power * &u2), bits + 32, true);
        }
        // power now bounds u^(2N+1) from above
        let tail = &power
            / (BigRational::from_integer((2 * terms + 1).into()) * (BigRational::one() - &u2));
        (sum, tail)
    };
    let (lo_sum, _) = series(u_lo);
    let (hi_sum, hi_tail) = series(u_hi);
    // Rounded-up powers can only overshoot; subtract a matching slack below.
    let slack = BigRational::new(BigInt::from(2 * terms), BigInt::one() << (bits + 32) as usize);
    (lo_sum - slack, hi_sum + hi_tail)
}

pub(crate) fn sign_of(q: &BigRational) -> i32 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
