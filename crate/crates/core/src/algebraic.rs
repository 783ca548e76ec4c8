//! Exact arithmetic in `Q(phi_k)`.
//!
//! `phi_k` is the unique root in `(1, 2)` of `x^k - x^(k-1) - ... - x - 1`.
//! Elements are coefficient vectors over `Q` in the power basis
//! `1, phi_k, ..., phi_k^(k-1)`, always reduced modulo that polynomial.
//! Signs are decided exactly: a zero test by polynomial gcd with the
//! characteristic polynomial, and otherwise by refining a rational bracket
//! around `phi_k` until the interval value of the element excludes zero.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::interval::{sign_of, to_f64, RationalInterval};

/// Dense polynomial over Q, lowest degree first, no trailing zeros.
type Poly = Vec<BigRational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn degree(p: &Poly) -> Option<usize> {
    p.len().checked_sub(1)
}

/// The k-nacci characteristic polynomial `x^k - x^(k-1) - ... - 1`.
pub fn characteristic_poly(k: usize) -> Vec<BigRational> {
    let mut p = vec![-BigRational::one(); k];
    p.push(BigRational::one());
    p
}

fn poly_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn poly_divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = degree(b).expect("division by zero polynomial");
    let mut rem = a.clone();
    trim(&mut rem);
    let lead = b[db].clone();
    let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let factor = &rem[dr] / &lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate() {
            rem[i + shift] -= &factor * c;
        }
        quot[shift] += factor;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

fn make_monic(mut p: Poly) -> Poly {
    if let Some(lead) = p.last().cloned() {
        for c in p.iter_mut() {
            *c /= &lead;
        }
    }
    p
}

/// Extended Euclid: returns `(g, s)` with `s*a ≡ g (mod b)` and `g` monic.
fn poly_ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let (mut r0, mut r1) = (b.clone(), a.clone());
    let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
    trim(&mut r1);
    while !r1.is_empty() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    let lead = r0.last().cloned().expect("gcd of zero polynomials");
    let s = s0.into_iter().map(|c| c / &lead).collect();
    (make_monic(r0), s)
}

/// A rational bracket `[low, high]` around `phi_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBracket {
    k: usize,
    low: BigRational,
    high: BigRational,
}

impl RootBracket {
    /// The starting bracket `[1, 2]`; the characteristic polynomial is `1 - k`
    /// at 1 and `1` at 2.
    pub fn initial(k: usize) -> Result<Self> {
        check_order(k)?;
        Ok(Self {
            k,
            low: BigRational::one(),
            high: BigRational::from_integer(2.into()),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn low(&self) -> &BigRational {
        &self.low
    }

    pub fn high(&self) -> &BigRational {
        &self.high
    }

    pub fn width(&self) -> BigRational {
        &self.high - &self.low
    }

    pub fn as_interval(&self) -> RationalInterval {
        RationalInterval::new(self.low.clone(), self.high.clone())
    }

    /// One bisection step; the width halves exactly.
    pub fn refine(&self) -> Self {
        let mid = (&self.low + &self.high) / BigRational::from_integer(2.into());
        let at_mid = poly_eval(&characteristic_poly(self.k), &mid);
        // phi_k is irrational, so a dyadic midpoint is never the root.
        debug_assert!(!at_mid.is_zero());
        if at_mid.is_negative() {
            Self {
                k: self.k,
                low: mid,
                high: self.high.clone(),
            }
        } else {
            Self {
                k: self.k,
                low: self.low.clone(),
                high: mid,
            }
        }
    }

    /// True when the characteristic polynomial changes sign across the bracket.
    pub fn is_valid(&self) -> bool {
        let p = characteristic_poly(self.k);
        poly_eval(&p, &self.low).is_negative() && poly_eval(&p, &self.high).is_positive()
    }
}

static BRACKETS: OnceLock<RwLock<HashMap<usize, RootBracket>>> = OnceLock::new();

/// A bracket of width at most `2^-bits`, shared across calls.
pub fn bracket_with_bits(k: usize, bits: u64) -> RootBracket {
    let cache = BRACKETS.get_or_init(|| RwLock::new(HashMap::new()));
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    let start = {
        let read = cache.read().unwrap();
        match read.get(&k) {
            Some(b) if b.width() <= target => return b.clone(),
            Some(b) => b.clone(),
            None => RootBracket::initial(k).expect("order checked by caller"),
        }
    };
    let mut b = start;
    while b.width() > target {
        b = b.refine();
    }
    let mut write = cache.write().unwrap();
    let keep = match write.get(&k) {
        Some(existing) => existing.width() > b.width(),
        None => true,
    };
    if keep {
        write.insert(k, b.clone());
    }
    b
}

/// Bracket around the k-nacci constant of width at most `width`.
pub fn knacci_constant(k: usize, width: &BigRational) -> Result<RootBracket> {
    check_order(k)?;
    if !width.is_positive() {
        return Err(invalid("bracket width must be positive"));
    }
    let mut b = RootBracket::initial(k)?;
    while &b.width() > width {
        b = b.refine();
    }
    Ok(b)
}

fn check_order(k: usize) -> Result<()> {
    if k < 2 {
        return Err(invalid(format!("k-nacci order must be at least 2, got {k}")));
    }
    Ok(())
}

/// An exact element `c_0 + c_1 phi_k + ... + c_(k-1) phi_k^(k-1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    k: usize,
    coeffs: Vec<BigRational>,
}

impl FieldElement {
    pub fn zero(k: usize) -> Self {
        assert!(k >= 2, "k-nacci order must be at least 2");
        Self {
            k,
            coeffs: vec![BigRational::zero(); k],
        }
    }

    pub fn one(k: usize) -> Self {
        Self::from_integer(k, 1)
    }

    pub fn from_integer(k: usize, n: impl Into<BigInt>) -> Self {
        Self::from_rational(k, BigRational::from_integer(n.into()))
    }

    pub fn from_rational(k: usize, q: BigRational) -> Self {
        let mut e = Self::zero(k);
        e.coeffs[0] = q;
        e
    }

    /// Builds an element from power-basis coefficients of any length,
    /// reducing higher powers.
    pub fn from_coeffs(k: usize, coeffs: Vec<BigRational>) -> Result<Self> {
        check_order(k)?;
        Ok(Self::reduce(k, coeffs))
    }

    pub fn from_int_coeffs(k: usize, coeffs: &[i64]) -> Result<Self> {
        Self::from_coeffs(
            k,
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// `phi_k` itself.
    pub fn phi(k: usize) -> Self {
        let mut e = Self::zero(k);
        e.coeffs[1] = BigRational::one();
        e
    }

    /// `alpha = 1/phi_k`, the pagoda ratio.
    pub fn alpha(k: usize) -> Self {
        Self::one(k).div_phi()
    }

    /// `phi_k^n` for any integer `n`, by repeated shifting.
    pub fn phi_pow(k: usize, n: i64) -> Self {
        let mut e = Self::one(k);
        if n >= 0 {
            for _ in 0..n {
                e = e.mul_phi();
            }
        } else {
            for _ in 0..(-n) {
                e = e.div_phi();
            }
        }
        e
    }

    fn reduce(k: usize, mut c: Vec<BigRational>) -> Self {
        // x^j = x^(j-1) + ... + x^(j-k) for j >= k
        while c.len() > k {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let j = c.len();
            for slot in &mut c[j - k..j] {
                *slot += &top;
            }
        }
        c.resize(k, BigRational::zero());
        Self { k, coeffs: c }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// True when the element is a plain rational number.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn mul_phi(&self) -> Self {
        let mut c = Vec::with_capacity(self.k + 1);
        c.push(BigRational::zero());
        c.extend(self.coeffs.iter().cloned());
        Self::reduce(self.k, c)
    }

    /// Division by `phi_k`, using `1/phi = phi^(k-1) - phi^(k-2) - ... - 1`.
    pub fn div_phi(&self) -> Self {
        let c0 = &self.coeffs[0];
        let mut c: Vec<BigRational> = (0..self.k - 1)
            .map(|i| &self.coeffs[i + 1] - c0)
            .collect();
        c.push(c0.clone());
        Self { k: self.k, coeffs: c }
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.k != other.k {
            return Err(Error::OrderMismatch(self.k, other.k));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(Self {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(Self {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let mut out = vec![BigRational::zero(); 2 * self.k - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(Self::reduce(self.k, out))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn scale_int(&self, n: impl Into<BigInt>) -> Self {
        self.scale(&BigRational::from_integer(n.into()))
    }

    fn as_poly(&self) -> Poly {
        let mut p = self.coeffs.clone();
        trim(&mut p);
        p
    }

    /// Multiplicative inverse. Fails only for elements that vanish at `phi_k`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        let char_poly = characteristic_poly(self.k);
        let a = self.as_poly();
        let (g, s) = poly_ext_gcd(&a, &char_poly);
        if g.len() == 1 {
            return Ok(Self::reduce(self.k, s));
        }
        // The element shares a factor with the characteristic polynomial.
        // If that factor vanishes at phi_k the element is zero there;
        // otherwise invert modulo the cofactor, which does vanish at phi_k.
        if self.gcd_vanishes_at_root(&g) {
            return Err(Error::NotInvertible);
        }
        let (cofactor, _) = poly_divmod(&char_poly, &g);
        let (g2, s2) = poly_ext_gcd(&a, &cofactor);
        if g2.len() != 1 {
            return Err(Error::NotInvertible);
        }
        Ok(Self::reduce(self.k, s2))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        self.checked_mul(&other.inverse()?)
    }

    /// `self^n` for any integer exponent; `phi_k` is a unit so negative
    /// powers of it are always defined.
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(self.k);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Interval value of the element when `phi_k` ranges over `bracket`.
    pub fn enclose_with(&self, bracket: &RootBracket) -> RationalInterval {
        assert_eq!(bracket.k, self.k, "bracket order mismatch");
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        let mut pow_lo = BigRational::one();
        let mut pow_hi = BigRational::one();
        for c in &self.coeffs {
            // phi_k > 1, so powers of the endpoints bound the powers of phi_k
            if c.is_positive() {
                lo += c * &pow_lo;
                hi += c * &pow_hi;
            } else if c.is_negative() {
                lo += c * &pow_hi;
                hi += c * &pow_lo;
            }
            pow_lo *= &bracket.low;
            pow_hi *= &bracket.high;
        }
        RationalInterval::new(lo, hi)
    }

    pub fn enclose(&self, bits: u64) -> RationalInterval {
        self.enclose_with(&bracket_with_bits(self.k, bits))
    }

    fn gcd_vanishes_at_root(&self, g: &Poly) -> bool {
        if g.len() <= 1 {
            return false;
        }
        // Every root of g is a root of the characteristic polynomial, whose
        // only root in (1, 2) is phi_k, so a sign change on any bracket
        // inside (1, 2) decides whether g(phi_k) = 0.
        let b = bracket_with_bits(self.k, 8);
        let at_low = poly_eval(g, &b.low);
        let at_high = poly_eval(g, &b.high);
        sign_of(&at_low) * sign_of(&at_high) < 0
    }

    /// Exact zero test: the element vanishes at `phi_k` iff its gcd with the
    /// characteristic polynomial does.
    pub fn vanishes_at_root(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let (g, _) = poly_ext_gcd(&self.as_poly(), &characteristic_poly(self.k));
        self.gcd_vanishes_at_root(&g)
    }

    /// Certified sign of the real number this element denotes.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if self.is_rational() {
            return sign_of(&self.coeffs[0]);
        }
        let mut bits = 64;
        let first = self.enclose(bits);
        if !first.contains_zero() {
            return if first.is_positive() { 1 } else { -1 };
        }
        if self.vanishes_at_root() {
            return 0;
        }
        loop {
            bits *= 2;
            let e = self.enclose(bits);
            if !e.contains_zero() {
                return if e.is_positive() { 1 } else { -1 };
            }
        }
    }

    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        (self - other).sign().cmp(&0)
    }

    /// `floor` of the real value.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.coeffs[0].floor().to_integer();
        }
        let mut bits = 64;
        loop {
            let e = self.enclose(bits);
            let low = e.lo().floor().to_integer();
            let high = e.hi().floor().to_integer();
            if low == high {
                return low;
            }
            if high == &low + 1 {
                // straddles one integer; settle it exactly
                let diff = self - &Self::from_integer(self.k, high.clone());
                return if diff.sign() >= 0 { high } else { low };
            }
            bits *= 2;
        }
    }

    /// The unique `t` with `phi^t <= x < phi^(t+1)`, plus whether
    /// `x = phi^t` exactly.
    pub fn floor_log_phi(&self) -> Result<(i64, bool)> {
        if self.sign() <= 0 {
            return Err(Error::NonPositive);
        }
        let k = self.k;
        let mut bits = 64;
        let mut approx = self.enclose(bits);
        while !approx.is_positive() {
            bits *= 2;
            approx = self.enclose(bits);
        }
        let phi_f = to_f64(bracket_with_bits(k, 64).low());
        let mut t = (approx.midpoint_f64().ln() / phi_f.ln()).floor() as i64;
        let one = Self::one(k);
        let above = |t: i64| -> i32 { (&(self * &Self::phi_pow(k, -t)) - &one).sign() };
        while above(t) < 0 {
            t -= 1;
        }
        while above(t + 1) >= 0 {
            t += 1;
        }
        Ok((t, above(t) == 0))
    }

    /// Decimal string of `floor(x * 10^digits) / 10^digits`; the value lies
    /// in `[shown, shown + 10^-digits)`.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = self.scale_int(BigInt::from(10).pow(digits));
        let f = scaled.floor();
        format_scaled(&f, digits)
    }

    /// True when `to_decimal(digits)` is the exact value.
    pub fn decimal_is_exact(&self, digits: u32) -> bool {
        if !self.is_rational() {
            return false;
        }
        let scaled = &self.coeffs[0] * BigRational::from_integer(BigInt::from(10).pow(digits));
        scaled.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(64).midpoint_f64()
    }

    /// Coefficients as canonical strings (`"3"`, `"-1/2"`).
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

fn format_scaled(f: &BigInt, digits: u32) -> String {
    if digits == 0 {
        return f.to_string();
    }
    let unit = BigInt::from(10).pow(digits);
    let sign = if f.is_negative() { "-" } else { "" };
    let (int, frac) = f.abs().div_mod_floor(&unit);
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement(k={}, {})", self.k, self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => c.to_string(),
                1 => format!("{c}*phi"),
                _ => format!("{c}*phi^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            /// Panics when the operands have different orders; use the
            /// `checked_*` form to get an error instead.
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field order mismatch")
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}
