//! Big-integer k-nacci kernels: `F_k(n)`, the plus-one recurrence `a_i`,
//! the partial sums `S_i(n)` and the Lucas numbers.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebraic::{bracket_with_bits, FieldElement};
use crate::error::{invalid, Result};
use crate::interval::RationalInterval;

/// Memoized values of `F_k(0), F_k(1), ...` for one order `k`.
///
/// Readers only ever see a fully built snapshot; extension builds a new
/// vector and swaps it in.
pub struct SequenceTable {
    k: usize,
    values: RwLock<Arc<Vec<BigInt>>>,
}

impl SequenceTable {
    pub fn new(k: usize) -> Result<Self> {
        check_order(k)?;
        let mut seed = vec![BigInt::zero(); k - 1];
        seed.push(BigInt::one());
        Ok(Self {
            k,
            values: RwLock::new(Arc::new(seed)),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// A snapshot holding at least `len` values.
    pub fn snapshot(&self, len: usize) -> Arc<Vec<BigInt>> {
        {
            let current = self.values.read().unwrap();
            if current.len() >= len {
                return Arc::clone(&current);
            }
        }
        let mut guard = self.values.write().unwrap();
        if guard.len() < len {
            let mut next: Vec<BigInt> = guard.as_ref().clone();
            let target = len.max(2 * next.len());
            // running window sum of the last k values
            let mut window: BigInt = next[next.len() - self.k..].iter().sum();
            while next.len() < target {
                let n = next.len();
                let value = window.clone();
                window += &value;
                window -= &next[n - self.k];
                next.push(value);
            }
            *guard = Arc::new(next);
        }
        Arc::clone(&guard)
    }

    pub fn get(&self, n: usize) -> BigInt {
        self.snapshot(n + 1)[n].clone()
    }
}

static TABLES: OnceLock<RwLock<HashMap<usize, Arc<SequenceTable>>>> = OnceLock::new();

/// The shared table for order `k`.
pub fn table(k: usize) -> Result<Arc<SequenceTable>> {
    check_order(k)?;
    let tables = TABLES.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = tables.read().unwrap().get(&k) {
        return Ok(Arc::clone(t));
    }
    let mut write = tables.write().unwrap();
    let entry = write
        .entry(k)
        .or_insert_with(|| Arc::new(SequenceTable::new(k).expect("order checked")));
    Ok(Arc::clone(entry))
}

fn check_order(k: usize) -> Result<()> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// `F_k(n)`: `k - 1` zeros, then 1, then each term the sum of the previous `k`.
pub fn knacci(k: usize, n: usize) -> Result<BigInt> {
    Ok(table(k)?.get(n))
}

/// `a_i = F_k(k-1) + F_k(k) + ... + F_k(k-1+i)`.
pub fn cumulative_a(k: usize, i: usize) -> Result<BigInt> {
    let values = table(k)?.snapshot(k + i);
    Ok(values[k - 1..=k - 1 + i].iter().sum())
}

/// The first `len` terms of `a_(n+k) = a_n + ... + a_(n+k-1) + 1` started
/// from `(1, 2, 4, ..., 2^(k-1))`, by direct iteration.
pub fn plus_one_recurrence(k: usize, len: usize) -> Result<Vec<BigInt>> {
    check_order(k)?;
    let mut a: Vec<BigInt> = (0..k.min(len)).map(|j| BigInt::one() << j).collect();
    while a.len() < len {
        let n = a.len();
        let next: BigInt = a[n - k..].iter().sum::<BigInt>() + 1;
        a.push(next);
    }
    Ok(a)
}

/// `S_i(n) = F_k(n+k-2) + F_k(n+k-3) + ... + F_k(n+k-2-i)` for `0 <= i < k`.
pub fn partial_sum(k: usize, i: usize, n: i64) -> Result<BigInt> {
    check_order(k)?;
    if i >= k {
        return Err(invalid(format!("S index {i} out of range for k={k}")));
    }
    let lowest = n + k as i64 - 2 - i as i64;
    if lowest < 0 {
        return Err(invalid(format!(
            "S_{i}({n}) needs F_{k} at negative index {lowest}"
        )));
    }
    let top = (n + k as i64 - 2) as usize;
    let values = table(k)?.snapshot(top + 1);
    Ok(values[lowest as usize..=top].iter().sum())
}

/// Checks `sum_{j=1..k} S_(k-j)(n) F_k(k-j+i) = F_k(n+i+k-1)` exactly.
pub fn verify_s_identity(k: usize, n: i64, i: i64) -> Result<bool> {
    check_order(k)?;
    if i < 0 {
        return Err(invalid("identity index i must be non-negative"));
    }
    let mut lhs = BigInt::zero();
    for j in 1..=k {
        let s = partial_sum(k, k - j, n)?;
        let f = knacci(k, (k as i64 - j as i64 + i) as usize)?;
        lhs += s * f;
    }
    let rhs_index = n + i + k as i64 - 1;
    if rhs_index < 0 {
        return Err(invalid("right-hand index is negative"));
    }
    Ok(lhs == knacci(k, rhs_index as usize)?)
}

/// Lucas numbers: `L(0) = 2`, `L(1) = 1`, `L(n+2) = L(n+1) + L(n)`.
pub fn lucas(n: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::from(2), BigInt::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// Certified bracket for `c = lim F_k(n) / phi_k^n`.
///
/// The interval is the hull of the enclosures of `F_k(n)/phi_k^n` at
/// `n_terms` and `n_terms + 1` together with the enclosure of the exact limit
/// `1/Q'(phi_k)`, `Q` the characteristic polynomial, so it always contains
/// the limit and its width tracks how far the ratios have converged.
pub fn asymptotic_c(k: usize, n_terms: usize) -> Result<RationalInterval> {
    check_order(k)?;
    if n_terms < 32 {
        return Err(invalid("asymptotic_c needs at least 32 terms"));
    }
    let bits = 96 + 2 * n_terms as u64;
    let bracket = bracket_with_bits(k, bits);
    let ratio = |n: usize| -> Result<RationalInterval> {
        let f = BigRational::from_integer(knacci(k, n)?);
        let lo_pow = num_traits::pow(bracket.low().clone(), n);
        let hi_pow = num_traits::pow(bracket.high().clone(), n);
        Ok(RationalInterval::new(&f / hi_pow, &f / lo_pow))
    };
    let limit = limit_constant(k)?.enclose_with(&bracket);
    Ok(ratio(n_terms)?.hull(&ratio(n_terms + 1)?).hull(&limit))
}

/// `1 / Q'(phi_k)` with `Q(x) = x^k - x^(k-1) - ... - 1`.
pub fn limit_constant(k: usize) -> Result<FieldElement> {
    check_order(k)?;
    let mut derivative = FieldElement::phi_pow(k, k as i64 - 1).scale_int(k as i64);
    for j in 1..k {
        derivative = &derivative - &FieldElement::phi_pow(k, j as i64 - 1).scale_int(j as i64);
    }
    derivative.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::to_f64;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn knacci_initial_terms() {
        let got = |k: usize, len: usize| -> Vec<BigInt> { (0..len).map(|n| knacci(k, n).unwrap()).collect() };
        assert_eq!(got(2, 8), ints(&[0, 1, 1, 2, 3, 5, 8, 13]));
        assert_eq!(got(3, 8), ints(&[0, 0, 1, 1, 2, 4, 7, 13]));
        assert_eq!(got(4, 10), ints(&[0, 0, 0, 1, 1, 2, 4, 8, 15, 29]));
        assert!(knacci(1, 3).is_err());
    }

    #[test]
    fn cumulative_a_values() {
        let got: Vec<BigInt> = (0..6).map(|i| cumulative_a(2, i).unwrap()).collect();
        assert_eq!(got, ints(&[1, 2, 4, 7, 12, 20]));
        let got: Vec<BigInt> = (0..5).map(|i| cumulative_a(3, i).unwrap()).collect();
        assert_eq!(got, ints(&[1, 2, 4, 8, 15]));
        assert_eq!(plus_one_recurrence(3, 5).unwrap(), ints(&[1, 2, 4, 8, 15]));
    }

    #[test]
    fn partial_sums() {
        assert_eq!(partial_sum(2, 1, 3).unwrap(), BigInt::from(3));
        let s: Vec<BigInt> = (0..3).map(|i| partial_sum(3, i, 2).unwrap()).collect();
        assert_eq!(s, ints(&[1, 2, 2]));
        assert_eq!(partial_sum(2, 0, 2).unwrap(), BigInt::from(1));
        assert!(partial_sum(2, 2, 3).is_err());
        assert!(partial_sum(3, 2, -1).is_err());
    }

    #[test]
    fn s_identity_examples() {
        assert!(verify_s_identity(2, 2, 1).unwrap());
        assert!(verify_s_identity(3, 2, 0).unwrap());
        // n = 0 would need F at index -1
        assert!(verify_s_identity(2, 0, 0).is_err());
    }

    #[test]
    fn lucas_values() {
        assert_eq!(lucas(0), BigInt::from(2));
        assert_eq!(lucas(1), BigInt::from(1));
        assert_eq!([lucas(2), lucas(4), lucas(6)], [3.into(), 7.into(), 18.into()]);
        assert_eq!(lucas(32), BigInt::from(4_870_847));
    }

    #[test]
    fn table_snapshots_are_stable() {
        let t = SequenceTable::new(3).unwrap();
        let early = t.snapshot(5);
        let late = t.snapshot(50);
        assert_eq!(&late[..early.len()], &early[..]);
        assert!(SequenceTable::new(0).is_err());
    }

    #[test]
    fn asymptotic_constant() {
        let c2 = asymptotic_c(2, 60).unwrap();
        let inv_sqrt5 = 1.0 / 5f64.sqrt();
        assert!(to_f64(c2.lo()) <= inv_sqrt5 + 1e-15 && inv_sqrt5 - 1e-15 <= to_f64(c2.hi()));
        // c^2 must bracket 1/5 exactly
        let sq = c2.mul(&c2);
        assert!(sq.contains(&BigRational::new(1.into(), 5.into())));
        let c3 = asymptotic_c(3, 80).unwrap();
        assert!(c3.is_positive());
        assert!(to_f64(&c3.width()) < 1e-6);
        for k in 2..=6 {
            assert!(asymptotic_c(k, 40).unwrap().is_positive(), "k={k}");
        }
        assert!(asymptotic_c(2, 10).is_err());
    }
}
