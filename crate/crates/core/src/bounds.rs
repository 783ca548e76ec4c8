//! Exact row bounds, per-cell projection counts and single-square caps.
//!
//! Floors of logarithms go through [`FieldElement::floor_log_phi`]; no real
//! logarithm is ever rounded.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::{bracket_with_bits, FieldElement};
use crate::board::GameParams;
use crate::error::{invalid, Error, Result};
use crate::interval::RationalInterval;

/// `(phi_k + 1) / (phi_k - 1)`: growth of the per-cell count per projection.
pub fn projection_ratio(k: usize) -> Result<FieldElement> {
    let one = FieldElement::one(k);
    let phi = FieldElement::phi(k);
    (&phi + &one).checked_div(&(&phi - &one))
}

/// `m (phi_k + 1)^(d-1) / (phi_k - 1)^d`.
pub fn bound_element(params: GameParams) -> Result<FieldElement> {
    let k = params.k;
    let one = FieldElement::one(k);
    let phi = FieldElement::phi(k);
    let num = (&phi + &one).pow(params.d as i64 - 1)?;
    let den = (&phi - &one).pow(params.d as i64)?;
    Ok(num.checked_div(&den)?.scale_int(params.m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UpperBound {
    /// Highest row not excluded by the energy argument.
    pub row: i64,
    /// `floor(log_phi(bound_element)) + 1` before the strictness correction.
    pub raw: i64,
    /// The bound element is an exact power of `phi_k`, so `raw` itself is
    /// excluded.
    pub strict: bool,
}

pub fn upper_bound_row(params: GameParams) -> Result<UpperBound> {
    let (t, exact) = bound_element(params)?.floor_log_phi()?;
    let raw = t + 1;
    Ok(UpperBound {
        row: if exact { raw - 1 } else { raw },
        raw,
        strict: exact,
    })
}

/// `floor(log_phi(bound_element))`. Only established for `m > 1` unless `k = 2`.
pub fn lower_bound_row_formula(params: GameParams) -> Result<i64> {
    if params.m == 1 && params.k != 2 {
        return Err(invalid("the lower bound formula needs m > 1 when k > 2"));
    }
    Ok(bound_element(params)?.floor_log_phi()?.0)
}

/// Highest row reachable in one dimension with `m` checkers per cell.
pub fn max_row_1d(m: u64, k: usize) -> Result<i64> {
    if m == 1 {
        return Ok(1);
    }
    Ok(upper_bound_row(GameParams::new(m, k, 1)?)?.row)
}

/// `floor(m / (phi_k - 1))`: checkers that can be amassed on row 1 of a line.
pub fn row1_cap(m: u64, k: usize) -> Result<u64> {
    if m < 1 {
        return Err(invalid("m must be at least 1"));
    }
    let one = FieldElement::one(k);
    let x = FieldElement::from_integer(k, m).checked_div(&(&FieldElement::phi(k) - &one))?;
    to_u64(&x.floor())
}

fn to_u64(n: &BigInt) -> Result<u64> {
    n.to_u64()
        .ok_or_else(|| invalid(format!("{n} does not fit in 64 bits")))
}

/// Per-cell counts `m_0 = m, m_(i+1) = m_i + 2 row1_cap(m_i)` for each of
/// the `d - 1` projections.
pub fn projected_m(params: GameParams) -> Result<Vec<u64>> {
    let mut out = vec![params.m];
    for _ in 1..params.d {
        let m = *out.last().unwrap();
        let next = row1_cap(m, params.k)?
            .checked_mul(2)
            .and_then(|x| x.checked_add(m))
            .ok_or_else(|| invalid("projected count overflows"))?;
        out.push(next);
    }
    Ok(out)
}

/// Row reached by projecting to one dimension and filling the column.
pub fn achieved_row(params: GameParams) -> Result<i64> {
    let counts = projected_m(params)?;
    max_row_1d(*counts.last().unwrap(), params.k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub params: GameParams,
    pub lower: i64,
    /// `"formula"`, or `"construction"` when the closed form is not available.
    pub lower_source: &'static str,
    pub upper: i64,
    pub upper_raw: i64,
    pub strict_upper: bool,
    pub achieved: i64,
    pub projected_m: Vec<u64>,
    /// `m = 1` with `d >= 2`: the column fill runs on a projected count > 1.
    pub unit_m_projected: bool,
}

impl BoundsReport {
    pub fn compute(params: GameParams) -> Result<Self> {
        let upper = upper_bound_row(params)?;
        let projected = projected_m(params)?;
        let achieved = max_row_1d(*projected.last().unwrap(), params.k)?;
        let (lower, lower_source) = match lower_bound_row_formula(params) {
            Ok(v) => (v, "formula"),
            Err(_) => (achieved, "construction"),
        };
        let report = Self {
            params,
            lower,
            lower_source,
            upper: upper.row,
            upper_raw: upper.raw,
            strict_upper: upper.strict,
            achieved,
            projected_m: projected,
            unit_m_projected: params.m == 1 && params.d >= 2,
        };
        if !(report.lower <= report.achieved && report.achieved <= report.upper) {
            return Err(Error::Inconsistent(format!(
                "bounds out of order for {params:?}: {} <= {} <= {}",
                report.lower, report.achieved, report.upper
            )));
        }
        Ok(report)
    }

    pub fn gap(&self) -> bool {
        self.achieved < self.upper
    }
}

/// Counts on one cell: `(constructed, energy cap)`.
pub fn single_square_caps(params: GameParams) -> Result<(u64, u64)> {
    let projected = *projected_m(params)?.last().unwrap();
    let lower = projected
        .checked_add(2 * row1_cap(projected, params.k)?)
        .ok_or_else(|| invalid("count overflows"))?;
    let cap = projection_ratio(params.k)?
        .pow(params.d as i64)?
        .scale_int(params.m)
        .floor();
    Ok((lower, to_u64(&cap)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GapEntry {
    pub m: u64,
    pub upper: i64,
    pub achieved: i64,
}

/// The `m` values where the construction stops short of the upper bound,
/// in increasing order of `m`.
pub fn scan_gap(k: usize, d: usize, ms: impl IntoIterator<Item = u64>) -> Result<Vec<GapEntry>> {
    let ms: Vec<u64> = ms.into_iter().collect();
    let rows: Vec<Option<GapEntry>> = ms
        .par_iter()
        .map(|&m| -> Result<Option<GapEntry>> {
            let params = GameParams::new(m, k, d)?;
            let upper = upper_bound_row(params)?.row;
            let achieved = achieved_row(params)?;
            Ok((achieved < upper).then_some(GapEntry { m, upper, achieved }))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn check_epsilons(eps: &[BigRational]) -> Result<()> {
    let two = BigRational::from_integer(2.into());
    for e in eps {
        if !e.is_positive() || *e >= two {
            return Err(invalid(format!("epsilon {e} is outside (0, 2)")));
        }
    }
    Ok(())
}

/// `C = sum_i eps_i ((phi_k+1)/(phi_k-1))^i` over the given epsilons; `d + 1`
/// of them give `C(d)`.
pub fn c_bound(k: usize, eps: &[BigRational]) -> Result<FieldElement> {
    check_epsilons(eps)?;
    let ratio = projection_ratio(k)?;
    let mut power = FieldElement::one(k);
    let mut total = FieldElement::zero(k);
    for e in eps {
        total = &total + &power.scale(e);
        power = &power * &ratio;
    }
    Ok(total)
}

/// Supremum of `C(d)` as every epsilon tends to 2:
/// `2 (rho^(d+1) - 1) / (rho - 1) = (phi_k - 1)(rho^(d+1) - 1)`.
pub fn c_bound_supremum(k: usize, d: usize) -> Result<FieldElement> {
    let one = FieldElement::one(k);
    let rho = projection_ratio(k)?;
    Ok(&(&FieldElement::phi(k) - &one) * &(&rho.pow(d as i64 + 1)? - &one))
}

/// `(phi_k + 1)(rho^d - 1)`, the closed form sometimes quoted for the same
/// supremum. It is smaller than the supremum by exactly 2.
pub fn c_bound_closed_form(k: usize, d: usize) -> Result<FieldElement> {
    let one = FieldElement::one(k);
    let rho = projection_ratio(k)?;
    Ok(&(&FieldElement::phi(k) + &one) * &(&rho.pow(d as i64)? - &one))
}

/// Certified enclosure of `-log_phi(1 - C(d-2)/m * rho^(1-d))`, the amount
/// the projection falls short of the energy bound, in rows.
///
/// `eps` supplies the `d - 1` epsilons of `C(d-2)`; with `d = 1` it is empty
/// and the result is 0.
pub fn error_term(m: u64, d: usize, k: usize, eps: &[BigRational]) -> Result<RationalInterval> {
    if m < 1 || d < 1 {
        return Err(invalid("need m >= 1 and d >= 1"));
    }
    if eps.len() != d - 1 {
        return Err(invalid(format!("expected {} epsilons, got {}", d - 1, eps.len())));
    }
    if d == 1 {
        return Ok(RationalInterval::point(BigRational::zero()));
    }
    let c = c_bound(k, eps)?;
    let rho = projection_ratio(k)?;
    let shrink = rho.pow(1 - d as i64)?;
    let inner = &FieldElement::one(k)
        - &(&c * &shrink).scale(&BigRational::new(BigInt::one(), BigInt::from(m)));
    if inner.sign() <= 0 {
        return Err(Error::NonPositive);
    }
    let bits = 128;
    let x = inner.enclose(bits);
    let phi = bracket_with_bits(k, bits).as_interval();
    x.ln(bits)?.div(&phi.ln(bits)?).map(|v| v.neg())
}
