//! Optimal error-correction period.
//!
//! Setting `d ln(p_th)/dr = 0` gives `r* = (alpha + beta) k / (delta (2^k - 1))`.
//! This module evaluates that closed form, resolves the best integer period
//! by direct comparison, and cross-checks both with a golden-section search
//! and finite differences.

use std::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::model::{
    threshold_value, top_level_failure_leading, validate_level, CodeParameters, ScheduleQuery,
};
use crate::scalar::{pow2, Scalar};

/// Default level cap for [`required_level`].
pub const DEFAULT_MAX_LEVEL: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPeriod<T> {
    pub k: u32,
    pub r_continuous: T,
    pub r_integer: u32,
    pub p_th_at_continuous: T,
    pub p_th_at_integer: T,
    pub concavity_ok: bool,
}

/// `(alpha + beta) k / (delta (2^k - 1))`.
pub fn closed_form_period<T: Scalar>(code: &CodeParameters<T>, k: u32) -> Result<T> {
    code.validate()?;
    validate_level(k)?;
    let num = code.correction_depth() * T::from_u32(k);
    let den = code.delta * (pow2::<T>(k) - T::one());
    Ok(num / den)
}

/// Closed-form optimum plus the best integer period. The integer optimum is
/// picked by comparing `ln(p_th)` at the floor and ceiling of `r*` (floor
/// clamped to 1), never by rounding.
pub fn optimal_period_closed_form<T: Scalar>(
    code: &CodeParameters<T>,
    k: u32,
) -> Result<OptimalPeriod<T>> {
    let r_continuous = closed_form_period(code, k)?;
    let at_continuous = threshold_value(code, &ScheduleQuery::new(k, r_continuous)?)?;

    let floor = r_continuous
        .floor()
        .to_u32()
        .ok_or_else(|| invalid("r", "optimal period out of integer range"))?
        .max(1);
    let ceil = r_continuous
        .ceil()
        .to_u32()
        .ok_or_else(|| invalid("r", "optimal period out of integer range"))?
        .max(1);
    let mut best = threshold_value(code, &ScheduleQuery::integer(k, floor)?)?;
    let mut r_integer = floor;
    if ceil != floor {
        let up = threshold_value(code, &ScheduleQuery::integer(k, ceil)?)?;
        if up.log_p_th > best.log_p_th {
            best = up;
            r_integer = ceil;
        }
    }

    Ok(OptimalPeriod {
        k,
        r_continuous,
        r_integer,
        p_th_at_continuous: at_continuous.p_th,
        // The integer point cannot beat the true maximum; rounding in the
        // last ulp is absorbed here.
        p_th_at_integer: best.p_th.min(at_continuous.p_th),
        concavity_ok: verify_concavity(code, k)?,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const MAX_GOLDEN_ITERATIONS: usize = 500;

/// Golden-section search for the maximum of a unimodal function on
/// `[lo, hi]`, given only a comparison `cmp(x, y)` that orders `f(x)`
/// against `f(y)`. Stops once the bracket is narrower than `rel_tol` times
/// its midpoint.
pub fn golden_section_max_by<T, C>(mut lo: T, mut hi: T, rel_tol: T, cmp: C) -> T
where
    T: Scalar,
    C: Fn(T, T) -> Ordering,
{
    let ratio = T::lit(INV_PHI);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    for _ in 0..MAX_GOLDEN_ITERATIONS {
        if hi - lo <= rel_tol * ((lo + hi) / T::lit(2.0)).abs() {
            break;
        }
        if cmp(x1, x2) == Ordering::Less {
            lo = x1;
            x1 = x2;
            x2 = lo + ratio * (hi - lo);
        } else {
            hi = x2;
            x2 = x1;
            x1 = hi - ratio * (hi - lo);
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// [`golden_section_max_by`] on function values.
pub fn golden_section_max<T, F>(lo: T, hi: T, rel_tol: T, f: F) -> T
where
    T: Scalar,
    F: Fn(T) -> T,
{
    golden_section_max_by(lo, hi, rel_tol, |a, b| {
        f(a).partial_cmp(&f(b)).unwrap_or(Ordering::Equal)
    })
}

const NUMERIC_REL_TOL: f64 = 1e-9;
const MAX_BRACKET_DOUBLINGS: u32 = 64;

/// Maximizes `ln(p_th)` over `r in (0, r_max]` by golden-section search.
/// `r_max` is doubled while the maximizer sits on the upper edge.
pub fn optimal_period_numeric<T: Scalar>(code: &CodeParameters<T>, k: u32, r_max: T) -> Result<T> {
    code.validate()?;
    validate_level(k)?;
    if !(r_max.is_finite() && r_max > T::zero()) {
        return Err(invalid("r_max", format!("r_max > 0 required, got {r_max}")));
    }
    let n = pow2::<T>(k);
    let base = code.correction_depth() * T::from_u32(k);
    let delta = code.delta;
    // sign of ln p_th(a) - ln p_th(b), formed from ratios so it stays
    // accurate when a and b are close
    let cmp = |a: T, b: T| {
        let lb = base + b * delta;
        let diff = ((a - b) / b).ln_1p() - n * (delta * (a - b) / lb).ln_1p();
        diff.partial_cmp(&T::zero()).unwrap_or(Ordering::Equal)
    };
    let tol = T::lit(NUMERIC_REL_TOL).max(T::epsilon() * T::lit(16.0));
    let mut hi = r_max;
    for _ in 0..=MAX_BRACKET_DOUBLINGS {
        let lo = hi * T::lit(1e-12);
        let r = golden_section_max_by(lo, hi, tol, cmp);
        let edge = T::lit(4.0) * tol * hi;
        if r <= lo + edge {
            break;
        }
        if r < hi - edge {
            return Ok(r);
        }
        hi = hi * T::lit(2.0);
    }
    Err(Error::NoInteriorMaximum {
        r_max: r_max.to_f64().unwrap_or(f64::NAN),
    })
}

/// Central second difference of `p_th(r)` at `r*` with step `r* 1e-4`.
pub fn concavity_second_difference<T: Scalar>(code: &CodeParameters<T>, k: u32) -> Result<T> {
    let r = closed_form_period(code, k)?;
    let h = r * T::lit(1e-4);
    let f = |x: T| -> Result<T> { Ok(threshold_value(code, &ScheduleQuery::new(k, x)?)?.p_th) };
    Ok((f(r + h)? - T::lit(2.0) * f(r)? + f(r - h)?) / (h * h))
}

/// True when `p_th(r)` curves downward at the closed-form optimum.
pub fn verify_concavity<T: Scalar>(code: &CodeParameters<T>, k: u32) -> Result<bool> {
    Ok(concavity_second_difference(code, k)? < T::zero())
}

/// Smallest level `k <= 20` that brings the leading-order top-level failure
/// down to `target` while staying in the perturbative regime.
pub fn required_level<T: Scalar>(
    code: &CodeParameters<T>,
    p: T,
    r: u32,
    target: T,
) -> Result<Option<u32>> {
    required_level_up_to(code, p, r, target, DEFAULT_MAX_LEVEL)
}

pub fn required_level_up_to<T: Scalar>(
    code: &CodeParameters<T>,
    p: T,
    r: u32,
    target: T,
    k_max: u32,
) -> Result<Option<u32>> {
    code.validate()?;
    validate_level(k_max)?;
    if !(p > T::zero() && p < T::one()) {
        return Err(invalid("p", format!("p in (0, 1) required, got {p}")));
    }
    if !(target > T::zero() && target < T::one()) {
        return Err(invalid(
            "target",
            format!("target in (0, 1) required, got {target}"),
        ));
    }
    let log_target = target.ln();
    for k in 1..=k_max {
        let failure = top_level_failure_leading(p, code, &ScheduleQuery::integer(k, r)?)?;
        if failure.regime_valid && failure.log_value <= log_target {
            return Ok(Some(k));
        }
    }
    Ok(None)
}
