//! Depth model, leading-order failure recursion and the threshold value for
//! a `[m, 1]` code concatenated `k` times with error correction every `r`
//! operations.
//!
//! Everything that involves `L^(2^k)` is evaluated through logarithms; at
//! `k = 10` the exponent is already 1024.

use crate::error::{invalid, Error, Result};
use crate::scalar::{pow2, Scalar};

/// Largest concatenation level accepted anywhere in the crate.
pub const MAX_LEVEL: u32 = 62;

/// Code and circuit constants of the analytic model.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeParameters<T> {
    pub name: String,
    /// Physical qubits per block.
    pub m: u32,
    /// Encoding depth per level.
    pub alpha: u32,
    /// Decoding depth per level.
    pub beta: u32,
    /// Average depth of one fault-tolerant gate.
    pub delta: T,
    /// Leading-order block failure constant, `P(block) ~ c q^2`.
    pub c: T,
}

impl<T: Scalar> CodeParameters<T> {
    /// Builds and validates a parameter set. `c` defaults to `m(m-1)/2`.
    pub fn new(
        name: impl Into<String>,
        m: u32,
        alpha: u32,
        beta: u32,
        delta: T,
        c: Option<T>,
    ) -> Result<Self> {
        let code = Self {
            name: name.into(),
            m,
            alpha,
            beta,
            delta,
            c: c.unwrap_or_else(|| Self::default_c(m)),
        };
        code.validate()?;
        Ok(code)
    }

    /// `[[7,1,3]]` Steane code: `m = 7`, `c = 21`, `alpha = 4`, `beta = 10`,
    /// `delta = 2`.
    pub fn steane() -> Self {
        Self {
            name: "steane".to_owned(),
            m: 7,
            alpha: 4,
            beta: 10,
            delta: T::lit(2.0),
            c: T::lit(21.0),
        }
    }

    /// Number of two-qubit error patterns in a block, `C(m, 2)`.
    pub fn default_c(m: u32) -> T {
        T::from_u64(u64::from(m) * u64::from(m.saturating_sub(1)) / 2)
    }

    /// Checks the hard invariants. Blocks of size 2 pass (the exact oracle
    /// accepts them) but see [`CodeParameters::model_warning`].
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(invalid("m", format!("m >= 2 required, got {}", self.m)));
        }
        if self.alpha < 1 {
            return Err(invalid("alpha", "alpha >= 1 required"));
        }
        if self.beta < 1 {
            return Err(invalid("beta", "beta >= 1 required"));
        }
        if !(self.delta.is_finite() && self.delta >= T::one()) {
            return Err(invalid(
                "delta",
                format!("delta >= 1 required, got {}", self.delta),
            ));
        }
        if !(self.c.is_finite() && self.c > T::zero()) {
            return Err(invalid("c", format!("c > 0 required, got {}", self.c)));
        }
        Ok(())
    }

    /// Non-fatal note for parameter sets outside the range the threshold
    /// model is documented for.
    pub fn model_warning(&self) -> Option<String> {
        (self.m < 3).then(|| {
            format!(
                "m = {} is accepted by the exact oracle but the threshold model assumes m >= 3",
                self.m
            )
        })
    }

    /// `alpha + beta` as a scalar.
    pub fn correction_depth(&self) -> T {
        T::from_u32(self.alpha) + T::from_u32(self.beta)
    }
}

/// A concatenation level together with an error-correction period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleQuery<T> {
    pub k: u32,
    /// Operations per qubit between two corrections. Real-valued so the
    /// period can be optimized continuously.
    pub r: T,
}

impl<T: Scalar> ScheduleQuery<T> {
    pub fn new(k: u32, r: T) -> Result<Self> {
        let q = Self { k, r };
        q.validate()?;
        Ok(q)
    }

    /// Query with an integer period, as a circuit would have.
    pub fn integer(k: u32, r: u32) -> Result<Self> {
        if r < 1 {
            return Err(invalid("r", "r >= 1 required"));
        }
        Self::new(k, T::from_u32(r))
    }

    pub fn validate(&self) -> Result<()> {
        validate_level(self.k)?;
        if !(self.r.is_finite() && self.r > T::zero()) {
            return Err(invalid("r", format!("r > 0 required, got {}", self.r)));
        }
        Ok(())
    }

    /// The period as an integer, when it is one.
    pub fn integer_period(&self) -> Option<u32> {
        let r = self.r;
        if r >= T::one() && r.fract() == T::zero() {
            r.to_u32()
        } else {
            None
        }
    }
}

pub(crate) fn validate_level(k: u32) -> Result<()> {
    if !(1..=MAX_LEVEL).contains(&k) {
        return Err(invalid(
            "k",
            format!("1 <= k <= {MAX_LEVEL} required, got {k}"),
        ));
    }
    Ok(())
}

pub(crate) fn validate_probability<T: Scalar>(name: &'static str, p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(invalid(name, format!("{name} in [0, 1] required, got {p}")));
    }
    Ok(())
}

/// How the per-qubit error over one period is formed from the per-operation
/// probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorModel {
    /// `1 - (1 - p)^L`
    Exact,
    /// `L p`
    Leading,
}

/// Threshold at a single `(k, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPoint<T> {
    pub query: ScheduleQuery<T>,
    pub depth: T,
    pub log_p_th: T,
    pub p_th: T,
}

/// Thresholds over increasing `r` at fixed `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve<T> {
    pub code: CodeParameters<T>,
    pub k: u32,
    pub points: Vec<ThresholdPoint<T>>,
}

impl<T: Scalar> ThresholdCurve<T> {
    /// Point with the largest threshold; ties go to the smaller `r`.
    pub fn argmax(&self) -> Option<&ThresholdPoint<T>> {
        self.points.iter().fold(None, |best, p| match best {
            Some(b) if b.log_p_th >= p.log_p_th => Some(b),
            _ => Some(p),
        })
    }
}

/// Leading-order top-level failure probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingFailure<T> {
    /// Natural log of the failure probability; `-inf` when `p = 0`.
    pub log_value: T,
    /// `exp(log_value)`. Not clamped: values above 1 are possible outside
    /// the perturbative regime.
    pub value: T,
    /// `c L p < 1`, i.e. each level of concatenation reduces the error.
    pub regime_valid: bool,
}

/// Logical depth of one error-correction period, `alpha k + beta k + r delta`.
pub fn period_depth<T: Scalar>(code: &CodeParameters<T>, q: &ScheduleQuery<T>) -> Result<T> {
    code.validate()?;
    q.validate()?;
    Ok(depth_unchecked(code, q))
}

#[inline]
fn depth_unchecked<T: Scalar>(code: &CodeParameters<T>, q: &ScheduleQuery<T>) -> T {
    code.correction_depth() * T::from_u32(q.k) + q.r * code.delta
}

/// Error probability of one physical qubit over a period of `depth`
/// operations.
pub fn per_qubit_error<T: Scalar>(p: T, depth: T, mode: ErrorModel) -> Result<T> {
    validate_probability("p", p)?;
    if !(depth.is_finite() && depth > T::zero()) {
        return Err(invalid("depth", format!("depth > 0 required, got {depth}")));
    }
    Ok(match mode {
        // 1 - exp(L ln(1 - p))
        ErrorModel::Exact => -(depth * (-p).ln_1p()).exp_m1(),
        ErrorModel::Leading => (depth * p).min(T::one()),
    })
}

/// `c q^2`, deliberately not clamped to 1.
pub fn block_failure_leading<T: Scalar>(q: T, c: T) -> Result<T> {
    validate_probability("q", q)?;
    if !(c.is_finite() && c > T::zero()) {
        return Err(invalid("c", format!("c > 0 required, got {c}")));
    }
    Ok(c * q * q)
}

/// Natural log of `(1/c) [c L p]^(2^k)`. Fails with a domain error at
/// `p = 0`, where the logarithm does not exist.
pub fn log_top_level_failure_leading<T: Scalar>(
    p: T,
    code: &CodeParameters<T>,
    q: &ScheduleQuery<T>,
) -> Result<T> {
    validate_probability("p", p)?;
    if p == T::zero() {
        return Err(Error::Domain("log of a zero failure probability"));
    }
    let depth = period_depth(code, q)?;
    Ok(log_top_from_eps0(code.c, q.k, (depth * p).ln()))
}

fn log_top_from_eps0<T: Scalar>(c: T, k: u32, log_eps0: T) -> T {
    let ln_c = c.ln();
    -ln_c + pow2::<T>(k) * (ln_c + log_eps0)
}

/// Leading-order failure probability of one top-level logical qubit over
/// one period, `(1/c) [c L p]^(2^k)`.
pub fn top_level_failure_leading<T: Scalar>(
    p: T,
    code: &CodeParameters<T>,
    q: &ScheduleQuery<T>,
) -> Result<LeadingFailure<T>> {
    top_level_failure(p, code, q, ErrorModel::Leading)
}

/// As [`top_level_failure_leading`], with the bottom-level qubit error
/// formed per `mode`. `Leading` uses `L p` without clamping.
pub fn top_level_failure<T: Scalar>(
    p: T,
    code: &CodeParameters<T>,
    q: &ScheduleQuery<T>,
    mode: ErrorModel,
) -> Result<LeadingFailure<T>> {
    validate_probability("p", p)?;
    let depth = period_depth(code, q)?;
    let eps0 = match mode {
        ErrorModel::Leading => depth * p,
        ErrorModel::Exact => per_qubit_error(p, depth, ErrorModel::Exact)?,
    };
    let regime_valid = code.c * eps0 < T::one();
    if eps0 == T::zero() {
        return Ok(LeadingFailure {
            log_value: T::neg_infinity(),
            value: T::zero(),
            regime_valid,
        });
    }
    let log_value = log_top_from_eps0(code.c, q.k, eps0.ln());
    Ok(LeadingFailure {
        log_value,
        value: log_value.exp(),
        regime_valid,
    })
}

/// Whether `k` levels of concatenation bring the per-period error below
/// the unprotected `r p`. Compared in the log domain; equality within
/// [`Scalar::log_equality_tolerance`] counts as satisfied.
pub fn threshold_condition<T: Scalar>(
    p: T,
    code: &CodeParameters<T>,
    q: &ScheduleQuery<T>,
) -> Result<bool> {
    if !(p > T::zero() && p <= T::one()) {
        return Err(invalid("p", format!("p in (0, 1] required, got {p}")));
    }
    let lhs = log_top_level_failure_leading(p, code, q)?;
    let rhs = q.r.ln() + p.ln();
    let scale = lhs.abs().max(rhs.abs()).max(T::one());
    Ok(lhs - rhs <= T::log_equality_tolerance() * scale)
}

/// `ln(p_th) + ln(c)`, the part of the threshold that does not depend on `c`.
fn log_threshold_sans_c<T: Scalar>(depth: T, q: &ScheduleQuery<T>) -> T {
    let n = pow2::<T>(q.k);
    (q.r.ln() - n * depth.ln()) / (n - T::one())
}

/// Threshold value `p_th = (1/c) (r / L^(2^k))^(1/(2^k - 1))`.
pub fn threshold_value<T: Scalar>(
    code: &CodeParameters<T>,
    q: &ScheduleQuery<T>,
) -> Result<ThresholdPoint<T>> {
    let depth = period_depth(code, q)?;
    let g = log_threshold_sans_c(depth, q);
    Ok(ThresholdPoint {
        query: *q,
        depth,
        log_p_th: g - code.c.ln(),
        // Dividing last keeps p_th exactly proportional to 1/c.
        p_th: g.exp() / code.c,
    })
}

/// Analytic `d ln(p_th) / dr = (1/r - 2^k delta / L) / (2^k - 1)`.
pub fn log_threshold_slope<T: Scalar>(code: &CodeParameters<T>, q: &ScheduleQuery<T>) -> Result<T> {
    let depth = period_depth(code, q)?;
    let n = pow2::<T>(q.k);
    Ok((q.r.recip() - n * code.delta / depth) / (n - T::one()))
}

/// Threshold at every `r` in `r_values` (strictly increasing, all positive).
pub fn scan_threshold_curve<T: Scalar>(
    code: &CodeParameters<T>,
    k: u32,
    r_values: &[T],
) -> Result<ThresholdCurve<T>> {
    code.validate()?;
    validate_level(k)?;
    if r_values.is_empty() {
        return Err(Error::EmptyRange("no r values to scan"));
    }
    if r_values
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(invalid("r_values", "must be strictly increasing"));
    }
    let points = r_values
        .iter()
        .map(|&r| threshold_value(code, &ScheduleQuery::new(k, r)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurve {
        code: code.clone(),
        k,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steane() -> CodeParameters<f64> {
        CodeParameters::steane()
    }

    fn q(k: u32, r: f64) -> ScheduleQuery<f64> {
        ScheduleQuery::new(k, r).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn steane_registry_values() {
        let s = steane();
        assert_eq!((s.m, s.alpha, s.beta), (7, 4, 10));
        assert_eq!((s.delta, s.c), (2.0, 21.0));
        assert_eq!(CodeParameters::<f64>::default_c(7), 21.0);
        let built = CodeParameters::new("steane", 7, 4, 10, 2.0, None).unwrap();
        assert_eq!(built, s);
    }

    #[test]
    fn invalid_code_parameters() {
        assert!(CodeParameters::new("x", 1, 4, 10, 2.0, None).is_err());
        assert!(CodeParameters::new("x", 7, 0, 10, 2.0, None).is_err());
        assert!(CodeParameters::new("x", 7, 4, 0, 2.0, None).is_err());
        assert!(CodeParameters::new("x", 7, 4, 10, 0.5, None).is_err());
        assert!(CodeParameters::new("x", 7, 4, 10, f64::NAN, None).is_err());
        assert!(CodeParameters::new("x", 7, 4, 10, 2.0, Some(0.0)).is_err());
        let two = CodeParameters::new("x", 2, 1, 1, 1.0, Some(1.0)).unwrap();
        assert!(two.model_warning().is_some());
        assert!(steane().model_warning().is_none());
    }

    #[test]
    fn invalid_queries() {
        assert!(ScheduleQuery::new(0, 7.0).is_err());
        assert!(ScheduleQuery::new(MAX_LEVEL + 1, 7.0).is_err());
        assert!(ScheduleQuery::new(1, 0.0).is_err());
        assert!(ScheduleQuery::new(1, -1.0).is_err());
        assert!(ScheduleQuery::<f64>::integer(1, 0).is_err());
        assert_eq!(q(1, 7.0).integer_period(), Some(7));
        assert_eq!(q(1, 7.5).integer_period(), None);
    }

    #[test]
    fn depth_examples() {
        assert_eq!(period_depth(&steane(), &q(1, 7.0)).unwrap(), 28.0);
        assert_eq!(period_depth(&steane(), &q(2, 5.0)).unwrap(), 38.0);
        let tiny = period_depth(&steane(), &q(1, 1e-300)).unwrap();
        assert_eq!(tiny, 14.0);
    }

    #[test]
    fn per_qubit_error_examples() {
        assert_eq!(per_qubit_error(0.0, 28.0, ErrorModel::Exact).unwrap(), 0.0);
        let lead = per_qubit_error(1e-4, 28.0, ErrorModel::Leading).unwrap();
        assert!(rel(lead, 2.8e-3) < 1e-15);
        // 1 - (1 - 1e-4)^28 at 50 digits: 2.7962232739534824234e-3
        let exact = per_qubit_error(1e-4, 28.0, ErrorModel::Exact).unwrap();
        assert!(rel(exact, 2.796_223_273_953_482_4e-3) < 1e-13);
        assert!(exact <= lead);
        assert_eq!(
            per_qubit_error(0.5, 28.0, ErrorModel::Leading).unwrap(),
            1.0
        );
        assert!(per_qubit_error(1.5, 28.0, ErrorModel::Exact).is_err());
        assert!(per_qubit_error(-0.1, 28.0, ErrorModel::Exact).is_err());
        assert!(per_qubit_error(0.1, 0.0, ErrorModel::Exact).is_err());
    }

    #[test]
    fn block_failure_leading_examples() {
        assert_eq!(block_failure_leading(0.0, 21.0).unwrap(), 0.0);
        let v = block_failure_leading(2.8e-3, 21.0).unwrap();
        assert!(rel(v, 1.6464e-4) < 1e-14);
        assert_eq!(block_failure_leading(0.5, 21.0).unwrap(), 5.25);
        assert!(block_failure_leading(0.5, 0.0).is_err());
    }

    #[test]
    fn top_level_examples() {
        let s = steane();
        let one = top_level_failure_leading(1e-4, &s, &q(1, 7.0)).unwrap();
        assert!(rel(one.value, 21.0 * 2.8e-3 * 2.8e-3) < 1e-13);
        assert!(one.regime_valid);

        let zero = top_level_failure_leading(0.0, &s, &q(3, 7.0)).unwrap();
        assert_eq!(zero.value, 0.0);
        assert_eq!(zero.log_value, f64::NEG_INFINITY);
        assert_eq!(
            log_top_level_failure_leading(0.0, &s, &q(3, 7.0)),
            Err(Error::Domain("log of a zero failure probability"))
        );

        // L = 8 + 20 + 14 = 42; two squarings from 42e-4.
        let two = top_level_failure_leading(1e-4, &s, &q(2, 7.0)).unwrap();
        let mut eps: f64 = 42e-4;
        for _ in 0..2 {
            eps = 21.0 * eps * eps;
        }
        assert!(rel(two.value, eps) < 1e-12);
    }

    #[test]
    fn regime_flag_reports_breakdown() {
        let big = top_level_failure_leading(1e-2, &steane(), &q(1, 7.0)).unwrap();
        assert!(!big.regime_valid);
        assert!(big.value > 1.0);
    }

    #[test]
    fn exact_bottom_layer_is_below_leading() {
        let s = steane();
        let lead = top_level_failure(1e-3, &s, &q(2, 7.0), ErrorModel::Leading).unwrap();
        let exact = top_level_failure(1e-3, &s, &q(2, 7.0), ErrorModel::Exact).unwrap();
        assert!(exact.value < lead.value);
    }

    #[test]
    fn threshold_goldens() {
        let s = steane();
        let a = threshold_value(&s, &q(1, 7.0)).unwrap();
        assert!(rel(a.p_th, 1.0 / 2352.0) < 1e-14);
        assert_eq!(a.depth, 28.0);
        let b = threshold_value(&s, &q(1, 1.0)).unwrap();
        assert!(rel(b.p_th, 1.0 / 5376.0) < 1e-14);
        // 50-digit evaluation: 6.3775510204081632653e-4 (= 1/1568)
        let c = threshold_value(&s, &q(2, 14.0 / 3.0)).unwrap();
        assert!(rel(c.p_th, 6.377_551_020_408_163e-4) < 1e-13);
    }

    #[test]
    fn threshold_survives_deep_concatenation() {
        let p = threshold_value(&steane(), &q(20, 1.0)).unwrap();
        assert!(p.p_th > 0.0 && p.p_th < 1.0);
        assert!(p.log_p_th.is_finite());
    }

    #[test]
    fn condition_boundary() {
        let s = steane();
        let query = q(1, 7.0);
        let pth = threshold_value(&s, &query).unwrap().p_th;
        assert!(threshold_condition(pth, &s, &query).unwrap());
        assert!(threshold_condition(pth * (1.0 - 1e-6), &s, &query).unwrap());
        assert!(!threshold_condition(pth * (1.0 + 1e-6), &s, &query).unwrap());
        assert!(threshold_condition(1e-300, &s, &query).unwrap());
        assert!(threshold_condition(0.0, &s, &query).is_err());
    }

    #[test]
    fn slope_vanishes_at_closed_form_optimum() {
        let s = steane();
        let slope = log_threshold_slope(&s, &q(1, 7.0)).unwrap();
        assert!(slope.abs() < 1e-15);
        assert!(log_threshold_slope(&s, &q(1, 3.0)).unwrap() > 0.0);
        assert!(log_threshold_slope(&s, &q(1, 30.0)).unwrap() < 0.0);
    }

    #[test]
    fn scan_examples() {
        let s = steane();
        let rs: Vec<f64> = (1..=20).map(f64::from).collect();
        let curve = scan_threshold_curve(&s, 1, &rs).unwrap();
        assert_eq!(curve.points.len(), 20);
        assert_eq!(curve.argmax().unwrap().query.r, 7.0);

        let k4 = scan_threshold_curve(&s, 4, &rs).unwrap();
        assert_eq!(k4.argmax().unwrap().query.r, 2.0);
        for w in k4.points[1..].windows(2) {
            assert!(w[1].log_p_th < w[0].log_p_th);
        }

        let single = scan_threshold_curve(&s, 3, &[4.5]).unwrap();
        assert_eq!(single.points[0], threshold_value(&s, &q(3, 4.5)).unwrap());

        assert_eq!(
            scan_threshold_curve(&s, 1, &[]),
            Err(Error::EmptyRange("no r values to scan"))
        );
        assert!(scan_threshold_curve(&s, 1, &[2.0, 2.0]).is_err());
        assert!(scan_threshold_curve(&s, 1, &[0.0, 2.0]).is_err());
    }

    #[test]
    fn f32_path_agrees_to_single_precision() {
        let s = CodeParameters::<f32>::steane();
        let p = threshold_value(&s, &ScheduleQuery::new(1, 7.0f32).unwrap()).unwrap();
        assert!(((p.p_th - 1.0 / 2352.0) / (1.0 / 2352.0)).abs() < 1e-5);
        assert!(threshold_condition(p.p_th, &s, &p.query).unwrap());
    }
}
