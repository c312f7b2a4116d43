//! Independent checks on the leading-order model.
//!
//! [`recursive_failure_exact`] replaces `c q^2` with the full binomial tail
//! of a block that corrects one error, and [`simulate_failure`] samples the
//! same hierarchical failure process directly. Both treat every leaf and
//! every level as independent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::model::{period_depth, validate_probability, CodeParameters, ScheduleQuery};
use crate::scalar::{log1m_exp, log_sum_exp, Scalar};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// `ln P(at least 2 of m independent qubits fail)` given `ln q`.
pub fn log_block_failure_exact<T: Scalar>(log_q: T, m: u32) -> T {
    if log_q == T::neg_infinity() || m < 2 {
        return T::neg_infinity();
    }
    let log_q = log_q.min(T::zero());
    let log_keep = log1m_exp(log_q);
    let mf = T::from_u32(m);
    if log_q > -T::LN_2() {
        // Complement 1 - P(0) - P(1); the tail sum saturates near q = 1.
        let none = mf * log_keep;
        let one = mf.ln() + log_q + (mf - T::one()) * log_keep;
        return log1m_exp(log_sum_exp(&[none, one]).min(T::zero()));
    }
    // ln C(m, 1)
    let mut log_binom = mf.ln();
    let terms: Vec<T> = (2..=m)
        .map(|j| {
            let jf = T::from_u32(j);
            log_binom = log_binom + ((mf - jf + T::one()) / jf).ln();
            let survivors = m - j;
            let keep = if survivors == 0 {
                T::zero()
            } else {
                T::from_u32(survivors) * log_keep
            };
            log_binom + jf * log_q + keep
        })
        .collect();
    log_sum_exp(&terms).min(T::zero())
}

/// Probability that a block of `m` qubits, each failing independently with
/// probability `q`, sees two or more failures:
/// `1 - (1-q)^m - m q (1-q)^(m-1)`. Below `q = 1/2` this is summed as the
/// upper binomial tail so that small `q` does not cancel.
pub fn block_failure_exact<T: Scalar>(q: T, m: u32) -> Result<T> {
    validate_probability("q", q)?;
    if m < 2 {
        return Err(invalid("m", format!("m >= 2 required, got {m}")));
    }
    if q == T::zero() {
        return Ok(T::zero());
    }
    Ok(log_block_failure_exact(q.ln(), m).exp())
}

/// `ln` of [`recursive_failure_exact`]; `-inf` at `p = 0`.
pub fn log_recursive_failure_exact<T: Scalar>(
    p: T,
    code: &CodeParameters<T>,
    q: &ScheduleQuery<T>,
) -> Result<T> {
    validate_probability("p", p)?;
    let depth = period_depth(code, q)?;
    // ln(1 - (1 - p)^L)
    let mut log_eps = log1m_exp(depth * (-p).ln_1p());
    for _ in 0..q.k {
        log_eps = log_block_failure_exact(log_eps, code.m);
    }
    Ok(log_eps)
}

/// Exact top-level failure probability of the i.i.d. hierarchical model:
/// `eps_0 = 1 - (1-p)^L`, `eps_{j+1} = P(Binomial(m, eps_j) >= 2)`.
pub fn recursive_failure_exact<T: Scalar>(
    p: T,
    code: &CodeParameters<T>,
    q: &ScheduleQuery<T>,
) -> Result<T> {
    Ok(log_recursive_failure_exact(p, code, q)?.exp())
}

/// Wilson score interval at 99% confidence.
pub fn wilson_interval<T: Scalar>(failures: u64, trials: u64) -> Result<(T, T)> {
    if trials == 0 {
        return Err(Error::TrialsZero);
    }
    if failures > trials {
        return Err(invalid(
            "failures",
            format!("failures <= trials required, got {failures} > {trials}"),
        ));
    }
    let n = T::from_u64(trials);
    let phat = T::from_u64(failures) / n;
    let z = T::lit(Z_99);
    let z2 = z * z;
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let denom = T::one() + z2 / n;
    let center = (phat + z2 / (two * n)) / denom;
    let half = z / denom * (phat * (T::one() - phat) / n + z2 / (four * n * n)).sqrt();
    let low = if failures == 0 {
        T::zero()
    } else {
        (center - half).max(T::zero()).min(phat)
    };
    let high = if failures == trials {
        T::one()
    } else {
        (center + half).min(T::one()).max(phat)
    };
    Ok((low, high))
}

/// How bottom-level qubit failures are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BottomMode {
    /// One Bernoulli(p) draw per operation location, `L` per qubit.
    ExactDepth,
    /// One draw per qubit with probability `1 - (1-p)^L`.
    Collapsed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalMethod {
    WilsonScore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig<T> {
    pub p: T,
    pub code: CodeParameters<T>,
    /// `r` must be an integer here.
    pub query: ScheduleQuery<T>,
    pub trials: u64,
    pub seed: u64,
    pub bottom_mode: BottomMode,
}

impl<T: Scalar> SimulationConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::TrialsZero);
        }
        validate_probability("p", self.p)?;
        self.code.validate()?;
        self.query.validate()?;
        if self.query.integer_period().is_none() {
            return Err(invalid(
                "r",
                format!(
                    "integer r >= 1 required for simulation, got {}",
                    self.query.r
                ),
            ));
        }
        Ok(())
    }
}

/// Monte Carlo estimate with a 99% interval.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureEstimate<T> {
    pub failures: u64,
    pub trials: u64,
    pub estimate: T,
    pub ci_low: T,
    pub ci_high: T,
    pub method: IntervalMethod,
}

impl<T: Scalar> FailureEstimate<T> {
    pub fn from_counts(failures: u64, trials: u64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(failures, trials)?;
        Ok(Self {
            failures,
            trials,
            estimate: T::from_u64(failures) / T::from_u64(trials),
            ci_low,
            ci_high,
            method: IntervalMethod::WilsonScore,
        })
    }

    pub fn contains(&self, value: T) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

enum Leaf<T> {
    Collapsed(T),
    Locations { count: u64, p: T },
}

struct Sampler<T> {
    m: u32,
    k: u32,
    leaf: Leaf<T>,
}

impl<T: Scalar> Sampler<T> {
    fn leaf_fails(&self, rng: &mut ChaCha8Rng) -> bool {
        match self.leaf {
            Leaf::Collapsed(q) => T::sample_unit(rng) < q,
            Leaf::Locations { count, p } => (0..count).any(|_| T::sample_unit(rng) < p),
        }
    }

    /// Samples whether a block at `level` (0 = physical qubit) fails.
    fn block_fails(&self, level: u32, rng: &mut ChaCha8Rng) -> bool {
        if level == 0 {
            return self.leaf_fails(rng);
        }
        let mut failed = 0u32;
        for child in 0..self.m {
            if self.block_fails(level - 1, rng) {
                failed += 1;
                if failed >= 2 {
                    return true;
                }
            }
            // Remaining children cannot reach two failures.
            if failed + (self.m - child - 1) < 2 {
                return false;
            }
        }
        false
    }

    fn trial(&self, base: &ChaCha8Rng, index: u64) -> bool {
        let mut rng = base.clone();
        rng.set_stream(index);
        self.block_fails(self.k, &mut rng)
    }
}

/// Samples the level-`k` failure event `trials` times, in parallel.
pub fn simulate_failure<T: Scalar>(cfg: &SimulationConfig<T>) -> Result<FailureEstimate<T>> {
    simulate_failure_with(cfg, Execution::Parallel)
}

/// Trial `i` draws from ChaCha8 stream `i` keyed by `cfg.seed`, so the
/// failure count does not depend on `execution` or on thread scheduling.
pub fn simulate_failure_with<T: Scalar>(
    cfg: &SimulationConfig<T>,
    execution: Execution,
) -> Result<FailureEstimate<T>> {
    cfg.validate()?;
    let depth = period_depth(&cfg.code, &cfg.query)?;
    let leaf = match cfg.bottom_mode {
        BottomMode::Collapsed => Leaf::Collapsed(-(depth * (-cfg.p).ln_1p()).exp_m1()),
        BottomMode::ExactDepth => {
            if depth.fract() != T::zero() {
                return Err(invalid(
                    "depth",
                    format!("exact-depth sampling needs an integer period depth, got {depth}"),
                ));
            }
            let count = depth
                .to_u64()
                .ok_or_else(|| invalid("depth", "period depth out of range"))?;
            Leaf::Locations { count, p: cfg.p }
        }
    };
    let sampler = Sampler {
        m: cfg.code.m,
        k: cfg.query.k,
        leaf,
    };
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let failures: u64 = match execution {
        Execution::Serial => (0..cfg.trials)
            .map(|i| u64::from(sampler.trial(&base, i)))
            .sum(),
        Execution::Parallel => (0..cfg.trials)
            .into_par_iter()
            .map(|i| u64::from(sampler.trial(&base, i)))
            .sum(),
    };
    FailureEstimate::from_counts(failures, cfg.trials)
}
