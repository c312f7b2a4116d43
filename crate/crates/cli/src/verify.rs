//! Cross-check suite behind the `verify` subcommand.

use ftqc_threshold::{
    block_failure_exact, closed_form_period, concavity_second_difference,
    log_top_level_failure_leading, optimal_period_closed_form, optimal_period_numeric,
    period_depth, recursive_failure_exact, simulate_failure, threshold_condition, threshold_value,
    top_level_failure_leading, BottomMode, CodeParametersF64, ScheduleQueryF64,
    SimulationConfigF64,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    /// `None` when the check has no scalar measurement.
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn bound(name: &'static str, measured: f64, tolerance: f64) -> Self {
        Self {
            name,
            measured: Some(measured),
            tolerance: Some(tolerance),
            passed: measured <= tolerance,
            detail: String::new(),
        }
    }

    fn flag(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            measured: None,
            tolerance: None,
            passed,
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self::flag(name, false, err.to_string())
    }
}

pub fn render(results: &[CheckResult]) -> String {
    let mut out = format!(
        "{:<26} {:>14} {:>14}  {}\n",
        "check", "measured", "tolerance", "status"
    );
    for r in results {
        let num = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), |v| format!("{v:.3e}"));
        out.push_str(&format!(
            "{:<26} {:>14} {:>14}  {}",
            r.name,
            num(r.measured),
            num(r.tolerance),
            if r.passed { "PASS" } else { "FAIL" }
        ));
        if !r.detail.is_empty() {
            out.push_str("  ");
            out.push_str(&r.detail);
        }
        out.push('\n');
    }
    out
}

type Check = fn(&CodeParametersF64, bool) -> CheckResult;

/// Runs every check against `code`. When the parameters themselves are
/// invalid the remaining checks are reported as skipped failures.
pub fn run_checks(code: &CodeParametersF64, quick: bool) -> Vec<CheckResult> {
    let mut results = Vec::new();
    let valid = match code.validate() {
        Ok(()) => {
            let note = code.model_warning().unwrap_or_default();
            results.push(CheckResult::flag("code-parameters", true, note));
            true
        }
        Err(e) => {
            results.push(CheckResult::failed("code-parameters", e));
            false
        }
    };
    let checks: [(&'static str, Check); 9] = [
        ("composition-law", composition_law),
        ("c-scaling", c_scaling),
        ("pair-count-asymptotics", pair_count_asymptotics),
        ("exact-vs-leading", exact_vs_leading),
        ("stationarity", stationarity),
        ("golden-section", golden_section),
        ("concavity", concavity),
        ("integer-optimum", integer_optimum),
        ("threshold-boundary", threshold_boundary),
    ];
    for (name, check) in checks {
        results.push(if valid {
            check(code, quick)
        } else {
            CheckResult::flag(name, false, "skipped: invalid code parameters")
        });
    }
    if !quick {
        results.push(if valid {
            monte_carlo(code)
        } else {
            CheckResult::flag("monte-carlo", false, "skipped: invalid code parameters")
        });
    }
    results
}

fn query(k: u32, r: f64) -> ScheduleQueryF64 {
    ScheduleQueryF64 { k, r }
}

fn levels(quick: bool) -> std::ops::RangeInclusive<u32> {
    if quick {
        1..=3
    } else {
        1..=6
    }
}

fn composition_law(code: &CodeParametersF64, _quick: bool) -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        for r in [1.0, 7.0] {
            for p in [1e-5, 1e-7] {
                let q = query(k, r);
                let Ok(depth) = period_depth(code, &q) else {
                    return CheckResult::failed("composition-law", "bad query");
                };
                let mut log_eps = (depth * p).ln();
                for _ in 0..k {
                    log_eps = code.c.ln() + 2.0 * log_eps;
                }
                match log_top_level_failure_leading(p, code, &q) {
                    Ok(v) => worst = worst.max(((v - log_eps) / log_eps).abs()),
                    Err(e) => return CheckResult::failed("composition-law", e),
                }
            }
        }
    }
    CheckResult::bound("composition-law", worst, 1e-12)
}

fn c_scaling(code: &CodeParametersF64, _quick: bool) -> CheckResult {
    let doubled = CodeParametersF64 {
        c: 2.0 * code.c,
        ..code.clone()
    };
    let mut worst: f64 = 0.0;
    for k in 1..=5 {
        for r in [1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0] {
            let q = query(k, r);
            match (threshold_value(code, &q), threshold_value(&doubled, &q)) {
                (Ok(a), Ok(b)) => worst = worst.max((2.0 * b.p_th / a.p_th - 1.0).abs()),
                (Err(e), _) | (_, Err(e)) => return CheckResult::failed("c-scaling", e),
            }
        }
    }
    CheckResult::bound("c-scaling", worst, 1e-14)
}

fn pair_count_asymptotics(code: &CodeParametersF64, _quick: bool) -> CheckResult {
    let q: f64 = 1e-4;
    match block_failure_exact(q, code.m) {
        Ok(v) => {
            let mut r = CheckResult::bound(
                "pair-count-asymptotics",
                (v / (code.c * q * q) - 1.0).abs(),
                2e-3,
            );
            if !r.passed {
                r.detail = format!(
                    "c = {} differs from C(m,2) = {}",
                    code.c,
                    CodeParametersF64::default_c(code.m)
                );
            }
            r
        }
        Err(e) => CheckResult::failed("pair-count-asymptotics", e),
    }
}

/// Relative gap between exact and leading-order recursion, in units of the
/// first-order bound `5 2^k L p`.
fn exact_vs_leading(code: &CodeParametersF64, _quick: bool) -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in 1..=3u32 {
        for r in [1.0, 7.0] {
            for p in [1e-5, 1e-6] {
                let q = query(k, r);
                let result = (|| -> ftqc_threshold::Result<f64> {
                    let depth = period_depth(code, &q)?;
                    let exact = recursive_failure_exact(p, code, &q)?;
                    let lead = top_level_failure_leading(p, code, &q)?.value;
                    Ok((exact / lead - 1.0).abs() / (5.0 * f64::from(1u32 << k) * depth * p))
                })();
                match result {
                    Ok(v) => worst = worst.max(v),
                    Err(e) => return CheckResult::failed("exact-vs-leading", e),
                }
            }
        }
    }
    CheckResult::bound("exact-vs-leading", worst, 1.0)
}

/// `r* |d ln(p_th)/dr|` at the closed-form optimum, central difference.
fn stationarity(code: &CodeParametersF64, quick: bool) -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in levels(quick) {
        let result = (|| -> ftqc_threshold::Result<f64> {
            let r = closed_form_period(code, k)?;
            let h = r * 1e-4;
            let up = threshold_value(code, &query(k, r + h))?.log_p_th;
            let down = threshold_value(code, &query(k, r - h))?.log_p_th;
            Ok(((up - down) / (2.0 * h) * r).abs())
        })();
        match result {
            Ok(v) => worst = worst.max(v),
            Err(e) => return CheckResult::failed("stationarity", e),
        }
    }
    CheckResult::bound("stationarity", worst, 1e-6)
}

fn golden_section(code: &CodeParametersF64, quick: bool) -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in levels(quick) {
        let result = (|| -> ftqc_threshold::Result<f64> {
            let closed = closed_form_period(code, k)?;
            let numeric = optimal_period_numeric(code, k, 100.0)?;
            Ok((numeric / closed - 1.0).abs())
        })();
        match result {
            Ok(v) => worst = worst.max(v),
            Err(e) => return CheckResult::failed("golden-section", e),
        }
    }
    CheckResult::bound("golden-section", worst, 1e-6)
}

fn concavity(code: &CodeParametersF64, quick: bool) -> CheckResult {
    let mut failing = Vec::new();
    for k in levels(quick) {
        match concavity_second_difference(code, k) {
            Ok(v) if v < 0.0 => {}
            Ok(_) => failing.push(k),
            Err(e) => return CheckResult::failed("concavity", e),
        }
    }
    let detail = if failing.is_empty() {
        String::new()
    } else {
        format!("second difference not negative at k = {failing:?}")
    };
    CheckResult::flag("concavity", failing.is_empty(), detail)
}

fn integer_optimum(code: &CodeParametersF64, _quick: bool) -> CheckResult {
    for k in 1..=4 {
        let result = (|| -> ftqc_threshold::Result<bool> {
            let opt = optimal_period_closed_form(code, k)?;
            let hi = 4 * (opt.r_continuous.ceil() as u32).max(1);
            let best = threshold_value(code, &query(k, f64::from(opt.r_integer)))?.log_p_th;
            for n in 1..=hi {
                if threshold_value(code, &query(k, f64::from(n)))?.log_p_th > best {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        match result {
            Ok(true) => {}
            Ok(false) => {
                return CheckResult::flag("integer-optimum", false, format!("beaten at k = {k}"))
            }
            Err(e) => return CheckResult::failed("integer-optimum", e),
        }
    }
    CheckResult::flag("integer-optimum", true, "")
}

fn threshold_boundary(code: &CodeParametersF64, _quick: bool) -> CheckResult {
    let mut mismatches = 0u32;
    for k in 1..=4 {
        for r in [1.0, 7.0] {
            let q = query(k, r);
            let result = (|| -> ftqc_threshold::Result<u32> {
                let pth = threshold_value(code, &q)?.p_th;
                let mut bad = 0;
                bad += u32::from(!threshold_condition(pth, code, &q)?);
                bad += u32::from(!threshold_condition(pth * (1.0 - 1e-6), code, &q)?);
                bad += u32::from(threshold_condition(pth * (1.0 + 1e-6), code, &q)?);
                Ok(bad)
            })();
            match result {
                Ok(b) => mismatches += b,
                Err(e) => return CheckResult::failed("threshold-boundary", e),
            }
        }
    }
    CheckResult::bound("threshold-boundary", f64::from(mismatches), 0.0)
}

const MC_SEEDS: u64 = 20;
const MC_TRIALS: u64 = 20_000;

/// Fraction of seeded runs whose 99% interval misses the exact recursion.
fn monte_carlo(code: &CodeParametersF64) -> CheckResult {
    let q = query(1, 7.0);
    let p = 1e-2;
    let exact = match recursive_failure_exact(p, code, &q) {
        Ok(v) => v,
        Err(e) => return CheckResult::failed("monte-carlo", e),
    };
    let mut misses = 0u64;
    for seed in 0..MC_SEEDS {
        let cfg = SimulationConfigF64 {
            p,
            code: code.clone(),
            query: q,
            trials: MC_TRIALS,
            seed,
            bottom_mode: BottomMode::Collapsed,
        };
        match simulate_failure(&cfg) {
            Ok(est) => misses += u64::from(!est.contains(exact)),
            Err(e) => return CheckResult::failed("monte-carlo", e),
        }
    }
    CheckResult::bound("monte-carlo", misses as f64 / MC_SEEDS as f64, 0.1)
}
