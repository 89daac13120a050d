use statrs::function::erf::erfc;

use super::{StatsError, TestOutcome};

/// Two-sided standard-normal tail probability `P(|Z| ≥ z)`.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Fisher-z test of a (partial) correlation `r` estimated from `samples`
/// rows with `cond_size` conditioning columns.
pub fn fisher_z_decision(
    r: f64,
    samples: usize,
    cond_size: usize,
    alpha_sig: f64,
) -> Result<TestOutcome, StatsError> {
    if !r.is_finite() || r.abs() > 1.0 {
        return Err(StatsError::InvalidInput(format!(
            "correlation {r} outside [-1, 1]"
        )));
    }
    if samples < cond_size + 4 {
        return Err(StatsError::InsufficientSamples {
            samples,
            required: cond_size + 4,
        });
    }
    let dof = (samples - cond_size - 3) as f64;
    let statistic = if r.abs() == 1.0 {
        f64::INFINITY
    } else {
        dof.sqrt() * r.abs().atanh()
    };
    let p_value = if statistic.is_infinite() {
        0.0
    } else {
        normal_two_sided_p(statistic)
    };
    Ok(TestOutcome {
        statistic,
        p_value,
        independent: p_value > alpha_sig,
    })
}
