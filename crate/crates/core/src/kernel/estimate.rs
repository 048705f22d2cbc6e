//! Window estimates of the upper-bound and first-return constants.

use super::{KernelError, KernelSeries};

/// `max_{1<=t<=T} p(t) t^{d_eff/2}` over the whole series.
pub fn estimate_alpha(series: &KernelSeries, d_eff: usize) -> Result<f64, KernelError> {
    let t_max = series.horizon();
    if t_max == 0 {
        return Err(KernelError::EmptyWindow);
    }
    if t_max > series.exact_horizon {
        return Err(KernelError::HorizonShortfall { requested: t_max, achievable: series.exact_horizon });
    }
    let e = d_eff as f64 / 2.0;
    Ok((1..=t_max).map(|t| series.values[t] * (t as f64).powf(e)).fold(f64::MIN, f64::max))
}

/// `max_{1<=t<=T} 1 / (f(t) t^{s_eff/2})` for `f` indexed from `t = 0`.
pub fn estimate_beta(f: &[f64], s_eff: usize) -> Result<f64, KernelError> {
    if f.len() < 2 {
        return Err(KernelError::EmptyWindow);
    }
    let e = s_eff as f64 / 2.0;
    let mut best = f64::MIN;
    for (t, &ft) in f.iter().enumerate().skip(1) {
        if ft.is_nan() || ft <= 0.0 {
            return Err(KernelError::ZeroFirstReturn(t));
        }
        best = best.max(1.0 / (ft * (t as f64).powf(e)));
    }
    Ok(best)
}
