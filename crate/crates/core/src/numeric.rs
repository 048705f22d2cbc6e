//! Small numeric helpers shared by the kernel, verification and output code.

use std::fmt;

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<CompensatedSum>().value()
}

/// Closed real interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "empty interval [{lower}, {upper}]");
        Self { lower, upper }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_g(self.lower, 17), format_g(self.upper, 17))
    }
}

/// Probability mass function of `Binomial(n, q)` for `k = 0..=n`.
///
/// Terms are generated multiplicatively outward from the mode and normalized
/// by their sum, so nothing overflows and tails underflow to zero harmlessly
/// even for `n` in the tens of thousands.
pub fn binomial_pmf(n: usize, q: f64) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&q), "binomial probability {q} out of range");
    let mut w = vec![0.0; n + 1];
    if q == 0.0 {
        w[0] = 1.0;
        return w;
    }
    if q == 1.0 {
        w[n] = 1.0;
        return w;
    }
    let mode = (((n + 1) as f64) * q).floor().min(n as f64) as usize;
    let odds = q / (1.0 - q);
    w[mode] = 1.0;
    for k in mode..n {
        // w[k+1] / w[k] = (n-k)/(k+1) * q/(1-q)
        w[k + 1] = w[k] * ((n - k) as f64) / ((k + 1) as f64) * odds;
        if w[k + 1] == 0.0 {
            break;
        }
    }
    for k in (0..mode).rev() {
        w[k] = w[k + 1] * ((k + 1) as f64) / ((n - k) as f64) / odds;
        if w[k] == 0.0 {
            break;
        }
    }
    let total = compensated_sum(&w);
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Formats `x` like C's `printf("%.{precision}g", x)`.
///
/// Trailing zeros are stripped, scientific notation is used when the decimal
/// exponent is below -4 or at least `precision`, and exponents carry a sign and
/// at least two digits (`1e-05`).
pub fn format_g(x: f64, precision: usize) -> String {
    let p = precision.max(1);
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // Let Rust do the correctly rounded conversion to p significant digits.
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = strip_fraction_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_fraction_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_fraction_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%.17g`, enough digits to round-trip any `f64`.
pub fn g17(x: f64) -> String {
    format_g(x, 17)
}
