//! The inductive scale schedule `a_1 < a_2 < ...` and its derived sequences.
//!
//! Scale `k` (1-based) carries its period `a_k`, the prefix sum
//! `b_k = a_1 + ... + a_k`, and for `k >= 2` the integer constant `gamma_k`
//! together with the checkpoint time `t_k = gamma_k^4`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::numeric::Interval;

/// Default first period.
pub const DEFAULT_SEED: u64 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("constants must be positive and finite, got alpha={alpha}, beta={beta}")]
    InvalidConstants { alpha: f64, beta: f64 },
    #[error("seed period {0} must be positive and even")]
    InvalidSeed(u64),
    #[error("schedule arithmetic overflowed at scale {0}")]
    Overflow(usize),
    #[error("schedule invariant violated at scale {k}: {what}")]
    Invariant { k: usize, what: String },
    #[error("invalid dimensions d={d}, s={s}")]
    InvalidDims { d: usize, s: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub a: u64,
    pub b: u64,
    pub gamma: Option<u64>,
}

impl Scale {
    pub fn checkpoint(&self) -> Option<u64> {
        self.gamma.map(|g| g.pow(4))
    }
}

/// Immutable snapshot of the induction state; [`ScaleSchedule::extend`]
/// returns a new value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleSchedule {
    d: usize,
    s: usize,
    scales: Vec<Scale>,
}

/// Estimated constants for one induction round.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsReport {
    /// Upper-bound constant: `p_H(x,x;t) <= alpha t^{-d/2}` on the window.
    pub alpha: f64,
    /// First-return constant: `f_F(t) >= t^{-s/2} / beta` on the window.
    pub beta: f64,
    /// Largest `t` examined.
    pub horizon: usize,
    pub epsilon_e: Interval,
    pub epsilon_o: Interval,
}

impl ConstantsReport {
    /// `delta = min(lower(eps_e), lower(eps_o)) / 2`, if that lies in `(0, 1)`.
    pub fn delta(&self) -> Option<f64> {
        let delta = 0.5 * self.epsilon_e.lower.min(self.epsilon_o.lower);
        (delta > 0.0 && delta < 1.0).then_some(delta)
    }

    pub fn gamma(&self) -> Result<u64, ScheduleError> {
        gamma_from_constants(self.alpha, self.beta)
    }
}

/// The least even `a > 2 gamma^4 + 4 a_prev` with `a_prev | a/2`, i.e. the
/// least multiple of `2 a_prev` above the bound.
pub fn next_scale(gamma: u64, a_prev: u64) -> Result<u64, ScheduleError> {
    assert!(gamma >= 1 && a_prev >= 2 && a_prev % 2 == 0, "next_scale({gamma}, {a_prev})");
    let bound = gamma
        .checked_pow(4)
        .and_then(|g4| g4.checked_mul(2))
        .and_then(|x| x.checked_add(a_prev.checked_mul(4)?))
        .ok_or(ScheduleError::Overflow(0))?;
    let step = 2 * a_prev;
    (bound / step + 1).checked_mul(step).ok_or(ScheduleError::Overflow(0))
}

/// `ceil(max(alpha, beta))`, at least 1.
pub fn gamma_from_constants(alpha: f64, beta: f64) -> Result<u64, ScheduleError> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha <= 0.0 || beta <= 0.0 {
        return Err(ScheduleError::InvalidConstants { alpha, beta });
    }
    let g = alpha.max(beta).ceil();
    if g >= u64::MAX as f64 {
        return Err(ScheduleError::InvalidConstants { alpha, beta });
    }
    Ok((g as u64).max(1))
}

impl ScaleSchedule {
    /// A one-scale schedule with `a_1 = 2`.
    pub fn seed(d: usize, s: usize) -> Result<Self, ScheduleError> {
        Self::with_seed(d, s, DEFAULT_SEED)
    }

    pub fn with_seed(d: usize, s: usize, a1: u64) -> Result<Self, ScheduleError> {
        if s == 0 || s > d {
            return Err(ScheduleError::InvalidDims { d, s });
        }
        if a1 == 0 || a1 % 2 != 0 {
            return Err(ScheduleError::InvalidSeed(a1));
        }
        Ok(Self { d, s, scales: vec![Scale { a: a1, b: a1, gamma: None }] })
    }

    /// A schedule with explicit periods and no recorded constants.
    ///
    /// Checks the structural invariants (even periods, `a_{k-1} | a_k/2`,
    /// `a_k > 4 a_{k-1}`); the `gamma` bound cannot be checked without
    /// constants.
    pub fn from_periods(d: usize, s: usize, periods: &[u64]) -> Result<Self, ScheduleError> {
        let (&first, rest) = periods.split_first().ok_or(ScheduleError::Invariant {
            k: 1,
            what: "empty schedule".into(),
        })?;
        let mut sched = Self::with_seed(d, s, first)?;
        for &a in rest {
            let b = sched.last().b.checked_add(a).ok_or(ScheduleError::Overflow(sched.len() + 1))?;
            sched.scales.push(Scale { a, b, gamma: None });
        }
        sched.check_invariants()?;
        Ok(sched)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn free_dims(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn scales(&self) -> &[Scale] {
        &self.scales
    }

    fn last(&self) -> &Scale {
        self.scales.last().expect("schedule is never empty")
    }

    /// `a_k`, 1-based.
    pub fn a(&self, k: usize) -> u64 {
        self.scales[k - 1].a
    }

    /// `b_k`, 1-based, with `b_0 = 0`.
    pub fn b(&self, k: usize) -> u64 {
        if k == 0 {
            0
        } else {
            self.scales[k - 1].b
        }
    }

    pub fn gamma(&self, k: usize) -> Option<u64> {
        self.scales.get(k.checked_sub(1)?)?.gamma
    }

    /// `t_k = gamma_k^4`.
    pub fn checkpoint(&self, k: usize) -> Option<u64> {
        self.scales.get(k.checked_sub(1)?)?.checkpoint()
    }

    /// Appends the next scale from estimated constants. `cap` bounds `gamma`
    /// for desk-scale runs.
    pub fn extend(&self, report: &ConstantsReport, cap: Option<u64>) -> Result<Self, ScheduleError> {
        let mut gamma = report.gamma()?;
        if let Some(cap) = cap {
            gamma = gamma.min(cap.max(1));
        }
        self.extend_with_gamma(gamma)
    }

    /// The first `len` scales.
    pub fn truncated(&self, len: usize) -> Self {
        let mut out = self.clone();
        out.scales.truncate(len.max(1));
        out
    }

    pub fn extend_with_gamma(&self, gamma: u64) -> Result<Self, ScheduleError> {
        let k = self.len() + 1;
        let prev = *self.last();
        gamma.checked_pow(4).ok_or(ScheduleError::Overflow(k))?;
        let a = next_scale(gamma, prev.a).map_err(|_| ScheduleError::Overflow(k))?;
        let b = prev.b.checked_add(a).ok_or(ScheduleError::Overflow(k))?;
        let mut next = self.clone();
        next.scales.push(Scale { a, b, gamma: Some(gamma) });
        next.check_invariants()?;
        Ok(next)
    }

    pub fn check_invariants(&self) -> Result<(), ScheduleError> {
        let mut prefix = 0u64;
        for (i, sc) in self.scales.iter().enumerate() {
            let k = i + 1;
            let fail = |what: String| Err(ScheduleError::Invariant { k, what });
            if sc.a == 0 || sc.a % 2 != 0 {
                return fail(format!("a_{k} = {} is not positive and even", sc.a));
            }
            prefix = prefix.checked_add(sc.a).ok_or(ScheduleError::Overflow(k))?;
            if sc.b != prefix {
                return fail(format!("b_{k} = {} but prefix sum is {prefix}", sc.b));
            }
            if k == 1 {
                if sc.gamma.is_some() {
                    return fail("the seed scale carries no constant".into());
                }
                continue;
            }
            let prev = self.scales[i - 1];
            if (sc.a / 2) % prev.a != 0 {
                return fail(format!("a_{} = {} does not divide a_{k}/2 = {}", k - 1, prev.a, sc.a / 2));
            }
            if sc.a <= 4 * prev.a {
                return fail(format!("a_{k} = {} is not above 4 a_{} = {}", sc.a, k - 1, 4 * prev.a));
            }
            if let Some(g) = sc.gamma {
                let bound = g
                    .checked_pow(4)
                    .and_then(|g4| g4.checked_mul(2))
                    .and_then(|x| x.checked_add(4 * prev.a))
                    .ok_or(ScheduleError::Overflow(k))?;
                if sc.a <= bound {
                    return fail(format!("a_{k} = {} is not above 2 gamma^4 + 4 a_{} = {bound}", sc.a, k - 1));
                }
            }
        }
        Ok(())
    }

    /// One line per scale: `k a_k b_k gamma_k t_k`. The seed scale has no
    /// constant and is written with `gamma_1 = t_1 = 0`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, sc) in self.scales.iter().enumerate() {
            let g = sc.gamma.unwrap_or(0);
            let t = sc.checkpoint().unwrap_or(0);
            writeln!(out, "{} {} {} {} {}", i + 1, sc.a, sc.b, g, t).unwrap();
        }
        out
    }

    pub fn parse(text: &str, d: usize, s: usize) -> Result<Self, ScheduleError> {
        if s == 0 || s > d {
            return Err(ScheduleError::InvalidDims { d, s });
        }
        let mut scales = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let err = |msg: String| ScheduleError::Parse { line: line_no, msg };
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<u64> = line
                .split_whitespace()
                .map(|f| f.parse::<u64>().map_err(|e| err(format!("{f:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            let [k, a, b, g, t] = fields[..] else {
                return Err(err(format!("expected 5 fields, found {}", fields.len())));
            };
            if k as usize != scales.len() + 1 {
                return Err(err(format!("expected scale {}, found {k}", scales.len() + 1)));
            }
            let gamma = if k == 1 {
                if g != 0 || t != 0 {
                    return Err(err("the seed scale must have gamma = t = 0".into()));
                }
                None
            } else {
                if g == 0 {
                    return Err(err("gamma must be positive".into()));
                }
                if g.checked_pow(4) != Some(t) {
                    return Err(err(format!("t_{k} = {t} is not gamma^4 = {g}^4")));
                }
                Some(g)
            };
            scales.push(Scale { a, b, gamma });
        }
        if scales.is_empty() {
            return Err(ScheduleError::Parse { line: 0, msg: "no scales".into() });
        }
        let sched = Self { d, s, scales };
        sched.check_invariants()?;
        Ok(sched)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_next_scale(gamma: u64, a_prev: u64) -> u64 {
        let bound = 2 * gamma.pow(4) + 4 * a_prev;
        (2..).step_by(2).find(|&a| a > bound && (a / 2) % a_prev == 0).unwrap()
    }

    fn report(alpha: f64, beta: f64) -> ConstantsReport {
        let eps = Interval::new(0.2, 0.3);
        ConstantsReport { alpha, beta, horizon: 4, epsilon_e: eps, epsilon_o: eps }
    }

    #[test]
    fn next_scale_examples() {
        assert_eq!(next_scale(1, 2).unwrap(), 12);
        assert_eq!(next_scale(2, 2).unwrap(), 44);
        assert_eq!(next_scale(1, 12).unwrap(), 72);
        for (g, a) in [(1, 2), (2, 2), (1, 12), (3, 44), (5, 6)] {
            assert_eq!(next_scale(g, a).unwrap(), brute_next_scale(g, a));
        }
        assert!(next_scale(1 << 20, 2).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_from_constants(1.0, 1.0).unwrap(), 1);
        assert_eq!(gamma_from_constants(2.3, 1.1).unwrap(), 3);
        assert_eq!(gamma_from_constants(0.4, 0.2).unwrap(), 1);
        assert!(gamma_from_constants(f64::NAN, 1.0).is_err());
        assert!(gamma_from_constants(1.0, f64::INFINITY).is_err());
        assert!(gamma_from_constants(0.0, 1.0).is_err());
    }

    #[test]
    fn extend_examples() {
        let s = ScaleSchedule::seed(2, 1).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s.a(1), s.b(1)), (2, 2));
        let s = s.extend(&report(0.9, 0.5), None).unwrap();
        assert_eq!((s.a(2), s.b(2), s.gamma(2), s.checkpoint(2)), (12, 14, Some(1), Some(1)));
        let s = s.extend(&report(1.0, 1.0), None).unwrap();
        assert_eq!((s.a(3), s.b(3)), (72, 86));
    }

    #[test]
    fn cap_limits_gamma() {
        let s = ScaleSchedule::seed(2, 1).unwrap();
        let s = s.extend(&report(7.5, 40.0), Some(1)).unwrap();
        assert_eq!(s.a(2), 12);
        assert_eq!(s.gamma(2), Some(1));
    }

    #[test]
    fn delta_from_report() {
        let r = ConstantsReport {
            alpha: 1.0,
            beta: 1.0,
            horizon: 10,
            epsilon_e: Interval::new(0.3, 0.35),
            epsilon_o: Interval::new(0.2, 0.25),
        };
        assert_eq!(r.delta(), Some(0.1));
        let r = ConstantsReport { epsilon_o: Interval::new(0.0, 0.1), ..r };
        assert_eq!(r.delta(), None);
    }

    #[test]
    fn text_round_trip_and_format() {
        let s = ScaleSchedule::seed(3, 1).unwrap().extend_with_gamma(2).unwrap().extend_with_gamma(1).unwrap();
        let text = s.to_text();
        assert_eq!(text, "1 2 2 0 0\n2 44 46 2 16\n3 264 310 1 1\n");
        assert_eq!(ScaleSchedule::parse(&text, 3, 1).unwrap(), s);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(ScaleSchedule::parse("1 2 2 0 0\n2 12 14 1 2\n", 2, 1).is_err());
        assert!(ScaleSchedule::parse("1 2 2 0 0\n3 12 14 1 1\n", 2, 1).is_err());
        assert!(ScaleSchedule::parse("1 2 2 0 0\n2 10 12 1 1\n", 2, 1).is_err());
        assert!(ScaleSchedule::parse("1 2 2\n", 2, 1).is_err());
        assert!(ScaleSchedule::parse("", 2, 1).is_err());
        assert!(ScaleSchedule::parse("1 2 2 0 0\n", 2, 0).is_err());
    }

    #[test]
    fn from_periods_checks_structure() {
        assert!(ScaleSchedule::from_periods(2, 1, &[2, 12, 72]).is_ok());
        assert!(ScaleSchedule::from_periods(2, 1, &[2, 8]).is_err());
        assert!(ScaleSchedule::from_periods(2, 1, &[2, 14]).is_err());
        assert!(ScaleSchedule::from_periods(2, 1, &[3]).is_err());
    }

    proptest! {
        #[test]
        fn next_scale_is_minimal(gamma in 1u64..40, k in 1u64..200) {
            let a_prev = 2 * k;
            let a = next_scale(gamma, a_prev).unwrap();
            let bound = 2 * gamma.pow(4) + 4 * a_prev;
            prop_assert!(a > bound && a % 2 == 0 && (a / 2) % a_prev == 0);
            let smaller = a - 2 * a_prev;
            prop_assert!(smaller <= bound);
        }

        #[test]
        fn invariants_survive_random_extensions(
            constants in prop::collection::vec((0.01f64..6.0, 0.01f64..6.0), 1..6),
            seed_half in 1u64..4,
        ) {
            let mut s = ScaleSchedule::with_seed(3, 1, 2 * seed_half).unwrap();
            let mut last_t = 0;
            let mut sorted = constants.clone();
            sorted.sort_by(|x, y| x.0.max(x.1).partial_cmp(&y.0.max(y.1)).unwrap());
            for (alpha, beta) in sorted {
                s = s.extend(&report(alpha, beta), None).unwrap();
                s.check_invariants().unwrap();
                let t = s.checkpoint(s.len()).unwrap();
                prop_assert!(t >= last_t);
                last_t = t;
            }
        }
    }
}
