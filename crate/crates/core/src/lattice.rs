//! Integer geometry of periodic slab families in `Z^d`.
//!
//! Everything here is a pure membership predicate; no set is ever
//! materialized. Graphs are built from these predicates by
//! [`crate::graph::enumerate_graph`].
//!
//! Conventions:
//! * axes are 0-based; the first `s` axes are the *free* axes (the ones the
//!   shift vector moves), the remaining `d - s` are the *clamped* axes;
//! * scale indices `j, k` are 1-based, matching [`ScaleSchedule`].

use std::fmt;

use thiserror::Error;

use crate::schedule::ScaleSchedule;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("axis {axis} out of range for dimension {d}")]
    AxisOutOfRange { axis: usize, d: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid slab parameters: {0}")]
    InvalidParams(String),
    #[error("shift vector needs an even scale, got {0}")]
    OddShift(i64),
    #[error("schedule has {have} scales, need {need}")]
    ScheduleTooShort { have: usize, need: usize },
}

/// A vertex candidate of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn origin(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Even or odd scale family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(j: usize) -> Self {
        if j % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn matches(self, j: usize) -> bool {
        Parity::of(j) == self
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Parity::Even => "e",
            Parity::Odd => "o",
        }
    }
}

/// Period `l`, half-width `m`, free dimensions `s`, ambient dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlabParams {
    l: i64,
    m: i64,
    s: usize,
    d: usize,
}

impl SlabParams {
    /// Requires `l` positive and even, `0 <= m < l/2` and `1 <= s <= d`.
    ///
    /// `s == d` is accepted: the union then ranges over the empty index set
    /// and contains every point.
    pub fn new(l: i64, m: i64, s: usize, d: usize) -> Result<Self, LatticeError> {
        if l <= 0 || l % 2 != 0 {
            return Err(LatticeError::InvalidParams(format!("period {l} must be positive and even")));
        }
        if m < 0 || 2 * m >= l {
            return Err(LatticeError::InvalidParams(format!("half-width {m} must satisfy 0 <= m < {l}/2")));
        }
        if s == 0 || s > d {
            return Err(LatticeError::InvalidParams(format!("need 1 <= s <= d, got s={s}, d={d}")));
        }
        Ok(Self { l, m, s, d })
    }

    pub fn period(&self) -> i64 {
        self.l
    }

    pub fn half_width(&self) -> i64 {
        self.m
    }

    pub fn free_dims(&self) -> usize {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// The representative of `n mod l` in `{-floor((l-1)/2), ..., floor(l/2)}`.
///
/// Computed from the non-negative residue so the result does not depend on
/// the sign convention of `%`.
pub fn centered_mod(n: i64, l: i64) -> i64 {
    debug_assert!(l >= 1);
    let r = n.rem_euclid(l);
    if r > l / 2 {
        r - l
    } else {
        r
    }
}

#[inline]
fn near_grid(c: i64, l: i64, m: i64) -> bool {
    centered_mod(c, l).abs() <= m
}

/// Membership in the single periodic slab orthogonal to `axis`.
pub fn in_slab(p: &LatticePoint, params: &SlabParams, axis: usize) -> Result<bool, LatticeError> {
    check_dim(p, params.d)?;
    if axis >= params.d {
        return Err(LatticeError::AxisOutOfRange { axis, d: params.d });
    }
    Ok(near_grid(p.0[axis], params.l, params.m))
}

/// Membership in the union over all `(d - s)`-subsets `I` of the
/// intersections of slabs along `I`: at least `d - s` axes are near the grid.
pub fn in_union_q(p: &LatticePoint, params: &SlabParams) -> Result<bool, LatticeError> {
    check_dim(p, params.d)?;
    Ok(union_q_shifted(&p.0, params.l, params.m, params.s, 0))
}

/// `in_union_q(p - shift_vector(2*half_shift))` on raw coordinates.
#[inline]
pub(crate) fn union_q_shifted(coords: &[i64], l: i64, m: i64, s: usize, half_shift: i64) -> bool {
    let need = coords.len() - s;
    if need == 0 {
        return true;
    }
    let mut hits = 0;
    for (i, &c) in coords.iter().enumerate() {
        let c = if i < s { c - half_shift } else { c };
        if near_grid(c, l, m) {
            hits += 1;
            if hits >= need {
                return true;
            }
        }
    }
    false
}

/// `v(m)`: `m/2` on the `s` free axes, zero elsewhere.
pub fn shift_vector(m: i64, s: usize, d: usize) -> Result<LatticePoint, LatticeError> {
    if m % 2 != 0 {
        return Err(LatticeError::OddShift(m));
    }
    if s == 0 || s > d {
        return Err(LatticeError::InvalidParams(format!("need 1 <= s <= d, got s={s}, d={d}")));
    }
    let mut v = vec![0; d];
    v[..s].fill(m / 2);
    Ok(LatticePoint(v))
}

/// Membership in the half built from scales `2..=k` of the given parity:
/// `p - v(a_j)` lies in `Q_{a_j, b_{j-1}}` for every such `j`.
///
/// With no scale of that parity (in particular `k < 2`) the intersection is
/// empty and every point is a member.
pub fn in_h(p: &LatticePoint, parity: Parity, k: usize, sched: &ScaleSchedule) -> Result<bool, LatticeError> {
    check_dim(p, sched.dim())?;
    Ok(SlabRegion::half(sched, parity, k)?.contains(&p.0))
}

/// [`in_h`] intersected with `|p_i| <= b_k` on every clamped axis.
pub fn in_f(p: &LatticePoint, parity: Parity, k: usize, sched: &ScaleSchedule) -> Result<bool, LatticeError> {
    check_dim(p, sched.dim())?;
    Ok(SlabRegion::clamped(sched, parity, k)?.contains(&p.0))
}

fn check_dim(p: &LatticePoint, d: usize) -> Result<(), LatticeError> {
    if p.dim() != d {
        return Err(LatticeError::DimensionMismatch { expected: d, got: p.dim() });
    }
    Ok(())
}

/// One shifted slab family `Q_{l,m} + v(l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ShiftedFamily {
    l: i64,
    m: i64,
}

/// A precomputed `H` or `F` region, cheap to query in hot enumeration loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlabRegion {
    d: usize,
    s: usize,
    families: Vec<ShiftedFamily>,
    clamp: Option<i64>,
}

impl SlabRegion {
    /// All of `Z^d`.
    pub fn full(d: usize, s: usize) -> Self {
        Self { d, s, families: Vec::new(), clamp: None }
    }

    /// The `H` half for scales `2..=k` of `parity`.
    pub fn half(sched: &ScaleSchedule, parity: Parity, k: usize) -> Result<Self, LatticeError> {
        if k > sched.len() {
            return Err(LatticeError::ScheduleTooShort { have: sched.len(), need: k });
        }
        let families = (2..=k)
            .filter(|&j| parity.matches(j))
            .map(|j| ShiftedFamily { l: sched.a(j) as i64, m: sched.b(j - 1) as i64 })
            .collect();
        Ok(Self { d: sched.dim(), s: sched.free_dims(), families, clamp: None })
    }

    /// The `F` graph: the `H` half clamped to `|n_i| <= b_k` on clamped axes.
    pub fn clamped(sched: &ScaleSchedule, parity: Parity, k: usize) -> Result<Self, LatticeError> {
        if k == 0 {
            return Err(LatticeError::ScheduleTooShort { have: sched.len(), need: 1 });
        }
        let mut region = Self::half(sched, parity, k)?;
        region.clamp = Some(sched.b(k) as i64);
        Ok(region)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn clamp(&self) -> Option<i64> {
        self.clamp
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        debug_assert_eq!(coords.len(), self.d);
        if let Some(b) = self.clamp {
            if coords[self.s..].iter().any(|c| c.abs() > b) {
                return false;
            }
        }
        self.families
            .iter()
            .all(|f| union_q_shifted(coords, f.l, f.m, self.s, f.l / 2))
    }
}
