//! C ABI over the slabwalk graph builders and kernels.
//!
//! Graphs cross the boundary as opaque `SwGraph` handles owned by the
//! caller and released with [`sw_graph_free`]. Every fallible call returns
//! an [`SwStatus`]; on failure [`sw_last_error`] describes the cause for the
//! calling thread. Series are written into caller buffers whose length must
//! be at least `t_max + 1`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use slabwalk::graph::{enumerate_graph, glue, glue_unweighted, BoxSpec, GraphError, WeightedGraph};
use slabwalk::kernel::{self, KernelError, Semantics};
use slabwalk::lattice::{self, Parity, SlabRegion};
use slabwalk::schedule::{self, ScaleSchedule};

/// Result codes shared by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    /// The requested box or schedule exceeds a size guard.
    ResourceLimit = 3,
    /// `t_max` lies beyond the exactness horizon.
    HorizonShortfall = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// Opaque graph handle.
pub struct SwGraph(WeightedGraph);

/// Escape probability bounds from a finite horizon.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SwEscape {
    pub lower: f64,
    pub upper: f64,
    pub point: f64,
    /// Bound on the unseen tail of the Green function; infinite in `d <= 2`.
    pub tail: f64,
    /// Nonzero when the tail bound is at least 1 and `lower` is vacuous.
    pub horizon_too_small: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes were replaced"));
}

struct Failure(SwStatus, String);

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let status = match e {
            GraphError::BoxTooLarge { .. } => SwStatus::ResourceLimit,
            _ => SwStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<KernelError> for Failure {
    fn from(e: KernelError) -> Self {
        let status = match e {
            KernelError::HorizonShortfall { .. } => SwStatus::HorizonShortfall,
            KernelError::Graph(GraphError::BoxTooLarge { .. }) => SwStatus::ResourceLimit,
            _ => SwStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<lattice::LatticeError> for Failure {
    fn from(e: lattice::LatticeError) -> Self {
        Failure(SwStatus::InvalidArgument, e.to_string())
    }
}

impl From<schedule::ScheduleError> for Failure {
    fn from(e: schedule::ScheduleError) -> Self {
        let status = match e {
            schedule::ScheduleError::Overflow(_) => SwStatus::ResourceLimit,
            _ => SwStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SwStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status and the thread's
/// last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SwStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SwStatus::Internal
        }
    }
}

unsafe fn graph_ref<'a>(g: *const SwGraph) -> Result<&'a WeightedGraph, Failure> {
    g.as_ref().map(|g| &g.0).ok_or(Failure(SwStatus::NullArgument, "graph handle is null".into()))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(SwStatus::NullArgument, format!("{what} is null")))
}

unsafe fn series_buffer<'a>(buf: *mut f64, len: usize, t_max: usize) -> Result<&'a mut [f64], Failure> {
    if buf.is_null() {
        return Err(Failure(SwStatus::NullArgument, "output buffer is null".into()));
    }
    let need = t_max.checked_add(1).ok_or_else(|| invalid("t_max overflows"))?;
    if len < need {
        return Err(Failure(SwStatus::BufferTooSmall, format!("buffer holds {len} values, need {need}")));
    }
    Ok(std::slice::from_raw_parts_mut(buf, need))
}

fn vertex(g: &WeightedGraph, v: usize) -> Result<usize, Failure> {
    if v >= g.vertex_count() {
        return Err(invalid(format!("vertex {v} out of range for {} vertices", g.vertex_count())));
    }
    Ok(v)
}

fn give(out: &mut *mut SwGraph, g: WeightedGraph) {
    *out = Box::into_raw(Box::new(SwGraph(g)));
}

/// Message describing the last failure on this thread; empty after a
/// success. The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The box `[-radius, radius]^d` of `Z^d` with the origin as `x`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn sw_graph_lattice(d: usize, radius: i64, out: *mut *mut SwGraph) -> SwStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let g = enumerate_graph(|_| true, &BoxSpec::cube(d, radius)?)?;
        give(out, g);
        Ok(())
    })
}

/// The `H` half (or, with `clamped != 0`, the `F` graph) of the given
/// parity for the schedule with periods `periods[0..n_periods]`, built
/// inside `[-radius, radius]^d`. `parity` is 0 for even and 1 for odd.
///
/// # Safety
/// `periods` must point to `n_periods` readable values and `out` to
/// writable storage for a handle.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn sw_graph_half(
    d: usize,
    s: usize,
    periods: *const u64,
    n_periods: usize,
    parity: u32,
    clamped: u8,
    radius: i64,
    out: *mut *mut SwGraph,
) -> SwStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if periods.is_null() {
            return Err(Failure(SwStatus::NullArgument, "periods is null".into()));
        }
        let periods = std::slice::from_raw_parts(periods, n_periods);
        let sched = ScaleSchedule::from_periods(d, s, periods)?;
        let parity = match parity {
            0 => Parity::Even,
            1 => Parity::Odd,
            p => return Err(invalid(format!("parity must be 0 or 1, got {p}"))),
        };
        let k = sched.len();
        let region = if clamped != 0 { SlabRegion::clamped(&sched, parity, k)? } else { SlabRegion::half(&sched, parity, k)? };
        let mut lo = vec![-radius; d];
        let mut hi = vec![radius; d];
        if let Some(b) = region.clamp() {
            for i in s..d {
                lo[i] = -radius.min(b);
                hi[i] = radius.min(b);
            }
        }
        let g = enumerate_graph(|c| region.contains(c), &BoxSpec::bounds(lo, hi)?)?;
        give(out, g);
        Ok(())
    })
}

/// Joins the origins of `even` and `odd` by one edge of weight `delta`, or
/// by a path of `segment` unit edges when `segment > 0`. The inputs are not
/// consumed.
///
/// # Safety
/// `even` and `odd` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_graph_glue(
    even: *const SwGraph,
    odd: *const SwGraph,
    delta: f64,
    segment: usize,
    out: *mut *mut SwGraph,
) -> SwStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let (a, b) = (graph_ref(even)?, graph_ref(odd)?);
        let g = if segment > 0 { glue_unweighted(a, b, segment)? } else { glue(a, b, delta)? };
        give(out, g);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_graph_free(g: *mut SwGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sw_graph_vertex_count(g: *const SwGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// The `x` and `y` markers. A missing `y` is reported as `SIZE_MAX`.
///
/// # Safety
/// `g` must be a live handle; `x` and `y` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_graph_markers(g: *const SwGraph, x: *mut usize, y: *mut usize) -> SwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        *out_ref(x, "x")? = g.x().ok_or_else(|| invalid("graph has no x marker"))?;
        *out_ref(y, "y")? = g.y().unwrap_or(usize::MAX);
        Ok(())
    })
}

/// Exactness horizon of kernels started at `v`; `SIZE_MAX` when nothing
/// reachable was truncated.
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_exact_horizon(g: *const SwGraph, v: usize, out: *mut usize) -> SwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        *out_ref(out, "out")? = kernel::exact_horizon(g, vertex(g, v)?);
        Ok(())
    })
}

/// `p(v,v;t)` for `t = 0..=t_max` into `buf`. `lazy != 0` selects the lazy
/// walk. Values past the exactness horizon are written but flagged by
/// `HorizonShortfall` unless `allow_approximate != 0`.
///
/// # Safety
/// `g` must be a live handle and `buf` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn sw_heat_kernel_diag(
    g: *const SwGraph,
    v: usize,
    t_max: usize,
    lazy: u8,
    allow_approximate: u8,
    buf: *mut f64,
    len: usize,
) -> SwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let buf = series_buffer(buf, len, t_max)?;
        let sem = if lazy != 0 { Semantics::Lazy } else { Semantics::Simple };
        let series = kernel::heat_kernel_diag(g, vertex(g, v)?, t_max, sem)?;
        buf.copy_from_slice(&series.values);
        if t_max > series.exact_horizon && allow_approximate == 0 {
            return Err(KernelError::HorizonShortfall { requested: t_max, achievable: series.exact_horizon }.into());
        }
        Ok(())
    })
}

/// First-return probabilities `f(t)`, `t = 0..=t_max`, of the lazy walk
/// from `v`, after checking the renewal and taboo routes agree.
///
/// # Safety
/// `g` must be a live handle and `buf` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn sw_first_return(g: *const SwGraph, v: usize, t_max: usize, buf: *mut f64, len: usize) -> SwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let buf = series_buffer(buf, len, t_max)?;
        let fr = kernel::first_return(g, vertex(g, v)?, t_max)?;
        buf.copy_from_slice(&fr.f);
        Ok(())
    })
}

/// Escape probability of the lazy walk from `v` from `t_max` exact steps.
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sw_escape_prob(
    g: *const SwGraph,
    v: usize,
    t_max: usize,
    d_eff: usize,
    out: *mut SwEscape,
) -> SwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let out = out_ref(out, "out")?;
        let e = kernel::escape_prob(g, vertex(g, v)?, t_max, d_eff)?;
        *out = SwEscape {
            lower: e.interval.lower,
            upper: e.interval.upper,
            point: e.point,
            tail: e.tail,
            horizon_too_small: e.horizon_too_small as u8,
        };
        Ok(())
    })
}

/// `p(x,x;t) / p(y,y;t)` on a glued graph for `t = 0..=t_max`.
///
/// # Safety
/// `g` must be a live handle and `buf` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn sw_ratio(g: *const SwGraph, t_max: usize, allow_approximate: u8, buf: *mut f64, len: usize) -> SwStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let buf = series_buffer(buf, len, t_max)?;
        let table = kernel::ratio_experiment(g, t_max, allow_approximate != 0)?;
        for (slot, row) in buf.iter_mut().zip(&table.rows) {
            *slot = row.ratio;
        }
        Ok(())
    })
}

/// The smallest admissible next period after `a_prev` for constant `gamma`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_next_scale(gamma: u64, a_prev: u64, out: *mut u64) -> SwStatus {
    guard(|| {
        *out_ref(out, "out")? = schedule::next_scale(gamma, a_prev)?;
        Ok(())
    })
}

/// Centered residue of `n` modulo `l >= 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_centered_mod(n: i64, l: i64, out: *mut i64) -> SwStatus {
    guard(|| {
        if l < 1 {
            return Err(invalid(format!("modulus {l} must be at least 1")));
        }
        *out_ref(out, "out")? = lattice::centered_mod(n, l);
        Ok(())
    })
}
