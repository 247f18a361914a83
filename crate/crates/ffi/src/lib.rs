//! C ABI over `intcx`.
//!
//! Every fallible function returns an [`IcxStatus`]; on failure the message is
//! available from [`icx_last_error`] on the same thread. Tables are opaque
//! [`IcxTable`] handles released with [`icx_table_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use intcx::balance::kl_bernoulli;
use intcx::explore::{chain_bound, divide_chain, parse_bigexpr, residues, StopReason};
use intcx::{
    cavg_bound, compute_table, guy_constant, runtime_exponent, steinerberger, table_io, witness,
    ComplexityTable, DbrSolver, Error, GreedyTable, SmoothBase,
};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Result codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Io = 4,
    Format = 5,
    Inconsistent = 6,
    BufferTooSmall = 7,
    Parse = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcxStop {
    Nice = 0,
    BelowDivisor = 1,
    Budget = 2,
}

/// Exact `f(n)` for `1 <= n <= limit`.
pub struct IcxTable {
    inner: ComplexityTable,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IcxDbrSummary {
    pub b: u64,
    pub i: u32,
    pub j: u32,
    pub dsum: u64,
    pub m0: u64,
    pub m1: u64,
    pub m2: u64,
    pub alpha: f64,
    pub cavg_ln: f64,
    pub cavg_log3: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IcxExploreSummary {
    pub bits: u64,
    pub iterations: u32,
    pub stop: IcxStop,
    /// Upper bound on `f(n)`: division costs plus binary Horner on the last value.
    pub bound: u64,
    pub final_bits: u64,
    pub final_ones: u64,
    pub mod3: u32,
    pub mod5: u32,
    pub mod7: u32,
    pub mod11: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> IcxStatus {
    match e {
        Error::LimitOutOfRange { .. }
        | Error::OutOfTable { .. }
        | Error::TableTooSmall { .. }
        | Error::ResidueOutOfRange { .. } => IcxStatus::OutOfRange,
        Error::InvalidParameter(_) | Error::NotSmooth(_) | Error::Allocation(_) => {
            IcxStatus::InvalidArgument
        }
        Error::Inconsistent(_) => IcxStatus::Inconsistent,
        Error::Parse { .. } => IcxStatus::Parse,
        Error::Format(_) => IcxStatus::Format,
        Error::Io { .. } | Error::Stream(_) => IcxStatus::Io,
    }
}

struct Fail(IcxStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> IcxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            IcxStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IcxStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(IcxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn table_ref<'a>(table: *const IcxTable) -> Result<&'a ComplexityTable, Fail> {
    table
        .as_ref()
        .map(|t| &t.inner)
        .ok_or_else(|| null("table"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(IcxStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn icx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Computes `f(1..=limit)` into a new handle.
///
/// # Safety
/// `out` must be a valid pointer to write a handle into.
#[no_mangle]
pub unsafe extern "C" fn icx_table_compute(limit: u64, out: *mut *mut IcxTable) -> IcxStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let inner = compute_table(limit)?;
        *out = Box::into_raw(Box::new(IcxTable { inner }));
        Ok(())
    })
}

/// Reads an ICX1 table file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn icx_table_load(path: *const c_char, out: *mut *mut IcxTable) -> IcxStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let inner = table_io::load(Path::new(path))?;
        *out = Box::into_raw(Box::new(IcxTable { inner }));
        Ok(())
    })
}

/// Writes `table` as an ICX1 file.
///
/// # Safety
/// `table` must come from this library; `path` must be nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn icx_table_save(table: *const IcxTable, path: *const c_char) -> IcxStatus {
    guard(|| {
        let t = table_ref(table)?;
        let path = str_arg(path, "path")?;
        table_io::save(t, Path::new(path))?;
        Ok(())
    })
}

/// Stores `f(n)` in `out`.
///
/// # Safety
/// `table` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn icx_table_get(table: *const IcxTable, n: u64, out: *mut u8) -> IcxStatus {
    guard(|| {
        let t = table_ref(table)?;
        let out = out_ptr(out, "out")?;
        *out = t.get(n).ok_or(Error::OutOfTable {
            index: n,
            limit: t.limit(),
        })?;
        Ok(())
    })
}

/// Largest `n` covered, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn icx_table_limit(table: *const IcxTable) -> u64 {
    table.as_ref().map_or(0, |t| t.inner.limit())
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `table` must be null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn icx_table_free(table: *mut IcxTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Writes a minimal expression for `n` as a nul-terminated string. `needed`
/// receives the buffer size required, terminator included; a short buffer
/// gives `BufferTooSmall` and leaves `buf` untouched.
///
/// # Safety
/// `buf` must hold `len` bytes (or be null with `len == 0`); `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn icx_witness(
    table: *const IcxTable,
    n: u64,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> IcxStatus {
    guard(|| {
        let t = table_ref(table)?;
        let text = witness(n, t)?.to_string();
        let size = text.len() + 1;
        if let Some(needed) = needed.as_mut() {
            *needed = size;
        }
        if buf.is_null() || len < size {
            return Err(Fail(
                IcxStatus::BufferTooSmall,
                format!("expression needs {size} bytes, buffer has {len}"),
            ));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// D-hat row summary for the base `2^i 3^j`; `table` must cover the base.
/// m-values that do not fit 64 bits give `OutOfRange`.
///
/// # Safety
/// `table` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn icx_dbr_summary(
    table: *const IcxTable,
    i: u32,
    j: u32,
    out: *mut IcxDbrSummary,
) -> IcxStatus {
    guard(|| {
        let t = table_ref(table)?;
        let out = out_ptr(out, "out")?;
        let base = SmoothBase::new(i, j)?;
        let row = DbrSolver::new(t).dbr_table(base)?;
        let rt = runtime_exponent(&row);
        let cavg = cavg_bound(&row);
        let fit = |x: &BigUint, what: &str| {
            x.to_u64().ok_or_else(|| {
                Fail(
                    IcxStatus::OutOfRange,
                    format!("{what} = {x} does not fit 64 bits"),
                )
            })
        };
        *out = IcxDbrSummary {
            b: base.value(),
            i,
            j,
            dsum: fit(&cavg.dsum, "dsum")?,
            m0: fit(&rt.m0, "m0")?,
            m1: fit(&rt.m1, "m1")?,
            m2: fit(&rt.m2, "m2")?,
            alpha: rt.alpha,
            cavg_ln: cavg.bound_ln,
            cavg_log3: cavg.bound_log3,
        };
        Ok(())
    })
}

/// Steinerberger greedy upper bound `g(n)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn icx_greedy(n: u64, out: *mut u32) -> IcxStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if n == 0 {
            return Err(Fail(IcxStatus::InvalidArgument, "n must be >= 1".into()));
        }
        *out = steinerberger(n, &GreedyTable::build(0)?);
        Ok(())
    })
}

/// Binary Horner constant per `log_3 n` for ones-fraction `p1`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn icx_guy_constant(p1: f64, out: *mut f64) -> IcxStatus {
    guard(|| {
        *out_ptr(out, "out")? = guy_constant(p1)?;
        Ok(())
    })
}

/// Bernoulli KL divergence `D(p || q)` in nats.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn icx_kl_bernoulli(p: f64, q: f64, out: *mut f64) -> IcxStatus {
    guard(|| {
        *out_ptr(out, "out")? = kl_bernoulli(p, q)?;
        Ok(())
    })
}

/// Parses `expr` (for example `2^102-2^100-2`) and runs the strip-and-divide
/// chain with divisor `d` and threshold `t`.
///
/// # Safety
/// `expr` must be nul-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn icx_explore(
    expr: *const c_char,
    d: u64,
    t: f64,
    max_steps: u32,
    out: *mut IcxExploreSummary,
) -> IcxStatus {
    guard(|| {
        let text = str_arg(expr, "expr")?;
        let out = out_ptr(out, "out")?;
        let parsed = parse_bigexpr(text)?;
        let n = parsed.value();
        let trace = divide_chain(n, d, t, max_steps as usize)?;
        let res = residues(n, &[3, 5, 7, 11])?;
        let last = trace.steps.last().expect("trace holds n_0");
        *out = IcxExploreSummary {
            bits: n.bits(),
            iterations: trace.iterations as u32,
            stop: match trace.stop {
                StopReason::Nice => IcxStop::Nice,
                StopReason::BelowDivisor => IcxStop::BelowDivisor,
                StopReason::Budget => IcxStop::Budget,
            },
            bound: chain_bound(&trace).total,
            final_bits: last.bits,
            final_ones: last.ones,
            mod3: res[0] as u32,
            mod5: res[1] as u32,
            mod7: res[2] as u32,
            mod11: res[3] as u32,
        };
        Ok(())
    })
}
