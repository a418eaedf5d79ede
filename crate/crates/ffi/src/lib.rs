//! C interface to `trellis-astar`.
//!
//! Instances and results are opaque heap handles released with their
//! `*_free` function. Fallible calls return a [`TaStatus`] and write their
//! output through an out-pointer; on failure a message is available from
//! [`ta_last_error_message`] on the same thread. Strings returned to the
//! caller are freed with [`ta_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use trellis_astar::baselines::{beam_search, default_beam_width, greedy};
use trellis_astar::construct::{approximate_search, ApproxConfig, ExtenderConfig, SamplerMode};
use trellis_astar::ginkgo::JetEvent;
use trellis_astar::graph::SimilarityGraph;
use trellis_astar::instance::Instance;
use trellis_astar::{astar_search, CostKind, Error, Hierarchy, HeuristicKind, Trellis};

pub const TA_COST_HCC: u32 = 0;
pub const TA_COST_DASGUPTA: u32 = 1;
pub const TA_COST_GINKGO: u32 = 2;

/// The cost's own admissible heuristic (h1 for ginkgo).
pub const TA_HEURISTIC_DEFAULT: u32 = 0;
pub const TA_HEURISTIC_ZERO: u32 = 1;
pub const TA_HEURISTIC_HCC: u32 = 2;
pub const TA_HEURISTIC_DASGUPTA: u32 = 3;
pub const TA_HEURISTIC_H0: u32 = 4;
pub const TA_HEURISTIC_H1: u32 = 5;

pub const TA_SAMPLER_BEST_K: u32 = 0;
pub const TA_SAMPLER_IMPORTANCE: u32 = 1;

/// Status codes. Codes 3 to 10 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Io = 4,
    Capacity = 5,
    Domain = 6,
    ObjectiveMismatch = 7,
    SearchExhausted = 8,
    IterationCap = 9,
    MissingNode = 10,
    Panic = 11,
}

/// A dataset: a similarity graph or a jet.
pub struct TaInstance {
    inner: Instance,
}

/// A hierarchy with its cost and search counters.
pub struct TaResult {
    cost: f64,
    tree: Hierarchy,
    nodes_explored: u64,
}

/// Options for [`ta_approx`]; start from [`ta_approx_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TaApproxOptions {
    pub seed: u64,
    pub rounds: u32,
    pub pool: u32,
    pub top_k: u32,
    /// `TA_SAMPLER_BEST_K` or `TA_SAMPLER_IMPORTANCE`.
    pub sampler: u32,
    /// 0 selects the default width.
    pub beam_width: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> TaStatus {
    match e {
        Error::Parse { .. } => TaStatus::Parse,
        Error::Io { .. } => TaStatus::Io,
        Error::Capacity(_) => TaStatus::Capacity,
        Error::Domain(_) => TaStatus::Domain,
        Error::ObjectiveMismatch(_) => TaStatus::ObjectiveMismatch,
        Error::SearchExhausted => TaStatus::SearchExhausted,
        Error::IterationCap(_) => TaStatus::IterationCap,
        Error::MissingNode(_) => TaStatus::MissingNode,
    }
}

enum Failure {
    Status(TaStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status and stored message.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> TaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TaStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            TaStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Status(TaStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::Status(TaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn null_arg(what: &str) -> Failure {
    Failure::Status(TaStatus::NullArgument, format!("{what} is null"))
}

fn cost_kind(cost: u32) -> Result<CostKind, Failure> {
    match cost {
        TA_COST_HCC => Ok(CostKind::Hcc),
        TA_COST_DASGUPTA => Ok(CostKind::Dasgupta),
        TA_COST_GINKGO => Ok(CostKind::Ginkgo),
        other => Err(Failure::Status(TaStatus::Domain, format!("unknown cost {other}"))),
    }
}

fn heuristic_kind(h: u32) -> Result<Option<HeuristicKind>, Failure> {
    Ok(Some(match h {
        TA_HEURISTIC_DEFAULT => return Ok(None),
        TA_HEURISTIC_ZERO => HeuristicKind::Zero,
        TA_HEURISTIC_HCC => HeuristicKind::Hcc,
        TA_HEURISTIC_DASGUPTA => HeuristicKind::Dasgupta,
        TA_HEURISTIC_H0 => HeuristicKind::H0,
        TA_HEURISTIC_H1 => HeuristicKind::H1,
        other => return Err(Failure::Status(TaStatus::Domain, format!("unknown heuristic {other}"))),
    }))
}

fn put<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null before computing `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message for the most recent failure on this thread, or NULL. Valid until
/// the next failing call on this thread.
#[no_mangle]
pub extern "C" fn ta_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a jet: `{"lambda", "t_cut", "leaves": [[E, px, py, pz], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ta_instance_from_jet_json(json: *const c_char, out: *mut *mut TaInstance) -> TaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let jet = JetEvent::from_json(read_str(json, "json")?)?;
        put(out, TaInstance { inner: Instance::Jet(Arc::new(jet)) });
        Ok(())
    })
}

/// Parses a graph: first line `n m`, then `m` lines `i j w`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ta_instance_from_graph_text(text: *const c_char, out: *mut *mut TaInstance) -> TaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let g = SimilarityGraph::parse(read_str(text, "text")?)?;
        put(out, TaInstance { inner: Instance::Graph(Arc::new(g)) });
        Ok(())
    })
}

/// Builds a mean-centered cosine-similarity graph from a row-major
/// `rows × cols` matrix of feature vectors.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ta_instance_from_points(
    data: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut TaInstance,
) -> TaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        if data.is_null() {
            return Err(null_arg("data"));
        }
        let flat = std::slice::from_raw_parts(data, rows * cols);
        let points: Vec<Vec<f64>> = flat.chunks(cols.max(1)).map(<[f64]>::to_vec).collect();
        let g = SimilarityGraph::cosine(&points)?.mean_center()?;
        put(out, TaInstance { inner: Instance::Graph(Arc::new(g)) });
        Ok(())
    })
}

/// Number of elements, or 0 for NULL.
///
/// # Safety
/// `instance` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_instance_size(instance: *const TaInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.n())
}

/// # Safety
/// `instance` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ta_instance_free(instance: *mut TaInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

unsafe fn run_search<F>(
    instance: *const TaInstance,
    cost: u32,
    heuristic: u32,
    out: *mut *mut TaResult,
    search: F,
) -> TaStatus
where
    F: FnOnce(&dyn trellis_astar::CostModel) -> Result<TaResult, Error>,
{
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let instance = instance.as_ref().ok_or_else(|| null_arg("instance"))?;
        let model = instance.inner.model(cost_kind(cost)?, heuristic_kind(heuristic)?)?;
        put(out, search(model.as_ref())?);
        Ok(())
    })
}

/// Optimal hierarchy by A* on the full trellis.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ta_exact(
    instance: *const TaInstance,
    cost: u32,
    heuristic: u32,
    out: *mut *mut TaResult,
) -> TaStatus {
    run_search(instance, cost, heuristic, out, |m| {
        let mut trellis = Trellis::full(m.element_count())?;
        let r = astar_search(&mut trellis, m, None)?;
        Ok(TaResult {
            cost: r.cost,
            tree: r.tree,
            nodes_explored: r.stats.nodes_explored,
        })
    })
}

#[no_mangle]
pub extern "C" fn ta_approx_options_default() -> TaApproxOptions {
    let d = ExtenderConfig::default();
    TaApproxOptions {
        seed: 0,
        rounds: 1,
        pool: d.pool as u32,
        top_k: d.k as u32,
        sampler: TA_SAMPLER_BEST_K,
        beam_width: 0,
    }
}

/// Beam-seeded sparse-trellis A*. `options` may be NULL for defaults.
///
/// # Safety
/// `instance` must be a live handle; `options` NULL or readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ta_approx(
    instance: *const TaInstance,
    cost: u32,
    heuristic: u32,
    options: *const TaApproxOptions,
    out: *mut *mut TaResult,
) -> TaStatus {
    let o = options.as_ref().copied().unwrap_or_else(|| ta_approx_options_default());
    let mode = match o.sampler {
        TA_SAMPLER_BEST_K => SamplerMode::BestK,
        TA_SAMPLER_IMPORTANCE => SamplerMode::Importance,
        other => {
            set_error(format!("unknown sampler {other}"));
            return TaStatus::Domain;
        }
    };
    let config = ApproxConfig {
        beam_width: (o.beam_width > 0).then_some(o.beam_width as usize),
        extender: ExtenderConfig {
            mode,
            k: o.top_k as usize,
            pool: o.pool as usize,
        },
        rounds: o.rounds as usize,
        seed: o.seed,
    };
    run_search(instance, cost, heuristic, out, |m| {
        let r = approximate_search(m, config)?.result;
        Ok(TaResult {
            cost: r.cost,
            tree: r.tree,
            nodes_explored: r.stats.nodes_explored,
        })
    })
}

/// Greedy agglomeration.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ta_greedy(instance: *const TaInstance, cost: u32, out: *mut *mut TaResult) -> TaStatus {
    run_search(instance, cost, TA_HEURISTIC_DEFAULT, out, |m| {
        let g = greedy(m)?;
        Ok(TaResult {
            cost: g.cost,
            tree: g.tree,
            nodes_explored: 0,
        })
    })
}

/// Beam search; `width` 0 selects the default width.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ta_beam(
    instance: *const TaInstance,
    cost: u32,
    width: u32,
    out: *mut *mut TaResult,
) -> TaStatus {
    run_search(instance, cost, TA_HEURISTIC_DEFAULT, out, |m| {
        let w = if width == 0 {
            default_beam_width(m.element_count())
        } else {
            width as usize
        };
        let b = beam_search(m, w)?;
        Ok(TaResult {
            cost: b.best.cost,
            tree: b.best.tree,
            nodes_explored: b.states_expanded,
        })
    })
}

/// Cost of the hierarchy; NaN for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_result_cost(result: *const TaResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.cost)
}

/// Trellis nodes explored (beam states for beam search, 0 for greedy).
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_result_nodes_explored(result: *const TaResult) -> u64 {
    result.as_ref().map_or(0, |r| r.nodes_explored)
}

/// The tree as `{"members": [...], "children": [...]}` JSON, or NULL for a
/// NULL handle. Free with [`ta_string_free`].
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ta_result_tree_json(result: *const TaResult) -> *mut c_char {
    let Some(r) = result.as_ref() else {
        return ptr::null_mut();
    };
    let json = serde_json::to_string(&r.tree.to_tree_node()).expect("tree serializes");
    CString::new(json).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `result` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ta_result_free(result: *mut TaResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ta_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
