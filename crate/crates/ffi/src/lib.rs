//! C ABI over `shex0`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with the
//! matching `_free` function. Every fallible call returns a [`Shex0Status`];
//! on failure a message is available from [`shex0_last_error`] until the next
//! call on the same thread. Strings returned to the caller are owned by the
//! caller and released with [`shex0_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use shex0::analysis::{realizable_typesets_bounded, typesets_of_graph, DEFAULT_SEARCH_DEPTH};
use shex0::canon::canonize;
use shex0::format::{
    parse_schema, parse_typed_graph, print_schema_with_order, print_typed_graph, SchemaDocument,
};
use shex0::learner::typed_learner;
use shex0::validate::{check_membership, Mode};
use shex0::{TypeName, TypedGraph};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shex0Status {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    AnalysisError = 4,
    InvalidArgument = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shex0Mode {
    Witness = 0,
    Strict = 1,
}

/// Opaque shape graph, with its optional base order header.
pub struct Shex0Schema(SchemaDocument);

/// Opaque typed graph.
pub struct Shex0Graph(TypedGraph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(Shex0Status, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> Shex0Status {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Shex0Status::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            Shex0Status::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(
            Shex0Status::NullArgument,
            "null string argument".into(),
        ));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(Shex0Status::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(Shex0Status::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            Shex0Status::NullArgument,
            "null output pointer".into(),
        ));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn shex0_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn shex0_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shex0_schema_parse(
    text: *const c_char,
    out: *mut *mut Shex0Schema,
) -> Shex0Status {
    guard(|| {
        let doc = parse_schema(self::text(text)?)
            .map_err(|e| Failure(Shex0Status::ParseError, e.to_string()))?;
        put(out, Shex0Schema(doc))
    })
}

/// # Safety
/// `schema` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn shex0_schema_free(schema: *mut Shex0Schema) {
    if !schema.is_null() {
        drop(Box::from_raw(schema));
    }
}

/// Text form of the schema, or null when `schema` is null.
///
/// # Safety
/// `schema` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn shex0_schema_to_string(schema: *const Shex0Schema) -> *mut c_char {
    match schema.as_ref() {
        Some(Shex0Schema(doc)) => {
            owned_string(print_schema_with_order(&doc.shape, doc.order.as_deref()))
        }
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `text` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shex0_graph_parse(
    text: *const c_char,
    out: *mut *mut Shex0Graph,
) -> Shex0Status {
    guard(|| {
        let g = parse_typed_graph(self::text(text)?)
            .map_err(|e| Failure(Shex0Status::ParseError, e.to_string()))?;
        put(out, Shex0Graph(g))
    })
}

/// # Safety
/// `graph` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn shex0_graph_free(graph: *mut Shex0Graph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn shex0_graph_to_string(graph: *const Shex0Graph) -> *mut c_char {
    match graph.as_ref() {
        Some(Shex0Graph(g)) => owned_string(print_typed_graph(g)),
        None => ptr::null_mut(),
    }
}

/// Stores in `valid` whether `graph` conforms to `schema`. Details of the
/// first violation go to the last-error slot.
///
/// # Safety
/// Handles must be live; `valid` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn shex0_validate(
    graph: *const Shex0Graph,
    schema: *const Shex0Schema,
    mode: Shex0Mode,
    valid: *mut bool,
) -> Shex0Status {
    let mut first = None;
    let status = guard(|| {
        let (g, s) = (handle(graph)?, handle(schema)?);
        let valid = valid
            .as_mut()
            .ok_or_else(|| Failure(Shex0Status::NullArgument, "null output pointer".into()))?;
        let mode = match mode {
            Shex0Mode::Witness => Mode::Witness,
            Shex0Mode::Strict => Mode::Strict,
        };
        let verdict = check_membership(&g.0, &s.0.shape, mode);
        *valid = verdict.is_valid();
        first = verdict.diagnostics.first().map(ToString::to_string);
        Ok(())
    });
    if let Some(msg) = first {
        set_error(msg);
    }
    status
}

fn order_lines(text: &str) -> Vec<TypeName> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(TypeName::new)
        .collect()
}

/// Infers a schema from `graph`. `order` is null or one type name per line,
/// used to break ties between types.
///
/// # Safety
/// `graph` must be live, `order` null or a valid string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn shex0_infer(
    graph: *const Shex0Graph,
    order: *const c_char,
    out: *mut *mut Shex0Schema,
) -> Shex0Status {
    guard(|| {
        let g = handle(graph)?;
        let base = if order.is_null() {
            Vec::new()
        } else {
            order_lines(text(order)?)
        };
        let r = typed_learner(&g.0, &base)
            .map_err(|e| Failure(Shex0Status::AnalysisError, e.to_string()))?;
        let order = (!base.is_empty()).then_some(base);
        put(
            out,
            Shex0Schema(SchemaDocument {
                shape: r.schema,
                order,
            }),
        )
    })
}

/// Canonical form of `schema`. The typesets come from `typesets` when it is
/// not null, otherwise from a bounded search of depth `search_depth` (0 for
/// the default). The base order is the schema's own header.
///
/// # Safety
/// `schema` must be live, `typesets` null or live, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn shex0_canonize(
    schema: *const Shex0Schema,
    typesets: *const Shex0Graph,
    search_depth: u32,
    out: *mut *mut Shex0Schema,
) -> Shex0Status {
    guard(|| {
        let doc = &handle(schema)?.0;
        let family = match typesets.as_ref() {
            Some(g) => typesets_of_graph(&g.0)
                .map_err(|e| Failure(Shex0Status::InvalidArgument, e.to_string()))?,
            None => {
                let depth = if search_depth == 0 {
                    DEFAULT_SEARCH_DEPTH
                } else {
                    search_depth as usize
                };
                realizable_typesets_bounded(&doc.shape, depth).family
            }
        };
        let base = doc.order.clone().unwrap_or_default();
        let (shape, _) = canonize(&doc.shape, &family, &base);
        put(
            out,
            Shex0Schema(SchemaDocument {
                shape,
                order: doc.order.clone(),
            }),
        )
    })
}
