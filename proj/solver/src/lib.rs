//! C ABI around the Clarabel conic solver, restricted to what the observer
//! synthesis needs: minimize q'x subject to Ax + s = b with s in a product of
//! zero / nonnegative / PSD-triangle cones. No quadratic cost term.
//!
//! All matrices arrive in compressed-sparse-column form. The PSD cones use
//! Clarabel's scaled-triangle vectorization (column-major upper triangle,
//! off-diagonal entries scaled by sqrt(2)); the caller packs rows of A and b
//! in that same order.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, PSDTriangleConeT,
    SolverStatus, SupportedConeT, ZeroConeT,
};

pub const CONE_ZERO: i32 = 0;
pub const CONE_NONNEG: i32 = 1;
pub const CONE_PSD_TRIANGLE: i32 = 2;

pub const STATUS_SOLVED: i32 = 0;
pub const STATUS_ALMOST_SOLVED: i32 = 1;
pub const STATUS_PRIMAL_INFEASIBLE: i32 = 2;
pub const STATUS_DUAL_INFEASIBLE: i32 = 3;
pub const STATUS_MAX_ITERATIONS: i32 = 4;
pub const STATUS_NUMERICAL: i32 = 5;

#[repr(C)]
pub struct ShimSettings {
    pub max_iter: u32,
    pub tol_gap_abs: f64,
    pub tol_gap_rel: f64,
    pub tol_feas: f64,
    pub verbose: i32,
}

#[repr(C)]
pub struct ShimResult {
    pub status: i32,
    pub obj: f64,
    pub iterations: u32,
    pub r_prim: f64,
    pub r_dual: f64,
}

/// Returns 0 on success, negative on malformed input. `x_out` must hold
/// `nvar` doubles; the primal solution is written there for every terminal
/// status that produces one (zeros otherwise).
#[no_mangle]
pub unsafe extern "C" fn conic_shim_solve(
    nvar: usize,
    q: *const f64,
    nrows: usize,
    a_colptr: *const usize,
    a_rowidx: *const usize,
    a_vals: *const f64,
    b: *const f64,
    ncones: usize,
    cone_tags: *const i32,
    cone_dims: *const usize,
    settings: *const ShimSettings,
    x_out: *mut f64,
    result: *mut ShimResult,
) -> i32 {
    if q.is_null() || b.is_null() || x_out.is_null() || result.is_null() || settings.is_null() {
        return -1;
    }
    let q = std::slice::from_raw_parts(q, nvar);
    let colptr = std::slice::from_raw_parts(a_colptr, nvar + 1);
    let nnz = colptr[nvar];
    let rowidx = std::slice::from_raw_parts(a_rowidx, nnz);
    let vals = std::slice::from_raw_parts(a_vals, nnz);
    let b = std::slice::from_raw_parts(b, nrows);
    let tags = std::slice::from_raw_parts(cone_tags, ncones);
    let dims = std::slice::from_raw_parts(cone_dims, ncones);
    let set = &*settings;

    let mut cones: Vec<SupportedConeT<f64>> = Vec::with_capacity(ncones);
    let mut total_rows = 0usize;
    for k in 0..ncones {
        match tags[k] {
            CONE_ZERO => {
                cones.push(ZeroConeT(dims[k]));
                total_rows += dims[k];
            }
            CONE_NONNEG => {
                cones.push(NonnegativeConeT(dims[k]));
                total_rows += dims[k];
            }
            CONE_PSD_TRIANGLE => {
                cones.push(PSDTriangleConeT(dims[k]));
                total_rows += dims[k] * (dims[k] + 1) / 2;
            }
            _ => return -2,
        }
    }
    if total_rows != nrows {
        return -3;
    }

    let p = CscMatrix::<f64>::zeros((nvar, nvar));
    let a = CscMatrix::<f64>::new(nrows, nvar, colptr.to_vec(), rowidx.to_vec(), vals.to_vec());

    let built = DefaultSettingsBuilder::default()
        .verbose(set.verbose != 0)
        .max_iter(set.max_iter)
        .tol_gap_abs(set.tol_gap_abs)
        .tol_gap_rel(set.tol_gap_rel)
        .tol_feas(set.tol_feas)
        .build();
    let settings = match built {
        Ok(s) => s,
        Err(_) => return -4,
    };

    // A panic must not unwind across the C boundary; fold solver breakdowns
    // into the numerical-failure status instead.
    let solved = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        let mut solver = DefaultSolver::new(&p, q, &a, b, &cones, settings).ok()?;
        solver.solve();
        let status = match solver.solution.status {
            SolverStatus::Solved => STATUS_SOLVED,
            SolverStatus::AlmostSolved => STATUS_ALMOST_SOLVED,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                STATUS_PRIMAL_INFEASIBLE
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
                STATUS_DUAL_INFEASIBLE
            }
            SolverStatus::MaxIterations => STATUS_MAX_ITERATIONS,
            _ => STATUS_NUMERICAL,
        };
        Some((
            status,
            solver.solution.obj_val,
            solver.solution.iterations,
            solver.solution.r_prim,
            solver.solution.r_dual,
            solver.solution.x,
        ))
    }));

    let xs = std::slice::from_raw_parts_mut(x_out, nvar);
    match solved {
        Ok(Some((status, obj, iterations, r_prim, r_dual, x))) => {
            if x.len() == nvar {
                xs.copy_from_slice(&x);
            } else {
                xs.fill(0.0);
            }
            (*result).status = status;
            (*result).obj = obj;
            (*result).iterations = iterations;
            (*result).r_prim = r_prim;
            (*result).r_dual = r_dual;
            0
        }
        Ok(None) => -5,
        Err(_) => {
            xs.fill(0.0);
            (*result).status = STATUS_NUMERICAL;
            (*result).obj = f64::NAN;
            (*result).iterations = 0;
            (*result).r_prim = f64::NAN;
            (*result).r_dual = f64::NAN;
            0
        }
    }
}
