//! Thin wrapper around a cached complex FFT plan.
//!
//! Plans are cached per thread and per length, so repeated transforms of the
//! same size (the common case in Monte Carlo loops) pay for planning once.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

type PlanCache = (FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>);

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

pub(crate) fn forward(buf: &mut [Complex<f64>]) {
    plan(buf.len(), false).process(buf);
}

/// Inverse transform, normalized by `1/n` so that `inverse(forward(x)) = x`.
pub(crate) fn inverse(buf: &mut [Complex<f64>]) {
    let n = buf.len();
    plan(n, true).process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

pub(crate) fn to_complex(x: &[f64]) -> Vec<Complex<f64>> {
    x.iter().map(|&v| Complex::new(v, 0.0)).collect()
}
