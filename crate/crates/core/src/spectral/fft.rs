//! Unnormalized 2-D complex FFTs on the row-major `(y, x)` layout.
//!
//! Plans are cached per `(nx, ny)` behind a mutex; the cached plan itself is
//! immutable and shared through an `Arc`, so transforms run concurrently.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Plan2d {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

type PlanCache = Mutex<HashMap<(usize, usize), Arc<Plan2d>>>;

fn cache() -> &'static PlanCache {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn plan(nx: usize, ny: usize) -> Arc<Plan2d> {
    let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
    map.entry((nx, ny))
        .or_insert_with(|| {
            let mut planner = FftPlanner::<f64>::new();
            Arc::new(Plan2d {
                nx,
                ny,
                fwd_x: planner.plan_fft_forward(nx),
                inv_x: planner.plan_fft_inverse(nx),
                fwd_y: planner.plan_fft_forward(ny),
                inv_y: planner.plan_fft_inverse(ny),
            })
        })
        .clone()
}

impl Plan2d {
    /// In-place `Σ u e^{-2πi(jx/nx + ky/ny)}`.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd_x, &self.fwd_y);
    }

    /// In-place `Σ û e^{+2πi(jx/nx + ky/ny)}` without the `1/(nx ny)` factor.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv_x, &self.inv_y);
    }

    fn run(&self, data: &mut [Complex64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        let (nx, ny) = (self.nx, self.ny);
        debug_assert_eq!(data.len(), nx * ny);
        fx.process(data);
        let mut cols = vec![Complex64::new(0.0, 0.0); nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                cols[ix * ny + iy] = data[iy * nx + ix];
            }
        }
        fy.process(&mut cols);
        for ix in 0..nx {
            for iy in 0..ny {
                data[iy * nx + ix] = cols[ix * ny + iy];
            }
        }
    }
}

/// 1-D plans for the periodic-line utilities.
pub(crate) fn plan_1d(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    type Cache1 = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;
    static CACHE1: OnceLock<Cache1> = OnceLock::new();
    let mut map = CACHE1
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    map.entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::<f64>::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}
