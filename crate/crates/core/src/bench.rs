//! Wall-clock timing of the embedding stages. Single-threaded by design:
//! scaling ratios are only meaningful per operation. Warmup runs are
//! excluded and the median of the measured repetitions is reported.

use crate::embed::{
    build_accelerated_embedder, build_dense_embedder, build_signed_circulant_embedder, IMode,
};
use crate::error::Result;
use crate::jl::JlVariant;
use crate::rng::{gaussian_with, SeedSpec};
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub stage: String,
    pub n: usize,
    /// "dense" or "sparse(nnz)"
    pub input: String,
    pub reps: usize,
    pub median_ns: f64,
}

pub fn median_time_ns(mut op: impl FnMut(), warmup: usize, reps: usize) -> f64 {
    for _ in 0..warmup {
        op();
    }
    let mut times: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let t0 = Instant::now();
            op();
            t0.elapsed().as_nanos() as f64
        })
        .collect();
    times.sort_by(|a, b| a.total_cmp(b));
    times[times.len() / 2]
}

fn unit_gaussian(seed: &SeedSpec, n: usize) -> Vec<f64> {
    let v = gaussian_with(&mut seed.rng(), n);
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Per-call time of the signed circulant sign stage at each size.
pub fn bench_circulant_stage(sizes: &[usize], reps: usize, seed: &SeedSpec) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let e = build_signed_circulant_embedder(
            &seed.derive(i as u64),
            n,
            IMode::Uniform,
            (n / 4).max(1),
        )?;
        let x = unit_gaussian(&seed.derive(1000 + i as u64), n);
        let t = median_time_ns(
            || {
                let _ = std::hint::black_box(e.sign_stage(std::hint::black_box(&x)).unwrap());
            },
            2,
            reps,
        );
        rows.push(BenchRow {
            stage: "circulant-sign-stage".into(),
            n,
            input: "dense".into(),
            reps,
            median_ns: t,
        });
    }
    Ok(rows)
}

/// Dense Gaussian embedding time at each size (m fixed), to exhibit the
/// super-FFT growth of the unstructured construction.
pub fn bench_dense_stage(
    sizes: &[usize],
    m: usize,
    reps: usize,
    seed: &SeedSpec,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let e = build_dense_embedder(&seed.derive(i as u64), n, m)?;
        let x = unit_gaussian(&seed.derive(2000 + i as u64), n);
        let t = median_time_ns(
            || {
                let _ = std::hint::black_box(e.embed(std::hint::black_box(&x)).unwrap());
            },
            2,
            reps,
        );
        rows.push(BenchRow { stage: "dense-embed".into(), n, input: "dense".into(), reps, median_ns: t });
    }
    Ok(rows)
}

/// SJLT-accelerated embedding on a dense input versus an input with `nnz`
/// nonzeros; the projection runs in time proportional to the support size.
pub fn bench_sjlt_sparse_vs_dense(
    n: usize,
    m: usize,
    nprime: usize,
    s: usize,
    nnz: usize,
    reps: usize,
    seed: &SeedSpec,
) -> Result<Vec<BenchRow>> {
    let e = build_accelerated_embedder(seed, n, m, JlVariant::Sjlt, nprime, Some(s))?;
    let dense_x = unit_gaussian(&seed.derive(1), n);
    let sparse_x = {
        let mut v = vec![0.0; n];
        let vals = gaussian_with(&mut seed.derive(2).rng(), nnz);
        let step = n / nnz.max(1);
        let mut norm = 0.0;
        for (j, val) in vals.iter().enumerate() {
            v[(j * step) % n] = *val;
            norm += val * val;
        }
        let norm = norm.sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        v
    };
    let mut rows = Vec::new();
    for (label, x) in [("dense".to_string(), &dense_x), (format!("sparse({nnz})"), &sparse_x)] {
        let t = median_time_ns(
            || {
                let _ = std::hint::black_box(e.embed(std::hint::black_box(x)).unwrap());
            },
            2,
            reps,
        );
        rows.push(BenchRow { stage: "sjlt-accelerated-embed".into(), n, input: label, reps, median_ns: t });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_returns_positive_medians() {
        let rows = bench_circulant_stage(&[64, 256], 3, &SeedSpec::new(300, 0)).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.median_ns > 0.0));
    }
}
