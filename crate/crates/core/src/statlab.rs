//! Monte Carlo and quadrature machinery turning the probabilistic claims
//! behind the constructions into measurable experiments: moment estimates
//! with standard errors, indicator covariances, the two-flip probability
//! `f(a,b)` by simulation and by quadrature, shift-covariance bounds,
//! variance curves over parameter grids, and end-to-end embedding checks.
//!
//! Every estimate ships with a standard error. Trials draw their streams as
//! a fixed function of the trial index, so results are byte-identical
//! regardless of execution order or thread count; reductions run over
//! trial-indexed buffers with pairwise summation.

use crate::bitcode::BitCode;
use crate::embed::{BinaryEmbedder, EmbedderRecipe};
use crate::error::{Error, Result};
use crate::metrics::{geodesic, inner, norm};
use crate::points::PointSet;
use crate::rng::{gaussian_with, uniform_subset_with, SeedSpec};
use crate::transforms::shift_apply;
use rand_distr::Distribution;
use rayon::prelude::*;

/// Fixed-shape pairwise summation; deterministic for a given input order.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Monte Carlo mean/variance record with standard errors.
#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub mean: f64,
    pub variance: f64,
    pub std_error_mean: f64,
    pub std_error_variance: f64,
    pub trials: u64,
    pub seed: SeedSpec,
}

impl MomentEstimate {
    /// Moments of a sample vector. The variance standard error uses the
    /// fourth-central-moment formula `sqrt((m4 - s^4) / T)`; indicator-based
    /// distances are far from normal, so the normal-theory error would
    /// understate.
    pub fn from_samples(samples: &[f64], seed: SeedSpec) -> Result<MomentEstimate> {
        let t = samples.len();
        if t < 2 {
            return Err(Error::InvalidArgument("moment estimation requires trials >= 2".into()));
        }
        let tf = t as f64;
        let mean = pairwise_sum(samples) / tf;
        let centered_sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
        let variance = pairwise_sum(&centered_sq) / (tf - 1.0);
        let m4 =
            pairwise_sum(&centered_sq.iter().map(|c| c * c).collect::<Vec<f64>>()) / tf;
        let se_var = ((m4 - variance * variance).max(0.0) / tf).sqrt();
        Ok(MomentEstimate {
            mean,
            variance,
            std_error_mean: (variance / tf).sqrt(),
            std_error_variance: se_var,
            trials: t as u64,
            seed,
        })
    }
}

/// Per-trial distances `d(f(p), f(q))` under a fresh embedder per trial,
/// using the embedder's declared output distance.
pub fn distance_samples(
    recipe: &EmbedderRecipe,
    p: &[f64],
    q: &[f64],
    trials: u64,
    seed: &SeedSpec,
) -> Result<Vec<f64>> {
    if trials < 2 {
        return Err(Error::InvalidArgument("trials must be >= 2".into()));
    }
    if norm(p) == 0.0 || norm(q) == 0.0 {
        return Err(Error::InvalidArgument("points must be nonzero".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let e = recipe.build(&seed.for_trial(t))?;
            let a = e.embed(p)?;
            let b = e.embed(q)?;
            e.distance(&a, &b)
        })
        .collect()
}

/// Mean and variance of the embedded distance for one point pair.
pub fn estimate_moments(
    recipe: &EmbedderRecipe,
    p: &[f64],
    q: &[f64],
    trials: u64,
    seed: &SeedSpec,
) -> Result<MomentEstimate> {
    let samples = distance_samples(recipe, p, q, trials, seed)?;
    MomentEstimate::from_samples(&samples, *seed)
}

/// Sample covariance of two indicator variables with its standard error
/// and the product bound `8 max |<x_i, y_j>|`.
#[derive(Debug, Clone, Copy)]
pub struct CovarianceEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: u64,
    pub bound_rhs: f64,
}

/// `8 max{|<x1,y1>|, |<x1,y2>|, |<x2,y1>|, |<x2,y2>|}`.
pub fn cov_bound_rhs(x1: &[f64], x2: &[f64], y1: &[f64], y2: &[f64]) -> f64 {
    let m = inner(x1, y1)
        .abs()
        .max(inner(x1, y2).abs())
        .max(inner(x2, y1).abs())
        .max(inner(x2, y2).abs());
    8.0 * m
}

const MC_CHUNK: u64 = 4096;

/// Joint cell counts of two binary events accumulated over chunked trials.
/// Chunk `c` uses the stream for trial index `c`, a fixed function of the
/// chunk index, so accumulation order cannot change the counts.
fn binary_joint_counts(
    trials: u64,
    seed: &SeedSpec,
    per_trial: impl Fn(&mut rand_chacha::ChaCha8Rng) -> (bool, bool) + Sync,
) -> (u64, u64, u64) {
    let chunks = trials.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed.for_trial(c).rng();
            let lo = c * MC_CHUNK;
            let hi = ((c + 1) * MC_CHUNK).min(trials);
            let (mut n11, mut n1x, mut nx1) = (0u64, 0u64, 0u64);
            for _ in lo..hi {
                let (x, y) = per_trial(&mut rng);
                n11 += (x && y) as u64;
                n1x += x as u64;
                nx1 += y as u64;
            }
            (n11, n1x, nx1)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
}

fn covariance_from_counts(n11: u64, n1x: u64, nx1: u64, trials: u64) -> (f64, f64) {
    let t = trials as f64;
    let (p11, px, py) = (n11 as f64 / t, n1x as f64 / t, nx1 as f64 / t);
    let cov = p11 - px * py;
    // SE via the influence function h = (X - px)(Y - py); cell frequencies
    // give E h^2 exactly.
    let n10 = n1x - n11;
    let n01 = nx1 - n11;
    let n00 = trials - n1x - n01;
    let cell = |count: u64, x: f64, y: f64| {
        let h = (x - px) * (y - py);
        count as f64 / t * h * h
    };
    let eh2 = cell(n11, 1.0, 1.0) + cell(n10, 1.0, 0.0) + cell(n01, 0.0, 1.0) + cell(n00, 0.0, 0.0);
    let se = ((eh2 - cov * cov).max(0.0) / t).sqrt();
    (cov, se)
}

/// Covariance of the indicators `1_{Z(x1) != Z(x2)}` and `1_{Z(y1) != Z(y2)}`
/// over a shared standard Gaussian `g`, with `Z(x) = sgn(<g, x>)`.
pub fn estimate_indicator_covariance(
    x1: &[f64],
    x2: &[f64],
    y1: &[f64],
    y2: &[f64],
    trials: u64,
    seed: &SeedSpec,
) -> Result<CovarianceEstimate> {
    let n = x1.len();
    if [x2.len(), y1.len(), y2.len()].iter().any(|&l| l != n) {
        return Err(Error::DimensionMismatch { expected: n, got: x2.len() });
    }
    if trials < 2 {
        return Err(Error::InvalidArgument("trials must be >= 2".into()));
    }
    for v in [x1, x2, y1, y2] {
        if (norm(v) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("inputs must be unit vectors".into()));
        }
    }
    let (n11, n1x, nx1) = binary_joint_counts(trials, seed, |rng| {
        let g = gaussian_with(rng, n);
        let x = (inner(&g, x1) >= 0.0) != (inner(&g, x2) >= 0.0);
        let y = (inner(&g, y1) >= 0.0) != (inner(&g, y2) >= 0.0);
        (x, y)
    });
    let (value, std_error) = covariance_from_counts(n11, n1x, nx1, trials);
    Ok(CovarianceEstimate { value, std_error, trials, bound_rhs: cov_bound_rhs(x1, x2, y1, y2) })
}

/// Monte Carlo estimate of
/// `f(a,b) = P(sgn(g1) != sgn(g1 + a g3), sgn(g2) != sgn(g2 + b g3))`.
pub fn f_ab_montecarlo(a: f64, b: f64, trials: u64, seed: &SeedSpec) -> Result<MomentEstimate> {
    if trials < 2 {
        return Err(Error::InvalidArgument("trials must be >= 2".into()));
    }
    let dist = rand_distr::StandardNormal;
    let (n11, _, _) = binary_joint_counts(trials, seed, |rng| {
        let g1: f64 = dist.sample(rng);
        let g2: f64 = dist.sample(rng);
        let g3: f64 = dist.sample(rng);
        let hit = ((g1 >= 0.0) != (g1 + a * g3 >= 0.0)) && ((g2 >= 0.0) != (g2 + b * g3 >= 0.0));
        (hit, hit)
    });
    let t = trials as f64;
    let p = n11 as f64 / t;
    let var = p * (1.0 - p);
    // central moments of a Bernoulli(p), in closed form
    let m4 = var * (1.0 - 3.0 * var);
    Ok(MomentEstimate {
        mean: p,
        variance: var,
        std_error_mean: (var / t).sqrt(),
        std_error_variance: ((m4 - var * var).max(0.0) / t).sqrt(),
        trials,
        seed: *seed,
    })
}

/// Adaptive Simpson quadrature with Richardson error control.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            return left + right + err / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// `f(a, a)` evaluated by integrating the derivative
/// `df/da (a,a) = a / (pi (a^2+1) sqrt(2a^2+1))` from 0 to `a`, to 1e-10
/// absolute accuracy. Serves as the quadrature oracle for the Monte Carlo
/// route.
pub fn f_aa_quadrature(a: f64) -> Result<f64> {
    if a < 0.0 {
        return Err(Error::InvalidArgument("f_aa_quadrature requires a >= 0".into()));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let integrand =
        |t: f64| t / (std::f64::consts::PI * (t * t + 1.0) * (2.0 * t * t + 1.0).sqrt());
    Ok(adaptive_simpson(&integrand, 0.0, a, 1e-11))
}

/// Right-hand side of the shift-covariance bound for a signed circulant
/// row pair at shift `k`:
/// `8 (|p.T^k p| + |p.T^k q| + |q.T^k p| + |q.T^k q|)` in Euclidean norms of
/// entrywise products. `k = 0 (mod n)` and `k = n/2 (mod n)` are excluded.
pub fn radcov_bound_rhs(p: &[f64], q: &[f64], k: i64) -> Result<f64> {
    let n = p.len();
    if q.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.len() });
    }
    if n == 0 {
        return Err(Error::EmptyInput("radcov_bound_rhs"));
    }
    let kr = k.rem_euclid(n as i64) as usize;
    if kr == 0 || (n.is_multiple_of(2) && kr == n / 2) {
        return Err(Error::InvalidArgument(format!(
            "shift k={k} is excluded (k = 0 or n/2 mod n)"
        )));
    }
    let term = |u: &[f64], v: &[f64]| -> Result<f64> {
        let shifted = shift_apply(v, kr as i64)?;
        Ok(u.iter().zip(&shifted).map(|(a, b)| (a * b) * (a * b)).sum::<f64>().sqrt())
    };
    Ok(8.0 * (term(p, p)? + term(p, q)? + term(q, p)? + term(q, q)?))
}

/// Pair families used by variance experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Two independent uniformly random unit vectors.
    RandomUnit,
    /// The adversarial alternating pair supported on odd/even coordinates.
    Alternating,
    /// Independent s-sparse random unit vectors.
    SparseRandom { s: usize },
}

impl PairKind {
    pub fn generate(&self, n: usize, seed: &SeedSpec) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            PairKind::RandomUnit => {
                let mut rng = seed.rng();
                let p = normalize(gaussian_with(&mut rng, n))?;
                let q = normalize(gaussian_with(&mut rng, n))?;
                Ok((p, q))
            }
            PairKind::Alternating => alternating_pair(n),
            PairKind::SparseRandom { s } => {
                if *s == 0 || *s > n {
                    return Err(Error::InvalidArgument(format!(
                        "sparsity {s} out of range for dimension {n}"
                    )));
                }
                let mut rng = seed.rng();
                let mut sparse = || -> Result<Vec<f64>> {
                    let support = uniform_subset_with(&mut rng, n, *s);
                    let values = gaussian_with(&mut rng, *s);
                    let mut v = vec![0.0; n];
                    for (&i, &val) in support.zero_based().iter().zip(&values) {
                        v[i] = val;
                    }
                    normalize(v)
                };
                Ok((sparse()?, sparse()?))
            }
        }
    }
}

fn normalize(v: Vec<f64>) -> Result<Vec<f64>> {
    let n = norm(&v);
    if n == 0.0 {
        return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
    }
    Ok(v.into_iter().map(|x| x / n).collect())
}

/// `p` on odd coordinates, `q` on even coordinates, both normalized.
/// For any subsampled circulant without sign randomization this pair has
/// embedded-distance variance exactly 1/4.
pub fn alternating_pair(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "alternating pair requires even dimension, got {n}"
        )));
    }
    let k = n / 2;
    let scale = 1.0 / (k as f64).sqrt();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for i in 0..k {
        p[2 * i] = scale; // 1-based odd positions
        q[2 * i + 1] = scale; // 1-based even positions
    }
    Ok((p, q))
}

/// One grid point of a variance curve: the moment estimate for a single
/// pair, plus diagnostics.
#[derive(Debug, Clone)]
pub struct VarianceCurveRow {
    pub kind: String,
    pub n: usize,
    pub m: usize,
    pub pair_index: usize,
    pub estimate: MomentEstimate,
    pub geodesic: f64,
    /// max of the infinity norms of the pair; diagnostic only
    pub rho: f64,
}

#[derive(Debug, Clone)]
pub struct VarianceCurve {
    pub rows: Vec<VarianceCurveRow>,
    /// Least-squares slope of log variance vs log m over the sub-grid
    /// `m <= sqrt(n)` (where the 1/m term dominates), pooled across pairs.
    pub fitted_slope: Option<f64>,
}

/// Runs moment estimation over an `(n, m)` grid. `make_recipe` maps a grid
/// point to the embedder construction; pairs are drawn once per `n` and
/// shared across the `m` values so slopes compare like with like.
pub fn variance_curve(
    make_recipe: &(dyn Fn(usize, usize) -> EmbedderRecipe + Sync),
    kind_label: &str,
    grid: &[(usize, usize)],
    pair_kind: PairKind,
    num_pairs: usize,
    trials: u64,
    seed: &SeedSpec,
) -> Result<VarianceCurve> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("variance grid"));
    }
    if num_pairs == 0 {
        return Err(Error::EmptyInput("pair count"));
    }
    let mut rows = Vec::new();
    for (gi, &(n, m)) in grid.iter().enumerate() {
        let pair_seed = seed.derive(0x7061_6972); // pair namespace
        for pair_index in 0..num_pairs {
            let (p, q) = pair_kind.generate(n, &pair_seed.for_trial(pair_index as u64))?;
            let recipe = make_recipe(n, m);
            let est_seed = seed.derive(0x0065_7374).for_trial((gi * num_pairs + pair_index) as u64);
            let estimate = estimate_moments(&recipe, &p, &q, trials, &est_seed)?;
            rows.push(VarianceCurveRow {
                kind: kind_label.to_string(),
                n,
                m,
                pair_index,
                estimate,
                geodesic: geodesic(&p, &q)?,
                rho: p.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
                    .max(q.iter().fold(0.0f64, |a, &v| a.max(v.abs()))),
            });
        }
    }
    Ok(VarianceCurve { fitted_slope: fit_slope(&rows), rows })
}

/// Pooled log-log regression of mean variance against m, restricted to
/// m <= sqrt(n).
fn fit_slope(rows: &[VarianceCurveRow]) -> Option<f64> {
    use std::collections::BTreeMap;
    let mut by_m: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for row in rows {
        if (row.m * row.m) as f64 <= row.n as f64 {
            by_m.entry(row.m).or_default().push(row.estimate.variance);
        }
    }
    if by_m.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = by_m
        .into_iter()
        .map(|(m, vars)| {
            let mean = vars.iter().sum::<f64>() / vars.len() as f64;
            ((m as f64).ln(), mean.max(1e-300).ln())
        })
        .collect();
    let k = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Some((k * sxy - sx * sy) / (k * sxx - sx * sx))
}

/// Worst-pair deviation of the embedded distance from the geodesic distance
/// over a point set.
#[derive(Debug, Clone, Copy)]
pub struct DeltaEmbeddingReport {
    pub max_deviation: f64,
    pub pass: bool,
    pub worst_pair: (usize, usize),
}

/// Checks `|d(f(p), f(q)) - d_geo(p, q)| <= delta` over all unordered pairs,
/// using the embedder's declared output distance.
pub fn check_delta_embedding(
    embedder: &BinaryEmbedder,
    points: &PointSet,
    delta: f64,
) -> Result<DeltaEmbeddingReport> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "delta-embedding check requires at least two points".into(),
        ));
    }
    for (i, x) in points.iter().enumerate() {
        if (norm(x) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("point {i} is not unit-norm")));
        }
    }
    let codes: Vec<BitCode> =
        points.iter().map(|x| embedder.embed(x)).collect::<Result<_>>()?;
    let mut max_dev = -1.0f64;
    let mut worst = (0, 0);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d_code = embedder.distance(&codes[i], &codes[j])?;
            let d_geo = geodesic(points.point(i), points.point(j))?;
            let dev = (d_code - d_geo).abs();
            if dev > max_dev {
                max_dev = dev;
                worst = (i, j);
            }
        }
    }
    Ok(DeltaEmbeddingReport { max_deviation: max_dev, pass: max_dev <= delta, worst_pair: worst })
}
