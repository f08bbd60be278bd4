//! Seeded, reproducible sampling of every random object the constructions
//! use: Gaussian vectors, Rademacher sign vectors, uniform index subsets,
//! dyadic index sets and sparse sign patterns.
//!
//! All draws flow from a [`SeedSpec`]: a ChaCha8 key derived from
//! `master_seed` plus a 64-bit stream id. Identical specs reproduce
//! identical draws; distinct stream ids give independent streams, so
//! Monte Carlo trials can run in any order (or in parallel) without
//! changing results.

use crate::error::{Error, Result};
use crate::transforms::IndexSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Key + stream pair identifying one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

/// SplitMix64 finalizer; bijective on u64.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec { master_seed, stream_id }
    }

    /// A labeled sub-experiment: re-keys the generator, keeps the stream.
    pub fn derive(&self, tag: u64) -> SeedSpec {
        SeedSpec {
            master_seed: mix64(self.master_seed ^ mix64(tag)),
            stream_id: self.stream_id,
        }
    }

    /// Stream for trial `t`. For a fixed base spec the map `t -> stream`
    /// is injective, so per-trial results do not depend on execution order.
    pub fn for_trial(&self, t: u64) -> SeedSpec {
        SeedSpec { master_seed: self.master_seed, stream_id: self.stream_id ^ t }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

pub(crate) fn gaussian_with(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub(crate) fn rademacher_with(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Partial Fisher-Yates over `[n]`: the first `m` entries are an exactly
/// uniform size-m subset; returned sorted.
pub(crate) fn uniform_subset_with(rng: &mut ChaCha8Rng, n: usize, m: usize) -> IndexSet {
    debug_assert!(m >= 1 && m <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    let mut picked: Vec<usize> = pool[..m].to_vec();
    picked.sort_unstable();
    IndexSet::from_zero_based_sorted(picked, n)
}

/// `n` independent standard normal draws, deterministic given the seed.
pub fn gaussian_vector(seed: &SeedSpec, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyInput("gaussian_vector"));
    }
    Ok(gaussian_with(&mut seed.rng(), n))
}

/// `n` independent uniform signs in `{-1, +1}`.
pub fn rademacher_vector(seed: &SeedSpec, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyInput("rademacher_vector"));
    }
    Ok(rademacher_with(&mut seed.rng(), n))
}

/// Uniformly distributed size-`m` subset of `[n]`, sorted.
pub fn uniform_subset(seed: &SeedSpec, n: usize, m: usize) -> Result<IndexSet> {
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "uniform_subset requires 1 <= m <= n, got m={m}, n={n}"
        )));
    }
    Ok(uniform_subset_with(&mut seed.rng(), n, m))
}

/// The first `m` dyadic integers `{1, 2, 4, ..., 2^(m-1)}`; requires
/// `2^(m-1) <= n`.
pub fn dyadic_set(n: usize, m: usize) -> Result<IndexSet> {
    if m == 0 {
        return Err(Error::InvalidArgument("dyadic_set requires m >= 1".into()));
    }
    if m > 63 || (1u64 << (m - 1)) > n as u64 {
        return Err(Error::InvalidArgument(format!(
            "dyadic_set requires 2^(m-1) <= n, got m={m}, n={n}"
        )));
    }
    let indices: Vec<usize> = (0..m).map(|i| 1usize << i).collect();
    IndexSet::from_one_based(&indices, n)
}

/// Column-sparse sign pattern: each of the `cols` columns holds exactly `s`
/// nonzero rows (uniform without replacement) with independent signs,
/// scaled by `1/sqrt(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SjltPattern {
    rows: usize,
    cols: usize,
    sparsity: usize,
    // column j occupies entries [j*s, (j+1)*s)
    row_indices: Vec<usize>,
    signs: Vec<f64>,
}

impl SjltPattern {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn scale(&self) -> f64 {
        1.0 / (self.sparsity as f64).sqrt()
    }

    /// The `(row, sign)` entries of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let s = self.sparsity;
        self.row_indices[j * s..(j + 1) * s]
            .iter()
            .copied()
            .zip(self.signs[j * s..(j + 1) * s].iter().copied())
    }
}

pub(crate) fn sjlt_pattern_with(
    rng: &mut ChaCha8Rng,
    n: usize,
    nprime: usize,
    s: usize,
) -> SjltPattern {
    let mut row_indices = Vec::with_capacity(n * s);
    let mut signs = Vec::with_capacity(n * s);
    for _ in 0..n {
        let col = uniform_subset_with(rng, nprime, s);
        row_indices.extend_from_slice(col.zero_based());
        for _ in 0..s {
            signs.push(if rng.gen::<bool>() { 1.0 } else { -1.0 });
        }
    }
    SjltPattern { rows: nprime, cols: n, sparsity: s, row_indices, signs }
}

/// Sparse sign pattern for an `nprime x n` transform with column sparsity `s`.
pub fn sjlt_pattern(seed: &SeedSpec, n: usize, nprime: usize, s: usize) -> Result<SjltPattern> {
    if n == 0 {
        return Err(Error::EmptyInput("sjlt_pattern"));
    }
    if s == 0 || s > nprime {
        return Err(Error::InvalidArgument(format!(
            "sjlt_pattern requires 1 <= s <= nprime, got s={s}, nprime={nprime}"
        )));
    }
    Ok(sjlt_pattern_with(&mut seed.rng(), n, nprime, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let seed = SeedSpec::new(42, 7);
        assert_eq!(gaussian_vector(&seed, 100).unwrap(), gaussian_vector(&seed, 100).unwrap());
        assert_eq!(
            rademacher_vector(&seed, 100).unwrap(),
            rademacher_vector(&seed, 100).unwrap()
        );
        assert_eq!(
            uniform_subset(&seed, 50, 10).unwrap(),
            uniform_subset(&seed, 50, 10).unwrap()
        );
        // Distinct streams differ.
        assert_ne!(
            gaussian_vector(&seed, 100).unwrap(),
            gaussian_vector(&seed.for_trial(1), 100).unwrap()
        );
        assert_ne!(
            gaussian_vector(&seed, 100).unwrap(),
            gaussian_vector(&seed.derive(1), 100).unwrap()
        );
    }

    #[test]
    fn gaussian_moments() {
        let n = 100_000;
        let x = gaussian_vector(&SeedSpec::new(1, 0), n).unwrap();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() <= 3.0 / (n as f64).sqrt(), "mean={mean}");
        assert!((0.97..=1.03).contains(&var), "var={var}");
    }

    #[test]
    fn rademacher_support_and_balance() {
        let n = 100_000;
        let x = rademacher_vector(&SeedSpec::new(2, 0), n).unwrap();
        assert!(x.iter().all(|&v| v == 1.0 || v == -1.0));
        let frac = x.iter().filter(|&&v| v == 1.0).count() as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 0.005, "frac={frac}");
    }

    #[test]
    fn uniform_subset_forced_and_frequencies() {
        let seed = SeedSpec::new(3, 0);
        assert_eq!(uniform_subset(&seed, 6, 6).unwrap(), IndexSet::full(6));
        assert!(uniform_subset(&seed, 3, 4).is_err());

        // n=4, m=1: each index frequency 0.25 +- 0.006 over 60000 trials.
        let trials = 60_000;
        let mut counts = [0usize; 4];
        for t in 0..trials {
            let set = uniform_subset(&seed.for_trial(t as u64), 4, 1).unwrap();
            counts[set.zero_based()[0]] += 1;
        }
        for c in counts {
            let f = c as f64 / trials as f64;
            assert!((f - 0.25).abs() <= 0.006, "f={f}");
        }
    }

    #[test]
    fn uniform_subset_all_pairs_uniform() {
        // n=5, m=2: each of the 10 subsets has frequency 0.1 +- 0.003.
        let seed = SeedSpec::new(4, 0);
        let trials = 100_000;
        let mut counts = std::collections::HashMap::new();
        for t in 0..trials {
            let set = uniform_subset(&seed.for_trial(t as u64), 5, 2).unwrap();
            *counts.entry(set.one_based()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 10);
        for (_, c) in counts {
            let f = c as f64 / trials as f64;
            assert!((f - 0.1).abs() <= 0.003, "f={f}");
        }
    }

    #[test]
    fn subset_selectors_negatively_correlated() {
        // P(i in I and j in I) <= (m/n)^2 + 3 sigma-hat; exact value is
        // m(m-1)/(n(n-1)) which sits strictly below (m/n)^2.
        let seed = SeedSpec::new(5, 0);
        let (n, m) = (12usize, 4usize);
        let trials = 100_000;
        let (i, j) = (2usize, 9usize);
        let mut both = 0usize;
        for t in 0..trials {
            let set = uniform_subset(&seed.for_trial(t as u64), n, m).unwrap();
            if set.contains(i) && set.contains(j) {
                both += 1;
            }
        }
        let p = both as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        let ratio = m as f64 / n as f64;
        assert!(p <= ratio * ratio + 3.0 * se, "p={p}");
    }

    #[test]
    fn dyadic_examples() {
        assert_eq!(dyadic_set(64, 4).unwrap().one_based(), vec![1, 2, 4, 8]);
        assert_eq!(dyadic_set(1, 1).unwrap().one_based(), vec![1]);
        assert!(dyadic_set(4, 4).is_err());
        assert!(dyadic_set(4, 3).is_ok()); // {1,2,4} fits in [4]
    }

    #[test]
    fn sjlt_pattern_shape() {
        let seed = SeedSpec::new(6, 0);
        let pat = sjlt_pattern(&seed, 10, 8, 3).unwrap();
        assert_eq!(pat.cols(), 10);
        assert_eq!(pat.rows(), 8);
        for j in 0..10 {
            let rows: Vec<usize> = pat.column(j).map(|(r, _)| r).collect();
            assert_eq!(rows.len(), 3);
            let mut sorted = rows.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), 3, "distinct rows per column");
            assert!(rows.iter().all(|&r| r < 8));
            assert!(pat.column(j).all(|(_, s)| s == 1.0 || s == -1.0));
        }
        // s = nprime forces fully dense columns.
        let dense = sjlt_pattern(&seed, 3, 4, 4).unwrap();
        for j in 0..3 {
            let mut rows: Vec<usize> = dense.column(j).map(|(r, _)| r).collect();
            rows.sort_unstable();
            assert_eq!(rows, vec![0, 1, 2, 3]);
        }
        assert!(sjlt_pattern(&seed, 3, 4, 5).is_err());
    }

    #[test]
    fn sjlt_row_frequencies() {
        // nprime=4, s=1: each row chosen with frequency 0.25 +- 0.007
        // across 40000 independent columns.
        let seed = SeedSpec::new(7, 0);
        let pat = sjlt_pattern(&seed, 40_000, 4, 1).unwrap();
        let mut counts = [0usize; 4];
        for j in 0..40_000 {
            for (r, _) in pat.column(j) {
                counts[r] += 1;
            }
        }
        for c in counts {
            let f = c as f64 / 40_000.0;
            assert!((f - 0.25).abs() <= 0.007, "f={f}");
        }
    }
}
