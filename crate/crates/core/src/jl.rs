//! Dimension-reducing preconditioners: the fast Johnson-Lindenstrauss
//! transform (subsampled orthonormal Hadamard with random signs), the sparse
//! JL transform (count-sketch style column-sparse signs) and dense Gaussian
//! matrices, together with isometry checking on a point set.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::{
    gaussian_with, rademacher_with, sjlt_pattern_with, uniform_subset_with, SeedSpec, SjltPattern,
};
use crate::transforms::{fwht_inplace, IndexSet};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JlVariant {
    Fjlt,
    Sjlt,
    DenseGaussian,
}

#[derive(Debug, Clone)]
enum Payload {
    /// `sqrt(n_pad / n') R_I H D_eps` acting on the zero-padded input.
    Fjlt { n_pad: usize, index: IndexSet, signs: Vec<f64>, scale: f64 },
    Sjlt(SjltPattern),
    Dense(DenseMatrix),
}

#[derive(Debug, Clone)]
pub struct JlTransform {
    in_dim: usize,
    out_dim: usize,
    payload: Payload,
}

pub(crate) fn fjlt_with(rng: &mut ChaCha8Rng, n: usize, nprime: usize) -> Result<JlTransform> {
    if n == 0 {
        return Err(Error::EmptyInput("fjlt input dimension"));
    }
    let n_pad = n.next_power_of_two();
    if nprime == 0 || nprime > n_pad {
        return Err(Error::InvalidArgument(format!(
            "fjlt requires 1 <= nprime <= n_pad, got nprime={nprime}, n_pad={n_pad}"
        )));
    }
    let index = uniform_subset_with(rng, n_pad, nprime);
    let signs = rademacher_with(rng, n_pad);
    let scale = (n_pad as f64 / nprime as f64).sqrt();
    Ok(JlTransform {
        in_dim: n,
        out_dim: nprime,
        payload: Payload::Fjlt { n_pad, index, signs, scale },
    })
}

pub(crate) fn sjlt_with(
    rng: &mut ChaCha8Rng,
    n: usize,
    nprime: usize,
    s: usize,
) -> Result<JlTransform> {
    if n == 0 {
        return Err(Error::EmptyInput("sjlt input dimension"));
    }
    if s == 0 || s > nprime {
        return Err(Error::InvalidArgument(format!(
            "sjlt requires 1 <= s <= nprime, got s={s}, nprime={nprime}"
        )));
    }
    let pattern = sjlt_pattern_with(rng, n, nprime, s);
    Ok(JlTransform { in_dim: n, out_dim: nprime, payload: Payload::Sjlt(pattern) })
}

pub(crate) fn dense_gaussian_with(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<JlTransform> {
    if n == 0 || m == 0 {
        return Err(Error::EmptyInput("dense gaussian dimensions"));
    }
    let data = gaussian_with(rng, m * n);
    let mut rows = Vec::with_capacity(m);
    for r in 0..m {
        rows.push(data[r * n..(r + 1) * n].to_vec());
    }
    Ok(JlTransform { in_dim: n, out_dim: m, payload: Payload::Dense(DenseMatrix::from_rows(rows)) })
}

/// FJLT `sqrt(n_pad/n') R_I H D_eps`, zero-padding the input to the next
/// power of two.
pub fn build_fjlt(seed: &SeedSpec, n: usize, nprime: usize) -> Result<JlTransform> {
    fjlt_with(&mut seed.rng(), n, nprime)
}

/// SJLT with exactly `s` signed nonzeros per column, scaled by `1/sqrt(s)`.
pub fn build_sjlt(seed: &SeedSpec, n: usize, nprime: usize, s: usize) -> Result<JlTransform> {
    sjlt_with(&mut seed.rng(), n, nprime, s)
}

/// Dense `m x n` matrix of independent standard Gaussians.
pub fn build_dense_gaussian(seed: &SeedSpec, n: usize, m: usize) -> Result<JlTransform> {
    dense_gaussian_with(&mut seed.rng(), n, m)
}

impl JlTransform {
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn variant(&self) -> JlVariant {
        match self.payload {
            Payload::Fjlt { .. } => JlVariant::Fjlt,
            Payload::Sjlt(_) => JlVariant::Sjlt,
            Payload::Dense(_) => JlVariant::DenseGaussian,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(Error::DimensionMismatch { expected: self.in_dim, got: x.len() });
        }
        match &self.payload {
            Payload::Fjlt { n_pad, index, signs, scale } => {
                let mut buf = vec![0.0; *n_pad];
                for (i, &v) in x.iter().enumerate() {
                    buf[i] = v * signs[i];
                }
                // signs beyond the original dimension multiply padded zeros
                fwht_inplace(&mut buf)?;
                Ok(index.zero_based().iter().map(|&i| buf[i] * scale).collect())
            }
            Payload::Sjlt(pattern) => {
                let mut out = vec![0.0; self.out_dim];
                let scale = pattern.scale();
                for (j, &v) in x.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    for (row, sign) in pattern.column(j) {
                        out[row] += sign * v * scale;
                    }
                }
                Ok(out)
            }
            Payload::Dense(matrix) => matrix.matvec(x),
        }
    }

    /// Dense materialization from entry formulas (Hadamard entries via bit
    /// parity, pattern lookups, or the stored Gaussian matrix); never uses
    /// the fast application path. Used as the oracle in tests.
    pub fn to_dense(&self) -> DenseMatrix {
        match &self.payload {
            Payload::Fjlt { n_pad, index, signs, scale } => {
                let had_scale = 1.0 / (*n_pad as f64).sqrt();
                let rows = index.zero_based();
                DenseMatrix::from_fn(self.out_dim, self.in_dim, |r, c| {
                    let h = if (rows[r] & c).count_ones() % 2 == 0 {
                        had_scale
                    } else {
                        -had_scale
                    };
                    scale * h * signs[c]
                })
            }
            Payload::Sjlt(pattern) => {
                let mut m = vec![vec![0.0; self.in_dim]; self.out_dim];
                #[allow(clippy::needless_range_loop)]
                for j in 0..self.in_dim {
                    for (row, sign) in pattern.column(j) {
                        m[row][j] = sign * pattern.scale();
                    }
                }
                DenseMatrix::from_rows(m)
            }
            Payload::Dense(matrix) => matrix.clone(),
        }
    }

    pub fn sjlt_pattern(&self) -> Option<&SjltPattern> {
        match &self.payload {
            Payload::Sjlt(p) => Some(p),
            _ => None,
        }
    }
}

/// Norm distortions of a transform over a point set and its difference set.
#[derive(Debug, Clone, Copy)]
pub struct IsometryReport {
    /// max over points x of `| |Ax| / |x| - 1 |`
    pub max_norm_distortion: f64,
    /// max over nonzero differences x - y of the same quantity
    pub max_diff_distortion: f64,
    pub delta_target: f64,
    pub pass: bool,
}

/// Checks whether `t` is a `delta`-isometry on `points` and on the pairwise
/// difference set. Zero differences (duplicated points) are skipped.
pub fn check_isometry(t: &JlTransform, points: &PointSet, delta: f64) -> Result<IsometryReport> {
    if points.is_empty() {
        return Err(Error::EmptyInput("check_isometry"));
    }
    if points.dim() != t.in_dim() {
        return Err(Error::DimensionMismatch { expected: t.in_dim(), got: points.dim() });
    }
    let distortion = |z: &[f64]| -> Result<Option<f64>> {
        let norm_z: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_z < 1e-12 {
            return Ok(None);
        }
        let image = t.apply(z)?;
        let norm_img: f64 = image.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(Some((norm_img / norm_z - 1.0).abs()))
    };
    let mut max_norm = 0.0f64;
    for x in points.iter() {
        if let Some(d) = distortion(x)? {
            max_norm = max_norm.max(d);
        }
    }
    let mut max_diff = 0.0f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let z: Vec<f64> =
                points.point(i).iter().zip(points.point(j)).map(|(a, b)| a - b).collect();
            if let Some(d) = distortion(&z)? {
                max_diff = max_diff.max(d);
            }
        }
    }
    Ok(IsometryReport {
        max_norm_distortion: max_norm,
        max_diff_distortion: max_diff,
        delta_target: delta,
        pass: max_norm <= delta && max_diff <= delta,
    })
}


#[cfg(test)]
mod isometry_rate {
    use super::*;
    use crate::params::{resolve_accelerated, Multipliers};
    use crate::points::PointSet;

    /// SJLT sized by the resolved parameter formulas (fitted c2 = 2) is a
    /// delta-isometry on a 32-point set and its differences in at least
    /// 80 of 100 seeds.
    #[test]
    fn sjlt_isometry_pass_rate() {
        let n = 256;
        let big_n = 32;
        let delta = 0.2;
        let mult = Multipliers { c1: 1.0, c2: 2.0, c3: 1.0, c4: 1.0 };
        let p = resolve_accelerated(n, big_n, delta, 0.1, JlVariant::Sjlt, &mult).unwrap();
        let base = SeedSpec::new(500, 0);
        let pts = PointSet::from_rows(
            (0..big_n)
                .map(|i| {
                    let mut rng = base.derive(7).for_trial(i as u64).rng();
                    let v = crate::rng::gaussian_with(&mut rng, n);
                    let nr = crate::metrics::norm(&v);
                    v.into_iter().map(|x| x / nr).collect()
                })
                .collect(),
        )
        .unwrap();
        let sym = pts.symmetrized();
        let passes = (0..100u64)
            .filter(|&t| {
                let phi = build_sjlt(&base.for_trial(t), n, p.nprime, p.s.unwrap()).unwrap();
                check_isometry(&phi, &sym, delta).unwrap().pass
            })
            .count();
        assert!(passes >= 80, "pass rate {passes}/100");
    }
}
