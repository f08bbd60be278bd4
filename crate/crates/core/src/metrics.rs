//! The three distances used throughout: normalized geodesic distance on the
//! sphere, normalized Hamming distance on sign codes, and the median of
//! block-wise Hamming distances. All three take values in `[0, 1]`.

use crate::bitcode::BitCode;
use crate::error::{Error, Result};

pub fn inner(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    inner(x, x).sqrt()
}

/// Normalized geodesic distance `arccos(<x,y> / (|x||y|)) / pi`.
/// Opposite points have distance one. Scale-invariant; rejects zero vectors.
pub fn geodesic(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::InvalidArgument("geodesic distance requires nonzero vectors".into()));
    }
    // clamp guards floating-point drift at |cos| ~ 1
    let cos = (inner(x, y) / (nx * ny)).clamp(-1.0, 1.0);
    Ok(cos.acos() / std::f64::consts::PI)
}

/// Fraction of disagreeing positions of two equal-length codes.
pub fn hamming(a: &BitCode, b: &BitCode) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyInput("hamming"));
    }
    Ok(a.count_diff(b)? as f64 / a.len() as f64)
}

/// Lower median (the `ceil(B/2)`-th order statistic) of the `B` block-wise
/// Hamming distances. The code length must be divisible by `B`.
pub fn median_block(a: &BitCode, b: &BitCode, blocks: usize) -> Result<f64> {
    if blocks == 0 {
        return Err(Error::InvalidArgument("median_block requires B >= 1".into()));
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if !a.len().is_multiple_of(blocks) {
        return Err(Error::InvalidArgument(format!(
            "code length {} not divisible by block count {blocks}",
            a.len()
        )));
    }
    let mprime = a.len() / blocks;
    let mut dists: Vec<f64> = (0..blocks)
        .map(|s| {
            a.count_diff_range(b, s * mprime, (s + 1) * mprime)
                .map(|c| c as f64 / mprime as f64)
        })
        .collect::<Result<_>>()?;
    dists.sort_by(|p, q| p.total_cmp(q));
    Ok(dists[(blocks - 1) / 2])
}

/// The two elementary upper bounds on the geodesic distance for unit
/// vectors with nonnegative inner product:
/// `|x - y| / 2^(3/2)` and `sqrt(1 - <x,y>^2) / 2`.
pub fn geo_bounds(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let tol = 1e-9;
    if (norm(x) - 1.0).abs() > tol || (norm(y) - 1.0).abs() > tol {
        return Err(Error::InvalidArgument("geo_bounds requires unit vectors".into()));
    }
    let z = inner(x, y);
    if z < -tol {
        return Err(Error::InvalidArgument(
            "geo_bounds requires nonnegative inner product".into(),
        ));
    }
    let diff_norm: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let first = diff_norm / (2.0f64 * 2.0f64.sqrt());
    let second = (1.0 - (z * z).min(1.0)).max(0.0).sqrt() / 2.0;
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn e(i: usize, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn geodesic_cardinal_cases() {
        let e1 = e(0, 3);
        let e2 = e(1, 3);
        let neg: Vec<f64> = e1.iter().map(|v| -v).collect();
        assert_abs_diff_eq!(geodesic(&e1, &e1).unwrap(), 0.0);
        assert_abs_diff_eq!(geodesic(&e1, &neg).unwrap(), 1.0);
        assert_abs_diff_eq!(geodesic(&e1, &e2).unwrap(), 0.5);
        // symmetry and scale invariance
        let x = vec![0.3, -0.4, 0.2];
        let y = vec![-0.1, 0.9, 0.4];
        let x2: Vec<f64> = x.iter().map(|v| 7.5 * v).collect();
        assert_abs_diff_eq!(
            geodesic(&x, &y).unwrap(),
            geodesic(&y, &x).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            geodesic(&x, &y).unwrap(),
            geodesic(&x2, &y).unwrap(),
            epsilon = 1e-12
        );
        assert!(geodesic(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn hamming_examples() {
        let a = BitCode::from_signs(&[1.0, -1.0, 1.0, 1.0]);
        let b = BitCode::from_signs(&[1.0, 1.0, 1.0, -1.0]);
        assert_abs_diff_eq!(hamming(&a, &a).unwrap(), 0.0);
        assert_abs_diff_eq!(hamming(&a, &b).unwrap(), 0.5);
        let comp = BitCode::from_signs(&a.signs().iter().map(|v| -v).collect::<Vec<_>>());
        assert_abs_diff_eq!(hamming(&a, &comp).unwrap(), 1.0);
        let c = BitCode::from_signs(&[1.0; 3]);
        assert!(hamming(&a, &c).is_err());
    }

    #[test]
    fn hamming_triangle_inequality_small() {
        // brute force over random triples of length-8 codes
        let mut state = 0xdeadbeefu64;
        let mut next_code = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            BitCode::from_bits(&(0..8).map(|i| (state >> (i + 20)) & 1 == 1).collect::<Vec<_>>())
        };
        for _ in 0..500 {
            let (a, b, c) = (next_code(), next_code(), next_code());
            let ab = hamming(&a, &b).unwrap();
            let bc = hamming(&b, &c).unwrap();
            let ac = hamming(&a, &c).unwrap();
            assert!(ac <= ab + bc + 1e-15);
        }
    }

    #[test]
    fn median_block_cases() {
        // B=3 with block distances (0, 0.5, 1) -> 0.5
        let mut av = vec![1.0; 12];
        let mut bv = vec![1.0; 12];
        bv[4] = -1.0;
        bv[5] = -1.0; // second block: 2/4 differ
        for v in bv[8..12].iter_mut() {
            *v = -1.0; // third block: all differ
        }
        let a = BitCode::from_signs(&av);
        let b = BitCode::from_signs(&bv);
        assert_abs_diff_eq!(median_block(&a, &b, 3).unwrap(), 0.5);
        // B=1 reduces to plain Hamming distance
        assert_abs_diff_eq!(
            median_block(&a, &b, 1).unwrap(),
            hamming(&a, &b).unwrap()
        );
        // B=4 with block distances (0,0,1,1) -> 0 under the lower median
        av = vec![1.0; 8];
        bv = vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
        let a = BitCode::from_signs(&av);
        let b = BitCode::from_signs(&bv);
        assert_abs_diff_eq!(median_block(&a, &b, 4).unwrap(), 0.0);
        assert!(median_block(&a, &b, 3).is_err());
    }

    #[test]
    fn geo_bounds_cases() {
        let e1 = e(0, 4);
        let e2 = e(1, 4);
        let (b1, b2) = geo_bounds(&e1, &e1).unwrap();
        assert_abs_diff_eq!(b1, 0.0);
        assert_abs_diff_eq!(b2, 0.0);
        let (b1, b2) = geo_bounds(&e1, &e2).unwrap();
        assert_abs_diff_eq!(b1, 0.5);
        assert_abs_diff_eq!(b2, 0.5);
        assert!(geodesic(&e1, &e2).unwrap() <= b1.min(b2) + 1e-12);
        // non-unit vectors rejected
        assert!(geo_bounds(&e1.iter().map(|v| 2.0 * v).collect::<Vec<_>>(), &e2).is_err());
        // strictly negative inner product rejected
        assert!(geo_bounds(&e1, &e1.iter().map(|v| -v).collect::<Vec<_>>()).is_err());
    }

    #[test]
    fn geo_bounds_random_pairs_dominate_geodesic() {
        // sampling check in dimension 8
        let mut state = 0x12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut tested = 0;
        while tested < 10_000 {
            let x: Vec<f64> = (0..8).map(|_| next()).collect();
            let y: Vec<f64> = (0..8).map(|_| next()).collect();
            let (nx, ny) = (norm(&x), norm(&y));
            if nx < 1e-6 || ny < 1e-6 {
                continue;
            }
            let xu: Vec<f64> = x.iter().map(|v| v / nx).collect();
            let yu: Vec<f64> = y.iter().map(|v| v / ny).collect();
            if inner(&xu, &yu) < 0.0 {
                continue;
            }
            let d = geodesic(&xu, &yu).unwrap();
            let (b1, b2) = geo_bounds(&xu, &yu).unwrap();
            assert!(d <= b1 + 1e-12, "d={d} b1={b1}");
            assert!(d <= b2 + 1e-12, "d={d} b2={b2}");
            tested += 1;
        }
    }
}
