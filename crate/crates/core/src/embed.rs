//! The sign-map binary embeddings: dense Gaussian, accelerated Gaussian
//! (JL-preconditioned), subsampled Gaussian circulant with and without
//! column-sign randomization, and the median-of-blocks circulant embedding.
//!
//! Every embedder is a pipeline `x -> project(x) -> sign_stage(y)`; circulant
//! stages run through the FFT product, and `to_dense` materializes the same
//! pipeline from entry formulas for bit-exact oracle comparisons.

use crate::bitcode::BitCode;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::jl::{self, JlTransform, JlVariant};
use crate::metrics;
use crate::rng::{dyadic_set, gaussian_with, rademacher_with, uniform_subset_with, SeedSpec};
use crate::transforms::{
    circulant_matvec_fft, restrict, sign_flip, to_dense as circulant_dense, CirculantSpec,
    IndexSet,
};
use rand_chacha::ChaCha8Rng;

/// Entrywise sign with `sgn(0) = +1`, packed.
pub fn sign_map(v: &[f64]) -> BitCode {
    BitCode::from_signs(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedderKind {
    DenseGaussian,
    AcceleratedGaussian,
    SubsampledCirculant,
    SignedCirculant,
    MedianFast,
}

impl EmbedderKind {
    pub fn label(&self) -> &'static str {
        match self {
            EmbedderKind::DenseGaussian => "dense",
            EmbedderKind::AcceleratedGaussian => "accelerated",
            EmbedderKind::SubsampledCirculant => "subsampled-circulant",
            EmbedderKind::SignedCirculant => "signed-circulant",
            EmbedderKind::MedianFast => "median-fast",
        }
    }
}

/// How the row subset of a circulant stage is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IMode {
    FirstM,
    Uniform,
    Dyadic,
    Explicit(IndexSet),
}

impl IMode {
    pub fn label(&self) -> &'static str {
        match self {
            IMode::FirstM => "first_m",
            IMode::Uniform => "uniform",
            IMode::Dyadic => "dyadic",
            IMode::Explicit(_) => "explicit",
        }
    }
}

/// Shape of the structured blocks in the median-fast construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockShape {
    Circulant,
    Toeplitz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputDistance {
    Hamming,
    MedianBlock { blocks: usize },
}

/// One subsampled structured block `R_I C_g D_eps` (signs optional).
#[derive(Debug, Clone)]
struct CircBlock {
    op: CirculantSpec,
    signs: Option<Vec<f64>>,
    index: IndexSet,
}

impl CircBlock {
    fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        let flipped;
        let input = match &self.signs {
            Some(eps) => {
                flipped = sign_flip(y, eps)?;
                &flipped
            }
            None => y,
        };
        let full = circulant_matvec_fft(&self.op, input)?;
        restrict(&full, &self.index)
    }

    fn to_dense(&self) -> DenseMatrix {
        let full = circulant_dense(&self.op);
        let rows = self.index.zero_based();
        DenseMatrix::from_fn(self.index.len(), self.op.dim(), |r, c| {
            let sign = self.signs.as_ref().map_or(1.0, |eps| eps[c]);
            full.get(rows[r], c) * sign
        })
    }

    fn draw(
        rng: &mut ChaCha8Rng,
        dim: usize,
        rows: usize,
        signed: bool,
        shape: BlockShape,
        imode: &IMode,
    ) -> Result<CircBlock> {
        let op = match shape {
            BlockShape::Circulant => CirculantSpec::circulant(gaussian_with(rng, dim))?,
            BlockShape::Toeplitz => CirculantSpec::toeplitz(gaussian_with(rng, 2 * dim - 1))?,
        };
        let signs = if signed { Some(rademacher_with(rng, dim)) } else { None };
        let index = match imode {
            IMode::FirstM => IndexSet::first_m(rows, dim)?,
            IMode::Uniform => {
                if rows == 0 || rows > dim {
                    return Err(Error::InvalidArgument(format!(
                        "row count {rows} out of range for dimension {dim}"
                    )));
                }
                uniform_subset_with(rng, dim, rows)
            }
            IMode::Dyadic => dyadic_set(dim, rows)?,
            IMode::Explicit(set) => {
                if set.ambient_dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: set.ambient_dim(),
                    });
                }
                set.clone()
            }
        };
        Ok(CircBlock { op, signs, index })
    }
}

#[derive(Debug, Clone)]
enum SignStage {
    Dense(DenseMatrix),
    Blocks(Vec<CircBlock>),
}

#[derive(Debug, Clone)]
pub struct BinaryEmbedder {
    kind: EmbedderKind,
    in_dim: usize,
    bits: usize,
    preconditioner: Option<JlTransform>,
    stage: SignStage,
    distance: OutputDistance,
}

impl BinaryEmbedder {
    pub fn kind(&self) -> EmbedderKind {
        self.kind
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    /// Number of output bits `m`.
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn output_distance(&self) -> OutputDistance {
        self.distance
    }

    pub fn preconditioner(&self) -> Option<&JlTransform> {
        self.preconditioner.as_ref()
    }

    /// The preconditioner stage; identity when the pipeline has none.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(Error::DimensionMismatch { expected: self.in_dim, got: x.len() });
        }
        match &self.preconditioner {
            Some(phi) => phi.apply(x),
            None => Ok(x.to_vec()),
        }
    }

    /// The sign stage applied to an already-projected vector.
    pub fn sign_stage(&self, y: &[f64]) -> Result<BitCode> {
        match &self.stage {
            SignStage::Dense(g) => Ok(sign_map(&g.matvec(y)?)),
            SignStage::Blocks(blocks) => {
                let mut signs = Vec::with_capacity(self.bits);
                for block in blocks {
                    signs.extend(block.apply(y)?);
                }
                Ok(sign_map(&signs))
            }
        }
    }

    /// Full pipeline: bit code of length `bits()`.
    pub fn embed(&self, x: &[f64]) -> Result<BitCode> {
        let y = self.project(x)?;
        self.sign_stage(&y)
    }

    /// The declared output distance of this construction.
    pub fn distance(&self, a: &BitCode, b: &BitCode) -> Result<f64> {
        match self.distance {
            OutputDistance::Hamming => metrics::hamming(a, b),
            OutputDistance::MedianBlock { blocks } => metrics::median_block(a, b, blocks),
        }
    }

    /// Materializes the whole pipeline as one dense matrix, built from entry
    /// formulas only. `sign_map(to_dense() * x)` is the oracle for `embed`.
    pub fn to_dense(&self) -> DenseMatrix {
        let stage = match &self.stage {
            SignStage::Dense(g) => g.clone(),
            SignStage::Blocks(blocks) => {
                let mut rows = Vec::with_capacity(self.bits);
                for block in blocks {
                    let d = block.to_dense();
                    for r in 0..d.rows() {
                        rows.push(d.row(r).to_vec());
                    }
                }
                DenseMatrix::from_rows(rows)
            }
        };
        match &self.preconditioner {
            Some(phi) => stage.matmul(&phi.to_dense()),
            None => stage,
        }
    }
}

/// Dense `m x n` Gaussian embedding into the Hamming cube.
pub fn build_dense_embedder(seed: &SeedSpec, n: usize, m: usize) -> Result<BinaryEmbedder> {
    if n == 0 || m == 0 {
        return Err(Error::EmptyInput("embedder dimensions"));
    }
    let g = jl::dense_gaussian_with(&mut seed.rng(), n, m)?;
    Ok(BinaryEmbedder {
        kind: EmbedderKind::DenseGaussian,
        in_dim: n,
        bits: m,
        preconditioner: None,
        stage: SignStage::Dense(g.to_dense()),
        distance: OutputDistance::Hamming,
    })
}

/// `sgn(G Phi x)` with `Phi` a FJLT or SJLT and `G` an `m x n'` Gaussian.
pub fn build_accelerated_embedder(
    seed: &SeedSpec,
    n: usize,
    m: usize,
    variant: JlVariant,
    nprime: usize,
    s: Option<usize>,
) -> Result<BinaryEmbedder> {
    if m == 0 {
        return Err(Error::EmptyInput("bit count"));
    }
    let mut rng = seed.rng();
    let phi = match variant {
        JlVariant::Fjlt => jl::fjlt_with(&mut rng, n, nprime)?,
        JlVariant::Sjlt => {
            let s = s.ok_or_else(|| {
                Error::InvalidArgument("sjlt variant requires a sparsity s".into())
            })?;
            jl::sjlt_with(&mut rng, n, nprime, s)?
        }
        JlVariant::DenseGaussian => {
            return Err(Error::InvalidArgument(
                "accelerated embedder preconditioner must be FJLT or SJLT".into(),
            ))
        }
    };
    let g = jl::dense_gaussian_with(&mut rng, nprime, m)?;
    Ok(BinaryEmbedder {
        kind: EmbedderKind::AcceleratedGaussian,
        in_dim: n,
        bits: m,
        preconditioner: Some(phi),
        stage: SignStage::Dense(g.to_dense()),
        distance: OutputDistance::Hamming,
    })
}

/// `sgn(R_I C_g x)` without sign randomization.
pub fn build_subsampled_circulant_embedder(
    seed: &SeedSpec,
    n: usize,
    imode: IMode,
    m: usize,
) -> Result<BinaryEmbedder> {
    let mut rng = seed.rng();
    let block = CircBlock::draw(&mut rng, n, m, false, BlockShape::Circulant, &imode)?;
    let bits = block.index.len();
    Ok(BinaryEmbedder {
        kind: EmbedderKind::SubsampledCirculant,
        in_dim: n,
        bits,
        preconditioner: None,
        stage: SignStage::Blocks(vec![block]),
        distance: OutputDistance::Hamming,
    })
}

/// `sgn(R_I C_g D_eps x)` with randomized column signs; `I` is either the
/// first `m` rows or a uniform size-m subset.
pub fn build_signed_circulant_embedder(
    seed: &SeedSpec,
    n: usize,
    imode: IMode,
    m: usize,
) -> Result<BinaryEmbedder> {
    match imode {
        IMode::FirstM | IMode::Uniform => {}
        _ => {
            return Err(Error::InvalidArgument(
                "signed circulant embedder supports first_m or uniform subsampling".into(),
            ))
        }
    }
    let mut rng = seed.rng();
    let block = CircBlock::draw(&mut rng, n, m, true, BlockShape::Circulant, &imode)?;
    Ok(BinaryEmbedder {
        kind: EmbedderKind::SignedCirculant,
        in_dim: n,
        bits: m,
        preconditioner: None,
        stage: SignStage::Blocks(vec![block]),
        distance: OutputDistance::Hamming,
    })
}

/// Median fast binary embedding: `B` independent signed subsampled blocks
/// stacked after a JL preconditioner, compared under the block-median
/// distance.
#[allow(clippy::too_many_arguments)]
pub fn build_median_fast_embedder(
    seed: &SeedSpec,
    n: usize,
    nprime: usize,
    blocks: usize,
    mprime: usize,
    variant: JlVariant,
    s: Option<usize>,
    shape: BlockShape,
) -> Result<BinaryEmbedder> {
    if blocks == 0 {
        return Err(Error::InvalidArgument("median embedder requires B >= 1".into()));
    }
    if mprime == 0 || mprime > nprime {
        return Err(Error::InvalidArgument(format!(
            "median embedder requires 1 <= m' <= n', got m'={mprime}, n'={nprime}"
        )));
    }
    let mut rng = seed.rng();
    let phi = match variant {
        JlVariant::Fjlt => jl::fjlt_with(&mut rng, n, nprime)?,
        JlVariant::Sjlt => {
            let s = s.ok_or_else(|| {
                Error::InvalidArgument("sjlt variant requires a sparsity s".into())
            })?;
            jl::sjlt_with(&mut rng, n, nprime, s)?
        }
        JlVariant::DenseGaussian => {
            return Err(Error::InvalidArgument(
                "median embedder preconditioner must be FJLT or SJLT".into(),
            ))
        }
    };
    let mut stage = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        stage.push(CircBlock::draw(&mut rng, nprime, mprime, true, shape, &IMode::Uniform)?);
    }
    Ok(BinaryEmbedder {
        kind: EmbedderKind::MedianFast,
        in_dim: n,
        bits: blocks * mprime,
        preconditioner: Some(phi),
        stage: SignStage::Blocks(stage),
        distance: OutputDistance::MedianBlock { blocks },
    })
}

/// Seed-driven construction parameters for an embedder: stores parameters,
/// not matrices, so a fresh independent embedder can be drawn per trial.
#[derive(Debug, Clone)]
pub enum EmbedderRecipe {
    Dense { n: usize, m: usize },
    Accelerated { n: usize, m: usize, variant: JlVariant, nprime: usize, s: Option<usize> },
    SubsampledCirculant { n: usize, imode: IMode, m: usize },
    SignedCirculant { n: usize, imode: IMode, m: usize },
    MedianFast {
        n: usize,
        nprime: usize,
        blocks: usize,
        mprime: usize,
        variant: JlVariant,
        s: Option<usize>,
        shape: BlockShape,
    },
}

impl EmbedderRecipe {
    pub fn build(&self, seed: &SeedSpec) -> Result<BinaryEmbedder> {
        match self {
            EmbedderRecipe::Dense { n, m } => build_dense_embedder(seed, *n, *m),
            EmbedderRecipe::Accelerated { n, m, variant, nprime, s } => {
                build_accelerated_embedder(seed, *n, *m, *variant, *nprime, *s)
            }
            EmbedderRecipe::SubsampledCirculant { n, imode, m } => {
                build_subsampled_circulant_embedder(seed, *n, imode.clone(), *m)
            }
            EmbedderRecipe::SignedCirculant { n, imode, m } => {
                build_signed_circulant_embedder(seed, *n, imode.clone(), *m)
            }
            EmbedderRecipe::MedianFast { n, nprime, blocks, mprime, variant, s, shape } => {
                build_median_fast_embedder(
                    seed, *n, *nprime, *blocks, *mprime, *variant, *s, *shape,
                )
            }
        }
    }

    pub fn in_dim(&self) -> usize {
        match self {
            EmbedderRecipe::Dense { n, .. }
            | EmbedderRecipe::Accelerated { n, .. }
            | EmbedderRecipe::SubsampledCirculant { n, .. }
            | EmbedderRecipe::SignedCirculant { n, .. }
            | EmbedderRecipe::MedianFast { n, .. } => *n,
        }
    }

    pub fn bits(&self) -> usize {
        match self {
            EmbedderRecipe::Dense { m, .. }
            | EmbedderRecipe::Accelerated { m, .. }
            | EmbedderRecipe::SubsampledCirculant { m, .. }
            | EmbedderRecipe::SignedCirculant { m, .. } => *m,
            EmbedderRecipe::MedianFast { blocks, mprime, .. } => blocks * mprime,
        }
    }

    pub fn label(&self) -> String {
        match self {
            EmbedderRecipe::Dense { .. } => "dense".into(),
            EmbedderRecipe::Accelerated { variant, .. } => match variant {
                JlVariant::Fjlt => "accelerated-fjlt".into(),
                JlVariant::Sjlt => "accelerated-sjlt".into(),
                JlVariant::DenseGaussian => "accelerated-dense".into(),
            },
            EmbedderRecipe::SubsampledCirculant { imode, .. } => {
                format!("subsampled-circulant-{}", imode.label())
            }
            EmbedderRecipe::SignedCirculant { imode, .. } => {
                format!("signed-circulant-{}", imode.label())
            }
            EmbedderRecipe::MedianFast { variant, .. } => match variant {
                JlVariant::Fjlt => "median-fjlt".into(),
                JlVariant::Sjlt => "median-sjlt".into(),
                JlVariant::DenseGaussian => "median-dense".into(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::norm;

    fn unit(v: Vec<f64>) -> Vec<f64> {
        let n = norm(&v);
        v.into_iter().map(|x| x / n).collect()
    }

    fn test_vector(n: usize, salt: u64) -> Vec<f64> {
        unit((0..n).map(|i| ((i as u64 * 2654435761 + salt * 40503) % 1000) as f64 - 499.5).collect())
    }

    fn all_recipes(n: usize) -> Vec<EmbedderRecipe> {
        vec![
            EmbedderRecipe::Dense { n, m: 12 },
            EmbedderRecipe::Accelerated {
                n,
                m: 10,
                variant: JlVariant::Fjlt,
                nprime: 8,
                s: None,
            },
            EmbedderRecipe::Accelerated {
                n,
                m: 10,
                variant: JlVariant::Sjlt,
                nprime: 9,
                s: Some(3),
            },
            EmbedderRecipe::SubsampledCirculant { n, imode: IMode::FirstM, m: 6 },
            EmbedderRecipe::SubsampledCirculant { n, imode: IMode::Uniform, m: 6 },
            EmbedderRecipe::SubsampledCirculant { n, imode: IMode::Dyadic, m: 4 },
            EmbedderRecipe::SignedCirculant { n, imode: IMode::FirstM, m: 6 },
            EmbedderRecipe::SignedCirculant { n, imode: IMode::Uniform, m: 6 },
            EmbedderRecipe::MedianFast {
                n,
                nprime: 16,
                blocks: 2,
                mprime: 5,
                variant: JlVariant::Fjlt,
                s: None,
                shape: BlockShape::Circulant,
            },
            EmbedderRecipe::MedianFast {
                n,
                nprime: 16,
                blocks: 3,
                mprime: 4,
                variant: JlVariant::Sjlt,
                s: Some(2),
                shape: BlockShape::Toeplitz,
            },
        ]
    }

    #[test]
    fn sign_map_examples() {
        assert_eq!(sign_map(&[0.5, -0.2, 0.3]).signs(), vec![1.0, -1.0, 1.0]);
        assert_eq!(sign_map(&[0.0, 0.0]).signs(), vec![1.0, 1.0]);
        let v = [0.3, -0.7, 1.2];
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let a = sign_map(&v).signs();
        let b = sign_map(&neg).signs();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn fast_path_matches_dense_oracle_bit_for_bit() {
        let n = 16;
        let x = test_vector(n, 1);
        for recipe in all_recipes(n) {
            for trial in 0..25u64 {
                let seed = SeedSpec::new(100, 0).for_trial(trial);
                let e = recipe.build(&seed).unwrap();
                let fast = e.embed(&x).unwrap();
                let oracle = sign_map(&e.to_dense().matvec(&x).unwrap());
                assert_eq!(fast, oracle, "kind {:?}, trial {trial}", e.kind());
            }
        }
    }

    #[test]
    fn embed_is_scale_invariant() {
        let n = 16;
        let x = test_vector(n, 2);
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        for recipe in all_recipes(n) {
            let e = recipe.build(&SeedSpec::new(101, 5)).unwrap();
            assert_eq!(e.embed(&x).unwrap(), e.embed(&x2).unwrap());
        }
    }

    #[test]
    fn embed_deterministic_and_shaped() {
        let n = 16;
        let x = test_vector(n, 3);
        for recipe in all_recipes(n) {
            let seed = SeedSpec::new(102, 9);
            let e1 = recipe.build(&seed).unwrap();
            let e2 = recipe.build(&seed).unwrap();
            let c1 = e1.embed(&x).unwrap();
            assert_eq!(c1.len(), recipe.bits());
            assert_eq!(c1, e2.embed(&x).unwrap());
        }
    }

    #[test]
    fn identical_points_embed_identically() {
        let n = 16;
        let x = test_vector(n, 4);
        for recipe in all_recipes(n) {
            let e = recipe.build(&SeedSpec::new(103, 1)).unwrap();
            let a = e.embed(&x).unwrap();
            let b = e.embed(&x).unwrap();
            assert_eq!(e.distance(&a, &b).unwrap(), 0.0);
        }
    }

    #[test]
    fn antipodal_dense_codes_are_complementary() {
        let n = 16;
        let x = test_vector(n, 5);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let e = build_dense_embedder(&SeedSpec::new(104, 0), n, 64).unwrap();
        let a = e.embed(&x).unwrap();
        let b = e.embed(&neg).unwrap();
        assert_eq!(e.distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn median_single_block_reduces_to_hamming() {
        let n = 16;
        let x = test_vector(n, 6);
        let y = test_vector(n, 7);
        let e = build_median_fast_embedder(
            &SeedSpec::new(105, 0),
            n,
            16,
            1,
            8,
            JlVariant::Fjlt,
            None,
            BlockShape::Circulant,
        )
        .unwrap();
        let (a, b) = (e.embed(&x).unwrap(), e.embed(&y).unwrap());
        assert_eq!(e.distance(&a, &b).unwrap(), metrics::hamming(&a, &b).unwrap());
    }

    #[test]
    fn builder_validation() {
        let seed = SeedSpec::new(106, 0);
        assert!(build_signed_circulant_embedder(&seed, 8, IMode::Dyadic, 3).is_err());
        assert!(build_signed_circulant_embedder(&seed, 8, IMode::Uniform, 9).is_err());
        assert!(build_subsampled_circulant_embedder(&seed, 8, IMode::Dyadic, 5).is_err());
        assert!(build_median_fast_embedder(
            &seed,
            16,
            8,
            2,
            9,
            JlVariant::Fjlt,
            None,
            BlockShape::Circulant
        )
        .is_err());
        assert!(build_accelerated_embedder(&seed, 16, 8, JlVariant::Sjlt, 8, None).is_err());
        let e = build_dense_embedder(&seed, 8, 4).unwrap();
        assert!(e.embed(&[1.0; 7]).is_err());
    }

    #[test]
    fn explicit_index_set_respected() {
        let n = 12;
        let set = IndexSet::from_one_based(&[2, 5, 11], n).unwrap();
        let e = build_subsampled_circulant_embedder(
            &SeedSpec::new(107, 0),
            n,
            IMode::Explicit(set.clone()),
            3,
        )
        .unwrap();
        assert_eq!(e.bits(), 3);
        let x = test_vector(n, 8);
        let dense = e.to_dense();
        assert_eq!(dense.rows(), 3);
        let oracle = sign_map(&dense.matvec(&x).unwrap());
        assert_eq!(e.embed(&x).unwrap(), oracle);
    }
}
