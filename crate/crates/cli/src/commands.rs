use crate::{
    BenchArgs, CovarianceArgs, CurveKindArg, EmbedArgs, FormatArg, IModeArg, KindArg, PairKindArg,
    VarianceArgs, VerifyArgs,
};
use anyhow::{bail, Context, Result};
use circembed::bench::{bench_circulant_stage, bench_dense_stage, bench_sjlt_sparse_vs_dense};
use circembed::bitcode;
use circembed::embed::{BlockShape, EmbedderRecipe, IMode};
use circembed::jl::JlVariant;
use circembed::params::{resolve_accelerated, resolve_median, Multipliers};
use circembed::points::PointSet;
use circembed::rng::SeedSpec;
use circembed::statlab::{variance_curve, PairKind};
use circembed::suites::{self, AssertionRow};
use std::io::Write;

type RecipeFn = Box<dyn Fn(usize, usize) -> EmbedderRecipe + Sync>;
use std::time::Instant;

fn write_report(out: &Option<String>, lines: &[String]) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path).with_context(|| format!("creating {path}"))?;
            for line in lines {
                writeln!(f, "{line}")?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut h = stdout.lock();
            for line in lines {
                writeln!(h, "{line}")?;
            }
        }
    }
    Ok(())
}

fn rows_to_csv(rows: &[AssertionRow]) -> Vec<String> {
    let mut lines = vec![AssertionRow::CSV_HEADER.to_string()];
    lines.extend(rows.iter().map(|r| r.to_csv()));
    lines
}

impl IModeArg {
    fn to_imode(self) -> IMode {
        match self {
            IModeArg::FirstM => IMode::FirstM,
            IModeArg::Uniform => IMode::Uniform,
            IModeArg::Dyadic => IMode::Dyadic,
        }
    }
}

fn embed_recipe(args: &EmbedArgs, n: usize, big_n: usize) -> Result<EmbedderRecipe> {
    let mult: Multipliers = args.multipliers.to_multipliers();
    let need_m = || -> Result<usize> {
        match (args.m, args.delta) {
            (Some(m), _) => Ok(m),
            (None, Some(delta)) => {
                Ok(resolve_accelerated(n, big_n, delta, args.eta, JlVariant::Sjlt, &mult)?.m)
            }
            (None, None) => bail!("this kind needs --m (or --delta to derive it)"),
        }
    };
    let shape =
        if args.toeplitz_blocks { BlockShape::Toeplitz } else { BlockShape::Circulant };
    let recipe = match args.kind {
        KindArg::Dense => EmbedderRecipe::Dense { n, m: need_m()? },
        KindArg::SubsampledCirculant => EmbedderRecipe::SubsampledCirculant {
            n,
            imode: args.imode.to_imode(),
            m: need_m()?,
        },
        KindArg::SignedCirculant => EmbedderRecipe::SignedCirculant {
            n,
            imode: args.imode.to_imode(),
            m: need_m()?,
        },
        KindArg::AcceleratedFjlt | KindArg::AcceleratedSjlt => {
            let variant = if args.kind == KindArg::AcceleratedFjlt {
                JlVariant::Fjlt
            } else {
                JlVariant::Sjlt
            };
            let resolved = match args.delta {
                Some(delta) => Some(resolve_accelerated(n, big_n, delta, args.eta, variant, &mult)?),
                None => None,
            };
            let pick = |explicit: Option<usize>, derived: Option<usize>, what: &str| match (
                explicit, derived,
            ) {
                (Some(v), _) => Ok(v),
                (None, Some(v)) => Ok(v),
                (None, None) => bail!("accelerated kind needs --{what} (or --delta)"),
            };
            let m = pick(args.m, resolved.map(|r| r.m), "m")?;
            let nprime = pick(args.nprime, resolved.map(|r| r.nprime), "nprime")?;
            let s = match variant {
                JlVariant::Sjlt => {
                    Some(pick(args.s, resolved.and_then(|r| r.s), "s")?)
                }
                _ => None,
            };
            EmbedderRecipe::Accelerated { n, m, variant, nprime, s }
        }
        KindArg::MedianFjlt | KindArg::MedianSjlt => {
            let variant =
                if args.kind == KindArg::MedianFjlt { JlVariant::Fjlt } else { JlVariant::Sjlt };
            let resolved = match args.delta {
                Some(delta) => Some(resolve_median(n, big_n, delta, args.eta, variant, &mult)?),
                None => None,
            };
            let pick = |explicit: Option<usize>, derived: Option<usize>, what: &str| match (
                explicit, derived,
            ) {
                (Some(v), _) => Ok(v),
                (None, Some(v)) => Ok(v),
                (None, None) => bail!("median kind needs --{what} (or --delta)"),
            };
            let blocks = pick(args.blocks, resolved.map(|r| r.blocks), "blocks")?;
            let mprime = pick(args.mprime, resolved.map(|r| r.mprime), "mprime")?;
            let nprime = pick(args.nprime, resolved.map(|r| r.nprime), "nprime")?;
            let s = match variant {
                JlVariant::Sjlt => Some(pick(args.s, resolved.and_then(|r| r.s), "s")?),
                _ => None,
            };
            EmbedderRecipe::MedianFast { n, nprime, blocks, mprime, variant, s, shape }
        }
    };
    Ok(recipe)
}

pub fn run_embed(args: EmbedArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input))?;
    let mut points = PointSet::parse(&text)?;
    if args.normalize {
        points = points.normalized()?;
    }
    let recipe = embed_recipe(&args, points.dim(), points.len())?;
    let seed = SeedSpec::new(args.seed, 0);
    let embedder = recipe.build(&seed)?;
    eprintln!(
        "resolved parameters: kind={} n={} m={} bits, seed={}",
        recipe.label(),
        embedder.in_dim(),
        embedder.bits(),
        args.seed
    );
    if let Some(phi) = embedder.preconditioner() {
        eprintln!("  preconditioner: {:?} {} -> {}", phi.variant(), phi.in_dim(), phi.out_dim());
    }

    let mut t_project = std::time::Duration::ZERO;
    let mut t_sign = std::time::Duration::ZERO;
    let mut codes = Vec::with_capacity(points.len());
    for x in points.iter() {
        let t0 = Instant::now();
        let y = embedder.project(x)?;
        t_project += t0.elapsed();
        let t1 = Instant::now();
        codes.push(embedder.sign_stage(&y)?);
        t_sign += t1.elapsed();
    }
    eprintln!(
        "timing: preconditioner {:.3} ms, sign stage {:.3} ms ({} points)",
        t_project.as_secs_f64() * 1e3,
        t_sign.as_secs_f64() * 1e3,
        points.len()
    );

    match args.format {
        FormatArg::Text => {
            let mut f = std::fs::File::create(&args.output)
                .with_context(|| format!("creating {}", args.output))?;
            for code in &codes {
                writeln!(f, "{}", code.to_text_line())?;
            }
        }
        FormatArg::Binary => {
            let mut f = std::fs::File::create(&args.output)
                .with_context(|| format!("creating {}", args.output))?;
            bitcode::write_binary(&codes, &mut f)?;
        }
    }
    Ok(0)
}

pub fn run_verify(args: VerifyArgs) -> Result<u8> {
    let seed = SeedSpec::new(args.seed, 0);
    let rows = suites::run_suite(
        &args.suite,
        &seed,
        args.trial_scale,
        &args.multipliers.to_multipliers(),
    )?;
    write_report(&args.out, &rows_to_csv(&rows))?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    if failures > 0 {
        eprintln!("{failures} of {} assertions failed", rows.len());
        Ok(1)
    } else {
        eprintln!("all {} assertions passed", rows.len());
        Ok(0)
    }
}

pub fn run_bench(args: BenchArgs) -> Result<u8> {
    let seed = SeedSpec::new(args.seed, 0);
    let mut lines = vec!["stage,n,input,reps,median_ns,ratio_vs_prev".to_string()];
    let circ = bench_circulant_stage(&args.sizes, args.reps, &seed)?;
    let mut emit = |rows: &[circembed::bench::BenchRow], ratio_within_stage: bool| {
        let mut prev: Option<f64> = None;
        for r in rows {
            let ratio = match (ratio_within_stage, prev) {
                (true, Some(p)) => format!("{:.3}", r.median_ns / p),
                _ => String::new(),
            };
            lines.push(format!(
                "{},{},{},{},{:.0},{ratio}",
                r.stage, r.n, r.input, r.reps, r.median_ns
            ));
            prev = Some(r.median_ns);
        }
    };
    emit(&circ, true);
    let dense = bench_dense_stage(&args.dense_sizes, 64, args.reps, &seed.derive(1))?;
    emit(&dense, true);
    let nnz = (args.sjlt_n as f64).sqrt() as usize;
    let p = resolve_accelerated(
        args.sjlt_n,
        100,
        0.25,
        0.1,
        JlVariant::Sjlt,
        &Multipliers::default(),
    )?;
    let sjlt = bench_sjlt_sparse_vs_dense(
        args.sjlt_n,
        p.m,
        p.nprime,
        p.s.unwrap_or(1),
        nnz,
        args.reps,
        &seed.derive(2),
    )?;
    emit(&sjlt, false);
    if sjlt.len() == 2 {
        lines.push(format!(
            "sjlt-sparse-speedup,{},sparse({nnz}),{},{:.0},{:.3}",
            args.sjlt_n,
            args.reps,
            sjlt[0].median_ns - sjlt[1].median_ns,
            sjlt[0].median_ns / sjlt[1].median_ns
        ));
    }
    write_report(&args.out, &lines)?;
    Ok(0)
}

pub fn run_variance(args: VarianceArgs) -> Result<u8> {
    if args.m_grid.is_empty() {
        bail!("--m-grid must list at least one m");
    }
    let pair_kind = match args.pair_kind {
        PairKindArg::Random => PairKind::RandomUnit,
        PairKindArg::Alternating => PairKind::Alternating,
        PairKindArg::Sparse => PairKind::SparseRandom {
            s: args.sparsity.context("--pair-kind sparse needs --sparsity")?,
        },
    };
    let (label, make): (&str, RecipeFn) =
        match args.kind {
            CurveKindArg::Dense => ("dense", Box::new(|n, m| EmbedderRecipe::Dense { n, m })),
            CurveKindArg::SignedUniform => (
                "signed-circulant-uniform",
                Box::new(|n, m| EmbedderRecipe::SignedCirculant { n, imode: IMode::Uniform, m }),
            ),
            CurveKindArg::SignedFirstM => (
                "signed-circulant-first_m",
                Box::new(|n, m| EmbedderRecipe::SignedCirculant { n, imode: IMode::FirstM, m }),
            ),
            CurveKindArg::SubsampledFirstM => (
                "subsampled-circulant-first_m",
                Box::new(|n, m| {
                    EmbedderRecipe::SubsampledCirculant { n, imode: IMode::FirstM, m }
                }),
            ),
            CurveKindArg::SubsampledUniform => (
                "subsampled-circulant-uniform",
                Box::new(|n, m| {
                    EmbedderRecipe::SubsampledCirculant { n, imode: IMode::Uniform, m }
                }),
            ),
            CurveKindArg::SubsampledDyadic => (
                "subsampled-circulant-dyadic",
                Box::new(|n, m| {
                    EmbedderRecipe::SubsampledCirculant { n, imode: IMode::Dyadic, m }
                }),
            ),
        };
    let grid: Vec<(usize, usize)> = args.m_grid.iter().map(|&m| (args.n, m)).collect();
    let seed = SeedSpec::new(args.seed, 0);
    let curve =
        variance_curve(&*make, label, &grid, pair_kind, args.pairs, args.trials, &seed)?;
    let mut lines = vec![AssertionRow::CSV_HEADER.to_string()];
    for r in &curve.rows {
        lines.push(format!(
            "{}-pair{},{},{},,,,{},{},{:.12e},{:.12e},{:.12e},{:.12e},,true,{:.12e}",
            r.kind,
            r.pair_index,
            r.n,
            r.m,
            r.estimate.trials,
            args.seed,
            r.estimate.mean,
            r.estimate.variance,
            r.estimate.std_error_mean,
            r.estimate.std_error_variance,
            r.rho,
        ));
    }
    if let Some(slope) = curve.fitted_slope {
        lines.push(format!(
            "{label}-loglog-slope,{},,,,,{},{},{slope:.6},,,,,true,",
            args.n, args.trials, args.seed
        ));
    }
    write_report(&args.out, &lines)?;
    Ok(0)
}

pub fn run_covariance(args: CovarianceArgs) -> Result<u8> {
    let seed = SeedSpec::new(args.seed, 0);
    let rows = suites::cov_tuple_rows(&seed, args.random, args.adversarial, args.trials)?;
    write_report(&args.out, &rows_to_csv(&rows))?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    Ok(if failures > 0 { 1 } else { 0 })
}
