//! Subcommands of the `illposed` binary.
//!
//! Every parameter can come from a flag, a `key = value` config file
//! (`--config`) or a built-in default, in that order of precedence. Config
//! keys are the long flag names without dashes prefix, e.g. `lambda-grid`.
//! All randomness is seeded from `--seed`, so reruns are byte-identical.

use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use illposed_core::direct::{naive_solve, tikhonov_classic, tikhonov_general};
use illposed_core::freq::{fft_tikhonov, wiener_nsr};
use illposed_core::iterative::{
    admm, cgls, fista, irls, landweber, maxent, median_denoiser, pnp_admm, red, AdmmPenalty,
    IrlsConfig, IterRecord, PnpConfig, RedConfig, RedScheme,
};
use illposed_core::linalg::{mse, svd, DenseMatrix, Vector};
use illposed_core::operators::{conv_matrix, spectral_norm_estimate, Identity};
use illposed_core::phantom::{blocks, dct_sparse};
use illposed_core::regmat::{laplacian2d_operator, LKind};
use illposed_core::regression::{elastic_net, lasso, ols, ridge, ridge_bias_variance};
use illposed_core::sparse::{cs_recover, dct2_dictionary, dct_dictionary, CsMode, Homotopy};
use illposed_core::spectral::{classify_illposedness, picard_table, tsvd_solve};
use illposed_core::{BoundaryCondition, ImageGrid, LinearOperator, RegularizerSpec, StopRule};

use crate::config::Config;
use crate::csvio::{fmt_f64, Table};
use crate::experiments::{
    deblur_instance, interp_experiment, missing_data, quintic_data, sparse_dct_signal, DeblurSetup,
    DESK_SEED,
};
use crate::output::OutputSet;
use crate::pgm::read_pgm;
use crate::specs::{LambdaGrid, List, NoiseSpec, PsfSpec, Ranges};

#[derive(Debug, Parser)]
#[command(
    name = "illposed",
    version,
    about = "Regularized inversion experiments with CSV and PGM output"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Input PGM image (P2 or P5).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Directory for all outputs [default: out].
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Blur kernel, e.g. gaussian:9:1.5, disk:7:2.5, motion:9:5:30.
    #[arg(long, global = true)]
    pub psf: Option<PsfSpec>,
    /// Boundary condition: zero, replicate, periodic or reflexive.
    #[arg(long, global = true)]
    pub bc: Option<BoundaryCondition>,
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// One value or a comma-separated list.
    #[arg(long, global = true)]
    pub lambda: Option<List<f64>>,
    /// Log-spaced grid lo:hi:n.
    #[arg(long, global = true)]
    pub lambda_grid: Option<LambdaGrid>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// none, gaussian:STD or poisson:SCALE.
    #[arg(long, global = true)]
    pub noise: Option<NoiseSpec>,
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// key = value file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Singular values, Picard table, condition number and decay class.
    Analyze(AnalyzeArgs),
    /// Reconstruct a blurred image with one of the deblurring methods.
    Deblur(DeblurArgs),
    /// Fill gaps in a sampled sine with Tikhonov regularization.
    Missing(MissingArgs),
    /// Polynomial versus trigonometric least-squares interpolation.
    Interp(InterpArgs),
    /// Compressed-sensing recovery against the minimum-norm solution.
    Cs(CsArgs),
    /// OLS, ridge, LASSO and elastic net with the ridge bias–variance curve.
    Regress(RegressArgs),
    /// Write a test image.
    Phantom(PhantomArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Conv,
    Identity,
}

impl FromStr for OperatorKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conv" => Ok(Self::Conv),
            "identity" => Ok(Self::Identity),
            _ => bail!("operator must be conv or identity"),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct AnalyzeArgs {
    /// Side of the default phantom when no input is given [default: 32].
    #[arg(long)]
    pub size: Option<usize>,
    /// conv or identity [default: conv].
    #[arg(long)]
    pub operator: Option<OperatorKind>,
    /// Number of singular values written [default: 200].
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DeblurArgs {
    /// Ground truth PGM for MSE/PSNR when the input is already blurred.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Treat the input as ground truth and blur it, adding --noise.
    #[arg(long)]
    pub simulate: bool,
    /// Side of the default phantom when no input is given [default: 32].
    #[arg(long)]
    pub size: Option<usize>,
    /// Truncation index for tsvd.
    #[arg(long)]
    pub k: Option<usize>,
    /// Noise-to-signal ratios for wiener, comma separated.
    #[arg(long)]
    pub nsr: Option<List<f64>>,
    /// Penalty exponent for irls [default: 1].
    #[arg(long)]
    pub p: Option<f64>,
    /// Median window for pnp and red denoisers [default: 3].
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MissingArgs {
    /// Number of samples [default: 200].
    #[arg(long)]
    pub n: Option<usize>,
    /// Removed index ranges a:b [default: 50:70,120:150].
    #[arg(long)]
    pub gaps: Option<Ranges>,
    /// Regularization matrix: identity, d1 or d2 [default: d1].
    #[arg(long)]
    pub l: Option<LKind>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InterpArgs {
    /// [default: 40]
    #[arg(long)]
    pub nodes: Option<usize>,
    /// [default: 9]
    #[arg(long)]
    pub degree: Option<usize>,
    /// [default: 3]
    #[arg(long)]
    pub freqs: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CsArgs {
    /// Signal length in 1D mode [default: 64].
    #[arg(long)]
    pub n: Option<usize>,
    /// Image side; switches to 2D mode.
    #[arg(long)]
    pub size: Option<usize>,
    /// Measurements [default: 20 in 1D, n/8 in 2D].
    #[arg(long)]
    pub m: Option<usize>,
    /// Nonzero DCT coefficients [default: 3 in 1D, 100 in 2D].
    #[arg(long)]
    pub sparsity: Option<usize>,
    /// bp (small-λ continuation) or lambda (single solve at --lambda) [default: bp].
    #[arg(long)]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RegressArgs {
    /// [default: 50]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PhantomArgs {
    /// [default: 32]
    #[arg(long)]
    pub size: Option<usize>,
    /// blocks or dct-sparse [default: blocks].
    #[arg(long)]
    pub kind: Option<String>,
}

const KNOWN_KEYS: &[&str] = &[
    "input",
    "output-dir",
    "psf",
    "bc",
    "method",
    "lambda",
    "lambda-grid",
    "seed",
    "noise",
    "iters",
    "rho",
    "size",
    "operator",
    "top",
    "truth",
    "simulate",
    "k",
    "nsr",
    "p",
    "window",
    "n",
    "gaps",
    "l",
    "nodes",
    "degree",
    "freqs",
    "m",
    "sparsity",
    "mode",
    "samples",
    "kind",
];

pub const DEBLUR_METHODS: &[&str] = &[
    "naive",
    "tikhonov",
    "tikhonov-L",
    "tsvd",
    "fista-l1",
    "irls",
    "admm-l1",
    "tv-aniso",
    "tv-iso",
    "maxent",
    "pnp-median",
    "red-fp",
    "red-sd",
    "red-admm",
    "cgls",
    "landweber",
    "fft-tikhonov",
    "wiener",
];

struct Ctx {
    cfg: Config,
    common: Common,
}

impl Ctx {
    fn get<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.cfg.resolve(key, flag, default)
    }

    fn opt<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.cfg.resolve_opt(key, flag)
    }

    fn seed(&self) -> Result<u64> {
        self.get("seed", self.common.seed, DESK_SEED)
    }

    fn iters(&self, default: usize) -> Result<usize> {
        self.get("iters", self.common.iters, default)
    }

    fn rho(&self) -> Result<f64> {
        self.get("rho", self.common.rho, 1.0)
    }

    fn noise(&self, default: &str) -> Result<NoiseSpec> {
        self.get("noise", self.common.noise, default.parse()?)
    }

    fn input(&self) -> Result<Option<PathBuf>> {
        self.opt("input", self.common.input.clone())
    }

    /// `--lambda`, then `--lambda-grid`, then the same keys in the config,
    /// then `default`; sorted ascending.
    fn lambdas(&self, default: &[f64]) -> Result<Vec<f64>> {
        let mut v = if let Some(l) = &self.common.lambda {
            l.0.clone()
        } else if let Some(g) = &self.common.lambda_grid {
            g.0.clone()
        } else if let Some(l) = self.cfg.resolve_opt::<List<f64>>("lambda", None)? {
            l.0
        } else if let Some(g) = self.cfg.resolve_opt::<LambdaGrid>("lambda-grid", None)? {
            g.0
        } else {
            default.to_vec()
        };
        ensure!(!v.is_empty(), "empty lambda list");
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    /// Like [`Ctx::lambdas`] but reading only `--lambda-grid`.
    fn grid(&self, default: &str) -> Result<Vec<f64>> {
        Ok(self
            .get(
                "lambda-grid",
                self.common.lambda_grid.clone(),
                default.parse()?,
            )?
            .0)
    }
}

/// Runs a parsed command line and returns the written files.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let cfg = match &cli.common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.check_keys(KNOWN_KEYS)?;
    let ctx = Ctx {
        cfg,
        common: cli.common,
    };
    let out_dir: PathBuf = ctx.get(
        "output-dir",
        ctx.common.output_dir.clone(),
        PathBuf::from("out"),
    )?;
    let outputs = match &cli.command {
        Command::Analyze(a) => analyze(&ctx, a)?,
        Command::Deblur(a) => deblur(&ctx, a)?,
        Command::Missing(a) => missing(&ctx, a)?,
        Command::Interp(a) => interp(&ctx, a)?,
        Command::Cs(a) => cs(&ctx, a)?,
        Command::Regress(a) => regress(&ctx, a)?,
        Command::Phantom(a) => phantom(&ctx, a)?,
    };
    outputs.commit(&out_dir)
}

fn load_image(path: &PathBuf) -> Result<ImageGrid> {
    read_pgm(path).with_context(|| format!("reading {}", path.display()))
}

fn psnr(mse: f64) -> f64 {
    10.0 * (1.0 / mse).log10()
}

fn analyze(ctx: &Ctx, args: &AnalyzeArgs) -> Result<OutputSet> {
    let size = ctx.get("size", args.size, 32)?;
    let truth = match ctx.input()? {
        Some(p) => load_image(&p)?,
        None => blocks(size, size),
    };
    let (h, w) = (truth.height(), truth.width());
    let n = h * w;
    let a = match ctx.get("operator", args.operator, OperatorKind::Conv)? {
        OperatorKind::Identity => DenseMatrix::identity(n, n),
        OperatorKind::Conv => {
            let psf: PsfSpec = ctx.get("psf", ctx.common.psf, "gaussian:9:1.5".parse()?)?;
            let bc = ctx.get("bc", ctx.common.bc, BoundaryCondition::Reflexive)?;
            conv_matrix(psf.build()?.kernel(), h, w, bc)?
        }
    };
    let mut y = &a * truth.vectorize();
    if let Some(model) = ctx.noise("none")?.0 {
        y = illposed_core::operators::add_noise(&y, model, ctx.seed()?)?;
    }
    let f = svd(&a)?;
    let top = ctx.get("top", args.top, 200)?;

    let mut out = OutputSet::new();
    let mut sv = Table::new(&["index", "sigma"]);
    for (i, s) in f.sigmas.iter().take(top).enumerate() {
        sv.push(vec![(i + 1).to_string(), fmt_f64(*s)]);
    }
    out.add_csv("singular_values.csv", &sv)?;
    out.add_csv("picard.csv", &picard_csv(&picard_table(&f, &y)?))?;

    let rank = f.rank(illposed_core::linalg::RANK_TOL);
    let cond = illposed_core::linalg::condition_from_sigmas(&f.sigmas, 0.0)?;
    let mut report = format!(
        "rows={}\ncols={}\nrank={rank}\ncondition={}\n",
        a.nrows(),
        a.ncols(),
        fmt_f64(cond)
    );
    match classify_illposedness(&f.sigmas) {
        Ok(c) => report.push_str(&format!(
            "class={:?}\nalpha_hat={}\npower_rss={}\nexp_rss={}\n",
            c.class,
            fmt_f64(c.alpha_hat),
            fmt_f64(c.power_rss),
            fmt_f64(c.exp_rss)
        )),
        Err(e) => report.push_str(&format!("class=unavailable ({e})\n")),
    }
    out.add_text("condition.txt", report);
    Ok(out)
}

/// CSV rendering of a Picard table; `ratio` is `|uᵢᵀy| / σᵢ`.
pub fn picard_csv(t: &illposed_core::spectral::PicardTable) -> Table {
    let mut tab = Table::new(&["index", "sigma", "coeff", "ratio"]);
    for i in 0..t.len() {
        tab.push(vec![
            (i + 1).to_string(),
            fmt_f64(t.sigma[i]),
            fmt_f64(t.coeff[i]),
            fmt_f64(t.ratio[i]),
        ]);
    }
    tab
}

struct MethodRun {
    param: f64,
    x: Vector,
    history: Vec<IterRecord>,
}

const DENSE_PIXEL_LIMIT: usize = 64 * 64;

fn deblur(ctx: &Ctx, args: &DeblurArgs) -> Result<OutputSet> {
    let method = ctx.get("method", ctx.common.method.clone(), "tikhonov".to_string())?;
    if !DEBLUR_METHODS.contains(&method.as_str()) {
        bail!(
            "unknown method {method:?}; expected one of {}",
            DEBLUR_METHODS.join(", ")
        );
    }
    let defaults = DeblurSetup::default();
    let psf: PsfSpec = ctx.get("psf", ctx.common.psf, defaults.psf)?;
    let bc = ctx.get("bc", ctx.common.bc, defaults.bc)?;
    let seed = ctx.seed()?;
    let simulate = args.simulate || ctx.cfg.resolve("simulate", None, false)?;
    let input = ctx.input()?;

    let (observed, truth) = match input.as_ref().filter(|_| !simulate) {
        None => {
            let truth = input.as_ref().map(load_image).transpose()?;
            let setup = DeblurSetup {
                size: ctx.get("size", args.size, defaults.size)?,
                psf,
                bc,
                noise: ctx.noise("gaussian:3e-4")?.0,
                seed,
            };
            let inst = deblur_instance(&setup, truth)?;
            (inst.observed(), Some(inst.truth))
        }
        Some(path) => {
            let observed = load_image(path)?;
            let truth = ctx
                .opt::<PathBuf>("truth", args.truth.clone())?
                .map(|p| load_image(&p))
                .transpose()?;
            if let Some(t) = &truth {
                ensure!(
                    t.same_shape(&observed),
                    "dimension mismatch: truth is {}x{}, input is {}x{}",
                    t.height(),
                    t.width(),
                    observed.height(),
                    observed.width()
                );
            }
            (observed, truth)
        }
    };

    let (h, w) = (observed.height(), observed.width());
    let kernel = psf.build()?.kernel().clone();
    let op = illposed_core::operators::Conv2d::new(&kernel, h, w, bc)?;
    let y = observed.vectorize();
    let iters = ctx.iters(100)?;
    let stop = StopRule::iters(iters).with_tol(1e-10);
    let lambdas = || ctx.lambdas(&[0.01]);
    let dense = || -> Result<DenseMatrix> {
        ensure!(
            h * w <= DENSE_PIXEL_LIMIT,
            "method {method} builds a dense operator; image must have at most 4096 pixels"
        );
        Ok(conv_matrix(&kernel, h, w, bc)?)
    };
    let single = |x: Vector| {
        vec![MethodRun {
            param: f64::NAN,
            x,
            history: Vec::new(),
        }]
    };
    let window = ctx.get("window", args.window, 3)?;

    let runs: Vec<MethodRun> = match method.as_str() {
        "naive" => single(naive_solve(&dense()?, &y)?),
        "tikhonov" => {
            let a = dense()?;
            lambdas()?
                .into_iter()
                .map(|l| {
                    Ok(MethodRun {
                        param: l,
                        x: tikhonov_classic(&a, &y, l)?,
                        history: Vec::new(),
                    })
                })
                .collect::<Result<_>>()?
        }
        "tikhonov-L" => {
            let a = dense()?;
            let lap = laplacian2d_operator(h, w, bc)?.to_dense()?;
            lambdas()?
                .into_iter()
                .map(|l| {
                    let reg = RegularizerSpec::new(lap.clone(), l)?;
                    Ok(MethodRun {
                        param: l,
                        x: tikhonov_general(&a, &y, &reg)?,
                        history: Vec::new(),
                    })
                })
                .collect::<Result<_>>()?
        }
        "tsvd" => {
            let f = svd(&dense()?)?;
            let k = ctx.get("k", args.k, (h * w) / 4)?;
            vec![MethodRun {
                param: k as f64,
                x: tsvd_solve(&f, &y, k)?,
                history: Vec::new(),
            }]
        }
        "fista-l1" => lambdas()?
            .into_iter()
            .map(|l| {
                let r = fista(&op, &y, l, stop)?;
                Ok(MethodRun {
                    param: l,
                    x: r.x,
                    history: r.history,
                })
            })
            .collect::<Result<_>>()?,
        "irls" => {
            let a = dense()?;
            let p = ctx.get("p", args.p, 1.0)?;
            let cfg = IrlsConfig {
                outer_iters: iters,
                ..IrlsConfig::default()
            };
            lambdas()?
                .into_iter()
                .map(|l| {
                    let reg = RegularizerSpec::identity(h * w, l)?;
                    let r = irls(&a, &y, &cfg, 2.0, &reg, p)?;
                    Ok(MethodRun {
                        param: l,
                        x: r.x,
                        history: r.history,
                    })
                })
                .collect::<Result<_>>()?
        }
        "admm-l1" | "tv-aniso" | "tv-iso" => {
            let id = Identity(h * w);
            let penalty = match method.as_str() {
                "admm-l1" => AdmmPenalty::L1(&id),
                "tv-aniso" => AdmmPenalty::TvAniso {
                    height: h,
                    width: w,
                },
                _ => AdmmPenalty::TvIso {
                    height: h,
                    width: w,
                },
            };
            let rho = ctx.rho()?;
            lambdas()?
                .into_iter()
                .map(|l| {
                    let r = admm(&op, &y, l, rho, penalty, stop)?;
                    Ok(MethodRun {
                        param: l,
                        x: r.x,
                        history: r.history,
                    })
                })
                .collect::<Result<_>>()?
        }
        "maxent" => {
            let omega = Vector::from_element(h * w, 1.0);
            lambdas()?
                .into_iter()
                .map(|l| {
                    let r = maxent(&op, &y, l, &omega, stop)?;
                    Ok(MethodRun {
                        param: l,
                        x: r.x,
                        history: r.history,
                    })
                })
                .collect::<Result<_>>()?
        }
        "pnp-median" => {
            let d = median_denoiser(window, window)?;
            let rho = ctx.rho()?;
            lambdas()?
                .into_iter()
                .map(|l| {
                    let cfg = PnpConfig {
                        lambda: l,
                        rho,
                        shape: (h, w),
                        x0: None,
                    };
                    let r = pnp_admm(&op, &y, &d, &cfg, stop)?;
                    Ok(MethodRun {
                        param: l,
                        x: r.x,
                        history: r.history,
                    })
                })
                .collect::<Result<_>>()?
        }
        "red-fp" | "red-sd" | "red-admm" => {
            let scheme = match method.as_str() {
                "red-fp" => RedScheme::FixedPoint,
                "red-sd" => RedScheme::SteepestDescent,
                _ => RedScheme::Admm,
            };
            let d = median_denoiser(window, window)?;
            let rho = ctx.rho()?;
            lambdas()?
                .into_iter()
                .map(|l| {
                    let cfg = RedConfig {
                        rho,
                        ..RedConfig::new(l, scheme, (h, w))
                    };
                    let r = red(&op, &y, &d, &cfg, stop)?;
                    Ok(MethodRun {
                        param: l,
                        x: r.x,
                        history: r.history,
                    })
                })
                .collect::<Result<_>>()?
        }
        "cgls" => {
            let r = cgls(&op, &y, StopRule::iters(iters))?;
            vec![MethodRun {
                param: iters as f64,
                x: r.x,
                history: r.history,
            }]
        }
        "landweber" => {
            let s1 = spectral_norm_estimate(&op, 100);
            let r = landweber(&op, &y, 1.0 / (s1 * s1), StopRule::iters(iters))?;
            vec![MethodRun {
                param: iters as f64,
                x: r.x,
                history: r.history,
            }]
        }
        "fft-tikhonov" | "wiener" => {
            ensure!(
                bc == BoundaryCondition::Periodic,
                "{method} assumes periodic boundaries; pass --bc periodic"
            );
            let params = if method == "wiener" {
                let mut v = ctx.get("nsr", args.nsr.clone(), List(vec![0.01]))?.0;
                v.sort_by(f64::total_cmp);
                v
            } else {
                lambdas()?
            };
            params
                .into_iter()
                .map(|c| {
                    let x = if method == "wiener" {
                        wiener_nsr(&observed, &kernel, c)?
                    } else {
                        fft_tikhonov(&observed, &kernel, c)?
                    };
                    Ok(MethodRun {
                        param: c,
                        x: x.vectorize(),
                        history: Vec::new(),
                    })
                })
                .collect::<Result<_>>()?
        }
        _ => unreachable!("method list checked above"),
    };

    let mut out = OutputSet::new();
    out.add_pgm("observed.pgm", &observed);
    let mut report = Table::new(&[
        "method",
        "param",
        "mse",
        "psnr",
        "residual_norm",
        "solution_norm",
        "iterations",
    ]);
    let many = runs.len() > 1;
    for (i, run) in runs.iter().enumerate() {
        ensure!(
            run.x.iter().all(|v| v.is_finite()),
            "{method} produced non-finite values"
        );
        let stem = if many {
            format!("{method}_{i}")
        } else {
            method.clone()
        };
        let img = ImageGrid::devectorize(h, w, &run.x)?;
        out.add_pgm(format!("{stem}.pgm"), &img);
        let (m, p) = match &truth {
            Some(t) => {
                let m = mse(img.data(), t.data());
                (fmt_f64(m), fmt_f64(psnr(m)))
            }
            None => (String::new(), String::new()),
        };
        let res = (op.apply(&run.x) - &y).norm();
        report.push(vec![
            method.clone(),
            fmt_f64(run.param),
            m,
            p,
            fmt_f64(res),
            fmt_f64(run.x.norm()),
            run.history.len().to_string(),
        ]);
        if !run.history.is_empty() {
            out.add_csv(format!("history_{stem}.csv"), &history_csv(&run.history))?;
        }
    }
    out.add_csv("report.csv", &report)?;
    Ok(out)
}

fn history_csv(h: &[IterRecord]) -> Table {
    let mut t = Table::new(&[
        "iter",
        "objective",
        "residual_norm",
        "solution_norm",
        "aux0",
        "aux1",
    ]);
    for (k, r) in h.iter().enumerate() {
        t.push(vec![
            (k + 1).to_string(),
            fmt_f64(r.objective),
            fmt_f64(r.residual_norm),
            fmt_f64(r.solution_norm),
            fmt_f64(r.aux[0]),
            fmt_f64(r.aux[1]),
        ]);
    }
    t
}

fn gaussian_std(spec: NoiseSpec) -> Result<f64> {
    match spec.0 {
        None => Ok(0.0),
        Some(illposed_core::operators::NoiseModel::Gaussian { std, .. }) => Ok(std),
        Some(_) => bail!("this command only supports gaussian noise"),
    }
}

fn missing(ctx: &Ctx, args: &MissingArgs) -> Result<OutputSet> {
    let n = ctx.get("n", args.n, 200)?;
    let gaps = ctx.get("gaps", args.gaps.clone(), "50:70,120:150".parse()?)?;
    let l = ctx.get("l", args.l, LKind::D1)?;
    let data = missing_data(n, &gaps.0, gaussian_std(ctx.noise("none")?)?, ctx.seed()?)?;
    let lambdas = ctx.lambdas(&[1e-4])?;

    let mut out = OutputSet::new();
    let mut summary = Table::new(&["lambda", "mse", "gap_mse"]);
    for (k, &lam) in lambdas.iter().enumerate() {
        let x = data.reconstruct(l, lam)?;
        let mut t = Table::new(&[
            "index",
            "t",
            "original",
            "corrupted",
            "mask",
            "reconstructed",
        ]);
        let mut gap_err = (0.0, 0usize);
        for i in 0..n {
            let keep = data.keep[i];
            if !keep {
                gap_err.0 += (x[i] - data.truth[i]).powi(2);
                gap_err.1 += 1;
            }
            t.push(vec![
                i.to_string(),
                fmt_f64(data.t[i]),
                fmt_f64(data.truth[i]),
                fmt_f64(data.observed[i]),
                u8::from(keep).to_string(),
                fmt_f64(x[i]),
            ]);
        }
        let name = if lambdas.len() > 1 {
            format!("missing_{k}.csv")
        } else {
            "missing.csv".to_string()
        };
        out.add_csv(name, &t)?;
        summary.push_f64(&[
            lam,
            mse(x.as_slice(), data.truth.as_slice()),
            gap_err.0 / gap_err.1.max(1) as f64,
        ]);
    }
    out.add_csv("missing_summary.csv", &summary)?;
    Ok(out)
}

fn interp(ctx: &Ctx, args: &InterpArgs) -> Result<OutputSet> {
    let nodes = ctx.get("nodes", args.nodes, 40)?;
    let degree = ctx.get("degree", args.degree, 9)?;
    let freqs = ctx.get("freqs", args.freqs, 3)?;
    let std = gaussian_std(ctx.noise("gaussian:0.1")?)?;
    let r = interp_experiment(nodes, degree, freqs, std, ctx.seed()?)?;
    let mut fit = Table::new(&["t", "truth", "y", "poly", "trig"]);
    for i in 0..nodes {
        fit.push_f64(&[r.t[i], r.truth[i], r.y[i], r.fit_poly[i], r.fit_trig[i]]);
    }
    let mut metrics = Table::new(&[
        "mse_poly",
        "mse_trig",
        "residual_rms_trig",
        "poly_condition",
    ]);
    metrics.push_f64(&[
        r.mse_poly,
        r.mse_trig,
        r.residual_rms_trig,
        r.poly_condition,
    ]);
    let mut out = OutputSet::new();
    out.add_csv("interp.csv", &fit)?;
    out.add_csv("interp_metrics.csv", &metrics)?;
    Ok(out)
}

fn cs(ctx: &Ctx, args: &CsArgs) -> Result<OutputSet> {
    let seed = ctx.seed()?;
    let mode = match ctx
        .get("mode", args.mode.clone(), "bp".to_string())?
        .as_str()
    {
        "bp" => CsMode::BasisPursuit(Homotopy::default()),
        "lambda" => CsMode::Lambda(ctx.lambdas(&[1e-3])?[0]),
        other => bail!("unknown cs mode {other:?}"),
    };
    let mut out = OutputSet::new();
    let size = ctx.opt("size", args.size)?;
    let result = match size {
        Some(side) => {
            let n = side * side;
            let m = ctx.get("m", args.m, n / 8)?;
            let k = ctx.get("sparsity", args.sparsity, 100)?;
            let (img, _) = dct_sparse(side, side, k, seed);
            let dict = dct2_dictionary(side, side)?;
            let mode = match mode {
                CsMode::BasisPursuit(_) => CsMode::BasisPursuit(Homotopy {
                    stages: 8,
                    iters_per_stage: 150,
                    final_ratio: 1e-5,
                }),
                other => other,
            };
            let r = cs_recover(&img.vectorize(), &dict, m, seed.wrapping_add(1), mode)?;
            let (lo, hi) = img
                .data()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                    (a.min(*v), b.max(*v))
                });
            let scale = |v: &Vector| -> Result<ImageGrid> {
                Ok(ImageGrid::devectorize(side, side, v)?
                    .map(|p| (p - lo) / (hi - lo).max(f64::MIN_POSITIVE)))
            };
            out.add_pgm("cs_truth.pgm", &scale(&img.vectorize())?);
            out.add_pgm("cs_l1.pgm", &scale(&r.x_hat)?);
            out.add_pgm("cs_pinv.pgm", &scale(&r.x_pinv)?);
            r
        }
        None => {
            let n = ctx.get("n", args.n, 64)?;
            let m = ctx.get("m", args.m, 20)?;
            let k = ctx.get("sparsity", args.sparsity, 3)?;
            let (x, _) = sparse_dct_signal(n, k, seed)?;
            let r = cs_recover(&x, &dct_dictionary(n)?, m, seed.wrapping_add(1), mode)?;
            let mut sig = Table::new(&["index", "truth", "l1", "pinv"]);
            for i in 0..n {
                sig.push(vec![
                    i.to_string(),
                    fmt_f64(x[i]),
                    fmt_f64(r.x_hat[i]),
                    fmt_f64(r.x_pinv[i]),
                ]);
            }
            out.add_csv("cs_signal.csv", &sig)?;
            r
        }
    };
    let mt = result.metrics;
    let mut metrics = Table::new(&["m", "recovery_error", "support_f1", "l1_mse", "pinv_mse"]);
    metrics.push(vec![
        mt.m.to_string(),
        fmt_f64(mt.recovery_error),
        fmt_f64(mt.support_f1),
        fmt_f64(mt.l1_mse),
        fmt_f64(mt.pinv_mse),
    ]);
    out.add_csv("cs_metrics.csv", &metrics)?;
    Ok(out)
}

/// Ridge and friends on the noisy quintic with a quartic design.
///
/// `--lambda` is the solver weight (penalty `λ²‖β‖²`, default `√2`);
/// `--lambda-grid` feeds the bias–variance table, whose `λ` is unsquared.
fn regress(ctx: &Ctx, args: &RegressArgs) -> Result<OutputSet> {
    let samples = ctx.get("samples", args.samples, 50)?;
    let std = gaussian_std(ctx.noise("gaussian:1")?)?;
    let data = quintic_data(samples, std, ctx.seed()?)?;
    let lam = ctx.lambdas(&[2f64.sqrt()])?[0];
    let iters = ctx.iters(5000)?;
    let stop = StopRule::iters(iters).with_tol(1e-14);
    let x = &data.design;
    let b_ols = ols(x, &data.y)?;
    let b_ridge = ridge(x, &data.y, lam)?;
    let b_lasso = lasso(x, &data.y, lam, stop)?;
    let b_enet = elastic_net(x, &data.y, lam, lam, stop)?;

    let mut coef = Table::new(&["index", "ols", "ridge", "lasso", "elastic_net"]);
    for i in 0..b_ols.len() {
        coef.push(vec![
            i.to_string(),
            fmt_f64(b_ols[i]),
            fmt_f64(b_ridge[i]),
            fmt_f64(b_lasso[i]),
            fmt_f64(b_enet[i]),
        ]);
    }
    let mut norms = Table::new(&[
        "lambda",
        "ols_norm",
        "ridge_norm",
        "lasso_norm",
        "elastic_net_norm",
    ]);
    norms.push_f64(&[
        lam,
        b_ols.norm(),
        b_ridge.norm(),
        b_lasso.norm(),
        b_enet.norm(),
    ]);
    let mut fit = Table::new(&["t", "y", "truth", "ols", "ridge"]);
    let (f_ols, f_ridge) = (x * &b_ols, x * &b_ridge);
    for i in 0..samples {
        fit.push_f64(&[data.t[i], data.y[i], data.truth[i], f_ols[i], f_ridge[i]]);
    }

    let beta_star = ols(x, &data.truth)?;
    let grid = ctx.grid("1e-3:100:30")?;
    let mut bv = Table::new(&["lambda", "variance", "bias2", "mse"]);
    for r in ridge_bias_variance(x, &beta_star, std * std, &grid)? {
        bv.push_f64(&[r.lambda, r.variance, r.bias2, r.mse]);
    }
    let mut out = OutputSet::new();
    out.add_csv("coefficients.csv", &coef)?;
    out.add_csv("norms.csv", &norms)?;
    out.add_csv("fit.csv", &fit)?;
    out.add_csv("bias_variance.csv", &bv)?;
    Ok(out)
}

fn phantom(ctx: &Ctx, args: &PhantomArgs) -> Result<OutputSet> {
    let size = ctx.get("size", args.size, 32)?;
    ensure!(size >= 2, "size must be at least 2");
    let img = match ctx
        .get("kind", args.kind.clone(), "blocks".to_string())?
        .as_str()
    {
        "blocks" => blocks(size, size),
        "dct-sparse" => {
            let (img, _) = dct_sparse(size, size, (size * size / 100).max(1), ctx.seed()?);
            let (lo, hi) = img
                .data()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                    (a.min(*v), b.max(*v))
                });
            img.map(|p| (p - lo) / (hi - lo).max(f64::MIN_POSITIVE))
        }
        other => return Err(anyhow!("unknown phantom kind {other:?}")),
    };
    let mut out = OutputSet::new();
    out.add_pgm("phantom.pgm", &img);
    Ok(out)
}
