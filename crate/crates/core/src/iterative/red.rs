use super::denoise::Denoiser;
use super::{QuadSolver, SolveReport, StopReason, StopRule};
use crate::error::{check_dim, domain, Result};
use crate::image::ImageGrid;
use crate::linalg::Vector;
use crate::operators::{spectral_norm_estimate, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RedScheme {
    FixedPoint,
    SteepestDescent,
    Admm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedConfig {
    pub lambda: f64,
    pub scheme: RedScheme,
    /// `(height, width)` of the unknown image.
    pub shape: (usize, usize),
    /// ADMM penalty.
    pub rho: f64,
    /// Denoiser passes per ADMM `v`-update.
    pub inner_iters: usize,
    /// Steepest-descent step; defaults to `1/(2σ₁² + λ²)`.
    pub step: Option<f64>,
    /// Starting point; defaults to `Aᵀy`.
    pub x0: Option<Vector>,
}

impl RedConfig {
    pub fn new(lambda: f64, scheme: RedScheme, shape: (usize, usize)) -> Self {
        Self {
            lambda,
            scheme,
            shape,
            rho: 1.0,
            inner_iters: 1,
            step: None,
            x0: None,
        }
    }
}

fn denoise_vec(d: &dyn Denoiser, shape: (usize, usize), x: &Vector) -> Vector {
    let img = ImageGrid::devectorize(shape.0, shape.1, x).expect("shape checked by caller");
    d.denoise(&img).vectorize()
}

fn start<A: LinearOperator + ?Sized>(a: &A, y: &Vector, x0: &Option<Vector>) -> Result<Vector> {
    match x0 {
        Some(x) => {
            check_dim(a.in_dim(), x.len())?;
            Ok(x.clone())
        }
        None => Ok(a.apply_adjoint(y)),
    }
}

/// Regularization by denoising:
/// `‖Ax − y‖² + (λ²/2) xᵀ(x − f(x))`.
///
/// All three schemes use the gradient `2Aᵀ(Ax − y) + λ²(x − f(x))`, which
/// assumes `f` is locally homogeneous with a symmetric Jacobian. `aux[0]`
/// records the norm of that gradient at each iterate.
pub fn red<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    denoiser: &dyn Denoiser,
    cfg: &RedConfig,
    stop: StopRule,
) -> Result<SolveReport> {
    check_dim(a.out_dim(), y.len())?;
    check_dim(a.in_dim(), cfg.shape.0 * cfg.shape.1)?;
    if !(cfg.lambda >= 0.0) {
        return Err(domain("lambda must be non-negative"));
    }
    let l2 = cfg.lambda * cfg.lambda;
    let aty2 = a.apply_adjoint(y) * 2.0;
    let gradient = |x: &Vector, fx: &Vector| -> Vector {
        a.apply_adjoint(&a.apply(x)) * 2.0 - &aty2 + (x - fx) * l2
    };
    let objective = |x: &Vector, fx: &Vector| -> (f64, f64) {
        let res = (a.apply(x) - y).norm();
        (res * res + 0.5 * l2 * x.dot(&(x - fx)), res)
    };

    let mut x = start(a, y, &cfg.x0)?;
    let mut rep = SolveReport::new(x.clone());
    let mut prev = f64::INFINITY;
    match cfg.scheme {
        RedScheme::FixedPoint => {
            let solver = QuadSolver::new(a, None, 2.0, 0.0, l2);
            for _ in 0..stop.max_iters {
                let fx = denoise_vec(denoiser, cfg.shape, &x);
                x = solver.solve(&(&aty2 + fx * l2), &x);
                let fx = denoise_vec(denoiser, cfg.shape, &x);
                let (obj, res) = objective(&x, &fx);
                rep.push(obj, res, x.norm(), [gradient(&x, &fx).norm(), 0.0]);
                if stop.converged(prev, obj) {
                    rep.stop_reason = StopReason::Converged;
                    break;
                }
                prev = obj;
            }
        }
        RedScheme::SteepestDescent => {
            let step = match cfg.step {
                Some(s) if s > 0.0 => s,
                Some(_) => return Err(domain("step must be positive")),
                None => {
                    let s1 = spectral_norm_estimate(a, 100);
                    1.0 / (2.0 * 1.02 * s1 * s1 + l2)
                }
            };
            for _ in 0..stop.max_iters {
                let fx = denoise_vec(denoiser, cfg.shape, &x);
                x -= gradient(&x, &fx) * step;
                let fx = denoise_vec(denoiser, cfg.shape, &x);
                let (obj, res) = objective(&x, &fx);
                rep.push(obj, res, x.norm(), [gradient(&x, &fx).norm(), 0.0]);
                if stop.converged(prev, obj) {
                    rep.stop_reason = StopReason::Converged;
                    break;
                }
                prev = obj;
            }
        }
        RedScheme::Admm => {
            if !(cfg.rho > 0.0) {
                return Err(domain("rho must be positive"));
            }
            let rho = cfg.rho;
            let solver = QuadSolver::new(a, None, 2.0, 0.0, rho);
            let mut v = x.clone();
            let mut u = Vector::zeros(x.len());
            for _ in 0..stop.max_iters {
                x = solver.solve(&(&aty2 + (&v - &u) * rho), &x);
                let target = &x + &u;
                for _ in 0..cfg.inner_iters.max(1) {
                    let fv = denoise_vec(denoiser, cfg.shape, &v);
                    v = (fv * l2 + &target * rho) / (l2 + rho);
                }
                u += &x - &v;
                let fx = denoise_vec(denoiser, cfg.shape, &x);
                let (obj, res) = objective(&x, &fx);
                rep.push(
                    obj,
                    res,
                    x.norm(),
                    [gradient(&x, &fx).norm(), (&x - &v).norm()],
                );
                if stop.converged(prev, obj) {
                    rep.stop_reason = StopReason::Converged;
                    break;
                }
                prev = obj;
            }
        }
    }
    rep.x = x;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnpConfig {
    pub lambda: f64,
    pub rho: f64,
    pub shape: (usize, usize),
    pub x0: Option<Vector>,
}

/// Plug-and-play ADMM for `‖Ax − y‖² + λ²Φ(x)`, where the proximal map of
/// `Φ/ρ` is replaced by the denoiser:
///
/// ```text
/// x ← argmin ‖Ax − y‖² + (λ²ρ/2)‖x − v + u‖²
/// v ← f(x + u)
/// u ← u + x − v
/// ```
///
/// Convergence is not guaranteed for arbitrary denoisers. The objective
/// column holds `‖Ax − y‖²`; `aux` holds `‖x − v‖` and `λ²ρ‖v − v_prev‖`.
pub fn pnp_admm<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    denoiser: &dyn Denoiser,
    cfg: &PnpConfig,
    stop: StopRule,
) -> Result<SolveReport> {
    check_dim(a.out_dim(), y.len())?;
    check_dim(a.in_dim(), cfg.shape.0 * cfg.shape.1)?;
    if !(cfg.rho > 0.0) || !(cfg.lambda > 0.0) {
        return Err(domain("lambda and rho must be positive"));
    }
    let beta = cfg.lambda * cfg.lambda * cfg.rho;
    let solver = QuadSolver::new(a, None, 2.0, 0.0, beta);
    let aty2 = a.apply_adjoint(y) * 2.0;
    let mut x = start(a, y, &cfg.x0)?;
    let mut v = x.clone();
    let mut u = Vector::zeros(x.len());
    let mut rep = SolveReport::new(x.clone());
    let mut prev = f64::INFINITY;
    for _ in 0..stop.max_iters {
        x = solver.solve(&(&aty2 + (&v - &u) * beta), &x);
        let v_prev = v;
        v = denoise_vec(denoiser, cfg.shape, &(&x + &u));
        u += &x - &v;
        let res = (a.apply(&x) - y).norm();
        let obj = res * res;
        rep.push(
            obj,
            res,
            x.norm(),
            [(&x - &v).norm(), beta * (&v - &v_prev).norm()],
        );
        if stop.converged(prev, obj) {
            rep.stop_reason = StopReason::Converged;
            break;
        }
        prev = obj;
    }
    rep.x = x;
    Ok(rep)
}
