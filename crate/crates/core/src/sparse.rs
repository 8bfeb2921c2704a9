//! Dictionaries, synthesis-prior solves, hybrid projection and a
//! compressed-sensing harness.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods shadow these when std is linked
use num_traits::Float;

use crate::direct::tikhonov_classic;
use crate::error::{check_dim, domain, Error, Result};
use crate::iterative::{
    admm, cgls, fista, proximal_gradient, AdmmPenalty, ProxGradOptions, SolveReport, StopRule,
};
use crate::linalg::{relative_error, solve_square, svd, DenseMatrix, Vector};
use crate::operators::{gaussian_matrix, Composed, Identity, LinearOperator};

/// Orthonormal DCT-II analysis matrix `C`, so `Cx` are the coefficients.
pub fn dct_matrix(n: usize) -> DenseMatrix {
    let nf = n as f64;
    DenseMatrix::from_fn(n, n, |k, i| {
        let alpha = if k == 0 {
            (1.0 / nf).sqrt()
        } else {
            (2.0 / nf).sqrt()
        };
        alpha * (PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos()
    })
}

#[derive(Debug, Clone)]
enum DictKind {
    Dense(DenseMatrix),
    /// `x = vec(D_h S D_wᵀ)` with `s = vec(S)`, column-major.
    Separable {
        dh: DenseMatrix,
        dw: DenseMatrix,
    },
}

/// Synthesis dictionary `x = Ds`.
#[derive(Debug, Clone)]
pub struct Dictionary {
    kind: DictKind,
    orthonormal: bool,
}

impl Dictionary {
    /// Wraps a dense `n × k` matrix. With `orthonormal` set, `DᵀD = I` is
    /// checked to `1e-8`.
    pub fn dense(d: DenseMatrix, orthonormal: bool) -> Result<Self> {
        if orthonormal {
            let g = d.tr_mul(&d) - DenseMatrix::identity(d.ncols(), d.ncols());
            if g.amax() > 1e-8 {
                return Err(domain("dictionary columns are not orthonormal"));
            }
        }
        Ok(Self {
            kind: DictKind::Dense(d),
            orthonormal,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            kind: DictKind::Dense(DenseMatrix::identity(n, n)),
            orthonormal: true,
        }
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    /// Coefficients of `x`: `Dᵀx`, which inverts `D` when orthonormal.
    pub fn analyze(&self, x: &Vector) -> Vector {
        self.apply_adjoint(x)
    }

    pub fn synthesize(&self, s: &Vector) -> Vector {
        self.apply(s)
    }
}

impl LinearOperator for Dictionary {
    fn out_dim(&self) -> usize {
        match &self.kind {
            DictKind::Dense(d) => d.nrows(),
            DictKind::Separable { dh, dw } => dh.nrows() * dw.nrows(),
        }
    }
    fn in_dim(&self) -> usize {
        match &self.kind {
            DictKind::Dense(d) => d.ncols(),
            DictKind::Separable { dh, dw } => dh.ncols() * dw.ncols(),
        }
    }
    fn apply(&self, s: &Vector) -> Vector {
        match &self.kind {
            DictKind::Dense(d) => d * s,
            DictKind::Separable { dh, dw } => {
                let sm = DenseMatrix::from_column_slice(dh.ncols(), dw.ncols(), s.as_slice());
                let x = dh * sm * dw.transpose();
                Vector::from_column_slice(x.as_slice())
            }
        }
    }
    fn apply_adjoint(&self, x: &Vector) -> Vector {
        match &self.kind {
            DictKind::Dense(d) => d.tr_mul(x),
            DictKind::Separable { dh, dw } => {
                let xm = DenseMatrix::from_column_slice(dh.nrows(), dw.nrows(), x.as_slice());
                let s = dh.tr_mul(&xm) * dw;
                Vector::from_column_slice(s.as_slice())
            }
        }
    }
    fn as_dense(&self) -> Option<&DenseMatrix> {
        match &self.kind {
            DictKind::Dense(d) => Some(d),
            DictKind::Separable { .. } => None,
        }
    }
}

/// Orthonormal DCT-II basis of `ℝⁿ`, one basis vector per column.
pub fn dct_dictionary(n: usize) -> Result<Dictionary> {
    if n < 2 {
        return Err(domain("dictionary size must be at least 2"));
    }
    Ok(Dictionary {
        kind: DictKind::Dense(dct_matrix(n).transpose()),
        orthonormal: true,
    })
}

/// Separable 2D DCT basis for column-major `h × w` images, matrix-free.
pub fn dct2_dictionary(h: usize, w: usize) -> Result<Dictionary> {
    if h < 2 || w < 2 {
        return Err(domain("dictionary size must be at least 2"));
    }
    Ok(Dictionary {
        kind: DictKind::Separable {
            dh: dct_matrix(h).transpose(),
            dw: dct_matrix(w).transpose(),
        },
        orthonormal: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SparseSolver {
    Fista,
    /// ADMM with `ρ = 1`.
    Admm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub s: Vector,
    pub x: Vector,
    pub report: Option<SolveReport>,
}

/// `min ‖ADs − y‖² + λ²‖s‖₁`, returning `s` and `x = Ds`.
pub fn synthesis_solve<A: LinearOperator + ?Sized>(
    a: &A,
    y: &Vector,
    dict: &Dictionary,
    lambda: f64,
    solver: SparseSolver,
    stop: StopRule,
) -> Result<SynthesisResult> {
    if !(lambda > 0.0) {
        return Err(domain("lambda must be positive"));
    }
    check_dim(a.in_dim(), dict.out_dim())?;
    let report = match (a.as_dense(), dict.as_dense()) {
        (Some(ad), Some(dd)) => run_l1(&(ad * dd), y, lambda, solver, stop)?,
        _ => run_l1(&Composed::new(a, dict)?, y, lambda, solver, stop)?,
    };
    let x = dict.apply(&report.x);
    Ok(SynthesisResult {
        s: report.x.clone(),
        x,
        report: Some(report),
    })
}

fn run_l1<B: LinearOperator + ?Sized>(
    b: &B,
    y: &Vector,
    lambda: f64,
    solver: SparseSolver,
    stop: StopRule,
) -> Result<SolveReport> {
    match solver {
        SparseSolver::Fista => fista(b, y, lambda, stop),
        SparseSolver::Admm => {
            let id = Identity(b.in_dim());
            admm(b, y, lambda, 1.0, AdmmPenalty::L1(&id), stop)
        }
    }
}

/// `min ‖ADs − y‖² + λ²‖s‖²` in the coefficient space, `x = Ds`.
pub fn projected_tikhonov(
    a: &DenseMatrix,
    y: &Vector,
    d: &DenseMatrix,
    lambda: f64,
) -> Result<SynthesisResult> {
    if !(lambda > 0.0) {
        return Err(domain("lambda must be positive"));
    }
    check_dim(a.ncols(), d.nrows())?;
    let s = tikhonov_classic(&(a * d), y, lambda)?;
    let x = d * &s;
    Ok(SynthesisResult { s, x, report: None })
}

/// Solves `min ‖AM⁻¹x̄ − y‖² + λ²‖x̄‖²` and returns `M⁻¹x̄`.
///
/// With `M = L` this is general-form Tikhonov with penalty `‖Lx‖²`. The
/// result is not invariant under rescaling `M` unless `λ` is rescaled too.
pub fn standard_form_transform(
    a: &DenseMatrix,
    y: &Vector,
    m: &DenseMatrix,
    lambda: f64,
) -> Result<Vector> {
    if m.nrows() != m.ncols() {
        return Err(domain("transform must be square"));
    }
    check_dim(a.ncols(), m.nrows())?;
    let sig = svd(m)?.sigmas;
    let smin = sig.last().copied().unwrap_or(0.0);
    if !(smin > 0.0 && sig[0] / smin <= 1e10) {
        return Err(Error::Singular);
    }
    let n = m.nrows();
    let mut minv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = Vector::zeros(n);
        e[j] = 1.0;
        minv.set_column(j, &solve_square(m, &e)?);
    }
    let xbar = tikhonov_classic(&(a * &minv), y, lambda)?;
    Ok(minv * xbar)
}

/// Continuation schedule approximating basis pursuit: `λ²` starts at half
/// of `2‖Bᵀy‖∞` (the value above which the solution is zero) and shrinks
/// geometrically to `final_ratio` of it, warm-starting each stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homotopy {
    pub stages: usize,
    pub iters_per_stage: usize,
    pub final_ratio: f64,
}

impl Default for Homotopy {
    fn default() -> Self {
        Self {
            stages: 12,
            iters_per_stage: 500,
            final_ratio: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CsMode {
    /// A single FISTA solve at this `λ`.
    Lambda(f64),
    BasisPursuit(Homotopy),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsMetrics {
    pub m: usize,
    /// `‖x̂ − x‖ / ‖x‖`.
    pub recovery_error: f64,
    /// F1 score of the recovered coefficient support.
    pub support_f1: f64,
    pub l1_mse: f64,
    /// MSE of the minimum-norm solution of `Φx = y`.
    pub pinv_mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsResult {
    pub x_hat: Vector,
    pub s_hat: Vector,
    pub x_pinv: Vector,
    pub metrics: CsMetrics,
}

/// F1 score between supports `{|aᵢ| > tol}` and `{|bᵢ| > tol}`.
pub fn support_f1(estimate: &Vector, truth: &Vector, tol: f64) -> f64 {
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (e, t) in estimate.iter().zip(truth.iter()) {
        match (e.abs() > tol, t.abs() > tol) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return if fp == 0 && fneg == 0 { 1.0 } else { 0.0 };
    }
    2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
}

/// ℓ₁ solve with the given mode on `B`, warm-started from zero.
pub fn l1_recover<B: LinearOperator + ?Sized>(b: &B, y: &Vector, mode: CsMode) -> Result<Vector> {
    match mode {
        CsMode::Lambda(lambda) => Ok(fista(b, y, lambda, StopRule::iters(2000).with_tol(1e-12))?.x),
        CsMode::BasisPursuit(h) => {
            if h.stages == 0 || !(h.final_ratio > 0.0 && h.final_ratio < 1.0) {
                return Err(domain("homotopy needs stages and a ratio in (0, 1)"));
            }
            let l2_max = 2.0 * b.apply_adjoint(y).amax();
            let mut s = Vector::zeros(b.in_dim());
            if l2_max == 0.0 {
                return Ok(s);
            }
            let start = 0.5_f64;
            let q = (h.final_ratio / start).powf(1.0 / h.stages.saturating_sub(1).max(1) as f64);
            let mut ratio = start;
            let s1 = crate::operators::spectral_norm_estimate(b, 300);
            let step = 1.0 / (2.0 * 1.02 * s1 * s1);
            for _ in 0..h.stages {
                let opts = ProxGradOptions {
                    momentum: true,
                    step: Some(step),
                    x0: Some(s),
                };
                let stop = StopRule::iters(h.iters_per_stage).with_tol(1e-14);
                s = proximal_gradient(b, y, (ratio * l2_max).sqrt(), &opts, stop)?.x;
                ratio *= q;
            }
            Ok(s)
        }
    }
}

/// Compressed-sensing experiment: draws `Φ` (`m × n`, entries `N(0, 1/m)`)
/// from `seed`, measures `y = Φx`, recovers `s` from `ΦD` and compares with
/// the minimum-norm solution. Support is measured on `Dᵀx` relative to
/// `1e-3·max|Dᵀx|`.
pub fn cs_recover(
    x_true: &Vector,
    dict: &Dictionary,
    m: usize,
    seed: u64,
    mode: CsMode,
) -> Result<CsResult> {
    let n = x_true.len();
    check_dim(dict.out_dim(), n)?;
    if m == 0 || m >= n {
        return Err(domain("need 0 < m < n measurements"));
    }
    let phi = gaussian_matrix(m, n, 1.0 / (m as f64).sqrt(), seed);
    let y = &phi * x_true;
    let s_hat = match dict.as_dense() {
        Some(d) => l1_recover(&(&phi * d), &y, mode)?,
        None => l1_recover(&Composed::new(&phi, dict)?, &y, mode)?,
    };
    let x_hat = dict.apply(&s_hat);
    let x_pinv = cgls(&phi, &y, StopRule::iters(4 * m).with_tol(1e-14))?.x;

    let s_true = dict.analyze(x_true);
    let tol = 1e-3 * s_true.amax();
    let metrics = CsMetrics {
        m,
        recovery_error: relative_error(&x_hat, x_true),
        support_f1: support_f1(&s_hat, &s_true, tol),
        l1_mse: crate::linalg::mse(x_hat.as_slice(), x_true.as_slice()),
        pinv_mse: crate::linalg::mse(x_pinv.as_slice(), x_true.as_slice()),
    };
    Ok(CsResult {
        x_hat,
        s_hat,
        x_pinv,
        metrics,
    })
}

/// Indices of the `k` largest-magnitude entries, ascending.
pub fn top_k_support(s: &Vector, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| s[b].abs().total_cmp(&s[a].abs()).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dct_is_orthonormal() {
        let c = dct_matrix(7);
        let g = &c * c.transpose() - DenseMatrix::identity(7, 7);
        assert!(g.amax() < 1e-12);
    }

    #[test]
    fn separable_matches_kronecker() {
        let d = dct2_dictionary(3, 4).unwrap();
        let dense = crate::operators::materialize(&d).unwrap();
        let kron = dct_matrix(4)
            .transpose()
            .kronecker(&dct_matrix(3).transpose());
        assert!((dense - kron).amax() < 1e-12);
    }

    #[test]
    fn f1_edge_cases() {
        let a = Vector::from_column_slice(&[1.0, 0.0, 2.0]);
        assert_eq!(support_f1(&a, &a, 1e-9), 1.0);
        let b = Vector::from_column_slice(&[1.0, 1.0, 0.0]);
        assert!((support_f1(&b, &a, 1e-9) - 0.5).abs() < 1e-15);
    }
}
