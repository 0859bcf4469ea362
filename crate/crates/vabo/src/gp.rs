//! Gaussian-process regression with an anisotropic RBF kernel.
//!
//! One process models one scalar black-box output. The objective and each
//! constraint get independent processes. A fitted process is an immutable
//! value: fitting returns a new instance, queries never mutate, so fitted
//! processes can be shared freely across threads.
//!
//! ```
//! use vabo::{GaussianProcess, RbfKernel};
//!
//! let kernel = RbfKernel::new(1.0, vec![0.5]).unwrap();
//! let gp = GaussianProcess::new(kernel, 0.0, 1e-6).unwrap();
//! let gp = gp.fit(&[(vec![0.0].into(), 1.0), (vec![1.0].into(), -1.0)]).unwrap();
//! let (mean, sd) = gp.posterior(&vec![0.5].into()).unwrap();
//! assert!(mean.abs() < 0.1 && sd > 0.0);
//! ```

use crate::domain::ParameterPoint;
use crate::linalg;
use thiserror::Error;

/// Jitter ladder applied to the Gram diagonal, as multiples of the signal
/// variance. The exact matrix is tried first; degenerate cases (for example
/// duplicated points with zero noise) succeed after escalation, at the price
/// of correspondingly inflated posterior variance.
const JITTER_LADDER: [f64; 8] = [0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2];

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Error)]
pub enum GpError {
    #[error("point dimension {got} does not match kernel dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("cannot fit a Gaussian process on empty data")]
    EmptyData,
    #[error("Gaussian process is not fitted")]
    NotFitted,
    #[error(
        "Gram matrix is not positive definite even with jitter {jitter:.3e} on the diagonal"
    )]
    NotPositiveDefinite { jitter: f64 },
    #[error("operation needs at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

/// Squared-exponential kernel with one lengthscale per input dimension:
/// k(a, b) = signal_variance * exp(-1/2 * sum_d ((a_d - b_d) / l_d)^2).
#[derive(Debug, Clone, PartialEq)]
pub struct RbfKernel {
    signal_variance: f64,
    lengthscales: Vec<f64>,
}

impl RbfKernel {
    pub fn new(signal_variance: f64, lengthscales: Vec<f64>) -> Result<Self, GpError> {
        if !(signal_variance > 0.0) || !signal_variance.is_finite() {
            return Err(GpError::InvalidHyperparameter(format!(
                "signal variance must be positive and finite, got {signal_variance}"
            )));
        }
        if lengthscales.is_empty() {
            return Err(GpError::InvalidHyperparameter(
                "kernel needs at least one lengthscale".into(),
            ));
        }
        if let Some(l) = lengthscales.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(GpError::InvalidHyperparameter(format!(
                "lengthscales must be positive and finite, got {l}"
            )));
        }
        Ok(RbfKernel { signal_variance, lengthscales })
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn input_dim(&self) -> usize {
        self.lengthscales.len()
    }

    /// Kernel value between two points.
    pub fn eval(&self, a: &ParameterPoint, b: &ParameterPoint) -> Result<f64, GpError> {
        if a.dim() != self.input_dim() {
            return Err(GpError::DimensionMismatch { expected: self.input_dim(), got: a.dim() });
        }
        if b.dim() != self.input_dim() {
            return Err(GpError::DimensionMismatch { expected: self.input_dim(), got: b.dim() });
        }
        Ok(self.eval_unchecked(a, b))
    }

    #[inline]
    fn eval_unchecked(&self, a: &ParameterPoint, b: &ParameterPoint) -> f64 {
        let mut sum = 0.0;
        for ((&x, &y), &l) in a.iter().zip(b.iter()).zip(&self.lengthscales) {
            let d = (x - y) / l;
            sum += d * d;
        }
        self.signal_variance * (-0.5 * sum).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Fitted {
    data: Vec<(ParameterPoint, f64)>,
    /// Targets with the prior mean subtracted, in data order.
    centered: Vec<f64>,
    /// Lower-triangular factor of K + (noise_variance + jitter) I.
    cholesky: Vec<f64>,
    /// (K + (noise_variance + jitter) I)^-1 centered, cached for O(n) means.
    alpha: Vec<f64>,
    jitter: f64,
}

/// Gaussian-process posterior over one scalar function.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProcess {
    kernel: RbfKernel,
    prior_mean: f64,
    noise_variance: f64,
    fitted: Option<Fitted>,
}

impl GaussianProcess {
    pub fn new(kernel: RbfKernel, prior_mean: f64, noise_variance: f64) -> Result<Self, GpError> {
        if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
            return Err(GpError::InvalidHyperparameter(format!(
                "noise variance must be nonnegative and finite, got {noise_variance}"
            )));
        }
        if !prior_mean.is_finite() {
            return Err(GpError::InvalidHyperparameter(format!(
                "prior mean must be finite, got {prior_mean}"
            )));
        }
        Ok(GaussianProcess { kernel, prior_mean, noise_variance, fitted: None })
    }

    pub fn kernel(&self) -> &RbfKernel {
        &self.kernel
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    pub fn n_observations(&self) -> usize {
        self.fitted.as_ref().map_or(0, |f| f.data.len())
    }

    pub fn data(&self) -> Option<&[(ParameterPoint, f64)]> {
        self.fitted.as_ref().map(|f| f.data.as_slice())
    }

    /// Lower-triangular factor of the regularized Gram matrix, row-major.
    pub fn cholesky_factor(&self) -> Option<&[f64]> {
        self.fitted.as_ref().map(|f| f.cholesky.as_slice())
    }

    /// Jitter that was actually needed on the Gram diagonal.
    pub fn jitter(&self) -> Option<f64> {
        self.fitted.as_ref().map(|f| f.jitter)
    }

    /// Conditions the process on `data`, returning a new fitted process.
    /// Deterministic for identical input order.
    pub fn fit(&self, data: &[(ParameterPoint, f64)]) -> Result<GaussianProcess, GpError> {
        if data.is_empty() {
            return Err(GpError::EmptyData);
        }
        for (p, _) in data {
            if p.dim() != self.kernel.input_dim() {
                return Err(GpError::DimensionMismatch {
                    expected: self.kernel.input_dim(),
                    got: p.dim(),
                });
            }
        }
        let centered: Vec<f64> = data.iter().map(|(_, y)| y - self.prior_mean).collect();
        let points: Vec<&ParameterPoint> = data.iter().map(|(p, _)| p).collect();
        let (cholesky, jitter) = factorize(&self.kernel, self.noise_variance, &points)?;
        let n = data.len();
        let alpha = linalg::solve_cholesky(&cholesky, n, &centered);
        Ok(GaussianProcess {
            kernel: self.kernel.clone(),
            prior_mean: self.prior_mean,
            noise_variance: self.noise_variance,
            fitted: Some(Fitted { data: data.to_vec(), centered, cholesky, alpha, jitter }),
        })
    }

    /// Posterior mean and standard deviation at a query point. The variance
    /// is clamped at zero before the square root.
    pub fn posterior(&self, query: &ParameterPoint) -> Result<(f64, f64), GpError> {
        let fitted = self.fitted.as_ref().ok_or(GpError::NotFitted)?;
        if query.dim() != self.kernel.input_dim() {
            return Err(GpError::DimensionMismatch {
                expected: self.kernel.input_dim(),
                got: query.dim(),
            });
        }
        let n = fitted.data.len();
        let k: Vec<f64> =
            fitted.data.iter().map(|(p, _)| self.kernel.eval_unchecked(query, p)).collect();
        let mut mean = self.prior_mean;
        for (ki, ai) in k.iter().zip(&fitted.alpha) {
            mean += ki * ai;
        }
        let v = linalg::solve_lower(&fitted.cholesky, n, &k);
        let explained: f64 = v.iter().map(|x| x * x).sum();
        let variance = (self.kernel.signal_variance - explained).max(0.0);
        Ok((mean, variance.sqrt()))
    }

    /// Log marginal likelihood of the training data under the current
    /// hyperparameters.
    pub fn log_marginal_likelihood(&self) -> Result<f64, GpError> {
        let fitted = self.fitted.as_ref().ok_or(GpError::NotFitted)?;
        Ok(lml_from_parts(&fitted.centered, &fitted.alpha, &fitted.cholesky))
    }

    /// Maximizes the log marginal likelihood over (signal variance,
    /// lengthscales) with a bounded log-space sweep refined by coordinate
    /// descent, then refits. Returns a process whose likelihood is never
    /// below the input's; on numerical failure the input hyperparameters are
    /// kept.
    pub fn fit_hyperparameters(&self) -> Result<GaussianProcess, GpError> {
        let fitted = self.fitted.as_ref().ok_or(GpError::NotFitted)?;
        let n = fitted.data.len();
        if n < 3 {
            return Err(GpError::InsufficientData { needed: 3, got: n });
        }
        let dim = self.kernel.input_dim();
        let points: Vec<&ParameterPoint> = fitted.data.iter().map(|(p, _)| p).collect();
        let centered = &fitted.centered;

        let baseline = self.log_marginal_likelihood()?;

        // Bounds: signal variance around the mean square of the centered
        // targets, lengthscales around the per-dimension data spread.
        let msq = centered.iter().map(|y| y * y).sum::<f64>() / n as f64;
        let s0 = msq.max(1e-12);
        let sv_bounds = (s0 * 1e-3, s0 * 1e3);
        let ls_bounds: Vec<Option<(f64, f64)>> = (0..dim)
            .map(|d| {
                let lo = points.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
                let hi = points.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max);
                let span = hi - lo;
                if span > 0.0 {
                    Some((0.02 * span, 2.0 * span))
                } else {
                    None // no spread in this dimension: leave its lengthscale alone
                }
            })
            .collect();

        let clamp = |x: f64, (lo, hi): (f64, f64)| x.clamp(lo, hi);
        let mut sv = clamp(self.kernel.signal_variance, sv_bounds);
        let mut ls = self.kernel.lengthscales.to_vec();
        for (l, b) in ls.iter_mut().zip(&ls_bounds) {
            if let Some(b) = *b {
                *l = clamp(*l, b);
            }
        }

        let eval = |sv: f64, ls: &[f64]| -> Option<f64> {
            let kernel = RbfKernel::new(sv, ls.to_vec()).ok()?;
            let (chol, _) = factorize(&kernel, self.noise_variance, &points).ok()?;
            let alpha = linalg::solve_cholesky(&chol, n, centered);
            let lml = lml_from_parts(centered, &alpha, &chol);
            lml.is_finite().then_some(lml)
        };

        let mut best = match eval(sv, &ls) {
            Some(l) => l,
            None => return Ok(self.clone()),
        };

        // Coordinate descent over log-space candidate grids; each pass
        // narrows the scan window around the incumbent.
        let mut width = 1.0f64; // fraction of the full log-range scanned
        for _pass in 0..6 {
            let mut improved = false;
            for axis in 0..=dim {
                let bounds = if axis == 0 {
                    sv_bounds
                } else {
                    match ls_bounds[axis - 1] {
                        Some(b) => b,
                        None => continue,
                    }
                };
                let current = if axis == 0 { sv } else { ls[axis - 1] };
                let (lo, hi) = (bounds.0.ln(), bounds.1.ln());
                let half = 0.5 * (hi - lo) * width;
                let center = current.ln().clamp(lo, hi);
                let (scan_lo, scan_hi) = ((center - half).max(lo), (center + half).min(hi));
                for i in 0..9 {
                    let cand =
                        (scan_lo + (scan_hi - scan_lo) * i as f64 / 8.0).exp();
                    let lml = if axis == 0 {
                        eval(cand, &ls)
                    } else {
                        let mut trial = ls.clone();
                        trial[axis - 1] = cand;
                        eval(sv, &trial)
                    };
                    if let Some(lml) = lml {
                        if lml > best + 1e-12 {
                            best = lml;
                            improved = true;
                            if axis == 0 {
                                sv = cand;
                            } else {
                                ls[axis - 1] = cand;
                            }
                        }
                    }
                }
            }
            width *= 0.4;
            if !improved && _pass > 0 {
                break;
            }
        }

        if best <= baseline {
            return Ok(self.clone());
        }
        let kernel = RbfKernel::new(sv, ls)?;
        let refreshed = GaussianProcess::new(kernel, self.prior_mean, self.noise_variance)?;
        match refreshed.fit(&fitted.data) {
            Ok(gp) => Ok(gp),
            Err(_) => Ok(self.clone()),
        }
    }
}

fn factorize(
    kernel: &RbfKernel,
    noise_variance: f64,
    points: &[&ParameterPoint],
) -> Result<(Vec<f64>, f64), GpError> {
    let n = points.len();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = kernel.eval_unchecked(points[i], points[j]);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    let mut last_jitter = 0.0;
    for &mult in &JITTER_LADDER {
        let jitter = mult * kernel.signal_variance;
        last_jitter = jitter;
        let mut regularized = gram.clone();
        for i in 0..n {
            regularized[i * n + i] += noise_variance + jitter;
        }
        if let Some(l) = linalg::cholesky(&regularized, n) {
            return Ok((l, jitter));
        }
    }
    Err(GpError::NotPositiveDefinite { jitter: last_jitter })
}

fn lml_from_parts(centered: &[f64], alpha: &[f64], cholesky: &[f64]) -> f64 {
    let n = centered.len();
    let fit_term: f64 = centered.iter().zip(alpha).map(|(y, a)| y * a).sum();
    let log_det: f64 = (0..n).map(|i| cholesky[i * n + i].ln()).sum();
    -0.5 * fit_term - log_det - 0.5 * n as f64 * LN_2PI
}
