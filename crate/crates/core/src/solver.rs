//! Truncated SVD by simultaneous subspace power iteration.
//!
//! The pipeline computes the `r` largest singular triplets of a dense real
//! matrix `X` by iterating on the gain matrix `G = I + eta * (XᵀX)^q`:
//! multiply a column-orthonormal block by `G`, re-orthogonalize with
//! modified Gram-Schmidt, and stop once an iteration no longer moves the
//! block. `G` shares eigenvectors with `XᵀX` while its spectrum is shifted
//! by one and steepened by the power `q`, which both keeps the iteration
//! full-rank (the smallest eigenvalue is 1 even for rank-deficient `X`)
//! and accelerates the separation of the dominant subspace.
//!
//! Eigenvalues are then read off the diagonal of `(XW)ᵀXW`, and the SVD
//! factors follow from the eigendecomposition bridge `W = V`,
//! `d_j = sqrt(lambda_j)`, `u_j = X w_j / d_j`.
//!
//! A classical one-vector power method with deflation is included as an
//! independent in-repo baseline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{modified_gram_schmidt, Matrix, Vector};

/// Solver settings for [`psvd`].
///
/// Defaults follow the reference setting `q = 2`, `eta = 1`, `eps = 1e-8`,
/// `itmax = 200`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsvdConfig {
    /// Number of singular triplets to compute (1 ..= n).
    pub rank: usize,
    /// Gram-matrix power `q`; allowed values are 1 through 4.
    pub power: usize,
    /// Positive gradient step `eta`.
    pub eta: f64,
    /// Convergence tolerance on the Frobenius norm of the iterate step.
    pub eps: f64,
    /// Maximum number of iterations.
    pub itmax: usize,
    /// Seed for the random initial subspace.
    pub seed: u64,
    /// Divide the matrix by its largest absolute entry before forming the
    /// gain matrix; singular values are scaled back on output.
    pub prescale: bool,
}

impl PsvdConfig {
    /// Settings for `rank` triplets with default solver parameters.
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            power: 2,
            eta: 1.0,
            eps: 1e-8,
            itmax: 200,
            seed: 42,
            prescale: false,
        }
    }

    pub fn with_power(mut self, q: usize) -> Self {
        self.power = q;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_itmax(mut self, itmax: usize) -> Self {
        self.itmax = itmax;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_prescale(mut self, prescale: bool) -> Self {
        self.prescale = prescale;
        self
    }

    /// Checks the settings against the column count of the target matrix.
    pub fn validate(&self, cols: usize) -> Result<()> {
        if self.rank == 0 || self.rank > cols {
            return Err(Error::Config {
                message: format!("rank must be in 1..={cols}, got {}", self.rank),
            });
        }
        if !(1..=4).contains(&self.power) {
            return Err(Error::Config {
                message: format!("power q must be in 1..=4, got {}", self.power),
            });
        }
        if !self.eta.is_finite() || self.eta <= 0.0 {
            return Err(Error::Config { message: format!("eta must be positive, got {}", self.eta) });
        }
        if !self.eps.is_finite() || self.eps <= 0.0 {
            return Err(Error::Config { message: format!("eps must be positive, got {}", self.eps) });
        }
        if self.itmax == 0 {
            return Err(Error::Config { message: "itmax must be at least 1".into() });
        }
        Ok(())
    }
}

/// Convergence metadata attached to every solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Iterations actually performed (at most `itmax`).
    pub iterations: usize,
    /// Frobenius norm of the final iterate step `‖W(t) − W(t−1)‖`.
    pub final_delta: f64,
    /// Whether `final_delta <= eps` was reached within `itmax`.
    pub converged: bool,
    /// Number of singular values above the zero threshold.
    pub numerical_rank: usize,
    /// Threshold below which a singular value is treated as zero.
    pub zero_threshold: f64,
}

/// Singular value decomposition `X = U diag(d) Wᵀ`.
///
/// `d` is sorted descending. Left singular vectors whose singular value
/// falls below the zero threshold are zero-filled rather than completed;
/// `report.numerical_rank` records the cutoff. Each `W` column is
/// sign-normalized so its largest-magnitude entry is positive, making
/// results comparable across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// Left singular vectors, `m x r`.
    pub u: Matrix,
    /// Singular values, length `r`, descending, nonnegative.
    pub d: Vector,
    /// Right singular vectors, `n x r`.
    pub w: Matrix,
    pub report: RunReport,
}

/// An eigenvalue together with its unit-norm eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Rayleigh quotient estimate; nonnegative for the positive
    /// semi-definite Gram matrices this crate feeds the power method.
    pub value: f64,
    pub vector: Vector,
}

/// Result of a classical power-method run.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerOutcome {
    pub pair: EigenPair,
    pub iterations: usize,
    pub converged: bool,
}

/// Random column-orthonormal `n x r` starting block.
///
/// Entries are drawn from a seeded standard normal and orthogonalized, so
/// the same seed always yields the same block.
pub fn initial_subspace(n: usize, r: usize, seed: u64) -> Result<Matrix> {
    if r == 0 || r > n {
        return Err(Error::Config { message: format!("rank must be in 1..={n}, got {r}") });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * r).map(|_| StandardNormal.sample(&mut rng)).collect();
    modified_gram_schmidt(&Matrix::new(n, r, data)?)
}

/// Forms the gain matrix `G = I + eta * (XᵀX)^q`.
///
/// With `prescale`, `X` is first divided by its largest absolute entry and
/// that scale is returned so callers can restore singular values
/// (`d = d_scaled * scale`); otherwise the returned scale is 1. An entry
/// overflowing to infinity is reported as an error suggesting prescale.
pub fn build_gain(x: &Matrix, eta: f64, q: usize, prescale: bool) -> Result<(Matrix, f64)> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::Config { message: format!("eta must be positive, got {eta}") });
    }
    if !(1..=4).contains(&q) {
        return Err(Error::Config { message: format!("power q must be in 1..=4, got {q}") });
    }
    let scale = if prescale {
        let m = x.max_abs();
        if m > 0.0 {
            m
        } else {
            1.0
        }
    } else {
        1.0
    };
    let xs = if scale != 1.0 { x.scale(1.0 / scale) } else { x.clone() };
    let powered = xs.gram_matrix().sym_matrix_power(q)?;
    let n = powered.rows();
    let mut g = powered.scale(eta);
    for i in 0..n {
        let v = g.get(i, i) + 1.0;
        g.set(i, i, v);
    }
    for (k, v) in g.data().iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Overflow {
                context: format!("forming the gain matrix (entry ({}, {}))", k / n, k % n),
            });
        }
    }
    Ok((g, scale))
}

/// Alternates `W <- orthogonalize(G W)` until the step norm
/// `‖W(t) − W(t−1)‖_F` drops to `eps` or `itmax` is reached.
///
/// `w0` must be column-orthonormal (run [`modified_gram_schmidt`] on a
/// random block first) and `g` square symmetric. Non-convergence is an
/// outcome, not an error: the report carries `converged = false`. A
/// Gram-Schmidt breakdown is surfaced with the iteration number; it should
/// be impossible because the gain matrix is full rank, so an occurrence
/// indicates a numeric failure.
pub fn subspace_iterate(
    g: &Matrix,
    w0: &Matrix,
    eps: f64,
    itmax: usize,
) -> Result<(Matrix, RunReport)> {
    if g.rows() != g.cols() {
        return Err(Error::Shape {
            context: format!("gain matrix must be square, got {}x{}", g.rows(), g.cols()),
        });
    }
    if g.cols() != w0.rows() {
        return Err(Error::Shape {
            context: format!(
                "gain matrix is {}x{} but the subspace block has {} rows",
                g.rows(),
                g.cols(),
                w0.rows()
            ),
        });
    }
    if itmax == 0 {
        return Err(Error::Config { message: "itmax must be at least 1".into() });
    }

    let mut w = w0.clone();
    let mut delta = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for t in 1..=itmax {
        let amplified = g.matmul(&w)?;
        // No relative residual cutoff here: the gain matrix spreads column
        // norms by its full spectrum, which would trip it spuriously. The
        // cutoff below only catches an exactly annihilated column.
        let next = crate::matrix::orthogonalize_with_drop_tol(&amplified, 1e-300).map_err(|e| match e {
            Error::RankDeficient { column } => Error::SubspaceBreakdown { iteration: t, column },
            other => other,
        })?;
        delta = next
            .data()
            .iter()
            .zip(w.data())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        w = next;
        iterations = t;
        if delta <= eps {
            converged = true;
            break;
        }
    }
    let report = RunReport {
        iterations,
        final_delta: delta,
        converged,
        numerical_rank: 0,
        zero_threshold: 0.0,
    };
    Ok((w, report))
}

/// Reads the eigenvalues of `XᵀX` off the diagonal of `(XW)ᵀXW` for a
/// converged column-orthonormal `W`.
///
/// Returns the diagonal sorted descending together with the permutation
/// applied; callers reorder the columns of `W` with the same permutation.
/// Tiny negative values (down to `-1e-10`) are clamped to zero; anything
/// more negative means the projection lost orthogonality and is an error.
pub fn recover_spectrum(x: &Matrix, w: &Matrix) -> Result<(Vector, Vec<usize>)> {
    let projected = x.matmul(w)?;
    let p = projected.gram_matrix();
    let r = p.rows();
    let mut raw = Vec::with_capacity(r);
    for (i, v) in p.diag().into_iter().enumerate() {
        if v < -1e-10 {
            return Err(Error::BrokenOrthogonality { index: i, value: v });
        }
        raw.push(v.max(0.0));
    }
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]).then(a.cmp(&b)));
    let lambdas = Vector::new(order.iter().map(|&i| raw[i]).collect())?;
    Ok((lambdas, order))
}

/// Builds the SVD factors from a converged right basis and its spectrum.
///
/// `lambdas` must be sorted descending with `w`'s columns already permuted
/// to match. Singular values are `scale * sqrt(lambda)`; each left vector
/// is `X w_j / d_j` for values above the zero threshold `1e-8 * d_1`
/// (absolute `1e-12` when `d_1 = 0`), and the remaining `U` columns are
/// zero-filled. Zero-filling keeps [`low_rank_approx`] exact because those
/// terms are multiplied by `d_j = 0`.
pub fn assemble_svd(
    x: &Matrix,
    w: Matrix,
    lambdas: Vector,
    scale: f64,
    mut report: RunReport,
) -> Result<SvdResult> {
    let r = lambdas.len();
    if w.cols() != r {
        return Err(Error::Shape {
            context: format!("{} eigenvalues for a basis with {} columns", r, w.cols()),
        });
    }
    if x.cols() != w.rows() {
        return Err(Error::Shape {
            context: format!("basis has {} rows but the matrix has {} columns", w.rows(), x.cols()),
        });
    }
    let mut w = w;
    w.normalize_column_signs();

    let d: Vec<f64> = lambdas.iter().map(|&l| scale * l.max(0.0).sqrt()).collect();
    let d1 = d[0];
    let zero_threshold = if d1 > 0.0 { 1e-8 * d1 } else { 1e-12 };
    let numerical_rank = d.iter().filter(|&&v| v > zero_threshold).count();

    let m = x.rows();
    let mut u = Matrix::zeros(m, r);
    for (j, &dj) in d.iter().enumerate().take(numerical_rank) {
        let wj = Vector::new(w.column(j))?;
        let xw = x.matvec(&wj)?;
        for i in 0..m {
            u.set(i, j, xw.get(i) / dj);
        }
    }

    report.numerical_rank = numerical_rank;
    report.zero_threshold = zero_threshold;
    Ok(SvdResult { u, d: Vector::new(d)?, w, report })
}

/// Full pipeline: seeded random init, gain matrix, subspace iteration,
/// spectrum recovery and SVD assembly.
///
/// If `X` has fewer rows than columns the decomposition is computed on the
/// transpose and the `U`/`W` factors are swapped, so `cfg.rank` is checked
/// against `min(m, n)`. Deterministic for fixed `(X, cfg)` including the
/// seed. Non-convergence is reported, not raised: the result then carries
/// `report.converged = false`.
pub fn psvd(x: &Matrix, cfg: &PsvdConfig) -> Result<SvdResult> {
    if x.rows() < x.cols() {
        let res = psvd(&x.transpose(), cfg)?;
        return Ok(SvdResult { u: res.w, d: res.d, w: res.u, report: res.report });
    }
    let n = x.cols();
    cfg.validate(n)?;
    let (gain, scale) = build_gain(x, cfg.eta, cfg.power, cfg.prescale)?;
    let w0 = initial_subspace(n, cfg.rank, cfg.seed)?;
    let (w, report) = subspace_iterate(&gain, &w0, cfg.eps, cfg.itmax)?;
    let scaled = if scale != 1.0 { x.scale(1.0 / scale) } else { x.clone() };
    let (lambdas, order) = recover_spectrum(&scaled, &w)?;
    let w = w.permute_columns(&order);
    assemble_svd(x, w, lambdas, scale, report)
}

/// Classical power method for the dominant eigenpair of a square matrix.
///
/// Iterates `z = A v`, `v = z / ‖z‖` until `‖v(t) − v(t−1)‖ <= eps`.
/// Hitting `itmax` is flagged on the outcome rather than raised; the
/// Rayleigh quotient and the last iterate are still returned.
pub fn classic_power_method(
    a: &Matrix,
    v0: &Vector,
    eps: f64,
    itmax: usize,
) -> Result<PowerOutcome> {
    if a.rows() != a.cols() {
        return Err(Error::Shape {
            context: format!("power method needs a square matrix, got {}x{}", a.rows(), a.cols()),
        });
    }
    if a.cols() != v0.len() {
        return Err(Error::Shape {
            context: format!("matrix is {}x{} but the start vector has length {}", a.rows(), a.cols(), v0.len()),
        });
    }
    let norm0 = v0.norm();
    if norm0 == 0.0 {
        return Err(Error::Config { message: "start vector must be nonzero".into() });
    }
    let mut v = v0.scale(1.0 / norm0);
    let mut iterations = 0;
    let mut converged = false;
    for t in 1..=itmax {
        let z = a.matvec(&v)?;
        let nz = z.norm();
        iterations = t;
        if nz == 0.0 {
            // v is annihilated by A; it is an exact eigenvector for 0.
            converged = true;
            break;
        }
        let next = z.scale(1.0 / nz);
        let delta = next
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        v = next;
        if delta <= eps {
            converged = true;
            break;
        }
    }
    let av = a.matvec(&v)?;
    let value = av.dot(&v)?;
    Ok(PowerOutcome { pair: EigenPair { value, vector: v }, iterations, converged })
}

/// Removes a found eigenpair: `S − lambda v vᵀ`, re-symmetrized.
pub fn deflate(s: &Matrix, pair: &EigenPair) -> Result<Matrix> {
    if s.rows() != s.cols() {
        return Err(Error::Shape {
            context: format!("deflation needs a square matrix, got {}x{}", s.rows(), s.cols()),
        });
    }
    if s.rows() != pair.vector.len() {
        return Err(Error::Shape {
            context: format!("matrix is {}x{} but the eigenvector has length {}", s.rows(), s.cols(), pair.vector.len()),
        });
    }
    let n = s.rows();
    let v = pair.vector.as_slice();
    let mut out = s.clone();
    for i in 0..n {
        for j in 0..n {
            let val = out.get(i, j) - pair.value * v[i] * v[j];
            out.set(i, j, val);
        }
    }
    Ok(out.symmetrized())
}

/// Reconstruction cost `½ ‖X − X W Wᵀ‖_F²` for any weight block `W`.
///
/// No orthonormality is required; this is the quantity the unconstrained
/// autoencoder trainer descends on. See [`objective`] for the checked
/// variant.
pub fn reconstruction_cost(x: &Matrix, w: &Matrix) -> Result<f64> {
    if x.cols() != w.rows() {
        return Err(Error::Shape {
            context: format!("matrix has {} columns but the basis has {} rows", x.cols(), w.rows()),
        });
    }
    let xw = x.matmul(w)?;
    let recon = xw.matmul(&w.transpose())?;
    Ok(0.5 * x.sub(&recon)?.frobenius_norm_sq())
}

/// The projection objective `J(W) = ½ ‖X − X W Wᵀ‖_F²`.
///
/// `W` must be column-orthonormal to `1e-8`; its global minimum over full
/// bases is zero, and at the top-`r` right-singular basis it equals half
/// the sum of the left-out eigenvalues of `XᵀX`.
pub fn objective(x: &Matrix, w: &Matrix) -> Result<f64> {
    let dev = orthonormality_deviation(w)?;
    if dev > 1e-8 {
        return Err(Error::NotOrthonormal { max_deviation: dev });
    }
    reconstruction_cost(x, w)
}

/// Gradient of the projection objective on the orthonormality manifold,
/// `−(XᵀX) W`.
pub fn objective_gradient(x: &Matrix, w: &Matrix) -> Result<Matrix> {
    Ok(x.gram_matrix().matmul(w)?.scale(-1.0))
}

/// Largest absolute deviation of `WᵀW` from the identity.
pub(crate) fn orthonormality_deviation(w: &Matrix) -> Result<f64> {
    let wtw = w.transpose().matmul(w)?;
    let r = wtw.rows();
    let mut dev = 0.0f64;
    for i in 0..r {
        for j in 0..r {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((wtw.get(i, j) - target).abs());
        }
    }
    Ok(dev)
}

/// Percentage of the singular-value mass captured by the `r` leading
/// values: `100 * (Σ_{j<=r} d_j / Σ_j d_j)`.
pub fn reconstruction_rate(d: &Vector, r: usize) -> Result<f64> {
    if r == 0 || r > d.len() {
        return Err(Error::Config {
            message: format!("rank must be in 1..={}, got {}", d.len(), r),
        });
    }
    let total: f64 = d.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let head: f64 = d.iter().take(r).sum();
    Ok(100.0 * head / total)
}

/// Truncated rank-one expansion `X_r = Σ_{j<=r} d_j u_j w_jᵀ`.
///
/// The leftover squared error is `Σ_{j>r} d_j²`.
pub fn low_rank_approx(res: &SvdResult, r: usize) -> Result<Matrix> {
    if r > res.d.len() {
        return Err(Error::Config {
            message: format!("rank {} exceeds the {} stored triplets", r, res.d.len()),
        });
    }
    let (m, n) = (res.u.rows(), res.w.rows());
    let mut out = Matrix::zeros(m, n);
    for j in 0..r {
        let dj = res.d.get(j);
        if dj == 0.0 {
            continue;
        }
        for i in 0..m {
            let scaled = dj * res.u.get(i, j);
            for k in 0..n {
                let val = out.get(i, k) + scaled * res.w.get(k, j);
                out.set(i, k, val);
            }
        }
    }
    Ok(out)
}
