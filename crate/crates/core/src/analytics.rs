//! Principal component analysis and the identity-activation linear
//! autoencoder, both built on the subspace solver.
//!
//! PCA preprocesses the data (centering, or standardization for
//! correlation mode), decomposes the preprocessed matrix and rescales the
//! spectrum to variance units. The covariance estimate divides by `m`
//! while the per-column sample variance divides by `m − 1`; the mixed
//! convention is deliberate and mirrored in the trace identity tested
//! below.
//!
//! The autoencoder view: an identity-activation encoder/decoder pair with
//! tied weights reconstructs `x` as `W Wᵀ x`, and the optimal weight
//! subspace is exactly the top right-singular subspace. A plain
//! unconstrained gradient trainer is included as a contrast baseline —
//! it reaches the same subspace but not the singular vectors themselves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Vector};
use crate::solver::{psvd, reconstruction_cost, PsvdConfig, RunReport, SvdResult};

/// Which scale the decomposition runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcaMode {
    /// Center columns; eigenvalues are covariance-matrix eigenvalues.
    Covariance,
    /// Center and divide by the sample standard deviation; eigenvalues are
    /// correlation-matrix eigenvalues.
    Correlation,
}

/// Output of [`pca`].
#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    /// Variances along the principal axes (`d_j² / m`), descending.
    pub eigenvalues: Vector,
    /// Principal directions (right singular vectors of the preprocessed
    /// matrix), `n x r`.
    pub axes: Matrix,
    /// Observation coordinates in the axis basis, `m x r`.
    pub scores: Matrix,
    /// Attribute coordinates `XᵀX V_r Λ_r^(−1/2)`; columns for zero
    /// eigenvalues are dropped, and `None` if every eigenvalue is zero.
    pub attribute_coords: Option<Matrix>,
    /// Percent of total variance per component.
    pub explained: Vector,
    pub mode: PcaMode,
    /// Column means of the raw input.
    pub column_means: Vector,
    /// Column sample standard deviations (all ones in covariance mode).
    pub column_sds: Vector,
    /// Convergence report of the underlying solver run.
    pub report: RunReport,
}

/// Subtracts each column's mean. Requires at least two rows.
pub fn center(x: &Matrix) -> Result<(Matrix, Vector)> {
    let (m, n) = (x.rows(), x.cols());
    if m < 2 {
        return Err(Error::Config { message: format!("centering needs at least 2 rows, got {m}") });
    }
    let means: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| x.get(i, j)).sum::<f64>() / m as f64)
        .collect();
    let mut centered = x.clone();
    for i in 0..m {
        for (j, &mean) in means.iter().enumerate() {
            centered.set(i, j, x.get(i, j) - mean);
        }
    }
    Ok((centered, Vector::new(means)?))
}

/// Centers and divides each column by its sample standard deviation
/// (divisor `m − 1`).
///
/// A column whose deviation is numerically zero cannot be standardized
/// and is reported by index.
pub fn standardize(x: &Matrix) -> Result<(Matrix, Vector, Vector)> {
    let (centered, means) = center(x)?;
    let (m, n) = (x.rows(), x.cols());
    let mut sds = Vec::with_capacity(n);
    for j in 0..n {
        let ss: f64 = (0..m).map(|i| centered.get(i, j).powi(2)).sum();
        let sd = (ss / (m as f64 - 1.0)).sqrt();
        let col_scale: f64 = (0..m).map(|i| x.get(i, j).abs()).fold(0.0, f64::max);
        if sd <= 1e-12 * col_scale.max(1.0) {
            return Err(Error::DegenerateColumn { column: j });
        }
        sds.push(sd);
    }
    let mut standardized = centered;
    for i in 0..m {
        for (j, &sd) in sds.iter().enumerate() {
            standardized.set(i, j, standardized.get(i, j) / sd);
        }
    }
    Ok((standardized, means, Vector::new(sds)?))
}

/// Principal component analysis of the `r` leading components.
///
/// Eigenvalues are `d_j²/m` of the preprocessed matrix. Scores are the
/// preprocessed observations projected on the axes. The explained share
/// uses the total variance `‖X_pre‖_F²/m`, so a full-rank run sums to 100.
pub fn pca(x: &Matrix, r: usize, mode: PcaMode, cfg: &PsvdConfig) -> Result<PcaResult> {
    let n = x.cols();
    if r == 0 || r > n {
        return Err(Error::Config { message: format!("components must be in 1..={n}, got {r}") });
    }
    let (pre, means, sds) = match mode {
        PcaMode::Covariance => {
            let (c, means) = center(x)?;
            (c, means, Vector::new(vec![1.0; n])?)
        }
        PcaMode::Correlation => standardize(x)?,
    };

    let mut solver_cfg = cfg.clone();
    solver_cfg.rank = r;
    let res = psvd(&pre, &solver_cfg)?;

    let m = x.rows() as f64;
    let eigenvalues = Vector::new(res.d.iter().map(|d| d * d / m).collect())?;
    let axes = res.w.clone();
    let scores = pre.matmul(&axes)?;

    let k = res.report.numerical_rank.min(r);
    let attribute_coords = if k == 0 {
        None
    } else {
        // S V_r Λ^(−1/2) column by column: S w_j / d_j.
        let s = pre.gram_matrix();
        let mut coords = Matrix::zeros(n, k);
        for j in 0..k {
            let wj = Vector::new(axes.column(j))?;
            let svj = s.matvec(&wj)?;
            for i in 0..n {
                coords.set(i, j, svj.get(i) / res.d.get(j));
            }
        }
        Some(coords)
    };

    let total = pre.frobenius_norm_sq() / m;
    let explained = Vector::new(
        eigenvalues
            .iter()
            .map(|&l| if total > 0.0 { 100.0 * l / total } else { 0.0 })
            .collect(),
    )?;

    Ok(PcaResult {
        eigenvalues,
        axes,
        scores,
        attribute_coords,
        explained,
        mode,
        column_means: means,
        column_sds: sds,
        report: res.report,
    })
}

/// Identity-activation autoencoder with tied weights: encoding is `Wᵀx`,
/// decoding is `Wv`, reconstruction is `W Wᵀ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearAutoencoder {
    /// Encoder weight matrix, `n x r`; the decoder is its transpose.
    pub weights: Matrix,
}

/// Encodes an observation into the `r`-dimensional code `xᵀW`.
pub fn encode(x: &Vector, ae: &LinearAutoencoder) -> Result<Vector> {
    ae.weights.transpose().matvec(x)
}

/// Decodes a code back to attribute space, `v ↦ Wv`.
///
/// For orthonormal weights, `decode(encode(x))` is the orthogonal
/// projection of `x` onto the weight span.
pub fn decode(v: &Vector, ae: &LinearAutoencoder) -> Result<Vector> {
    ae.weights.matvec(v)
}

/// Takes the first `r` right singular vectors as autoencoder weights —
/// the global minimizer of the reconstruction objective at rank `r`.
pub fn ae_from_svd(res: &SvdResult, r: usize) -> Result<LinearAutoencoder> {
    if r > res.w.cols() {
        return Err(Error::Config {
            message: format!("rank {} exceeds the {} stored singular vectors", r, res.w.cols()),
        });
    }
    Ok(LinearAutoencoder { weights: res.w.take_columns(r)? })
}

/// Plain unconstrained gradient descent on `½‖X − XWWᵀ‖_F²`, without any
/// orthogonalization.
///
/// Contrast baseline only: the trained columns span the right subspace
/// but are generally not orthonormal and not the singular vectors. The
/// objective is monitored each epoch; ten consecutive increases abort
/// with a divergence error suggesting a smaller step.
pub fn train_linear_ae(
    x: &Matrix,
    r: usize,
    step: f64,
    epochs: usize,
    seed: u64,
) -> Result<LinearAutoencoder> {
    let n = x.cols();
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::Config { message: format!("step must be positive, got {step}") });
    }
    if r == 0 || r > n {
        return Err(Error::Config { message: format!("rank must be in 1..={n}, got {r}") });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * r).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut w = Matrix::new(n, r, data)?;

    let s = x.gram_matrix();
    let mut prev = reconstruction_cost(x, &w)?;
    let mut rising = 0usize;
    for epoch in 1..=epochs {
        // Full gradient of the unconstrained objective:
        // −2SW + SW(WᵀW) + W(WᵀSW).
        let sw = s.matmul(&w)?;
        let wtw = w.transpose().matmul(&w)?;
        let wtsw = w.transpose().matmul(&sw)?;
        let grad = sw
            .scale(-2.0)
            .add(&sw.matmul(&wtw)?)?
            .add(&w.matmul(&wtsw)?)?;
        w = w.sub(&grad.scale(step))?;

        let cost = match reconstruction_cost(x, &w) {
            Ok(c) if c.is_finite() => c,
            _ => return Err(Error::Diverged { epoch }),
        };
        if cost > prev {
            rising += 1;
            if rising >= 10 {
                return Err(Error::Diverged { epoch });
            }
        } else {
            rising = 0;
        }
        prev = cost;
    }
    Ok(LinearAutoencoder { weights: w })
}
