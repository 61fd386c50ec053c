//! Truncated singular value decomposition by simultaneous subspace power
//! iteration, with PCA and linear-autoencoder applications on top.
//!
//! The solver forms the gain matrix `G = I + eta * (XᵀX)^q` once, then
//! alternates a block multiply with modified Gram-Schmidt
//! re-orthogonalization until the block stops moving. All or only the `r`
//! largest singular triplets can be requested, and the right singular
//! vectors double as the weight matrix of an identity-activation linear
//! autoencoder.
//!
//! ```
//! use psvd::{psvd, Matrix, PsvdConfig};
//!
//! let x = Matrix::from_rows(&[
//!     vec![1.0, 1.0, 1.0],
//!     vec![0.0, 2.0, 1.0],
//!     vec![1.0, 0.0, 1.0],
//! ])
//! .unwrap();
//! let res = psvd(&x, &PsvdConfig::new(3)).unwrap();
//! assert!((res.d.get(0) - 2.80193774).abs() < 1e-6);
//! assert!(res.report.converged);
//! ```
//!
//! An independent cyclic-Jacobi eigensolver ([`oracle`]) provides ground
//! truth for tests, [`analytics`] hosts PCA and the autoencoder view, and
//! [`io`] reads CSV/MatrixMarket files and writes result bundles.

pub mod analytics;
pub mod error;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use matrix::{modified_gram_schmidt, Matrix, Vector};
pub use solver::{psvd, PsvdConfig, RunReport, SvdResult};
