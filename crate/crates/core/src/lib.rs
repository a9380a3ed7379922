//! Condition numbers of a multiple eigenvalue of a generalized eigenproblem
//! `A x = lambda B x`.
//!
//! A multiple eigenvalue `lambda0` of multiplicity `r` splits into `r`
//! eigenvalues under a perturbation `(A + eps E, B + eps F)` with
//! `||E|| <= 1`, `||F|| <= tau`. The `r` condition numbers bound how far the
//! i-th most perturbed one can move, to first order. They depend only on the
//! singular values of `X1 Y1^H`, the outer product of the right and left
//! eigenvector blocks of `lambda0`.
//!
//! * [`linalg`] dense complex kernels (SVD, Hermitian and general
//!   eigensolvers, pencil eigenvalues, text I/O).
//! * [`pencil`] test-pair builders and eigenvector block extraction.
//! * [`condnum`] condition numbers, first-order eigenvalues and perturbations
//!   that attain the bounds.
//! * [`lab`] seeded random-perturbation experiments and table reports.

pub mod condnum;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod pencil;

pub use condnum::{ConditionNumbers, Regime, SigmaSpectrum};
pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use num_complex::Complex64;
pub use pencil::{EigenStructure, MatrixPair};
