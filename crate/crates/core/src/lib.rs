//! Essential spectra of band-limited self-adjoint operators, estimated from
//! the eigenvalues of their finite compressions.
//!
//! The crate is organised bottom-up:
//!
//! - [`eigen`]: dense, banded and tridiagonal symmetric eigensolvers, Sturm
//!   counts, singular values and trace norms.
//! - [`operator`]: band-limited operator descriptions (Laurent/Toeplitz
//!   symbols, almost-Mathieu Hamiltonians, periodic Jacobi matrices) and the
//!   involutive permutation whose compressions misbehave.
//! - [`compression`]: filtrations, compressions `P_n A P_n`, degree, the
//!   diagonal norm bound and commutator/trace defects.
//! - [`spectral`]: empirical measures, eigenvalue ladders, counting
//!   functions, essential/transient classification and convergence checks.
//! - [`config`]: the declarative operator config format read by the CLI.
//! - [`report`]: CSV/JSON serialisation of reports.

pub mod compression;
pub mod config;
pub mod eigen;
mod error;
pub mod operator;
pub mod report;
pub mod spectral;

pub use compression::{CompressedMatrix, Filtration, Storage};
pub use eigen::{BandMatrix, DenseMatrix, EigenvalueList, TridiagonalForm};
pub use error::{Error, Result};
pub use operator::{IndexMode, Operator, OperatorSpec, PermutationOperator, PermutationSpec, SymbolSpec};
pub use spectral::{ClassificationReport, EigLadder, EmpiricalMeasure, Label, SpectrumEstimate, Thresholds};
