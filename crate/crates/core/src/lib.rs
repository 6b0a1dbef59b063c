//! Spectral toolkit for the Laplacian on `(-pi/2, pi/2)` with the nonlocal
//! coupling `psi(-pi/2) = psi(pi a/2) = psi(pi/2)`.

pub mod basis_diag;
pub mod eigensystem;
pub mod funcspace;
pub mod metric;
pub mod param;
pub mod resolvent;
pub mod simulator;
pub mod spectrum;
pub mod verify;

use thiserror::Error;

pub use basis_diag::{BasisError, ProjNormRecord};
pub use eigensystem::{BiorthPair, EigFun, EigenError};
pub use funcspace::{FuncError, Grid, GridFn, PiecewiseTrig, TrigTerm, C64};
pub use metric::{MetricError, MetricOp};
pub use param::{ParamA, ParamError};
pub use resolvent::{ResolventError, ResolventKernel};
pub use simulator::{SimConfig, SimError, SimReport};
pub use spectrum::{Class, EigCase, EigRecord, SpectrumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("param: {0}")]
    Param(#[from] ParamError),
    #[error("funcspace: {0}")]
    Func(#[from] FuncError),
    #[error("spectrum: {0}")]
    Spectrum(#[from] SpectrumError),
    #[error("eigensystem: {0}")]
    Eigen(#[from] EigenError),
    #[error("resolvent: {0}")]
    Resolvent(#[from] ResolventError),
    #[error("metric: {0}")]
    Metric(#[from] MetricError),
    #[error("basis: {0}")]
    Basis(#[from] BasisError),
    #[error("simulator: {0}")]
    Sim(#[from] SimError),
}
