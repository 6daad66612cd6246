//! Numerical core for the floating entanglement witness (FEW) measure.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs plus an explicit seed, so results replay exactly.
//! IO, file formats and the command line live in the `few` crate.
//!
//! Layout:
//! - [`qops`]: small dense complex matrices, Kronecker products and the
//!   traceless Hermitian generator bases (Pauli, Gell-Mann, generalized su(d)).
//! - [`states`]: density matrices, product-state parameterization and the
//!   named state families.
//! - [`witness`]: traceless observables, witness extraction and verification.
//! - [`innermin`]: minimum of `Tr(Z rho_s)` over pure product states.
//! - [`ga`]: binary-chromosome genetic search over observables.
//! - [`measure`]: the measure itself plus property-check helpers.
#![no_std]

extern crate alloc;

pub mod error;
pub mod ga;
pub mod innermin;
pub mod measure;
pub mod par;
pub mod qn;
pub mod qops;
pub mod seed;
pub mod states;
pub mod witness;

pub use error::{FewError, Result};
pub use ga::{Chromosome, GaConfig, GaTrace};
pub use innermin::{InnerMinConfig, InnerMinResult};
pub use measure::{compute_few_measure, MeasureOptions, MeasureResult, Verdict};
pub use par::{ParallelMap, Sequential};
pub use qops::{CMatrix, GeneratorBasis, ProductBasis};
pub use states::{DensityMatrix, ProductStateParams};
pub use witness::{CoefficientTensor, TracelessObservable, VerificationReport, Witness};

pub use num_complex::Complex64 as C64;
