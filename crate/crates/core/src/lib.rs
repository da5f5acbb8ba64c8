//! Fractional Hadamard (entrywise) powers of positive semi-definite matrices.
//!
//! The crate builds the matrix families `[1 + x_i x_j]`, their diagonal
//! perturbations, and the cosine Toeplitz matrices `[cos((i-j)π/n)]`; it
//! computes entrywise powers `A^∘α`, classifies them as PSD with an
//! extended-precision referee for the cases binary64 cannot decide, and maps
//! out the set of exponents `{α ≥ 0 : A^∘α is PSD}` as a list of isolated
//! points, bounded intervals and a final ray.
//!
//! Module map:
//!
//! * [`matrix`] – [`SymMatrix`], [`Alpha`], entrywise powers, the text file format.
//! * [`spectra`] – Jacobi eigenvalues, pivoted LDLᵀ determinants, [`classify_psd`].
//! * [`families`] – [`FamilySpec`] and the constructors.
//! * [`oracle`] – the extended-precision referee.
//! * [`scan`] – curve sampling, root isolation and component assembly.
//! * [`verify`] – the structural verification drivers.
//! * [`exppoly`] – principal minors as exponential polynomials in α.

pub mod error;
pub mod exppoly;
pub mod families;
pub mod matrix;
pub mod oracle;
pub mod scan;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use exppoly::ExpPoly;
pub use families::{FamilyKind, FamilySpec, Param};
pub use matrix::{Alpha, SymMatrix};
pub use oracle::{HpSign, HpVerdict, DEFAULT_DIGITS};
pub use scan::{AlphaComponent, ComponentKind, CurveSample, EndpointCertainty, ScanConfig, SsetReport};
pub use spectra::{classify_psd, PsdClass, PsdVerdict, Precision, Spectrum};
