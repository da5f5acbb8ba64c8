//! Fixtures shared by the benchmarks.

use hadapow_core::families::default_x;
use hadapow_core::{FamilySpec, Param, SymMatrix};

/// `A_{4,1,1e-7}`, the matrix behind the determinant curve.
pub fn curve_spec() -> FamilySpec {
    FamilySpec::perturbed_poly_gram(default_x(4), 1, Param::parse("1e-7").expect("literal"))
}

/// `A_n` with the default nodes.
pub fn poly_gram(n: usize) -> SymMatrix {
    FamilySpec::poly_gram(default_x(n)).build().expect("valid family")
}

/// `[cos((i-j)π/n)]`
pub fn cosine(n: usize) -> SymMatrix {
    FamilySpec::cos_toeplitz(n).build().expect("valid family")
}
