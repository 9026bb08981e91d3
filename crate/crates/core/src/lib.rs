//! Numerical toolkit for bipartite entanglement and identical-particle correlations.
//!
//! The library is generic over the floating point scalar ([`Real`], implemented
//! for `f32` and `f64`); every generic type defaults to `f64`, and `f32`
//! aliases are exported below.

pub mod distill;
pub mod error;
pub mod fermion;
pub mod io;
pub mod linalg;
pub mod product_search;
pub mod rng;
pub mod scalar;
pub mod separability;
pub mod state;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use scalar::Real;
pub use state::{DensityMatrix, ProductVector, PureState, Side};

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type CMatrixF32 = CMatrix<f32>;
pub type DensityMatrixF32 = DensityMatrix<f32>;
pub type PureStateF32 = PureState<f32>;
pub type ProductVectorF32 = ProductVector<f32>;
pub type FermionStateF32 = fermion::FermionState<f32>;
pub type WitnessF32 = witness::Witness<f32>;
