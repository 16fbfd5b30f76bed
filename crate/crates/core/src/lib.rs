//! Weil algebras and their Weil functors as a Taylor-mode automatic
//! differentiation engine.

pub mod algebra;
pub mod expr;
pub mod liegroup;
pub mod lift;
pub mod linalg;
pub mod manifold;
pub mod random;
pub mod scalar;

pub use scalar::Scalar;
pub mod verify;

pub type WeilAlgebra64 = algebra::WeilAlgebra<f64>;
pub type WeilAlgebra32 = algebra::WeilAlgebra<f32>;
pub type AlgebraElement64 = algebra::AlgebraElement<f64>;
pub type AlgebraElement32 = algebra::AlgebraElement<f32>;
pub type ExprGraph64 = expr::ExprGraph<f64>;
pub type LiftedVector64 = lift::LiftedVector<f64>;
pub type LiftedMatrix64 = liegroup::LiftedMatrix<f64>;
pub type Atlas64 = manifold::Atlas<f64>;
