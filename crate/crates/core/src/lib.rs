// Quadrature nodes keep every published digit; `!(x > 0.0)` style checks reject NaN on purpose;
// expression builders are named after the operation they build.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

pub mod batch;
pub mod catalog;
pub mod corpus;
pub mod model;
pub mod quadrature;
pub mod sharpness;
pub mod transforms;
