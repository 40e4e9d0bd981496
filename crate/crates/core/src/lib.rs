pub mod asymptotics;
pub mod binomial;
pub mod config;
pub mod error;
pub mod estimates;
pub mod function;
pub mod functions;
pub mod interval;
pub mod moments;
pub mod operators;
pub mod quad;
pub mod runner;
pub mod scalar;
pub mod shape;
pub mod transform;

pub use error::{Error, Result};

/// Concrete double-precision aliases; the modules themselves are generic
/// over the scalar type.
pub type Operator = operators::OperatorInstance<f64>;
pub type Transform = transform::TransformedOperator<f64>;
pub type Schedule = transform::LambdaSchedule<f64>;
pub type Function = function::ScalarFunction<f64>;
