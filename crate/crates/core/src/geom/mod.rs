//! The non-symbolic examples: expanding coverings of the circle and the
//! Sierpinski octafold.

pub mod circle;
pub mod expr;
pub mod octafold;
pub mod quadrature;
