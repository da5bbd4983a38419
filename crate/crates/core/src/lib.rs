pub mod codec;
pub mod corpus;
pub mod engrave;
pub mod eval;
pub mod ir;
pub mod qa;
pub mod sampler;
pub mod theory;
