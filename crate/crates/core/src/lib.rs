pub mod code;
pub mod extension;
pub mod field;
pub mod geometry;
pub mod limits;
pub mod pipeline;
pub mod solver;
