//! Random generation of fuzzy measures, from additive seeds outwards.

pub mod base;
pub mod korder;
pub mod pipeline;
pub mod psym;
pub mod structured;

pub use base::{AdditiveMeasure, Direction, GenerationConfig};
pub use korder::{KOrderClass, KOrderSpec};
pub use pipeline::{GenRequest, GeneratedMeasure};
pub use psym::{InnerClass, Partition, SymVector};
pub use structured::{BoundConstraint, RangeBounds};
