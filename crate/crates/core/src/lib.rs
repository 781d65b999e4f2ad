//! Random generation, adjustment and verification of fuzzy measures
//! (monotone normalized set functions) of many structural classes.
//!
//! Everything starts from additive measures: they are cheap to sample,
//! they already belong to (or convert easily into) the supermodular,
//! superadditive, antibuoyant, p-symmetric and k-order families, and
//! their low diversity is then repaired with three tools — allowable-range
//! value adjustments, random walks on the induced linear extension of the
//! subset lattice, and family-specific shift strategies. Every generator
//! output is certified by an independent brute-force oracle in
//! [`verify`].
//!
//! Layout:
//! * [`subset`], [`setfn`] — bitmask subsets, the `2^n`-value container,
//!   Möbius/zeta transforms, interaction indices, duality;
//! * [`linext`] — linear extensions: extraction, repositioning bounds,
//!   exhaustive enumeration for small `n`, repetition ratio;
//! * [`gen`] — additive sampling and the per-class generation pipelines;
//! * [`verify`] — definitional oracles, classification, dual tag map.

pub mod error;
pub mod gen;
pub mod linext;
pub mod setfn;
pub mod subset;
pub mod verify;

pub use error::{Error, Result};
pub use gen::{
    AdditiveMeasure, Direction, GenRequest, GeneratedMeasure, GenerationConfig, InnerClass,
    KOrderClass, KOrderSpec, Partition, RangeBounds, SymVector,
};
pub use linext::LinearExtension;
pub use setfn::{IndexReport, MobiusRep, SetFunction, CLASS_TOL, EXACT_TOL};
pub use subset::Subset;
pub use verify::{ClassReport, ClassTag, MeasureClass, MeasureClassSpec, Witness};
