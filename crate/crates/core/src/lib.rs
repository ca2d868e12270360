//! Invariants of virtual links through the Zh-construction.
//!
//! Diagrams are Gauss codes ([`diagram::GaussCode`]). From a code this crate
//! builds Zh(D) and Zh^op(D), checks and canonicalizes Alexander systems,
//! evaluates the DKM (arrow) bracket both directly and through the
//! Zh-bracket, and counts quandle colorings and 2-cocycle state sums of D
//! and of Zh(D).

pub mod algebra;
pub mod bracket;
pub mod diagram;
pub mod invariants;
pub mod moves;
pub mod quandle;
pub mod zh;

pub use algebra::{ArrowPolynomial, GroupRingElement, ModMatrix};
pub use diagram::{parse_gauss_code, GaussCode, Passage, Role, Sign, Smoothing};
pub use invariants::{Invariants, QuandleProbe};
pub use zh::{zh_construct, AlexanderSystem, Orientation, ZhDiagram};
