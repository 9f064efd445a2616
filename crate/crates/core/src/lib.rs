//! Generalized means of bounded and unbounded subsets of the real line.

pub mod error;
pub mod ext;
pub mod ifs;
pub mod measure;
pub mod num;
pub mod seq;
pub mod series;
pub mod sets;
pub mod mean;
pub mod extension;
pub mod catalog;
pub mod properties;
pub mod constructions;
