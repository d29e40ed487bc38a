//! Vertex operator superalgebras built from free fields.

pub mod engine;
pub mod fields;
pub mod fock;
pub mod structure;

pub use engine::VertexEngine;
pub use fields::{matrix_element, pair_series, product_matrix_element, vertex_series};
pub use fock::{DualVector, Fault, FockKey, FockSpace, Generator, GradedVector, Mode, Statistics};
pub use structure::{conformal_vector, AxiomConfig, VOSAStructure};
