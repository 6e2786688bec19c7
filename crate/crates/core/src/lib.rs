//! Normal forms in graph products of the natural numbers, the Toeplitz
//! kernels of their contractive representations, regularity certificates and
//! truncated Nica-covariant dilations.

pub mod dilation;
pub mod error;
pub mod graph;
pub mod kernel;
pub mod linalg;
pub mod propp;
pub mod random;
pub mod reduction;
pub mod rep;
pub mod word;

pub use error::{Error, Result};
pub use graph::{SimpleGraph, Vertex, VertexSet};
pub use linalg::CMatrix;
pub use rep::{OperatorMatrix, Representation};
pub use word::{parse_word, Word};
