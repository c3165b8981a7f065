//! Bijections between rooted bipartite quadrangulations and labeled one-face
//! maps on orientable and non-orientable surfaces, with enumeration, exact
//! generating functions and uniform sampling built on top.

pub mod cli;
pub mod enumeration;
pub mod error;
pub mod format;
pub mod forward;
pub mod genfun;
pub mod multipoint;
pub mod polygon;
pub mod reverse;
pub mod sampler;
pub mod surface;

pub use error::{MapError, Result};
pub use polygon::{FacedMap, TourCorner, UnicellularMap};
pub use surface::{EmbeddedMap, Flag, SurfaceType, Vertex};
