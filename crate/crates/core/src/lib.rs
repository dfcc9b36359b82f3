//! Persistent Steenrod-square barcodes over F2.
//!
//! The pipeline runs finite metric space → Vietoris-Rips filtration →
//! persistent cohomology with cocycle representatives → chain-level cup-i
//! products and Steenrod squares → image/kernel persistence modules of an
//! operation → barcodes, bottleneck distances and Gromov-Hausdorff lower
//! bounds.

pub mod cohomology;
pub mod complex;
pub mod distances;
pub mod error;
pub mod f2linalg;
pub mod metric;
pub mod steenrod;
pub mod synth;
pub mod thetamod;
pub mod verify;

pub use error::{Error, Result};
