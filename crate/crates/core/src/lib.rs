//! Symmetry-breaking bifurcation control of Z2-equivariant Bogdanov-Takens systems.

pub mod atlas;
pub mod chua;
pub mod cli;
pub mod error;
pub mod feedback;
pub mod normal_form;
pub mod poly;
pub mod roots;
pub mod sets;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
