//! Mixed-hybrid finite elements for Kirchhoff--Love shells.
//!
//! Displacements and bending moments are both primary unknowns, interpolated
//! with equal-order Lagrange elements on quadrilateral surface meshes. The
//! inter-element continuity of the tangential moment is enforced weakly by an
//! edge Lagrange multiplier, which makes the moment degrees of freedom local
//! to each element so that they can be condensed out before the global solve.
//! All geometric quantities are evaluated in global Cartesian coordinates via
//! tangential differential calculus (surface projector, Weingarten map,
//! tangential gradients), so the same code paths serve every chart.
//!
//! The crate ships a set of shell benchmark cases (cylindrical roof, extruded
//! arc with a closed-form solution, hemisphere, flower- and ring-shaped
//! shells, hyperbolic paraboloid) together with a convergence-study driver and
//! a small CLI that writes error tables, probe values, and VTK files.

pub mod assembly;
pub mod basis;
pub mod benchmarks;
pub mod cli;
pub mod geometry;
pub mod mechanics;
pub mod mesh;
pub mod postproc;
pub mod solver;
pub mod vtk;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("mesh construction error: {0}")]
    Mesh(String),
    #[error("boundary specification error: {0}")]
    Spec(String),
    #[error("element {element}: {message}")]
    Element { element: usize, message: String },
    #[error("solver error: {0}")]
    Solve(String),
    #[error("probe error: {0}")]
    Probe(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
