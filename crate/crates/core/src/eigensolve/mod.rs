//! Neumann eigenvalue solvers: P1 finite elements on simplicial meshes,
//! radial shooting on space-form balls, and the Weinberger upper bound.

pub mod fem;
pub mod mesh;
pub mod shooting;
pub mod weinberger;

pub use fem::{assemble, neumann_mu2, neumann_mu2_with, EigOptions, EigResult, Method};
pub use mesh::{Mesh, MeshJson};
pub use shooting::shoot_mu2;
pub use weinberger::{center_of_mass, weinberger_bound, CenterOfMass, CenterOptions, WeinbergerBound};
