//! Curvature models, metric fields on the unit ball, space forms and
//! volume computations.

pub mod curvature;
pub mod metric;
pub mod region;
pub mod spaceform;
pub mod volume;

pub use curvature::{validate_curvature, CurvatureDescriptor, CurvatureModel, RiemannTensor};
pub use metric::{b_coefficients, EllipsoidSpec, MetricField, MetricKind};
pub use region::Region;
pub use spaceform::SpaceForm;
