//! Discrete total variation, its curvature, the DCT-domain TV gradient and
//! the gradient-descent restoration of masked coefficients.

mod patch;
mod plane;
mod restore;

pub use patch::{curvature, curvature_and_tv, discrete_tv, tv_gradient_dct, Patch, RingAvailability, RING};
pub use plane::{descend_plane, optimal_reconstruct, optimal_reconstruct_descent, plane_curvature, plane_tv, BlockGrid, Bounds, PlaneDescent};
pub use restore::{restore_block, CoeffMask, DescentConfig, GammaSchedule, RestoreResult};
#[allow(unused_imports)]
pub(crate) use restore::descend;
