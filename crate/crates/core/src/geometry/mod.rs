//! Model-manifold volume growth and the standing geometric assumptions.

mod assumptions;
mod curvature;
mod growth;
mod profile;

pub use assumptions::{check_assumptions, AssumptionReport, GAMMA_GROWTH_TOLERANCE};
pub use curvature::{ricci_nonneg_check, RicciCheck, RICCI_SLACK};
pub use growth::{GrowthDescriptor, GrowthForm, GrowthFunction};
pub use profile::{
    make_profile, unit_ball_volume, unit_sphere_area, GrowthAtInfinity, ProfileDescriptor,
    ProfileForm, ProfileParams, VolumeProfile, Warping,
};
